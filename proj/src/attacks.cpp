#include "kitbench/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kitbench/errors.hpp"

namespace kitbench::attacks {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                     std::to_string(got));
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_inputs(const Classifier& clf, std::span<const double> x, const AttackSpec& spec) {
  require_dim(x.size(), clf.input_dim(), "attack input");
  require_dim(spec.box.dim(), x.size(), "attack box");
  spec.box.validate();
}

// Target reached with the requested logit margin.
bool reached(const Classifier& clf, std::span<const double> x, Label target, double confidence) {
  const Logits l = clf.logits(x);
  return clf.classify(x) == target && l.of(target) - l.of(other_label(target)) >= confidence;
}

AdversarialResult failure(std::span<const double> x, std::size_t iterations) {
  AdversarialResult r;
  r.original.assign(x.begin(), x.end());
  r.adversarial = r.original;
  r.iterations = iterations;
  return r;
}

AdversarialResult finish(const Classifier& clf, std::span<const double> x,
                         std::vector<double> candidate, Label target, std::size_t iterations) {
  if (clf.classify(candidate) != target) return failure(x, iterations);
  AdversarialResult r;
  r.original.assign(x.begin(), x.end());
  r.distances = lp_distances(x, candidate);
  r.adversarial = std::move(candidate);
  r.success = true;
  r.iterations = iterations;
  return r;
}

double l2_squared(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double l1(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

// Best successful iterate of one optimisation run.
struct RunOutcome {
  std::optional<std::vector<double>> best;
  double best_distance = kInf;
  std::size_t steps = 0;
};

// Runs `run(c)` once, then `extra_steps` more times adjusting c by bisection:
// c shrinks toward the last failure after a success and grows after a failure.
template <typename Run>
RunOutcome search_over_c(double c0, std::size_t extra_steps, Run&& run) {
  RunOutcome overall;
  double lo = 0.0;
  double hi = kInf;
  double c = c0;
  for (std::size_t round = 0; round <= extra_steps; ++round) {
    RunOutcome out = run(c);
    overall.steps += out.steps;
    if (out.best && out.best_distance < overall.best_distance) {
      overall.best = std::move(out.best);
      overall.best_distance = out.best_distance;
    }
    if (out.best_distance < kInf) {
      hi = std::min(hi, c);
      c = (lo + hi) / 2.0;
    } else {
      lo = std::max(lo, c);
      c = hi < kInf ? (lo + hi) / 2.0 : c * 10.0;
    }
  }
  return overall;
}

struct Adam {
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
    }
  }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;
};

}  // namespace

// --- classifier & box --------------------------------------------------------

Classifier::Classifier(const ScoreModel& model, double threshold)
    : model_(&model), threshold_(threshold) {
  if (!std::isfinite(threshold)) throw ConfigError("classification threshold must be finite");
}

Logits Classifier::logits(std::span<const double> x) const {
  return logits_from_score(model_->score(x), threshold_);
}

Label Classifier::classify(std::span<const double> x) const {
  return classify_score(model_->score(x), threshold_);
}

Box Box::unit(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)}; }

Box Box::unbounded(std::size_t n) {
  return {std::vector<double>(n, -kInf), std::vector<double>(n, kInf)};
}

Box Box::hull(std::span<const double> x) {
  Box b = unit(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    b.low[i] = std::min(0.0, x[i]);
    b.high[i] = std::max(1.0, x[i]);
  }
  return b;
}

bool Box::finite() const {
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (!std::isfinite(low[i]) || !std::isfinite(high[i])) return false;
  }
  return true;
}

void Box::validate() const {
  require_dim(high.size(), low.size(), "box bounds");
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (std::isnan(low[i]) || std::isnan(high[i]) || low[i] > high[i]) {
      throw ConfigError("box bound low > high at feature " + std::to_string(i));
    }
  }
}

void Box::clip(std::span<double> x) const {
  require_dim(x.size(), dim(), "box clip");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], low[i], high[i]);
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < low[i] || x[i] > high[i]) return false;
  }
  return true;
}

// --- metrics & loss ------------------------------------------------------------

LpDistances lp_distances(std::span<const double> x, std::span<const double> x_adv,
                         double l0_tolerance) {
  require_dim(x_adv.size(), x.size(), "lp_distances");
  LpDistances d;
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = std::abs(x_adv[i] - x[i]);
    if (delta > l0_tolerance) ++d.l0;
    d.l1 += delta;
    sq += delta * delta;
    d.linf = std::max(d.linf, delta);
  }
  d.l2 = std::sqrt(sq);
  return d;
}

double adversarial_loss(const Classifier& clf, std::span<const double> x, Label target,
                        double confidence) {
  const Logits l = clf.logits(x);
  return std::max(l.of(other_label(target)) - l.of(target) + confidence, 0.0);
}

double adversarial_loss_gradient(const Classifier& clf, std::span<const double> x, Label target,
                                 double confidence, std::span<double> grad) {
  require_dim(grad.size(), x.size(), "loss gradient");
  const double s = clf.model().score_gradient(x, grad);
  const Logits l = logits_from_score(s, clf.threshold());
  const double loss = std::max(l.of(other_label(target)) - l.of(target) + confidence, 0.0);
  // other - target = +-(2S - 2T): d/dx = 2 dS/dx for target benign, -2 dS/dx for malicious.
  const double scale = loss > 0.0 ? (target == Label::benign ? 2.0 : -2.0) : 0.0;
  for (double& g : grad) g *= scale;
  return loss;
}

// --- FGSM ------------------------------------------------------------------------

void FgsmConfig::validate() const {
  if (!std::isfinite(epsilon) || epsilon < 0.0) throw ConfigError("FGSM epsilon must be finite and >= 0");
}

AdversarialResult fgsm(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                       const FgsmConfig& cfg) {
  check_inputs(clf, x, spec);
  cfg.validate();
  std::vector<double> grad(x.size());
  adversarial_loss_gradient(clf, x, spec.target_label, 0.0, grad);
  std::vector<double> adv(x.begin(), x.end());
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] -= cfg.epsilon * sign(grad[i]);
  spec.box.clip(adv);
  return finish(clf, x, std::move(adv), spec.target_label, 1);
}

// --- JSMA ------------------------------------------------------------------------

void JsmaConfig::validate() const {
  if (!std::isfinite(theta) || !(theta > 0.0)) throw ConfigError("JSMA theta must be positive");
  if (max_features < 1) throw ConfigError("JSMA max_features must be >= 1");
}

std::vector<double> saliency_map(const Classifier& clf, std::span<const double> x, Label target) {
  require_dim(x.size(), clf.input_dim(), "saliency input");
  std::vector<double> grad(x.size());
  clf.model().score_gradient(x, grad);
  const double scale = target == Label::malicious ? 2.0 : -2.0;
  for (double& g : grad) g *= scale;
  return grad;
}

AdversarialResult jsma(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                       const JsmaConfig& cfg) {
  check_inputs(clf, x, spec);
  cfg.validate();
  std::vector<double> adv(x.begin(), x.end());
  std::vector<bool> used(x.size(), false);
  std::size_t distinct = 0;
  std::size_t iterations = 0;

  while (clf.classify(adv) != spec.target_label) {
    if (iterations >= cfg.max_iterations) return failure(x, iterations);
    const std::vector<double> sal = saliency_map(clf, adv, spec.target_label);
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < adv.size(); ++i) {
      if (sal[i] == 0.0) continue;
      if (used[i] && !cfg.reuse_features) continue;
      if (!used[i] && distinct >= cfg.max_features) continue;
      // Saturated: already at the bound in the direction that helps.
      if (sal[i] > 0.0 ? adv[i] >= spec.box.high[i] : adv[i] <= spec.box.low[i]) continue;
      if (!pick || std::abs(sal[i]) > std::abs(sal[*pick])) pick = i;
    }
    if (!pick) return failure(x, iterations);
    const std::size_t i = *pick;
    adv[i] = std::clamp(adv[i] + cfg.theta * sign(sal[i]), spec.box.low[i], spec.box.high[i]);
    if (!used[i]) {
      used[i] = true;
      ++distinct;
    }
    ++iterations;
  }
  return finish(clf, x, std::move(adv), spec.target_label, iterations);
}

// --- C&W L2 ----------------------------------------------------------------------

void CwConfig::validate() const {
  if (!std::isfinite(c) || !(c > 0.0)) throw ConfigError("C&W c must be positive");
  if (!std::isfinite(learning_rate) || !(learning_rate > 0.0)) {
    throw ConfigError("C&W learning_rate must be positive");
  }
  if (max_steps < 1) throw ConfigError("C&W max_steps must be >= 1");
  if (!std::isfinite(confidence) || confidence < 0.0) throw ConfigError("C&W confidence must be >= 0");
}

AdversarialResult cw_l2(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                        const CwConfig& cfg) {
  check_inputs(clf, x, spec);
  cfg.validate();
  const Box& box = spec.box;
  if (cfg.change_of_variables && !box.finite()) {
    throw ConfigError("C&W change of variables needs a finite box");
  }
  const Label target = spec.target_label;
  if (reached(clf, x, target, cfg.confidence)) {
    return finish(clf, x, std::vector<double>(x.begin(), x.end()), target, 0);
  }
  const std::size_t n = x.size();

  auto run = [&](double c) {
    RunOutcome out;
    std::vector<double> w(n);
    std::vector<double> adv(x.begin(), x.end());
    if (cfg.change_of_variables) {
      for (std::size_t i = 0; i < n; ++i) {
        const double range = box.high[i] - box.low[i];
        const double t = range > 0.0 ? (x[i] - box.low[i]) / range * 2.0 - 1.0 : 0.0;
        w[i] = std::atanh(std::clamp(t, -0.999999, 0.999999));
      }
    } else {
      box.clip(adv);
    }
    auto to_box = [&]() {
      if (!cfg.change_of_variables) return;
      for (std::size_t i = 0; i < n; ++i) {
        adv[i] = box.low[i] + (box.high[i] - box.low[i]) * (std::tanh(w[i]) + 1.0) / 2.0;
      }
    };
    to_box();

    Adam adam(n);
    std::vector<double> g(n);
    for (std::size_t step = 0; step < cfg.max_steps; ++step) {
      adversarial_loss_gradient(clf, adv, target, cfg.confidence, g);
      for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * (adv[i] - x[i]) + c * g[i];
      if (cfg.change_of_variables) {
        for (std::size_t i = 0; i < n; ++i) {
          const double th = std::tanh(w[i]);
          g[i] *= (box.high[i] - box.low[i]) / 2.0 * (1.0 - th * th);
        }
        adam.step(w, g, cfg.learning_rate);
        to_box();
      } else {
        adam.step(adv, g, cfg.learning_rate);
        box.clip(adv);
      }
      ++out.steps;
      if (reached(clf, adv, target, cfg.confidence)) {
        const double d = l2_squared(adv, x);
        if (d < out.best_distance) {
          out.best_distance = d;
          out.best = adv;
        }
      }
    }
    return out;
  };

  RunOutcome result = search_over_c(cfg.c, cfg.binary_search_steps, run);
  if (!result.best) return failure(x, result.steps);
  return finish(clf, x, std::move(*result.best), target, result.steps);
}

// --- ENM -----------------------------------------------------------------------------

std::vector<double> soft_threshold(std::span<const double> z, std::span<const double> center,
                                   double shrink) {
  require_dim(center.size(), z.size(), "soft_threshold center");
  if (!(shrink >= 0.0)) throw DomainError("soft-threshold shrink must be >= 0");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = z[i] - center[i];
    out[i] = center[i] + std::max(std::abs(d) - shrink, 0.0) * sign(d);
  }
  return out;
}

void EnmConfig::validate() const {
  if (!std::isfinite(c) || !(c > 0.0)) throw ConfigError("ENM c must be positive");
  if (!std::isfinite(beta_l1) || beta_l1 < 0.0) throw ConfigError("ENM beta_l1 must be >= 0");
  if (!std::isfinite(learning_rate) || !(learning_rate > 0.0)) {
    throw ConfigError("ENM learning_rate must be positive");
  }
  if (max_steps < 1) throw ConfigError("ENM max_steps must be >= 1");
  if (!std::isfinite(confidence) || confidence < 0.0) throw ConfigError("ENM confidence must be >= 0");
}

AdversarialResult enm(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                      const EnmConfig& cfg) {
  check_inputs(clf, x, spec);
  cfg.validate();
  const Label target = spec.target_label;
  if (reached(clf, x, target, cfg.confidence)) {
    return finish(clf, x, std::vector<double>(x.begin(), x.end()), target, 0);
  }
  const std::size_t n = x.size();

  auto run = [&](double c) {
    RunOutcome out;
    std::vector<double> current(x.begin(), x.end());
    std::vector<double> slack(x.begin(), x.end());
    std::vector<double> g(n);
    std::vector<double> z(n);
    for (std::size_t k = 0; k < cfg.max_steps; ++k) {
      double lr = cfg.learning_rate;
      if (cfg.lr_decay) {
        lr *= std::sqrt(1.0 - static_cast<double>(k) / static_cast<double>(cfg.max_steps));
      }
      adversarial_loss_gradient(clf, slack, target, cfg.confidence, g);
      if (cfg.l2_squared) {
        for (std::size_t i = 0; i < n; ++i) g[i] = c * g[i] + 2.0 * (slack[i] - x[i]);
      } else {
        const double norm = std::sqrt(l2_squared(slack, x));
        for (std::size_t i = 0; i < n; ++i) {
          g[i] = c * g[i] + (norm > 0.0 ? (slack[i] - x[i]) / norm : 0.0);
        }
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = slack[i] - lr * g[i];
      std::vector<double> next = soft_threshold(z, x, lr * cfg.beta_l1);
      spec.box.clip(next);
      if (cfg.fista) {
        const double momentum = static_cast<double>(k) / static_cast<double>(k + 3);
        for (std::size_t i = 0; i < n; ++i) slack[i] = next[i] + momentum * (next[i] - current[i]);
      } else {
        slack = next;
      }
      current = std::move(next);
      ++out.steps;
      if (reached(clf, current, target, cfg.confidence)) {
        const double l2sq = l2_squared(current, x);
        const double d = cfg.beta_l1 * l1(current, x) + (cfg.l2_squared ? l2sq : std::sqrt(l2sq));
        if (d < out.best_distance) {
          out.best_distance = d;
          out.best = current;
        }
      }
    }
    return out;
  };

  RunOutcome result = search_over_c(cfg.c, cfg.binary_search_steps, run);
  if (!result.best) return failure(x, result.steps);
  return finish(clf, x, std::move(*result.best), target, result.steps);
}

}  // namespace kitbench::attacks

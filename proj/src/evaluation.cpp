#include "kitbench/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "kitbench/errors.hpp"

namespace kitbench::eval {
namespace {

void split_by_label(std::span<const double> scores, std::span<const Label> labels,
                    std::vector<double>& benign, std::vector<double>& malicious) {
  if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    (labels[i] == Label::benign ? benign : malicious).push_back(scores[i]);
  }
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// processed exactly once; the first exception is rethrown after joining.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

attacks::Box make_box(BoxMode mode, std::span<const double> x) {
  switch (mode) {
    case BoxMode::unit: return attacks::Box::unit(x.size());
    case BoxMode::hull: return attacks::Box::hull(x);
    case BoxMode::unbounded: return attacks::Box::unbounded(x.size());
  }
  throw ConfigError("unknown box mode");
}

nlohmann::json settings_json(const CampaignSettings& s) {
  nlohmann::json j;
  j["violation"] = violation_name(s.violation);
  j["n"] = s.n;
  j["seed"] = s.seed;
  j["threshold"] = s.threshold;
  j["selection"] = strategy_name(s.selection);
  j["source_class"] =
      std::string(label_name(s.source_class.value_or(default_source_class(s.violation))));
  j["box"] = box_mode_name(s.box);
  return j;
}

nlohmann::json method_json(const MethodConfig& cfg) {
  nlohmann::json j;
  j["method"] = method_name(method_of(cfg));
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, attacks::FgsmConfig>) {
          j["epsilon"] = c.epsilon;
        } else if constexpr (std::is_same_v<T, attacks::JsmaConfig>) {
          j["theta"] = c.theta;
          j["max_features"] = c.max_features;
          j["reuse_features"] = c.reuse_features;
          j["max_iterations"] = c.max_iterations;
        } else if constexpr (std::is_same_v<T, attacks::CwConfig>) {
          j["c"] = c.c;
          j["learning_rate"] = c.learning_rate;
          j["max_steps"] = c.max_steps;
          j["confidence"] = c.confidence;
          j["binary_search_steps"] = c.binary_search_steps;
          j["change_of_variables"] = c.change_of_variables;
        } else {
          j["c"] = c.c;
          j["beta_l1"] = c.beta_l1;
          j["learning_rate"] = c.learning_rate;
          j["max_steps"] = c.max_steps;
          j["confidence"] = c.confidence;
          j["binary_search_steps"] = c.binary_search_steps;
          j["l2_squared"] = c.l2_squared;
          j["fista"] = c.fista;
          j["lr_decay"] = c.lr_decay;
        }
      },
      cfg);
  return j;
}

SweepReport run_enm_sweep(const kitnet::KitNetModel& model, const LabeledDataset& data,
                          const attacks::EnmConfig& base, std::span<const double> values,
                          const CampaignSettings& settings, const std::string& parameter) {
  if (values.empty()) throw ConfigError("sweep grid is empty");
  SweepReport report;
  report.swept_parameter = parameter;
  for (double v : values) {
    attacks::EnmConfig cfg = base;
    (parameter == "c" ? cfg.c : cfg.beta_l1) = v;
    const AttackCampaignReport campaign = run_attack_campaign(model, data, cfg, settings);
    report.points.push_back({v, campaign.success_rate, campaign.successes, campaign.mean_distances});
  }
  std::stable_sort(report.points.begin(), report.points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) { return a.value < b.value; });
  report.config["campaign"] = settings_json(settings);
  report.config["attack"] = method_json(base);
  report.config["attack"].erase(parameter == "c" ? "c" : "beta_l1");
  return report;
}

}  // namespace

// --- ROC & threshold sweeps -----------------------------------------------------------

std::vector<RocPoint> roc_curve(std::span<const double> benign, std::span<const double> malicious) {
  if (benign.empty() || malicious.empty()) {
    throw EvaluationError("ROC needs scores from both classes");
  }
  struct Entry {
    double score;
    bool malicious;
  };
  std::vector<Entry> all;
  all.reserve(benign.size() + malicious.size());
  for (double s : benign) all.push_back({s, false});
  for (double s : malicious) all.push_back({s, true});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score > b.score; });

  const double nb = static_cast<double>(benign.size());
  const double nm = static_cast<double>(malicious.size());
  std::vector<RocPoint> roc{{0.0, 0.0}};
  std::size_t fp = 0;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double s = all[i].score;
    for (; i < all.size() && all[i].score == s; ++i) (all[i].malicious ? tp : fp)++;
    roc.push_back({static_cast<double>(fp) / nb, static_cast<double>(tp) / nm});
  }
  return roc;
}

double roc_auc(std::span<const double> benign, std::span<const double> malicious) {
  const std::vector<RocPoint> roc = roc_curve(benign, malicious);
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
  }
  return area;
}

ThresholdSweepReport sweep_threshold_scores(std::span<const double> scores,
                                            std::span<const Label> labels, double t_min,
                                            double t_max, std::size_t steps) {
  if (steps < 2) throw ConfigError("threshold sweep needs at least 2 steps");
  if (!(t_min < t_max)) throw ConfigError("threshold sweep needs t_min < t_max");
  std::vector<double> benign;
  std::vector<double> malicious;
  split_by_label(scores, labels, benign, malicious);
  if (benign.empty() || malicious.empty()) {
    throw EvaluationError("threshold sweep needs both benign and malicious rows (ROC undefined)");
  }
  std::sort(benign.begin(), benign.end());
  std::sort(malicious.begin(), malicious.end());

  ThresholdSweepReport report;
  report.n_benign = benign.size();
  report.n_malicious = malicious.size();
  const double nb = static_cast<double>(benign.size());
  const double nm = static_cast<double>(malicious.size());
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = k + 1 == steps
                         ? t_max
                         : t_min + (t_max - t_min) * static_cast<double>(k) /
                                       static_cast<double>(steps - 1);
    // Rows with S >= t raise the alarm.
    const auto fp = static_cast<double>(
        benign.end() - std::lower_bound(benign.begin(), benign.end(), t));
    const auto fn = static_cast<double>(
        std::lower_bound(malicious.begin(), malicious.end(), t) - malicious.begin());
    report.grid.push_back({t, fp / nb, fn / nm, ((nb - fp) + (nm - fn)) / (nb + nm)});
  }
  report.roc = roc_curve(benign, malicious);
  report.auc = roc_auc(benign, malicious);
  report.config["t_min"] = t_min;
  report.config["t_max"] = t_max;
  report.config["steps"] = steps;
  return report;
}

std::vector<double> score_rows(const ScoreModel& model, const Matrix& rows) {
  std::vector<double> scores(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) scores[r] = model.score(rows.row(r));
  return scores;
}

ThresholdSweepReport sweep_threshold(const ScoreModel& model, const LabeledDataset& data,
                                     double t_min, double t_max, std::size_t steps) {
  data.validate();
  const std::vector<double> scores = score_rows(model, data.rows);
  return sweep_threshold_scores(scores, data.labels, t_min, t_max, steps);
}

// --- sample selection -------------------------------------------------------------------

std::vector<std::size_t> select_samples(std::span<const double> scores,
                                        std::span<const Label> labels, SelectionStrategy strategy,
                                        Label cls, std::size_t n, std::uint64_t seed,
                                        double threshold) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cls) eligible.push_back(i);
  }
  if (n > eligible.size()) {
    throw EvaluationError("requested " + std::to_string(n) + " " + std::string(label_name(cls)) +
                          " samples but only " + std::to_string(eligible.size()) + " exist");
  }
  if (strategy == SelectionStrategy::random_of_class) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
      std::swap(eligible[i], eligible[pick(rng)]);
    }
    eligible.resize(n);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
  }
  if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
  std::stable_sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(scores[a] - threshold) < std::abs(scores[b] - threshold);
  });
  eligible.resize(n);
  return eligible;
}

// --- names --------------------------------------------------------------------------------

Method method_of(const MethodConfig& cfg) { return static_cast<Method>(cfg.index()); }

std::string method_name(Method m) {
  switch (m) {
    case Method::fgsm: return "fgsm";
    case Method::jsma: return "jsma";
    case Method::cw_l2: return "cw_l2";
    case Method::enm: return "enm";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "fgsm") return Method::fgsm;
  if (name == "jsma") return Method::jsma;
  if (name == "cw" || name == "cw_l2" || name == "cw-l2") return Method::cw_l2;
  if (name == "enm" || name == "ead") return Method::enm;
  throw ConfigError("unknown attack method '" + std::string(name) + "'");
}

std::string violation_name(Violation v) {
  return v == Violation::integrity ? "integrity" : "availability";
}

Violation parse_violation(std::string_view name) {
  if (name == "integrity") return Violation::integrity;
  if (name == "availability") return Violation::availability;
  throw ConfigError("unknown violation '" + std::string(name) + "'");
}

std::string box_mode_name(BoxMode b) {
  switch (b) {
    case BoxMode::unit: return "unit";
    case BoxMode::hull: return "hull";
    case BoxMode::unbounded: return "unbounded";
  }
  return "unknown";
}

BoxMode parse_box_mode(std::string_view name) {
  if (name == "unit") return BoxMode::unit;
  if (name == "hull") return BoxMode::hull;
  if (name == "unbounded") return BoxMode::unbounded;
  throw ConfigError("unknown box mode '" + std::string(name) + "'");
}

std::string strategy_name(SelectionStrategy s) {
  return s == SelectionStrategy::random_of_class ? "random" : "nearest";
}

SelectionStrategy parse_strategy(std::string_view name) {
  if (name == "random" || name == "random_of_class") return SelectionStrategy::random_of_class;
  if (name == "nearest" || name == "nearest_threshold") return SelectionStrategy::nearest_threshold;
  throw ConfigError("unknown selection strategy '" + std::string(name) + "'");
}

Label target_label(Violation v) {
  return v == Violation::integrity ? Label::benign : Label::malicious;
}

Label default_source_class(Violation v) { return other_label(target_label(v)); }

// --- campaigns ------------------------------------------------------------------------------

std::optional<MeanDistances> mean_distances(std::span<const attacks::AdversarialResult> results) {
  MeanDistances m;
  std::size_t count = 0;
  for (const auto& r : results) {
    if (!r.success || !r.distances) continue;
    m.l0 += static_cast<double>(r.distances->l0);
    m.l1 += r.distances->l1;
    m.l2 += r.distances->l2;
    m.linf += r.distances->linf;
    ++count;
  }
  if (count == 0) return std::nullopt;
  const double c = static_cast<double>(count);
  return MeanDistances{m.l0 / c, m.l1 / c, m.l2 / c, m.linf / c};
}

AttackCampaignReport run_attack_campaign(const kitnet::KitNetModel& model,
                                         const LabeledDataset& data, const MethodConfig& method,
                                         const CampaignSettings& settings) {
  data.validate();
  if (data.rows.cols() != model.input_dim()) {
    throw ShapeError("dataset width " + std::to_string(data.rows.cols()) +
                     " does not match model input " + std::to_string(model.input_dim()));
  }
  if (settings.n == 0) throw ConfigError("campaign needs at least one sample");
  const Label source = settings.source_class.value_or(default_source_class(settings.violation));
  const Label target = target_label(settings.violation);

  std::vector<double> scores;
  if (settings.selection == SelectionStrategy::nearest_threshold) {
    scores = score_rows(kitnet::KitNetScorer(model, kitnet::InputSpace::raw), data.rows);
  }
  AttackCampaignReport report;
  report.method = method_name(method_of(method));
  report.violation = settings.violation;
  report.seed = settings.seed;
  report.threshold = settings.threshold;
  report.sample_rows = select_samples(scores, data.labels, settings.selection, source, settings.n,
                                      settings.seed, settings.threshold);
  report.n_samples = report.sample_rows.size();

  const kitnet::KitNetScorer scorer(model, kitnet::InputSpace::normalized);
  const attacks::Classifier clf(scorer, settings.threshold);
  report.per_sample.resize(report.n_samples);
  parallel_for(report.n_samples, settings.workers, [&](std::size_t i) {
    const std::vector<double> u =
        model.input_normalizer.normalize(data.rows.row(report.sample_rows[i]));
    const attacks::AttackSpec spec{target, make_box(settings.box, u)};
    report.per_sample[i] = std::visit(
        [&](const auto& cfg) -> attacks::AdversarialResult {
          using T = std::decay_t<decltype(cfg)>;
          if constexpr (std::is_same_v<T, attacks::FgsmConfig>) return attacks::fgsm(clf, u, spec, cfg);
          if constexpr (std::is_same_v<T, attacks::JsmaConfig>) return attacks::jsma(clf, u, spec, cfg);
          if constexpr (std::is_same_v<T, attacks::CwConfig>) return attacks::cw_l2(clf, u, spec, cfg);
          if constexpr (std::is_same_v<T, attacks::EnmConfig>) return attacks::enm(clf, u, spec, cfg);
        },
        method);
  });

  for (auto& r : report.per_sample) {
    if (!r.success) continue;
    if (clf.classify(r.adversarial) != target) {
      ++report.reverify_failures;
      r.success = false;
      r.adversarial = r.original;
      r.distances.reset();
      continue;
    }
    ++report.successes;
  }
  report.success_rate =
      100.0 * static_cast<double>(report.successes) / static_cast<double>(report.n_samples);
  report.mean_distances = mean_distances(report.per_sample);
  report.config["campaign"] = settings_json(settings);
  report.config["attack"] = method_json(method);
  return report;
}

SweepReport sweep_enm_c(const kitnet::KitNetModel& model, const LabeledDataset& data,
                        const attacks::EnmConfig& base, std::span<const double> c_values,
                        const CampaignSettings& settings) {
  return run_enm_sweep(model, data, base, c_values, settings, "c");
}

SweepReport sweep_enm_beta(const kitnet::KitNetModel& model, const LabeledDataset& data,
                           const attacks::EnmConfig& base, std::span<const double> beta_values,
                           const CampaignSettings& settings) {
  return run_enm_sweep(model, data, base, beta_values, settings, "beta");
}

}  // namespace kitbench::eval

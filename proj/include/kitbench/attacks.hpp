#pragma once

// Gradient-based adversarial example generation against a thresholded
// anomaly score. All attacks treat the ScoreModel as read-only and keep no
// state between calls, so samples can be attacked concurrently.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kitbench/score_model.hpp"

namespace kitbench::attacks {

/// Score model plus the threshold T of its two-logit classification layer.
class Classifier {
 public:
  Classifier(const ScoreModel& model, double threshold);

  const ScoreModel& model() const noexcept { return *model_; }
  double threshold() const noexcept { return threshold_; }
  std::size_t input_dim() const { return model_->input_dim(); }

  double score(std::span<const double> x) const { return model_->score(x); }
  Logits logits(std::span<const double> x) const;
  Label classify(std::span<const double> x) const;

 private:
  const ScoreModel* model_;
  double threshold_;
};

/// Per-feature valid region. Infinite bounds are allowed except for C&W.
struct Box {
  std::vector<double> low;
  std::vector<double> high;

  static Box unit(std::size_t n);
  static Box unbounded(std::size_t n);
  /// [min(0, x_i), max(1, x_i)]: the unit box widened to contain x.
  static Box hull(std::span<const double> x);

  std::size_t dim() const noexcept { return low.size(); }
  bool finite() const;
  /// Throws ShapeError/ConfigError unless low <= high elementwise.
  void validate() const;
  void clip(std::span<double> x) const;
  bool contains(std::span<const double> x) const;
};

struct AttackSpec {
  Label target_label = Label::benign;
  Box box;
};

inline constexpr double kL0Tolerance = 1e-6;

struct LpDistances {
  std::size_t l0 = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;

  bool operator==(const LpDistances&) const = default;
};

/// L0 counts |delta_i| > l0_tolerance; the other norms use the exact delta.
LpDistances lp_distances(std::span<const double> x, std::span<const double> x_adv,
                         double l0_tolerance = kL0Tolerance);

struct AdversarialResult {
  std::vector<double> original;
  /// Equal to `original` when the attack failed.
  std::vector<double> adversarial;
  bool success = false;
  std::size_t iterations = 0;
  /// Absent when the attack failed.
  std::optional<LpDistances> distances;

  bool operator==(const AdversarialResult&) const = default;
};

/// max(logit_other(x) - logit_target(x) + confidence, 0).
double adversarial_loss(const Classifier& clf, std::span<const double> x, Label target,
                        double confidence);
/// Same as adversarial_loss, also writing its gradient (zero where the hinge is flat).
double adversarial_loss_gradient(const Classifier& clf, std::span<const double> x, Label target,
                                 double confidence, std::span<double> grad);

struct FgsmConfig {
  double epsilon = 0.1;
  void validate() const;
};

/// One step x - epsilon * sign(grad loss), clipped to the box. sign(0) = 0.
AdversarialResult fgsm(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                       const FgsmConfig& cfg);

/// d(logit_target - logit_other)/dx, i.e. +-2 dS/dx for the two-logit layer.
std::vector<double> saliency_map(const Classifier& clf, std::span<const double> x, Label target);

struct JsmaConfig {
  /// Step magnitude; each modification adds theta * sign(saliency_i).
  double theta = 1.0;
  /// L0 budget: number of distinct features that may be modified.
  std::size_t max_features = 10;
  /// When false a feature leaves the search domain once modified. When true
  /// it stays until it saturates against the box.
  bool reuse_features = false;
  /// Hard cap on modifications, only reachable when reuse_features is set.
  std::size_t max_iterations = 1000;
  void validate() const;
};

AdversarialResult jsma(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                       const JsmaConfig& cfg);

struct CwConfig {
  double c = 1.0;
  double learning_rate = 0.01;
  std::size_t max_steps = 1000;
  double confidence = 0.0;
  /// Extra runs that rescale c by bisection; 0 runs once with c.
  std::size_t binary_search_steps = 0;
  /// tanh reparameterisation onto the box. When false, optimise x directly
  /// and project onto the box after every step.
  bool change_of_variables = true;
  void validate() const;
};

/// Minimises ||x' - x||_2^2 + c * loss(x') with Adam; returns the successful
/// iterate closest to x in L2. Requires a finite box when change_of_variables is set.
AdversarialResult cw_l2(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                        const CwConfig& cfg);

/// center_i + max(|z_i - center_i| - shrink, 0) * sign(z_i - center_i).
std::vector<double> soft_threshold(std::span<const double> z, std::span<const double> center,
                                   double shrink);

struct EnmConfig {
  double c = 450.0;
  double beta_l1 = 1.0;
  double learning_rate = 0.05;
  std::size_t max_steps = 1000;
  double confidence = 0.0;
  std::size_t binary_search_steps = 0;
  /// Squared L2 term (smooth at the origin); false uses the plain norm.
  bool l2_squared = true;
  /// FISTA momentum on the slack variable.
  bool fista = true;
  /// Step size decays as lr * sqrt(1 - k / max_steps).
  bool lr_decay = true;
  void validate() const;
};

/// Elastic-net attack: ISTA on c * loss + ||d||_2^2 + beta * ||d||_1. Returns the
/// successful iterate with the smallest elastic-net distance.
AdversarialResult enm(const Classifier& clf, std::span<const double> x, const AttackSpec& spec,
                      const EnmConfig& cfg);

}  // namespace kitbench::attacks

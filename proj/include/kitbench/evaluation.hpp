#pragma once

// Experiment harness: threshold sweeps with FPR/FNR/accuracy, ROC/AUC,
// sample selection, attack campaigns and ENM hyperparameter sweeps.
//
// Rates in ThresholdSweepReport are fractions in [0, 1]; campaign success
// rates are percentages.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kitbench/attacks.hpp"
#include "kitbench/data_io.hpp"
#include "kitbench/kitnet.hpp"

namespace kitbench::eval {

using io::LabeledDataset;

inline constexpr int kReportSchemaVersion = 1;

struct ThresholdPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double accuracy = 0.0;
  bool operator==(const ThresholdPoint&) const = default;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

struct ThresholdSweepReport {
  std::vector<ThresholdPoint> grid;
  std::vector<RocPoint> roc;
  double auc = 0.0;
  std::size_t n_benign = 0;
  std::size_t n_malicious = 0;
  nlohmann::json config = nlohmann::json::object();
  bool operator==(const ThresholdSweepReport&) const = default;
};

/// ROC through every distinct score, from (0,0) to (1,1). Rows with S >= t are flagged.
std::vector<RocPoint> roc_curve(std::span<const double> benign, std::span<const double> malicious);
/// Trapezoidal area under roc_curve: P(malicious > benign) + P(tie) / 2.
/// Throws EvaluationError when either class is empty.
double roc_auc(std::span<const double> benign, std::span<const double> malicious);

/// Evenly spaced grid of `steps` thresholds over [t_min, t_max].
ThresholdSweepReport sweep_threshold_scores(std::span<const double> scores,
                                            std::span<const Label> labels, double t_min,
                                            double t_max, std::size_t steps);
ThresholdSweepReport sweep_threshold(const ScoreModel& model, const LabeledDataset& data,
                                     double t_min, double t_max, std::size_t steps);

std::vector<double> score_rows(const ScoreModel& model, const Matrix& rows);

enum class SelectionStrategy { random_of_class, nearest_threshold };

/// random_of_class: seeded uniform sample without replacement (ascending order).
/// nearest_threshold: the n rows with smallest |S - T|, ties by row index.
std::vector<std::size_t> select_samples(std::span<const double> scores,
                                        std::span<const Label> labels, SelectionStrategy strategy,
                                        Label cls, std::size_t n, std::uint64_t seed,
                                        double threshold);

enum class Violation { integrity, availability };
enum class Method { fgsm, jsma, cw_l2, enm };
enum class BoxMode { unit, hull, unbounded };

using MethodConfig =
    std::variant<attacks::FgsmConfig, attacks::JsmaConfig, attacks::CwConfig, attacks::EnmConfig>;

Method method_of(const MethodConfig& cfg);
std::string method_name(Method m);
/// Accepts fgsm, jsma, cw (or cw_l2, cw-l2), enm. Throws ConfigError otherwise.
Method parse_method(std::string_view name);
std::string violation_name(Violation v);
Violation parse_violation(std::string_view name);
std::string box_mode_name(BoxMode b);
BoxMode parse_box_mode(std::string_view name);
std::string strategy_name(SelectionStrategy s);
SelectionStrategy parse_strategy(std::string_view name);

/// Integrity: malicious rows pushed to benign. Availability: benign rows pushed to malicious.
Label target_label(Violation v);
Label default_source_class(Violation v);

struct CampaignSettings {
  Violation violation = Violation::integrity;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  double threshold = 1.0;
  SelectionStrategy selection = SelectionStrategy::random_of_class;
  /// Overrides the class samples are drawn from.
  std::optional<Label> source_class;
  BoxMode box = BoxMode::hull;
  /// 0 uses every hardware thread.
  std::size_t workers = 0;
};

struct MeanDistances {
  double l0 = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  bool operator==(const MeanDistances&) const = default;
};

/// Means over the successful results only; nullopt when there are none.
std::optional<MeanDistances> mean_distances(std::span<const attacks::AdversarialResult> results);

struct AttackCampaignReport {
  std::string method;
  Violation violation = Violation::integrity;
  std::size_t n_samples = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  std::optional<MeanDistances> mean_distances;
  std::vector<std::size_t> sample_rows;
  std::vector<attacks::AdversarialResult> per_sample;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  /// Successes the attack reported that did not classify as the target when rechecked.
  std::size_t reverify_failures = 0;
  nlohmann::json config = nlohmann::json::object();
  bool operator==(const AttackCampaignReport&) const = default;
};

/// Attacks `settings.n` selected rows in the model's normalized feature space.
AttackCampaignReport run_attack_campaign(const kitnet::KitNetModel& model,
                                         const LabeledDataset& data, const MethodConfig& method,
                                         const CampaignSettings& settings);

struct SweepPoint {
  double value = 0.0;
  double success_rate = 0.0;
  std::size_t successes = 0;
  std::optional<MeanDistances> mean_distances;
  bool operator==(const SweepPoint&) const = default;
};

struct SweepReport {
  std::string swept_parameter;
  std::vector<SweepPoint> points;
  nlohmann::json config = nlohmann::json::object();
  bool operator==(const SweepReport&) const = default;
};

SweepReport sweep_enm_c(const kitnet::KitNetModel& model, const LabeledDataset& data,
                        const attacks::EnmConfig& base, std::span<const double> c_values,
                        const CampaignSettings& settings);
SweepReport sweep_enm_beta(const kitnet::KitNetModel& model, const LabeledDataset& data,
                           const attacks::EnmConfig& base, std::span<const double> beta_values,
                           const CampaignSettings& settings);

}  // namespace kitbench::eval

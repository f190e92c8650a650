#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace kitbench {

enum class Label { benign, malicious };

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view text);
inline Label other_label(Label label) {
  return label == Label::benign ? Label::malicious : Label::benign;
}

/// A differentiable non-negative anomaly score S(x). Implementations are
/// immutable after construction and safe to share between threads.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual std::size_t input_dim() const = 0;
  virtual double score(std::span<const double> x) const = 0;
  /// Writes dS/dx into `grad` and returns S(x).
  virtual double score_gradient(std::span<const double> x, std::span<double> grad) const = 0;
};

/// Two-logit classification layer on top of a score:
/// benign = 2T - S, malicious = S. The logits always sum to 2T.
struct Logits {
  double benign = 0.0;
  double malicious = 0.0;

  double of(Label label) const { return label == Label::benign ? benign : malicious; }
};

inline Logits logits_from_score(double score, double threshold) {
  return {2.0 * threshold - score, score};
}

/// Alarm rule: malicious iff S >= T.
inline Label classify_score(double score, double threshold) {
  return score >= threshold ? Label::malicious : Label::benign;
}

/// argmax over the logits with ties resolved to malicious.
inline Label argmax_label(const Logits& logits) {
  return logits.malicious >= logits.benign ? Label::malicious : Label::benign;
}

}  // namespace kitbench

#include <gtest/gtest.h>

#include <random>

#include "kitbench/errors.hpp"
#include "kitbench/evaluation.hpp"
#include "support.hpp"

namespace kitbench::eval {
namespace {

double pair_count_auc(const std::vector<double>& benign, const std::vector<double>& malicious) {
  double wins = 0.0;
  for (double m : malicious) {
    for (double b : benign) wins += m > b ? 1.0 : (m == b ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(benign.size() * malicious.size());
}

TEST(RocAuc, HandExamples) {
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<double>{0.5, 0.9}), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.5, 0.9}, std::vector<double>{0.1, 0.2}), 0.0);
  EXPECT_EQ(roc_auc(std::vector<double>{3, 3, 3}, std::vector<double>{3, 3}), 0.5);
  EXPECT_THROW(roc_auc(std::vector<double>{}, std::vector<double>{1}), EvaluationError);
}

TEST(RocAuc, MatchesPairCounting) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> coarse(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nb = 1 + trial % 13;
    const std::size_t nm = 1 + (trial * 7) % 11;
    std::vector<double> benign;
    std::vector<double> malicious;
    // Half of the trials use coarse values so that ties are frequent.
    for (std::size_t i = 0; i < nb; ++i) {
      benign.push_back(trial % 2 ? coarse(rng) / 10.0 : testing::random_vector(rng, 1, 0, 1)[0]);
    }
    for (std::size_t i = 0; i < nm; ++i) {
      malicious.push_back(trial % 2 ? coarse(rng) / 10.0 : testing::random_vector(rng, 1, 0.2, 1.2)[0]);
    }
    EXPECT_NEAR(roc_auc(benign, malicious), pair_count_auc(benign, malicious), 1e-12);
  }
}

TEST(RocCurve, Endpoints) {
  const auto roc = roc_curve(std::vector<double>{0.1, 0.4, 0.4}, std::vector<double>{0.4, 0.8});
  EXPECT_EQ(roc.front(), (RocPoint{0.0, 0.0}));
  EXPECT_EQ(roc.back(), (RocPoint{1.0, 1.0}));
  for (std::size_t i = 1; i < roc.size(); ++i) {
    EXPECT_GE(roc[i].fpr, roc[i - 1].fpr);
    EXPECT_GE(roc[i].tpr, roc[i - 1].tpr);
  }
}

TEST(ThresholdSweep, BoundaryAndMonotonicity) {
  std::mt19937_64 rng(2);
  std::vector<double> scores;
  std::vector<Label> labels;
  for (int i = 0; i < 150; ++i) {
    const bool mal = i % 3 == 0;
    scores.push_back(testing::random_vector(rng, 1, 0, mal ? 3.0 : 1.5)[0]);
    labels.push_back(mal ? Label::malicious : Label::benign);
  }
  const auto r = sweep_threshold_scores(scores, labels, 0.0, 3.0, 61);
  ASSERT_EQ(r.grid.size(), 61u);
  EXPECT_EQ(r.grid.front().threshold, 0.0);
  EXPECT_EQ(r.grid.back().threshold, 3.0);
  EXPECT_EQ(r.grid.front().fpr, 1.0);
  EXPECT_EQ(r.grid.front().fnr, 0.0);
  for (std::size_t i = 1; i < r.grid.size(); ++i) {
    EXPECT_GT(r.grid[i].threshold, r.grid[i - 1].threshold);
    EXPECT_LE(r.grid[i].fpr, r.grid[i - 1].fpr);
    EXPECT_GE(r.grid[i].fnr, r.grid[i - 1].fnr);
  }
  EXPECT_EQ(r.n_benign, 100u);
  EXPECT_EQ(r.n_malicious, 50u);
  std::vector<double> b;
  std::vector<double> m;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] == Label::benign ? b : m).push_back(scores[i]);
  EXPECT_NEAR(r.auc, pair_count_auc(b, m), 1e-12);
}

TEST(ThresholdSweep, AccuracyHandExample) {
  const std::vector<double> scores{0.1, 0.6, 0.4, 0.9};
  const std::vector<Label> labels{Label::benign, Label::benign, Label::malicious, Label::malicious};
  const auto r = sweep_threshold_scores(scores, labels, 0.5, 1.0, 2);
  // T = 0.5: FP = {0.6}, FN = {0.4}
  EXPECT_EQ(r.grid[0].fpr, 0.5);
  EXPECT_EQ(r.grid[0].fnr, 0.5);
  EXPECT_EQ(r.grid[0].accuracy, 0.5);
  // T = 1.0: nothing flagged
  EXPECT_EQ(r.grid[1].fpr, 0.0);
  EXPECT_EQ(r.grid[1].fnr, 1.0);
  EXPECT_EQ(r.grid[1].accuracy, 0.5);
}

TEST(ThresholdSweep, Errors) {
  const std::vector<double> scores{0.1, 0.2};
  const std::vector<Label> one_class{Label::benign, Label::benign};
  EXPECT_THROW(sweep_threshold_scores(scores, one_class, 0, 1, 5), EvaluationError);
  const std::vector<Label> both{Label::benign, Label::malicious};
  EXPECT_THROW(sweep_threshold_scores(scores, both, 0, 1, 1), ConfigError);
  EXPECT_THROW(sweep_threshold_scores(scores, both, 1, 1, 5), ConfigError);
}

TEST(SelectSamples, NearestThreshold) {
  const std::vector<double> scores{0.2, 0.95, 3.0};
  const std::vector<Label> labels(3, Label::benign);
  EXPECT_EQ(select_samples(scores, labels, SelectionStrategy::nearest_threshold, Label::benign, 1, 0, 1.0),
            std::vector<std::size_t>{1});
  // |0.5 - 1| ties with |1.5 - 1|: lower row index wins.
  const std::vector<double> tied{1.5, 0.5, 9.0};
  EXPECT_EQ(select_samples(tied, labels, SelectionStrategy::nearest_threshold, Label::benign, 2, 0, 1.0),
            (std::vector<std::size_t>{0, 1}));
}

TEST(SelectSamples, RandomOfClass) {
  std::vector<Label> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(i % 4 == 0 ? Label::malicious : Label::benign);
  const std::vector<double> none;
  const auto a = select_samples(none, labels, SelectionStrategy::random_of_class, Label::malicious, 5, 11, 1.0);
  const auto b = select_samples(none, labels, SelectionStrategy::random_of_class, Label::malicious, 5, 11, 1.0);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  for (std::size_t i : a) EXPECT_EQ(labels[i], Label::malicious);
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 5u);
  const auto all = select_samples(none, labels, SelectionStrategy::random_of_class, Label::malicious, 10, 3, 1.0);
  EXPECT_EQ(all.size(), 10u);
  EXPECT_THROW(select_samples(none, labels, SelectionStrategy::random_of_class, Label::malicious, 11, 3, 1.0),
               EvaluationError);
}

TEST(Names, RoundTripAndErrors) {
  for (Method m : {Method::fgsm, Method::jsma, Method::cw_l2, Method::enm}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_EQ(parse_method("cw"), Method::cw_l2);
  EXPECT_THROW(parse_method("deepfool"), ConfigError);
  EXPECT_EQ(parse_violation("availability"), Violation::availability);
  EXPECT_THROW(parse_violation("confidentiality"), ConfigError);
  EXPECT_EQ(parse_box_mode(box_mode_name(BoxMode::unbounded)), BoxMode::unbounded);
  EXPECT_EQ(target_label(Violation::integrity), Label::benign);
  EXPECT_EQ(target_label(Violation::availability), Label::malicious);
  EXPECT_EQ(default_source_class(Violation::integrity), Label::malicious);
}

class Campaign : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    trained_ = new kitnet::TrainingResult(testing::small_model());
    data_ = new io::LabeledDataset(testing::small_dataset());
  }
  static void TearDownTestSuite() {
    delete trained_;
    delete data_;
  }
  static CampaignSettings settings() {
    CampaignSettings s;
    s.n = 20;
    s.seed = 5;
    s.threshold = trained_->phi;
    return s;
  }
  static kitnet::TrainingResult* trained_;
  static io::LabeledDataset* data_;
};

kitnet::TrainingResult* Campaign::trained_ = nullptr;
io::LabeledDataset* Campaign::data_ = nullptr;

TEST_F(Campaign, InvariantsHold) {
  attacks::EnmConfig cfg;
  cfg.c = 10.0;
  const auto r = run_attack_campaign(trained_->model, *data_, cfg, settings());
  EXPECT_EQ(r.method, "enm");
  EXPECT_EQ(r.n_samples, 20u);
  ASSERT_EQ(r.per_sample.size(), 20u);
  std::size_t wins = 0;
  const kitnet::KitNetScorer scorer(trained_->model, kitnet::InputSpace::normalized);
  const attacks::Classifier clf(scorer, r.threshold);
  for (const auto& s : r.per_sample) {
    if (!s.success) continue;
    ++wins;
    EXPECT_EQ(clf.classify(s.adversarial), Label::benign);
  }
  EXPECT_EQ(wins, r.successes);
  EXPECT_DOUBLE_EQ(r.success_rate, 100.0 * wins / 20.0);
  EXPECT_EQ(r.reverify_failures, 0u);
  for (std::size_t row : r.sample_rows) EXPECT_EQ(data_->labels[row], Label::malicious);
  const auto means = mean_distances(r.per_sample);
  EXPECT_EQ(means, r.mean_distances);
}

TEST_F(Campaign, ZeroEpsilonFgsmFailsOnDetectedRows) {
  auto s = settings();
  s.threshold = 1e-9;  // every malicious row is detected
  const auto r = run_attack_campaign(trained_->model, *data_, attacks::FgsmConfig{0.0}, s);
  EXPECT_EQ(r.successes, 0u);
  EXPECT_EQ(r.success_rate, 0.0);
  EXPECT_FALSE(r.mean_distances.has_value());
}

TEST_F(Campaign, DeterministicAndWorkerIndependent) {
  attacks::CwConfig cfg;
  cfg.c = 10.0;
  cfg.max_steps = 200;
  auto s = settings();
  s.workers = 1;
  const auto sequential = run_attack_campaign(trained_->model, *data_, cfg, s);
  s.workers = 4;
  const auto parallel = run_attack_campaign(trained_->model, *data_, cfg, s);
  EXPECT_EQ(sequential.per_sample, parallel.per_sample);
  EXPECT_EQ(sequential.success_rate, parallel.success_rate);
}

TEST_F(Campaign, AvailabilityDrawsBenignRows) {
  auto s = settings();
  s.violation = Violation::availability;
  s.selection = SelectionStrategy::nearest_threshold;
  s.box = BoxMode::unbounded;
  const auto r = run_attack_campaign(trained_->model, *data_, attacks::JsmaConfig{}, s);
  for (std::size_t row : r.sample_rows) EXPECT_EQ(data_->labels[row], Label::benign);
  const kitnet::KitNetScorer scorer(trained_->model, kitnet::InputSpace::normalized);
  const attacks::Classifier clf(scorer, r.threshold);
  for (const auto& p : r.per_sample) {
    if (p.success) {
      EXPECT_EQ(clf.classify(p.adversarial), Label::malicious);
    }
  }
}

TEST_F(Campaign, SourceClassOverride) {
  auto s = settings();
  s.source_class = Label::benign;
  const auto r = run_attack_campaign(trained_->model, *data_, attacks::FgsmConfig{0.1}, s);
  for (std::size_t row : r.sample_rows) EXPECT_EQ(data_->labels[row], Label::benign);
}

TEST_F(Campaign, TooManySamples) {
  auto s = settings();
  s.n = 101;
  EXPECT_THROW(run_attack_campaign(trained_->model, *data_, attacks::FgsmConfig{}, s), EvaluationError);
}

TEST_F(Campaign, SinglePointSweepEqualsCampaign) {
  attacks::EnmConfig cfg;
  cfg.c = 10.0;
  cfg.max_steps = 300;
  const auto direct = run_attack_campaign(trained_->model, *data_, cfg, settings());
  const std::vector<double> c_grid{10.0};
  const auto sweep = sweep_enm_c(trained_->model, *data_, cfg, c_grid, settings());
  ASSERT_EQ(sweep.points.size(), 1u);
  EXPECT_EQ(sweep.swept_parameter, "c");
  EXPECT_EQ(sweep.points[0].success_rate, direct.success_rate);
  EXPECT_EQ(sweep.points[0].mean_distances, direct.mean_distances);
}

TEST_F(Campaign, SweepSortedAndNonEmpty) {
  attacks::EnmConfig cfg;
  cfg.c = 10.0;
  cfg.max_steps = 100;
  auto s = settings();
  s.n = 5;
  const std::vector<double> betas{1.0, 0.01, 100.0};
  const auto r = sweep_enm_beta(trained_->model, *data_, cfg, betas, s);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.points[0].value, 0.01);
  EXPECT_EQ(r.points[2].value, 100.0);
  EXPECT_EQ(r.swept_parameter, "beta");
  const std::vector<double> empty;
  EXPECT_THROW(sweep_enm_beta(trained_->model, *data_, cfg, empty, s), ConfigError);
}

TEST_F(Campaign, SweepOverModelDataset) {
  const kitnet::KitNetScorer scorer(trained_->model, kitnet::InputSpace::raw);
  const auto r = sweep_threshold(scorer, *data_, 0.0, 2.0, 21);
  EXPECT_EQ(r.grid.front().fpr, 1.0);
  EXPECT_GT(r.auc, 0.9);
}

}  // namespace
}  // namespace kitbench::eval

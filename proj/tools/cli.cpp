#include "cli.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kitbench/data_io.hpp"
#include "kitbench/errors.hpp"
#include "kitbench/evaluation.hpp"
#include "kitbench/kernels.hpp"
#include "kitbench/model_io.hpp"
#include "kitbench/report_io.hpp"
#include "kitbench/text.hpp"

namespace kitbench::cli {
namespace {

using nlohmann::json;

struct Common {
  std::string isa;
};

struct TrainArgs {
  std::string data;
  std::string label_column;
  std::string model_out;
  std::string summary_out;
  kitnet::TrainingConfig cfg;
  double beta = 1.0;
};

struct CalibrateArgs {
  std::string model;
  std::string model_out;
  double beta = 1.0;
  double phi = -1.0;
};

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::string label_column = "label";
  std::string out = "evaluate";
  double t_min = 0.0;
  double t_max = 20.0;
  std::size_t steps = 400;
};

struct CampaignArgs {
  std::string model;
  std::string data;
  std::string label_column = "label";
  std::string out;
  std::string violation = "integrity";
  std::size_t n = 100;
  std::uint64_t seed = 0;
  std::string threshold = "1.0";
  std::string selection = "random";
  std::string source_class;
  std::string box = "hull";
  std::size_t workers = 0;
};

struct AttackArgs {
  CampaignArgs campaign;
  std::string method;
  attacks::FgsmConfig fgsm;
  attacks::JsmaConfig jsma;
  attacks::CwConfig cw;
  attacks::EnmConfig enm;
  std::optional<double> c;
};

struct SweepArgs {
  CampaignArgs campaign;
  std::string parameter;
  std::string values;
  attacks::EnmConfig enm;
};

struct SynthArgs {
  std::string out;
  io::SyntheticConfig cfg;
  double shift = 3.0;
  std::size_t shift_features = 0;
  std::string shift_values;
};

void add_campaign_options(CLI::App* sub, CampaignArgs& a, const std::string& default_out) {
  a.out = default_out;
  sub->add_option("--model", a.model, "Model file")->required();
  sub->add_option("--data", a.data, "Labeled feature CSV")->required();
  sub->add_option("--label-column", a.label_column, "Name of the label column");
  sub->add_option("--out", a.out, "Report path prefix (writes .json and .csv)");
  sub->add_option("--violation", a.violation, "integrity or availability");
  sub->add_option("--n", a.n, "Samples per campaign");
  sub->add_option("--seed", a.seed, "Sample selection seed");
  sub->add_option("--threshold", a.threshold, "Campaign threshold T, or 'calibrated'");
  sub->add_option("--selection", a.selection, "random or nearest");
  sub->add_option("--source-class", a.source_class, "Override the attacked class (benign or malicious)");
  sub->add_option("--box", a.box, "Valid region in normalized space: unit, hull or unbounded");
  sub->add_option("--workers", a.workers, "Worker threads (0 = all cores, 1 = sequential)");
}

void add_enm_options(CLI::App* sub, attacks::EnmConfig& c, bool with_c_beta) {
  if (with_c_beta) {
    sub->add_option("--c", c.c, "ENM loss weight c");
    sub->add_option("--beta", c.beta_l1, "ENM L1 weight beta");
  }
  sub->add_option("--enm-lr", c.learning_rate, "ENM step size");
  sub->add_option("--enm-steps", c.max_steps, "ENM iterations");
  sub->add_option("--enm-confidence", c.confidence, "ENM margin kappa");
  sub->add_option("--enm-binary-search", c.binary_search_steps, "ENM extra runs rescaling c");
  sub->add_option("--enm-l2-squared", c.l2_squared, "Squared L2 term");
  sub->add_option("--enm-fista", c.fista, "FISTA momentum");
  sub->add_option("--enm-lr-decay", c.lr_decay, "Square-root step decay");
}

json resolved_options(const CLI::App* sub) {
  json j = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      j[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void echo_config(std::ostream& out, const CLI::App* sub) {
  out << "# resolved " << sub->get_name() << " configuration\n";
  std::istringstream lines(sub->config_to_str(true, false));
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("config", 0) == 0) continue;
    out << "#   " << line << "\n";
  }
}

io::LabeledDataset load_labeled(const std::string& path, const std::string& label_column) {
  return io::load_feature_csv(path, label_column).labeled();
}

void check_width(const kitnet::KitNetModel& model, const io::LabeledDataset& data) {
  if (data.rows.cols() != model.input_dim()) {
    throw DataError("dataset has " + std::to_string(data.rows.cols()) + " features, model expects " +
                    std::to_string(model.input_dim()));
  }
}

eval::CampaignSettings campaign_settings(const CampaignArgs& a,
                                         const kitnet::ThresholdCalibration& calib) {
  eval::CampaignSettings s;
  s.violation = eval::parse_violation(a.violation);
  s.n = a.n;
  s.seed = a.seed;
  if (a.threshold == "calibrated") {
    s.threshold = calib.threshold;
  } else {
    const auto t = text::parse_double(a.threshold);
    if (!t || !std::isfinite(*t)) {
      throw ConfigError("--threshold must be a number or 'calibrated', got '" + a.threshold + "'");
    }
    s.threshold = *t;
  }
  s.selection = eval::parse_strategy(a.selection);
  if (!a.source_class.empty()) {
    const auto label = parse_label(a.source_class);
    if (!label) throw ConfigError("unknown --source-class '" + a.source_class + "'");
    s.source_class = *label;
  }
  s.box = eval::parse_box_mode(a.box);
  s.workers = a.workers;
  return s;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string distance_row(const std::optional<eval::MeanDistances>& d) {
  if (!d) return "-\t-\t-\t-";
  return fmt(d->l0, 2) + "\t" + fmt(d->l1) + "\t" + fmt(d->l2) + "\t" + fmt(d->linf);
}

void print_manifest(std::ostream& out, const report::ReportManifest& m) {
  out << "wrote " << m.path << " (" << m.bytes << " bytes, sha256 " << m.checksum << ")\n";
}

// --- commands ------------------------------------------------------------------------------

int cmd_train(const TrainArgs& a, const CLI::App* sub, std::ostream& out) {
  echo_config(out, sub);
  a.cfg.validate();
  if (!(a.beta >= 1.0)) throw CalibrationError("--beta must be >= 1");
  io::FeatureTable table = io::load_feature_csv(
      a.data, a.label_column.empty() ? std::nullopt : std::optional<std::string>(a.label_column));
  Matrix stream = table.rows;
  std::size_t skipped = 0;
  if (table.labels) {
    // Training is unsupervised on benign traffic; labeled rows marked malicious are dropped.
    stream = Matrix(0, table.rows.cols());
    for (std::size_t r = 0; r < table.rows.rows(); ++r) {
      if ((*table.labels)[r] == Label::benign) {
        stream.append_row(table.rows.row(r));
      } else {
        ++skipped;
      }
    }
  }
  const kitnet::TrainingResult result = kitnet::train_online(stream, a.cfg);
  const kitnet::ThresholdCalibration calib = kitnet::calibrate_threshold(result.phi, a.beta);
  kitnet::save_model(result.model, calib, a.model_out);

  out << "rows available: " << stream.rows() << " (skipped " << skipped << " malicious)\n";
  out << "feature map window: " << a.cfg.fm_window << ", training window: " << a.cfg.train_window
      << "\n";
  out << "ensemble autoencoders: " << result.model.ensemble.size() << "\n";
  out << "phi: " << text::format_double(calib.phi) << "\n";
  out << "threshold: " << text::format_double(calib.threshold) << " (beta " << a.beta << ")\n";
  out << "model written to " << a.model_out << " (sha256 "
      << io::sha256_hex(io::read_file(a.model_out)) << ")\n";

  if (!a.summary_out.empty()) {
    json s;
    s["schema_version"] = eval::kReportSchemaVersion;
    s["kind"] = "training_summary";
    s["phi"] = calib.phi;
    s["beta_threshold"] = calib.beta_threshold;
    s["threshold"] = calib.threshold;
    s["rows"] = stream.rows();
    s["skipped_malicious"] = skipped;
    s["ensemble_size"] = result.model.ensemble.size();
    s["config"] = resolved_options(sub);
    io::write_file(a.summary_out, s.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_calibrate(const CalibrateArgs& a, const CLI::App* sub, std::ostream& out) {
  echo_config(out, sub);
  kitnet::StoredModel stored = kitnet::load_model(a.model);
  const double phi = a.phi >= 0.0 ? a.phi : stored.calibration.phi;
  stored.calibration = kitnet::calibrate_threshold(phi, a.beta);
  kitnet::save_model(stored.model, stored.calibration, a.model_out);
  out << "phi: " << text::format_double(stored.calibration.phi) << "\n";
  out << "threshold: " << text::format_double(stored.calibration.threshold) << " (beta "
      << a.beta << ")\n";
  out << "model written to " << a.model_out << "\n";
  return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a, const CLI::App* sub, std::ostream& out) {
  echo_config(out, sub);
  const kitnet::StoredModel stored = kitnet::load_model(a.model);
  const io::LabeledDataset data = load_labeled(a.data, a.label_column);
  check_width(stored.model, data);
  const kitnet::KitNetScorer scorer(stored.model, kitnet::InputSpace::raw);
  eval::ThresholdSweepReport r = eval::sweep_threshold(scorer, data, a.t_min, a.t_max, a.steps);
  r.config["resolved"] = resolved_options(sub);

  print_manifest(out, report::write_report(r, a.out + ".json", report::Format::structured));
  print_manifest(out, report::write_report(r, a.out + "_grid.csv", report::Format::csv));
  print_manifest(out, report::write_roc_csv(r, a.out + "_roc.csv"));
  out << "benign rows: " << r.n_benign << ", malicious rows: " << r.n_malicious << "\n";
  out << "AUC: " << fmt(r.auc, 6) << "\n";
  const auto at = [&](double t) {
    const auto it = std::find_if(r.grid.begin(), r.grid.end(),
                                 [&](const eval::ThresholdPoint& p) { return p.threshold >= t; });
    return it == r.grid.end() ? r.grid.back() : *it;
  };
  const double calibrated = stored.calibration.threshold;
  if (calibrated > 0.0) {
    const auto p = at(calibrated);
    out << "at T=" << fmt(p.threshold) << " (calibrated " << fmt(calibrated) << "): FPR "
        << fmt(100 * p.fpr, 2) << "%, FNR " << fmt(100 * p.fnr, 2) << "%, accuracy "
        << fmt(100 * p.accuracy, 2) << "%\n";
  }
  return kExitOk;
}

int run_and_report(const eval::AttackCampaignReport& r, const std::string& prefix,
                   std::ostream& out) {
  print_manifest(out, report::write_report(r, prefix + ".json", report::Format::structured));
  print_manifest(out, report::write_report(r, prefix + ".csv", report::Format::csv));
  out << "method\tviolation\tsuccess(%)\tL0\tL1\tL2\tLinf\n";
  out << r.method << "\t" << eval::violation_name(r.violation) << "\t" << fmt(r.success_rate, 2)
      << "\t" << distance_row(r.mean_distances) << "\n";
  if (r.reverify_failures > 0) {
    out << "warning: " << r.reverify_failures << " reported successes failed re-verification\n";
  }
  return kExitOk;
}

int cmd_attack(const AttackArgs& a, const CLI::App* sub, std::ostream& out) {
  echo_config(out, sub);
  const eval::Method method = eval::parse_method(a.method);
  eval::MethodConfig cfg;
  switch (method) {
    case eval::Method::fgsm: a.fgsm.validate(); cfg = a.fgsm; break;
    case eval::Method::jsma: a.jsma.validate(); cfg = a.jsma; break;
    case eval::Method::cw_l2: a.cw.validate(); cfg = a.cw; break;
    case eval::Method::enm: a.enm.validate(); cfg = a.enm; break;
  }
  const kitnet::StoredModel stored = kitnet::load_model(a.campaign.model);
  const eval::CampaignSettings settings = campaign_settings(a.campaign, stored.calibration);
  const io::LabeledDataset data = load_labeled(a.campaign.data, a.campaign.label_column);
  check_width(stored.model, data);
  out << "threshold: " << text::format_double(settings.threshold) << "\n";
  eval::AttackCampaignReport r = eval::run_attack_campaign(stored.model, data, cfg, settings);
  r.config["resolved"] = resolved_options(sub);
  return run_and_report(r, a.campaign.out, out);
}

int cmd_sweep(const SweepArgs& a, const CLI::App* sub, std::ostream& out) {
  echo_config(out, sub);
  const std::vector<double> values = parse_grid(a.values);
  a.enm.validate();
  const kitnet::StoredModel stored = kitnet::load_model(a.campaign.model);
  const eval::CampaignSettings settings = campaign_settings(a.campaign, stored.calibration);
  const io::LabeledDataset data = load_labeled(a.campaign.data, a.campaign.label_column);
  check_width(stored.model, data);
  out << "threshold: " << text::format_double(settings.threshold) << "\n";
  eval::SweepReport r = a.parameter == "c"
                            ? eval::sweep_enm_c(stored.model, data, a.enm, values, settings)
                            : eval::sweep_enm_beta(stored.model, data, a.enm, values, settings);
  r.config["resolved"] = resolved_options(sub);
  print_manifest(out, report::write_report(r, a.campaign.out + ".json", report::Format::structured));
  print_manifest(out, report::write_report(r, a.campaign.out + ".csv", report::Format::csv));
  out << r.swept_parameter << "\tsuccess(%)\tL0\tL1\tL2\tLinf\n";
  for (const auto& p : r.points) {
    out << text::format_double(p.value) << "\t" << fmt(p.success_rate, 2) << "\t"
        << distance_row(p.mean_distances) << "\n";
  }
  return kExitOk;
}

int cmd_synth(const SynthArgs& a, const CLI::App* sub, std::ostream& out) {
  echo_config(out, sub);
  io::SyntheticConfig cfg = a.cfg;
  cfg.malicious_shift = io::SyntheticConfig::leading_shift(cfg.n_features, a.shift, a.shift_features);
  if (!a.shift_values.empty()) {
    const std::vector<double> values = parse_grid(a.shift_values);
    if (values.size() > cfg.n_features) throw ConfigError("--shift-values has more entries than features");
    cfg.malicious_shift.assign(cfg.n_features, 0.0);
    std::copy(values.begin(), values.end(), cfg.malicious_shift.begin());
  }
  const io::LabeledDataset data = io::generate_synthetic(cfg);
  const std::string csv = io::dataset_to_csv(data);
  io::write_file(a.out, csv);
  out << "wrote " << a.out << " (" << data.rows.rows() << " rows, " << data.rows.cols()
      << " features, sha256 " << io::sha256_hex(csv) << ")\n";
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e)) {
    return kExitData;
  }
  return kExitModel;
}

}  // namespace

std::vector<double> parse_grid(std::string_view expr) {
  expr = text::trim(expr);
  if (expr.empty()) throw ConfigError("empty grid expression");
  std::vector<double> values;
  if (expr.find(':') != std::string_view::npos) {
    const auto parts = text::split(expr, ':');
    if (parts.size() != 3) throw ConfigError("grid range must be start:stop:steps");
    const auto start = text::parse_double(text::trim(parts[0]));
    const auto stop = text::parse_double(text::trim(parts[1]));
    const auto steps = text::parse_double(text::trim(parts[2]));
    if (!start || !stop || !steps || !std::isfinite(*start) || !std::isfinite(*stop)) {
      throw ConfigError("malformed grid range '" + std::string(expr) + "'");
    }
    if (*steps < 1 || *steps != std::floor(*steps)) {
      throw ConfigError("grid steps must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(*steps);
    if (n == 1) return {*start};
    for (std::size_t k = 0; k < n; ++k) {
      values.push_back(k + 1 == n ? *stop
                                  : *start + (*stop - *start) * static_cast<double>(k) /
                                                 static_cast<double>(n - 1));
    }
    return values;
  }
  for (std::string_view cell : text::split(expr, ',')) {
    cell = text::trim(cell);
    if (cell.empty()) continue;
    const auto v = text::parse_double(cell);
    if (!v || !std::isfinite(*v)) throw ConfigError("malformed grid value '" + std::string(cell) + "'");
    values.push_back(*v);
  }
  if (values.empty()) throw ConfigError("empty grid expression");
  return values;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"KitNET training, evaluation and adversarial attack experiments", "kitbench"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Common common;
  app.add_option("--isa", common.isa, "Kernel ISA override: scalar, avx2 or neon");

  // One file can hold a [section] per subcommand; unknown keys are errors.
  app.set_config("--config", "", "TOML file with a section per subcommand (flags take precedence)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  const auto with_config = [](CLI::App* sub) {
    sub->allow_config_extras(CLI::config_extras_mode::error);
    return sub;
  };

  TrainArgs train;
  train.model_out = "model.kbm";
  auto* train_cmd = with_config(app.add_subcommand("train", "Train a KitNET model online on a feature CSV"));
  train_cmd->add_option("--data", train.data, "Feature CSV")->required();
  train_cmd->add_option("--label-column", train.label_column,
                        "Label column; when given, only benign rows are used");
  train_cmd->add_option("--model", train.model_out, "Output model file");
  train_cmd->add_option("--summary", train.summary_out, "Optional JSON training summary");
  train_cmd->add_option("--fm-window", train.cfg.fm_window, "Feature-mapping grace period");
  train_cmd->add_option("--train-window", train.cfg.train_window, "Training grace period");
  train_cmd->add_option("--lr", train.cfg.learning_rate, "SGD learning rate");
  train_cmd->add_option("--max-cluster", train.cfg.max_cluster_size, "Maximum autoencoder input size m");
  train_cmd->add_option("--hidden-ratio", train.cfg.hidden_ratio, "Hidden to visible ratio");
  train_cmd->add_option("--seed", train.cfg.seed, "Weight initialisation seed");
  train_cmd->add_option("--beta", train.beta, "Threshold multiplier (T = phi * beta)");

  CalibrateArgs calibrate;
  auto* calibrate_cmd = with_config(app.add_subcommand("calibrate", "Recompute the alarm threshold of a model"));
  calibrate_cmd->add_option("--model", calibrate.model, "Input model file")->required();
  calibrate_cmd->add_option("--out", calibrate.model_out, "Output model file")->required();
  calibrate_cmd->add_option("--beta", calibrate.beta, "Threshold multiplier");
  calibrate_cmd->add_option("--phi", calibrate.phi, "Override phi (negative keeps the stored value)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = with_config(app.add_subcommand("evaluate", "Threshold sweep and ROC on labeled data"));
  evaluate_cmd->add_option("--model", evaluate.model, "Model file")->required();
  evaluate_cmd->add_option("--data", evaluate.data, "Labeled feature CSV")->required();
  evaluate_cmd->add_option("--label-column", evaluate.label_column, "Name of the label column");
  evaluate_cmd->add_option("--out", evaluate.out, "Report path prefix");
  evaluate_cmd->add_option("--t-min", evaluate.t_min, "Lowest threshold");
  evaluate_cmd->add_option("--t-max", evaluate.t_max, "Highest threshold");
  evaluate_cmd->add_option("--steps", evaluate.steps, "Grid points");

  AttackArgs attack;
  auto* attack_cmd = with_config(app.add_subcommand("attack", "Run an adversarial attack campaign"));
  add_campaign_options(attack_cmd, attack.campaign, "attack");
  attack_cmd->add_option("--method", attack.method, "fgsm, jsma, cw or enm")->required();
  attack_cmd->add_option("--epsilon", attack.fgsm.epsilon, "FGSM step");
  attack_cmd->add_option("--theta", attack.jsma.theta, "JSMA per-feature step");
  attack_cmd->add_option("--max-features", attack.jsma.max_features, "JSMA L0 budget");
  attack_cmd->add_option("--reuse-features", attack.jsma.reuse_features,
                         "JSMA keeps modified features until they saturate");
  attack_cmd->add_option("--max-iterations", attack.jsma.max_iterations, "JSMA modification cap");
  attack_cmd->add_option("--c", attack.c, "Loss weight c (default 1 for cw, 450 for enm)");
  attack_cmd->add_option("--lr", attack.cw.learning_rate, "C&W Adam step size");
  attack_cmd->add_option("--max-steps", attack.cw.max_steps, "C&W iterations");
  attack_cmd->add_option("--confidence", attack.cw.confidence, "C&W / ENM margin kappa");
  attack_cmd->add_option("--binary-search", attack.cw.binary_search_steps,
                         "C&W / ENM extra runs rescaling c");
  attack_cmd->add_option("--change-of-variables", attack.cw.change_of_variables,
                         "C&W tanh reparameterisation");
  attack_cmd->add_option("--beta", attack.enm.beta_l1, "ENM L1 weight beta");
  add_enm_options(attack_cmd, attack.enm, false);

  SweepArgs sweep;
  auto* sweep_cmd = with_config(app.add_subcommand("sweep", "ENM hyperparameter sweep"));
  add_campaign_options(sweep_cmd, sweep.campaign, "sweep");
  sweep_cmd->add_option("--parameter", sweep.parameter, "c or beta")
      ->required()
      ->check(CLI::IsMember({"c", "beta"}));
  sweep_cmd->add_option("--values", sweep.values, "Grid: start:stop:steps or comma list")->required();
  add_enm_options(sweep_cmd, sweep.enm, true);

  SynthArgs synth;
  synth.out = "synthetic.csv";
  auto* synth_cmd = with_config(app.add_subcommand("synth", "Write a synthetic labeled feature CSV"));
  synth_cmd->add_option("--out", synth.out, "Output CSV");
  synth_cmd->add_option("--n-features", synth.cfg.n_features, "Feature count");
  synth_cmd->add_option("--n-benign", synth.cfg.n_benign, "Benign rows");
  synth_cmd->add_option("--n-malicious", synth.cfg.n_malicious, "Malicious rows");
  synth_cmd->add_option("--center", synth.cfg.benign_center, "Benign center");
  synth_cmd->add_option("--spread", synth.cfg.benign_spread, "Benign spread");
  synth_cmd->add_option("--shift", synth.shift, "Malicious offset per shifted feature");
  synth_cmd->add_option("--shift-features", synth.shift_features,
                        "Number of leading features shifted (0 = all)");
  synth_cmd->add_option("--shift-values", synth.shift_values,
                        "Comma list of offsets for the leading features (overrides --shift)");
  synth_cmd->add_option("--latent-dim", synth.cfg.latent_dim, "Latent factors");
  synth_cmd->add_option("--noise", synth.cfg.noise, "Independent noise level");
  synth_cmd->add_option("--seed", synth.cfg.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!common.isa.empty()) {
      const auto isa = kernels::parse_isa(common.isa);
      if (!isa) throw ConfigError("unknown --isa '" + common.isa + "'");
      kernels::set_active_isa(*isa);
    }
    if (*train_cmd) return cmd_train(train, train_cmd, out);
    if (*calibrate_cmd) return cmd_calibrate(calibrate, calibrate_cmd, out);
    if (*evaluate_cmd) return cmd_evaluate(evaluate, evaluate_cmd, out);
    if (*attack_cmd) {
      if (attack.c) attack.cw.c = attack.enm.c = *attack.c;
      // The shared flags apply to ENM unless its own variants were given.
      if (attack_cmd->count("--confidence") > 0 && attack_cmd->count("--enm-confidence") == 0) {
        attack.enm.confidence = attack.cw.confidence;
      }
      if (attack_cmd->count("--binary-search") > 0 && attack_cmd->count("--enm-binary-search") == 0) {
        attack.enm.binary_search_steps = attack.cw.binary_search_steps;
      }
      return cmd_attack(attack, attack_cmd, out);
    }
    if (*sweep_cmd) return cmd_sweep(sweep, sweep_cmd, out);
    if (*synth_cmd) return cmd_synth(synth, synth_cmd, out);
  } catch (const std::exception& e) {
    err << "kitbench: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace kitbench::cli

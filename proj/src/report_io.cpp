#include "kitbench/report_io.hpp"

#include "kitbench/data_io.hpp"
#include "kitbench/errors.hpp"
#include "kitbench/text.hpp"

namespace kitbench::report {
namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("report is missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("report field '") + key + "': " + e.what());
  }
}

void check_header(const json& j, std::string_view kind) {
  if (!j.is_object()) throw DataError("report is not a JSON object");
  const auto version = get<int>(j, "schema_version");
  if (version != eval::kReportSchemaVersion) {
    throw DataError("unsupported report schema_version " + std::to_string(version));
  }
  if (get<std::string>(j, "kind") != kind) {
    throw DataError("expected a " + std::string(kind) + " report");
  }
}

json header(std::string_view kind) {
  return json{{"schema_version", eval::kReportSchemaVersion}, {"kind", kind}};
}

json distances_json(const std::optional<eval::MeanDistances>& d) {
  if (!d) return nullptr;
  return json{{"l0", d->l0}, {"l1", d->l1}, {"l2", d->l2}, {"linf", d->linf}};
}

std::optional<eval::MeanDistances> distances_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return eval::MeanDistances{get<double>(j, "l0"), get<double>(j, "l1"), get<double>(j, "l2"),
                             get<double>(j, "linf")};
}

std::string num(double v) { return text::format_double(v); }

void append_distances(std::string& out, const std::optional<eval::MeanDistances>& d) {
  if (d) {
    out += num(d->l0) + "," + num(d->l1) + "," + num(d->l2) + "," + num(d->linf);
  } else {
    out += ",,,";
  }
}

template <typename Report>
ReportManifest write_any(const Report& r, const std::filesystem::path& path, Format format,
                         std::string (*csv)(const Report&)) {
  const std::string content = format == Format::structured ? to_json(r).dump(2) + "\n" : csv(r);
  io::write_file(path, content);
  return {path.string(), format, content.size(), io::sha256_hex(content)};
}

json parse_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "structured" || name == "json") return Format::structured;
  if (name == "csv") return Format::csv;
  throw ConfigError("unknown report format '" + std::string(name) + "'");
}

std::string format_name(Format f) { return f == Format::structured ? "structured" : "csv"; }

// --- JSON ------------------------------------------------------------------------------

json to_json(const eval::ThresholdSweepReport& r) {
  json j = header("threshold_sweep");
  json grid = json::array();
  for (const auto& p : r.grid) {
    grid.push_back({{"threshold", p.threshold}, {"fpr", p.fpr}, {"fnr", p.fnr}, {"accuracy", p.accuracy}});
  }
  json roc = json::array();
  for (const auto& p : r.roc) roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}});
  j["grid"] = std::move(grid);
  j["roc"] = std::move(roc);
  j["auc"] = r.auc;
  j["n_benign"] = r.n_benign;
  j["n_malicious"] = r.n_malicious;
  j["config"] = r.config;
  return j;
}

eval::ThresholdSweepReport threshold_sweep_from_json(const json& j) {
  check_header(j, "threshold_sweep");
  eval::ThresholdSweepReport r;
  for (const auto& p : field(j, "grid")) {
    r.grid.push_back({get<double>(p, "threshold"), get<double>(p, "fpr"), get<double>(p, "fnr"),
                      get<double>(p, "accuracy")});
  }
  for (const auto& p : field(j, "roc")) r.roc.push_back({get<double>(p, "fpr"), get<double>(p, "tpr")});
  r.auc = get<double>(j, "auc");
  r.n_benign = get<std::size_t>(j, "n_benign");
  r.n_malicious = get<std::size_t>(j, "n_malicious");
  r.config = field(j, "config");
  return r;
}

json to_json(const eval::AttackCampaignReport& r) {
  json j = header("attack_campaign");
  j["method"] = r.method;
  j["violation"] = eval::violation_name(r.violation);
  j["n_samples"] = r.n_samples;
  j["successes"] = r.successes;
  j["success_rate"] = r.success_rate;
  j["mean_distances"] = distances_json(r.mean_distances);
  j["sample_rows"] = r.sample_rows;
  json samples = json::array();
  for (const auto& s : r.per_sample) {
    json d = nullptr;
    if (s.distances) {
      d = {{"l0", s.distances->l0}, {"l1", s.distances->l1}, {"l2", s.distances->l2},
           {"linf", s.distances->linf}};
    }
    samples.push_back({{"original", s.original},
                       {"adversarial", s.adversarial},
                       {"success", s.success},
                       {"iterations", s.iterations},
                       {"distances", d}});
  }
  j["per_sample"] = std::move(samples);
  j["seed"] = r.seed;
  j["threshold"] = r.threshold;
  j["reverify_failures"] = r.reverify_failures;
  j["config"] = r.config;
  return j;
}

eval::AttackCampaignReport campaign_from_json(const json& j) {
  check_header(j, "attack_campaign");
  eval::AttackCampaignReport r;
  r.method = get<std::string>(j, "method");
  try {
    r.violation = eval::parse_violation(get<std::string>(j, "violation"));
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  r.n_samples = get<std::size_t>(j, "n_samples");
  r.successes = get<std::size_t>(j, "successes");
  r.success_rate = get<double>(j, "success_rate");
  r.mean_distances = distances_from(field(j, "mean_distances"));
  r.sample_rows = get<std::vector<std::size_t>>(j, "sample_rows");
  for (const auto& s : field(j, "per_sample")) {
    attacks::AdversarialResult a;
    a.original = get<std::vector<double>>(s, "original");
    a.adversarial = get<std::vector<double>>(s, "adversarial");
    a.success = get<bool>(s, "success");
    a.iterations = get<std::size_t>(s, "iterations");
    const json& d = field(s, "distances");
    if (!d.is_null()) {
      a.distances = attacks::LpDistances{get<std::size_t>(d, "l0"), get<double>(d, "l1"),
                                         get<double>(d, "l2"), get<double>(d, "linf")};
    }
    r.per_sample.push_back(std::move(a));
  }
  r.seed = get<std::uint64_t>(j, "seed");
  r.threshold = get<double>(j, "threshold");
  r.reverify_failures = get<std::size_t>(j, "reverify_failures");
  r.config = field(j, "config");
  return r;
}

json to_json(const eval::SweepReport& r) {
  json j = header("enm_sweep");
  j["swept_parameter"] = r.swept_parameter;
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"value", p.value},
                      {"success_rate", p.success_rate},
                      {"successes", p.successes},
                      {"mean_distances", distances_json(p.mean_distances)}});
  }
  j["points"] = std::move(points);
  j["config"] = r.config;
  return j;
}

eval::SweepReport sweep_from_json(const json& j) {
  check_header(j, "enm_sweep");
  eval::SweepReport r;
  r.swept_parameter = get<std::string>(j, "swept_parameter");
  for (const auto& p : field(j, "points")) {
    r.points.push_back({get<double>(p, "value"), get<double>(p, "success_rate"),
                        get<std::size_t>(p, "successes"), distances_from(field(p, "mean_distances"))});
  }
  r.config = field(j, "config");
  return r;
}

// --- CSV -------------------------------------------------------------------------------

std::string grid_csv(const eval::ThresholdSweepReport& r) {
  const std::string v = std::to_string(eval::kReportSchemaVersion);
  std::string out = "schema_version,threshold,fpr,fnr,accuracy\n";
  for (const auto& p : r.grid) {
    out += v + "," + num(p.threshold) + "," + num(p.fpr) + "," + num(p.fnr) + "," + num(p.accuracy) + "\n";
  }
  return out;
}

std::string roc_csv(const eval::ThresholdSweepReport& r) {
  const std::string v = std::to_string(eval::kReportSchemaVersion);
  std::string out = "schema_version,fpr,tpr\n";
  for (const auto& p : r.roc) out += v + "," + num(p.fpr) + "," + num(p.tpr) + "\n";
  return out;
}

std::string campaign_csv(const eval::AttackCampaignReport& r) {
  const std::string v = std::to_string(eval::kReportSchemaVersion);
  std::string out = "schema_version,sample,row,success,iterations,l0,l1,l2,linf\n";
  for (std::size_t i = 0; i < r.per_sample.size(); ++i) {
    const auto& s = r.per_sample[i];
    out += v + "," + std::to_string(i) + "," +
           (i < r.sample_rows.size() ? std::to_string(r.sample_rows[i]) : std::string()) + "," +
           (s.success ? "1" : "0") + "," + std::to_string(s.iterations) + ",";
    if (s.distances) {
      out += std::to_string(s.distances->l0) + "," + num(s.distances->l1) + "," +
             num(s.distances->l2) + "," + num(s.distances->linf);
    } else {
      out += ",,,";
    }
    out += "\n";
  }
  return out;
}

std::string sweep_csv(const eval::SweepReport& r) {
  const std::string v = std::to_string(eval::kReportSchemaVersion);
  std::string out = "schema_version,parameter,value,success_rate,successes,l0,l1,l2,linf\n";
  for (const auto& p : r.points) {
    out += v + "," + r.swept_parameter + "," + num(p.value) + "," + num(p.success_rate) + "," +
           std::to_string(p.successes) + ",";
    append_distances(out, p.mean_distances);
    out += "\n";
  }
  return out;
}

// --- files -----------------------------------------------------------------------------

ReportManifest write_report(const eval::ThresholdSweepReport& r, const std::filesystem::path& path,
                            Format format) {
  return write_any(r, path, format, &grid_csv);
}

ReportManifest write_report(const eval::AttackCampaignReport& r, const std::filesystem::path& path,
                            Format format) {
  return write_any(r, path, format, &campaign_csv);
}

ReportManifest write_report(const eval::SweepReport& r, const std::filesystem::path& path,
                            Format format) {
  return write_any(r, path, format, &sweep_csv);
}

ReportManifest write_roc_csv(const eval::ThresholdSweepReport& r, const std::filesystem::path& path) {
  const std::string content = roc_csv(r);
  io::write_file(path, content);
  return {path.string(), Format::csv, content.size(), io::sha256_hex(content)};
}

eval::ThresholdSweepReport read_threshold_sweep(const std::filesystem::path& path) {
  return threshold_sweep_from_json(parse_json_file(path));
}

eval::AttackCampaignReport read_campaign(const std::filesystem::path& path) {
  return campaign_from_json(parse_json_file(path));
}

eval::SweepReport read_sweep(const std::filesystem::path& path) {
  return sweep_from_json(parse_json_file(path));
}

}  // namespace kitbench::report

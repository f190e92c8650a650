#include "kitbench/data_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "kitbench/errors.hpp"
#include "kitbench/text.hpp"

namespace kitbench::io {

std::size_t LabeledDataset::count(Label label) const {
  std::size_t n = 0;
  for (Label l : labels) n += (l == label);
  return n;
}

void LabeledDataset::validate() const {
  if (labels.size() != rows.rows()) {
    throw DataError("dataset has " + std::to_string(rows.rows()) + " rows but " +
                    std::to_string(labels.size()) + " labels");
  }
}

LabeledDataset FeatureTable::labeled() const {
  if (!labels) throw DataError("dataset has no label column");
  return {rows, *labels};
}

FeatureTable parse_feature_csv(std::string_view content,
                               const std::optional<std::string>& label_column) {
  FeatureTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::optional<std::size_t> label_index;
  std::size_t width = 0;
  std::vector<double> row;
  bool have_header = false;

  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (text::trim(line).empty()) continue;

    const auto cells = text::split(line, ',');
    if (!have_header) {
      have_header = true;
      width = cells.size();
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string name(text::trim(cells[i]));
        if (label_column && name == *label_column) {
          label_index = i;
        } else {
          table.feature_names.push_back(name);
        }
      }
      if (label_column && !label_index) {
        throw DataError("label column '" + *label_column + "' not found in header", line_no);
      }
      if (table.feature_names.empty()) throw DataError("header names no feature columns", line_no);
      if (label_index) table.labels.emplace();
      continue;
    }

    if (cells.size() != width) {
      throw DataError("expected " + std::to_string(width) + " cells, found " +
                      std::to_string(cells.size()),
                      line_no);
    }
    row.clear();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string_view cell = text::trim(cells[i]);
      if (label_index && i == *label_index) {
        const auto label = parse_label(cell);
        if (!label) throw DataError("unknown label value '" + std::string(cell) + "'", line_no);
        table.labels->push_back(*label);
        continue;
      }
      const auto value = text::parse_double(cell);
      if (!value) throw DataError("non-numeric cell '" + std::string(cell) + "'", line_no);
      if (!std::isfinite(*value)) throw DataError("non-finite value '" + std::string(cell) + "'", line_no);
      row.push_back(*value);
    }
    table.rows.append_row(row);
  }
  if (!have_header) throw DataError("empty CSV: a header row is required");
  if (table.rows.rows() == 0) table.rows = Matrix(0, table.feature_names.size());
  return table;
}

FeatureTable load_feature_csv(const std::filesystem::path& path,
                              const std::optional<std::string>& label_column) {
  return parse_feature_csv(read_file(path), label_column);
}

// --- synthetic data -----------------------------------------------------------------

std::vector<double> SyntheticConfig::leading_shift(std::size_t n_features, double shift,
                                                   std::size_t count) {
  if (count == 0 || count > n_features) count = n_features;
  std::vector<double> out(n_features, 0.0);
  for (std::size_t j = 0; j < count; ++j) out[j] = shift;
  return out;
}

void SyntheticConfig::validate() const {
  if (n_features < 1) throw ConfigError("synthetic n_features must be >= 1");
  if (n_benign < 1 && n_malicious < 1) throw ConfigError("synthetic dataset needs at least one row");
  if (!(benign_spread > 0.0) || !std::isfinite(benign_spread)) {
    throw ConfigError("synthetic spread must be positive");
  }
  if (!std::isfinite(benign_center)) throw ConfigError("synthetic center must be finite");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("synthetic noise must be >= 0");
  if (latent_dim == 0 && noise == 0.0) throw ConfigError("synthetic data needs latent factors or noise");
  if (!malicious_shift.empty() && malicious_shift.size() != n_features) {
    throw ConfigError("malicious_shift needs one entry per feature");
  }
  for (double s : malicious_shift) {
    if (!std::isfinite(s)) throw ConfigError("malicious_shift must be finite");
  }
}

LabeledDataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_features;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix loadings(n, cfg.latent_dim);
  for (std::size_t j = 0; j < n && cfg.latent_dim > 0; ++j) {
    double norm = 0.0;
    for (double& v : loadings.row(j)) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : loadings.row(j)) v /= norm;
  }

  LabeledDataset data;
  data.rows = Matrix(cfg.n_benign + cfg.n_malicious, n);
  data.labels.reserve(data.rows.rows());
  std::vector<double> z(cfg.latent_dim);
  for (std::size_t r = 0; r < data.rows.rows(); ++r) {
    const bool malicious = r >= cfg.n_benign;
    for (double& v : z) v = normal(rng);
    auto row = data.rows.row(r);
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t q = 0; q < cfg.latent_dim; ++q) v += loadings(j, q) * z[q];
      v += cfg.noise * normal(rng);
      row[j] = cfg.benign_center + cfg.benign_spread * v;
      if (malicious && !cfg.malicious_shift.empty()) row[j] += cfg.malicious_shift[j];
    }
    data.labels.push_back(malicious ? Label::malicious : Label::benign);
  }
  return data;
}

std::string dataset_to_csv(const LabeledDataset& data) {
  data.validate();
  std::string out;
  for (std::size_t j = 0; j < data.rows.cols(); ++j) out += "f" + std::to_string(j) + ",";
  out += "label\n";
  for (std::size_t r = 0; r < data.rows.rows(); ++r) {
    for (double v : data.rows.row(r)) {
      out += text::format_double(v);
      out += ',';
    }
    out += data.labels[r] == Label::malicious ? "1\n" : "0\n";
  }
  return out;
}

void write_dataset_csv(const LabeledDataset& data, const std::filesystem::path& path) {
  write_file(path, dataset_to_csv(data));
}

// --- files ------------------------------------------------------------------------------

DatasetManifest describe_dataset(const std::filesystem::path& path, const FeatureTable& table) {
  DatasetManifest m;
  m.path = path.string();
  m.n_rows = table.rows.rows();
  m.n_features = table.rows.cols();
  m.has_labels = table.labels.has_value();
  if (table.labels) {
    for (Label l : *table.labels) (l == Label::benign ? m.n_benign : m.n_malicious)++;
  }
  m.checksum = sha256_hex(read_file(path));
  return m;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << is.rdbuf();
  if (is.bad()) throw IoError("failed reading '" + path.string() + "'");
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  os.flush();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace kitbench::io

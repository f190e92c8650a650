#include "kitbench/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kitbench/errors.hpp"
#include "kitbench/text.hpp"

namespace kitbench::kitnet {
namespace {

constexpr std::string_view kMagic = "kitbench-model";

std::string join_numbers(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ',';
    out += text::format_double(values[i]);
  }
  return out;
}

std::string_view activation_name(nn::Activation a) {
  return a == nn::Activation::sigmoid ? "sigmoid" : "identity";
}

void write_layer(std::ostream& os, std::string_view name, const nn::DenseLayer& layer) {
  os << name << ' ' << activation_name(layer.activation) << '\n';
  for (std::size_t r = 0; r < layer.weights.rows(); ++r) os << join_numbers(layer.weights.row(r)) << '\n';
  os << join_numbers(layer.biases) << '\n';
}

void write_autoencoder(std::ostream& os, const nn::Autoencoder& ae) {
  os << "autoencoder " << ae.input_dim() << ' ' << ae.hidden_dim() << '\n';
  write_layer(os, "encoder", ae.encoder);
  write_layer(os, "decoder", ae.decoder);
}

void write_normalizer(std::ostream& os, std::string_view name, const MinMaxNormalizer& norm) {
  os << name << '\n' << join_numbers(norm.mins()) << '\n' << join_numbers(norm.maxs()) << '\n';
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::string_view next_line() {
    if (pos_ >= text_.size()) fail("unexpected end of file");
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  /// Reads a line "<keyword> tok..." and returns the tokens after the keyword.
  std::vector<std::string_view> expect(std::string_view keyword) {
    const auto tokens = words(next_line());
    if (tokens.empty() || tokens.front() != keyword) {
      fail("expected section '" + std::string(keyword) + "'");
    }
    return {tokens.begin() + 1, tokens.end()};
  }

  std::vector<double> numbers(std::size_t count) {
    const std::string_view line = next_line();
    std::vector<double> out;
    if (count == 0) {
      if (!text::trim(line).empty()) fail("expected an empty row");
      return out;
    }
    for (auto token : text::split(line, ',')) {
      const auto v = text::parse_double(token);
      if (!v) fail("invalid number '" + std::string(token) + "'");
      out.push_back(*v);
    }
    if (out.size() != count) {
      fail("expected " + std::to_string(count) + " numbers, found " + std::to_string(out.size()));
    }
    return out;
  }

  std::size_t count(std::string_view token) {
    std::size_t v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      fail("invalid count '" + std::string(token) + "'");
    }
    return v;
  }

  double real(std::string_view token) {
    const auto v = text::parse_double(token);
    if (!v) fail("invalid number '" + std::string(token) + "'");
    return *v;
  }

  static std::vector<std::string_view> words(std::string_view line) {
    std::vector<std::string_view> out;
    for (auto w : text::split(text::trim(line), ' ')) {
      if (!w.empty()) out.push_back(w);
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MalformedModelError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

void require_arity(Reader& in, const std::vector<std::string_view>& tokens, std::size_t n) {
  if (tokens.size() != n) in.fail("wrong number of fields");
}

nn::DenseLayer read_layer(Reader& in, std::string_view name, std::size_t in_dim, std::size_t out_dim) {
  const auto tokens = in.expect(name);
  require_arity(in, tokens, 1);
  nn::DenseLayer layer;
  if (tokens[0] == "sigmoid") {
    layer.activation = nn::Activation::sigmoid;
  } else if (tokens[0] == "identity") {
    layer.activation = nn::Activation::identity;
  } else {
    in.fail("unknown activation '" + std::string(tokens[0]) + "'");
  }
  std::vector<double> weights;
  weights.reserve(in_dim * out_dim);
  for (std::size_t r = 0; r < out_dim; ++r) {
    const auto row = in.numbers(in_dim);
    weights.insert(weights.end(), row.begin(), row.end());
  }
  layer.weights = Matrix(out_dim, in_dim, std::move(weights));
  layer.biases = in.numbers(out_dim);
  return layer;
}

nn::Autoencoder read_autoencoder(Reader& in) {
  const auto tokens = in.expect("autoencoder");
  require_arity(in, tokens, 2);
  const std::size_t input_dim = in.count(tokens[0]);
  const std::size_t hidden_dim = in.count(tokens[1]);
  nn::Autoencoder ae;
  ae.encoder = read_layer(in, "encoder", input_dim, hidden_dim);
  ae.decoder = read_layer(in, "decoder", hidden_dim, input_dim);
  return ae;
}

MinMaxNormalizer read_normalizer(Reader& in, std::string_view name, std::size_t dim) {
  require_arity(in, in.expect(name), 0);
  auto mins = in.numbers(dim);
  auto maxs = in.numbers(dim);
  try {
    return MinMaxNormalizer(std::move(mins), std::move(maxs));
  } catch (const Error& e) {
    in.fail(e.what());
  }
}

}  // namespace

std::string serialize_model(const KitNetModel& model, const ThresholdCalibration& calib) {
  model.validate();
  std::ostringstream os;
  os << kMagic << " v" << kModelFormatVersion << '\n';
  os << "header " << model.input_dim() << ' ' << model.feature_map.max_cluster_size << ' '
     << text::format_double(model.hidden_ratio) << '\n';
  write_normalizer(os, "input_normalizer", model.input_normalizer);
  os << "feature_map " << model.feature_map.clusters.size() << '\n';
  for (const auto& cluster : model.feature_map.clusters) {
    for (std::size_t j = 0; j < cluster.size(); ++j) os << (j ? " " : "") << cluster[j];
    os << '\n';
  }
  os << "ensemble " << model.ensemble.size() << '\n';
  for (const auto& ae : model.ensemble) write_autoencoder(os, ae);
  write_normalizer(os, "score_normalizer", model.score_normalizer);
  os << "output_autoencoder\n";
  write_autoencoder(os, model.output_ae);
  os << "calibration " << text::format_double(calib.phi) << ' '
     << text::format_double(calib.beta_threshold) << '\n';
  os << "end\n";
  return os.str();
}

StoredModel parse_model(std::string_view content) {
  Reader in(content);
  const auto magic = Reader::words(in.next_line());
  if (magic.size() != 2 || magic[0] != kMagic || magic[1].size() < 2 || magic[1][0] != 'v') {
    in.fail("missing 'kitbench-model v<N>' header");
  }
  if (magic[1] != "v" + std::to_string(kModelFormatVersion)) {
    throw ModelVersionError("unsupported model format version '" + std::string(magic[1]) +
                            "' (this build reads v" + std::to_string(kModelFormatVersion) + ")");
  }

  StoredModel out;
  KitNetModel& m = out.model;
  const auto header = in.expect("header");
  require_arity(in, header, 3);
  const std::size_t n = in.count(header[0]);
  m.feature_map.max_cluster_size = in.count(header[1]);
  m.hidden_ratio = in.real(header[2]);

  m.input_normalizer = read_normalizer(in, "input_normalizer", n);

  const auto fm = in.expect("feature_map");
  require_arity(in, fm, 1);
  const std::size_t k = in.count(fm[0]);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> cluster;
    for (auto token : Reader::words(in.next_line())) cluster.push_back(in.count(token));
    m.feature_map.clusters.push_back(std::move(cluster));
  }

  const auto ens = in.expect("ensemble");
  require_arity(in, ens, 1);
  if (in.count(ens[0]) != k) in.fail("ensemble size does not match the feature map");
  for (std::size_t c = 0; c < k; ++c) m.ensemble.push_back(read_autoencoder(in));

  m.score_normalizer = read_normalizer(in, "score_normalizer", k);
  require_arity(in, in.expect("output_autoencoder"), 0);
  m.output_ae = read_autoencoder(in);

  const auto cal = in.expect("calibration");
  require_arity(in, cal, 2);
  const double phi = in.real(cal[0]);
  const double beta = in.real(cal[1]);
  require_arity(in, in.expect("end"), 0);

  try {
    m.validate();
    out.calibration = calibrate_threshold(phi, beta);
  } catch (const ModelFileError&) {
    throw;
  } catch (const Error& e) {
    throw MalformedModelError(std::string("model file is inconsistent: ") + e.what());
  }
  return out;
}

void save_model(const KitNetModel& model, const ThresholdCalibration& calib,
                const std::filesystem::path& path) {
  const std::string content = serialize_model(model, calib);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ModelIoError("cannot open '" + path.string() + "' for writing");
  os << content;
  os.flush();
  if (!os) throw ModelIoError("failed writing model to '" + path.string() + "'");
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ModelIoError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  if (is.bad()) throw ModelIoError("failed reading model file '" + path.string() + "'");
  return parse_model(buf.str());
}

}  // namespace kitbench::kitnet

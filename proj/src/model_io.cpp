#include "winpred/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace winpred {

namespace {

constexpr char kModelMagic[8] = {'W', 'P', 'M', 'O', 'D', 'E', 'L', '1'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void write_le(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T read_le(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  return value;
}

void write_doubles(std::ofstream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(double)));
}

}  // namespace

void ModelBundle::validate() const {
  mlp.validate();
  if (normalizer.dim() != 0) {
    if (normalizer.stddev.size() != normalizer.dim() ||
        normalizer.constant_dim.size() != normalizer.dim()) {
      throw std::invalid_argument("normalizer vectors have inconsistent lengths");
    }
    if (normalizer.dim() != mlp.input_dim()) {
      throw std::invalid_argument("normalizer dimension " + std::to_string(normalizer.dim()) +
                                  " does not match network input " +
                                  std::to_string(mlp.input_dim()));
    }
  }
  if (n_static != 0 && mlp.input_dim() != n_static + 3 * seq_minutes) {
    throw std::invalid_argument("stacking geometry does not match network input width");
  }
}

void save_model(const ModelBundle& bundle, const std::string& path) {
  bundle.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(kModelMagic, sizeof kModelMagic);
  write_le(out, kModelVersion);
  write_le(out, bundle.mlp.init_seed);
  write_le(out, static_cast<std::uint32_t>(bundle.mlp.widths.size()));
  for (std::size_t w : bundle.mlp.widths) write_le(out, static_cast<std::uint64_t>(w));
  for (std::size_t n = 0; n < bundle.mlp.n_layers(); ++n) {
    const auto& w = bundle.mlp.weights[n];
    const auto& b = bundle.mlp.biases[n];
    write_doubles(out, w.data(), static_cast<std::size_t>(w.size()));  // column-major
    write_doubles(out, b.data(), static_cast<std::size_t>(b.size()));
  }
  write_le(out, static_cast<std::uint32_t>(bundle.normalizer.dim()));
  if (bundle.normalizer.dim() != 0) {
    write_doubles(out, bundle.normalizer.mean.data(), bundle.normalizer.dim());
    write_doubles(out, bundle.normalizer.stddev.data(), bundle.normalizer.dim());
    for (bool flag : bundle.normalizer.constant_dim) {
      write_le(out, static_cast<std::uint8_t>(flag ? 1 : 0));
    }
  }
  write_le(out, static_cast<std::uint64_t>(bundle.seq_minutes));
  write_le(out, static_cast<std::uint64_t>(bundle.lag_minutes));
  write_le(out, static_cast<std::uint64_t>(bundle.n_static));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw std::runtime_error("'" + path + "' is not a model file");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw std::runtime_error("'" + path + "': unsupported model version " +
                             std::to_string(version));
  }
  ModelBundle bundle;
  bundle.mlp.init_seed = read_le<std::uint64_t>(in);
  const auto n_widths = read_le<std::uint32_t>(in);
  if (!in || n_widths < 3 || n_widths > 64) {
    throw std::runtime_error("'" + path + "': corrupt width chain");
  }
  bundle.mlp.widths.resize(n_widths);
  for (auto& w : bundle.mlp.widths) {
    w = static_cast<std::size_t>(read_le<std::uint64_t>(in));
  }
  for (std::size_t n = 0; n + 1 < bundle.mlp.widths.size(); ++n) {
    Eigen::MatrixXd w(static_cast<Eigen::Index>(bundle.mlp.widths[n]),
                      static_cast<Eigen::Index>(bundle.mlp.widths[n + 1]));
    read_doubles(in, w.data(), static_cast<std::size_t>(w.size()));
    Eigen::VectorXd b(static_cast<Eigen::Index>(bundle.mlp.widths[n + 1]));
    read_doubles(in, b.data(), static_cast<std::size_t>(b.size()));
    bundle.mlp.weights.push_back(std::move(w));
    bundle.mlp.biases.push_back(std::move(b));
  }
  const auto norm_dim = read_le<std::uint32_t>(in);
  if (norm_dim != 0) {
    bundle.normalizer.mean.resize(norm_dim);
    bundle.normalizer.stddev.resize(norm_dim);
    bundle.normalizer.constant_dim.resize(norm_dim);
    read_doubles(in, bundle.normalizer.mean.data(), norm_dim);
    read_doubles(in, bundle.normalizer.stddev.data(), norm_dim);
    for (std::uint32_t d = 0; d < norm_dim; ++d) {
      bundle.normalizer.constant_dim[d] = read_le<std::uint8_t>(in) != 0;
    }
  }
  bundle.seq_minutes = static_cast<std::size_t>(read_le<std::uint64_t>(in));
  bundle.lag_minutes = static_cast<std::size_t>(read_le<std::uint64_t>(in));
  bundle.n_static = static_cast<std::size_t>(read_le<std::uint64_t>(in));
  if (!in) throw std::runtime_error("'" + path + "': truncated model file");
  bundle.validate();
  return bundle;
}

}  // namespace winpred

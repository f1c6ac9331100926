#include "risopt/channels.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace risopt {
namespace {

constexpr double kPi = 3.14159265358979323846;

class ComplexGaussian {
 public:
  explicit ComplexGaussian(std::uint64_t seed) : engine_(seed), normal_(0.0, std::sqrt(0.5)) {}
  Complex operator()() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

Complex los_entry(Index row, Index col) {
  return std::polar(1.0, kPi * (0.3 * static_cast<double>(row) + 0.7 * static_cast<double>(col)));
}

void fill(CMatrix& m, ComplexGaussian& draw, const FadingModel& model) {
  const bool rician = model.kind == FadingKind::kRician;
  const double los_w = rician ? std::sqrt(model.k_factor / (1.0 + model.k_factor)) : 0.0;
  const double nlos_w = rician ? std::sqrt(1.0 / (1.0 + model.k_factor)) : 1.0;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const Complex z = draw();
      m(r, c) = rician ? nlos_w * z + los_w * los_entry(r, c) : z;
    }
  }
}

CVector draw_vector(Index n, ComplexGaussian& draw, const FadingModel& model) {
  CMatrix m(n, 1);
  fill(m, draw, model);
  return m.col(0);
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_complex(std::string& out, Complex z) {
  put_f64(out, z.real());
  put_f64(out, z.imag());
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    need(8, "u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  Complex complex() {
    need(16, "complex entry");
    const double re = f64();
    const double im = f64();
    return {re, im};
  }
  std::string take(std::uint64_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw ParseError(std::string("truncated dataset while reading ") + what, pos_);
    }
  }
  const std::string& bytes_;
  std::uint64_t pos_ = 0;
};

}  // namespace

void ChannelSet::validate() const {
  const auto [M, N, K] = dims;
  if (M < 1 || N < 1 || K < 1) throw DimensionError("channel dimensions must be positive");
  if (H.rows() != M || H.cols() != N) throw DimensionError("H must be M x N");
  if (static_cast<Index>(h_r.size()) != K || static_cast<Index>(h_d.size()) != K) {
    throw DimensionError("h_r and h_d must hold K vectors");
  }
  for (Index k = 0; k < K; ++k) {
    if (h_r[k].size() != M) throw DimensionError("h_r[k] must have length M");
    if (h_d[k].size() != N) throw DimensionError("h_d[k] must have length N");
  }
  if (h.size() != M || g.size() != M) throw DimensionError("h and g must have length M");
  if (!(noise_power > 0.0)) throw InvalidArgument("noise power must be positive");
}

ChannelSet sample_channels(const Dims& dims, const FadingModel& model, std::uint64_t seed,
                           double noise_power) {
  if (dims.M < 1 || dims.N < 1 || dims.K < 1) {
    throw DimensionError("sample_channels: M, N and K must be at least 1");
  }
  if (model.kind == FadingKind::kRician && !(model.k_factor >= 0.0)) {
    throw InvalidArgument("sample_channels: Rician K-factor must be non-negative");
  }
  if (!(noise_power > 0.0)) throw InvalidArgument("sample_channels: noise power must be positive");

  ComplexGaussian draw(seed);
  ChannelSet cs;
  cs.dims = dims;
  cs.model = model;
  cs.seed = seed;
  cs.noise_power = noise_power;
  cs.H.resize(dims.M, dims.N);
  fill(cs.H, draw, model);
  for (Index k = 0; k < dims.K; ++k) cs.h_r.push_back(draw_vector(dims.M, draw, model));
  for (Index k = 0; k < dims.K; ++k) cs.h_d.push_back(draw_vector(dims.N, draw, model));
  cs.h = draw_vector(dims.M, draw, model);
  cs.g = draw_vector(dims.M, draw, model);
  return cs;
}

CVector effective_channel(const ChannelSet& cs, const CVector& e, Index k) {
  if (e.size() != cs.dims.M) throw DimensionError("effective_channel: e must have length M");
  if (k < 0 || k >= cs.dims.K) throw DimensionError("effective_channel: user index out of range");
  const CVector weighted = e.conjugate().cwiseProduct(cs.h_r[k]);
  return cs.H.adjoint() * weighted + cs.h_d[k];
}

std::uint64_t fingerprint(const ChannelSet& cs) {
  const std::string bytes = encode_dataset(cs);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string encode_dataset(const ChannelSet& cs) {
  cs.validate();
  nlohmann::json header = {
      {"format", "risopt-channels"},
      {"version", 1},
      {"M", cs.dims.M},
      {"N", cs.dims.N},
      {"K", cs.dims.K},
      {"model", cs.model.kind == FadingKind::kRayleigh ? "rayleigh" : "rician"},
      {"k_factor", cs.model.k_factor},
      {"seed", cs.seed},
      {"noise_power", cs.noise_power},
  };
  const std::string text = header.dump();

  std::string out(kDatasetMagic, sizeof(kDatasetMagic));
  put_u64(out, text.size());
  out += text;
  for (Index r = 0; r < cs.H.rows(); ++r) {
    for (Index c = 0; c < cs.H.cols(); ++c) put_complex(out, cs.H(r, c));
  }
  for (const auto& v : cs.h_r) for (const Complex z : v) put_complex(out, z);
  for (const auto& v : cs.h_d) for (const Complex z : v) put_complex(out, z);
  for (const Complex z : cs.h) put_complex(out, z);
  for (const Complex z : cs.g) put_complex(out, z);
  return out;
}

ChannelSet decode_dataset(const std::string& bytes) {
  Reader in(bytes);
  const std::string magic = in.take(sizeof(kDatasetMagic), "magic");
  if (std::memcmp(magic.data(), kDatasetMagic, sizeof(kDatasetMagic)) != 0) {
    throw ParseError("bad dataset magic", 0);
  }
  const std::uint64_t header_len = in.u64();
  const std::uint64_t header_pos = in.pos();
  const std::string text = in.take(header_len, "JSON header");

  ChannelSet cs;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("format").get<std::string>() != "risopt-channels") {
      throw ParseError("unexpected format tag", header_pos);
    }
    cs.dims.M = header.at("M").get<Index>();
    cs.dims.N = header.at("N").get<Index>();
    cs.dims.K = header.at("K").get<Index>();
    const std::string model = header.at("model").get<std::string>();
    if (model == "rayleigh") {
      cs.model = FadingModel::rayleigh();
    } else if (model == "rician") {
      cs.model = FadingModel::rician(header.at("k_factor").get<double>());
    } else {
      throw ParseError("unknown fading model '" + model + "'", header_pos);
    }
    cs.seed = header.at("seed").get<std::uint64_t>();
    cs.noise_power = header.at("noise_power").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("invalid dataset header: ") + ex.what(), header_pos);
  }
  if (cs.dims.M < 1 || cs.dims.N < 1 || cs.dims.K < 1) {
    throw ParseError("non-positive dimensions in header", header_pos);
  }

  const auto [M, N, K] = cs.dims;
  cs.H.resize(M, N);
  for (Index r = 0; r < M; ++r) {
    for (Index c = 0; c < N; ++c) cs.H(r, c) = in.complex();
  }
  auto read_vec = [&](Index n) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = in.complex();
    return v;
  };
  for (Index k = 0; k < K; ++k) cs.h_r.push_back(read_vec(M));
  for (Index k = 0; k < K; ++k) cs.h_d.push_back(read_vec(N));
  cs.h = read_vec(M);
  cs.g = read_vec(M);
  if (!in.done()) throw ParseError("trailing bytes after channel payload", in.pos());
  try {
    cs.validate();
  } catch (const Error& ex) {
    throw ParseError(ex.what(), header_pos);
  }
  return cs;
}

void save_dataset(const ChannelSet& cs, const std::filesystem::path& path) {
  const std::string bytes = encode_dataset(cs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ChannelSet load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_dataset(buf.str());
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_linear(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace risopt

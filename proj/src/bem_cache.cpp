#include "holo/bem_cache.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

namespace holo {

namespace {

constexpr char kMagic[4] = {'H', 'B', 'E', 'M'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8 + 8 + 8 + 8 + 8;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<char> bytes;
};

class Reader {
 public:
  explicit Reader(const std::vector<char>& bytes) : bytes_(bytes) {}
  std::uint64_t u64() { return take(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t offset() const { return pos_; }

 private:
  std::uint64_t take(int n) {
    if (pos_ + n > bytes_.size()) throw ParseError("BEM cache truncated", pos_);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }
  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_bem_cache(const std::string& path, const BemOperator& op, const MediumConfig& medium) {
  Writer w;
  w.bytes.insert(w.bytes.end(), kMagic, kMagic + 4);
  w.u32(kBemCacheVersion);
  w.u64(op.mesh().hash());
  w.u64(op.array_hash());
  w.f64(medium.frequency());
  w.f64(op.wavenumber());
  w.u64(static_cast<std::uint64_t>(op.h().rows()));
  w.u64(static_cast<std::uint64_t>(op.h().cols()));
  w.bytes.reserve(w.bytes.size() + static_cast<std::size_t>(op.h().size()) * 16);
  for (Eigen::Index i = 0; i < op.h().rows(); ++i) {
    for (Eigen::Index j = 0; j < op.h().cols(); ++j) {
      w.f64(op.h()(i, j).real());
      w.f64(op.h()(i, j).imag());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write BEM cache '" + path + "'");
  out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
}

std::optional<BemOperator> read_bem_cache(const std::string& path, const SurfaceMesh& mesh,
                                          const TransducerArray& array, const MediumConfig& medium) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes) throw ParseError("BEM cache header truncated", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("not a BEM cache file (bad magic)", 0);

  Reader r(bytes);
  r.u32();  // magic, already checked
  const std::uint32_t version = r.u32();
  if (version != kBemCacheVersion) throw ParseError("unsupported BEM cache version " + std::to_string(version), 4);
  const std::uint64_t mesh_hash = r.u64();
  const std::uint64_t array_hash = r.u64();
  const double frequency = r.f64();
  const double k = r.f64();
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();

  if (mesh_hash != mesh.hash() || array_hash != array.hash() || frequency != medium.frequency() ||
      std::abs(k - medium.wavenumber()) > 1e-12 * k) {
    return std::nullopt;
  }
  if (rows != mesh.size() || cols != array.size()) throw ParseError("BEM cache dimensions disagree with its key", 48);
  if (bytes.size() != kHeaderBytes + rows * cols * 16) {
    throw ParseError("BEM cache payload size mismatch", std::min<std::size_t>(bytes.size(), kHeaderBytes + rows * cols * 16));
  }

  ComplexMatrix h(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      const double re = r.f64();
      const double im = r.f64();
      h(i, j) = Complex(re, im);
    }
  }
  return BemOperator(std::make_shared<const SurfaceMesh>(mesh), std::move(h), array_hash, k,
                     std::numeric_limits<double>::quiet_NaN());
}

BemOperator bem_build_cached(const std::string& path, const SurfaceMesh& mesh, const TransducerArray& array,
                             const MediumConfig& medium, const BemOptions& options) {
  if (auto cached = read_bem_cache(path, mesh, array, medium)) return std::move(*cached);
  BemOperator op = bem_build(mesh, array, medium, options);
  write_bem_cache(path, op, medium);
  return op;
}

}  // namespace holo

#include "holo/stl.hpp"

#include <bit>
#include <charconv>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace holo::stl {

namespace {

constexpr std::size_t kHeaderSize = 80;
constexpr std::size_t kRecordSize = 50;

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float read_f32(const std::uint8_t* p) { return std::bit_cast<float>(read_u32(p)); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

bool looks_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + 4) return false;
  const std::uint64_t count = read_u32(bytes.data() + kHeaderSize);
  return bytes.size() == kHeaderSize + 4 + count * kRecordSize;
}

std::vector<Triangle> parse_binary(std::span<const std::uint8_t> bytes) {
  const std::uint32_t count = read_u32(bytes.data() + kHeaderSize);
  std::vector<Triangle> tris;
  tris.reserve(count);
  const std::uint8_t* rec = bytes.data() + kHeaderSize + 4;
  for (std::uint32_t i = 0; i < count; ++i, rec += kRecordSize) {
    Triangle tri;
    for (int v = 0; v < 3; ++v) {
      const std::uint8_t* p = rec + 12 + 12 * v;  // skip stored normal
      tri[v] = Vec3(read_f32(p), read_f32(p + 4), read_f32(p + 8));
    }
    tris.push_back(tri);
  }
  return tris;
}

/// Whitespace tokenizer that remembers where each token started.
class Tokenizer {
 public:
  explicit Tokenizer(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool next(std::string_view& token, std::size_t& offset) {
    while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
    if (pos_ >= bytes_.size()) return false;
    offset = pos_;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) ++pos_;
    token = std::string_view(reinterpret_cast<const char*>(bytes_.data()) + offset, pos_ - offset);
    return true;
  }

  void skip_line() {
    while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<Triangle> parse_ascii(std::span<const std::uint8_t> bytes) {
  Tokenizer tok(bytes);
  std::string_view token;
  std::size_t offset = 0;

  auto expect = [&](std::string_view word) {
    if (!tok.next(token, offset)) throw ParseError("unexpected end of ASCII STL, expected '" + std::string(word) + "'", tok.position());
    if (token != word) {
      throw ParseError("expected '" + std::string(word) + "' but found '" + std::string(token) + "'", offset);
    }
  };
  auto number = [&]() {
    if (!tok.next(token, offset)) throw ParseError("unexpected end of ASCII STL, expected a number", tok.position());
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size()) {
      throw ParseError("malformed number '" + std::string(token) + "'", offset);
    }
    return value;
  };

  expect("solid");
  tok.skip_line();  // solid name

  std::vector<Triangle> tris;
  while (true) {
    if (!tok.next(token, offset)) throw ParseError("missing 'endsolid'", tok.position());
    if (token == "endsolid") break;
    if (token != "facet") throw ParseError("expected 'facet' but found '" + std::string(token) + "'", offset);
    expect("normal");
    for (int i = 0; i < 3; ++i) number();
    expect("outer");
    expect("loop");
    Triangle tri;
    for (int v = 0; v < 3; ++v) {
      expect("vertex");
      const double x = number();
      const double y = number();
      const double z = number();
      tri[v] = Vec3(x, y, z);
    }
    expect("endloop");
    expect("endfacet");
    tris.push_back(tri);
  }
  return tris;
}

}  // namespace

std::vector<Triangle> parse(std::span<const std::uint8_t> bytes) {
  if (looks_binary(bytes)) return parse_binary(bytes);
  std::size_t start = 0;
  while (start < bytes.size() && std::isspace(bytes[start])) ++start;
  if (bytes.size() - start >= 5 && std::memcmp(bytes.data() + start, "solid", 5) == 0) {
    return parse_ascii(bytes);
  }
  if (bytes.size() < kHeaderSize + 4) throw ParseError("file too short for a binary STL header", bytes.size());
  const std::uint64_t count = read_u32(bytes.data() + kHeaderSize);
  const std::uint64_t expected = kHeaderSize + 4 + count * kRecordSize;
  throw ParseError("binary STL declares " + std::to_string(count) + " triangles (" + std::to_string(expected) +
                       " bytes) but file has " + std::to_string(bytes.size()) + " bytes",
                   std::min<std::uint64_t>(expected, bytes.size()));
}

std::vector<Triangle> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(bytes);
}

std::vector<std::uint8_t> encode_binary(const SurfaceMesh& mesh) {
  std::vector<std::uint8_t> out(kHeaderSize, 0);
  const char tag[] = "holo binary stl";
  std::memcpy(out.data(), tag, sizeof tag - 1);
  put_u32(out, static_cast<std::uint32_t>(mesh.size()));
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    for (int a = 0; a < 3; ++a) put_f32(out, mesh.normal(i)[a]);
    for (const auto& v : mesh.triangles()[i])
      for (int a = 0; a < 3; ++a) put_f32(out, v[a]);
    out.push_back(0);
    out.push_back(0);
  }
  return out;
}

std::string encode_ascii(const SurfaceMesh& mesh, const std::string& name) {
  std::ostringstream os;
  os.precision(9);
  os << "solid " << name << "\n";
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Vec3& n = mesh.normal(i);
    os << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n    outer loop\n";
    for (const auto& v : mesh.triangles()[i]) {
      os << "      vertex " << static_cast<float>(v.x()) << ' ' << static_cast<float>(v.y()) << ' '
         << static_cast<float>(v.z()) << "\n";
    }
    os << "    endloop\n  endfacet\n";
  }
  os << "endsolid " << name << "\n";
  return os.str();
}

void write_binary(const std::string& path, const SurfaceMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  const auto bytes = encode_binary(mesh);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_ascii(const std::string& path, const SurfaceMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << encode_ascii(mesh);
}

}  // namespace holo::stl

#include "holo/hologram_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace holo {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string encode_hologram(const Hologram& hologram, double frequency) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["board_hash"] = to_hex(hologram.board_hash());
  doc["frequency"] = frequency;
  doc["transducers"] = hologram.size();
  auto acts = nlohmann::ordered_json::array();
  for (const Complex& c : hologram.activations()) acts.push_back({c.real(), c.imag()});
  doc["activations"] = std::move(acts);
  return doc.dump(1) + "\n";
}

HologramFile decode_hologram(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("hologram JSON: ") + e.what(), e.byte);
  }
  try {
    if (doc.at("version").get<int>() != 1) throw ParseError("hologram JSON: unsupported version");
    const auto& acts = doc.at("activations");
    ComplexVector x(static_cast<Eigen::Index>(acts.size()));
    for (std::size_t t = 0; t < acts.size(); ++t) {
      const auto& pair = acts[t];
      if (!pair.is_array() || pair.size() != 2) throw ParseError("hologram JSON: activation is not a [re, im] pair");
      x[static_cast<Eigen::Index>(t)] = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
    if (doc.contains("transducers") && doc["transducers"].get<std::size_t>() != acts.size()) {
      throw ParseError("hologram JSON: transducer count does not match activations");
    }
    if (x.size() == 0) throw ParseError("hologram JSON: no activations");
    const std::string hash_text = doc.value("board_hash", std::string("0000000000000000"));
    std::uint64_t hash = 0;
    const auto res = std::from_chars(hash_text.data(), hash_text.data() + hash_text.size(), hash, 16);
    if (res.ec != std::errc() || res.ptr != hash_text.data() + hash_text.size()) {
      throw ParseError("hologram JSON: malformed board_hash");
    }
    HologramFile out{Hologram(std::move(x), hash), doc.value("frequency", 40000.0)};
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("hologram JSON: ") + e.what());
  }
}

void write_hologram(const std::string& path, const Hologram& hologram, double frequency) {
  write_text(path, encode_hologram(hologram, frequency));
}

HologramFile read_hologram(const std::string& path) { return decode_hologram(read_text(path)); }

void write_loss_trace(const std::string& path, const std::vector<double>& losses) {
  std::string text = "iteration,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) text += std::to_string(i) + "," + format_double(losses[i]) + "\n";
  write_text(path, text);
}

}  // namespace holo

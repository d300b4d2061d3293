#pragma once

#include <string>
#include <vector>

#include "holo/solvers.hpp"

namespace holo {

struct HologramFile {
  Hologram hologram;
  double frequency = 40000.0;
};

/// JSON document: {"version":1,"board_hash":"<hex>","frequency":f,
/// "transducers":T,"activations":[[re,im],...]}.
std::string encode_hologram(const Hologram& hologram, double frequency);
HologramFile decode_hologram(const std::string& text);

void write_hologram(const std::string& path, const Hologram& hologram, double frequency);
HologramFile read_hologram(const std::string& path);

/// CSV "iteration,loss".
void write_loss_trace(const std::string& path, const std::vector<double>& losses);

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

}  // namespace holo

#include "holo/core.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>

namespace holo {

namespace {

std::mutex& handler_mutex() {
  static std::mutex mutex;
  return mutex;
}

WarningHandler& handler_slot() {
  static WarningHandler handler = [](std::string_view message) {
    std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(message.size()), message.data());
  };
  return handler;
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be positive and finite, got " + std::to_string(value));
  }
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  WarningHandler previous = std::move(handler_slot());
  handler_slot() = std::move(handler);
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler_slot()) handler_slot()(message);
}

MediumConfig::MediumConfig(double frequency, double sound_speed, double density)
    : frequency_(frequency), sound_speed_(sound_speed), density_(density) {
  require_positive(frequency, "frequency");
  require_positive(sound_speed, "medium sound speed");
  require_positive(density, "medium density");
}

ParticleConfig::ParticleConfig(double radius, double sound_speed, double density)
    : radius_(radius), sound_speed_(sound_speed), density_(density) {
  require_positive(radius, "particle radius");
  require_positive(sound_speed, "particle sound speed");
  require_positive(density, "particle density");
}

double wavenumber(const MediumConfig& medium) { return medium.wavenumber(); }

GorkovConstants gorkov_constants(const MediumConfig& medium, const ParticleConfig& particle) {
  const double volume = particle.volume();
  const double c0 = medium.sound_speed();
  const double rho0 = medium.density();
  const double cp = particle.sound_speed();
  const double rhop = particle.density();
  const double omega = medium.angular_frequency();

  GorkovConstants out;
  out.k1 = 0.25 * volume * (1.0 / (c0 * c0 * rho0) - 1.0 / (cp * cp * rhop));
  out.k2 = 0.75 * volume * (rhop - rho0) / (omega * omega * rho0 * (rho0 + 2.0 * rhop));
  return out;
}

void Fnv1a::add_bytes(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= bytes[i];
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::add(double value) {
  // Hash the little-endian bit pattern so fingerprints are portable.
  std::uint64_t bits = std::bit_cast<std::uint64_t>(value == 0.0 ? 0.0 : value);
  add(bits);
}

void Fnv1a::add(std::uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  add_bytes(bytes, sizeof bytes);
}

std::string to_hex(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

}  // namespace holo

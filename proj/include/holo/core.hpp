#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace holo {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using ComplexVector = Eigen::VectorXcd;
/// Points are rows, transducers are columns.
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short category used by the CLI error prefix.
  virtual const char* kind() const noexcept { return "error"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class GeometryError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "geometry"; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what), offset_(0) {}
  std::size_t offset() const noexcept { return offset_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t offset_;
};

class PropagationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "propagation"; }
};

class SolverError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "solver"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

/// Non-fatal diagnostics (dropped triangles, coarse meshes, ...). The default
/// handler prints to stderr; returns the previously installed handler.
using WarningHandler = std::function<void(std::string_view)>;
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

/// Propagation medium. Immutable once constructed.
class MediumConfig {
 public:
  /// Air at 20 C, 40 kHz.
  MediumConfig() : MediumConfig(40000.0, 343.0, 1.204) {}
  MediumConfig(double frequency, double sound_speed, double density);

  double frequency() const noexcept { return frequency_; }
  double sound_speed() const noexcept { return sound_speed_; }
  double density() const noexcept { return density_; }

  double wavenumber() const noexcept { return kTwoPi * frequency_ / sound_speed_; }
  double angular_frequency() const noexcept { return kTwoPi * frequency_; }
  double wavelength() const noexcept { return sound_speed_ / frequency_; }

 private:
  double frequency_;
  double sound_speed_;
  double density_;
};

/// Small spherical particle; volume is always derived from the radius.
class ParticleConfig {
 public:
  /// Expanded-polystyrene bead, 1 mm radius.
  ParticleConfig() : ParticleConfig(1e-3, 900.0, 29.0) {}
  ParticleConfig(double radius, double sound_speed, double density);

  double radius() const noexcept { return radius_; }
  double sound_speed() const noexcept { return sound_speed_; }
  double density() const noexcept { return density_; }
  double volume() const noexcept { return 4.0 / 3.0 * kPi * radius_ * radius_ * radius_; }

 private:
  double radius_;
  double sound_speed_;
  double density_;
};

struct GorkovConstants {
  double k1 = 0.0;
  double k2 = 0.0;
};

double wavenumber(const MediumConfig& medium);

/// Monopole/dipole coefficients of U = K1|p|^2 - K2|grad p|^2.
/// K2 uses (rho_p - rho_0) so that a dense particle has K2 > 0 and is
/// drawn towards velocity antinodes (negative potential).
GorkovConstants gorkov_constants(const MediumConfig& medium, const ParticleConfig& particle);

inline double amplitude(Complex value) { return std::abs(value); }

/// Argument in (-pi, pi].
inline double phase(Complex value) {
  const double angle = std::arg(value);
  return angle <= -kPi ? kPi : angle;
}

/// 64-bit FNV-1a, used for board/mesh fingerprints.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t size);
  void add(double value);
  void add(std::uint64_t value);
  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t value);

}  // namespace holo

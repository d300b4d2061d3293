#pragma once

#include <optional>
#include <string>

#include "holo/core.hpp"

namespace holo {

/// Physical settings read by the CLI. Every key is optional:
/// frequency, c0, rho0, particle_radius, c_p, rho_p, p_ref, transducer_radius.
struct Settings {
  MediumConfig medium;
  ParticleConfig particle;
  double p_ref = 8.02;
  double transducer_radius = 0.0045;
};

inline constexpr const char* kConfigEnvVar = "HOLO_CONFIG";

Settings parse_settings(const std::string& json_text);
Settings load_settings(const std::string& path);

/// Explicit path if given, else $HOLO_CONFIG if set, else defaults.
Settings resolve_settings(const std::optional<std::string>& path);

}  // namespace holo

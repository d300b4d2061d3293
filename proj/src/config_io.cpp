#include "holo/config_io.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace holo {

Settings parse_settings(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> known = {"frequency", "c0",  "rho0",  "particle_radius",
                                              "c_p",       "rho_p", "p_ref", "transducer_radius"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw ConfigError("config: unknown key '" + item.key() + "'");
    if (!item.value().is_number()) throw ConfigError("config: '" + item.key() + "' must be a number");
  }
  const Settings defaults;
  auto get = [&](const char* key, double fallback) { return doc.contains(key) ? doc[key].get<double>() : fallback; };
  Settings s{MediumConfig(get("frequency", defaults.medium.frequency()), get("c0", defaults.medium.sound_speed()),
                          get("rho0", defaults.medium.density())),
             ParticleConfig(get("particle_radius", defaults.particle.radius()),
                            get("c_p", defaults.particle.sound_speed()), get("rho_p", defaults.particle.density())),
             get("p_ref", defaults.p_ref), get("transducer_radius", defaults.transducer_radius)};
  if (!(s.p_ref > 0.0)) throw ConfigError("config: p_ref must be positive");
  if (!(s.transducer_radius > 0.0)) throw ConfigError("config: transducer_radius must be positive");
  return s;
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_settings(os.str());
}

Settings resolve_settings(const std::optional<std::string>& path) {
  if (path) return load_settings(*path);
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) return load_settings(env);
  return Settings{};
}

}  // namespace holo

#pragma once

#include <optional>
#include <string>

#include "subh/mechanical.hpp"
#include "subh/trig_system.hpp"

namespace subh {

// Parsed contents of one config file. A file describes an angle-action
// system, a mechanical oscillator, or both.
struct ParsedConfig {
    std::optional<TrigSystem> trig;
    std::optional<MechanicalSystem> mechanical;
};

// Parse the TOML-style config format:
//
//   [system]
//   omega = [0.0, 1.0]          # frequency map, ascending coefficients
//   realify = true              # optional, default true
//
//   [[G.modes]]                 # likewise [[F.modes]]
//   nu = 1
//   sigma = -1
//   coeff = [[0, 0, 0.0, -0.5]] # entries [degA, degC, re, im]
//
//   [mechanical]
//   g = [0.0, 0.0, 0.0, 1.0]    # restoring force, ascending coefficients
//
//   [[mechanical.f_modes]]
//   sigma = 1
//   coeff_x = [0.5]             # polynomial in x multiplying e^{i sigma t}
//   coeff_x_im = [0.0]          # optional imaginary part
//
// Unknown keys, malformed values, and duplicate modes throw ConfigError;
// reality violations throw RealityError.
ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

// Convenience wrappers that insist on the respective section.
TrigSystem parse_system_file(const std::string& path);
MechanicalSystem parse_mechanical_file(const std::string& path);

} // namespace subh

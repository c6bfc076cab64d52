#pragma once

// Flat key=value parameter files.
//
//   # comment
//   model = so3
//   kR = 1
//   J1 = 3
//   Rd = 0.3, 0, 0      (axis-angle vector, rad)
//   qd = 0, 0, 1        (normalized on load)
//
// Recognized keys: model, m, l, g, kq, komega, kR, kOmega, J1..J3, G1..G3,
// rho, qd, Rd. m and g apply to both models.

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "attman/models.hpp"

namespace attman {

struct ParamConfig {
  std::optional<ModelId> model;
  S2Params s2;
  SO3Params so3;
};

using KeyValues = std::map<std::string, std::string>;

/// Throws BadParams on malformed lines or duplicate keys.
KeyValues read_key_values(std::istream& in);

/// Applies recognized keys on top of cfg. Unknown keys raise BadParams.
void apply_key_values(const KeyValues& kv, ParamConfig& cfg);

ParamConfig load_config(const std::filesystem::path& path);

double parse_real(const std::string& text, const std::string& what);

/// "x,y,z" (whitespace tolerated).
Vec3 parse_vec3(const std::string& text, const std::string& what);

}  // namespace attman

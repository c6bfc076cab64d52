#include "attman/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "attman/errors.hpp"

namespace attman {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw BadParams("cannot parse " + what + " from '" + text + "'");
  }
  return v;
}

Vec3 parse_vec3(const std::string& text, const std::string& what) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw BadParams(what + " needs three comma-separated values");
  return {parse_real(parts[0], what), parse_real(parts[1], what), parse_real(parts[2], what)};
}

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw BadParams("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw BadParams("config line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw BadParams("config key '" + key + "' given twice");
    }
  }
  return kv;
}

void apply_key_values(const KeyValues& kv, ParamConfig& cfg) {
  for (const auto& [key, value] : kv) {
    if (key == "model") {
      cfg.model = parse_model_id(value);
    } else if (key == "m") {
      cfg.s2.m = cfg.so3.m = parse_real(value, key);
    } else if (key == "g") {
      cfg.s2.g = cfg.so3.g = parse_real(value, key);
    } else if (key == "l") {
      cfg.s2.l = parse_real(value, key);
    } else if (key == "kq") {
      cfg.s2.kq = parse_real(value, key);
    } else if (key == "komega") {
      cfg.s2.komega = parse_real(value, key);
    } else if (key == "kR") {
      cfg.so3.kR = parse_real(value, key);
    } else if (key == "kOmega") {
      cfg.so3.kOmega = parse_real(value, key);
    } else if (key.size() == 2 && (key[0] == 'J' || key[0] == 'G') && key[1] >= '1' &&
               key[1] <= '3') {
      const int i = key[1] - '1';
      (key[0] == 'J' ? cfg.so3.J : cfg.so3.G)(i, i) = parse_real(value, key);
    } else if (key == "rho") {
      cfg.so3.rho = parse_vec3(value, key);
    } else if (key == "qd") {
      const Vec3 v = parse_vec3(value, key);
      if (!(v.norm() > 0.0)) throw BadParams("qd must be nonzero");
      cfg.s2.qd = UnitVector(v / v.norm());
    } else if (key == "Rd") {
      cfg.so3.Rd = exp_rot(parse_vec3(value, key));
    } else {
      throw BadParams("unknown config key '" + key + "'");
    }
  }
}

ParamConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  ParamConfig cfg;
  apply_key_values(read_key_values(in), cfg);
  return cfg;
}

}  // namespace attman

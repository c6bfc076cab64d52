#include "attman/bundle_io.hpp"

#include <array>
#include <type_traits>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "attman/errors.hpp"

namespace attman {

using nlohmann::json;

BundleFormat parse_bundle_format(const std::string& s) {
  if (s == "jsonl") return BundleFormat::Jsonl;
  if (s == "csv") return BundleFormat::Csv;
  throw BadParams("unknown bundle format '" + s + "' (expected jsonl or csv)");
}

std::string to_string(BundleFormat f) { return f == BundleFormat::Jsonl ? "jsonl" : "csv"; }

std::string format_real(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw IoError("cannot format real");
  return std::string(buf.data(), ptr);
}

std::string csv_header(ModelId model) {
  if (model == ModelId::S2) return "seed,t,q1,q2,q3,w1,w2,w3,speed";
  return "seed,t,R11,R12,R13,R21,R22,R23,R31,R32,R33,w1,w2,w3,speed";
}

std::filesystem::path meta_path(const std::filesystem::path& bundle_path) {
  return bundle_path.string() + ".meta.json";
}

namespace {

// Attitude part as a flat list: q (3) or R row-major (9), then omega.
template <class State>
void flatten(const State& s, std::vector<double>& att, Vec3& omega) {
  att.clear();
  if constexpr (std::is_same_v<State, TangentStateS2>) {
    att.assign(s.q.vec().data(), s.q.vec().data() + 3);
    omega = s.omega;
  } else {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) att.push_back(s.R.mat()(r, c));
    omega = s.Omega;
  }
}

template <class State>
void write_record(std::ostream& out, BundleFormat format, std::size_t seed, double t,
                  const State& s) {
  std::vector<double> att;
  Vec3 omega;
  flatten(s, att, omega);
  const double speed = omega.norm();
  if (format == BundleFormat::Jsonl) {
    const char* key = att.size() == 3 ? "q" : "R";
    out << "{\"seed\":" << seed << ",\"t\":" << format_real(t) << ",\"" << key << "\":[";
    for (std::size_t i = 0; i < att.size(); ++i) out << (i ? "," : "") << format_real(att[i]);
    out << "],\"omega\":[" << format_real(omega.x()) << "," << format_real(omega.y()) << ","
        << format_real(omega.z()) << "],\"speed\":" << format_real(speed) << "}\n";
  } else {
    out << seed << "," << format_real(t);
    for (double v : att) out << "," << format_real(v);
    out << "," << format_real(omega.x()) << "," << format_real(omega.y()) << ","
        << format_real(omega.z()) << "," << format_real(speed) << "\n";
  }
}

json params_json(const S2Params& p) {
  return {{"m", p.m}, {"l", p.l}, {"g", p.g}, {"kq", p.kq}, {"komega", p.komega},
          {"qd", {p.qd.vec().x(), p.qd.vec().y(), p.qd.vec().z()}}};
}

json params_json(const SO3Params& p) {
  json rd = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rd.push_back(p.Rd.mat()(r, c));
  return {{"m", p.m},
          {"g", p.g},
          {"kR", p.kR},
          {"kOmega", p.kOmega},
          {"J", {p.J(0, 0), p.J(1, 1), p.J(2, 2)}},
          {"G", {p.G(0, 0), p.G(1, 1), p.G(2, 2)}},
          {"rho", {p.rho.x(), p.rho.y(), p.rho.z()}},
          {"Rd", rd}};
}

Vec3 vec3_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

void params_from(const json& j, S2Params& p) {
  p.m = j.at("m");
  p.l = j.at("l");
  p.g = j.at("g");
  p.kq = j.at("kq");
  p.komega = j.at("komega");
  p.qd = UnitVector(vec3_from(j.at("qd")));
}

void params_from(const json& j, SO3Params& p) {
  p.m = j.at("m");
  p.g = j.at("g");
  p.kR = j.at("kR");
  p.kOmega = j.at("kOmega");
  p.J = vec3_from(j.at("J")).asDiagonal();
  p.G = vec3_from(j.at("G")).asDiagonal();
  p.rho = vec3_from(j.at("rho"));
  Mat3 rd;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rd(r, c) = j.at("Rd").at(3 * r + c).get<double>();
  p.Rd = Rotation(rd);
}

template <class Bundle>
void export_impl(const Bundle& b, const std::filesystem::path& path, BundleFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (format == BundleFormat::Csv) out << csv_header(b.model) << "\n";
  for (std::size_t seed = 0; seed < b.tracks.size(); ++seed) {
    for (std::size_t k = 0; k < b.tracks[seed].size(); ++k) {
      write_record(out, format, seed, b.t[k], b.tracks[seed][k]);
    }
  }
  if (!out) throw IoError("write failed for " + path.string());

  json failures = json::array();
  for (std::size_t i = 0; i < b.failures.size(); ++i) {
    if (b.failures[i]) {
      failures.push_back({{"seed", i}, {"step", b.failures[i]->step}, {"message", b.failures[i]->message}});
    }
  }
  const json meta = {{"format", to_string(format)},
                     {"model", to_string(b.model)},
                     {"equilibrium", b.equilibrium_name},
                     {"delta", b.delta},
                     {"h", b.h},
                     {"stride", b.stride},
                     {"seeds", b.tracks.size()},
                     {"times", b.t},
                     {"params", params_json(b.params)},
                     {"failures", failures}};
  std::ofstream mo(meta_path(path), std::ios::binary);
  if (!mo) throw IoError("cannot open " + meta_path(path).string() + " for writing");
  mo << meta.dump(2) << "\n";
  if (!mo) throw IoError("write failed for " + meta_path(path).string());
}

struct RawRecord {
  std::size_t seed = 0;
  double t = 0.0;
  std::vector<double> att;
  Vec3 omega;
};

std::vector<RawRecord> read_records(const std::filesystem::path& path, BundleFormat format,
                                    ModelId model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::size_t natt = model == ModelId::S2 ? 3 : 9;
  std::vector<RawRecord> out;
  std::string line;
  if (format == BundleFormat::Csv) {
    std::getline(in, line);
    if (line != csv_header(model)) throw IoError("unexpected CSV header in " + path.string());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RawRecord r;
    if (format == BundleFormat::Jsonl) {
      const json j = json::parse(line);
      r.seed = j.at("seed").get<std::size_t>();
      r.t = j.at("t").get<double>();
      r.att = j.at(natt == 3 ? "q" : "R").get<std::vector<double>>();
      r.omega = vec3_from(j.at("omega"));
    } else {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != natt + 6) throw IoError("malformed CSV row in " + path.string());
      auto num = [&](const std::string& c) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (ec != std::errc() || p != c.data() + c.size()) throw IoError("bad number '" + c + "'");
        return v;
      };
      r.seed = static_cast<std::size_t>(num(cells[0]));
      r.t = num(cells[1]);
      for (std::size_t i = 0; i < natt; ++i) r.att.push_back(num(cells[2 + i]));
      r.omega = {num(cells[2 + natt]), num(cells[3 + natt]), num(cells[4 + natt])};
    }
    if (r.att.size() != natt) throw IoError("wrong attitude length in " + path.string());
    out.push_back(std::move(r));
  }
  return out;
}

template <class Bundle, class Make>
Bundle assemble(const json& meta, const std::vector<RawRecord>& recs, Make make) {
  Bundle b;
  b.model = parse_model_id(meta.at("model").get<std::string>());
  b.equilibrium_name = meta.at("equilibrium").get<std::string>();
  b.delta = meta.at("delta");
  b.h = meta.at("h");
  b.stride = meta.at("stride");
  b.t = meta.at("times").get<std::vector<double>>();
  params_from(meta.at("params"), b.params);
  const auto n = meta.at("seeds").get<std::size_t>();
  b.tracks.resize(n);
  b.failures.resize(n);
  for (const RawRecord& r : recs) {
    if (r.seed >= n) throw IoError("record seed out of range");
    auto& track = b.tracks[r.seed];
    if (track.size() >= b.t.size() || b.t[track.size()] != r.t) {
      throw IoError("records out of order or off the time grid");
    }
    track.push_back(make(r));
  }
  for (const json& f : meta.at("failures")) {
    b.failures.at(f.at("seed").get<std::size_t>()) =
        StepFailure{f.at("step").get<long>(), f.at("message").get<std::string>(), nullptr};
  }
  return b;
}

}  // namespace

void export_bundle(const S2Bundle& b, const std::filesystem::path& path, BundleFormat format) {
  export_impl(b, path, format);
}

void export_bundle(const SO3Bundle& b, const std::filesystem::path& path, BundleFormat format) {
  export_impl(b, path, format);
}

AnyBundle import_bundle(const std::filesystem::path& path) {
  std::ifstream mi(meta_path(path));
  if (!mi) throw IoError("missing bundle metadata " + meta_path(path).string());
  json meta;
  try {
    meta = json::parse(mi);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad bundle metadata: ") + e.what());
  }
  try {
    const ModelId model = parse_model_id(meta.at("model").get<std::string>());
    const BundleFormat format = parse_bundle_format(meta.at("format").get<std::string>());
    const auto recs = read_records(path, format, model);
    if (model == ModelId::S2) {
      S2Bundle b = assemble<S2Bundle>(meta, recs, [](const RawRecord& r) {
        return TangentStateS2(UnitVector(Vec3(r.att[0], r.att[1], r.att[2])), r.omega);
      });
      b.equilibrium = s2_equilibrium(b.params, b.equilibrium_name);
      return b;
    }
    SO3Bundle b = assemble<SO3Bundle>(meta, recs, [](const RawRecord& r) {
      Mat3 m;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = r.att[static_cast<std::size_t>(3 * i + j)];
      return TangentStateSO3(Rotation(m), r.omega);
    });
    b.equilibrium = so3_equilibrium(b.params, so3_equilibrium_index(b.equilibrium_name));
    return b;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad bundle file: ") + e.what());
  }
}

void write_trajectory(const Trajectory<TangentStateS2>& traj, std::ostream& out,
                      BundleFormat format) {
  if (format == BundleFormat::Csv) out << csv_header(ModelId::S2) << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) write_record(out, format, 0, traj.t[k], traj.states[k]);
}

void write_trajectory(const Trajectory<TangentStateSO3>& traj, std::ostream& out,
                      BundleFormat format) {
  if (format == BundleFormat::Csv) out << csv_header(ModelId::SO3) << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) write_record(out, format, 0, traj.t[k], traj.states[k]);
}

}  // namespace attman

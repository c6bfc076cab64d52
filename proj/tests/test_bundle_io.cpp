#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "attman/bundle_io.hpp"
#include "attman/errors.hpp"

using namespace attman;
namespace fs = std::filesystem;

namespace {
fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("attman_io_" + name); }

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

S2Bundle small_s2() {
  const S2Params p;
  return globalize(build_seed_ball_s2(p, 1e-6, 4), 0.004, StepSpec{}, p);
}
}  // namespace

TEST_CASE("format_real round trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1e-6, 0.0}) {
    const std::string s = format_real(x);
    CHECK(std::stod(s) == x);
    CHECK(s.size() <= 24);
  }
  CHECK(format_real(0.5) == "0.5");
}

TEST_CASE("csv headers") {
  CHECK(csv_header(ModelId::S2) == "seed,t,q1,q2,q3,w1,w2,w3,speed");
  CHECK(csv_header(ModelId::SO3) == "seed,t,R11,R12,R13,R21,R22,R23,R31,R32,R33,w1,w2,w3,speed");
}

TEST_CASE("export record counts and schema") {
  S2Bundle b = small_s2();
  b.tracks.resize(2);
  b.failures.resize(2);
  REQUIRE(b.t.size() == 3);
  const fs::path j = tmp("six.jsonl");
  export_bundle(b, j, BundleFormat::Jsonl);
  const auto lines = lines_of(j);
  REQUIRE(lines.size() == 6);
  const auto rec = nlohmann::json::parse(lines[4]);
  CHECK(rec.at("seed") == 1);
  CHECK(rec.at("t").get<double>() == doctest::Approx(0.002));
  CHECK(rec.at("q").size() == 3);
  CHECK(rec.at("omega").size() == 3);
  CHECK(rec.at("speed").get<double>() == b.tracks[1][1].omega.norm());
  CHECK(fs::exists(meta_path(j)));
  const fs::path c = tmp("six.csv");
  export_bundle(b, c, BundleFormat::Csv);
  const auto rows = lines_of(c);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == csv_header(ModelId::S2));
  CHECK(rows[1].rfind("0,0,", 0) == 0);
  for (const auto& p : {j, c}) {
    fs::remove(p);
    fs::remove(meta_path(p));
  }
}

TEST_CASE("bit-exact reimport") {
  const S2Bundle b = small_s2();
  const SO3Params q;
  const SO3Bundle r = globalize(build_seed_ball_so3(2, q, 1e-6, 8), 0.02, StepSpec{}, q, {3, 0});
  for (BundleFormat f : {BundleFormat::Jsonl, BundleFormat::Csv}) {
    const fs::path p1 = tmp("s2." + to_string(f)), p2 = tmp("so3." + to_string(f));
    export_bundle(b, p1, f);
    export_bundle(r, p2, f);
    const auto back1 = std::get<S2Bundle>(import_bundle(p1));
    const auto back2 = std::get<SO3Bundle>(import_bundle(p2));
    CHECK(back1.t == b.t);
    CHECK(back1.delta == b.delta);
    CHECK(back1.equilibrium_name == "inverted");
    for (std::size_t i = 0; i < b.seed_count(); ++i)
      for (std::size_t k = 0; k < b.t.size(); ++k) {
        CHECK(back1.tracks[i][k].q.vec() == b.tracks[i][k].q.vec());
        CHECK(back1.tracks[i][k].omega == b.tracks[i][k].omega);
      }
    CHECK(back2.t == r.t);
    CHECK(back2.stride == 3);
    CHECK(back2.params.G == q.G);
    CHECK(back2.equilibrium.R.mat() == r.equilibrium.R.mat());
    for (std::size_t i = 0; i < r.seed_count(); ++i)
      for (std::size_t k = 0; k < r.t.size(); ++k) {
        CHECK(back2.tracks[i][k].R.mat() == r.tracks[i][k].R.mat());
        CHECK(back2.tracks[i][k].Omega == r.tracks[i][k].Omega);
      }
    for (const auto& p : {p1, p2}) {
      fs::remove(p);
      fs::remove(meta_path(p));
    }
  }
}

TEST_CASE("io errors") {
  CHECK_THROWS_AS(export_bundle(small_s2(), "/nonexistent-dir/x.jsonl", BundleFormat::Jsonl), IoError);
  CHECK_THROWS_AS(import_bundle(tmp("missing.jsonl")), IoError);
  const fs::path p = tmp("corrupt.jsonl");
  export_bundle(small_s2(), p, BundleFormat::Jsonl);
  {
    std::ofstream out(p, std::ios::app);
    out << "{\"seed\": 0, \"t\": \n";
  }
  CHECK_THROWS_AS(import_bundle(p), IoError);
  fs::remove(p);
  fs::remove(meta_path(p));
  CHECK_THROWS_AS(parse_bundle_format("xml"), BadParams);
}

TEST_CASE("write_trajectory") {
  const S2Params p;
  StepSpec fwd;
  fwd.direction = Direction::Forward;
  const auto traj = flow(TangentStateS2(UnitVector::e1(), Vec3::Zero()), 0.01, fwd, p);
  std::ostringstream out;
  write_trajectory(traj, out, BundleFormat::Csv);
  std::istringstream in(out.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 7);
}

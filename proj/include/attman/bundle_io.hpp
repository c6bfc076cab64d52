#pragma once

// Bundle files. One record per (seed, stored time), seed-major:
//
//   JSONL: {"seed":0,"t":0.002,"q":[..3..],"omega":[..3..],"speed":..}
//          {"seed":0,"t":0.002,"R":[..9 row-major..],"omega":[..3..],"speed":..}
//   CSV:   seed,t,q1,q2,q3,w1,w2,w3,speed
//          seed,t,R11,R12,R13,R21,R22,R23,R31,R32,R33,w1,w2,w3,speed
//
// Reals use the shortest decimal that round-trips (at most 17 significant
// digits). Model, parameters and failures go to a sidecar "<path>.meta.json".

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "attman/manifold.hpp"

namespace attman {

enum class BundleFormat { Jsonl, Csv };

BundleFormat parse_bundle_format(const std::string& s);
std::string to_string(BundleFormat f);

/// Shortest round-trip decimal form of x.
std::string format_real(double x);

std::string csv_header(ModelId model);

std::filesystem::path meta_path(const std::filesystem::path& bundle_path);

void export_bundle(const S2Bundle& b, const std::filesystem::path& path, BundleFormat format);
void export_bundle(const SO3Bundle& b, const std::filesystem::path& path, BundleFormat format);

using AnyBundle = std::variant<S2Bundle, SO3Bundle>;

/// Reads a bundle written by export_bundle (sidecar required).
AnyBundle import_bundle(const std::filesystem::path& path);

/// Single trajectory as seed 0, with t taken from the trajectory.
void write_trajectory(const Trajectory<TangentStateS2>& traj, std::ostream& out, BundleFormat format);
void write_trajectory(const Trajectory<TangentStateSO3>& traj, std::ostream& out,
                      BundleFormat format);

}  // namespace attman

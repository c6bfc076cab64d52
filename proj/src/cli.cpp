#include "attman/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "attman/bundle_io.hpp"
#include "attman/config.hpp"
#include "attman/errors.hpp"
#include "attman/manifold.hpp"
#include "attman/spectral.hpp"

namespace attman::cli {

namespace {

/// Argument-level failure: reported with exit code 2.
class ArgumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::string model;

  // Built-in defaults < config file < --set overrides < --model.
  ParamConfig resolve() const {
    ParamConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    KeyValues kv;
    for (const std::string& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + o + "'");
      kv[o.substr(0, eq)] = o.substr(eq + 1);
    }
    apply_key_values(kv, cfg);
    if (!model.empty()) cfg.model = parse_model_id(model);
    if (!cfg.model) throw ArgumentError("--model is required (or set model= in the config file)");
    cfg.s2.validate();
    cfg.so3.validate();
    return cfg;
  }
};

void add_common(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--config", rc.config_path, "Flat key=value parameter file")
      ->check(CLI::ExistingFile);
  sub->add_option("--set", rc.overrides,
                  "Parameter override key=value (repeatable; beats --config)");
  sub->add_option("--model", rc.model, "Model: s2 or so3")->check(CLI::IsMember({"s2", "so3"}));
}

std::string fmt4(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string fmt_complex(cplx z) {
  if (std::abs(z.imag()) < 5e-5) return fmt4(z.real());
  std::string im = fmt4(std::abs(z.imag()));
  return fmt4(z.real()) + (z.imag() < 0 ? "-" : "+") + im + "i";
}

// "e1 - 1.6180 e4" style, coefficients at 4 decimals.
std::string fmt_vector(const CVec6& v) {
  std::string s;
  for (int i = 0; i < 6; ++i) {
    cplx c = v(i);
    if (std::abs(c) < 5e-5) continue;
    const std::string basis = "e" + std::to_string(i + 1);
    const bool real = std::abs(c.imag()) < 5e-5;
    if (real) {
      const double r = c.real();
      const std::string mag = std::abs(std::abs(r) - 1.0) < 5e-5 ? "" : fmt4(std::abs(r)) + " ";
      if (s.empty()) {
        s += (r < 0 ? "-" : "") + mag + basis;
      } else {
        s += (r < 0 ? " - " : " + ") + mag + basis;
      }
    } else {
      s += (s.empty() ? "" : " + ") + std::string("(") + fmt_complex(c) + ") " + basis;
    }
  }
  return s.empty() ? "0" : s;
}

int run_eigs(const RunConfig& rc, const std::string& equilibrium, std::ostream& out) {
  const ParamConfig cfg = rc.resolve();
  LinearizedSystem lin;
  std::string name = equilibrium;
  if (*cfg.model == ModelId::S2) {
    if (name.empty()) name = "inverted";
    lin = a_matrix_s2(s2_equilibrium(cfg.s2, name), cfg.s2);
  } else {
    if (name.empty()) name = "e1";
    lin = a_matrix_so3(so3_equilibrium(cfg.so3, so3_equilibrium_index(name)), cfg.so3);
  }
  const EigenStructure es = eigen_decompose(lin.A);
  const Classification cls = classify_equilibrium(es, lin.C);

  out << "model " << to_string(*cfg.model) << ", equilibrium " << name << "\n";
  for (int k = 0; k < 6; ++k) {
    const bool kept =
        std::find(cls.retained.begin(), cls.retained.end(), k) != cls.retained.end();
    std::ostringstream row;
    row << "lambda" << (k + 1) << " = " << std::setw(16) << std::left << fmt_complex(es.eigenvalues[k])
        << " v" << (k + 1) << " = " << fmt_vector(mode_form(es.eigenvectors[k]));
    if (!kept) row << "   (violates constraint)";
    out << row.str() << "\n";
  }
  out << "classification: " << to_string(cls.label) << " (" << cls.stable << " stable, "
      << cls.unstable << " unstable)\n";
  return 0;
}

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(parse_real(item, flag));
    } catch (const BadParams& e) {
      throw ArgumentError(flag + ": " + e.what());
    }
  }
  if (vals.size() != n) {
    throw ArgumentError(flag + ": expected " + std::to_string(n) + " comma-separated numbers");
  }
  return vals;
}

struct SimulateArgs {
  std::string state;
  double T = 1.0;
  double h = 0.002;
  std::string direction = "fwd";
  std::string out_path;
  std::string format = "jsonl";
  long stride = 1;
};

int run_simulate(const RunConfig& rc, const SimulateArgs& a, std::ostream& out) {
  const ParamConfig cfg = rc.resolve();
  StepSpec spec;
  spec.h = a.h;
  spec.direction = a.direction == "fwd" ? Direction::Forward : Direction::Backward;
  const std::vector<double> v = parse_list(a.state, 6, "--state");
  std::ofstream file(a.out_path, std::ios::binary);
  if (!file) throw IoError("cannot open " + a.out_path + " for writing");
  const BundleFormat format = parse_bundle_format(a.format);

  std::size_t n_states = 0;
  if (*cfg.model == ModelId::S2) {
    Vec3 q(v[0], v[1], v[2]);
    if (!(q.norm() > 0.0)) throw ArgumentError("--state: q must be nonzero");
    q.normalize();
    const TangentStateS2 s0(UnitVector(q), Vec3(v[3], v[4], v[5]));
    const auto traj = flow(s0, a.T, spec, cfg.s2, a.stride);
    write_trajectory(traj, file, format);
    n_states = traj.states.size();
  } else {
    const TangentStateSO3 s0(exp_rot(Vec3(v[0], v[1], v[2])), Vec3(v[3], v[4], v[5]));
    const auto traj = flow(to_momentum(s0, cfg.so3), a.T, spec, cfg.so3, a.stride);
    Trajectory<TangentStateSO3> tangent;
    tangent.t = traj.t;
    for (const MomentumState& m : traj.states) tangent.states.push_back(to_tangent(m, cfg.so3));
    write_trajectory(tangent, file, format);
    n_states = traj.states.size();
  }
  if (!file) throw IoError("write failed for " + a.out_path);
  out << "wrote " << n_states << " states to " << a.out_path << "\n";
  return 0;
}

struct ManifoldArgs {
  std::string equilibrium;
  double delta = 1e-6;
  int points = 0;
  double T = -1.0;
  double h = 0.002;
  long stride = 0;
  unsigned workers = 0;
  std::string out_path;
  std::string format = "jsonl";
};

template <class Bundle>
void print_summary(const Bundle& b, std::ostream& out) {
  std::size_t failed = 0;
  for (const auto& f : b.failures) failed += f ? 1 : 0;
  out << "seeds " << b.seed_count() << ", failed " << failed << ", stored times " << b.t.size()
      << "\n";
  for (double t = 0.0; t <= b.t.back() + 1e-9; t += 1.0) {
    try {
      out << "t = " << fmt4(t) << "  max speed = " << fmt4(slice_stats(b, t).max_speed)
          << " rad/s\n";
    } catch (const TimeNotStored&) {
    }
  }
}

int run_manifold(const RunConfig& rc, const ManifoldArgs& a, std::ostream& out) {
  const ParamConfig cfg = rc.resolve();
  StepSpec spec;
  spec.h = a.h;
  const BundleFormat format = parse_bundle_format(a.format);
  if (*cfg.model == ModelId::S2) {
    const std::string eq = a.equilibrium.empty() ? "inverted" : a.equilibrium;
    if (eq != "inverted") throw ArgumentError("--equilibrium: the S^2 saddle is 'inverted'");
    const auto ball = build_seed_ball_s2(cfg.s2, a.delta, a.points > 0 ? a.points : 100);
    const auto b = globalize(ball, a.T >= 0 ? a.T : 9.0, spec, cfg.s2,
                             {a.stride > 0 ? a.stride : 1, a.workers});
    export_bundle(b, a.out_path, format);
    print_summary(b, out);
  } else {
    const std::string eq = a.equilibrium.empty() ? "e1" : a.equilibrium;
    const int index = so3_equilibrium_index(eq);
    if (index == 0) throw ArgumentError("--equilibrium: choose a saddle (e1, e2 or e3)");
    static const int default_points[] = {0, 112, 544, 976};
    const auto ball =
        build_seed_ball_so3(index, cfg.so3, a.delta, a.points > 0 ? a.points : default_points[index]);
    const auto b = globalize(ball, a.T >= 0 ? a.T : 18.0, spec, cfg.so3,
                             {a.stride > 0 ? a.stride : 10, a.workers});
    export_bundle(b, a.out_path, format);
    print_summary(b, out);
  }
  out << "wrote " << a.out_path << " and " << meta_path(a.out_path).string() << "\n";
  return 0;
}

int run_validate(const std::string& path, std::size_t seed, double t, std::ostream& out) {
  const AnyBundle any = import_bundle(path);
  double dist = 0.0;
  double delta = 0.0;
  std::visit(
      [&](const auto& b) {
        StepSpec spec;
        spec.h = b.h;
        dist = validate_forward(b, seed, t, spec, b.params);
        delta = b.delta;
      },
      any);
  const bool ok = dist >= 0.5 * delta && dist <= 1.5 * delta;
  out << "seed " << seed << ", t = " << format_real(t) << ": distance to equilibrium "
      << format_real(dist) << " (delta " << format_real(delta) << ") " << (ok ? "ok" : "OUT OF RANGE")
      << "\n";
  return ok ? 0 : 1;
}

int run_export(const std::string& in, const std::string& format, const std::string& out_path,
               std::ostream& out) {
  const AnyBundle any = import_bundle(in);
  std::visit([&](const auto& b) { export_bundle(b, out_path, parse_bundle_format(format)); }, any);
  out << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-loop attitude dynamics on S^2 and SO(3): spectra, simulation and stable manifolds",
               "attman"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  RunConfig eigs_rc, sim_rc, man_rc;
  std::string eigs_eq;
  auto* eigs = app.add_subcommand("eigs", "Eigenvalue table of an equilibrium");
  add_common(eigs, eigs_rc);
  eigs->add_option("--equilibrium", eigs_eq,
                   "s2: hanging | inverted (default inverted); so3: identity | e1 | e2 | e3 (default e1)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate one trajectory");
  add_common(simulate, sim_rc);
  simulate
      ->add_option("--state", sim.state,
                   "s2: q1,q2,q3,w1,w2,w3 (q normalized); so3: axis-angle a1,a2,a3 then W1,W2,W3")
      ->required();
  simulate->add_option("--T", sim.T, "Duration in s (multiple of h)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--h", sim.h, "Time step in s")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--direction", sim.direction, "fwd or bwd")
      ->check(CLI::IsMember({"fwd", "bwd"}))
      ->capture_default_str();
  simulate->add_option("--stride", sim.stride, "Record every n-th step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--format", sim.format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  simulate->add_option("--out", sim.out_path, "Output file")->required();

  ManifoldArgs man;
  auto* manifold = app.add_subcommand("manifold", "Grow the stable manifold of a saddle");
  add_common(manifold, man_rc);
  manifold->add_option("--equilibrium", man.equilibrium,
                       "s2: inverted (default); so3: e1 (default) | e2 | e3");
  manifold->add_option("--delta", man.delta, "Seed-ball radius, in (0, 0.1]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  manifold->add_option("--points", man.points,
                       "Number of seeds (default: 100 for s2; 112, 544, 976 for so3 e1, e2, e3)")
      ->check(CLI::PositiveNumber);
  manifold->add_option("--T", man.T, "Backward duration in s (default: 9 for s2, 18 for so3)")
      ->check(CLI::NonNegativeNumber);
  manifold->add_option("--h", man.h, "Time step in s")->check(CLI::PositiveNumber)->capture_default_str();
  manifold->add_option("--stride", man.stride, "Store every n-th step (default: 1 for s2, 10 for so3)")
      ->check(CLI::PositiveNumber);
  manifold->add_option("--workers", man.workers, "Worker threads (default: all cores)");
  manifold->add_option("--format", man.format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  manifold->add_option("--out", man.out_path, "Output bundle path")->required();

  std::string val_bundle;
  std::size_t val_seed = 0;
  double val_t = 0.0;
  auto* validate = app.add_subcommand("validate", "Integrate a stored bundle state forward back to the ball");
  validate->add_option("--bundle", val_bundle, "Bundle written by 'manifold'")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--seed", val_seed, "Seed index")->required();
  validate->add_option("--t", val_t, "Stored backward time in s")->required()->check(CLI::NonNegativeNumber);

  std::string exp_in, exp_format = "csv", exp_out;
  auto* exporter = app.add_subcommand("export", "Re-export a bundle in another format");
  exporter->add_option("--bundle", exp_in, "Input bundle")->required()->check(CLI::ExistingFile);
  exporter->add_option("--format", exp_format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  exporter->add_option("--out", exp_out, "Output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) err << "run with " << app.get_subcommands().front()->get_name() << " --help for usage\n";
    return 2;
  }

  try {
    if (eigs->parsed()) return run_eigs(eigs_rc, eigs_eq, out);
    if (simulate->parsed()) return run_simulate(sim_rc, sim, out);
    if (manifold->parsed()) return run_manifold(man_rc, man, out);
    if (validate->parsed()) return run_validate(val_bundle, val_seed, val_t, out);
    if (exporter->parsed()) return run_export(exp_in, exp_format, exp_out, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const BadParams& e) {
    err << "error: invalid parameters: " << e.what() << "\n";
    return 2;
  } catch (const BadRadius& e) {
    err << "error: --delta: " << e.what() << "\n";
    return 2;
  } catch (const BadGains& e) {
    err << "error: invalid gains: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace attman::cli

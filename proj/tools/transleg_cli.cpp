// transleg: batch front end for the leg morphology toolkit.
//
// Exit codes: 0 success, 64 usage, 1 model error, 2 analysis or data error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "transleg/report_json.hpp"
#include "transleg/transleg.hpp"

namespace fs = std::filesystem;
using namespace transleg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitModel = 1;
constexpr int kExitAnalysis = 2;
constexpr int kExitUsage = 64;

constexpr const char* kBuiltinModel = "builtin";

struct Globals {
  std::string model = kBuiltinModel;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool json = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RobotModel load(const Globals& g) { return g.model == kBuiltinModel ? builtin_model() : load_model(g.model); }

fs::path out_path(const Globals& g, const std::string& name) {
  fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + g.out + "': " + ec.message());
  return dir / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw DataError("cannot write '" + p.string() + "'");
  return f;
}

JointVector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const JointVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

JointVector require_q(const KinematicChain& chain, const std::vector<double>& v, const char* what) {
  if (v.empty()) return JointVector::Zero(static_cast<Eigen::Index>(chain.size()));
  if (v.size() != chain.size())
    throw UsageError(std::string("--") + what + " needs " + std::to_string(chain.size()) + " values, got " +
                     std::to_string(v.size()));
  return to_vector(v);
}

Eigen::Vector3d vec3(const std::vector<double>& v, const char* what) {
  if (v.empty()) return Eigen::Vector3d::Zero();
  if (v.size() != 3) throw UsageError(std::string("--") + what + " needs 3 values");
  return {v[0], v[1], v[2]};
}

std::string fmt(double v) { return format_double(v); }

std::string fmt(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct WorkspaceArgs {
  std::string chain_a = kX2NLeg;
  std::string chain_b = kConventionalLeg;
  std::size_t samples = 200000;
  double voxel = 0.02;
  double radius = 0.02;
  unsigned workers = 0;
  bool full = false;
  bool clouds = true;
};

void write_cloud(const fs::path& p, const WorkspaceSamples& s) {
  auto f = open_out(p);
  const std::size_t n = s.points.empty() ? 0 : static_cast<std::size_t>(s.points.front().q.size());
  std::vector<std::string> header{"x", "y", "z", "w"};
  const auto qs = numbered("q", n);
  header.insert(header.end(), qs.begin(), qs.end());
  write_csv_header(f, header);
  std::vector<double> row;
  for (const auto& pt : s.points) {
    row = {pt.position.x(), pt.position.y(), pt.position.z(), pt.w};
    row.insert(row.end(), pt.q.data(), pt.q.data() + pt.q.size());
    write_csv_row(f, row);
  }
}

int run_workspace(const Globals& g, const WorkspaceArgs& a) {
  const auto model = load(g);
  const auto& ca = model.chain(a.chain_a);
  const auto& cb = model.chain(a.chain_b);
  if (a.samples < 1) throw UsageError("--samples must be >= 1");
  CompareOptions opts;
  opts.voxel_size = a.voxel;
  opts.match_radius = a.radius;
  opts.sampling.mode = a.full ? ManipulabilityMode::Full : ManipulabilityMode::Positional;
  opts.sampling.workers = a.workers ? a.workers : std::max(1u, std::thread::hardware_concurrency());
  if (!(a.voxel > 0.0) || !(a.radius > 0.0)) throw UsageError("--voxel and --radius must be > 0");

  const auto sa = sample_workspace(ca, a.samples, g.seed, a.chain_a, opts.sampling);
  const auto sb = sample_workspace(cb, a.samples, g.seed, a.chain_b, opts.sampling);
  const auto report = compare_report(sa, sb, opts);
  const Json doc = to_json(report);
  {
    auto f = open_out(out_path(g, "workspace_report.json"));
    f << doc.dump(2) << '\n';
  }
  if (a.clouds) {
    write_cloud(out_path(g, "cloud_" + a.chain_a + ".csv"), sa);
    write_cloud(out_path(g, "cloud_" + a.chain_b + ".csv"), sb);
  }
  if (g.json) {
    print_json(doc);
    return kExitOk;
  }
  std::cout << "samples " << report.n_samples << "  seed " << report.seed << "  matched " << report.matched << '\n';
  std::cout << std::left << std::setw(22) << "row" << std::setw(20) << a.chain_a << std::setw(20) << a.chain_b
            << "ratio\n";
  const auto row = [&](const char* name, double x, double y, double r) {
    std::ostringstream line;
    line << std::left << std::setprecision(6) << std::setw(22) << name << std::setw(20) << x << std::setw(20) << y
         << std::fixed << std::setprecision(2) << 100.0 * r << "%";
    std::cout << line.str() << '\n';
  };
  row("voxel_volume_m3", report.a.voxel_volume, report.b.voxel_volume, report.ratios.voxel_volume);
  row("hull_volume_m3", report.a.hull_volume, report.b.hull_volume, report.ratios.hull_volume);
  row("mean_manipulability", report.a.mean_manipulability, report.b.mean_manipulability,
      report.ratios.mean_manipulability);
  row("max_manipulability", report.a.max_manipulability, report.b.max_manipulability, report.ratios.max_manipulability);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ChainArgs {
  std::string chain = kX2NLeg;
  std::vector<double> q;
};

int run_fk(const Globals& g, const ChainArgs& a) {
  const auto model = load(g);
  const auto& chain = model.chain(a.chain);
  const JointVector q = require_q(chain, a.q, "q");
  const Pose p = forward_kinematics(chain, q);
  const double w = manipulability(chain, q);
  if (g.json) {
    Json j = to_json(p);
    j["manipulability"] = w;
    j["within_limits"] = within_limits(chain, q);
    print_json(j);
    return kExitOk;
  }
  std::cout << "position " << fmt(Eigen::VectorXd(p.position)) << '\n'
            << "orientation_wxyz " << fmt(p.orientation.w()) << ' ' << fmt(p.orientation.x()) << ' '
            << fmt(p.orientation.y()) << ' ' << fmt(p.orientation.z()) << '\n'
            << "manipulability " << fmt(w) << '\n';
  return kExitOk;
}

struct IkArgs {
  ChainArgs chain;
  std::vector<double> position;
  std::vector<double> orientation;
  std::vector<double> target_q;
  double tol = 1e-6;
  int max_iter = 200;
};

int run_ik(const Globals& g, const IkArgs& a) {
  const auto model = load(g);
  const auto& chain = model.chain(a.chain.chain);
  Pose target;
  if (!a.target_q.empty()) {
    if (!a.position.empty() || !a.orientation.empty())
      throw UsageError("use either --target-q or --position/--orientation");
    target = forward_kinematics(chain, require_q(chain, a.target_q, "target-q"));
  } else {
    if (a.position.size() != 3 || a.orientation.size() != 4)
      throw UsageError("ik needs --position x,y,z and --orientation w,x,y,z (or --target-q)");
    target.position = vec3(a.position, "position");
    target.orientation = Eigen::Quaterniond(a.orientation[0], a.orientation[1], a.orientation[2], a.orientation[3]);
    if (!(target.orientation.norm() > 0.0)) throw UsageError("--orientation must be a non-zero quaternion");
    target.orientation.normalize();
  }
  const JointVector q0 = require_q(chain, a.chain.q, "q");
  const auto r = inverse_kinematics(chain, target, q0, a.tol, a.max_iter);
  if (g.json) {
    print_json(to_json(r));
  } else {
    std::cout << "q " << fmt(r.q) << '\n'
              << "converged " << (r.converged ? "yes" : "no") << '\n'
              << "iterations " << r.iterations << '\n'
              << "position_error " << fmt(r.position_error) << '\n'
              << "orientation_error " << fmt(r.orientation_error) << '\n';
  }
  return r.converged ? kExitOk : kExitAnalysis;
}

struct DynArgs {
  ChainArgs chain;
  std::vector<double> qd, qdd, force, torque;
  double gravity = kStandardGravity;
  bool mass_matrix = false;
};

int run_dynamics(const Globals& g, const DynArgs& a) {
  const auto model = load(g);
  const auto& chain = model.chain(a.chain.chain);
  DynState s{require_q(chain, a.chain.q, "q"), require_q(chain, a.qd, "qd"), require_q(chain, a.qdd, "qdd")};
  const ExternalWrench w{vec3(a.force, "force"), vec3(a.torque, "torque")};
  const Eigen::Vector3d grav(0.0, 0.0, -a.gravity);
  const JointVector tau = inverse_dynamics(chain, s, w, grav);
  if (g.json) {
    Json j{{"tau", to_json(tau)}};
    if (a.mass_matrix) j["mass_matrix"] = to_json(mass_matrix(chain, s.q));
    print_json(j);
    return kExitOk;
  }
  std::cout << "tau " << fmt(tau) << '\n';
  if (a.mass_matrix) {
    const auto m = mass_matrix(chain, s.q);
    for (Eigen::Index r = 0; r < m.rows(); ++r) std::cout << "M" << r + 1 << ' ' << fmt(Eigen::VectorXd(m.row(r).transpose())) << '\n';
  }
  return kExitOk;
}

struct EnergyArgs {
  std::string log;
  double eta = kDefaultEfficiency;
};

int run_energy(const Globals& g, const EnergyArgs& a) {
  if (!(a.eta > 0.0 && a.eta <= 1.0)) throw UsageError("--eta must be in (0, 1]");
  const auto e = energy_consumption(load_trajectory(a.log), a.eta);
  if (g.json) {
    print_json(to_json(e));
    return kExitOk;
  }
  std::cout << "energy_signed_J " << fmt(e.total_signed) << '\n' << "energy_positive_J " << fmt(e.total_positive_clamped) << '\n';
  for (std::size_t i = 0; i < e.per_joint_signed.size(); ++i)
    std::cout << "joint" << i + 1 << "_signed_J " << fmt(e.per_joint_signed[i]) << '\n';
  return kExitOk;
}

struct RewardArgs {
  std::string log;
  std::string refs;
  std::string config;
  unsigned workers = 1;
};

int run_rewards(const Globals& g, const RewardArgs& a) {
  const RewardConfig cfg = a.config.empty() ? RewardConfig{} : load_reward_config(a.config);
  const auto log = load_trajectory(a.log);
  const auto refs = references_from_csv(read_csv(a.refs), cfg.g, a.refs);
  const auto r = reward_replay(log, refs, cfg, a.workers);
  {
    auto f = open_out(out_path(g, "rewards.csv"));
    write_reward_steps(f, r);
  }
  if (g.json) {
    print_json(to_json(r));
    return kExitOk;
  }
  std::cout << "rows " << r.steps.size() << '\n'
            << "sum_centrifugal " << fmt(r.sum_centrifugal) << '\n'
            << "sum_mimic " << fmt(r.sum_mimic) << '\n'
            << "sum_balance " << fmt(r.sum_balance) << '\n'
            << "sum_contact " << fmt(r.sum_contact) << '\n'
            << "sum_total " << fmt(r.sum_total) << '\n';
  return kExitOk;
}

struct PlanArgs {
  std::string direction = "foot-to-wheel";
  double duration = 1.0;
  double dt = 0.01;
  double split = 0.5;
};

int run_plan(const Globals& g, const PlanArgs& a) {
  const auto dir = parse_direction(a.direction);
  if (!dir) throw UsageError("--direction must be foot-to-wheel or wheel-to-foot");
  const auto model = load(g);
  PlannerOptions opts;
  opts.leg_split = a.split;
  const auto plan = precompute_trajectory(model, *dir, a.duration, a.dt, opts);
  const auto file = out_path(g, std::string("plan_") + to_string(*dir) + ".csv");
  {
    auto f = open_out(file);
    write_plan(f, plan);
  }
  const auto& leg = model.chain(opts.chain);
  const double h0 = plan_body_height(leg, plan.samples.front().q);
  const double h1 = plan_body_height(leg, plan.samples.back().q);
  const JointVector peak = plan_peak_velocity(plan);
  if (g.json) {
    print_json(Json{{"direction", to_string(*dir)},
                    {"duration_s", plan.duration},
                    {"samples", plan.samples.size()},
                    {"file", file.string()},
                    {"body_height_start_m", h0},
                    {"body_height_end_m", h1},
                    {"peak_velocity_rad_s", to_json(peak)}});
    return kExitOk;
  }
  std::cout << "direction " << to_string(*dir) << '\n'
            << "samples " << plan.samples.size() << '\n'
            << "file " << file.string() << '\n'
            << "body_height_start_m " << fmt(h0) << '\n'
            << "body_height_end_m " << fmt(h1) << '\n'
            << "peak_velocity_rad_s " << fmt(peak) << '\n';
  return kExitOk;
}

struct TurnArgs {
  double v = 1.0;
  double omega = 0.5;
  double duration = 10.0;
  double dt = 1e-3;
  TurnParams params;
  bool grid = false;
};

int run_turn(const Globals& g, const TurnArgs& a) {
  if (!(a.dt > 0.0) || a.dt >= kMaxTurnDt) throw UsageError("--dt must be in (0, 0.1) s");
  if (a.grid) {
    Json rows = Json::array();
    if (!g.json) std::cout << std::left << std::setw(8) << "v" << std::setw(8) << "omega" << std::setw(24) << "theta_sim"
                           << std::setw(24) << "theta_des" << "abs_error\n";
    for (double v : {0.5, 1.0, 2.0})
      for (double w : {0.25, 0.5, 1.0}) {
        const double sim = steady_lean(a.params, {v, w}, a.duration, a.dt);
        const double des = desired_tilt(v, w, a.params.g);
        rows.push_back({{"v", v}, {"omega", w}, {"theta_sim", sim}, {"theta_des", des}, {"abs_error", std::abs(sim - des)}});
        if (!g.json)
          std::cout << std::left << std::setw(8) << fmt(v) << std::setw(8) << fmt(w) << std::setw(24) << fmt(sim)
                    << std::setw(24) << fmt(des) << fmt(std::abs(sim - des)) << '\n';
      }
    if (g.json) print_json(Json{{"grid", rows}});
    return kExitOk;
  }
  const auto samples = simulate(TurnState{}, a.params, {a.v, a.omega}, a.duration, a.dt);
  const auto file = out_path(g, "turn.csv");
  {
    auto f = open_out(file);
    write_turn_csv(f, samples);
  }
  const double sim = samples.back().state.theta;
  const double des = desired_tilt(a.v, a.omega, a.params.g);
  if (g.json) {
    print_json(Json{{"theta_final", sim}, {"theta_des", des}, {"residual_final", samples.back().residual},
                    {"file", file.string()}});
    return kExitOk;
  }
  std::cout << "theta_final " << fmt(sim) << '\n' << "theta_des " << fmt(des) << '\n'
            << "residual_final " << fmt(samples.back().residual) << '\n' << "file " << file.string() << '\n';
  return kExitOk;
}

int run_export(const Globals& g, const std::string& path) {
  const auto model = load(g);
  const std::string header =
      "Leg morphology model: two leg chains, actuator catalog and mode postures.\n"
      "ASSUMED: geometry, joint limits, masses and postures are not published hardware values.\n"
      "Actuator entries carry the published catalog values except HUB, which is assumed.";
  if (path.empty() || path == "-") {
    std::cout << format_model(model, header);
    return kExitOk;
  }
  save_model(model, path, header);
  return kExitOk;
}

void add_q(CLI::App* sub, ChainArgs& a) {
  sub->add_option("--chain", a.chain, "Chain id")->capture_default_str();
  sub->add_option("--q", a.q, "Joint values (rad), comma separated; default zero")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leg morphology toolkit: workspace, kinematics, dynamics, energy, rewards, transformation, turning"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--model", g.model, "Model file, or 'builtin'")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for sampling (non-negative integer)")->capture_default_str();
  app.add_option("--out", g.out, "Output directory for written files")->capture_default_str();
  app.add_flag("--json", g.json, "Machine-readable stdout");

  WorkspaceArgs ws;
  auto* c_ws = app.add_subcommand("workspace-compare", "Monte Carlo workspace and manipulability comparison");
  c_ws->add_option("--chain-a", ws.chain_a)->capture_default_str();
  c_ws->add_option("--chain-b", ws.chain_b)->capture_default_str();
  c_ws->add_option("--samples", ws.samples)->capture_default_str();
  c_ws->add_option("--voxel", ws.voxel, "Voxel edge (m)")->capture_default_str();
  c_ws->add_option("--radius", ws.radius, "Match radius (m)")->capture_default_str();
  c_ws->add_option("--workers", ws.workers, "Threads; 0 = hardware concurrency")->capture_default_str();
  c_ws->add_flag("--full-jacobian", ws.full, "Use the 6xn Jacobian for manipulability");
  c_ws->add_flag("!--no-clouds", ws.clouds, "Skip the point-cloud CSV files");

  ChainArgs fk;
  auto* c_fk = app.add_subcommand("fk", "Forward kinematics");
  add_q(c_fk, fk);

  IkArgs ik;
  auto* c_ik = app.add_subcommand("ik", "Damped least-squares inverse kinematics (full pose)");
  add_q(c_ik, ik.chain);
  c_ik->add_option("--position", ik.position, "Target x,y,z (m)")->delimiter(',');
  c_ik->add_option("--orientation", ik.orientation, "Target quaternion w,x,y,z")->delimiter(',');
  c_ik->add_option("--target-q", ik.target_q, "Take the target pose from FK of these joints")->delimiter(',');
  c_ik->add_option("--tol", ik.tol)->capture_default_str();
  c_ik->add_option("--max-iter", ik.max_iter)->capture_default_str();

  DynArgs dyn;
  auto* c_dyn = app.add_subcommand("dynamics", "Inverse dynamics (recursive Newton-Euler)");
  add_q(c_dyn, dyn.chain);
  c_dyn->add_option("--qd", dyn.qd)->delimiter(',');
  c_dyn->add_option("--qdd", dyn.qdd)->delimiter(',');
  c_dyn->add_option("--force", dyn.force, "External force at the end effector, base axes (N)")->delimiter(',');
  c_dyn->add_option("--torque", dyn.torque, "External torque, base axes (Nm)")->delimiter(',');
  c_dyn->add_option("--gravity", dyn.gravity, "Gravity magnitude along -z (m/s^2)")->capture_default_str();
  c_dyn->add_flag("--mass-matrix", dyn.mass_matrix);

  EnergyArgs en;
  auto* c_en = app.add_subcommand("energy", "Energy consumption of a joint trajectory log");
  c_en->add_option("--log", en.log, "CSV t,q1..qn,qd1..qdn,tau1..taun")->required();
  c_en->add_option("--eta", en.eta, "Transmission efficiency")->capture_default_str();

  RewardArgs rw;
  auto* c_rw = app.add_subcommand("rewards-eval", "Replay reward terms over a log");
  c_rw->add_option("--log", rw.log, "Trajectory CSV")->required();
  c_rw->add_option("--refs", rw.refs, "Reference stream CSV")->required();
  c_rw->add_option("--config", rw.config, "Reward config file ([rewards] section)");
  c_rw->add_option("--workers", rw.workers)->capture_default_str();

  PlanArgs pl;
  auto* c_pl = app.add_subcommand("transform-plan", "Precompute a mode transformation trajectory");
  c_pl->add_option("--direction", pl.direction, "foot-to-wheel or wheel-to-foot")->capture_default_str();
  c_pl->add_option("--duration", pl.duration, "s")->capture_default_str();
  c_pl->add_option("--dt", pl.dt, "s")->capture_default_str();
  c_pl->add_option("--split", pl.split, "Phase where the second leg starts (wheel-to-foot)")->capture_default_str();

  TurnArgs tn;
  auto* c_tn = app.add_subcommand("turn-sim", "Lean dynamics during a steady turn");
  c_tn->add_option("--v", tn.v, "Forward speed command (m/s)")->capture_default_str();
  c_tn->add_option("--omega", tn.omega, "Yaw rate command (rad/s)")->capture_default_str();
  c_tn->add_option("--duration", tn.duration, "s")->capture_default_str();
  c_tn->add_option("--dt", tn.dt, "s")->capture_default_str();
  c_tn->add_option("--height", tn.params.com_height, "CoM height (m)")->capture_default_str();
  c_tn->add_option("--gravity", tn.params.g, "m/s^2")->capture_default_str();
  c_tn->add_option("--damping", tn.params.lean_damping, "Lean damping (1/s)")->capture_default_str();
  c_tn->add_option("--tracking-rate", tn.params.tracking_rate, "1/s")->capture_default_str();
  c_tn->add_flag("--grid", tn.grid, "Run v in {0.5,1,2} x omega in {0.25,0.5,1}");

  std::string export_path;
  auto* c_ex = app.add_subcommand("export-model", "Write the loaded model in model-file format");
  c_ex->add_option("--path", export_path, "Destination file; '-' or empty for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_ws) return run_workspace(g, ws);
    if (*c_fk) return run_fk(g, fk);
    if (*c_ik) return run_ik(g, ik);
    if (*c_dyn) return run_dynamics(g, dyn);
    if (*c_en) return run_energy(g, en);
    if (*c_rw) return run_rewards(g, rw);
    if (*c_pl) return run_plan(g, pl);
    if (*c_tn) return run_turn(g, tn);
    if (*c_ex) return run_export(g, export_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitModel;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
  return kExitUsage;
}

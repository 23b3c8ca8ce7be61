// hydrarm: identification toolkit for a hydraulically driven 6-DOF arm.
// Subcommands mirror the pipeline stages: simulate-cylinder, identify-friction,
// design-trajectory, identify-dynamics, report.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hydrarm/base_reduction.hpp"
#include "hydrarm/csv.hpp"
#include "hydrarm/dynamics.hpp"
#include "hydrarm/excitation.hpp"
#include "hydrarm/friction_ident.hpp"
#include "hydrarm/hydraulic.hpp"
#include "hydrarm/model.hpp"
#include "hydrarm/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hydrarm;

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("HYDRARM_DATA_DIR")) return env;
  return "hydrarm_out";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

RobotModel load_model_arg(const std::string& model_path) {
  if (model_path.empty()) return default_model();
  return load_model(read_file(model_path));
}

// Optional run config: cylinder parameter sets, excitation tones, noise levels.
struct CylinderSetup {
  std::array<CylinderParams, kNumJoints> cylinders;
  ExcitationSpec excitation = default_identification_excitation();
  NoiseSpec noise;
  double p_base = 1e5;
  std::string fingerprint;

  CylinderSetup() {
    for (int j = 0; j < kNumJoints; ++j) cylinders[j] = default_cylinder_params(j);
  }
};

CylinderSetup load_cylinder_setup(const std::string& config_path) {
  CylinderSetup setup;
  std::string canonical = "defaults";
  if (!config_path.empty()) {
    const std::string text = read_file(config_path);
    canonical = text;
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw std::runtime_error(std::string("run config: ") + e.what());
    }
    if (doc.contains("noise")) {
      const auto& n = doc["noise"];
      setup.noise.sigma_x = n.value("x", setup.noise.sigma_x);
      setup.noise.sigma_dx = n.value("dx", setup.noise.sigma_dx);
      setup.noise.sigma_ddx = n.value("ddx", setup.noise.sigma_ddx);
      setup.noise.sigma_p = n.value("p", setup.noise.sigma_p);
      setup.noise.sigma_force = n.value("F", setup.noise.sigma_force);
    }
    if (doc.contains("excitation")) {
      setup.excitation.tones.clear();
      for (const auto& tone : doc["excitation"]) {
        setup.excitation.tones.push_back({tone.at("amplitude").get<double>(),
                                          tone.at("omega").get<double>(),
                                          tone.value("phase", 0.0)});
      }
    }
    if (doc.contains("cylinders")) {
      const auto& cyl = doc["cylinders"];
      if (cyl.size() != kNumJoints) throw std::runtime_error("run config: need 6 cylinder entries");
      for (int j = 0; j < kNumJoints; ++j) {
        CylinderParams& p = setup.cylinders[j];
        const auto& c = cyl.at(j);
        p.piston_mass = c.value("mass", p.piston_mass);
        p.damping = c.value("damping", p.damping);
        p.stiffness = c.value("stiffness", p.stiffness);
        p.area_head = c.value("area_head", p.area_head);
        p.area_rod = c.value("area_rod", p.area_rod);
        if (c.contains("f_c")) {
          p.friction = FrictionParams{c.at("f_c").get<double>(), c.at("f_v").get<double>(),
                                      c.at("f_s").get<double>()};
        }
      }
    }
    setup.p_base = doc.value("p_base", setup.p_base);
  }
  setup.fingerprint = fingerprint(canonical);
  return setup;
}

std::string cylinder_csv_path(const std::string& out, int joint) {
  return out + "/cylinder_" + std::to_string(joint + 1) + ".csv";
}

int cmd_simulate_cylinder(const std::string& out, std::uint64_t seed, double noise_scale,
                          double rate, double periods, const std::string& config_path) {
  const CylinderSetup setup = load_cylinder_setup(config_path);
  fs::create_directories(out);

  CylinderSimConfig sim;
  sim.duration = periods * setup.excitation.base_period();
  sim.dt = 1.0 / rate;
  sim.noise = setup.noise.scaled(noise_scale);
  sim.p_base = setup.p_base;

  for (int j = 0; j < kNumJoints; ++j) {
    sim.seed = seed * 1000 + j;
    const auto result = simulate_cylinder(setup.cylinders[j], setup.excitation, sim);
    if (result.clamped_pressure_samples > 0) {
      std::cerr << "warning: joint " << j + 1 << ": " << result.clamped_pressure_samples
                << " samples clamped at zero chamber pressure\n";
    }
    const std::vector<std::string> comments = {
        "hydrarm simulate-cylinder joint=" + std::to_string(j + 1),
        "units: t[s] x[m] dx[m/s] ddx[m/s^2] p1[Pa] p2[Pa] F[N]",
        "seed=" + std::to_string(seed) + " rate_hz=" + format_double(rate) +
            " periods=" + format_double(periods) + " noise_scale=" + format_double(noise_scale),
        "config=" + setup.fingerprint};
    write_records_csv(cylinder_csv_path(out, j), result.records, comments);
  }
  std::cout << "wrote " << kNumJoints << " cylinder record files under " << out << "\n";
  return 0;
}

json friction_result_json(const FrictionIdResult& id) {
  return json{{"m", id.mass},
              {"K", id.stiffness},
              {"f_c", id.friction.f_c},
              {"f_v", id.friction.f_v},
              {"f_s", id.friction.f_s}};
}

int cmd_identify_friction(const std::string& out, const std::string& data_dir,
                          const std::string& estimator, bool estimate_mass,
                          const std::string& config_path) {
  const CylinderSetup setup = load_cylinder_setup(config_path);
  const std::string source = data_dir.empty() ? out : data_dir;
  fs::create_directories(out);

  json doc;
  doc["estimator"] = estimator;
  doc["mass_fixed"] = !estimate_mass;
  doc["config"] = setup.fingerprint;
  auto joints = json::array();

  for (int j = 0; j < kNumJoints; ++j) {
    const std::string path = cylinder_csv_path(source, j);
    if (!fs::exists(path)) {
      throw std::runtime_error("missing cylinder records: " + path +
                               " (run simulate-cylinder first)");
    }
    const auto records = read_records_csv(path);
    if (records.empty()) throw std::runtime_error("no samples in " + path);

    const CylinderParams& params = setup.cylinders[j];
    std::optional<double> fix_mass;
    if (!estimate_mass) fix_mass = params.piston_mass;
    const auto samples = build_samples(records, params, fix_mass);

    json entry;
    entry["joint"] = j + 1;
    entry["samples_used"] = samples.size();

    const BatchLsResult batch = batch_ls(samples);
    const FrictionIdResult batch_id = extract_friction(batch.theta, fix_mass);
    entry["batch"] = friction_result_json(batch_id);
    entry["residual_rms"] = batch.residual_rms;
    entry["covariance_diag"] = std::vector<double>(
        batch.covariance_diag.data(), batch.covariance_diag.data() + batch.covariance_diag.size());
    entry["warnings"] = batch.warnings;

    RlsState state = RlsState::diffuse(static_cast<int>(samples.front().lambda.size()));
    for (const auto& s : samples) state = rls_update(state, s);
    const FrictionIdResult rls_id = extract_friction(state.alpha, fix_mass);
    entry["rls"] = friction_result_json(rls_id);

    const FrictionIdResult& chosen = estimator == "rls" ? rls_id : batch_id;
    entry["theta"] = friction_result_json(chosen);
    joints.push_back(std::move(entry));

    // curve export over a symmetric velocity grid
    std::vector<double> grid;
    for (double v = -0.3; v <= 0.3001; v += 0.005) grid.push_back(v);
    const auto curve = stribeck_curve(chosen.friction, grid);
    std::vector<std::vector<double>> rows;
    rows.reserve(curve.size());
    for (const auto& [v, f] : curve) rows.push_back({v, f});
    write_csv(out + "/friction_curve_" + std::to_string(j + 1) + ".csv",
              {"hydrarm identify-friction joint=" + std::to_string(j + 1),
               "units: v[m/s] F_d[N]", "config=" + setup.fingerprint},
              {"v", "F_d"}, rows);
  }

  doc["joints"] = std::move(joints);
  write_file(out + "/friction.json", doc.dump(2));
  std::cout << "identified friction for " << kNumJoints << " cylinders -> " << out
            << "/friction.json\n";
  return 0;
}

int cmd_design_trajectory(const std::string& out, const std::string& model_path,
                          std::uint64_t seed, int n_harmonics, double omega, int budget,
                          int n_samples, bool strict, const std::string& preset) {
  const RobotModel model = load_model_arg(model_path);
  fs::create_directories(out);
  const BaseParamMapping mapping = compute_base_mapping(sample_regressors(model, 200, 42));
  write_file(out + "/mapping.json", mapping_to_json(mapping));

  FourierTrajectory traj;
  ConstraintReport report;
  double kappa = 0.0;

  if (!preset.empty()) {
    if (preset != "table3") throw std::runtime_error("unknown preset: " + preset);
    traj = table3_preset();
    report = check_constraints(traj, model.limits, 1e-3);
    kappa = condition_number(model, mapping, traj, n_samples).kappa;
    std::cout << "preset table3: feasible=" << (report.feasible ? "yes" : "no") << " ("
              << report.violations.size() << " violations), kappa=" << format_double(kappa) << "\n";
  } else {
    TrajectoryOptions options;
    options.n_harmonics = n_harmonics;
    options.omega_f = omega;
    options.seed = seed;
    options.budget = budget;
    options.n_samples = n_samples;
    options.strict_zero_position = strict;
    const OptimizedTrajectory result = optimize_trajectory(model, mapping, model.limits, options);
    traj = result.trajectory;
    report = result.report;
    kappa = result.kappa;
    std::cout << "free parameters: " << result.params_pre_elimination
              << " before boundary elimination\n";
    std::cout << "optimized kappa " << format_double(result.kappa) << " over "
              << result.evaluations << " evaluations; feasible="
              << (report.feasible ? "yes" : "no") << "\n";
    if (!report.feasible) throw std::runtime_error("optimizer returned an infeasible trajectory");
  }

  for (const auto& v : report.violations) {
    std::cout << "  violation joint " << v.joint << " " << to_string(v.kind) << " worst "
              << format_double(v.worst) << " bound " << format_double(v.bound) << "\n";
  }

  write_file(out + "/trajectory.json", trajectory_to_json(traj));
  write_trajectory_profile_csv(out + "/trajectory_profile.csv", traj, 0.02,
                               {"hydrarm design-trajectory seed=" + std::to_string(seed),
                                "units: t[s] q[rad] dq[rad/s] ddq[rad/s^2]",
                                "kappa=" + format_double(kappa)});
  std::cout << "wrote " << out << "/trajectory.json\n";
  return 0;
}

std::array<FrictionParams, kNumJoints> load_friction_results(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("friction results: " + std::string(e.what()));
  }
  std::array<FrictionParams, kNumJoints> friction{};
  const auto& joints = doc.at("joints");
  if (joints.size() != kNumJoints) throw std::runtime_error("friction results: need 6 joints");
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& theta = joints.at(j).at("theta");
    friction[j] = FrictionParams{theta.at("f_c").get<double>(), theta.at("f_v").get<double>(),
                                 theta.at("f_s").get<double>()};
  }
  return friction;
}

int cmd_identify_dynamics(const std::string& out, const std::string& model_path,
                          std::uint64_t seed, bool simulate, double noise, double rate,
                          std::string trajectory_path, const std::string& dataset_path,
                          const std::string& friction_path, bool skip_friction) {
  using Clock = std::chrono::steady_clock;
  auto stage_start = Clock::now();
  std::map<std::string, double> stage_ms;
  auto mark = [&](const char* stage) {
    stage_ms[stage] = std::chrono::duration<double, std::milli>(Clock::now() - stage_start).count();
    stage_start = Clock::now();
  };

  const RobotModel model = load_model_arg(model_path);
  fs::create_directories(out);

  if (trajectory_path.empty()) trajectory_path = out + "/trajectory.json";
  if (!fs::exists(trajectory_path)) {
    throw std::runtime_error("trajectory file not found: " + trajectory_path +
                             " (run design-trajectory, or pass --trajectory)");
  }
  const FourierTrajectory traj = trajectory_from_json(read_file(trajectory_path));

  std::array<FrictionParams, kNumJoints> friction{};
  if (!skip_friction) {
    const std::string fpath = friction_path.empty() ? out + "/friction.json" : friction_path;
    if (!fs::exists(fpath)) {
      throw std::runtime_error("friction results not found: " + fpath +
                               " (run identify-friction, or pass --skip-friction)");
    }
    friction = load_friction_results(fpath);
  }

  const BaseParamMapping mapping = compute_base_mapping(sample_regressors(model, 200, 42));
  write_file(out + "/mapping.json", mapping_to_json(mapping));
  mark("reduction");

  IdentificationDataset ds;
  if (simulate) {
    ds = simulate_arm_run(model, testbed_ground_truth(), traj, rate, noise, seed);
    ds.trajectory_ref = trajectory_path;
    write_dataset_csv(out + "/dataset.csv", ds,
                      {"hydrarm identify-dynamics --simulate seed=" + std::to_string(seed),
                       "units: t[s] q[rad] dq[rad/s] ddq[rad/s^2] tau[N*m]",
                       "noise_sigma=" + format_double(noise)});
  } else {
    if (dataset_path.empty()) {
      throw std::runtime_error("need --simulate or --dataset <csv>");
    }
    ds = read_dataset_csv(dataset_path);
    ds.trajectory_ref = trajectory_path;
  }

  mark("dataset");

  // friction substitution keeps H purely inertial
  IdentificationDataset corrected = ds;
  if (!skip_friction) {
    for (size_t k = 0; k < corrected.torques.size(); ++k) {
      for (int i = 0; i < kNumJoints; ++i) {
        corrected.torques[k][i] -= friction_torque(friction[i], corrected.states[k].dq[i]);
      }
    }
  }
  const auto [h, gamma] = assemble_system(mapping, model, corrected);
  const LsSolution sol = solve_ls(h, gamma, mapping.labels);
  mark("solve");

  std::vector<TorqueVector> predicted = predict_torques(mapping, model, sol.beta, ds.states);
  if (!skip_friction) {
    for (size_t k = 0; k < predicted.size(); ++k) {
      for (int i = 0; i < kNumJoints; ++i) {
        predicted[k][i] += friction_torque(friction[i], ds.states[k].dq[i]);
      }
    }
  }

  IdentificationReport report;
  report.beta = sol.beta;
  report.labels = mapping.labels;
  report.kappa = sol.kappa;
  report.rank = mapping.rank;
  report.samples = static_cast<int>(ds.states.size());
  report.friction = friction;
  report.friction_applied = !skip_friction;
  for (int i = 0; i < kNumJoints; ++i) {
    report.rsd_ratio[i] = rsd(predicted, ds.torques, i);
    double acc = 0.0;
    for (size_t k = 0; k < predicted.size(); ++k) {
      const double r = predicted[k][i] - ds.torques[k][i];
      acc += r * r;
    }
    report.residual_rms[i] = std::sqrt(acc / predicted.size());
  }

  mark("validate");
  report.stage_ms = stage_ms;

  // timings stay on stdout so repeated runs write byte-identical files
  std::cout << "stage timings [ms]:";
  for (const auto& [stage, ms] : stage_ms) std::cout << " " << stage << "=" << format_double(ms);
  std::cout << "\n";

  write_file(out + "/identification.json", report_to_json(report));
  for (int i = 0; i < kNumJoints; ++i) {
    std::vector<std::vector<double>> rows;
    rows.reserve(predicted.size());
    for (size_t k = 0; k < predicted.size(); ++k) {
      rows.push_back({ds.states[k].t, ds.torques[k][i], predicted[k][i]});
    }
    write_csv(out + "/residual_" + std::to_string(i + 1) + ".csv",
              {"hydrarm identify-dynamics joint=" + std::to_string(i + 1),
               "units: t[s] tau[N*m]"},
              {"t", "tau_measured", "tau_predicted"}, rows);
  }

  std::cout << "rank " << report.rank << ", kappa(H) " << format_double(report.kappa)
            << ", samples " << report.samples << "\n";
  std::cout << "joint   rsd_ratio   residual_rms[N*m]\n";
  for (int i = 0; i < kNumJoints; ++i) {
    std::cout << "  " << i + 1 << "     " << format_double(report.rsd_ratio[i]) << "   "
              << format_double(report.residual_rms[i]) << "\n";
  }
  std::cout << "wrote " << out << "/identification.json\n";
  return 0;
}

int cmd_report(const std::string& out) {
  const std::string friction_path = out + "/friction.json";
  const std::string mapping_path = out + "/mapping.json";
  const std::string ident_path = out + "/identification.json";

  const bool has_friction = fs::exists(friction_path);
  const bool has_mapping = fs::exists(mapping_path);
  const bool has_ident = fs::exists(ident_path);
  if (!has_friction && !has_mapping && !has_ident) {
    throw std::runtime_error("nothing to report under " + out +
                             ": missing friction.json, mapping.json and identification.json");
  }

  std::ostringstream md;
  md << "# hydrarm identification summary\n\n";

  if (has_friction) {
    const json doc = json::parse(read_file(friction_path));
    md << "## Cylinder friction (" << doc.value("estimator", "?") << " estimator)\n\n";
    md << "| joint | f_c [N] | f_v [N.s/m] | f_s | residual rms [N] |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& j : doc.at("joints")) {
      const auto& t = j.at("theta");
      md << "| " << j.at("joint") << " | " << format_double(t.at("f_c").get<double>()) << " | "
         << format_double(t.at("f_v").get<double>()) << " | "
         << format_double(t.at("f_s").get<double>()) << " | "
         << format_double(j.at("residual_rms").get<double>()) << " |\n";
    }
    md << "\n";
  } else {
    md << "## Cylinder friction\n\nmissing (identify-friction has not run)\n\n";
  }

  if (has_mapping) {
    const BaseParamMapping mapping = mapping_from_json(read_file(mapping_path));
    md << "## Base parameter set\n\n";
    md << "rank " << mapping.rank << ", tolerance " << format_double(mapping.tolerance)
       << ", rank_stable " << (mapping.rank_stable ? "yes" : "no") << "\n\n";
  } else {
    md << "## Base parameter set\n\nmissing (no mapping.json)\n\n";
  }

  if (has_ident) {
    const json doc = json::parse(read_file(ident_path));
    md << "## Identified base parameters\n\n";
    md << "| # | parameter | value |\n|---|---|---|\n";
    int row = 1;
    std::vector<std::vector<double>> beta_rows;
    for (const auto& b : doc.at("beta")) {
      md << "| " << row << " | " << b.at("label").get<std::string>() << " | "
         << format_double(b.at("value").get<double>()) << " |\n";
      beta_rows.push_back({static_cast<double>(row), b.at("value").get<double>()});
      ++row;
    }
    md << "\n## Validation\n\n";
    md << "condition number kappa(H) = " << format_double(doc.at("condition_number").get<double>())
       << ", samples = " << doc.at("samples") << "\n\n";
    md << "| joint | rsd ratio | residual rms [N*m] |\n|---|---|---|\n";
    const auto& ratio = doc.at("rsd_ratio");
    const auto& rms = doc.at("residual_rms_nm");
    for (int i = 0; i < kNumJoints; ++i) {
      md << "| " << i + 1 << " | " << format_double(ratio.at(i).get<double>()) << " | "
         << format_double(rms.at(i).get<double>()) << " |\n";
    }
    md << "\nThe residual rms column is the figure comparable to reported joint torque errors;\n";
    md << "the rsd ratio column is the dimensionless residual-to-prediction ratio.\n";

    write_csv(out + "/beta_summary.csv", {"hydrarm report"}, {"index", "value"}, beta_rows);
  } else {
    md << "## Identified base parameters\n\nmissing (identify-dynamics has not run)\n\n";
  }

  write_file(out + "/report.md", md.str());
  std::cout << "wrote " << out << "/report.md\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamics-parameter identification toolkit for a hydraulic 6-DOF arm"};
  app.require_subcommand(1);

  std::string out = default_out_dir();
  std::string model_path;
  std::string config_path;
  std::uint64_t seed = 1;
  app.add_option("--out", out, "output directory (default $HYDRARM_DATA_DIR or ./hydrarm_out)");
  app.add_option("--model", model_path, "model config JSON (default: built-in arm description)");
  app.add_option("--seed", seed, "seed for every random draw in the command");
  app.add_option("--config", config_path, "run config JSON (cylinder parameters, noise)");

  auto* sim = app.add_subcommand("simulate-cylinder", "generate hydraulic cylinder records");
  double sim_noise_scale = 1.0;
  double sim_rate = 50.0;
  double sim_periods = 3.0;
  sim->add_option("--noise", sim_noise_scale, "noise scale factor (0 = noiseless)");
  sim->add_option("--rate", sim_rate, "sampling rate, Hz")->check(CLI::PositiveNumber);
  sim->add_option("--periods", sim_periods, "excitation periods to record")->check(CLI::PositiveNumber);

  auto* fid = app.add_subcommand("identify-friction", "fit cylinder friction from records");
  std::string fid_data;
  std::string fid_estimator = "batch";
  bool fid_estimate_mass = false;
  fid->add_option("--data", fid_data, "directory holding cylinder_<j>.csv (default: --out)");
  fid->add_option("--estimator", fid_estimator, "batch | rls (both are always written)")
      ->check(CLI::IsMember({"batch", "rls"}));
  fid->add_flag("--estimate-mass", fid_estimate_mass, "estimate the piston mass too");

  auto* des = app.add_subcommand("design-trajectory", "search Fourier excitation coefficients");
  int des_nh = 3;
  double des_omega = 0.1 * std::numbers::pi;
  int des_budget = 600;
  int des_samples = 100;
  bool des_strict = false;
  std::string des_preset;
  des->add_option("--nH", des_nh, "harmonic count")->check(CLI::Range(2, 12));
  des->add_option("--omega", des_omega, "base angular frequency, rad/s")->check(CLI::PositiveNumber);
  des->add_option("--budget", des_budget, "objective evaluations")->check(CLI::PositiveNumber);
  des->add_option("--samples", des_samples, "stacking samples per condition-number evaluation");
  des->add_flag("--strict-boundary", des_strict, "force q(t0) = 0 instead of q(t0) = offset");
  des->add_option("--preset", des_preset, "load a named coefficient preset (table3)");

  auto* idn = app.add_subcommand("identify-dynamics", "estimate base inertial parameters");
  bool idn_simulate = false;
  double idn_noise = 0.1;
  double idn_rate = 50.0;
  std::string idn_traj;
  std::string idn_dataset;
  std::string idn_friction;
  bool idn_skip_friction = false;
  idn->add_flag("--simulate", idn_simulate, "generate measurements from the built-in testbed");
  idn->add_option("--noise", idn_noise, "torque noise sigma, N*m (with --simulate)");
  idn->add_option("--rate", idn_rate, "sampling rate, Hz")->check(CLI::PositiveNumber);
  idn->add_option("--trajectory", idn_traj, "trajectory JSON (default: <out>/trajectory.json)");
  idn->add_option("--dataset", idn_dataset, "measured dataset CSV instead of --simulate");
  idn->add_option("--friction", idn_friction, "friction results JSON (default: <out>/friction.json)");
  idn->add_flag("--skip-friction", idn_skip_friction, "identify without the friction stage");

  auto* rep = app.add_subcommand("report", "consolidate stage outputs into report.md");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate_cylinder(out, seed, sim_noise_scale, sim_rate, sim_periods, config_path);
    }
    if (fid->parsed()) {
      return cmd_identify_friction(out, fid_data, fid_estimator, fid_estimate_mass, config_path);
    }
    if (des->parsed()) {
      return cmd_design_trajectory(out, model_path, seed, des_nh, des_omega, des_budget,
                                   des_samples, des_strict, des_preset);
    }
    if (idn->parsed()) {
      return cmd_identify_dynamics(out, model_path, seed, idn_simulate, idn_noise, idn_rate,
                                   idn_traj, idn_dataset, idn_friction, idn_skip_friction);
    }
    if (rep->parsed()) {
      return cmd_report(out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

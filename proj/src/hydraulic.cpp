#include "hydrarm/hydraulic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hydrarm/csv.hpp"

namespace hydrarm {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double ExcitationSpec::base_period() const {
  double omega_min = 0.0;
  for (const auto& tone : tones) {
    if (tone.omega > 0.0 && (omega_min == 0.0 || tone.omega < omega_min)) {
      omega_min = tone.omega;
    }
  }
  return omega_min > 0.0 ? 2.0 * std::numbers::pi / omega_min : 0.0;
}

void ExcitationSpec::eval(double t, double& x, double& dx, double& ddx) const {
  x = dx = ddx = 0.0;
  for (const auto& tone : tones) {
    const double arg = tone.omega * t + tone.phase;
    x += tone.amplitude * std::sin(arg);
    dx += tone.amplitude * tone.omega * std::cos(arg);
    ddx -= tone.amplitude * tone.omega * tone.omega * std::sin(arg);
  }
}

NoiseSpec NoiseSpec::scaled(double factor) const {
  NoiseSpec s = *this;
  s.sigma_x *= factor;
  s.sigma_dx *= factor;
  s.sigma_ddx *= factor;
  s.sigma_p *= factor;
  s.sigma_force *= factor;
  return s;
}

double stribeck_force(const StribeckFull& p, double v) {
  const double s = sgn(v);
  const double dip = (p.f_m - p.f_c) * std::exp(-std::pow(std::abs(v) / p.v_s, p.delta));
  return p.f_c * s + p.f_v * v + dip * s;
}

double linearized_stribeck(const FrictionParams& p, double v) {
  const double s = sgn(v);
  return p.f_c * s + p.f_v * v + p.f_s * s * std::cbrt(std::abs(v));
}

double cylinder_friction(const CylinderParams& params, double v) {
  if (const auto* lin = std::get_if<FrictionParams>(&params.friction)) {
    return linearized_stribeck(*lin, v);
  }
  return stribeck_force(std::get<StribeckFull>(params.friction), v);
}

std::pair<double, double> excitation_signal(double amplitude, double omega, double t) {
  if (!(amplitude > 0.0) || !(omega > 0.0)) {
    throw std::invalid_argument("excitation_signal: amplitude and omega must be positive");
  }
  return {amplitude * std::sin(omega * t), amplitude * omega * std::cos(omega * t)};
}

CylinderSimResult simulate_cylinder(const CylinderParams& params, const ExcitationSpec& excitation,
                                    const CylinderSimConfig& config) {
  if (!(config.dt > 0.0)) {
    throw std::invalid_argument("simulate_cylinder: dt must be positive");
  }
  if (params.area_head <= 0.0) {
    throw std::invalid_argument("simulate_cylinder: head-side area must be positive");
  }

  const int count = static_cast<int>(std::llround(config.duration / config.dt));
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  CylinderSimResult result;
  result.records.reserve(count);
  for (int k = 0; k < count; ++k) {
    CylinderRecord rec;
    rec.t = k * config.dt;
    excitation.eval(rec.t, rec.x, rec.dx, rec.ddx);
    rec.force = config.load ? config.load(rec.t) : 0.0;

    const double friction = cylinder_friction(params, rec.dx);
    // p1*A1 - p2*A2 = m*ddx + c*dx + K*x + F_d + F
    const double required = params.piston_mass * rec.ddx + params.damping * rec.dx +
                            params.stiffness * rec.x + friction + rec.force;
    rec.p2 = config.p_base;
    rec.p1 = (required + rec.p2 * params.area_rod) / params.area_head;
    if (rec.p1 < 0.0 || rec.p2 < 0.0) {
      rec.p1 = std::max(rec.p1, 0.0);
      rec.p2 = std::max(rec.p2, 0.0);
      ++result.clamped_pressure_samples;
    }

    // fixed draw order per sample keeps the stream aligned across noise configs
    rec.x += config.noise.sigma_x * normal(rng);
    rec.dx += config.noise.sigma_dx * normal(rng);
    rec.ddx += config.noise.sigma_ddx * normal(rng);
    rec.p1 += config.noise.sigma_p * normal(rng);
    rec.p2 += config.noise.sigma_p * normal(rng);
    rec.force += config.noise.sigma_force * normal(rng);
    result.records.push_back(rec);
  }
  return result;
}

void write_records_csv(const std::string& path, const std::vector<CylinderRecord>& records,
                       const std::vector<std::string>& comments) {
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({r.t, r.x, r.dx, r.ddx, r.p1, r.p2, r.force});
  }
  write_csv(path, comments, {"t", "x", "dx", "ddx", "p1", "p2", "F"}, rows);
}

std::vector<CylinderRecord> read_records_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected = {"t", "x", "dx", "ddx", "p1", "p2", "F"};
  if (table.columns != expected) {
    throw std::runtime_error("cylinder csv: unexpected header in " + path);
  }
  std::vector<CylinderRecord> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    records.push_back({row[0], row[1], row[2], row[3], row[4], row[5], row[6]});
  }
  return records;
}

FrictionParams planted_friction(int joint) {
  const auto& t = kFrictionTriples.at(joint);
  return FrictionParams{t[0], t[1], t[2]};
}

CylinderParams default_cylinder_params(int joint) {
  CylinderParams params;
  params.piston_mass = kPistonMasses.at(joint);
  params.damping = kDefaultDamping;
  params.stiffness = kDefaultStiffness;
  params.friction = planted_friction(joint);
  return params;
}

ExcitationSpec default_identification_excitation() {
  ExcitationSpec spec;
  spec.tones.push_back({0.025, 0.25, 0.0});
  spec.tones.push_back({0.02, 1.25, 0.0});
  spec.tones.push_back({0.03, 5.0, 0.0});
  spec.tones.push_back({0.02, 12.5, 0.0});
  return spec;
}

}  // namespace hydrarm

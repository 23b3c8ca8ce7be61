#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "hydrarm/model.hpp"

namespace hydrarm {

/// Full exponential Stribeck model (static level f_m, dip scale v_s, shape delta).
struct StribeckFull {
  double f_c = 0.0;
  double f_m = 0.0;
  double f_v = 0.0;
  double v_s = 0.01;
  double delta = 1.0;
};

struct CylinderParams {
  double piston_mass = 1.0;   // kg
  double damping = 2.0;       // c, N*s/m
  double stiffness = 0.0;     // K, N/m
  double area_head = 1.963e-3;  // A1, rodless side, m^2
  double area_rod = 1.374e-3;   // A2, rod side, m^2
  std::variant<FrictionParams, StribeckFull> friction;
};

struct CylinderRecord {
  double t = 0.0;
  double x = 0.0, dx = 0.0, ddx = 0.0;
  double p1 = 0.0, p2 = 0.0;  // Pa
  double force = 0.0;         // external load F, N
};

/// Displacement excitation as a sum of sine tones, x = sum A*sin(w*t + phi).
struct ExcitationSpec {
  struct Tone {
    double amplitude = 0.0;  // m
    double omega = 0.0;      // rad/s
    double phase = 0.0;
  };
  std::vector<Tone> tones;

  double base_period() const;
  void eval(double t, double& x, double& dx, double& ddx) const;
};

struct NoiseSpec {
  double sigma_x = 1e-5;    // m
  double sigma_dx = 0.0;    // m/s
  double sigma_ddx = 0.0;   // m/s^2
  double sigma_p = 2.0;     // Pa, per chamber
  double sigma_force = 0.0; // N

  NoiseSpec scaled(double factor) const;
};

double stribeck_force(const StribeckFull& p, double v);

/// f_c*sgn(v) + f_v*v + f_s*sgn(v)*|v|^(1/3).
double linearized_stribeck(const FrictionParams& p, double v);

double cylinder_friction(const CylinderParams& params, double v);

/// Single-tone displacement signal, returning (x, dx). The default constants
/// below give a 6 cm stroke at 0.05 rad/s.
std::pair<double, double> excitation_signal(double amplitude, double omega, double t);

inline constexpr double kDefaultExcitationAmplitude = 0.06;  // m
inline constexpr double kDefaultExcitationOmega = 0.05;      // rad/s

struct CylinderSimConfig {
  double duration = 0.0;     // s
  double dt = 0.02;          // s (50 Hz)
  NoiseSpec noise;
  std::uint64_t seed = 1;
  double p_base = 1e5;       // rod-side back pressure, Pa
  std::function<double(double)> load;  // external force profile, defaults to zero
};

struct CylinderSimResult {
  std::vector<CylinderRecord> records;
  int clamped_pressure_samples = 0;  // nonzero means the back pressure could not be held
};

/// Inverse simulation: the piston tracks the commanded trajectory exactly and
/// the chamber pressures are solved from the force balance, so noiseless
/// records satisfy it to machine precision. Noise is added afterwards.
CylinderSimResult simulate_cylinder(const CylinderParams& params, const ExcitationSpec& excitation,
                                    const CylinderSimConfig& config);

void write_records_csv(const std::string& path, const std::vector<CylinderRecord>& records,
                       const std::vector<std::string>& comments = {});
std::vector<CylinderRecord> read_records_csv(const std::string& path);

// ---- planted testbed ground truth ------------------------------------------

/// Piston masses per joint, kg.
inline constexpr std::array<double, kNumJoints> kPistonMasses = {4.595, 4.914, 2.324,
                                                                 1.937, 1.729, 1.705};

/// Linearized friction triples (f_c, f_v, f_s) per joint.
inline constexpr std::array<std::array<double, 3>, kNumJoints> kFrictionTriples = {{
    {20.77, 7.83, -15.15},
    {12.62, 4.51, -11.53},
    {12.41, 7.03, -11.99},
    {8.73, 2.23, -5.18},
    {9.23, 4.41, -5.60},
    {6.62, 3.99, -3.01},
}};

inline constexpr double kDefaultDamping = 2.0;     // N*s/m
inline constexpr double kDefaultStiffness = 200.0; // N/m

FrictionParams planted_friction(int joint);                    // joint is 0-based
CylinderParams default_cylinder_params(int joint);

/// Two-tone displacement used for the shipped identification scenario; richer
/// than a single sine so mass/stiffness stay separable and the three friction
/// shapes decorrelate.
ExcitationSpec default_identification_excitation();

}  // namespace hydrarm

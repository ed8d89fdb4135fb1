#pragma once

#include <iosfwd>
#include <vector>

#include "chirpmix/spinops.hpp"
#include "chirpmix/waveform.hpp"

namespace chirpmix {

// Rotating-frame parameters of a weakly coupled homonuclear pair.
// Offsets are angular (rad/s); J stays in Hz (it always enters as 2 pi J).
struct SpinSystem {
  double omega_I = 0.0;
  double omega_S = 0.0;
  double J = 0.0;
};

struct BlochTrajectory {
  std::vector<double> times;
  std::vector<Vec3d> points;
};

// Classical magnetization under the rotating-frame field
// (amp cos(phase), amp sin(phase), omega0), one exact rotation per dwell.
// The trajectory includes the initial point, so it has size()+1 entries.
BlochTrajectory bloch_propagate(const PulseWaveform& w, double omega0,
                                const Vec3d& m0);

// Frame-factorized rotation for a chirp at offset omega0, evaluated at time
// t in [0, T]: Rz(phase(t)) Ry(theta(t)) Rz(Lambda(t)) Ry(theta(0))^T with
// theta = atan2(omega1, omega0 - omega(t)) and Lambda the running integral
// of omega_eff = hypot(omega1, omega0 - omega(t)) (Simpson on a grid_dt
// grid). The trailing Ry^T maps the initial state into the tilted frame
// where the effective field lies along z; without it the z column would
// point along the instantaneous field instead of tracking the cone on which
// the magnetization actually precesses.
Mat3d adiabatic_factorization(const ChirpParams& p, double omega0, double t,
                              double grid_dt = 0.5e-6);

// Exact piecewise propagator exp(-i H_n dt) ... exp(-i H_1 dt) with
// H_k = omega_I Iz + omega_S Sz + 2 pi J I.S + amp_k (cos ph_k Fx + sin ph_k Fy).
// Consecutive samples with identical (amp, phase) share one exponential.
UnitaryPropagator two_spin_propagate(const PulseWaveform& w,
                                     const SpinSystem& sys);

// Same field on a single spin at offset omega0; closed-form SU(2) steps.
Mat2c single_spin_propagate(const PulseWaveform& w, double omega0);

// Tr(Sz U Iz U^dag) / Tr(Iz^2): +1 for complete Iz -> Sz transfer.
// Throws std::invalid_argument if U is not unitary.
double transfer_efficiency(const Mat4c& U);

struct MixingCurve {
  std::vector<double> times;       // n * cycle duration, n = 0..n_max
  std::vector<double> efficiency;
};

// Transfer efficiency after 0..n_max repetitions of a mixing cycle.
MixingCurve mixing_buildup(const PulseWaveform& cycle, const SpinSystem& sys,
                           int n_max);

// CSV rows "time_s,mx,my,mz".
void write_trajectory_csv(std::ostream& os, const BlochTrajectory& traj);

// CSV rows "mix_time_s,mix_time_over_half_J,efficiency"; the second column
// is the mixing time in units of 1/(2J) (zero when J = 0).
void write_curve_csv(std::ostream& os, const MixingCurve& curve, double J);

}  // namespace chirpmix

#include "chirpmix/propagate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace chirpmix {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI{0.0, 1.0};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Composite Simpson for f on [0, t] with an even panel count sized by dt.
template <typename F>
double simpson(F f, double t, double dt) {
  if (t == 0.0) return 0.0;
  auto n = static_cast<std::size_t>(std::ceil(t / (2.0 * dt))) * 2;
  if (n < 2) n = 2;
  const double h = t / static_cast<double>(n);
  double acc = f(0.0) + f(t);
  for (std::size_t k = 1; k < n; ++k)
    acc += f(static_cast<double>(k) * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

BlochTrajectory bloch_propagate(const PulseWaveform& w, double omega0,
                                const Vec3d& m0) {
  BlochTrajectory traj;
  traj.times.reserve(w.size() + 1);
  traj.points.reserve(w.size() + 1);
  traj.times.push_back(0.0);
  traj.points.push_back(m0);
  Vec3d m = m0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Vec3d v(w.amplitude[k] * std::cos(w.phase_at(k)),
                  w.amplitude[k] * std::sin(w.phase_at(k)), omega0);
    m = rot_exp(v * w.dwell) * m;
    traj.times.push_back(static_cast<double>(k + 1) * w.dwell);
    traj.points.push_back(m);
  }
  return traj;
}

Mat3d adiabatic_factorization(const ChirpParams& p, double omega0, double t,
                              double grid_dt) {
  const double T = p.T();
  // tolerate the sub-dwell overshoot of a discretized sweep's final sample
  if (t < 0.0 || t > T * 1.01)
    throw std::invalid_argument("adiabatic_factorization: t outside [0, T]");
  const auto theta = [&](double tau) {
    return std::atan2(p.omega1, omega0 - p.omega(tau));
  };
  const double lambda = simpson(
      [&](double tau) { return std::hypot(p.omega1, omega0 - p.omega(tau)); },
      t, grid_dt);
  return rot_exp(Axis::z, p.phase(t)) * rot_exp(Axis::y, theta(t)) *
         rot_exp(Axis::z, lambda) * rot_exp(Axis::y, theta(0.0)).transpose();
}

UnitaryPropagator two_spin_propagate(const PulseWaveform& w,
                                     const SpinSystem& sys) {
  static const Mat4c Iz = two_spin_operator(TwoSpinOp::Iz);
  static const Mat4c Sz = two_spin_operator(TwoSpinOp::Sz);
  static const Mat4c IS = two_spin_operator(TwoSpinOp::IS);
  static const Mat4c Fx = two_spin_operator(TwoSpinOp::Fx);
  static const Mat4c Fy = two_spin_operator(TwoSpinOp::Fy);
  const Mat4c H0 =
      sys.omega_I * Iz + sys.omega_S * Sz + 2.0 * kPi * sys.J * IS;
  Mat4c U = Mat4c::Identity();
  std::size_t k = 0;
  while (k < w.size()) {
    std::size_t run = k + 1;
    while (run < w.size() && w.amplitude[run] == w.amplitude[k] &&
           w.phase[run] == w.phase[k])
      ++run;
    const Mat4c H = H0 + w.amplitude[k] * (std::cos(w.phase_at(k)) * Fx +
                                           std::sin(w.phase_at(k)) * Fy);
    U = expm_unitary(H, static_cast<double>(run - k) * w.dwell) * U;
    k = run;
  }
  return {U, w.duration()};
}

Mat2c single_spin_propagate(const PulseWaveform& w, double omega0) {
  Mat2c U = Mat2c::Identity();
  std::size_t k = 0;
  while (k < w.size()) {
    std::size_t run = k + 1;
    while (run < w.size() && w.amplitude[run] == w.amplitude[k] &&
           w.phase[run] == w.phase[k])
      ++run;
    const double dt = static_cast<double>(run - k) * w.dwell;
    const double vx = w.amplitude[k] * std::cos(w.phase_at(k));
    const double vy = w.amplitude[k] * std::sin(w.phase_at(k));
    const double vz = omega0;
    const double vn = std::sqrt(vx * vx + vy * vy + vz * vz);
    Mat2c step = Mat2c::Identity();
    if (vn > 0.0) {
      // exp(-i (v.sigma/2) dt) = cos(vn dt/2) - i sin(vn dt/2) (vhat.sigma)
      const double c = std::cos(0.5 * vn * dt);
      const double s = std::sin(0.5 * vn * dt) / vn;
      step(0, 0) = c - kI * s * vz;
      step(0, 1) = -kI * s * (vx - kI * vy);
      step(1, 0) = -kI * s * (vx + kI * vy);
      step(1, 1) = c + kI * s * vz;
    }
    U = step * U;
    k = run;
  }
  return U;
}

double transfer_efficiency(const Mat4c& U) {
  if (unitarity_defect(U) > 1e-9)
    throw std::invalid_argument("transfer_efficiency: propagator not unitary");
  static const Mat4c Iz = two_spin_operator(TwoSpinOp::Iz);
  static const Mat4c Sz = two_spin_operator(TwoSpinOp::Sz);
  static const double norm = (Iz * Iz).trace().real();
  return (Sz * U * Iz * U.adjoint()).trace().real() / norm;
}

MixingCurve mixing_buildup(const PulseWaveform& cycle, const SpinSystem& sys,
                           int n_max) {
  if (n_max < 0) throw std::invalid_argument("mixing_buildup: n_max < 0");
  UnitaryPropagator uc = two_spin_propagate(cycle, sys);
  uc.matrix = nearest_unitary(uc.matrix);
  MixingCurve curve;
  curve.times.reserve(n_max + 1);
  curve.efficiency.reserve(n_max + 1);
  Mat4c P = Mat4c::Identity();
  for (int n = 0; n <= n_max; ++n) {
    curve.times.push_back(n * uc.duration);
    curve.efficiency.push_back(transfer_efficiency(P));
    if (n < n_max) P = uc.matrix * P;
  }
  return curve;
}

void write_trajectory_csv(std::ostream& os, const BlochTrajectory& traj) {
  os << "time_s,mx,my,mz\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    os << fmt(traj.times[k]) << ',' << fmt(traj.points[k].x()) << ','
       << fmt(traj.points[k].y()) << ',' << fmt(traj.points[k].z()) << '\n';
}

void write_curve_csv(std::ostream& os, const MixingCurve& curve, double J) {
  os << "mix_time_s,mix_time_over_half_J,efficiency\n";
  for (std::size_t k = 0; k < curve.times.size(); ++k)
    os << fmt(curve.times[k]) << ',' << fmt(curve.times[k] * 2.0 * J) << ','
       << fmt(curve.efficiency[k]) << '\n';
}

}  // namespace chirpmix

#pragma once

#include <vector>

#include "chirpmix/propagate.hpp"
#include "chirpmix/spinops.hpp"
#include "chirpmix/waveform.hpp"

namespace chirpmix {

// Instantaneous tilted-frame geometry for one spin under a chirp:
// theta = atan2(omega1, omega0 - omega(t)), omega_eff = hypot of the same.
struct SingleFieldState {
  double omega_eff = 0.0;
  double theta = 0.0;
};

SingleFieldState effective_field(const ChirpParams& p, double omega0, double t);

// Both spins of a pair, plus the difference frequency their zero-quantum
// coherence precesses at.
struct PairFieldState {
  double omega_eff_I = 0.0;
  double omega_eff_S = 0.0;
  double theta_I = 0.0;
  double theta_S = 0.0;
  double omega_d = 0.0;  // omega_eff_I - omega_eff_S
};

PairFieldState effective_field(const ChirpParams& p, const SpinSystem& sys,
                               double t);

// First-order coupling attenuation omega1^2 / (omega1^2 + Delta^2/4) for a
// pair split by Delta around the rf. Throws if omega1 <= 0.
double attenuation_factor(double omega1, double Delta);

// Running integrals over one chirp period on a uniform grid:
//   c(t) = int 2 pi J cos^2((thI-thS)/2) cos(Phi_d),
//   d(t) = same with sin(Phi_d),            Phi_d = int (w_eff_I - w_eff_S)
//   eta(t) = hypot(c, d)   (zero-quantum rotation angle; pi = full transfer)
//   dq(t)  = double-quantum analogue: weight sin^2((thI-thS)/2), phase
//            Phi_s = int (w_eff_I + w_eff_S).
// Cumulative composite Simpson; odd points use the half-panel rule.
struct CouplingIntegrals {
  std::vector<double> times, c, d, eta, dq;
};

CouplingIntegrals coupling_integrals(const ChirpParams& p,
                                     const SpinSystem& sys,
                                     double dwell = 0.5e-6);

// CSV rows "time_s,c,d,eta,dq".
void write_integrals_csv(std::ostream& os, const CouplingIntegrals& ci);

struct TransferSchedule {
  long periods = 0;
  double total_time = 0.0;
};

// Periods until the accumulated zero-quantum angle reaches pi, assuming
// eta_T per period. Throws if eta_T <= 0.
TransferSchedule periods_to_pi(double eta_T, double period);

// One period reduced to its effective coupling: a_zz IzSz plus a
// zero-quantum rotation by b about phase alpha, with beta the zero-quantum
// frame angle int w_d over the period (mod 2 pi) and dq_residual the
// double-quantum leakage magnitude.
struct EffectiveCoupling {
  double a_zz = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double dq_residual = 0.0;
};

EffectiveCoupling effective_coupling(const ChirpParams& p,
                                     const SpinSystem& sys,
                                     double dwell = 0.5e-6);

// Concatenate a period with its phase-inverted partner: the second period's
// phasor is b at angle -(alpha + beta), so the pair adds as
// b<alpha + b<-(alpha+beta). a_zz doubles; beta doubles (mod 2 pi);
// dq_residual doubles as a coherent bound.
EffectiveCoupling compose_two_periods(const EffectiveCoupling& h, double beta);

// Fit U(T) at one offset as Rz(theta1) Ry(pi - epsilon) Rz(theta2).
// Throws if epsilon > pi/2 (the sweep did not invert this spin) or if the
// reconstruction fidelity |Tr(Urec^dag U)|/2 falls below 1 - 1e-6.
struct InversionFactorization {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double epsilon = 0.0;
  double fidelity = 0.0;
};

InversionFactorization inversion_factorize(const PulseWaveform& w,
                                           double omega0);

// Frobenius distance from U (2x2, unitary) to the nearest z rotation,
// global phase ignored: sqrt(4 - 2(|U00| + |U11|)).
double z_rotation_distance(const Mat2c& U);

// Residual error of the two- and four-period supercycles built from
// U(eps) = Rz(theta1) Ry(pi - eps) Rz(theta2) and its pi-phase-shifted
// partner, measured by z_rotation_distance, with log-log slopes fitted
// over eps_values. Requires >= 4 values in (0, pi/2); throws if the fit
// would be degenerate.
struct ErrorScalingFit {
  double slope_two = 0.0;
  double slope_four = 0.0;
  std::vector<double> eps, err_two, err_four;
};

ErrorScalingFit supercycle_error_scaling(double theta1, double theta2,
                                         const std::vector<double>& eps_values);

// Time at which eta grows fastest: centered difference of eta over the
// given window, evaluated on the integral grid.
double eta_growth_argmax(const CouplingIntegrals& ci, double window);

}  // namespace chirpmix

#include "chirpmix/effham.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace chirpmix {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI{0.0, 1.0};

double wrap_2pi(double x) {
  double y = std::fmod(x, 2.0 * kPi);
  if (y < 0.0) y += 2.0 * kPi;
  return y;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Running integral of uniformly sampled f: Simpson pairs for even indices,
// half-panel (three-point Newton) corrections at odd ones.
std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  if (n < 2) return F;
  if (n == 2) {
    F[1] = 0.5 * h * (f[0] + f[1]);
    return F;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0)
      F[i] = F[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    else if (i + 1 < n)
      F[i] = F[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    else
      F[i] = F[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
  }
  return F;
}

struct PairGrid {
  double h = 0.0;
  std::vector<double> times, th_I, th_S, w_I, w_S;
  std::vector<double> phi_d, phi_s;  // running int of w_I -/+ w_S
};

PairGrid build_grid(const ChirpParams& p, const SpinSystem& sys, double dwell) {
  if (dwell <= 0.0)
    throw std::invalid_argument("coupling grid: dwell must be positive");
  const double T = p.T();
  auto n = static_cast<std::size_t>(std::llround(T / dwell));
  if (n < 4) n = 4;
  PairGrid g;
  g.h = T / static_cast<double>(n);
  g.times.resize(n + 1);
  g.th_I.resize(n + 1);
  g.th_S.resize(n + 1);
  g.w_I.resize(n + 1);
  g.w_S.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * g.h;
    const double dI = sys.omega_I - p.omega(t);
    const double dS = sys.omega_S - p.omega(t);
    g.times[i] = t;
    g.th_I[i] = std::atan2(p.omega1, dI);
    g.th_S[i] = std::atan2(p.omega1, dS);
    g.w_I[i] = std::hypot(p.omega1, dI);
    g.w_S[i] = std::hypot(p.omega1, dS);
  }
  std::vector<double> wd(n + 1), ws(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    wd[i] = g.w_I[i] - g.w_S[i];
    ws[i] = g.w_I[i] + g.w_S[i];
  }
  g.phi_d = cumulative_simpson(wd, g.h);
  g.phi_s = cumulative_simpson(ws, g.h);
  return g;
}

struct PairIntegrals {
  CouplingIntegrals ci;
  double azz = 0.0;
  double beta = 0.0;
};

PairIntegrals integrate_pair(const ChirpParams& p, const SpinSystem& sys,
                             double dwell) {
  const PairGrid g = build_grid(p, sys, dwell);
  const std::size_t n = g.times.size();
  const double twoPiJ = 2.0 * kPi * sys.J;
  std::vector<double> czq(n), dzq(n), cdq(n), ddq(n), azz(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double half = 0.5 * (g.th_I[i] - g.th_S[i]);
    const double wzq = twoPiJ * std::cos(half) * std::cos(half);
    const double wdq = twoPiJ * std::sin(half) * std::sin(half);
    czq[i] = wzq * std::cos(g.phi_d[i]);
    dzq[i] = wzq * std::sin(g.phi_d[i]);
    cdq[i] = wdq * std::cos(g.phi_s[i]);
    ddq[i] = wdq * std::sin(g.phi_s[i]);
    azz[i] = twoPiJ * std::cos(g.th_I[i]) * std::cos(g.th_S[i]);
  }
  PairIntegrals out;
  out.ci.times = g.times;
  out.ci.c = cumulative_simpson(czq, g.h);
  out.ci.d = cumulative_simpson(dzq, g.h);
  const std::vector<double> cq = cumulative_simpson(cdq, g.h);
  const std::vector<double> dq = cumulative_simpson(ddq, g.h);
  out.ci.eta.resize(n);
  out.ci.dq.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.ci.eta[i] = std::hypot(out.ci.c[i], out.ci.d[i]);
    out.ci.dq[i] = std::hypot(cq[i], dq[i]);
  }
  out.azz = cumulative_simpson(azz, g.h).back();
  out.beta = wrap_2pi(g.phi_d.back());
  return out;
}

Mat2c rz(double th) {
  Mat2c m = Mat2c::Zero();
  m(0, 0) = std::exp(-kI * (0.5 * th));
  m(1, 1) = std::exp(kI * (0.5 * th));
  return m;
}

Mat2c ry(double th) {
  Mat2c m;
  m << std::cos(0.5 * th), -std::sin(0.5 * th),  //
      std::sin(0.5 * th), std::cos(0.5 * th);
  return m;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double var = sxx - sx * sx / n;
  if (var <= 0.0)
    throw std::runtime_error("supercycle_error_scaling: degenerate fit");
  return (sxy - sx * sy / n) / var;
}

}  // namespace

SingleFieldState effective_field(const ChirpParams& p, double omega0,
                                 double t) {
  const double d = omega0 - p.omega(t);
  return {std::hypot(p.omega1, d), std::atan2(p.omega1, d)};
}

PairFieldState effective_field(const ChirpParams& p, const SpinSystem& sys,
                               double t) {
  const SingleFieldState i = effective_field(p, sys.omega_I, t);
  const SingleFieldState s = effective_field(p, sys.omega_S, t);
  return {i.omega_eff, s.omega_eff, i.theta, s.theta,
          i.omega_eff - s.omega_eff};
}

double attenuation_factor(double omega1, double Delta) {
  if (omega1 <= 0.0)
    throw std::invalid_argument("attenuation_factor: omega1 must be positive");
  const double w2 = omega1 * omega1;
  return w2 / (w2 + 0.25 * Delta * Delta);
}

CouplingIntegrals coupling_integrals(const ChirpParams& p,
                                     const SpinSystem& sys, double dwell) {
  return integrate_pair(p, sys, dwell).ci;
}

void write_integrals_csv(std::ostream& os, const CouplingIntegrals& ci) {
  os << "time_s,c,d,eta,dq\n";
  for (std::size_t i = 0; i < ci.times.size(); ++i)
    os << fmt(ci.times[i]) << ',' << fmt(ci.c[i]) << ',' << fmt(ci.d[i]) << ','
       << fmt(ci.eta[i]) << ',' << fmt(ci.dq[i]) << '\n';
}

TransferSchedule periods_to_pi(double eta_T, double period) {
  if (eta_T <= 0.0)
    throw std::invalid_argument(
        "periods_to_pi: no zero-quantum accumulation (eta <= 0)");
  if (period <= 0.0)
    throw std::invalid_argument("periods_to_pi: period must be positive");
  const auto n = static_cast<long>(std::ceil(kPi / eta_T));
  return {n, static_cast<double>(n) * period};
}

EffectiveCoupling effective_coupling(const ChirpParams& p,
                                     const SpinSystem& sys, double dwell) {
  const PairIntegrals pi_ = integrate_pair(p, sys, dwell);
  EffectiveCoupling h;
  h.a_zz = pi_.azz;
  h.b = pi_.ci.eta.back();
  h.alpha = std::atan2(pi_.ci.d.back(), pi_.ci.c.back());
  h.beta = pi_.beta;
  h.dq_residual = pi_.ci.dq.back();
  return h;
}

EffectiveCoupling compose_two_periods(const EffectiveCoupling& h, double beta) {
  const std::complex<double> z =
      std::polar(h.b, h.alpha) + std::polar(h.b, -(h.alpha + beta));
  EffectiveCoupling out;
  out.a_zz = 2.0 * h.a_zz;
  out.b = std::abs(z);
  out.alpha = std::arg(z);
  out.beta = wrap_2pi(2.0 * beta);
  out.dq_residual = 2.0 * h.dq_residual;
  return out;
}

InversionFactorization inversion_factorize(const PulseWaveform& w,
                                           double omega0) {
  Mat2c U = single_spin_propagate(w, omega0);
  const std::complex<double> det = U.determinant();
  U /= std::sqrt(det);
  const double beta_e = 2.0 * std::atan2(std::abs(U(1, 0)), std::abs(U(0, 0)));
  const double eps = kPi - beta_e;
  if (eps > 0.5 * kPi)
    throw std::runtime_error(
        "inversion_factorize: residual angle " + fmt(eps) +
        " rad exceeds pi/2; the sweep does not invert this offset");
  const double sum =
      std::abs(U(0, 0)) < 1e-12 ? 0.0 : -2.0 * std::arg(U(0, 0));
  const double diff = 2.0 * std::arg(U(1, 0));
  InversionFactorization f;
  f.theta1 = 0.5 * (sum + diff);
  f.theta2 = 0.5 * (sum - diff);
  f.epsilon = eps;
  const Mat2c rec = rz(f.theta1) * ry(beta_e) * rz(f.theta2);
  f.fidelity = 0.5 * std::abs((rec.adjoint() * U).trace());
  if (f.fidelity < 1.0 - 1e-6)
    throw std::runtime_error(
        "inversion_factorize: reconstruction fidelity " + fmt(f.fidelity) +
        " below 1 - 1e-6");
  return f;
}

double z_rotation_distance(const Mat2c& U) {
  const double gap = 4.0 - 2.0 * (std::abs(U(0, 0)) + std::abs(U(1, 1)));
  return std::sqrt(std::max(0.0, gap));
}

ErrorScalingFit supercycle_error_scaling(
    double theta1, double theta2, const std::vector<double>& eps_values) {
  if (eps_values.size() < 4)
    throw std::invalid_argument(
        "supercycle_error_scaling: need at least 4 epsilon values");
  ErrorScalingFit fit;
  std::vector<double> lx, l2, l4;
  for (const double eps : eps_values) {
    if (eps <= 0.0 || eps > 0.5 * kPi)
      throw std::invalid_argument(
          "supercycle_error_scaling: epsilon must lie in (0, pi/2]");
    const Mat2c U = rz(theta1) * ry(kPi - eps) * rz(theta2);
    const Mat2c Pz = rz(kPi);
    const Mat2c Ub = Pz * U * Pz.adjoint();
    const double e2 = z_rotation_distance(Ub * U);
    const double e4 = z_rotation_distance(U * Ub * Ub * U);
    if (e2 < 1e-13 || e4 < 1e-15)
      throw std::runtime_error(
          "supercycle_error_scaling: residual below noise floor");
    fit.eps.push_back(eps);
    fit.err_two.push_back(e2);
    fit.err_four.push_back(e4);
    lx.push_back(std::log(eps));
    l2.push_back(std::log(e2));
    l4.push_back(std::log(e4));
  }
  fit.slope_two = fit_slope(lx, l2);
  fit.slope_four = fit_slope(lx, l4);
  return fit;
}

double eta_growth_argmax(const CouplingIntegrals& ci, double window) {
  const std::size_t n = ci.times.size();
  if (n < 3)
    throw std::invalid_argument("eta_growth_argmax: grid too small");
  const double h = ci.times[1] - ci.times[0];
  auto half = static_cast<std::size_t>(std::llround(window / (2.0 * h)));
  if (half < 1) half = 1;
  if (2 * half + 1 > n)
    throw std::invalid_argument("eta_growth_argmax: window exceeds grid");
  std::size_t best = half;
  double best_rate = -1.0;
  for (std::size_t i = half; i + half < n; ++i) {
    const double rate = ci.eta[i + half] - ci.eta[i - half];
    if (rate > best_rate) {
      best_rate = rate;
      best = i;
    }
  }
  return ci.times[best];
}

}  // namespace chirpmix

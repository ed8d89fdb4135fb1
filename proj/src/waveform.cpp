#include "chirpmix/waveform.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace chirpmix {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

PulseWaveform chirp(const ChirpParams& p, double dwell) {
  if (p.A <= 0.0 || p.a <= 0.0 || p.omega1 <= 0.0 || dwell <= 0.0)
    throw std::invalid_argument("chirp: A, a, omega1 and dwell must be positive");
  const double T = p.T();
  // omega is linear in t, so the largest per-step phase increment sits at
  // whichever sweep edge is farther from zero frequency.
  const double omega_max =
      std::max(std::abs(p.omega(0.0)), std::abs(p.omega(T)));
  const double step = omega_max * dwell;
  if (step >= 0.1)
    throw std::invalid_argument(
        "chirp: per-step phase increment " + fmt(step) +
        " rad reaches 0.1 rad; use dwell < " + fmt(0.1 / omega_max) + " s");
  const auto n = static_cast<std::size_t>(std::llround(T / dwell));
  PulseWaveform w;
  w.dwell = dwell;
  w.amplitude.assign(n, p.omega1);
  w.phase.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dwell;
    w.phase[k] = p.phase(t);
  }
  return w;
}

PulseWaveform phase_advance(PulseWaveform w, double delta) {
  w.phase_offset += delta;
  return w;
}

namespace {

// Fold the offset into the sample array (used when merging waveforms whose
// offsets differ).
PulseWaveform baked(const PulseWaveform& w) {
  if (w.phase_offset == 0.0) return w;
  PulseWaveform out = w;
  for (double& ph : out.phase) ph += out.phase_offset;
  out.phase_offset = 0.0;
  return out;
}

}  // namespace

PulseWaveform concat(const PulseWaveform& a, const PulseWaveform& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  if (a.dwell != b.dwell)
    throw std::invalid_argument("concat: dwell mismatch");
  PulseWaveform out = baked(a);
  const PulseWaveform tail = baked(b);
  out.amplitude.insert(out.amplitude.end(), tail.amplitude.begin(),
                       tail.amplitude.end());
  out.phase.insert(out.phase.end(), tail.phase.begin(), tail.phase.end());
  return out;
}

PulseWaveform repeat(const PulseWaveform& w, int n) {
  if (n < 0) throw std::invalid_argument("repeat: n must be >= 0");
  PulseWaveform out;
  out.dwell = w.dwell;
  out.amplitude.reserve(w.size() * n);
  out.phase.reserve(w.size() * n);
  for (int i = 0; i < n; ++i) {
    out.amplitude.insert(out.amplitude.end(), w.amplitude.begin(),
                         w.amplitude.end());
    out.phase.insert(out.phase.end(), w.phase.begin(), w.phase.end());
  }
  return out;
}

PulseWaveform supercycle(const PulseWaveform& w) {
  const PulseWaveform flipped = phase_advance(w, kPi);
  return concat(concat(w, flipped), concat(flipped, w));
}

PulseWaveform composite_sequence(const std::vector<CompositeElement>& elements,
                                 double omega1, double dwell) {
  if (omega1 <= 0.0 || dwell <= 0.0)
    throw std::invalid_argument(
        "composite_sequence: omega1 and dwell must be positive");
  // The carry keeps each element's rounding remainder in play, so the
  // residual flip error of the whole rendering is at most half a dwell of
  // nutation. Demand that this bound stays under 0.5 deg.
  const double worst_err_deg = 0.5 * dwell * omega1 * 180.0 / kPi;
  if (worst_err_deg >= 0.5)
    throw std::invalid_argument(
        "composite_sequence: rounding could cost " + fmt(worst_err_deg) +
        " deg of flip per rendering; use dwell < " + fmt(kPi / (180.0 * omega1)) +
        " s");
  PulseWaveform w;
  w.dwell = dwell;
  double carry = 0.0;
  for (const CompositeElement& el : elements) {
    if (el.flip_deg < 0.0)
      throw std::invalid_argument(
          "composite_sequence: negative flip angle (fold into phase instead)");
    const double exact = el.flip_deg * kPi / 180.0 / omega1 / dwell + carry;
    const auto n = static_cast<long long>(std::llround(exact));
    carry = exact - static_cast<double>(n);
    const double ph = el.phase_deg * kPi / 180.0;
    w.amplitude.insert(w.amplitude.end(), n, omega1);
    w.phase.insert(w.phase.end(), n, ph);
  }
  return w;
}

void write_waveform_csv(std::ostream& os, const PulseWaveform& w) {
  os << "index,time_s,amplitude_hz,phase_deg\n";
  for (std::size_t k = 0; k < w.size(); ++k) {
    os << k << ',' << fmt(static_cast<double>(k) * w.dwell) << ','
       << fmt(w.amplitude[k] / (2.0 * kPi)) << ','
       << fmt(w.phase_at(k) * 180.0 / kPi) << '\n';
  }
}

}  // namespace chirpmix

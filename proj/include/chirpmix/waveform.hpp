#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace chirpmix {

// Linear frequency sweep omega(t) = -A + a t (plus an optional constant
// carrier shift), swept symmetrically from -A to +A over T = 2A/a.
// All frequencies are angular (rad/s); a is in rad/s^2.
struct ChirpParams {
  double A = 0.0;        // half sweep width, rad/s
  double a = 0.0;        // sweep rate, rad/s^2
  double omega1 = 0.0;   // rf amplitude, rad/s
  double carrier = 0.0;  // constant offset added to the swept frequency, rad/s

  double T() const { return 2.0 * A / a; }
  double omega(double t) const { return -A + a * t + carrier; }
  // phase(t) = integral of omega
  double phase(double t) const {
    return (-A + carrier) * t + 0.5 * a * t * t;
  }
  // a / omega1^2: <= 1/5 for adiabatic following, >= 1 is unusable
  double adiabaticity_ratio() const { return a / (omega1 * omega1); }
};

// Piecewise-constant rf: sample k plays amplitude[k] (rad/s) at carrier
// phase phase[k] + phase_offset (rad, continuous/unwrapped) for one dwell.
// The offset lives outside the sample array so that advancing the phase by
// d and then by -d restores the original waveform bit-exactly.
struct PulseWaveform {
  double dwell = 0.0;  // seconds
  double phase_offset = 0.0;
  std::vector<double> amplitude;
  std::vector<double> phase;

  std::size_t size() const { return amplitude.size(); }
  double duration() const { return dwell * static_cast<double>(size()); }
  double phase_at(std::size_t k) const { return phase[k] + phase_offset; }
  bool operator==(const PulseWaveform&) const = default;
};

// Discretize a chirp at the given dwell, sampling phase at interval
// midpoints t_k = (k + 1/2) dwell. Throws std::invalid_argument if the
// per-step phase increment would reach 0.1 rad, naming the dwell that
// would be needed.
PulseWaveform chirp(const ChirpParams& p, double dwell);

// Copy with delta added to every phase sample.
PulseWaveform phase_advance(PulseWaveform w, double delta);

PulseWaveform concat(const PulseWaveform& a, const PulseWaveform& b);
PulseWaveform repeat(const PulseWaveform& w, int n);

// Four-period supercycle [w, w+pi, w+pi, w].
PulseWaveform supercycle(const PulseWaveform& w);

// One element of a composite pulse table: a hard rotation by flip_deg about
// an axis at phase_deg in the transverse plane.
struct CompositeElement {
  double flip_deg = 0.0;
  double phase_deg = 0.0;
};

// Render a composite pulse at fixed amplitude omega1, rounding each element
// to whole dwells and carrying the rounding remainder into the next element
// so errors do not accumulate. Throws std::invalid_argument if the residual
// flip error per rendering could reach 0.5 deg, naming the dwell that would
// be needed.
PulseWaveform composite_sequence(const std::vector<CompositeElement>& elements,
                                 double omega1, double dwell);

// CSV rows "index,time_s,amplitude_hz,phase_deg" (time at sample start,
// amplitude as omega1/2pi).
void write_waveform_csv(std::ostream& os, const PulseWaveform& w);

}  // namespace chirpmix

#include "doctest.h"
#include "helpers.hpp"

#include <chirpmix/propagate.hpp>
#include <chirpmix/waveform.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace chirpmix;
using testutil::kPi;

TEST_SUITE("waveform") {

TEST_CASE("sweep duration follows from span and rate") {
    ChirpParams p = testutil::reference_chirp();
    // 2A/a with A = 2*pi*30 kHz and a = (2*pi*10 kHz)^2 / 16
    CHECK(p.T() == doctest::Approx(1.52788745368e-3).epsilon(1e-9));
    CHECK(p.omega(0.0) == doctest::Approx(-p.A).epsilon(1e-12));
    CHECK(p.omega(p.T()) == doctest::Approx(p.A).epsilon(1e-12));
    CHECK(std::abs(p.omega(p.T() / 2)) < 1e-6 * p.A);
    CHECK(p.adiabaticity_ratio() == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("sampled chirp has expected grid and midpoint phases") {
    ChirpParams p = testutil::reference_chirp();
    PulseWaveform w = chirp(p, 0.5e-6);
    CHECK(w.size() == 3056);
    CHECK(w.duration() == doctest::Approx(p.T()).epsilon(1e-3));
    for (std::size_t k : {std::size_t{0}, std::size_t{100}, std::size_t{3000}}) {
        const double tm = (static_cast<double>(k) + 0.5) * w.dwell;
        CHECK(w.phase_at(k) == doctest::Approx(p.phase(tm)).epsilon(1e-12));
        CHECK(w.amplitude[k] == doctest::Approx(p.omega1).epsilon(1e-12));
    }
}

TEST_CASE("finite-difference phase reproduces the programmed frequency") {
    ChirpParams p = testutil::reference_chirp();
    PulseWaveform w = chirp(p, 0.5e-6);
    // phase is quadratic in t, so the midpoint-sample difference quotient
    // equals omega at the shared sample boundary exactly (up to roundoff)
    for (std::size_t k = 1; k + 1 < w.size(); k += 97) {
        const double t_boundary = static_cast<double>(k + 1) * w.dwell;
        const double w_fd = (w.phase_at(k + 1) - w.phase_at(k)) / w.dwell;
        const double w_true = p.omega(t_boundary);
        if (std::abs(w_true) > 0.1 * p.A)
            CHECK(w_fd == doctest::Approx(w_true).epsilon(1e-3));
        else
            CHECK(std::abs(w_fd - w_true) < 1e-3 * p.A);
    }
}

TEST_CASE("coarse dwell is rejected with the required sampling named") {
    ChirpParams p = testutil::reference_chirp();
    CHECK_THROWS_AS(chirp(p, 50e-6), std::invalid_argument);
    try {
        chirp(p, 50e-6);
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("dwell") != std::string::npos);
    }
}

TEST_CASE("phase offset advance is exactly invertible") {
    ChirpParams p = testutil::reference_chirp();
    PulseWaveform w = chirp(p, 0.5e-6);
    const double delta = 0.7318742;

    PulseWaveform fwd = phase_advance(w, delta);
    PulseWaveform back = phase_advance(fwd, -delta);
    CHECK(back == w);  // bit-exact, not approximate

    PulseWaveform same = phase_advance(w, 0.0);
    CHECK(same == w);

    for (std::size_t k : {std::size_t{0}, std::size_t{17}})
        CHECK(fwd.phase_at(k) == doctest::Approx(w.phase_at(k) + delta).epsilon(1e-15));
    CHECK(fwd.amplitude == w.amplitude);
}

TEST_CASE("a 2*pi phase offset leaves the propagator unchanged") {
    ChirpParams p = testutil::reference_chirp();
    PulseWaveform w = chirp(p, 0.5e-6);
    PulseWaveform shifted = phase_advance(w, 2 * kPi);
    const double omega0 = 2 * kPi * (-5e3);
    Mat2c u0 = single_spin_propagate(w, omega0);
    Mat2c u1 = single_spin_propagate(shifted, omega0);
    CHECK((u1 - u0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("supercycle is four sweeps with 0,pi,pi,0 offsets") {
    ChirpParams p = testutil::reference_chirp();
    PulseWaveform w = chirp(p, 0.5e-6);
    PulseWaveform sc = supercycle(w);
    REQUIRE(sc.size() == 4 * w.size());
    CHECK(sc.duration() == doctest::Approx(4 * w.duration()).epsilon(1e-12));

    const std::size_t n = w.size();
    for (std::size_t k : {std::size_t{0}, std::size_t{n / 2}, std::size_t{n - 1}}) {
        CHECK(sc.phase_at(k) == doctest::Approx(w.phase_at(k)).epsilon(1e-12));
        CHECK(sc.phase_at(n + k) - w.phase_at(k) == doctest::Approx(kPi).epsilon(1e-12));
        CHECK(sc.phase_at(2 * n + k) - w.phase_at(k) == doctest::Approx(kPi).epsilon(1e-12));
        CHECK(sc.phase_at(3 * n + k) == doctest::Approx(w.phase_at(k)).epsilon(1e-12));
    }
}

TEST_CASE("concat requires matching dwell and bakes offsets") {
    PulseWaveform a;
    a.dwell = 1e-6;
    a.amplitude = {1e4, 1e4};
    a.phase = {0.0, 0.1};
    PulseWaveform b = a;
    b.dwell = 2e-6;
    CHECK_THROWS_AS(concat(a, b), std::invalid_argument);

    PulseWaveform shifted = phase_advance(a, 0.5);
    PulseWaveform joined = concat(a, shifted);
    REQUIRE(joined.size() == 4);
    CHECK(joined.phase_offset == 0.0);
    CHECK(joined.phase_at(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(joined.phase_at(3) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("composite element durations are rounded with carried residue") {
    // Each element wants 100.4 dwell ticks; independent rounding would give
    // 300 total, carried rounding must give 301 (error < 1 tick overall).
    const double omega1 = 2 * kPi * 10e3;
    const double dwell = 0.25e-6;
    const double flip_deg = 100.4 * dwell * omega1 * 180.0 / kPi;
    std::vector<CompositeElement> elems(3, CompositeElement{flip_deg, 0.0});
    PulseWaveform w = composite_sequence(elems, omega1, dwell);
    CHECK(w.size() == 301);
}

TEST_CASE("composite flip angles map to hard-pulse durations") {
    const double omega1 = 2 * kPi * 10e3;
    PulseWaveform w = composite_sequence({{180.0, 0.0}}, omega1, 0.25e-6);
    // 180 deg at 10 kHz is 50 us
    CHECK(w.duration() == doctest::Approx(50e-6).epsilon(1e-12));
    CHECK(w.size() == 200);
    for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK(w.amplitude[k] == doctest::Approx(omega1).epsilon(1e-12));
        CHECK(w.phase_at(k) == 0.0);
    }

    PulseWaveform empty = composite_sequence({}, omega1, 0.25e-6);
    CHECK(empty.size() == 0);

    CHECK_THROWS_AS(composite_sequence({{-90.0, 0.0}}, omega1, 0.25e-6),
                    std::invalid_argument);
}

TEST_CASE("composite rejects dwell too coarse for half-degree fidelity") {
    // At 10 kHz a 0.5 us tick is 1.8 deg, so worst-case rounding error is
    // 0.9 deg >= 0.5 deg; required dwell (~0.278 us) must be named.
    const double omega1 = 2 * kPi * 10e3;
    CHECK_THROWS_AS(composite_sequence({{90.0, 0.0}}, omega1, 0.5e-6),
                    std::invalid_argument);
    try {
        composite_sequence({{90.0, 0.0}}, omega1, 0.5e-6);
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("dwell") != std::string::npos);
        CHECK(msg.find("2.77") != std::string::npos);  // pi/(180 w1) ~ 0.278 us
    }
}

TEST_CASE("repeat concatenates identical copies") {
    PulseWaveform a;
    a.dwell = 1e-6;
    a.amplitude = {1e4};
    a.phase = {0.25};
    PulseWaveform r = repeat(a, 3);
    REQUIRE(r.size() == 3);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(r.phase_at(k) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(repeat(a, 0).size() == 0);
}

TEST_CASE("waveform csv uses the pinned header and row layout") {
    PulseWaveform a;
    a.dwell = 1e-6;
    a.amplitude = {2 * kPi * 1e4, 2 * kPi * 2e4};
    a.phase = {0.0, kPi / 2};
    std::ostringstream os;
    write_waveform_csv(os, a);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,time_s,amplitude_hz,phase_deg");
    std::getline(in, line);
    CHECK(line.rfind("0,0,10000,0", 0) == 0);
    std::getline(in, line);
    CHECK(line.find("1e-06,20000,90") != std::string::npos);
}

}  // TEST_SUITE

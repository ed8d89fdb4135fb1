#include <complex>

#include "chirpmix/spinops.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace chirpmix;
using testutil::kPi;

TEST_SUITE("spinops") {

TEST_CASE("rotation generators obey so(3) commutators") {
  const Mat3d ox = rotation_generator(Axis::x);
  const Mat3d oy = rotation_generator(Axis::y);
  const Mat3d oz = rotation_generator(Axis::z);
  CHECK((ox * oy - oy * ox - oz).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((oy * oz - oz * oy - ox).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((oz * ox - ox * oz - oy).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("rot_exp is right-handed and matches the Taylor exponential") {
  const Vec3d image = rot_exp(Axis::z, 0.5 * kPi) * Vec3d(1, 0, 0);
  CHECK((image - Vec3d(0, 1, 0)).norm() < 1e-12);

  testutil::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3d v(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    Mat3d gen = Mat3d::Zero();
    gen = v.x() * rotation_generator(Axis::x) +
          v.y() * rotation_generator(Axis::y) +
          v.z() * rotation_generator(Axis::z);
    CHECK((rot_exp(v) - testutil::taylor_expm(gen)).norm() < 1e-12);
  }
  CHECK((rot_exp(Vec3d::Zero()) - Mat3d::Identity()).norm() == 0.0);
}

TEST_CASE("spin-1/2 operators satisfy [sx, sy] = i sz") {
  const Mat2c sx = spin_half(Axis::x);
  const Mat2c sy = spin_half(Axis::y);
  const Mat2c sz = spin_half(Axis::z);
  const std::complex<double> i{0.0, 1.0};
  CHECK((sx * sy - sy * sx - i * sz).norm() < 1e-15);
  CHECK((sx * sx - 0.25 * Mat2c::Identity()).norm() < 1e-15);
}

TEST_CASE("two-spin operators embed on the right factors") {
  const Mat4c Iz = two_spin_operator(TwoSpinOp::Iz);
  const Mat4c Sz = two_spin_operator(TwoSpinOp::Sz);
  CHECK(Iz(0, 0).real() == doctest::Approx(0.5));
  CHECK(Iz(1, 1).real() == doctest::Approx(0.5));
  CHECK(Iz(2, 2).real() == doctest::Approx(-0.5));
  CHECK(Sz(1, 1).real() == doctest::Approx(-0.5));
  CHECK(Sz(2, 2).real() == doctest::Approx(0.5));
  // different spins commute
  const Mat4c Ix = two_spin_operator(TwoSpinOp::Ix);
  const Mat4c Sy = two_spin_operator(TwoSpinOp::Sy);
  CHECK((Ix * Sy - Sy * Ix).norm() < 1e-15);
  CHECK((Ix * Sy - two_spin_operator(TwoSpinOp::IxSy)).norm() < 1e-15);
  // normalization used by the efficiency readout
  CHECK((Iz * Iz).trace().real() == doctest::Approx(1.0));
  const Mat4c IS = two_spin_operator(TwoSpinOp::IS);
  const Mat4c sum = two_spin_operator(TwoSpinOp::IxSx) +
                    two_spin_operator(TwoSpinOp::IySy) +
                    two_spin_operator(TwoSpinOp::IzSz);
  CHECK((IS - sum).norm() < 1e-15);
}

TEST_CASE("name lookup matches the enum and rejects unknowns") {
  CHECK((two_spin_operator("IzSz") -
         two_spin_operator(TwoSpinOp::IzSz)).norm() == 0.0);
  CHECK((two_spin_operator("Fy") - two_spin_operator(TwoSpinOp::Fy)).norm() ==
        0.0);
  CHECK_THROWS_AS(two_spin_operator("Qx"), std::invalid_argument);
}

TEST_CASE("expm_unitary matches a Taylor oracle and stays unitary") {
  testutil::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Mat4c H;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        H(i, j) = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    H = ((H + H.adjoint()) / 2.0).eval();
    const double t = rng.uniform(0.1, 2.0);
    const Mat4c U = expm_unitary(H, t);
    const std::complex<double> mi{0.0, -1.0};
    const Mat4c oracle = testutil::taylor_expm<Mat4c>(mi * H * t);
    CHECK((U - oracle).norm() < 1e-12);
    CHECK(unitarity_defect(U) < 1e-13);
  }
}

TEST_CASE("expm_unitary rejects non-Hermitian input") {
  Mat4c H = Mat4c::Zero();
  H(0, 1) = 1.0;  // missing conjugate partner
  CHECK_THROWS_AS(expm_unitary(H, 1.0), std::invalid_argument);
}

TEST_CASE("zero-quantum generator swaps the flip-flop states") {
  // exp(-i H) with H = pi(IxSx + IySy) exchanges |ud> and |du>.
  const Mat4c U = expm_unitary(zero_quantum_hamiltonian(0.0), 1.0);
  CHECK(std::abs(U(2, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(U(1, 2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(U(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  // the phase gamma tilts the rotation axis but keeps the swap complete
  const Mat4c Ug = expm_unitary(zero_quantum_hamiltonian(1.3), 1.0);
  CHECK(std::abs(Ug(2, 1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nearest_unitary projects a perturbed unitary back") {
  const Mat4c U0 = expm_unitary(
      Mat4c(two_spin_operator(TwoSpinOp::Fx) +
            0.3 * two_spin_operator(TwoSpinOp::IzSz)),
      0.7);
  Mat4c noisy = U0;
  noisy(2, 3) += std::complex<double>(3e-8, -2e-8);
  const Mat4c fixed = nearest_unitary(noisy);
  CHECK(unitarity_defect(fixed) < 1e-14);
  CHECK((fixed - U0).norm() < 1e-7);
}

}  // TEST_SUITE

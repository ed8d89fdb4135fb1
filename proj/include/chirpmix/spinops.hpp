#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string_view>

namespace chirpmix {

using Mat2c = Eigen::Matrix2cd;
using Mat3d = Eigen::Matrix3d;
using Mat4c = Eigen::Matrix4cd;
using Vec3d = Eigen::Vector3d;

enum class Axis { x, y, z };

// Antisymmetric generators of SO(3): x(t) = exp(t * Omega) x(0) precesses
// right-handed about the axis, so exp(theta * Omega_z) e_x = (cos, sin, 0).
Mat3d rotation_generator(Axis axis);

// exp(angle * Omega_axis)
Mat3d rot_exp(Axis axis, double angle);

// exp(|v| * Omega_n) about n = v/|v| (Rodrigues); identity for v = 0.
Mat3d rot_exp(const Vec3d& v);

// sigma_a / 2
Mat2c spin_half(Axis axis);

// Product operators on the two-spin basis |uu>, |ud>, |du>, |dd>:
// I_a = (sigma_a/2) (x) 1, S_a = 1 (x) (sigma_a/2).
enum class TwoSpinOp {
  Ix, Iy, Iz, Sx, Sy, Sz,
  Fx, Fy, Fz,            // F_a = I_a + S_a
  IS,                    // I.S = IxSx + IySy + IzSz
  IxSx, IySy, IzSz,
  IxSy, IySx, IxSz, IzSx, IySz, IzSy,
};

Mat4c two_spin_operator(TwoSpinOp op);

// Name lookup ("Ix", "IzSz", "IS", ...); throws std::invalid_argument on
// unknown names.
Mat4c two_spin_operator(std::string_view name);

// pi * (cos g (IxSx + IySy) + sin g (IxSy - IySx)): a zero-quantum rotation
// by pi about an axis at angle g in the (ZQ_x, ZQ_y) plane.
Mat4c zero_quantum_hamiltonian(double gamma);

// exp(-i H t) for Hermitian H; throws std::invalid_argument if H deviates
// from Hermitian by more than 1e-10 (Frobenius).
Mat4c expm_unitary(const Mat4c& H, double t);
Mat2c expm_unitary(const Mat2c& H, double t);

// || U^dag U - 1 ||_F
double unitarity_defect(const Mat4c& U);
double unitarity_defect(const Mat2c& U);

// Polar projection onto the closest unitary (Frobenius sense); used before
// taking high powers of a propagator so roundoff cannot compound.
Mat4c nearest_unitary(const Mat4c& U);

struct UnitaryPropagator {
  Mat4c matrix = Mat4c::Identity();
  double duration = 0.0;  // seconds
};

}  // namespace chirpmix

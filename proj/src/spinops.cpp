#include "chirpmix/spinops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <map>
#include <stdexcept>
#include <string>

namespace chirpmix {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

Mat2c pauli(Axis axis) {
  Mat2c m = Mat2c::Zero();
  switch (axis) {
    case Axis::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Axis::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

Mat4c kron2(const Mat2c& a, const Mat2c& b) {
  Mat4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

Mat3d rotation_generator(Axis axis) {
  Mat3d m = Mat3d::Zero();
  switch (axis) {
    case Axis::x:
      m(2, 1) = 1.0;
      m(1, 2) = -1.0;
      break;
    case Axis::y:
      m(0, 2) = 1.0;
      m(2, 0) = -1.0;
      break;
    case Axis::z:
      m(1, 0) = 1.0;
      m(0, 1) = -1.0;
      break;
  }
  return m;
}

Mat3d rot_exp(Axis axis, double angle) {
  Vec3d n = Vec3d::Zero();
  n[static_cast<int>(axis)] = 1.0;
  return Eigen::AngleAxisd(angle, n).toRotationMatrix();
}

Mat3d rot_exp(const Vec3d& v) {
  const double norm = v.norm();
  if (norm == 0.0) return Mat3d::Identity();
  return Eigen::AngleAxisd(norm, v / norm).toRotationMatrix();
}

Mat2c spin_half(Axis axis) { return 0.5 * pauli(axis); }

Mat4c two_spin_operator(TwoSpinOp op) {
  const Mat2c id = Mat2c::Identity();
  const Mat2c sx = spin_half(Axis::x);
  const Mat2c sy = spin_half(Axis::y);
  const Mat2c sz = spin_half(Axis::z);
  switch (op) {
    case TwoSpinOp::Ix: return kron2(sx, id);
    case TwoSpinOp::Iy: return kron2(sy, id);
    case TwoSpinOp::Iz: return kron2(sz, id);
    case TwoSpinOp::Sx: return kron2(id, sx);
    case TwoSpinOp::Sy: return kron2(id, sy);
    case TwoSpinOp::Sz: return kron2(id, sz);
    case TwoSpinOp::Fx: return kron2(sx, id) + kron2(id, sx);
    case TwoSpinOp::Fy: return kron2(sy, id) + kron2(id, sy);
    case TwoSpinOp::Fz: return kron2(sz, id) + kron2(id, sz);
    case TwoSpinOp::IS:
      return kron2(sx, sx) + kron2(sy, sy) + kron2(sz, sz);
    case TwoSpinOp::IxSx: return kron2(sx, sx);
    case TwoSpinOp::IySy: return kron2(sy, sy);
    case TwoSpinOp::IzSz: return kron2(sz, sz);
    case TwoSpinOp::IxSy: return kron2(sx, sy);
    case TwoSpinOp::IySx: return kron2(sy, sx);
    case TwoSpinOp::IxSz: return kron2(sx, sz);
    case TwoSpinOp::IzSx: return kron2(sz, sx);
    case TwoSpinOp::IySz: return kron2(sy, sz);
    case TwoSpinOp::IzSy: return kron2(sz, sy);
  }
  throw std::invalid_argument("two_spin_operator: bad enum value");
}

Mat4c two_spin_operator(std::string_view name) {
  static const std::map<std::string, TwoSpinOp, std::less<>> table = {
      {"Ix", TwoSpinOp::Ix},     {"Iy", TwoSpinOp::Iy},
      {"Iz", TwoSpinOp::Iz},     {"Sx", TwoSpinOp::Sx},
      {"Sy", TwoSpinOp::Sy},     {"Sz", TwoSpinOp::Sz},
      {"Fx", TwoSpinOp::Fx},     {"Fy", TwoSpinOp::Fy},
      {"Fz", TwoSpinOp::Fz},     {"IS", TwoSpinOp::IS},
      {"IxSx", TwoSpinOp::IxSx}, {"IySy", TwoSpinOp::IySy},
      {"IzSz", TwoSpinOp::IzSz}, {"IxSy", TwoSpinOp::IxSy},
      {"IySx", TwoSpinOp::IySx}, {"IxSz", TwoSpinOp::IxSz},
      {"IzSx", TwoSpinOp::IzSx}, {"IySz", TwoSpinOp::IySz},
      {"IzSy", TwoSpinOp::IzSy},
  };
  const auto it = table.find(name);
  if (it == table.end())
    throw std::invalid_argument("two_spin_operator: unknown operator name '" +
                                std::string(name) + "'");
  return two_spin_operator(it->second);
}

Mat4c zero_quantum_hamiltonian(double gamma) {
  const double pi = 3.14159265358979323846;
  return pi * (std::cos(gamma) * (two_spin_operator(TwoSpinOp::IxSx) +
                                  two_spin_operator(TwoSpinOp::IySy)) +
               std::sin(gamma) * (two_spin_operator(TwoSpinOp::IxSy) -
                                  two_spin_operator(TwoSpinOp::IySx)));
}

namespace {

template <typename Mat>
Mat expm_unitary_impl(const Mat& H, double t) {
  if ((H - H.adjoint()).norm() > 1e-10)
    throw std::invalid_argument("expm_unitary: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const auto& lam = es.eigenvalues();
  const Mat& V = es.eigenvectors();
  Eigen::Vector<std::complex<double>, Mat::RowsAtCompileTime> ph(H.rows());
  for (int k = 0; k < H.rows(); ++k) ph[k] = std::exp(-kI * lam[k] * t);
  return V * ph.asDiagonal() * V.adjoint();
}

}  // namespace

Mat4c expm_unitary(const Mat4c& H, double t) { return expm_unitary_impl(H, t); }
Mat2c expm_unitary(const Mat2c& H, double t) { return expm_unitary_impl(H, t); }

double unitarity_defect(const Mat4c& U) {
  return (U.adjoint() * U - Mat4c::Identity()).norm();
}

double unitarity_defect(const Mat2c& U) {
  return (U.adjoint() * U - Mat2c::Identity()).norm();
}

Mat4c nearest_unitary(const Mat4c& U) {
  const Eigen::JacobiSVD<Mat4c> svd(
      U, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace chirpmix

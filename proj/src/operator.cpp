#include "eqtime/operator.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace eqtime {

Operator Operator::identity(int d) { return {Mat::Identity(d, d), true}; }
Operator Operator::zero(int d) { return {Mat::Zero(d, d), true}; }

Mat kron(const Mat& a, const Mat& b) {
  const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  Mat out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

Mat pauli(PauliAxis axis) {
  Mat p(2, 2);
  const Complex I(0.0, 1.0);
  switch (axis) {
    case PauliAxis::X:
      p << 0, 1, 1, 0;
      break;
    case PauliAxis::Y:
      p << 0, -I, I, 0;
      break;
    case PauliAxis::Z:
      p << 1, 0, 0, -1;
      break;
  }
  return p;
}

Operator pauli_site(int L, int site, PauliAxis axis) {
  if (L < 1) throw std::invalid_argument("pauli_site: L must be >= 1");
  if (site < 1 || site > L)
    throw std::invalid_argument("pauli_site: site " + std::to_string(site) +
                                " out of range 1.." + std::to_string(L));
  Mat out = Mat::Identity(1, 1);
  for (int s = 1; s <= L; ++s)
    out = kron(out, s == site ? pauli(axis) : Mat::Identity(2, 2));
  return {std::move(out), true};
}

double hermiticity_defect(const Mat& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const Mat& m, double rel_tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= rel_tol;
}

double spectral_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double real_trace_product(const Mat& a, const Mat& b) {
  return (a * b).trace().real();
}

double double_commutator_trace(const Mat& rho, const Mat& h, const Mat& a) {
  const Mat c1 = rho * h - h * rho;
  const Mat c2 = c1 * h - h * c1;
  return (c2 * a).trace().real();
}

std::string axis_name(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X:
      return "x";
    case PauliAxis::Y:
      return "y";
    case PauliAxis::Z:
      return "z";
  }
  return "?";
}

}  // namespace eqtime

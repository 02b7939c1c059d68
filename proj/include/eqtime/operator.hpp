#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace eqtime {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

enum class PauliAxis { X, Y, Z };

/// Dense operator with dimension and hermiticity metadata. Holds every
/// matrix-valued quantity in the toolkit: states, observables, Hamiltonians.
struct Operator {
  Mat m;
  bool hermitian = true;

  int dim() const { return static_cast<int>(m.rows()); }

  static Operator identity(int d);
  static Operator zero(int d);
};

/// Kronecker product a (x) b; the left factor is the most significant one,
/// so site 1 of an L-spin register is the leftmost tensor factor.
Mat kron(const Mat& a, const Mat& b);

/// 2x2 Pauli matrix.
Mat pauli(PauliAxis axis);

/// Pauli on `site` (1-based) of an L-spin register, identity elsewhere.
/// Throws std::invalid_argument when site is out of range.
Operator pauli_site(int L, int site, PauliAxis axis);

/// Max elementwise deviation from the conjugate transpose, relative to the
/// largest absolute entry (0 for the zero matrix).
double hermiticity_defect(const Mat& m);

bool is_hermitian(const Mat& m, double rel_tol = 1e-12);

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
double spectral_norm(const Mat& m);

/// Re Tr(a b), asserting the imaginary part is negligible for Hermitian
/// arguments only at the call sites that require it.
double real_trace_product(const Mat& a, const Mat& b);

/// Tr([[rho, h], h] a), real for Hermitian inputs; the imaginary remainder
/// from roundoff is discarded.
double double_commutator_trace(const Mat& rho, const Mat& h, const Mat& a);

std::string axis_name(PauliAxis axis);

}  // namespace eqtime

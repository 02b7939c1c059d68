#include "eqtime/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eqtime/rng.hpp"

namespace eqtime {

namespace {

SystemBathModel build_ring(int L, double omega,
                           const std::vector<double>& couplings,
                           std::string description) {
  if (L < 2) throw std::invalid_argument("ring: L must be >= 2");

  SystemBathModel m;
  m.L = L;
  m.d_S = 2;
  m.d_B = 1 << (L - 1);
  m.omega_scale = omega;
  m.couplings = couplings;
  m.description = std::move(description);

  const int d = 1 << L;
  Mat hs = Mat::Zero(d, d), hb = Mat::Zero(d, d), hi = Mat::Zero(d, d);

  hs = omega * pauli_site(L, 1, PauliAxis::Z).m;
  for (int l = 2; l <= L; ++l) hb += omega * pauli_site(L, l, PauliAxis::Z).m;

  // Bond l couples sites l and l+1 (periodic); bonds 1 and L touch the system.
  for (int l = 1; l <= L; ++l) {
    const int next = l == L ? 1 : l + 1;
    const Mat bond = omega * couplings[l - 1] *
                     (pauli_site(L, l, PauliAxis::X).m *
                      pauli_site(L, next, PauliAxis::X).m);
    if (l == 1 || l == L)
      hi += bond;
    else
      hb += bond;
  }

  m.H_S = {hs, true};
  m.H_B = {hb, true};
  m.H_I = {hi, true};
  m.H_total = {hs + hb + hi, true};

  m.H_S_local = omega * pauli(PauliAxis::Z);
  const int Lb = L - 1;
  Mat hbl = Mat::Zero(m.d_B, m.d_B);
  for (int l = 1; l <= Lb; ++l) hbl += omega * pauli_site(Lb, l, PauliAxis::Z).m;
  for (int l = 1; l + 1 <= Lb; ++l) {
    // bath site l is ring site l+1, so this is ring bond l+1
    hbl += omega * couplings[l] *
           (pauli_site(Lb, l, PauliAxis::X).m *
            pauli_site(Lb, l + 1, PauliAxis::X).m);
  }
  m.H_B_local = hbl;
  return m;
}

}  // namespace

SystemBathModel ising_ring(int L, double omega, double gamma) {
  std::ostringstream desc;
  desc << "ising_ring L=" << L << " omega=" << omega << " gamma=" << gamma;
  return build_ring(L, omega, std::vector<double>(L, gamma), desc.str());
}

SystemBathModel random_ring(int L, double omega, double gamma_mean,
                            double width, std::uint64_t seed) {
  if (width < 0) throw std::invalid_argument("random_ring: width must be >= 0");
  if (L < 2) throw std::invalid_argument("ring: L must be >= 2");
  Rng rng(seed);
  std::vector<double> couplings(L);
  for (int l = 0; l < L; ++l) couplings[l] = gamma_mean + width * rng.gaussian();
  std::ostringstream desc;
  desc << "random_ring L=" << L << " omega=" << omega << " gamma=" << gamma_mean
       << " w=" << width << " seed=" << seed;
  return build_ring(L, omega, couplings, desc.str());
}

Operator embed_system_observable(const Mat& a_s, const SystemBathModel& model) {
  if (a_s.rows() != model.d_S || a_s.cols() != model.d_S)
    throw std::invalid_argument("embed_system_observable: observable is " +
                                std::to_string(a_s.rows()) + "-dimensional, system is " +
                                std::to_string(model.d_S));
  return {kron(a_s, Mat::Identity(model.d_B, model.d_B)), is_hermitian(a_s)};
}

namespace {

std::vector<int> window_levels(const SpectralDecomposition& bath, double center,
                               double width) {
  std::vector<int> idx;
  for (int j = 0; j < bath.dim(); ++j) {
    const double e = bath.energies(j);
    if (e >= center - width / 2 && e <= center + width / 2) idx.push_back(j);
  }
  return idx;
}

[[noreturn]] void throw_empty_window(const SpectralDecomposition& bath,
                                     double lo, double hi) {
  double below = -std::numeric_limits<double>::infinity();
  double above = std::numeric_limits<double>::infinity();
  for (int j = 0; j < bath.dim(); ++j) {
    const double e = bath.energies(j);
    if (e < lo && e > below) below = e;
    if (e > hi && e < above) above = e;
  }
  std::ostringstream msg;
  msg << "empty microcanonical window [" << lo << ", " << hi
      << "]; nearest bath levels: " << below << " (below), " << above
      << " (above)";
  throw std::runtime_error(msg.str());
}

}  // namespace

Operator build_initial_state(const InitialStateSpec& spec,
                             const SystemBathModel& model,
                             const SpectralDecomposition& bath_decomp) {
  if (spec.system_state.rows() != model.d_S)
    throw std::invalid_argument("build_initial_state: system state dimension mismatch");

  Mat rho_b;
  switch (spec.bath_kind) {
    case BathKind::MaximallyMixed:
      rho_b = Mat::Identity(model.d_B, model.d_B) / model.d_B;
      break;
    case BathKind::Microcanonical: {
      const auto idx = window_levels(bath_decomp, spec.window_center, spec.window_width);
      if (idx.empty())
        throw_empty_window(bath_decomp, spec.window_center - spec.window_width / 2,
                           spec.window_center + spec.window_width / 2);
      rho_b = Mat::Zero(model.d_B, model.d_B);
      for (int j : idx)
        rho_b += bath_decomp.vectors.col(j) * bath_decomp.vectors.col(j).adjoint();
      rho_b /= static_cast<double>(idx.size());
      break;
    }
    case BathKind::HaarPure: {
      const auto idx = window_levels(bath_decomp, spec.window_center, spec.window_width);
      if (idx.empty())
        throw_empty_window(bath_decomp, spec.window_center - spec.window_width / 2,
                           spec.window_center + spec.window_width / 2);
      Rng rng(spec.seed);
      CVec coeff(idx.size());
      for (Eigen::Index k = 0; k < coeff.size(); ++k)
        coeff(k) = rng.complex_gaussian();
      coeff.normalize();
      CVec phi = CVec::Zero(model.d_B);
      for (Eigen::Index k = 0; k < coeff.size(); ++k)
        phi += coeff(k) * bath_decomp.vectors.col(idx[k]);
      rho_b = phi * phi.adjoint();
      break;
    }
  }
  return {kron(spec.system_state, rho_b), true};
}

int bath_window_dimension(const InitialStateSpec& spec,
                          const SpectralDecomposition& bath_decomp) {
  if (spec.bath_kind == BathKind::MaximallyMixed) return bath_decomp.dim();
  return static_cast<int>(
      window_levels(bath_decomp, spec.window_center, spec.window_width).size());
}

}  // namespace eqtime

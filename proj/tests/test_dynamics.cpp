#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "eqtime/bounds.hpp"
#include "eqtime/dynamics.hpp"
#include "eqtime/model.hpp"
#include "eqtime/rng.hpp"

using namespace eqtime;

namespace {

Mat random_hermitian(int d, std::uint64_t seed) {
  Rng rng(seed);
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.complex_gaussian();
  return 0.5 * (m + Mat(m.adjoint()));
}

Mat random_density(int d, std::uint64_t seed) {
  Rng rng(seed);
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.complex_gaussian();
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("expectation_trace matches matrix-exponential evolution") {
  const int d = 8;
  const Mat h = random_hermitian(d, 1);
  const Mat rho0 = random_density(d, 2);
  const Mat a = random_hermitian(d, 3);
  const auto decomp = diagonalize(h);
  const Mat rho_eig = to_eigenbasis(rho0, decomp);
  const Mat a_eig = to_eigenbasis(a, decomp);

  Rng rng(4);
  std::vector<double> times;
  for (int i = 0; i < 50; ++i) times.push_back(20.0 * rng.uniform());
  const auto trace = expectation_trace(rho_eig, a_eig, decomp, times);

  for (std::size_t i = 0; i < times.size(); ++i) {
    const Mat u = (Complex(0, -times[i]) * h).exp();
    const Mat rho_t = u * rho0 * u.adjoint();
    const double direct = (rho_t * a).trace().real();
    CHECK(trace.expectation[i] == doctest::Approx(direct).epsilon(1e-9));
    // Purity is conserved along the evolution.
    CHECK((rho_t * rho_t).trace().real() ==
          doctest::Approx((rho0 * rho0).trace().real()).epsilon(1e-9));
  }

  // t = 0 reproduces Tr(rho0 A) exactly (up to roundoff).
  const auto at0 = expectation_trace(rho_eig, a_eig, decomp, {0.0});
  CHECK(at0.expectation[0] ==
        doctest::Approx((rho0 * a).trace().real()).epsilon(1e-11));
}

TEST_CASE("weak_dist stays in [0,1] and starts at the eq-difference") {
  const int d = 10;
  const auto decomp = diagonalize(random_hermitian(d, 7));
  const Mat rho_eig = to_eigenbasis(random_density(d, 8), decomp);
  const Mat a_full = random_hermitian(d, 9);
  const Mat a_eig = to_eigenbasis(a_full, decomp);
  const double norm_a = spectral_norm(a_full);

  const auto dist = build_gap_distribution(rho_eig, a_eig, decomp);
  const double eq = equilibrium_expectation(rho_eig, a_eig, decomp);
  const auto times = time_grid(30.0, std::abs(dist.atoms.back().gap));
  const auto trace = expectation_trace(dist, eq, norm_a, times);

  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(trace.weak_dist[i] >= 0.0);
    CHECK(trace.weak_dist[i] <= 1.0);
  }
  const double expected0 =
      std::pow((rho_eig * a_eig).trace().real() - eq, 2) / (4 * norm_a * norm_a);
  CHECK(trace.weak_dist[0] == doctest::Approx(expected0).epsilon(1e-9));
}

TEST_CASE("commuting observable gives a constant trace") {
  const Mat h = random_hermitian(6, 11);
  const auto decomp = diagonalize(h);
  const Mat rho_eig = to_eigenbasis(random_density(6, 12), decomp);
  // A = h^2 commutes with H.
  const Mat a_eig = to_eigenbasis(Mat(h * h), decomp);
  const auto trace = expectation_trace(rho_eig, a_eig, decomp,
                                       {0.0, 0.7, 1.9, 5.0, 11.0});
  for (std::size_t i = 1; i < trace.times.size(); ++i)
    CHECK(trace.expectation[i] ==
          doctest::Approx(trace.expectation[0]).epsilon(1e-10));
  CHECK(trace.expectation[0] ==
        doctest::Approx(trace.equilibrium_value).epsilon(1e-10));
}

TEST_CASE("quadrature and spectral time averages agree") {
  const int d = 16;
  const auto decomp = diagonalize(random_hermitian(d, 21));
  const Mat rho_eig = to_eigenbasis(random_density(d, 22), decomp);
  const Mat a_eig = to_eigenbasis(random_hermitian(d, 23), decomp);
  const auto dist = build_gap_distribution(rho_eig, a_eig, decomp);

  for (double T : {0.8, 5.0, 25.0}) {
    const auto spectral = time_average_spectral(dist, T);
    REQUIRE(spectral.has_value());
    const double max_gap = std::max(std::abs(dist.atoms.front().gap),
                                    std::abs(dist.atoms.back().gap));
    const long long n =
        static_cast<long long>(std::ceil(2.0 * max_gap * T / 2e-4));
    const double quad = time_average_quadrature(dist, T, n);
    CHECK(quad == doctest::Approx(*spectral).epsilon(1e-6));
  }

  // Constant trace averages to the constant: equilibrated distribution.
  GapDistribution empty;
  empty.equilibrated = true;
  CHECK(time_average_quadrature(empty, 3.0) == 0.0);
  CHECK(time_average_spectral(empty, 3.0).value() == 0.0);
}

TEST_CASE("infinite-time limit of the spectral average") {
  // Nondegenerate gaps: <D>_T -> (1/4) sum |v_a|^2 as T -> infinity.
  const int d = 10;
  const auto decomp = diagonalize(random_hermitian(d, 31));
  const Mat rho_eig = to_eigenbasis(random_density(d, 32), decomp);
  const Mat a_eig = to_eigenbasis(random_hermitian(d, 33), decomp);
  const auto dist = build_gap_distribution(rho_eig, a_eig, decomp);

  double min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < dist.atoms.size(); ++i)
    min_spacing = std::min(min_spacing,
                           dist.atoms[i].gap - dist.atoms[i - 1].gap);
  double limit = 0.0;
  for (const auto& atom : dist.atoms) limit += std::norm(atom.amp);
  limit /= 4.0;

  const double T = 1e6 / min_spacing;
  const auto avg = time_average_spectral(dist, T);
  REQUIRE(avg.has_value());
  CHECK(std::abs(*avg - limit) / limit < 0.05);
}

TEST_CASE("pair cap refusal") {
  std::vector<double> values, weights;
  for (int i = 0; i < 50; ++i) {
    values.push_back(i * 0.3);
    weights.push_back(1.0);
  }
  const auto dist = distribution_from_point_masses(values, weights);
  CHECK(!time_average_spectral(dist, 1.0, 10).has_value());
  CHECK(!lorentzian_average(dist, 1.0, 10).has_value());
  CHECK(time_average_spectral(dist, 1.0, 50).has_value());
}

TEST_CASE("lorentzian average identities") {
  // Single oscillating term nu: modulus of the Lorentzian phase average is
  // e^{-|nu| T}; with two conjugate atoms the cross term carries it.
  const double nu = 1.7, T = 2.0;
  std::vector<Atom> atoms{{-nu, 0.5, Complex(0.5, 0)}, {nu, 0.5, Complex(0.5, 0)}};
  GapDistribution dist;
  dist.atoms = atoms;
  dist.Q = 1.0;
  const auto avg = lorentzian_average(dist, T);
  REQUIRE(avg.has_value());
  // D(t) = cos^2(nu t)/4; the cross term carries e^{-2 nu T} cos(nu T).
  const double expected =
      (1.0 + std::exp(-2.0 * nu * T) * std::cos(nu * T)) / 8.0;
  CHECK(*avg == doctest::Approx(expected).epsilon(1e-10));

  // nu = 0: the average of a constant is the constant.
  std::vector<Atom> dc{{0.0, 1.0, Complex(1.0, 0)}};
  GapDistribution dist0;
  dist0.atoms = dc;
  dist0.Q = 1.0;
  CHECK(lorentzian_average(dist0, 5.0).value() == doctest::Approx(0.25));
}

TEST_CASE("finite-time average bounded by 5pi/4 times Lorentzian average") {
  for (std::uint64_t seed : {41u, 42u, 43u, 44u}) {
    const int d = 12;
    const auto decomp = diagonalize(random_hermitian(d, seed));
    const Mat rho_eig = to_eigenbasis(random_density(d, seed + 50), decomp);
    const Mat a_eig = to_eigenbasis(random_hermitian(d, seed + 100), decomp);
    const auto dist = build_gap_distribution(rho_eig, a_eig, decomp);
    for (double T : {0.3, 1.0, 4.0, 15.0}) {
      const double finite = time_average_spectral(dist, T).value();
      const double lorentz = lorentzian_average(dist, T).value();
      CHECK(finite <= 5.0 * M_PI / 4.0 * lorentz + 1e-10);
    }
  }
}

TEST_CASE("distinguishability basics and projector-family bound") {
  const int d = 8;
  const Mat h = random_hermitian(d, 61);
  const auto decomp = diagonalize(h);
  const Mat rho0 = random_density(d, 62);
  const Mat rho_eig = to_eigenbasis(rho0, decomp);
  const Mat omega_eig = dephase(rho_eig, decomp);
  const Mat omega = from_eigenbasis(omega_eig, decomp);

  // Complete orthogonal family: eigenvectors of a random observable, paired.
  const auto obs = diagonalize(random_hermitian(d, 63));
  std::vector<Projector> family;
  for (int j = 0; j < d; j += 2) {
    Projector p;
    p.m = obs.vectors.col(j) * obs.vectors.col(j).adjoint() +
          obs.vectors.col(j + 1) * obs.vectors.col(j + 1).adjoint();
    p.rank = 2;
    family.push_back(p);
  }

  CHECK(distinguishability(family, omega, omega) == doctest::Approx(0.0));

  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  std::vector<Projector> basis{{p0, 1}, {p1, 1}};
  CHECK(distinguishability(basis, p0, p1) == doctest::Approx(1.0));

  std::vector<Projector> incomplete{{p0, 1}};
  CHECK_THROWS_AS(distinguishability(incomplete, p0, p1), std::invalid_argument);

  // <D_M>_T <= sqrt(N) sqrt(sum_i <D~_{P_i}>_T), both sides by quadrature.
  const double T = 6.0;
  const int n_t = 4000;
  double lhs = 0.0;
  std::vector<double> proj_avg(family.size(), 0.0);
  for (int i = 0; i <= n_t; ++i) {
    const double t = T * i / n_t;
    const Mat u = (Complex(0, -t) * h).exp();
    const Mat rho_t = u * rho0 * u.adjoint();
    const double w = (i == 0 || i == n_t) ? 0.5 : 1.0;
    lhs += w * distinguishability(family, rho_t, omega);
    for (std::size_t f = 0; f < family.size(); ++f) {
      const double diff = ((family[f].m * (rho_t - omega)).trace()).real();
      proj_avg[f] += w * diff * diff / 4.0;  // ||P|| = 1
    }
  }
  lhs /= n_t;
  for (auto& v : proj_avg) v /= n_t;
  CHECK(lhs <= distinguishability_bound(proj_avg) + 1e-9);
}

TEST_CASE("haar typicality: single-level window is exact") {
  const auto model = ising_ring(3, 1.0, 0.8);
  const auto decomp = diagonalize(model.H_total.m);
  const auto bath = diagonalize(model.H_B_local);
  Mat plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Mat a = embed_system_observable(pauli(PauliAxis::X), model).m;

  // Window containing exactly the lowest bath level.
  const double e0 = bath.energies(0);
  const double gap_up = bath.energies(1) - e0;
  const auto rep = haar_typicality(model, plus, a, decomp, bath, e0,
                                   gap_up * 0.5, 4, 99, 5.0, 100);
  CHECK(rep.d_B_window == 1);
  CHECK(rep.correction == doctest::Approx(2.0));
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    CHECK(rep.mean_weak_dist[i] ==
          doctest::Approx(rep.reference_weak_dist[i]).epsilon(1e-9));
  CHECK(rep.bound_holds);
}

TEST_CASE("haar typicality: small ring, time-resolved bound holds") {
  const auto model = ising_ring(5, 1.0, 1.1);
  const auto decomp = diagonalize(model.H_total.m);
  const auto bath = diagonalize(model.H_B_local);
  Mat plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Mat a = embed_system_observable(pauli(PauliAxis::X), model).m;
  const auto window = default_window(bath);
  const auto rep = haar_typicality(model, plus, a, decomp, bath, window.center,
                                   window.width, 60, 7, 20.0, 400);
  CHECK(rep.d_B_window >= 2);
  CHECK(rep.bound_holds);
  CHECK(rep.mc_mean >= 0.0);
  for (double v : rep.per_sample_avg) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

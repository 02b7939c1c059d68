#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eqtime/kernels.hpp"
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

std::vector<Atom> random_atoms(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Atom> atoms(n);
  double g = -double(n) / 2.0;
  for (int i = 0; i < n; ++i) {
    g += 0.1 + rng.uniform();
    atoms[i].gap = g;
    atoms[i].amp = rng.complex_gaussian() * 0.1;
    atoms[i].weight = std::abs(atoms[i].amp);
  }
  return atoms;
}

}  // namespace

TEST_CASE("pairwise_sum matches plain sum") {
  Rng rng(1);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = rng.gaussian();
  double plain = 0.0;
  for (double x : xs) plain += x;
  CHECK(pairwise_sum(xs) == doctest::Approx(plain).epsilon(1e-13));
  CHECK(pairwise_sum({}) == 0.0);
  CHECK(pairwise_sum({3.5}) == 3.5);
}

TEST_CASE("phi_finite_time: series vs long-double reference and quadrature") {
  // The direct formula (1 - e^{-ix})/(ix) cancels catastrophically at small
  // x, so the reference is the series summed in long double.
  for (double x : {1e-8, 1e-5, 5e-4, 9.99e-4, 1.001e-3, 0.3}) {
    std::complex<long double> mix(0.0L, -static_cast<long double>(x));
    std::complex<long double> term(1.0L, 0.0L), sum(1.0L, 0.0L);
    for (int n = 1; n <= 20; ++n) {
      term *= mix / static_cast<long double>(n + 1);
      sum += term;
    }
    const Complex ref(static_cast<double>(sum.real()),
                      static_cast<double>(sum.imag()));
    CHECK(std::abs(phi_finite_time(x) - ref) < 1e-13);
  }
  CHECK(phi_finite_time(0.0) == Complex(1.0, 0.0));
  // <e^{-i nu t}>_{[0,T]} against quadrature for a sizable argument.
  const double x = 3.7;
  const int n = 200000;
  Complex quad(0, 0);
  for (int i = 0; i <= n; ++i) {
    const double t = double(i) / n;
    quad += (i == 0 || i == n ? 0.5 : 1.0) * std::exp(Complex(0, -x * t));
  }
  quad /= n;
  CHECK(std::abs(phi_finite_time(x) - quad) < 1e-9);
}

TEST_CASE("accumulate_gap_pairs: parallel equals serial, thread-invariant") {
  const int d = 48;
  const Mat h = random_hermitian(d, 3);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Vec energies = es.eigenvalues();
  const Mat rho = random_hermitian(d, 4);
  const Mat a = random_hermitian(d, 5);

  const auto serial =
      accumulate_gap_pairs_serial(rho, a, energies, 1.0, 1e-9, 1e-14);
  const auto parallel = accumulate_gap_pairs(rho, a, energies, 1.0, 1e-9, 1e-14);

  REQUIRE(serial.entries.size() == parallel.entries.size());
  for (std::size_t i = 0; i < serial.entries.size(); ++i) {
    CHECK(serial.entries[i].j == parallel.entries[i].j);
    CHECK(serial.entries[i].k == parallel.entries[i].k);
    CHECK(serial.entries[i].v == parallel.entries[i].v);
  }
  CHECK(std::abs(serial.q - parallel.q) < 1e-13 * serial.q);
  CHECK(serial.n_pairs == parallel.n_pairs);

#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = accumulate_gap_pairs(rho, a, energies, 1.0, 1e-9, 1e-14);
  omp_set_num_threads(saved);
  const auto many = accumulate_gap_pairs(rho, a, energies, 1.0, 1e-9, 1e-14);
  CHECK(one.q == many.q);  // bitwise: chunked reduction is thread-count free
  CHECK(one.discarded_mass == many.discarded_mass);
  REQUIRE(one.entries.size() == many.entries.size());
  for (std::size_t i = 0; i < one.entries.size(); ++i)
    CHECK(one.entries[i].v == many.entries[i].v);
#endif
}

TEST_CASE("amplitude floor drops mass into discarded_mass") {
  Vec energies(3);
  energies << 0.0, 1.0, 2.0;
  Mat rho = Mat::Zero(3, 3);
  rho(0, 1) = Complex(1e-20, 0);
  rho(1, 0) = Complex(1e-20, 0);
  rho(0, 2) = Complex(0.3, 0);
  rho(2, 0) = Complex(0.3, 0);
  const Mat a = Mat::Ones(3, 3);
  const auto acc = accumulate_gap_pairs_serial(rho, a, energies, 1.0, 1e-12, 1e-14);
  CHECK(acc.entries.size() == 2);
  CHECK(acc.q == doctest::Approx(0.6));
  CHECK(acc.discarded_mass == doctest::Approx(2e-20));
  CHECK(acc.n_pairs == 6);
}

TEST_CASE("trace_series: parallel equals serial") {
  const auto atoms = random_atoms(80, 17);
  std::vector<double> times;
  for (int i = 0; i <= 333; ++i) times.push_back(0.03 * i);

  const auto serial = trace_series_serial(atoms, times);
  const auto parallel = trace_series(atoms, times);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    CHECK(std::abs(serial[i] - parallel[i]) < 1e-14);
}

TEST_CASE("pair averages: parallel equals serial, kernels sane") {
  const auto atoms = random_atoms(120, 23);
  for (double T : {0.5, 3.0, 40.0}) {
    const double ps = pair_phi_average_serial(atoms, T);
    const double pp = pair_phi_average(atoms, T);
    CHECK(pp == doctest::Approx(ps).epsilon(1e-12));

    const double ls = pair_lorentzian_average_serial(atoms, T);
    const double lp = pair_lorentzian_average(atoms, T);
    CHECK(lp == doctest::Approx(ls).epsilon(1e-12));

    CHECK(pp >= -1e-12);  // quadratic form of a time average of |f|^2
    CHECK(lp >= -1e-12);
  }

#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = pair_phi_average(atoms, 7.0);
  omp_set_num_threads(saved);
  CHECK(one == pair_phi_average(atoms, 7.0));
#endif
}

TEST_CASE("single-atom averages are exact") {
  // One oscillating term: <|e^{-iGt}|^2> = |amp|^2 / 4 exactly for the phi
  // form (the pair sum has only the diagonal entry).
  std::vector<Atom> atoms{{2.5, 0.7, Complex(0.7, 0.0)}};
  CHECK(pair_phi_average(atoms, 11.0) == doctest::Approx(0.49 / 4.0));
  CHECK(pair_lorentzian_average(atoms, 11.0) == doctest::Approx(0.49 / 4.0));
}

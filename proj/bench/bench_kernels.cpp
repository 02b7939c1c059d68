// Serial vs OpenMP kernel comparison. Build with -DCMAKE_BUILD_TYPE=Release;
// run as build/bench/bench_kernels [--benchmark_filter=...].
#include <benchmark/benchmark.h>

#include "eqtime/kernels.hpp"
#include "eqtime/rng.hpp"

using namespace eqtime;

namespace {

struct PairInputs {
  Mat rho, a;
  Vec energies;
};

PairInputs make_pair_inputs(int d) {
  Rng rng(42);
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.complex_gaussian();
  PairInputs in;
  in.rho = 0.5 * (m + Mat(m.adjoint()));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.complex_gaussian();
  in.a = 0.5 * (m + Mat(m.adjoint()));
  in.energies.resize(d);
  double e = 0;
  for (int i = 0; i < d; ++i) {
    e += rng.uniform();
    in.energies(i) = e;
  }
  return in;
}

std::vector<Atom> make_atoms(int n) {
  Rng rng(7);
  std::vector<Atom> atoms(n);
  double g = 0;
  for (int i = 0; i < n; ++i) {
    g += rng.uniform();
    atoms[i] = {g, 0.0, rng.complex_gaussian() * 0.05};
    atoms[i].weight = std::abs(atoms[i].amp);
  }
  return atoms;
}

void bm_gap_pairs_serial(benchmark::State& state) {
  const auto in = make_pair_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto acc = accumulate_gap_pairs_serial(in.rho, in.a, in.energies, 1.0,
                                           1e-9, 1e-14);
    benchmark::DoNotOptimize(acc.q);
  }
}

void bm_gap_pairs_parallel(benchmark::State& state) {
  const auto in = make_pair_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto acc = accumulate_gap_pairs(in.rho, in.a, in.energies, 1.0, 1e-9, 1e-14);
    benchmark::DoNotOptimize(acc.q);
  }
}

void bm_trace_series_serial(benchmark::State& state) {
  const auto atoms = make_atoms(static_cast<int>(state.range(0)));
  std::vector<double> times(2000);
  for (int i = 0; i < 2000; ++i) times[i] = 0.01 * i;
  for (auto _ : state) {
    auto s = trace_series_serial(atoms, times);
    benchmark::DoNotOptimize(s.data());
  }
}

void bm_trace_series_parallel(benchmark::State& state) {
  const auto atoms = make_atoms(static_cast<int>(state.range(0)));
  std::vector<double> times(2000);
  for (int i = 0; i < 2000; ++i) times[i] = 0.01 * i;
  for (auto _ : state) {
    auto s = trace_series(atoms, times);
    benchmark::DoNotOptimize(s.data());
  }
}

void bm_pair_phi_serial(benchmark::State& state) {
  const auto atoms = make_atoms(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair_phi_average_serial(atoms, 10.0));
  }
}

void bm_pair_phi_parallel(benchmark::State& state) {
  const auto atoms = make_atoms(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair_phi_average(atoms, 10.0));
  }
}

}  // namespace

BENCHMARK(bm_gap_pairs_serial)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gap_pairs_parallel)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_trace_series_serial)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_trace_series_parallel)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_pair_phi_serial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_pair_phi_parallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <complex>
#include <ebh/band.hpp>
#include <ebh/bethe.hpp>
#include <ebh/model.hpp>
#include <ebh/packet.hpp>
#include <ebh/propagate.hpp>

namespace {

ebh::ModelParams make_params(int n_sites) {
  ebh::ModelParams p;
  p.n_sites = n_sites;
  p.kappa = 1.0;
  p.u = 5.0;
  p.v = 4.0;
  p.boundary = ebh::Boundary::open;
  return p;
}

void BM_SparseApply(benchmark::State& state) {
  const auto p = make_params(static_cast<int>(state.range(0)));
  const ebh::PairBasis basis(p.n_sites);
  const auto h = ebh::build_full_hamiltonian(p, basis, 0.05);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Random(basis.dimension());
  psi /= psi.norm();
  Eigen::VectorXcd out(basis.dimension());
  for (auto _ : state) {
    out = h.apply(psi);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * h.nonzeros());
}
BENCHMARK(BM_SparseApply)->Arg(80)->Arg(160)->Arg(240);

void BM_ChebyshevStep(benchmark::State& state) {
  const auto p = make_params(static_cast<int>(state.range(0)));
  const ebh::PairBasis basis(p.n_sites);
  const auto h = ebh::build_full_hamiltonian(p, basis, 0.05);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Random(basis.dimension());
  psi /= psi.norm();
  for (auto _ : state) {
    psi = ebh::chebyshev_step(h, psi, 0.05);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_ChebyshevStep)->Arg(80)->Arg(160);

void BM_BandColumn(benchmark::State& state) {
  const auto p = make_params(160);
  const int r_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto col = ebh::solve_band_column(p, -0.8 * M_PI, r_max);
    benchmark::DoNotOptimize(col.bound.data());
  }
}
BENCHMARK(BM_BandColumn)->Arg(200)->Arg(400);

void BM_BandStructure(benchmark::State& state) {
  const auto p = make_params(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto bs = ebh::compute_band_structure(p, p.n_sites, 400);
    benchmark::DoNotOptimize(bs.k_grid().data());
  }
}
BENCHMARK(BM_BandStructure)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_CubicRoots(benchmark::State& state) {
  double u = 2.5, v = 2.0;
  for (auto _ : state) {
    auto roots = ebh::solve_bethe(u, v, ebh::Branch::plus, 0);
    benchmark::DoNotOptimize(roots.data());
    u += 1e-9;  // defeat value caching across iterations
  }
}
BENCHMARK(BM_CubicRoots);

void BM_RegionClassify(benchmark::State& state) {
  double u = -8.0;
  for (auto _ : state) {
    auto point = ebh::classify_region(u, 3.0);
    benchmark::DoNotOptimize(point.region);
    u += 0.16;
    if (u > 8.0) u = -8.0;
  }
}
BENCHMARK(BM_RegionClassify);

void BM_BuildPacket(benchmark::State& state) {
  const auto p = make_params(static_cast<int>(state.range(0)));
  const ebh::PairBasis basis(p.n_sites);
  const auto bs = ebh::compute_band_structure(p, p.n_sites, 400);
  ebh::PacketSpec spec;
  spec.n_a = p.n_sites / 2;
  for (auto _ : state) {
    auto psi = ebh::build_packet(spec, bs, basis);
    benchmark::DoNotOptimize(psi.amplitudes.data());
  }
}
BENCHMARK(BM_BuildPacket)->Arg(160)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

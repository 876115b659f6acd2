#include <benchmark/benchmark.h>

#include "molres/field.hpp"
#include "molres/rng.hpp"

namespace {

molres::ChemicalField make_field(int n) {
    molres::GridSpec g;
    g.nx = g.ny = g.nz = n;
    g.voxel_edge = 10.0;
    g.dt = 0.01;
    molres::SpeciesParams p;
    p.diffusion = 100.0;
    p.decay = 0.02;
    p.flow_velocity = 1.0;
    molres::ChemicalField f(g, p, 0.0);
    molres::Rng rng(7);
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) f.at(ix, iy, iz) = rng.uniform();
    return f;
}

void BM_FieldStep(benchmark::State& state) {
    auto field = make_field(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        field.step();
        benchmark::DoNotOptimize(field.values().data());
    }
    state.SetItemsProcessed(state.iterations() * field.grid().voxel_count());
}

void BM_FieldDepositSample(benchmark::State& state) {
    auto field = make_field(10);
    const molres::Vec3 p{55.0, 55.0, 55.0};
    for (auto _ : state) {
        field.deposit(p, 1.0);
        benchmark::DoNotOptimize(field.sample(p));
    }
}

} // namespace

BENCHMARK(BM_FieldStep)->Arg(10)->Arg(20);
BENCHMARK(BM_FieldDepositSample);

#include <benchmark/benchmark.h>

#include "molres/bacteria.hpp"

namespace {

void BM_AgentSenseAndMove(benchmark::State& state) {
    molres::GridSpec g;
    g.nx = g.ny = g.nz = 10;
    g.voxel_edge = 10.0;
    g.dt = 0.01;
    molres::ChemoParams chemo;
    molres::MetabolicParams metab;
    molres::ChemicalField attract(g, molres::SpeciesParams{molres::Species::attractant}, 1.0);
    molres::ChemicalField repel(g, molres::SpeciesParams{molres::Species::repellent}, 0.5);
    molres::ChemicalField glucose(g, molres::SpeciesParams{molres::Species::glucose}, 5.0);

    molres::Population pop(11);
    pop.spawn_uniform(static_cast<int>(state.range(0)), g, chemo, metab);

    for (auto _ : state) {
        for (auto& b : pop.agents()) {
            const double ca = attract.sample(b.position);
            const double cr = repel.sample(b.position);
            molres::step_methylation(b, ca, cr, chemo, g.dt);
            molres::step_motion(b, chemo, g, g.dt);
            benchmark::DoNotOptimize(
                molres::step_metabolism_rate(b, glucose.sample(b.position), metab, g.dt));
        }
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_AgentSenseAndMove)->Arg(90)->Arg(700);

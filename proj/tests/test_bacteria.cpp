#include <doctest.h>

#include <cmath>
#include <sstream>

#include "molres/bacteria.hpp"

using namespace molres;

namespace {

ChemoParams chemo_defaults() { return ChemoParams{}; }

GridSpec box(int n = 10, double edge = 10.0, double dt = 0.01) {
    GridSpec g;
    g.nx = g.ny = g.nz = n;
    g.voxel_edge = edge;
    g.dt = dt;
    return g;
}

// Methylation level that produces a prescribed activity at the given ligand
// concentrations (inverts the logistic form).
double methylation_for_activity(double a, double c_attr, double c_rep, const ChemoParams& p) {
    const double f = std::log((1.0 - a) / a) / p.cooperativity;
    const double ligand = std::log1p(c_attr / p.attract_half) - std::log1p(c_rep / p.repel_half);
    return p.meth_ref + (f - ligand) / p.meth_slope;
}

Bacterium make_agent(std::uint64_t id, Vec3 pos) {
    Bacterium b;
    b.id = id;
    b.rng = Rng::stream(1234, stream_tag::bacterium, id);
    b.position = pos;
    return b;
}

} // namespace

TEST_CASE("receptor activity: symmetric point and monotonicity") {
    const ChemoParams p = chemo_defaults();
    CHECK(receptor_activity(0.0, 0.0, p.meth_ref, p) == doctest::Approx(0.5).epsilon(1e-15));

    // Attractant lowers activity, monotonically, to zero in the limit.
    double prev = receptor_activity(0.0, 0.0, p.meth_ref, p);
    for (double c : {0.1, 0.5, 2.0, 10.0, 1e3, 1e6}) {
        const double a = receptor_activity(c, 0.0, p.meth_ref, p);
        CHECK(a < prev);
        prev = a;
    }
    CHECK(prev < 1e-6);

    // Repellent raises activity.
    CHECK(receptor_activity(0.0, 5.0, p.meth_ref, p) > 0.5);

    // Equal ligands with equal half-constants cancel.
    ChemoParams eq = p;
    eq.attract_half = eq.repel_half = 0.7;
    CHECK(receptor_activity(3.3, 3.3, p.meth_ref, eq) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("methylation increments match the stated rate law") {
    const ChemoParams p = chemo_defaults();
    const double dt = 0.05;

    SUBCASE("zero activity integrates at +k_R") {
        Bacterium b = make_agent(0, {5, 5, 5});
        b.activity = 0.0;
        b.methylation = 2.0;
        step_methylation(b, 0.0, 0.0, p, dt);
        CHECK(b.methylation == doctest::Approx(2.0 + dt * p.meth_rate).epsilon(1e-15));
    }
    SUBCASE("full activity integrates at -k_B") {
        Bacterium b = make_agent(0, {5, 5, 5});
        b.activity = 1.0;
        b.methylation = 2.0;
        step_methylation(b, 0.0, 0.0, p, dt);
        CHECK(b.methylation == doctest::Approx(2.0 - dt * p.demeth_rate).epsilon(1e-15));
    }
    SUBCASE("adapted activity is a fixed point of methylation") {
        const double a_star = p.meth_rate / (p.meth_rate + p.demeth_rate);
        Bacterium b = make_agent(0, {5, 5, 5});
        const double c_attr = 2.0;
        b.methylation = methylation_for_activity(a_star, c_attr, 0.0, p);
        b.activity = receptor_activity(c_attr, 0.0, b.methylation, p);
        CHECK(b.activity == doctest::Approx(a_star).epsilon(1e-9));
        step_methylation(b, c_attr, 0.0, p, dt);
        CHECK(b.activity == doctest::Approx(a_star).epsilon(1e-9));
    }
}

TEST_CASE("exact adaptation: activity returns to k_R/(k_R+k_B) at any ligand level") {
    const ChemoParams p = chemo_defaults();
    const double a_star = p.meth_rate / (p.meth_rate + p.demeth_rate);
    for (double level : {0.1, 1.0, 10.0}) {
        Bacterium b = make_agent(0, {5, 5, 5});
        b.methylation = p.meth_ref;
        b.activity = receptor_activity(level, 0.0, b.methylation, p);
        const double dt = 0.05;
        for (int i = 0; i < 200000; ++i) step_methylation(b, level, 0.0, p, dt);
        CHECK(b.activity == doctest::Approx(a_star).epsilon(1e-3));
    }
}

TEST_CASE("fading memory: after a ligand step is removed the deviation decays") {
    const ChemoParams p = chemo_defaults();
    const double a_star = p.meth_rate / (p.meth_rate + p.demeth_rate);
    Bacterium b = make_agent(0, {5, 5, 5});
    b.methylation = p.meth_ref;
    b.activity = 0.5;
    const double dt = 0.05;
    // Expose to attractant long enough to adapt, then remove it. The first
    // ligand-free step registers the activity jump; the deviation must decay
    // monotonically from there.
    for (int i = 0; i < 100000; ++i) step_methylation(b, 4.0, 0.0, p, dt);
    step_methylation(b, 0.0, 0.0, p, dt);
    double prev = std::abs(b.activity - a_star);
    CHECK(prev > 0.01); // the step removal actually perturbed the activity
    bool monotone = true;
    bool settled = false;
    for (int i = 0; i < 400000 && !settled; ++i) {
        step_methylation(b, 0.0, 0.0, p, dt);
        const double dev = std::abs(b.activity - a_star);
        monotone = monotone && dev <= prev + 1e-12;
        prev = dev;
        settled = dev < 1e-3;
    }
    CHECK(monotone);
    CHECK(settled);
}

TEST_CASE("tumble probability: base rate, monotone response, small-dt expansion") {
    const ChemoParams p = chemo_defaults();
    const double dt = 0.01;
    CHECK(tumble_probability(p.adapted_activity, p, dt) ==
          doctest::Approx(1.0 - std::exp(-p.tumble_base * dt)).epsilon(1e-15));

    // Lower activity (attractant increasing) lengthens runs.
    CHECK(tumble_probability(p.adapted_activity - 0.1, p, dt) <
          tumble_probability(p.adapted_activity, p, dt));

    // p ~ lambda*dt within 1% when lambda*dt < 0.01.
    const double a = p.adapted_activity - 0.05;
    const double lambda = p.tumble_base * std::exp(p.tumble_gain * (a - p.adapted_activity));
    const double tiny = 0.005 / lambda;
    const double prob = tumble_probability(a, p, tiny);
    CHECK(prob == doctest::Approx(lambda * tiny).epsilon(0.01));
}

TEST_CASE("motion: straight run when the tumble draw cannot fire") {
    ChemoParams p = chemo_defaults();
    p.tumble_base = 1e-300; // rate so small the uniform draw never beats it
    p.run_speed = 20.0;
    const GridSpec g = box();
    Bacterium b = make_agent(3, {50, 50, 50});
    b.heading = {1.0, 0.0, 0.0};
    const Vec3 before = b.position;
    step_motion(b, p, g, 0.01);
    CHECK(b.position.x == doctest::Approx(before.x + 0.2).epsilon(1e-12));
    CHECK(b.position.y == before.y);
    CHECK(b.position.z == before.z);
}

TEST_CASE("motion: reflection flips the heading and preserves unit norm") {
    ChemoParams p = chemo_defaults();
    p.tumble_base = 1e-300;
    p.run_speed = 30.0;
    const GridSpec g = box();
    Bacterium b = make_agent(4, {99.9, 50, 50});
    b.heading = {1.0, 0.0, 0.0};
    step_motion(b, p, g, 0.01); // would land at 100.2, reflects to 99.8
    CHECK(b.position.x == doctest::Approx(99.8).epsilon(1e-12));
    CHECK(b.heading.x == -1.0);
    CHECK(b.heading.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("motion: ensemble mean displacement vanishes without a gradient") {
    ChemoParams p = chemo_defaults();
    p.run_speed = 20.0;
    const GridSpec g = box(10, 100.0, 0.01); // 1 mm box, few wall contacts
    const int n = 10000;
    const int steps = 200;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        Bacterium b = make_agent(static_cast<std::uint64_t>(i), {500, 500, 500});
        b.heading = b.rng.unit_vector();
        for (int s = 0; s < steps; ++s) step_motion(b, p, g, 0.01);
        const double dx = b.position.x - 500.0;
        sum += dx;
        sumsq += dx * dx;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double sem = std::sqrt(var / n);
    CHECK(std::abs(mean) < 3.0 * sem);
}

TEST_CASE("metabolism: decay, half-saturation and fixed point") {
    const MetabolicParams m;
    const double dt = 0.05;

    Bacterium b = make_agent(0, {5, 5, 5});
    b.energy = 1.0;
    step_metabolism_rate(b, 0.0, m, dt);
    CHECK(b.energy == doctest::Approx(1.0 - dt * m.expenditure * 1.0).epsilon(1e-15));

    Bacterium h = make_agent(0, {5, 5, 5});
    h.energy = 0.0;
    const double uptake = step_metabolism_rate(h, m.glucose_half, m, dt);
    CHECK(uptake == doctest::Approx(m.uptake_max / 2.0).epsilon(1e-12));

    Bacterium fp = make_agent(0, {5, 5, 5});
    fp.energy = 0.0;
    const double c = 3.0;
    for (int i = 0; i < 200000; ++i) step_metabolism_rate(fp, c, m, dt);
    const double e_star = m.uptake_max * c / ((m.glucose_half + c) * m.expenditure);
    CHECK(fp.energy == doctest::Approx(e_star).epsilon(1e-8));
}

TEST_CASE("metabolism withdraws the converted glucose from the field") {
    const GridSpec g = box();
    SpeciesParams sp;
    sp.species_id = Species::glucose;
    ChemicalField glucose(g, sp, 2.0);
    MetabolicParams m;
    m.molecules_per_energy = 100.0;
    Bacterium b = make_agent(0, {5, 5, 5});
    const double mass_before = glucose.total_mass();
    const double consumed = step_metabolism(b, glucose, m, 0.1);
    const double expected_uptake = m.uptake_max * 2.0 / (m.glucose_half + 2.0);
    CHECK(consumed == doctest::Approx(expected_uptake * 0.1 * 100.0).epsilon(1e-12));
    CHECK(mass_before - glucose.total_mass() == doctest::Approx(consumed).epsilon(1e-9));
}

TEST_CASE("energy stays nonnegative when dt*eta < 1") {
    MetabolicParams m;
    m.expenditure = 0.5;
    Rng rng(7);
    Bacterium b = make_agent(0, {5, 5, 5});
    b.energy = 0.0;
    for (int i = 0; i < 10000; ++i) {
        step_metabolism_rate(b, rng.uniform() < 0.5 ? 0.0 : 5.0 * rng.uniform(), m, 0.5);
        CHECK(b.energy >= 0.0);
    }
}

TEST_CASE("AHL production saturates in glucose") {
    QuorumParams q;
    q.production_max = 50.0;
    q.glucose_half = 2.0;
    CHECK(ahl_production_rate(0.0, q) == 0.0);
    CHECK(ahl_production_rate(q.glucose_half, q) == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(ahl_production_rate(1e9, q) == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("lifecycle: division halves energy and conserves it") {
    const GridSpec g = box();
    ChemicalField repel(g, SpeciesParams{Species::repellent}, 0.0);
    MetabolicParams m;

    Population pop(42);
    pop.spawn_uniform(1, g, chemo_defaults(), m);
    pop.agents()[0].energy = m.divide_energy;
    pop.agents()[0].methylation = 1.7;
    const Vec3 mother_pos = pop.agents()[0].position;

    lifecycle(pop, repel, m, 0.0);
    REQUIRE(pop.alive_count() == 2);
    CHECK(pop.agents()[0].energy == m.divide_energy / 2.0);
    CHECK(pop.agents()[1].energy == m.divide_energy / 2.0);
    CHECK(pop.agents()[1].methylation == 1.7); // inherited
    CHECK(pop.agents()[1].id != pop.agents()[0].id);
    const double offset = (pop.agents()[1].position - mother_pos).norm();
    CHECK(offset == doctest::Approx(m.cell_length).epsilon(1e-9));
}

TEST_CASE("lifecycle: starvation, toxicity and baseline death") {
    const GridSpec g = box();
    MetabolicParams m;

    SUBCASE("starved agent is removed") {
        ChemicalField repel(g, SpeciesParams{Species::repellent}, 0.0);
        Population pop(42);
        pop.spawn_uniform(1, g, chemo_defaults(), m);
        pop.agents()[0].energy = 0.0;
        lifecycle(pop, repel, m, 0.0);
        CHECK(pop.alive_count() == 0);
    }
    SUBCASE("toxic voxel kills") {
        ChemicalField repel(g, SpeciesParams{Species::repellent}, m.tox_threshold * 2.0);
        Population pop(42);
        pop.spawn_uniform(3, g, chemo_defaults(), m);
        lifecycle(pop, repel, m, 0.0);
        CHECK(pop.alive_count() == 0);
    }
    SUBCASE("baseline death probability one removes everyone") {
        ChemicalField repel(g, SpeciesParams{Species::repellent}, 0.0);
        Population pop(42);
        pop.spawn_uniform(5, g, chemo_defaults(), m);
        lifecycle(pop, repel, m, 1.0);
        CHECK(pop.alive_count() == 0);
    }
    SUBCASE("division precedes removal checks") {
        // A dividing mother in a toxic voxel produces a daughter, then both die.
        ChemicalField repel(g, SpeciesParams{Species::repellent}, m.tox_threshold * 2.0);
        Population pop(42);
        pop.spawn_uniform(1, g, chemo_defaults(), m);
        pop.agents()[0].energy = m.divide_energy;
        lifecycle(pop, repel, m, 0.0);
        CHECK(pop.alive_count() == 0);
    }
}

TEST_CASE("lifecycle oracle: ample glucose keeps a small population non-decreasing") {
    const GridSpec g = box();
    ChemicalField repel(g, SpeciesParams{Species::repellent}, 0.0);
    ChemicalField glucose(g, SpeciesParams{Species::glucose}, 1000.0);
    MetabolicParams m;
    m.base_death_prob = 0.0;

    Population pop(7);
    pop.spawn_uniform(10, g, chemo_defaults(), m);
    std::size_t prev = pop.alive_count();
    bool non_decreasing = true;
    for (int step = 0; step < 3000; ++step) {
        for (auto& b : pop.agents()) step_metabolism(b, glucose, m, 0.05);
        lifecycle(pop, repel, m, 0.0);
        non_decreasing = non_decreasing && pop.alive_count() >= prev;
        prev = pop.alive_count();
    }
    CHECK(non_decreasing);
    CHECK(pop.alive_count() > 10); // growth actually happened
}

TEST_CASE("population CSV export schema") {
    const GridSpec g = box();
    Population pop(42);
    pop.spawn_uniform(1, g, chemo_defaults(), MetabolicParams{});
    std::ostringstream out;
    out << population_csv_header() << '\n';
    append_population_csv(out, pop, 12);
    const std::string text = out.str();
    CHECK(text.rfind("step,agent_id,px,py,pz,m,a,E\n12,0,", 0) == 0);
}

TEST_CASE("parameter validation rejects inconsistent thresholds") {
    MetabolicParams m;
    m.death_energy = m.divide_energy;
    CHECK_THROWS_AS(m.validate(0.01), config_error);
    MetabolicParams slow;
    CHECK_THROWS_AS(slow.validate(1.0 / slow.expenditure), config_error);
    ChemoParams c;
    c.adapted_activity = 1.0;
    CHECK_THROWS_AS(c.validate(), config_error);
}

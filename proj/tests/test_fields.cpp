#include <doctest.h>

#include <cmath>
#include <sstream>

#include "molres/field.hpp"
#include "molres/rng.hpp"

using namespace molres;

namespace {

GridSpec small_grid(double dt = 0.01, double edge = 10.0) {
    GridSpec g;
    g.nx = g.ny = g.nz = 10;
    g.voxel_edge = edge;
    g.dt = dt;
    return g;
}

SpeciesParams species(double d, double decay, double v) {
    SpeciesParams p;
    p.species_id = Species::attractant;
    p.diffusion = d;
    p.decay = decay;
    p.flow_velocity = v;
    return p;
}

ChemicalField random_field(const GridSpec& g, const SpeciesParams& p, std::uint64_t seed) {
    ChemicalField f(g, p, 0.0);
    Rng rng(seed);
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) f.at(ix, iy, iz) = 10.0 * rng.uniform();
    return f;
}

} // namespace

TEST_CASE("new field: zero and uniform initialization") {
    const GridSpec g = small_grid();
    ChemicalField zero(g, species(100.0, 0.0, 0.0), 0.0);
    CHECK(zero.values().size() == 1000);
    for (double c : zero.values()) CHECK(c == 0.0);
    CHECK(zero.total_mass() == 0.0);

    ChemicalField uniform(g, species(100.0, 0.0, 0.0), 5.0);
    CHECK(uniform.total_mass() == doctest::Approx(5.0 * 1000.0 * g.voxel_volume()).epsilon(1e-12));
}

TEST_CASE("configuration errors: bad dims and stability bounds") {
    GridSpec bad = small_grid();
    bad.nx = 0;
    CHECK_THROWS_AS(ChemicalField(bad, species(1.0, 0.0, 0.0), 0.0), config_error);

    GridSpec g = small_grid();
    g.dt = -1.0;
    CHECK_THROWS_AS(ChemicalField(g, species(1.0, 0.0, 0.0), 0.0), config_error);

    // dt > edge^2 / (6 D) must be rejected.
    GridSpec unstable = small_grid(/*dt=*/1.0);
    CHECK_THROWS_AS(ChemicalField(unstable, species(100.0, 0.0, 0.0), 0.0), config_error);
    // and the advection CFL bound v*dt <= edge.
    GridSpec cfl = small_grid(/*dt=*/1.0);
    CHECK_THROWS_AS(ChemicalField(cfl, species(0.0, 0.0, 20.0), 0.0), config_error);

    ChemicalField ok(small_grid(), species(100.0, 0.0, 0.0), 0.0);
    CHECK_THROWS_AS(ok.deposit({5.0, 5.0, 5.0}, -1.0), config_error);
}

TEST_CASE("uniform field is a fixed point of diffusion") {
    ChemicalField f(small_grid(), species(100.0, 0.0, 0.0), 3.25);
    const std::vector<double> before = f.values();
    for (int i = 0; i < 10; ++i) f.step();
    CHECK(f.values() == before); // bitwise: no-flux symmetry
}

TEST_CASE("decay-only voxel follows the exact exponential") {
    const GridSpec g = small_grid();
    const double alpha = 0.37;
    ChemicalField f(g, species(0.0, alpha, 0.0), 0.0);
    f.deposit({15.0, 15.0, 15.0}, 1000.0);
    const double c0 = f.sample({15.0, 15.0, 15.0});
    const int steps = 500;
    for (int i = 0; i < steps; ++i) f.step();
    const double expected = c0 * std::exp(-alpha * g.dt * steps);
    CHECK(f.sample({15.0, 15.0, 15.0}) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("diffusion-only mass conservation") {
    const GridSpec g = small_grid();
    ChemicalField f = random_field(g, species(100.0, 0.0, 0.0), 17);
    const double m0 = f.total_mass();
    f.step();
    CHECK(f.total_mass() == doctest::Approx(m0).epsilon(1e-12));
    for (int i = 0; i < 999; ++i) f.step();
    CHECK(f.total_mass() == doctest::Approx(m0).epsilon(1e-9));
}

TEST_CASE("deposit semantics") {
    const GridSpec g = small_grid();
    ChemicalField f(g, species(100.0, 0.01, 1.0), 0.0);
    const std::vector<double> before = f.values();
    f.deposit({35.0, 45.0, 55.0}, 0.0);
    CHECK(f.values() == before);

    const double amount = 8.0; // power of two keeps the linearity check exact
    f.deposit({35.0, 45.0, 55.0}, amount);
    CHECK(f.sample({35.0, 45.0, 55.0}) == amount / g.voxel_volume());
    int nonzero = 0;
    for (double c : f.values())
        if (c != 0.0) ++nonzero;
    CHECK(nonzero == 1);

    ChemicalField once(g, species(100.0, 0.01, 1.0), 0.0);
    once.deposit({35.0, 45.0, 55.0}, 2 * amount);
    ChemicalField twice(g, species(100.0, 0.01, 1.0), 0.0);
    twice.deposit({35.0, 45.0, 55.0}, amount);
    twice.deposit({35.0, 45.0, 55.0}, amount);
    CHECK(once.values() == twice.values());

    CHECK_THROWS_AS(f.deposit({-1.0, 0.0, 0.0}, 1.0), domain_error);
}

TEST_CASE("withdraw clamps to availability") {
    const GridSpec g = small_grid();
    ChemicalField f(g, species(0.0, 0.0, 0.0), 0.0);
    const Vec3 p{5.0, 5.0, 5.0};

    CHECK(f.withdraw(p, 10.0) == 0.0);
    CHECK(f.total_mass() == 0.0);

    f.deposit(p, 100.0);
    CHECK(f.withdraw(p, 30.0) == 30.0);
    CHECK(f.withdraw(p, 1000.0) == doctest::Approx(70.0).epsilon(1e-12));
    CHECK(f.sample(p) == 0.0);

    CHECK_THROWS_AS(f.withdraw({0.0, 0.0, 1e9}, 1.0), domain_error);
}

TEST_CASE("sample: piecewise-constant and boundary tie-break") {
    const GridSpec g = small_grid();
    ChemicalField f(g, species(0.0, 0.0, 0.0), 2.5);
    CHECK(f.sample({1.0, 1.0, 1.0}) == 2.5);

    ChemicalField pulse(g, species(0.0, 0.0, 0.0), 0.0);
    pulse.deposit({5.0, 5.0, 5.0}, 4.0);
    CHECK(pulse.sample({5.0, 5.0, 5.0}) == 4.0 / g.voxel_volume());

    // The plane x = 10 sits between voxels 0 and 1: lower index wins.
    ChemicalField tie(g, species(0.0, 0.0, 0.0), 0.0);
    tie.at(0, 0, 0) = 1.0;
    tie.at(1, 0, 0) = 2.0;
    CHECK(tie.sample({10.0, 5.0, 5.0}) == 1.0);
    CHECK(tie.sample({10.0 + 1e-9, 5.0, 5.0}) == 2.0);
    // The domain boundary itself belongs to the last voxel.
    tie.at(9, 0, 0) = 7.0;
    CHECK(tie.sample({100.0, 5.0, 5.0}) == 7.0);
}

TEST_CASE("total mass of uniform field") {
    const GridSpec g = small_grid();
    ChemicalField f(g, species(0.0, 0.0, 0.0), 1.75);
    CHECK(f.total_mass() == doctest::Approx(1.75 * 1000 * g.voxel_volume()).epsilon(1e-12));
}

TEST_CASE("washout: decay or flow drives the sup-norm below 1e-6 of peak") {
    const GridSpec g = small_grid();
    SUBCASE("decay only") {
        ChemicalField f(g, species(100.0, 0.02, 0.0), 0.0);
        f.deposit({15.0, 55.0, 55.0}, 1e6);
        const double peak = f.max_concentration();
        double prev = peak;
        bool reached = false;
        bool monotone = true;
        for (int i = 0; i < 200000 && !reached; ++i) {
            f.step();
            const double m = f.max_concentration();
            monotone = monotone && m <= prev * (1.0 + 1e-12);
            prev = m;
            reached = m < 1e-6 * peak;
        }
        CHECK(monotone);
        CHECK(reached);
    }
    SUBCASE("flow only") {
        ChemicalField f(g, species(100.0, 0.0, 1.0), 0.0);
        f.deposit({15.0, 55.0, 55.0}, 1e6);
        const double peak = f.max_concentration();
        bool reached = false;
        for (int i = 0; i < 200000 && !reached; ++i) {
            f.step();
            reached = f.max_concentration() < 1e-6 * peak;
        }
        CHECK(reached);
    }
}

TEST_CASE("nonnegativity under admissible random parameters") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        GridSpec g;
        g.nx = 6;
        g.ny = 5;
        g.nz = 4;
        g.voxel_edge = 8.0;
        g.dt = 0.02;
        SpeciesParams p = species(rng.uniform() * g.voxel_edge * g.voxel_edge / (6.0 * g.dt),
                                  rng.uniform() * 2.0, rng.uniform() * g.voxel_edge / g.dt);
        ChemicalField f = random_field(g, p, 1000 + trial);
        for (int i = 0; i < 50; ++i) f.step();
        for (double c : f.values()) CHECK(c >= 0.0);
    }
}

TEST_CASE("advection oracle: unit-CFL pulse translates one voxel per step") {
    GridSpec g = small_grid(/*dt=*/1.0);
    SpeciesParams p = species(0.0, 0.0, 10.0); // v dt == edge, exact shift
    ChemicalField f(g, p, 0.0);
    f.deposit({25.0, 55.0, 55.0}, 1000.0); // voxel ix = 2
    const double c0 = f.at(2, 5, 5);
    const double m0 = f.total_mass();

    f.step();
    CHECK(f.at(3, 5, 5) == c0);
    CHECK(f.at(2, 5, 5) == 0.0);
    CHECK(f.total_mass() == doctest::Approx(m0).epsilon(1e-12));

    // Mass leaves only once the pulse crosses the x+ face.
    for (int i = 0; i < 6; ++i) f.step();
    CHECK(f.at(9, 5, 5) == c0);
    CHECK(f.total_mass() == doctest::Approx(m0).epsilon(1e-12));
    f.step();
    CHECK(f.total_mass() == 0.0);
}

TEST_CASE("advection: mass exits only through the x+ face") {
    GridSpec g = small_grid(/*dt=*/0.5);
    SpeciesParams p = species(0.0, 0.0, 1.0);
    const double cfl = p.flow_velocity * g.dt / g.voxel_edge;
    ChemicalField f(g, p, 0.0);
    f.deposit({5.0, 55.0, 55.0}, 1000.0);
    const double m0 = f.total_mass();

    // Book the upwind outflow flux each step; the budget must close exactly,
    // which pins every loss to the x+ face.
    double outflow = 0.0;
    double centroid_before = 0.0;
    bool drifts = true;
    for (int i = 0; i < 400; ++i) {
        double face = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int iz = 0; iz < g.nz; ++iz) face += f.at(g.nx - 1, iy, iz);
        outflow += cfl * face * g.voxel_volume();
        f.step();

        double centroid = 0.0, mass = 0.0;
        for (int ix = 0; ix < g.nx; ++ix) {
            centroid += f.at(ix, 5, 5) * ix;
            mass += f.at(ix, 5, 5);
        }
        if (mass > 0.0) {
            centroid /= mass;
            drifts = drifts && centroid >= centroid_before - 1e-12;
            centroid_before = centroid;
        }
    }
    CHECK(drifts);
    CHECK(f.total_mass() + outflow == doctest::Approx(m0).epsilon(1e-9));
    CHECK(outflow > 0.0);
}

TEST_CASE("glucose chemostat relaxes toward the target") {
    GridSpec g = small_grid();
    SpeciesParams p = species(0.0, 0.0, 0.0);
    p.replenish_rate = 0.05;
    p.replenish_target = 5.0;
    ChemicalField f(g, p, 5.0);
    const std::vector<double> before = f.values();
    f.step();
    CHECK(f.values() == before); // target is a fixed point

    ChemicalField low(g, p, 1.0);
    double prev = low.sample({5.0, 5.0, 5.0});
    for (int i = 0; i < 20000; ++i) low.step(); // 200 s >> 1/k_repl
    const double after = low.sample({5.0, 5.0, 5.0});
    CHECK(after > prev);
    CHECK(after == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("parallel stepping is bit-identical to sequential") {
    const GridSpec g = small_grid();
    ChemicalField serial = random_field(g, species(100.0, 0.02, 1.0), 7);
    ChemicalField parallel = serial;
    for (int i = 0; i < 100; ++i) {
        serial.step(1);
        parallel.step(4);
    }
    CHECK(serial.values() == parallel.values());
}

TEST_CASE("snapshot CSV export schema") {
    GridSpec g;
    g.nx = 2;
    g.ny = 1;
    g.nz = 1;
    g.voxel_edge = 10.0;
    g.dt = 0.01;
    ChemicalField f(g, species(0.0, 0.0, 0.0), 0.0);
    f.at(0, 0, 0) = 1.5;
    f.at(1, 0, 0) = 2.5;

    std::ostringstream out;
    out << field_snapshot_csv_header() << '\n';
    append_field_snapshot_csv(out, f, 3);
    CHECK(out.str() == "step,species,ix,iy,iz,conc\n"
                       "3,attractant,0,0,0,1.5\n"
                       "3,attractant,1,0,0,2.5\n");
}

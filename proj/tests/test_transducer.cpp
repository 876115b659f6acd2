#include <doctest.h>

#include <cmath>
#include <vector>

#include "molres/transducer.hpp"

using namespace molres;

namespace {

ACParams params(double ku, double gx, double kx, double gs) {
    ACParams p;
    p.input_gain = ku;
    p.filter_decay = gx;
    p.stage_coupling = kx;
    p.readiness_decay = gs;
    return p;
}

// Brute-force oracle: explicit Euler with substeps fine enough that its own
// error is far below the comparison tolerance.
ACState euler_oracle(ACState s, double u, const ACParams& p, double dt, int substeps) {
    const double h = dt / substeps;
    for (int i = 0; i < substeps; ++i) {
        const double dx = p.input_gain * u - p.filter_decay * s.filtered;
        const double ds = p.stage_coupling * s.filtered - p.readiness_decay * s.readiness;
        s.filtered += h * dx;
        s.readiness += h * ds;
    }
    return s;
}

} // namespace

TEST_CASE("rest state is a fixed point at zero input") {
    ACState s;
    const ACParams p = params(1.0, 0.5, 1.0, 0.5);
    const ACState out = step_internal(s, 0.0, p, 0.1);
    CHECK(out.filtered == 0.0);
    CHECK(out.readiness == 0.0);
}

TEST_CASE("constant input converges to the analytic fixed point") {
    const ACParams p = params(1.3, 0.5, 0.8, 0.25);
    const double u = 0.7;
    ACState s;
    for (int i = 0; i < 4000; ++i) s = step_internal(s, u, p, 0.05);
    const double x_star = p.input_gain * u / p.filter_decay;
    const double s_star = p.stage_coupling * x_star / p.readiness_decay;
    CHECK(s.filtered == doctest::Approx(x_star).epsilon(1e-8));
    CHECK(s.readiness == doctest::Approx(s_star).epsilon(1e-8));
}

TEST_CASE("exact step agrees with a 1000x finer Euler oracle") {
    // At the simulation timestep the Euler oracle's own bias is below 1e-7,
    // so a 1e-6 comparison (floored at unit scale) is meaningful.
    struct Case {
        ACParams p;
        double u, dt, x0, s0;
    };
    const std::vector<Case> cases = {
        {params(1.0, 0.5, 1.0, 0.5), 1.0, 0.01, 0.0, 0.0},    // equal decay rates
        {params(2.0, 0.9, 0.4, 0.3), 0.5, 0.02, 1.5, -0.2},   // distinct rates
        {params(1.0, 0.0, 1.0, 0.5), 1.0, 0.01, 0.3, 0.1},    // undamped filter
        {params(1.0, 0.5, 1.0, 0.0), 1.0, 0.01, 0.3, 0.1},    // undamped readiness
        {params(1.0, 0.0, 1.0, 0.0), 0.8, 0.01, 0.2, 0.4},    // double integrator
        {params(1.0, 1e-9, 1.0, 0.5), 1.0, 0.01, 0.3, 0.1},   // near-zero rate
        {params(1.0, 0.5, 1.0, 0.5 + 1e-10), 1.0, 0.01, 0.3, 0.1}, // nearly equal rates
    };
    for (const auto& c : cases) {
        ACState s;
        s.filtered = c.x0;
        s.readiness = c.s0;
        const ACState exact = step_internal(s, c.u, c.p, c.dt);
        const ACState brute = euler_oracle(s, c.u, c.p, c.dt, 1000);
        const double scale =
            std::max({1.0, std::abs(brute.filtered), std::abs(brute.readiness)});
        CHECK(std::abs(exact.filtered - brute.filtered) <= 1e-6 * scale);
        CHECK(std::abs(exact.readiness - brute.readiness) <= 1e-6 * scale);
    }
}

TEST_CASE("exact step agrees with a very fine RK4-free reference at coarse dt") {
    // Cross-check at a window-scale step against 10^6 Euler substeps, whose
    // bias is ~1e-8; this pins the closed form itself rather than dt size.
    const ACParams p = params(2.0, 0.9, 0.4, 0.3);
    ACState s;
    s.filtered = 1.5;
    s.readiness = -0.2;
    const ACState exact = step_internal(s, 0.5, p, 0.2);
    const ACState brute = euler_oracle(s, 0.5, p, 0.2, 1000000);
    CHECK(exact.filtered == doctest::Approx(brute.filtered).epsilon(1e-6));
    CHECK(exact.readiness == doctest::Approx(brute.readiness).epsilon(1e-6));
}

TEST_CASE("gate boundaries follow the strict pulse inequalities") {
    ACParams p = params(1.0, 0.5, 1.0, 0.5);
    p.window = 10.0;
    p.pulse = 5.0;
    CHECK(gate(p.pulse / 2.0, p) == 1);
    CHECK(gate(p.pulse, p) == 0);
    CHECK(gate(0.0, p) == 0);
    CHECK(gate(p.window - 1e-9, p) == 0);
}

TEST_CASE("secretion rate is gain * readiness * gate") {
    ACParams p = params(1.0, 0.5, 1.0, 0.5);
    p.secretion_gain = 10.0;
    ACState s;
    s.readiness = 0.0;
    CHECK(secretion_rate(s, 2.0, p) == 0.0);
    s.readiness = 2.0;
    CHECK(secretion_rate(s, 7.0, p) == 0.0); // relaxation phase
    CHECK(secretion_rate(s, 2.0, p) == 20.0);
}

TEST_CASE("AC motion: zero speed fixes the cell, step length is exact") {
    GridSpec g;
    g.nx = g.ny = g.nz = 10;
    g.voxel_edge = 10.0;
    g.dt = 0.01;

    ACParams p = params(1.0, 0.5, 1.0, 0.5);
    p.speed = 0.0;
    ACState s;
    s.position = {50.0, 50.0, 50.0};
    Rng rng(5);
    const ACState fixed = step_motion_ac(s, g, 0.5, p, rng);
    CHECK(fixed.position.x == 50.0);
    CHECK(fixed.position.y == 50.0);
    CHECK(fixed.position.z == 50.0);

    p.speed = 2.0;
    const double dt = 0.25;
    const ACState moved = step_motion_ac(s, g, dt, p, rng);
    CHECK((moved.position - s.position).norm() == doctest::Approx(p.speed * dt).epsilon(1e-12));
}

TEST_CASE("AC random walk stays inside the domain") {
    GridSpec g;
    g.nx = g.ny = g.nz = 10;
    g.voxel_edge = 10.0;
    g.dt = 0.01;
    ACParams p = params(1.0, 0.5, 1.0, 0.5);
    p.speed = 30.0;
    ACState s;
    s.position = {1.0, 1.0, 99.0};
    Rng rng(11);
    bool inside = true;
    for (int i = 0; i < 10000; ++i) {
        s = step_motion_ac(s, g, 0.5, p, rng);
        inside = inside && g.contains(s.position);
    }
    CHECK(inside);
}

TEST_CASE("linearity: scaling the input scales both trajectories") {
    const ACParams p = params(1.0, 0.4, 0.7, 0.6);
    const double scale = 3.5;
    ACState a, b;
    const std::vector<double> u = {0.1, 0.9, 0.4, 0.0, 0.7, 0.2, 0.5};
    for (double ui : u) {
        for (int step = 0; step < 5; ++step) {
            a = step_internal(a, ui, p, 0.2);
            b = step_internal(b, scale * ui, p, 0.2);
        }
        CHECK(b.filtered == doctest::Approx(scale * a.filtered).epsilon(1e-12));
        CHECK(b.readiness == doctest::Approx(scale * a.readiness).epsilon(1e-12));
    }
}

TEST_CASE("duty cycle: secretion happens in exactly the pulse fraction of steps") {
    ACParams p = params(1.0, 0.5, 1.0, 0.5);
    p.window = 10.0;
    p.pulse = 4.0;
    const double dt = 0.1;
    const int steps = static_cast<int>(p.window / dt);
    ACState s;
    s.readiness = 1.0;
    int active = 0;
    for (int i = 0; i < steps; ++i) {
        const double tau = i * dt;
        if (secretion_rate(s, tau, p) > 0.0) ++active;
    }
    // tau = 0 is gated off, so the pulse covers pulse/dt - 1 step starts.
    CHECK(active == static_cast<int>(p.pulse / dt) - 1);
    CHECK(active <= static_cast<int>(p.pulse / p.window * steps));
}

TEST_CASE("zero-input washout below 1e-9 of the initial level") {
    const ACParams p = params(1.0, 0.5, 1.0, 0.5);
    ACState s;
    s.filtered = 1.0;
    s.readiness = 1.0;
    bool reached = false;
    for (int i = 0; i < 100000 && !reached; ++i) {
        s = step_internal(s, 0.0, p, 0.1);
        reached = std::abs(s.filtered) < 1e-9 && std::abs(s.readiness) < 1e-9;
    }
    CHECK(reached);
}

TEST_CASE("parameter validation") {
    ACParams p = params(1.0, 0.5, 1.0, 0.5);
    p.pulse = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p.pulse = 11.0;
    p.window = 10.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p = params(1.0, -0.5, 1.0, 0.5);
    CHECK_THROWS_AS(p.validate(), config_error);
}

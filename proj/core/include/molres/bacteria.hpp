#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "molres/field.hpp"
#include "molres/geometry.hpp"
#include "molres/rng.hpp"

namespace molres {

/// Receptor adaptation and run-and-tumble parameters.
struct ChemoParams {
    double meth_rate = 0.005;   // k_R, 1/s
    double demeth_rate = 0.005; // k_B, 1/s
    double tumble_base = 1.0;   // T_0, 1/s
    double tumble_gain = 10.0;  // gamma, dimensionless
    double adapted_activity = 0.5; // a_0
    double cooperativity = 6.0;    // N_r
    double attract_half = 0.5;  // K_a, molecules/um^3
    double repel_half = 0.5;    // K_r, molecules/um^3
    double meth_slope = -2.0;   // free-energy change per methylation unit
    double meth_ref = 1.0;      // m_0
    double run_speed = 20.0;    // um/s

    void validate() const;
};

struct MetabolicParams {
    double uptake_max = 0.05;   // V_max, energy/s
    double glucose_half = 1.0;  // K_g, molecules/um^3
    double expenditure = 0.02;  // eta, 1/s
    double divide_energy = 2.0; // E_div
    double death_energy = 0.05; // E_death
    double tox_threshold = 5.0; // lethal repellent concentration
    double base_death_prob = 0.001; // per processing window
    double molecules_per_energy = 10000.0; // glucose molecules per unit energy
    double cell_length = 1.0;   // um, daughter offset at division
    double initial_energy = 1.0;

    void validate(double dt) const;
};

struct QuorumParams {
    double production_max = 50.0;  // alpha_AHL, molecules/s
    double glucose_half = 1.0;     // K_{G,AHL}, molecules/um^3

    void validate() const;
};

struct Bacterium {
    std::uint64_t id = 0;
    Vec3 position;
    Vec3 heading{1.0, 0.0, 0.0};
    double methylation = 1.0;
    double activity = 0.5;
    double energy = 1.0;
    bool alive = true;
    Rng rng;
};

/// MWC-style receptor activity in (0, 1): attractant lowers it, repellent and
/// (with a negative free-energy slope) methylation raise it.
double receptor_activity(double c_attract, double c_repel, double methylation,
                         const ChemoParams& p);

/// Explicit Euler methylation update followed by an activity refresh against
/// the same local concentrations.
void step_methylation(Bacterium& b, double c_attract, double c_repel, const ChemoParams& p,
                      double dt);

/// Per-step tumble probability 1 - exp(-lambda dt), lambda = T0 exp(gamma (a - a0)).
double tumble_probability(double activity, const ChemoParams& p, double dt);

/// Run-and-tumble move with reflecting walls.
void step_motion(Bacterium& b, const ChemoParams& p, const GridSpec& domain, double dt);

/// Monod uptake and energy balance; returns the uptake rate (energy/s) so the
/// caller can convert it into a glucose withdrawal.
double step_metabolism_rate(Bacterium& b, double c_glucose, const MetabolicParams& p, double dt);

/// Convenience form operating directly on the glucose field; returns the
/// number of molecules actually withdrawn.
double step_metabolism(Bacterium& b, ChemicalField& glucose, const MetabolicParams& p, double dt);

double ahl_production_rate(double c_glucose, const QuorumParams& p);

/// The bacterial collective plus the bookkeeping needed for reproducible
/// per-agent random streams.
class Population {
public:
    explicit Population(std::uint64_t master_seed);

    /// Seed `count` agents uniformly over the domain.
    void spawn_uniform(int count, const GridSpec& domain, const ChemoParams& chemo,
                       const MetabolicParams& metab);

    std::vector<Bacterium>& agents() { return agents_; }
    const std::vector<Bacterium>& agents() const { return agents_; }
    std::size_t alive_count() const { return agents_.size(); }

    Bacterium make_daughter(Bacterium& mother, const GridSpec& domain, double cell_length);

private:
    std::vector<Bacterium> agents_;
    std::uint64_t master_seed_;
    std::uint64_t next_id_ = 0;

    friend void lifecycle(Population&, const ChemicalField&, const MetabolicParams&, double);
};

/// Division, starvation, toxicity and baseline death. Births are computed
/// first from the pre-step roster; removals are applied afterwards in
/// agent-index order. `base_death_prob` applies per call (pass the per-window
/// probability once per window, 0 otherwise).
void lifecycle(Population& pop, const ChemicalField& repellent, const MetabolicParams& p,
               double base_death_prob);

std::string population_csv_header();
void append_population_csv(std::ostream& out, const Population& pop, long step);

} // namespace molres

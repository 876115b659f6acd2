#include "molres/bacteria.hpp"

#include <cmath>
#include <ostream>

#include "molres/csv.hpp"
#include "molres/errors.hpp"

namespace molres {

void ChemoParams::validate() const {
    if (!(meth_rate > 0.0) || !(demeth_rate > 0.0))
        throw config_error("chemo: methylation rates k_R, k_B must be > 0");
    if (!(tumble_base > 0.0)) throw config_error("chemo: baseline tumble rate must be > 0");
    if (!(adapted_activity > 0.0) || !(adapted_activity < 1.0))
        throw config_error("chemo: adapted activity must lie in (0, 1)");
    if (!(attract_half > 0.0) || !(repel_half > 0.0))
        throw config_error("chemo: half-activity concentrations must be > 0");
    if (run_speed < 0.0) throw config_error("chemo: run speed must be >= 0");
}

void MetabolicParams::validate(double dt) const {
    if (!(uptake_max > 0.0) || !(glucose_half > 0.0) || !(expenditure > 0.0))
        throw config_error("metabolism: V_max, K_g, eta must be > 0");
    if (!(divide_energy > 0.0) || !(death_energy > 0.0))
        throw config_error("metabolism: energy thresholds must be > 0");
    if (!(death_energy < divide_energy))
        throw config_error("metabolism: death threshold must be below division threshold");
    if (!(tox_threshold > 0.0)) throw config_error("metabolism: toxicity threshold must be > 0");
    if (base_death_prob < 0.0 || base_death_prob > 1.0)
        throw config_error("metabolism: base death probability must lie in [0, 1]");
    if (!(molecules_per_energy > 0.0))
        throw config_error("metabolism: molecules_per_energy must be > 0");
    if (!(cell_length > 0.0)) throw config_error("metabolism: cell length must be > 0");
    if (initial_energy < 0.0) throw config_error("metabolism: initial energy must be >= 0");
    if (dt * expenditure >= 1.0)
        throw config_error("metabolism: dt*eta must be < 1 to keep energy nonnegative");
}

void QuorumParams::validate() const {
    if (!(production_max > 0.0) || !(glucose_half > 0.0))
        throw config_error("quorum: production rate and half-saturation must be > 0");
}

double receptor_activity(double c_attract, double c_repel, double methylation,
                         const ChemoParams& p) {
    const double free_energy = p.meth_slope * (methylation - p.meth_ref) +
                               std::log1p(c_attract / p.attract_half) -
                               std::log1p(c_repel / p.repel_half);
    return 1.0 / (1.0 + std::exp(p.cooperativity * free_energy));
}

void step_methylation(Bacterium& b, double c_attract, double c_repel, const ChemoParams& p,
                      double dt) {
    b.methylation += dt * (p.meth_rate * (1.0 - b.activity) - p.demeth_rate * b.activity);
    b.activity = receptor_activity(c_attract, c_repel, b.methylation, p);
}

double tumble_probability(double activity, const ChemoParams& p, double dt) {
    const double rate = p.tumble_base * std::exp(p.tumble_gain * (activity - p.adapted_activity));
    return -std::expm1(-rate * dt);
}

void step_motion(Bacterium& b, const ChemoParams& p, const GridSpec& domain, double dt) {
    const double p_tumble = tumble_probability(b.activity, p, dt);
    if (b.rng.uniform() < p_tumble) b.heading = b.rng.unit_vector();
    b.position = b.position + p.run_speed * dt * b.heading;
    reflect_into(domain, b.position, b.heading);
}

double step_metabolism_rate(Bacterium& b, double c_glucose, const MetabolicParams& p, double dt) {
    const double uptake = p.uptake_max * c_glucose / (p.glucose_half + c_glucose);
    b.energy += dt * (uptake - p.expenditure * b.energy);
    if (b.energy < 0.0) b.energy = 0.0;
    return uptake;
}

double step_metabolism(Bacterium& b, ChemicalField& glucose, const MetabolicParams& p, double dt) {
    const double c = glucose.sample(b.position);
    const double uptake = step_metabolism_rate(b, c, p, dt);
    return glucose.withdraw(b.position, uptake * dt * p.molecules_per_energy);
}

double ahl_production_rate(double c_glucose, const QuorumParams& p) {
    return p.production_max * c_glucose / (p.glucose_half + c_glucose);
}

Population::Population(std::uint64_t master_seed) : master_seed_(master_seed) {}

void Population::spawn_uniform(int count, const GridSpec& domain, const ChemoParams& chemo,
                               const MetabolicParams& metab) {
    Rng placement = Rng::stream(master_seed_, stream_tag::placement, 0);
    agents_.reserve(agents_.size() + static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Bacterium b;
        b.id = next_id_++;
        b.rng = Rng::stream(master_seed_, stream_tag::bacterium, b.id);
        b.position = {placement.uniform() * domain.extent_x(),
                      placement.uniform() * domain.extent_y(),
                      placement.uniform() * domain.extent_z()};
        b.heading = placement.unit_vector();
        b.methylation = chemo.meth_ref;
        b.activity = receptor_activity(0.0, 0.0, b.methylation, chemo);
        b.energy = metab.initial_energy;
        agents_.push_back(b);
    }
}

Bacterium Population::make_daughter(Bacterium& mother, const GridSpec& domain,
                                    double cell_length) {
    Bacterium d = mother;
    d.id = next_id_++;
    d.rng = Rng::stream(master_seed_, stream_tag::bacterium, d.id);
    Vec3 dir = mother.rng.unit_vector();
    d.position = mother.position + cell_length * dir;
    Vec3 heading = d.heading;
    reflect_into(domain, d.position, heading);
    d.heading = heading;
    return d;
}

void lifecycle(Population& pop, const ChemicalField& repellent, const MetabolicParams& p,
               double base_death_prob) {
    auto& agents = pop.agents_;

    // Births from the pre-step roster; daughters append after the last agent.
    const std::size_t initial = agents.size();
    for (std::size_t i = 0; i < initial; ++i) {
        if (agents[i].energy >= p.divide_energy) {
            agents[i].energy *= 0.5;
            Bacterium d = pop.make_daughter(agents[i], repellent.grid(), p.cell_length);
            d.energy = agents[i].energy;
            agents.push_back(d);
        }
    }

    // Removals in agent-index order, after all births.
    for (auto& b : agents) {
        if (b.energy <= p.death_energy) b.alive = false;
        else if (repellent.sample(b.position) > p.tox_threshold) b.alive = false;
        else if (base_death_prob > 0.0 && b.rng.uniform() < base_death_prob) b.alive = false;
    }
    std::erase_if(agents, [](const Bacterium& b) { return !b.alive; });
}

std::string population_csv_header() { return "step,agent_id,px,py,pz,m,a,E"; }

void append_population_csv(std::ostream& out, const Population& pop, long step) {
    for (const auto& b : pop.agents()) {
        out << step << ',' << b.id << ',' << format_double(b.position.x) << ','
            << format_double(b.position.y) << ',' << format_double(b.position.z) << ','
            << format_double(b.methylation) << ',' << format_double(b.activity) << ','
            << format_double(b.energy) << '\n';
    }
}

} // namespace molres

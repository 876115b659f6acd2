#include "molres/reservoir.hpp"

#include <cmath>

#include "molres/errors.hpp"
#include "molres/parallel.hpp"

namespace molres {

void SimConfig::validate() const {
    grid.validate();
    attractant.validate();
    repellent.validate();
    glucose.validate();
    ac.validate();
    chemo.validate();
    metabolism.validate(grid.dt);
    quorum.validate();
    if (attractant_init < 0.0 || repellent_init < 0.0 || glucose_init < 0.0)
        throw config_error("sim: initial concentrations must be >= 0");
    if (n_bact_init < 0) throw config_error("sim: n_bact_init must be >= 0");
    if (n_windows <= 0) throw config_error("sim: n_windows must be > 0");
    if (n_washin < 0 || n_washin >= n_windows)
        throw config_error("sim: need n_windows > n_washin >= 0");

    const double edge2 = grid.voxel_edge * grid.voxel_edge;
    const double max_d = std::max({attractant.diffusion, repellent.diffusion, glucose.diffusion});
    if (max_d > 0.0 && grid.dt > edge2 / (6.0 * max_d))
        throw config_error("sim: dt violates the diffusion stability bound for the fastest species");
    const double max_v =
        std::max({attractant.flow_velocity, repellent.flow_velocity, glucose.flow_velocity});
    if (max_v * grid.dt > grid.voxel_edge)
        throw config_error("sim: dt violates the advection CFL bound");

    const double spw = ac.window / grid.dt;
    if (std::abs(spw - std::round(spw)) > 1e-9 * std::max(1.0, spw))
        throw config_error("sim: grid dt must divide the processing window length");
}

int SimConfig::steps_per_window() const {
    return static_cast<int>(std::llround(ac.window / grid.dt));
}

std::vector<double> extract_state(const ChemicalField& attractant, const ChemicalField& repellent,
                                  const std::vector<Bacterium>& agents) {
    const GridSpec& g = attractant.grid();
    const std::size_t v = static_cast<std::size_t>(g.voxel_count());
    std::vector<double> r(3 * v, 0.0);
    for (std::size_t i = 0; i < v; ++i) r[i] = attractant.values()[i];
    for (std::size_t i = 0; i < v; ++i) r[v + i] = repellent.values()[i];
    for (const auto& b : agents)
        if (b.alive) r[2 * v + static_cast<std::size_t>(g.voxel_of(b.position))] += 1.0;
    return r;
}

namespace {

// Pending per-agent field interactions, applied in agent-index order.
struct AgentFieldOps {
    double glucose_request = 0.0;
    double ahl_amount = 0.0;
};

} // namespace

StateTrajectory run_simulation(const SimConfig& config, std::span<const double> u,
                               std::uint64_t seed, int workers, const StepObserver& observer) {
    config.validate();
    if (static_cast<long>(u.size()) < config.n_windows)
        throw insufficient_data_error("run_simulation: input sequence shorter than n_windows");

    const GridSpec& g = config.grid;
    ChemicalField attract(g, config.attractant, config.attractant_init);
    ChemicalField repel(g, config.repellent, config.repellent_init);
    ChemicalField glucose(g, config.glucose, config.glucose_init);

    // Two artificial cells upstream of the flow, one per secreted species.
    std::array<ACState, 2> acs{};
    acs[0].role = ACRole::attractant_secretor;
    acs[0].position = {0.2 * g.extent_x(), 0.35 * g.extent_y(), 0.5 * g.extent_z()};
    acs[1].role = ACRole::repellent_secretor;
    acs[1].position = {0.2 * g.extent_x(), 0.65 * g.extent_y(), 0.5 * g.extent_z()};
    std::array<Rng, 2> ac_rng{Rng::stream(seed, stream_tag::artificial_cell, 0),
                              Rng::stream(seed, stream_tag::artificial_cell, 1)};

    Population pop(seed);
    pop.spawn_uniform(config.n_bact_init, g, config.chemo, config.metabolism);
    const bool had_population = config.n_bact_init > 0;

    const int spw = config.steps_per_window();
    const double dt = g.dt;
    const bool mean_mode = config.snapshot_mode == SnapshotMode::window_mean;

    StateTrajectory traj;
    traj.vox_count = g.voxel_count();
    traj.state_dim = 3 * g.voxel_count();
    traj.seed = seed;
    traj.states.reserve(static_cast<std::size_t>(config.n_windows) *
                        static_cast<std::size_t>(traj.state_dim));

    std::vector<AgentFieldOps> ops;
    std::vector<double> mean_accum;
    std::array<double, 2> rates{};
    long global_step = 0;

    for (long window = 0; window < config.n_windows; ++window) {
        const double input = u[static_cast<std::size_t>(window)];
        if (mean_mode) mean_accum.assign(static_cast<std::size_t>(traj.state_dim), 0.0);

        for (int s = 0; s < spw; ++s, ++global_step) {
            const double tau = s * dt;

            // (1) AC internal update, secretion deposit, then motion.
            for (std::size_t i = 0; i < acs.size(); ++i) {
                double drive = input;
                if (config.drive == ACDrive::antisymmetric &&
                    acs[i].role == ACRole::repellent_secretor)
                    drive = 1.0 - input;
                acs[i] = step_internal(acs[i], drive, config.ac, dt);
                rates[i] = secretion_rate(acs[i], tau, config.ac);
                if (rates[i] > 0.0) {
                    ChemicalField& target =
                        acs[i].role == ACRole::attractant_secretor ? attract : repel;
                    target.deposit(acs[i].position, rates[i] * dt);
                }
                acs[i] = step_motion_ac(acs[i], g, dt, config.ac, ac_rng[i]);
            }

            // (2) Agents: sensing, motion and rate computation run against the
            // fields as they stand after AC deposits; the resulting deposits
            // and withdrawals are applied afterwards in agent-index order.
            auto& agents = pop.agents();
            ops.assign(agents.size(), {});
            parallel_for(agents.size(), workers, [&](std::size_t begin, std::size_t end) {
                for (std::size_t i = begin; i < end; ++i) {
                    Bacterium& b = agents[i];
                    const double c_a = attract.sample(b.position);
                    const double c_r = repel.sample(b.position);
                    step_methylation(b, c_a, c_r, config.chemo, dt);
                    step_motion(b, config.chemo, g, dt);
                    const double c_g = glucose.sample(b.position);
                    const double uptake = step_metabolism_rate(b, c_g, config.metabolism, dt);
                    ops[i].glucose_request =
                        uptake * dt * config.metabolism.molecules_per_energy;
                    ops[i].ahl_amount = ahl_production_rate(c_g, config.quorum) * dt;
                }
            });
            for (std::size_t i = 0; i < agents.size(); ++i) {
                if (ops[i].glucose_request > 0.0)
                    glucose.withdraw(agents[i].position, ops[i].glucose_request);
                if (ops[i].ahl_amount > 0.0)
                    attract.deposit(agents[i].position, ops[i].ahl_amount);
            }

            // (3) Lifecycle; the stochastic baseline death applies once per
            // window, on the window's final step.
            const double base_death =
                (s == spw - 1) ? config.metabolism.base_death_prob : 0.0;
            lifecycle(pop, repel, config.metabolism, base_death);

            // (4) Field transport.
            attract.step(workers);
            repel.step(workers);
            glucose.step(workers);

            if (observer) {
                StepView view;
                view.window = window;
                view.step_in_window = s;
                view.global_step = global_step;
                view.acs = &acs;
                view.secretion_rates = &rates;
                view.population = &pop;
                view.attractant = &attract;
                view.repellent = &repel;
                view.glucose = &glucose;
                observer(view);
            }

            if (mean_mode) {
                const std::vector<double> r = extract_state(attract, repel, pop.agents());
                for (std::size_t i = 0; i < r.size(); ++i) mean_accum[i] += r[i];
            }
        }

        if (mean_mode) {
            for (double& v : mean_accum) v /= static_cast<double>(spw);
            traj.states.insert(traj.states.end(), mean_accum.begin(), mean_accum.end());
        } else {
            const std::vector<double> r = extract_state(attract, repel, pop.agents());
            traj.states.insert(traj.states.end(), r.begin(), r.end());
        }
        traj.inputs.push_back(input);

        if (had_population && pop.alive_count() == 0) {
            traj.extinct = true;
            traj.extinct_window = window;
            break;
        }
    }
    return traj;
}

StateTrajectory discard_washin(const StateTrajectory& traj, long n_washin) {
    if (n_washin < 0) throw config_error("discard_washin: n_washin must be >= 0");
    if (n_washin >= traj.n_windows())
        throw config_error("discard_washin: n_washin must be smaller than the trajectory length");
    StateTrajectory out = traj;
    const std::size_t dim = static_cast<std::size_t>(traj.state_dim);
    out.states.erase(out.states.begin(),
                     out.states.begin() + static_cast<long>(dim) * n_washin);
    out.inputs.erase(out.inputs.begin(), out.inputs.begin() + n_washin);
    if (out.extinct_window >= 0) out.extinct_window -= n_washin;
    return out;
}

std::string ac_log_csv_header() { return "step,ac_id,x_ac,s_ac,rate,px,py,pz"; }

} // namespace molres

#include "molres/config.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "molres/digest.hpp"
#include "molres/errors.hpp"

namespace molres {

using nlohmann::json;

long SignalConfig::discard_steps() const {
    return static_cast<long>(std::llround(transient_mg_units / mg.dt_int));
}

void ExperimentConfig::validate() const {
    sim.validate();
    signal.mg.validate();
    if (signal.stride < 1) throw config_error("signal.stride must be >= 1");
    if (signal.transient_mg_units < 0.0) throw config_error("signal.transient must be >= 0");
    if (!(signal.out_hi > signal.out_lo))
        throw config_error("signal output range must satisfy out_hi > out_lo");
    if (readout.d_max < 0) throw config_error("readout.d_max must be >= 0");
    if (!(readout.var_frac > 0.0) || readout.var_frac > 1.0)
        throw config_error("readout.var_frac must lie in (0, 1]");
    if (readout.h_list.empty() || readout.k_list.empty())
        throw config_error("readout.h_list and readout.k_list must be non-empty");
    for (int h : readout.h_list)
        if (h < 0) throw config_error("readout.h_list entries must be >= 0");
    for (int k : readout.k_list)
        if (k < 0) throw config_error("readout.k_list entries must be >= 0");
    if (readout.lambda_grid.empty()) throw config_error("readout.lambda_grid must be non-empty");
    for (double l : readout.lambda_grid)
        if (l < 0.0) throw config_error("readout.lambda_grid entries must be >= 0");
}

ExperimentConfig default_experiment_config() { return ExperimentConfig{}; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error("config error at " + path + ": " + what);
}

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected a JSON object");
    }

    ~Section() = default;

    double num(const char* key, double fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) fail(path_ + "." + key, "expected a number");
        return v.get<double>();
    }

    long integer(const char* key, long fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) fail(path_ + "." + key, "expected an integer");
        return v.get<long>();
    }

    std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !v.is_number_integer())
            fail(path_ + "." + key, "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const char* key, bool fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) fail(path_ + "." + key, "expected a boolean");
        return v.get<bool>();
    }

    std::string text(const char* key, const std::string& fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) fail(path_ + "." + key, "expected a string");
        return v.get<std::string>();
    }

    template <typename T>
    std::vector<T> array(const char* key, const std::vector<T>& fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_array()) fail(path_ + "." + key, "expected an array");
        std::vector<T> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail(path_ + "." + key, "expected numeric array entries");
            out.push_back(e.get<T>());
        }
        return out;
    }

    bool has(const char* key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& raw(const char* key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(path_ + "." + it.key(), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

SpeciesParams parse_species(const json& j, const std::string& path, SpeciesParams defaults) {
    Section s(j, path);
    defaults.diffusion = s.num("d_um2_per_s", defaults.diffusion);
    defaults.decay = s.num("decay_per_s", defaults.decay);
    defaults.flow_velocity = s.num("flow_um_per_s", defaults.flow_velocity);
    defaults.replenish_rate = s.num("replenish_per_s", defaults.replenish_rate);
    defaults.replenish_target = s.num("replenish_target_per_um3", defaults.replenish_target);
    s.finish();
    return defaults;
}

json species_json(const SpeciesParams& p) {
    return json{{"d_um2_per_s", p.diffusion},
                {"decay_per_s", p.decay},
                {"flow_um_per_s", p.flow_velocity},
                {"replenish_per_s", p.replenish_rate},
                {"replenish_target_per_um3", p.replenish_target}};
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        // byte offset from nlohmann anchors the message for the caller
        throw config_error(std::string("config parse error: ") + e.what());
    }

    ExperimentConfig cfg = default_experiment_config();
    Section top(root, "$");

    if (top.has("grid")) {
        Section s(top.raw("grid"), "$.grid");
        cfg.sim.grid.nx = static_cast<int>(s.integer("nx", cfg.sim.grid.nx));
        cfg.sim.grid.ny = static_cast<int>(s.integer("ny", cfg.sim.grid.ny));
        cfg.sim.grid.nz = static_cast<int>(s.integer("nz", cfg.sim.grid.nz));
        cfg.sim.grid.voxel_edge = s.num("voxel_edge_um", cfg.sim.grid.voxel_edge);
        cfg.sim.grid.dt = s.num("dt_s", cfg.sim.grid.dt);
        s.finish();
    }

    if (top.has("species")) {
        Section s(top.raw("species"), "$.species");
        if (s.has("attractant"))
            cfg.sim.attractant =
                parse_species(s.raw("attractant"), "$.species.attractant", cfg.sim.attractant);
        if (s.has("repellent"))
            cfg.sim.repellent =
                parse_species(s.raw("repellent"), "$.species.repellent", cfg.sim.repellent);
        if (s.has("glucose"))
            cfg.sim.glucose = parse_species(s.raw("glucose"), "$.species.glucose", cfg.sim.glucose);
        s.finish();
        cfg.sim.attractant.species_id = Species::attractant;
        cfg.sim.repellent.species_id = Species::repellent;
        cfg.sim.glucose.species_id = Species::glucose;
    }

    if (top.has("initial_concentrations")) {
        Section s(top.raw("initial_concentrations"), "$.initial_concentrations");
        cfg.sim.attractant_init = s.num("attractant_per_um3", cfg.sim.attractant_init);
        cfg.sim.repellent_init = s.num("repellent_per_um3", cfg.sim.repellent_init);
        cfg.sim.glucose_init = s.num("glucose_per_um3", cfg.sim.glucose_init);
        s.finish();
    }

    if (top.has("ac")) {
        Section s(top.raw("ac"), "$.ac");
        cfg.sim.ac.input_gain = s.num("k_u_per_s", cfg.sim.ac.input_gain);
        cfg.sim.ac.filter_decay = s.num("gamma_x_per_s", cfg.sim.ac.filter_decay);
        cfg.sim.ac.stage_coupling = s.num("k_x_per_s", cfg.sim.ac.stage_coupling);
        cfg.sim.ac.readiness_decay = s.num("gamma_s_per_s", cfg.sim.ac.readiness_decay);
        cfg.sim.ac.secretion_gain =
            s.num("secretion_gain_molecules_per_s", cfg.sim.ac.secretion_gain);
        cfg.sim.ac.window = s.num("window_s", cfg.sim.ac.window);
        cfg.sim.ac.pulse = s.num("pulse_s", cfg.sim.ac.pulse);
        cfg.sim.ac.speed = s.num("speed_um_per_s", cfg.sim.ac.speed);
        const std::string drive = s.text("drive", cfg.sim.drive == ACDrive::symmetric
                                                      ? "symmetric"
                                                      : "antisymmetric");
        if (drive == "symmetric") cfg.sim.drive = ACDrive::symmetric;
        else if (drive == "antisymmetric") cfg.sim.drive = ACDrive::antisymmetric;
        else fail("$.ac.drive", "expected 'symmetric' or 'antisymmetric'");
        s.finish();
    }

    if (top.has("chemotaxis")) {
        Section s(top.raw("chemotaxis"), "$.chemotaxis");
        auto& c = cfg.sim.chemo;
        c.meth_rate = s.num("k_r_per_s", c.meth_rate);
        c.demeth_rate = s.num("k_b_per_s", c.demeth_rate);
        c.tumble_base = s.num("t0_per_s", c.tumble_base);
        c.tumble_gain = s.num("gamma_t", c.tumble_gain);
        c.adapted_activity = s.num("a0", c.adapted_activity);
        c.cooperativity = s.num("n_r", c.cooperativity);
        c.attract_half = s.num("k_half_attract_per_um3", c.attract_half);
        c.repel_half = s.num("k_half_repel_per_um3", c.repel_half);
        c.meth_slope = s.num("meth_free_energy_slope", c.meth_slope);
        c.meth_ref = s.num("m0", c.meth_ref);
        c.run_speed = s.num("run_speed_um_per_s", c.run_speed);
        s.finish();
    }

    if (top.has("metabolism")) {
        Section s(top.raw("metabolism"), "$.metabolism");
        auto& m = cfg.sim.metabolism;
        m.uptake_max = s.num("v_max_energy_per_s", m.uptake_max);
        m.glucose_half = s.num("k_g_per_um3", m.glucose_half);
        m.expenditure = s.num("eta_per_s", m.expenditure);
        m.divide_energy = s.num("e_div", m.divide_energy);
        m.death_energy = s.num("e_death", m.death_energy);
        m.tox_threshold = s.num("tox_threshold_per_um3", m.tox_threshold);
        m.base_death_prob = s.num("p_base_death_per_window", m.base_death_prob);
        m.molecules_per_energy = s.num("glucose_molecules_per_energy", m.molecules_per_energy);
        m.cell_length = s.num("cell_length_um", m.cell_length);
        m.initial_energy = s.num("initial_energy", m.initial_energy);
        s.finish();
    }

    if (top.has("quorum")) {
        Section s(top.raw("quorum"), "$.quorum");
        cfg.sim.quorum.production_max =
            s.num("alpha_ahl_molecules_per_s", cfg.sim.quorum.production_max);
        cfg.sim.quorum.glucose_half = s.num("k_g_ahl_per_um3", cfg.sim.quorum.glucose_half);
        s.finish();
    }

    if (top.has("reservoir")) {
        Section s(top.raw("reservoir"), "$.reservoir");
        cfg.sim.n_bact_init = static_cast<int>(s.integer("n_bact_init", cfg.sim.n_bact_init));
        cfg.sim.n_windows = static_cast<int>(s.integer("n_windows", cfg.sim.n_windows));
        cfg.sim.n_washin = static_cast<int>(s.integer("n_washin", cfg.sim.n_washin));
        const std::string mode =
            s.text("snapshot_mode", cfg.sim.snapshot_mode == SnapshotMode::end_of_window
                                        ? "end_of_window"
                                        : "window_mean");
        if (mode == "end_of_window") cfg.sim.snapshot_mode = SnapshotMode::end_of_window;
        else if (mode == "window_mean") cfg.sim.snapshot_mode = SnapshotMode::window_mean;
        else fail("$.reservoir.snapshot_mode", "expected 'end_of_window' or 'window_mean'");
        s.finish();
    }

    if (top.has("signal")) {
        Section s(top.raw("signal"), "$.signal");
        auto& sig = cfg.signal;
        sig.mg.beta = s.num("beta", sig.mg.beta);
        sig.mg.gamma = s.num("gamma", sig.mg.gamma);
        sig.mg.n_exp = s.num("n", sig.mg.n_exp);
        sig.mg.tau = s.num("tau_mg_units", sig.mg.tau);
        sig.mg.dt_int = s.num("dt_int_mg_units", sig.mg.dt_int);
        sig.mg.history_init = s.num("history_init", sig.mg.history_init);
        sig.stride = s.integer("stride_steps", sig.stride);
        sig.transient_mg_units = s.num("transient_mg_units", sig.transient_mg_units);
        sig.out_lo = s.num("out_lo", sig.out_lo);
        sig.out_hi = s.num("out_hi", sig.out_hi);
        s.finish();
    }

    if (top.has("readout")) {
        Section s(top.raw("readout"), "$.readout");
        auto& r = cfg.readout;
        r.h_list = s.array<int>("h_list", r.h_list);
        r.k_list = s.array<int>("k_list", r.k_list);
        r.d_max = static_cast<int>(s.integer("d_max", r.d_max));
        r.var_frac = s.num("pca_variance_fraction", r.var_frac);
        r.lambda_grid = s.array<double>("lambda_grid", r.lambda_grid);
        s.finish();
    }

    cfg.seed = top.uinteger("seed", cfg.seed);
    cfg.export_agent_logs = top.boolean("export_agent_logs", cfg.export_agent_logs);
    top.finish();

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
    json root;
    root["grid"] = {{"nx", cfg.sim.grid.nx},
                    {"ny", cfg.sim.grid.ny},
                    {"nz", cfg.sim.grid.nz},
                    {"voxel_edge_um", cfg.sim.grid.voxel_edge},
                    {"dt_s", cfg.sim.grid.dt}};
    root["species"] = {{"attractant", species_json(cfg.sim.attractant)},
                       {"repellent", species_json(cfg.sim.repellent)},
                       {"glucose", species_json(cfg.sim.glucose)}};
    root["initial_concentrations"] = {{"attractant_per_um3", cfg.sim.attractant_init},
                                      {"repellent_per_um3", cfg.sim.repellent_init},
                                      {"glucose_per_um3", cfg.sim.glucose_init}};
    root["ac"] = {{"k_u_per_s", cfg.sim.ac.input_gain},
                  {"gamma_x_per_s", cfg.sim.ac.filter_decay},
                  {"k_x_per_s", cfg.sim.ac.stage_coupling},
                  {"gamma_s_per_s", cfg.sim.ac.readiness_decay},
                  {"secretion_gain_molecules_per_s", cfg.sim.ac.secretion_gain},
                  {"window_s", cfg.sim.ac.window},
                  {"pulse_s", cfg.sim.ac.pulse},
                  {"speed_um_per_s", cfg.sim.ac.speed},
                  {"drive", cfg.sim.drive == ACDrive::symmetric ? "symmetric" : "antisymmetric"}};
    root["chemotaxis"] = {{"k_r_per_s", cfg.sim.chemo.meth_rate},
                          {"k_b_per_s", cfg.sim.chemo.demeth_rate},
                          {"t0_per_s", cfg.sim.chemo.tumble_base},
                          {"gamma_t", cfg.sim.chemo.tumble_gain},
                          {"a0", cfg.sim.chemo.adapted_activity},
                          {"n_r", cfg.sim.chemo.cooperativity},
                          {"k_half_attract_per_um3", cfg.sim.chemo.attract_half},
                          {"k_half_repel_per_um3", cfg.sim.chemo.repel_half},
                          {"meth_free_energy_slope", cfg.sim.chemo.meth_slope},
                          {"m0", cfg.sim.chemo.meth_ref},
                          {"run_speed_um_per_s", cfg.sim.chemo.run_speed}};
    root["metabolism"] = {{"v_max_energy_per_s", cfg.sim.metabolism.uptake_max},
                          {"k_g_per_um3", cfg.sim.metabolism.glucose_half},
                          {"eta_per_s", cfg.sim.metabolism.expenditure},
                          {"e_div", cfg.sim.metabolism.divide_energy},
                          {"e_death", cfg.sim.metabolism.death_energy},
                          {"tox_threshold_per_um3", cfg.sim.metabolism.tox_threshold},
                          {"p_base_death_per_window", cfg.sim.metabolism.base_death_prob},
                          {"glucose_molecules_per_energy", cfg.sim.metabolism.molecules_per_energy},
                          {"cell_length_um", cfg.sim.metabolism.cell_length},
                          {"initial_energy", cfg.sim.metabolism.initial_energy}};
    root["quorum"] = {{"alpha_ahl_molecules_per_s", cfg.sim.quorum.production_max},
                      {"k_g_ahl_per_um3", cfg.sim.quorum.glucose_half}};
    root["reservoir"] = {{"n_bact_init", cfg.sim.n_bact_init},
                         {"n_windows", cfg.sim.n_windows},
                         {"n_washin", cfg.sim.n_washin},
                         {"snapshot_mode", cfg.sim.snapshot_mode == SnapshotMode::end_of_window
                                               ? "end_of_window"
                                               : "window_mean"}};
    root["signal"] = {{"beta", cfg.signal.mg.beta},
                      {"gamma", cfg.signal.mg.gamma},
                      {"n", cfg.signal.mg.n_exp},
                      {"tau_mg_units", cfg.signal.mg.tau},
                      {"dt_int_mg_units", cfg.signal.mg.dt_int},
                      {"history_init", cfg.signal.mg.history_init},
                      {"stride_steps", cfg.signal.stride},
                      {"transient_mg_units", cfg.signal.transient_mg_units},
                      {"out_lo", cfg.signal.out_lo},
                      {"out_hi", cfg.signal.out_hi}};
    root["readout"] = {{"h_list", cfg.readout.h_list},
                       {"k_list", cfg.readout.k_list},
                       {"d_max", cfg.readout.d_max},
                       {"pca_variance_fraction", cfg.readout.var_frac},
                       {"lambda_grid", cfg.readout.lambda_grid}};
    root["seed"] = cfg.seed;
    root["export_agent_logs"] = cfg.export_agent_logs;
    return root.dump(2);
}

std::string config_digest(const ExperimentConfig& config) {
    return content_digest(canonical_config_json(config));
}

} // namespace molres

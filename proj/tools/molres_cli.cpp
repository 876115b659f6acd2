// Experiment driver: simulate the hybrid reservoir, train/evaluate readouts,
// compute memory curves and render result plots. Subcommands compose into
// `sweep` for a full config-to-figures run.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "molres/config.hpp"
#include "molres/csv.hpp"
#include "molres/digest.hpp"
#include "molres/errors.hpp"
#include "molres/readout.hpp"
#include "molres/reservoir.hpp"
#include "molres/signals.hpp"
#include "molres/svg.hpp"
#include "molres/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitExtinction = 3;
constexpr int kExitInsufficientData = 4;
constexpr int kExitSchema = 5;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string trajectory_path;
    std::optional<std::uint64_t> seed_override;
    std::vector<int> h_list;
    std::vector<int> k_list;
    int d_max = -1;
    int workers = 1;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw molres::config_error("cannot write output file: " + path.string());
    out << content;
}

std::string digest_comment(const std::string& digest) {
    return "# config_digest=" + digest + "\n";
}

// The digest travels with every artifact; CSVs carry it as a comment line.
std::string digest_from_comments(const molres::CsvTable& table) {
    for (const auto& c : table.comments) {
        const std::string prefix = "# config_digest=";
        if (c.rfind(prefix, 0) == 0) return c.substr(prefix.size());
    }
    return "";
}

struct Manifest {
    std::string command;
    std::string digest;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    std::vector<std::string> outputs;
    std::string materialized_config; // JSON text, empty when no config involved

    void write(const fs::path& dir) const {
        json j;
        j["command"] = command;
        j["config_digest"] = digest;
        j["seed"] = seed;
        j["wall_time_s"] = wall_time_s;
        j["outputs"] = outputs;
        if (!materialized_config.empty()) j["config"] = json::parse(materialized_config);
        write_file(dir / ("manifest_" + command + ".json"), j.dump(2) + "\n");
    }
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

molres::ExperimentConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) throw molres::config_error("--config is required");
    molres::ExperimentConfig cfg = molres::load_experiment_config(args.config_path);
    if (args.seed_override) cfg.seed = *args.seed_override;
    cfg.validate();
    return cfg;
}

std::vector<double> build_input_signal(const molres::ExperimentConfig& cfg) {
    const long needed = cfg.sim.n_windows;
    const long raw_steps = cfg.signal.discard_steps() + cfg.signal.stride * needed + 1;
    const std::vector<double> raw = molres::generate(cfg.signal.mg, raw_steps);
    std::vector<double> u =
        molres::sample_and_normalize(raw, cfg.signal.stride, cfg.signal.discard_steps(),
                                     cfg.signal.out_lo, cfg.signal.out_hi);
    u.resize(static_cast<std::size_t>(needed));
    return u;
}

int cmd_simulate(const CommonArgs& args) {
    Stopwatch timer;
    const molres::ExperimentConfig cfg = load_config(args);
    const std::string digest = molres::config_digest(cfg);
    fs::create_directories(args.out_dir);

    const std::vector<double> u = build_input_signal(cfg);

    std::ofstream ac_log, pop_log;
    molres::StepObserver observer;
    if (cfg.export_agent_logs) {
        ac_log.open(fs::path(args.out_dir) / "ac_log.csv", std::ios::binary);
        pop_log.open(fs::path(args.out_dir) / "population.csv", std::ios::binary);
        ac_log << digest_comment(digest) << molres::ac_log_csv_header() << '\n';
        pop_log << digest_comment(digest) << molres::population_csv_header() << '\n';
        const int spw = cfg.sim.steps_per_window();
        observer = [&, spw](const molres::StepView& view) {
            for (std::size_t i = 0; i < view.acs->size(); ++i) {
                const auto& ac = (*view.acs)[i];
                ac_log << view.global_step << ',' << i << ','
                       << molres::format_double(ac.filtered) << ','
                       << molres::format_double(ac.readiness) << ','
                       << molres::format_double((*view.secretion_rates)[i]) << ','
                       << molres::format_double(ac.position.x) << ','
                       << molres::format_double(ac.position.y) << ','
                       << molres::format_double(ac.position.z) << '\n';
            }
            if (view.step_in_window == spw - 1)
                molres::append_population_csv(pop_log, *view.population, view.global_step);
        };
    }

    molres::StateTrajectory traj =
        molres::run_simulation(cfg.sim, u, cfg.seed, args.workers, observer);
    traj.config_digest = digest;

    const bool extinct = traj.extinct;
    if (!extinct) traj = molres::discard_washin(traj, cfg.sim.n_washin);

    const fs::path traj_path = fs::path(args.out_dir) / "trajectory.csv";
    molres::save_trajectory_file(traj_path.string(), traj);

    Manifest manifest;
    manifest.command = "simulate";
    manifest.digest = digest;
    manifest.seed = cfg.seed;
    manifest.outputs.push_back(traj_path.string());
    manifest.materialized_config = molres::canonical_config_json(cfg);
    manifest.wall_time_s = timer.seconds();
    manifest.write(args.out_dir);

    if (extinct) {
        write_file(fs::path(args.out_dir) / "EXTINCT",
                   "population extinct at window " + std::to_string(traj.extinct_window) + "\n");
        std::cerr << "molres: population extinct at window " << traj.extinct_window << "\n";
        return kExitExtinction;
    }
    return kExitOk;
}

struct EvalTables {
    std::string results_csv;
    std::string heatmap_csv;
    std::string correlation_csv;
};

EvalTables run_evaluation(const molres::StateTrajectory& traj, const std::vector<int>& h_list,
                          const std::vector<int>& k_list, const molres::ReadoutConfig& rcfg,
                          int workers) {
    molres::ReadoutOptions options;
    options.var_frac = rcfg.var_frac;
    options.lambda_grid = rcfg.lambda_grid;
    options.workers = workers;

    std::ostringstream results, heatmap, correlation;
    results << "H,k,offset,lambda,n_components,nrmse,correlation\n";

    // Canonical sorted order regardless of evaluation scheduling.
    std::vector<int> hs = h_list, ks = k_list;
    std::sort(hs.begin(), hs.end());
    std::sort(ks.begin(), ks.end());

    std::vector<std::vector<molres::EvalSummary>> grid(ks.size());
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        grid[ki].resize(hs.size());
        for (std::size_t hi = 0; hi < hs.size(); ++hi)
            grid[ki][hi] = molres::evaluate(traj, hs[hi], ks[ki], options);
    }

    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            const auto& summary = grid[ki][hi];
            for (const auto& pt : summary.offsets) {
                results << pt.horizon << ',' << pt.depth << ',' << pt.offset << ','
                        << molres::format_double(pt.lambda) << ',' << pt.n_components << ','
                        << molres::format_double(pt.nrmse_value) << ','
                        << molres::format_double(pt.correlation) << '\n';
            }
            results << hs[hi] << ',' << ks[ki] << ",median,,,"
                    << molres::format_double(summary.median_nrmse) << ','
                    << molres::format_double(summary.median_correlation) << '\n';
        }
    }

    heatmap << "k";
    for (int h : hs) heatmap << ",H" << h;
    heatmap << '\n';
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        heatmap << ks[ki];
        for (std::size_t hi = 0; hi < hs.size(); ++hi)
            heatmap << ',' << molres::format_double(grid[ki][hi].median_nrmse);
        heatmap << '\n';
    }

    correlation << "H";
    for (int k : ks) correlation << ",k" << k;
    correlation << '\n';
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
        correlation << hs[hi];
        for (std::size_t ki = 0; ki < ks.size(); ++ki)
            correlation << ',' << molres::format_double(grid[ki][hi].median_correlation);
        correlation << '\n';
    }

    return {results.str(), heatmap.str(), correlation.str()};
}

int cmd_evaluate(const CommonArgs& args) {
    if (args.trajectory_path.empty())
        throw molres::config_error("--trajectory is required for evaluate");
    const molres::StateTrajectory traj = molres::load_trajectory_file(args.trajectory_path);

    molres::ReadoutConfig rcfg;
    if (!args.config_path.empty()) rcfg = load_config(args).readout;
    const std::vector<int> hs = args.h_list.empty() ? rcfg.h_list : args.h_list;
    const std::vector<int> ks = args.k_list.empty() ? rcfg.k_list : args.k_list;

    const EvalTables tables = run_evaluation(traj, hs, ks, rcfg, args.workers);

    fs::create_directories(args.out_dir);
    const std::string comment = digest_comment(traj.config_digest);
    write_file(fs::path(args.out_dir) / "results.csv", comment + tables.results_csv);
    write_file(fs::path(args.out_dir) / "heatmap.csv", comment + tables.heatmap_csv);
    write_file(fs::path(args.out_dir) / "correlation_vs_h.csv", comment + tables.correlation_csv);

    Manifest manifest;
    manifest.command = "evaluate";
    manifest.digest = traj.config_digest;
    manifest.seed = traj.seed;
    for (const char* name : {"results.csv", "heatmap.csv", "correlation_vs_h.csv"})
        manifest.outputs.push_back((fs::path(args.out_dir) / name).string());
    manifest.write(args.out_dir);
    return kExitOk;
}

int cmd_memory(const CommonArgs& args) {
    if (args.trajectory_path.empty())
        throw molres::config_error("--trajectory is required for memory");
    const molres::StateTrajectory traj = molres::load_trajectory_file(args.trajectory_path);

    molres::ReadoutConfig rcfg;
    if (!args.config_path.empty()) rcfg = load_config(args).readout;
    const int d_max = args.d_max >= 0 ? args.d_max : rcfg.d_max;

    molres::ReadoutOptions options;
    options.var_frac = rcfg.var_frac;
    options.lambda_grid = rcfg.lambda_grid;
    options.workers = args.workers;
    const molres::MemoryCurve curve = molres::memory_curve(traj, d_max, options);

    std::ostringstream curve_csv, summary_csv;
    curve_csv << "d,r2\n";
    for (std::size_t i = 0; i < curve.r2.size(); ++i)
        curve_csv << (i + 1) << ',' << molres::format_double(curve.r2[i]) << '\n';
    summary_csv << "mc,h_star\n"
                << molres::format_double(curve.capacity) << ','
                << molres::format_double(0.7 * curve.capacity) << '\n';

    fs::create_directories(args.out_dir);
    const std::string comment = digest_comment(traj.config_digest);
    write_file(fs::path(args.out_dir) / "memory_curve.csv", comment + curve_csv.str());
    write_file(fs::path(args.out_dir) / "memory_summary.csv", comment + summary_csv.str());

    Manifest manifest;
    manifest.command = "memory";
    manifest.digest = traj.config_digest;
    manifest.seed = traj.seed;
    manifest.outputs.push_back((fs::path(args.out_dir) / "memory_curve.csv").string());
    manifest.outputs.push_back((fs::path(args.out_dir) / "memory_summary.csv").string());
    manifest.write(args.out_dir);
    return kExitOk;
}

int cmd_plot(const CommonArgs& args) {
    const fs::path dir(args.out_dir);
    int rendered = 0;
    std::string digest;
    Manifest manifest;
    manifest.command = "plot";

    auto emit = [&](const fs::path& path, const std::string& svg) {
        const std::string header =
            digest.empty() ? std::string() : "<!-- config_digest=" + digest + " -->\n";
        write_file(path, header + svg);
        manifest.outputs.push_back(path.string());
        ++rendered;
    };

    if (fs::exists(dir / "heatmap.csv")) {
        const molres::CsvTable t = molres::read_csv_file((dir / "heatmap.csv").string());
        digest = digest_from_comments(t);
        emit(dir / "heatmap.svg",
             molres::render_heatmap_svg(t, "median NRMSE over (H, k)", "prediction horizon H",
                                        "tapped-delay depth k"));

        // k-sweep lines: median NRMSE vs H, one series per depth.
        molres::CsvTable lines;
        lines.header.push_back("H");
        for (const auto& row : t.rows) lines.header.push_back("k" + row[0]);
        for (std::size_t c = 1; c < t.header.size(); ++c) {
            std::vector<std::string> out_row;
            out_row.push_back(t.header[c].substr(1)); // strip the 'H' prefix
            for (const auto& row : t.rows) out_row.push_back(row[c]);
            lines.rows.push_back(out_row);
        }
        emit(dir / "k_sweep.svg",
             molres::render_lines_svg(lines, "median NRMSE vs horizon", "prediction horizon H",
                                      "median NRMSE"));
    }

    if (fs::exists(dir / "correlation_vs_h.csv")) {
        const molres::CsvTable t = molres::read_csv_file((dir / "correlation_vs_h.csv").string());
        if (digest.empty()) digest = digest_from_comments(t);
        emit(dir / "correlation.svg",
             molres::render_lines_svg(t, "median correlation vs horizon", "prediction horizon H",
                                      "median correlation"));
    }

    if (fs::exists(dir / "memory_curve.csv") && fs::exists(dir / "memory_summary.csv")) {
        const molres::CsvTable curve = molres::read_csv_file((dir / "memory_curve.csv").string());
        const molres::CsvTable summary =
            molres::read_csv_file((dir / "memory_summary.csv").string());
        if (digest.empty()) digest = digest_from_comments(curve);
        emit(dir / "memory.svg", molres::render_memory_svg(curve, summary));
    }

    if (rendered == 0)
        throw molres::schema_error("plot: no result CSV files found in " + dir.string());

    manifest.digest = digest;
    manifest.write(dir);
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
    const int sim_rc = cmd_simulate(args);
    if (sim_rc != kExitOk) return sim_rc;
    CommonArgs eval_args = args;
    eval_args.trajectory_path = (fs::path(args.out_dir) / "trajectory.csv").string();
    const int eval_rc = cmd_evaluate(eval_args);
    if (eval_rc != kExitOk) return eval_rc;
    const int mem_rc = cmd_memory(eval_args);
    if (mem_rc != kExitOk) return mem_rc;
    return cmd_plot(args);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid molecular reservoir: simulation, readout and plotting"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* cmd, bool with_lists) {
        cmd->add_option("--config", args.config_path, "experiment config JSON");
        cmd->add_option("--seed", args.seed_override, "seed override");
        cmd->add_option("--out-dir", args.out_dir, "output directory");
        cmd->add_option("--trajectory", args.trajectory_path, "trajectory file path");
        cmd->add_option("--workers", args.workers, "worker thread count");
        if (with_lists) {
            cmd->add_option("--h-list", args.h_list, "prediction horizons")->delimiter(',');
            cmd->add_option("--k-list", args.k_list, "tapped-delay depths")->delimiter(',');
            cmd->add_option("--d-max", args.d_max, "maximum reconstruction delay");
        }
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run the reservoir simulation");
    add_common(simulate, false);
    CLI::App* evaluate = app.add_subcommand("evaluate", "train/evaluate prediction readouts");
    add_common(evaluate, true);
    CLI::App* memory = app.add_subcommand("memory", "compute the linear memory curve");
    add_common(memory, true);
    CLI::App* plot = app.add_subcommand("plot", "render SVG figures from result CSVs");
    add_common(plot, false);
    CLI::App* sweep = app.add_subcommand("sweep", "simulate + evaluate + memory + plot");
    add_common(sweep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (evaluate->parsed()) return cmd_evaluate(args);
        if (memory->parsed()) return cmd_memory(args);
        if (plot->parsed()) return cmd_plot(args);
        if (sweep->parsed()) return cmd_sweep(args);
    } catch (const molres::insufficient_data_error& e) {
        std::cerr << "molres: " << e.what() << "\n";
        return kExitInsufficientData;
    } catch (const molres::schema_error& e) {
        std::cerr << "molres: " << e.what() << "\n";
        return kExitSchema;
    } catch (const molres::config_error& e) {
        std::cerr << "molres: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "molres: unexpected error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}

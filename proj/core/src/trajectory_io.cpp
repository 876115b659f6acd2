#include "molres/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "molres/csv.hpp"
#include "molres/errors.hpp"

namespace molres {

void save_trajectory(std::ostream& out, const StateTrajectory& traj) {
    nlohmann::json header;
    header["config_digest"] = traj.config_digest;
    header["seed"] = traj.seed;
    header["v"] = traj.vox_count;
    header["state_dim"] = traj.state_dim;
    header["n_windows"] = traj.n_windows();
    header["extinct"] = traj.extinct;
    header["extinct_window"] = traj.extinct_window;
    out << header.dump() << '\n';

    const int dim = traj.state_dim;
    for (int i = 0; i < dim; ++i) out << 's' << i << ',';
    out << "u\n";

    for (long n = 0; n < traj.n_windows(); ++n) {
        const auto row = traj.state(n);
        for (int i = 0; i < dim; ++i) out << format_double(row[static_cast<std::size_t>(i)]) << ',';
        out << format_double(traj.inputs[static_cast<std::size_t>(n)]) << '\n';
    }
}

void save_trajectory_file(const std::string& path, const StateTrajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open trajectory file for writing: " + path);
    save_trajectory(out, traj);
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw schema_error("trajectory: malformed numeric cell '" + s + "'");
    return v;
}

} // namespace

StateTrajectory load_trajectory(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw schema_error("trajectory: missing JSON header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(std::string("trajectory: bad JSON header: ") + e.what());
    }

    StateTrajectory traj;
    try {
        traj.config_digest = header.at("config_digest").get<std::string>();
        traj.seed = header.at("seed").get<std::uint64_t>();
        traj.vox_count = header.at("v").get<int>();
        traj.state_dim = header.value("state_dim", 3 * traj.vox_count);
        traj.extinct = header.at("extinct").get<bool>();
        traj.extinct_window = header.at("extinct_window").get<long>();
    } catch (const nlohmann::json::exception& e) {
        throw schema_error(std::string("trajectory: incomplete header: ") + e.what());
    }
    const long declared_windows = header.at("n_windows").get<long>();

    if (!std::getline(in, line)) throw schema_error("trajectory: missing CSV header");
    const int dim = traj.state_dim;
    {
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != dim + 1 || cells.back() != "u")
            throw schema_error("trajectory: CSV header does not match the declared voxel count");
    }

    traj.states.reserve(static_cast<std::size_t>(declared_windows) *
                        static_cast<std::size_t>(dim));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != dim + 1)
            throw schema_error("trajectory: row width does not match the header");
        for (int i = 0; i < dim; ++i)
            traj.states.push_back(parse_double(cells[static_cast<std::size_t>(i)]));
        traj.inputs.push_back(parse_double(cells.back()));
    }
    if (traj.n_windows() != declared_windows)
        throw schema_error("trajectory: row count does not match the declared n_windows");
    return traj;
}

StateTrajectory load_trajectory_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw schema_error("cannot open trajectory file: " + path);
    return load_trajectory(in);
}

} // namespace molres

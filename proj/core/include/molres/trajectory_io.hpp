#pragma once

#include <iosfwd>
#include <string>

#include "molres/reservoir.hpp"

namespace molres {

/// Trajectory file: one JSON header line (config digest, seed, V, n_windows,
/// extinction marker), a CSV header s0..s{3V-1},u, then one row per window.
/// Doubles use shortest round-trip formatting so save/load is bit-exact.
void save_trajectory(std::ostream& out, const StateTrajectory& traj);
void save_trajectory_file(const std::string& path, const StateTrajectory& traj);

StateTrajectory load_trajectory(std::istream& in);
StateTrajectory load_trajectory_file(const std::string& path);

} // namespace molres

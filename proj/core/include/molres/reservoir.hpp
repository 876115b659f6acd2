#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "molres/bacteria.hpp"
#include "molres/field.hpp"
#include "molres/geometry.hpp"
#include "molres/transducer.hpp"

namespace molres {

enum class SnapshotMode { end_of_window, window_mean };
enum class ACDrive { symmetric, antisymmetric };

/// Everything needed to run the coupled simulation.
struct SimConfig {
    GridSpec grid;
    SpeciesParams attractant{Species::attractant, 100.0, 0.02, 1.0};
    SpeciesParams repellent{Species::repellent, 100.0, 0.02, 1.0};
    SpeciesParams glucose{Species::glucose, 400.0, 0.0, 1.0, 0.05, 5.0};
    double attractant_init = 0.0;
    double repellent_init = 0.0;
    double glucose_init = 5.0;
    ACParams ac;
    ACDrive drive = ACDrive::symmetric;
    ChemoParams chemo;
    MetabolicParams metabolism;
    QuorumParams quorum;
    int n_bact_init = 90;
    int n_windows = 600;
    int n_washin = 50;
    SnapshotMode snapshot_mode = SnapshotMode::end_of_window;

    void validate() const;
    int steps_per_window() const;
};

/// Sequence of reservoir state vectors r[n] aligned with inputs. Simulator
/// output has state_dim == 3V (attractant voxels, repellent voxels, bacterial
/// density voxels, in that order); synthetic fixtures may use any width.
struct StateTrajectory {
    int vox_count = 0;  // V (0 for synthetic fixtures)
    int state_dim = 0;  // row width
    std::vector<double> states; // row-major, size n_windows() * state_dim
    std::vector<double> inputs;
    std::string config_digest;
    std::uint64_t seed = 0;
    bool extinct = false;
    long extinct_window = -1;

    long n_windows() const { return static_cast<long>(inputs.size()); }
    std::span<const double> state(long n) const {
        return std::span<const double>(states).subspan(
            static_cast<std::size_t>(n) * static_cast<std::size_t>(state_dim),
            static_cast<std::size_t>(state_dim));
    }
};

/// Per-step view handed to an optional observer (CSV logging etc.).
struct StepView {
    long window = 0;
    long step_in_window = 0;
    long global_step = 0;
    const std::array<ACState, 2>* acs = nullptr;
    const std::array<double, 2>* secretion_rates = nullptr;
    const Population* population = nullptr;
    const ChemicalField* attractant = nullptr;
    const ChemicalField* repellent = nullptr;
    const ChemicalField* glucose = nullptr;
};

using StepObserver = std::function<void(const StepView&)>;

/// Concatenate voxel attractant, repellent and alive-agent counts into r[n].
std::vector<double> extract_state(const ChemicalField& attractant, const ChemicalField& repellent,
                                  const std::vector<Bacterium>& agents);

/// Drive the reservoir with u window by window. Deterministic for a fixed
/// (config, u, seed) regardless of worker count. On population extinction the
/// trajectory is truncated and flagged.
StateTrajectory run_simulation(const SimConfig& config, std::span<const double> u,
                               std::uint64_t seed, int workers = 1,
                               const StepObserver& observer = {});

/// Drop the first n_washin (state, input) pairs.
StateTrajectory discard_washin(const StateTrajectory& traj, long n_washin);

std::string ac_log_csv_header();

} // namespace molres

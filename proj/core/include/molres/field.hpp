#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "molres/geometry.hpp"

namespace molres {

enum class Species { attractant, repellent, glucose };

const char* species_name(Species s);

/// Transport parameters for one chemical species.
struct SpeciesParams {
    Species species_id = Species::attractant;
    double diffusion = 0.0;     // um^2/s
    double decay = 0.0;         // 1/s, first-order
    double flow_velocity = 0.0; // um/s along +x
    // Chemostat relaxation toward `replenish_target` (used for glucose).
    double replenish_rate = 0.0;   // 1/s
    double replenish_target = 0.0; // molecules/um^3

    void validate() const;
};

/// Per-voxel concentration (molecules/um^3) of one species, x-fastest layout.
///
/// One step applies, in order: explicit 7-point diffusion (no diffusive flux
/// through any face; the x+ face is the zero-gradient outflow face), first-order
/// upwind advection along +x with a zero-concentration inflow ghost at x- and
/// free outflow at x+, exact exponential decay, then chemostat relaxation.
class ChemicalField {
public:
    ChemicalField(const GridSpec& spec, const SpeciesParams& params, double initial);

    void step(int workers = 1);

    /// Add `amount` molecules to the voxel containing `position`.
    void deposit(const Vec3& position, double amount);

    /// Remove up to `requested` molecules from the voxel containing `position`;
    /// returns the amount actually granted.
    double withdraw(const Vec3& position, double requested);

    /// Piecewise-constant concentration lookup at `position`.
    double sample(const Vec3& position) const;

    double total_mass() const;

    double max_concentration() const;

    const GridSpec& grid() const { return spec_; }
    const SpeciesParams& params() const { return params_; }
    const std::vector<double>& values() const { return conc_; }
    double& at(int ix, int iy, int iz) { return conc_[static_cast<std::size_t>(spec_.linear_index(ix, iy, iz))]; }
    double at(int ix, int iy, int iz) const { return conc_[static_cast<std::size_t>(spec_.linear_index(ix, iy, iz))]; }

private:
    GridSpec spec_;
    SpeciesParams params_;
    std::vector<double> conc_;
    std::vector<double> next_;
};

/// Append one snapshot (one row per voxel) in the export schema
/// step,species,ix,iy,iz,conc.
void append_field_snapshot_csv(std::ostream& out, const ChemicalField& field, long step);

std::string field_snapshot_csv_header();

} // namespace molres

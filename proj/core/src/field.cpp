#include "molres/field.hpp"

#include <cmath>
#include <ostream>

#include "molres/csv.hpp"
#include "molres/errors.hpp"
#include "molres/parallel.hpp"

namespace molres {

const char* species_name(Species s) {
    switch (s) {
        case Species::attractant: return "attractant";
        case Species::repellent: return "repellent";
        case Species::glucose: return "glucose";
    }
    return "unknown";
}

void SpeciesParams::validate() const {
    if (diffusion < 0.0) throw config_error("species: diffusion coefficient must be >= 0");
    if (decay < 0.0) throw config_error("species: decay rate must be >= 0");
    if (flow_velocity < 0.0) throw config_error("species: flow velocity must be >= 0");
    if (replenish_rate < 0.0) throw config_error("species: replenish rate must be >= 0");
    if (replenish_target < 0.0) throw config_error("species: replenish target must be >= 0");
}

ChemicalField::ChemicalField(const GridSpec& spec, const SpeciesParams& params, double initial)
    : spec_(spec), params_(params) {
    spec_.validate();
    params_.validate();
    if (initial < 0.0) throw config_error("field: initial concentration must be >= 0");
    const double edge2 = spec_.voxel_edge * spec_.voxel_edge;
    if (params_.diffusion > 0.0 && spec_.dt > edge2 / (6.0 * params_.diffusion))
        throw config_error("field: dt violates the diffusion stability bound dt <= edge^2/(6 D)");
    if (params_.flow_velocity * spec_.dt > spec_.voxel_edge)
        throw config_error("field: dt violates the advection CFL bound v*dt <= edge");
    if (params_.replenish_rate * spec_.dt > 1.0)
        throw config_error("field: dt violates the replenishment bound k_repl*dt <= 1");
    conc_.assign(static_cast<std::size_t>(spec_.voxel_count()), initial);
    next_.assign(conc_.size(), 0.0);
}

void ChemicalField::step(int workers) {
    const int nx = spec_.nx, ny = spec_.ny, nz = spec_.nz;
    const double r = params_.diffusion * spec_.dt / (spec_.voxel_edge * spec_.voxel_edge);
    const double cfl = params_.flow_velocity * spec_.dt / spec_.voxel_edge;
    const double decay_factor = std::exp(-params_.decay * spec_.dt);
    const double krdt = params_.replenish_rate * spec_.dt;
    const double target = params_.replenish_target;

    const std::size_t n = conc_.size();
    const double* src = conc_.data();
    double* dst = next_.data();

    // Diffusion: each output voxel reads only the previous buffer, so any
    // partition of the index range gives bit-identical results.
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const int i = static_cast<int>(idx);
            const int ix = i % nx;
            const int iy = (i / nx) % ny;
            const int iz = i / (nx * ny);
            const double c = src[idx];
            double lap = 0.0;
            if (ix > 0) lap += src[idx - 1] - c;
            if (ix + 1 < nx) lap += src[idx + 1] - c;
            if (iy > 0) lap += src[idx - static_cast<std::size_t>(nx)] - c;
            if (iy + 1 < ny) lap += src[idx + static_cast<std::size_t>(nx)] - c;
            if (iz > 0) lap += src[idx - static_cast<std::size_t>(nx) * ny] - c;
            if (iz + 1 < nz) lap += src[idx + static_cast<std::size_t>(nx) * ny] - c;
            dst[idx] = c + r * lap;
        }
    });

    // Upwind advection along +x (zero-inflow ghost at x-), then decay and
    // chemostat relaxation, written back into the primary buffer.
    const double* adv_src = next_.data();
    double* out = conc_.data();
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const int ix = static_cast<int>(idx) % nx;
            const double c = adv_src[idx];
            const double upstream = (ix > 0) ? adv_src[idx - 1] : 0.0;
            double v = c - cfl * (c - upstream);
            v *= decay_factor;
            if (krdt > 0.0) v += krdt * (target - v);
            out[idx] = v < 0.0 ? 0.0 : v;
        }
    });
}

void ChemicalField::deposit(const Vec3& position, double amount) {
    if (amount < 0.0) throw config_error("deposit: amount must be >= 0");
    const int idx = spec_.voxel_of(position);
    conc_[static_cast<std::size_t>(idx)] += amount / spec_.voxel_volume();
}

double ChemicalField::withdraw(const Vec3& position, double requested) {
    if (requested < 0.0) throw config_error("withdraw: requested amount must be >= 0");
    const int idx = spec_.voxel_of(position);
    double& c = conc_[static_cast<std::size_t>(idx)];
    const double available = c * spec_.voxel_volume();
    const double granted = requested < available ? requested : available;
    c -= granted / spec_.voxel_volume();
    if (c < 0.0) c = 0.0;
    return granted;
}

double ChemicalField::sample(const Vec3& position) const {
    return conc_[static_cast<std::size_t>(spec_.voxel_of(position))];
}

double ChemicalField::total_mass() const {
    double sum = 0.0;
    for (double c : conc_) sum += c;
    return sum * spec_.voxel_volume();
}

double ChemicalField::max_concentration() const {
    double m = 0.0;
    for (double c : conc_)
        if (c > m) m = c;
    return m;
}

std::string field_snapshot_csv_header() { return "step,species,ix,iy,iz,conc"; }

void append_field_snapshot_csv(std::ostream& out, const ChemicalField& field, long step) {
    const GridSpec& g = field.grid();
    const char* name = species_name(field.params().species_id);
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                out << step << ',' << name << ',' << ix << ',' << iy << ',' << iz << ','
                    << format_double(field.at(ix, iy, iz)) << '\n';
            }
}

} // namespace molres

#pragma once

#include <cmath>
#include <cstdint>

#include "molres/errors.hpp"

namespace molres {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Uniform voxel grid over the box [0, nx*edge] x [0, ny*edge] x [0, nz*edge].
struct GridSpec {
    int nx = 10;
    int ny = 10;
    int nz = 10;
    double voxel_edge = 10.0; // um
    double dt = 0.01;         // s

    int voxel_count() const { return nx * ny * nz; }
    double voxel_volume() const { return voxel_edge * voxel_edge * voxel_edge; }
    double extent_x() const { return nx * voxel_edge; }
    double extent_y() const { return ny * voxel_edge; }
    double extent_z() const { return nz * voxel_edge; }

    void validate() const {
        if (nx < 1 || ny < 1 || nz < 1)
            throw config_error("grid: nx, ny, nz must all be >= 1");
        if (!(voxel_edge > 0.0))
            throw config_error("grid: voxel_edge must be > 0");
        if (!(dt > 0.0))
            throw config_error("grid: dt must be > 0");
    }

    bool contains(const Vec3& p) const {
        return p.x >= 0.0 && p.x <= extent_x() && p.y >= 0.0 && p.y <= extent_y() &&
               p.z >= 0.0 && p.z <= extent_z();
    }

    // Points exactly on an interior voxel boundary resolve to the lower-index voxel.
    int axis_index(double coord, int n) const {
        int i = static_cast<int>(std::ceil(coord / voxel_edge)) - 1;
        if (i < 0) i = 0;
        if (i >= n) i = n - 1;
        return i;
    }

    int linear_index(int ix, int iy, int iz) const { return ix + nx * (iy + ny * iz); }

    /// Voxel containing `p`; throws domain_error if `p` is outside the box.
    int voxel_of(const Vec3& p) const {
        if (!contains(p)) throw domain_error("position outside simulation domain");
        return linear_index(axis_index(p.x, nx), axis_index(p.y, ny), axis_index(p.z, nz));
    }
};

/// Reflect `p` into the box, flipping the matching components of `heading`.
inline void reflect_into(const GridSpec& g, Vec3& p, Vec3& heading) {
    const double lims[3] = {g.extent_x(), g.extent_y(), g.extent_z()};
    double* coords[3] = {&p.x, &p.y, &p.z};
    double* dirs[3] = {&heading.x, &heading.y, &heading.z};
    for (int a = 0; a < 3; ++a) {
        double& c = *coords[a];
        // Repeated reflection handles overshoots larger than the box.
        while (c < 0.0 || c > lims[a]) {
            if (c < 0.0) {
                c = -c;
                *dirs[a] = -*dirs[a];
            } else {
                c = 2.0 * lims[a] - c;
                *dirs[a] = -*dirs[a];
            }
        }
    }
}

} // namespace molres

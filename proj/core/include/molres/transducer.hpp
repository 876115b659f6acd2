#pragma once

#include "molres/geometry.hpp"
#include "molres/rng.hpp"

namespace molres {

/// Artificial-cell transducer parameters.
struct ACParams {
    double input_gain = 1.0;      // k_u, 1/s
    double filter_decay = 0.5;    // gamma_x, 1/s
    double stage_coupling = 1.0;  // k_x, 1/s
    double readiness_decay = 0.5; // gamma_s, 1/s
    double secretion_gain = 100.0; // molecules/s per unit readiness
    double window = 10.0;         // T_w, s
    double pulse = 5.0;           // T_p, s
    double speed = 1.0;           // random-walk speed, um/s

    void validate() const;
};

enum class ACRole { attractant_secretor, repellent_secretor };

/// Internal state of one artificial cell.
struct ACState {
    double filtered = 0.0;  // x_ac
    double readiness = 0.0; // s_ac
    Vec3 position;
    ACRole role = ACRole::attractant_secretor;
};

/// Advance (filtered, readiness) over dt with the input held constant,
/// using the exact solution of the linear two-stage system.
ACState step_internal(const ACState& state, double input, const ACParams& params, double dt);

/// Pulse gate: 1 while 0 < tau < pulse, 0 through the rest of the window.
int gate(double tau, const ACParams& params);

/// Instantaneous secretion rate (molecules/s) for the cell's species.
double secretion_rate(const ACState& state, double tau, const ACParams& params);

/// Isotropic random step of length speed*dt with reflecting walls.
ACState step_motion_ac(const ACState& state, const GridSpec& domain, double dt,
                       const ACParams& params, Rng& rng);

namespace detail {
// (1 - e^{-z}) / z, continuous at 0.
double phi1(double z);
// (e^{-a} - e^{-b}) / (b - a), continuous at a == b.
double exp_dd(double a, double b);
// (phi1(a) - phi1(b)) / (b - a), continuous at a == b.
double phi1_dd(double a, double b);
} // namespace detail

} // namespace molres

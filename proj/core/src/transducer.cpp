#include "molres/transducer.hpp"

#include <cmath>

#include "molres/errors.hpp"

namespace molres {

void ACParams::validate() const {
    if (input_gain < 0.0 || filter_decay < 0.0 || stage_coupling < 0.0 || readiness_decay < 0.0)
        throw config_error("ac: rates must be >= 0");
    if (secretion_gain < 0.0) throw config_error("ac: secretion gain must be >= 0");
    if (!(pulse > 0.0) || pulse > window)
        throw config_error("ac: stimulation duration must satisfy 0 < pulse <= window");
    if (speed < 0.0) throw config_error("ac: speed must be >= 0");
}

namespace detail {

double phi1(double z) {
    if (z == 0.0) return 1.0;
    return -std::expm1(-z) / z;
}

double exp_dd(double a, double b) {
    const double m = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    // (e^{-a} - e^{-b})/(b - a) == e^{-m} * sinh(h)/h, which has no cancellation.
    double sinch;
    if (std::abs(h) < 1e-4) {
        const double h2 = h * h;
        sinch = 1.0 + h2 / 6.0 + h2 * h2 / 120.0;
    } else {
        sinch = std::sinh(h) / h;
    }
    return std::exp(-m) * sinch;
}

double phi1_dd(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::max(std::abs(a), std::abs(b)) < 0.5) {
        // Double Taylor series of the divided difference; terms fall off
        // faster than 2^-k so 18 terms reach full precision.
        double sum = 0.0;
        double sign = 1.0;
        double factorial = 2.0; // (k+1)!, starting at k = 1
        double hk = 1.0;        // h_k = sum_{i=0}^{k-1} a^i b^{k-1-i}; h_1 = 1
        double bpow = 1.0;      // b^{k-1}
        for (int k = 1; k <= 18; ++k) {
            sum += sign * hk / factorial;
            sign = -sign;
            factorial *= static_cast<double>(k + 2);
            bpow *= b;
            hk = a * hk + bpow; // h_{k+1}
        }
        return sum;
    }
    if (std::abs(b - a) > 1e-5 * scale) {
        return (phi1(a) - phi1(b)) / (b - a);
    }
    // Nearly equal large arguments: midpoint derivative of phi1.
    const double m = 0.5 * (a + b);
    const double dphi1 = (std::exp(-m) * (1.0 + m) - 1.0) / (m * m);
    return -dphi1;
}

} // namespace detail

ACState step_internal(const ACState& state, double input, const ACParams& params, double dt) {
    if (!(dt > 0.0)) throw config_error("step_internal: dt must be > 0");
    const double gx = params.filter_decay;
    const double gs = params.readiness_decay;
    const double ax = gx * dt;
    const double as = gs * dt;
    const double ex = std::exp(-ax);
    const double es = std::exp(-as);

    ACState out = state;
    const double drive = params.input_gain * input;
    out.filtered = ex * state.filtered + drive * dt * detail::phi1(ax);

    // Exact propagation of the readiness stage: homogeneous part, response to
    // the decaying initial filter value, and response to the constant drive.
    const double psi = dt * detail::exp_dd(ax, as);
    const double j = dt * dt * detail::phi1_dd(ax, as);
    out.readiness = es * state.readiness +
                    params.stage_coupling * (state.filtered * psi + drive * j);
    return out;
}

int gate(double tau, const ACParams& params) {
    return (tau > 0.0 && tau < params.pulse) ? 1 : 0;
}

double secretion_rate(const ACState& state, double tau, const ACParams& params) {
    return params.secretion_gain * state.readiness * static_cast<double>(gate(tau, params));
}

ACState step_motion_ac(const ACState& state, const GridSpec& domain, double dt,
                       const ACParams& params, Rng& rng) {
    if (!(dt > 0.0)) throw config_error("step_motion_ac: dt must be > 0");
    ACState out = state;
    if (params.speed == 0.0) return out;
    Vec3 heading = rng.unit_vector();
    out.position = out.position + params.speed * dt * heading;
    reflect_into(domain, out.position, heading);
    return out;
}

} // namespace molres

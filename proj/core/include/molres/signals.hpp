#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace molres {

/// Mackey-Glass delay-differential generator parameters (time in MG units).
struct MGParams {
    double beta = 0.2;
    double gamma = 0.1;
    double n_exp = 10.0;
    double tau = 17.0;
    double dt_int = 0.1;
    double history_init = 1.2;
    /// Optional explicit history on [-tau, 0]; length must be tau/dt_int + 1.
    std::optional<std::vector<double>> history;

    void validate() const;
    int delay_steps() const; // tau / dt_int, validated integer
};

/// Integrate with classic RK4; the delayed argument is read from the stored
/// trajectory, linearly interpolated for half-step stage times. Returns
/// n_steps + 1 values x(0), x(dt), ..., x(n_steps*dt).
std::vector<double> generate(const MGParams& params, long n_steps);

/// Keep every stride-th value after dropping `discard` leading samples, then
/// rescale min/max onto [out_lo, out_hi] (degenerate range maps to midpoint).
std::vector<double> sample_and_normalize(const std::vector<double>& raw, long stride,
                                         long discard, double out_lo = 0.0,
                                         double out_hi = 1.0);

/// Single-column CSV with header "u".
void save_signal_csv(std::ostream& out, const std::vector<double>& u);
std::vector<double> load_signal_csv(std::istream& in);

} // namespace molres

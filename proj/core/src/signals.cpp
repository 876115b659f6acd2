#include "molres/signals.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "molres/csv.hpp"
#include "molres/errors.hpp"

namespace molres {

void MGParams::validate() const {
    if (!(beta > 0.0) || !(gamma > 0.0)) throw config_error("mackey-glass: beta, gamma must be > 0");
    if (tau < 0.0) throw config_error("mackey-glass: tau must be >= 0");
    if (!(dt_int > 0.0)) throw config_error("mackey-glass: dt_int must be > 0");
    if (tau > 0.0) {
        const double ratio = tau / dt_int;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
            throw config_error("mackey-glass: dt_int must divide tau exactly");
    }
    if (history && static_cast<long>(history->size()) != delay_steps() + 1)
        throw config_error("mackey-glass: supplied history must have tau/dt_int + 1 samples");
    if (history_init < 0.0) throw config_error("mackey-glass: history must be nonnegative");
}

int MGParams::delay_steps() const {
    return tau > 0.0 ? static_cast<int>(std::llround(tau / dt_int)) : 0;
}

namespace {

inline double mg_rhs(const MGParams& p, double x, double x_delayed) {
    return p.beta * x_delayed / (1.0 + std::pow(x_delayed, p.n_exp)) - p.gamma * x;
}

// Pure-ODE RK4 step for tau == 0, where the delayed argument equals the
// instantaneous stage value.
inline double rk4_ode(const MGParams& p, double x, double dt) {
    const auto f = [&](double v) { return mg_rhs(p, v, v); };
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * dt * k1);
    const double k3 = f(x + 0.5 * dt * k2);
    const double k4 = f(x + dt * k3);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

std::vector<double> generate(const MGParams& params, long n_steps) {
    params.validate();
    if (n_steps < 0) throw config_error("mackey-glass: n_steps must be >= 0");
    const double dt = params.dt_int;

    if (params.tau == 0.0) {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(n_steps) + 1);
        double x = params.history ? params.history->back() : params.history_init;
        out.push_back(x);
        for (long i = 0; i < n_steps; ++i) {
            x = rk4_ode(params, x, dt);
            out.push_back(x);
        }
        return out;
    }

    const int m = params.delay_steps();
    // buf[j] holds x((j - m) * dt); the first m + 1 entries are the history.
    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(m) + 1 + static_cast<std::size_t>(n_steps));
    if (params.history) {
        buf.insert(buf.end(), params.history->begin(), params.history->end());
    } else {
        buf.assign(static_cast<std::size_t>(m) + 1, params.history_init);
    }

    for (long i = 0; i < n_steps; ++i) {
        const std::size_t cur = static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
        const double x = buf[cur];
        const double xd0 = buf[cur - static_cast<std::size_t>(m)];          // x(t - tau)
        const double xd1 = buf[cur - static_cast<std::size_t>(m) + 1];      // x(t - tau + dt)
        const double xdh = 0.5 * (xd0 + xd1);                               // linear midpoint
        const double k1 = mg_rhs(params, x, xd0);
        const double k2 = mg_rhs(params, x + 0.5 * dt * k1, xdh);
        const double k3 = mg_rhs(params, x + 0.5 * dt * k2, xdh);
        const double k4 = mg_rhs(params, x + dt * k3, xd1);
        buf.push_back(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }

    return std::vector<double>(buf.begin() + m, buf.end());
}

std::vector<double> sample_and_normalize(const std::vector<double>& raw, long stride,
                                         long discard, double out_lo, double out_hi) {
    if (stride < 1) throw config_error("sample: stride must be >= 1");
    if (discard < 0) throw config_error("sample: discard must be >= 0");
    std::vector<double> kept;
    for (std::size_t i = static_cast<std::size_t>(discard); i < raw.size();
         i += static_cast<std::size_t>(stride))
        kept.push_back(raw[i]);
    if (kept.empty()) throw config_error("sample: retained segment is empty");

    const auto [mn_it, mx_it] = std::minmax_element(kept.begin(), kept.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx == mn) {
        std::fill(kept.begin(), kept.end(), 0.5 * (out_lo + out_hi));
        return kept;
    }
    const double scale = (out_hi - out_lo) / (mx - mn);
    for (double& v : kept) v = out_lo + (v - mn) * scale;
    return kept;
}

void save_signal_csv(std::ostream& out, const std::vector<double>& u) {
    out << "u\n";
    for (double v : u) out << format_double(v) << '\n';
}

std::vector<double> load_signal_csv(std::istream& in) {
    CsvTable t = read_csv(in);
    if (t.header != std::vector<std::string>{"u"})
        throw schema_error("signal CSV must have the single header column 'u'");
    std::vector<double> u;
    u.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        if (row.size() != 1) throw schema_error("signal CSV rows must have one column");
        u.push_back(std::stod(row[0]));
    }
    return u;
}

} // namespace molres

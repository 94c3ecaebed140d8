#include "mendel/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mendel/error.hpp"
#include "mendel/keyvalue.hpp"

namespace mendel {
namespace {

// Dormand-Prince 5(4) tableau. The field is autonomous, so the nodes c_i are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b*, the embedded fourth-order error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(const State& n) {
    return std::all_of(n.begin(), n.end(), [](double x) { return std::isfinite(x); });
}

double sup_norm(const State& n) {
    double m = 0.0;
    for (const double x : n) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

State Segment::at(double t) const noexcept {
    const double h = t1 - t0;
    if (h <= 0.0) return n0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    State out;
    for (std::size_t i = 0; i < kNumGenotypes; ++i)
        out[i] = h00 * n0[i] + h10 * h * dn0[i] + h01 * n1[i] + h11 * h * dn1[i];
    return out;
}

void Trajectory::append(double t, const State& n, const State& dn) {
    if (!times_.empty() && !(t > times_.back()))
        throw std::invalid_argument("Trajectory::append: times must be strictly increasing");
    times_.push_back(t);
    states_.push_back(n);
    derivatives_.push_back(dn);
}

void Trajectory::reserve(std::size_t count) {
    times_.reserve(count);
    states_.reserve(count);
    derivatives_.reserve(count);
}

double Trajectory::t_begin() const {
    if (times_.empty()) throw std::out_of_range("empty trajectory");
    return times_.front();
}

double Trajectory::t_end() const {
    if (times_.empty()) throw std::out_of_range("empty trajectory");
    return times_.back();
}

Segment Trajectory::segment(std::size_t i) const {
    if (i + 1 >= times_.size()) throw std::out_of_range("Trajectory::segment");
    return {times_[i], times_[i + 1], states_[i], derivatives_[i], states_[i + 1], derivatives_[i + 1]};
}

State Trajectory::at(double t) const {
    if (times_.empty() || t < times_.front() || t > times_.back())
        throw std::out_of_range("Trajectory::at: time outside stored range");
    if (times_.size() == 1) return states_.front();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.end() ? times_.size() - 2 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return segment(i).at(t);
}

InitialCondition second_mutation_preset(const ModelParams& p, double eps) {
    const double nbar_A = equilibria(p).A;
    if (!(eps > 0.0) || !(eps < nbar_A))
        throw ConfigError("second-mutation preset needs 0 < eps < nbar_A, got eps = " + format_double(eps));
    InitialCondition ic;
    ic.label = "second-mutation";
    ic.n = {eps * eps, eps, nbar_A - eps, 0.0, eps * eps * eps, 0.0};
    return ic;
}

InitialCondition monomorphic_start(Genotype g, double density) {
    if (!(density >= 0.0) || !std::isfinite(density))
        throw ConfigError("monomorphic start needs a finite nonnegative density");
    InitialCondition ic;
    ic.label = "monomorphic-" + std::string(name(g));
    ic.n[index(g)] = density;
    return ic;
}

IntegrationStats integrate(const ModelParams& p, const State& n0, double t_end,
                           const IntegratorOptions& options, const StepObserver& observer) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("integrate: t_end must be positive and finite");
    if (!(options.rel_tol > 0.0) || !(options.max_step > 0.0))
        throw ConfigError("integrate: tolerances and step cap must be positive");
    if (!is_valid_state(n0)) throw ConfigError("integrate: initial state must be finite and nonnegative");

    const double rtol = options.rel_tol;
    const double atol = options.abs_tol > 0.0 ? options.abs_tol : 1e-12 * rtol;

    IntegrationStats stats;
    auto field = [&](const State& n) {
        ++stats.evaluations;
        return vector_field(n, p);
    };

    double t = 0.0;
    State y = n0;
    State k1 = field(y);

    double h = options.initial_step;
    if (!(h > 0.0)) {
        // Hairer-Norsett-Wanner style first guess from the local scale.
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < kNumGenotypes; ++i) {
            const double sc = atol + rtol * std::fabs(y[i]);
            d0 = std::max(d0, std::fabs(y[i]) / sc);
            d1 = std::max(d1, std::fabs(k1[i]) / sc);
        }
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }
    h = std::min({h, options.max_step, t_end});

    State k2, k3, k4, k5, k6, k7, tmp, y_new;
    while (t < t_end) {
        if (stats.accepted_steps + stats.rejected_steps >= options.max_steps)
            throw NumericError("integrate: step budget exhausted at t = " + format_double(t));
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t)))
            throw NumericError("integrate: step-size underflow at t = " + format_double(t) +
                               " (stiffness or blow-up)");
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        for (std::size_t i = 0; i < 6; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = field(tmp);
        for (std::size_t i = 0; i < 6; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = field(tmp);
        for (std::size_t i = 0; i < 6; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = field(tmp);
        for (std::size_t i = 0; i < 6; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = field(tmp);
        for (std::size_t i = 0; i < 6; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = field(tmp);
        for (std::size_t i = 0; i < 6; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = field(y_new);

        double err = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 6.0);

        if (!std::isfinite(err) || !all_finite(y_new)) {
            if (h <= 1e-300) throw NumericError("integrate: non-finite state at t = " + format_double(t));
            ++stats.rejected_steps;
            h *= 0.25;
            continue;
        }

        if (err > 1.0) {
            ++stats.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        const double t_new = last ? t_end : t + h;
        const double floor = -rtol * std::max(1.0, sup_norm(y_new));
        bool clamped = false;
        for (double& x : y_new)
            if (x < floor) {
                x = 0.0;
                clamped = true;
            }
        if (clamped) {
            ++stats.clamp_events;
            k7 = field(y_new);
        }

        ++stats.accepted_steps;
        const Segment seg{t, t_new, y, k1, y_new, k7};
        t = t_new;
        y = y_new;
        k1 = k7;

        if (observer && !observer(seg)) {
            stats.stopped_by_observer = true;
            break;
        }

        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(h * factor, options.max_step);
    }
    stats.t_final = t;
    return stats;
}

Trajectory integrate(const ModelParams& p, const InitialCondition& ic, double t_end,
                     const IntegratorOptions& options) {
    Trajectory traj;
    const State dn0 = vector_field(ic.n, p);
    traj.append(0.0, ic.n, dn0);
    integrate(p, ic.n, t_end, options, [&](const Segment& seg) {
        traj.append(seg.t1, seg.n1, seg.dn1);
        return true;
    });
    return traj;
}

Trajectory integrate(const ModelParams& p, const InitialCondition& ic, double t_end, double tol) {
    if (!(tol > 1e-13 && tol < 1e-3)) throw ConfigError("integrate: tol must lie in (1e-13, 1e-3)");
    IntegratorOptions options;
    options.rel_tol = tol;
    return integrate(p, ic, t_end, options);
}

}  // namespace mendel

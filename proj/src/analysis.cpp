#include "mendel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mendel/error.hpp"
#include "mendel/keyvalue.hpp"
#include "mendel/taylor.hpp"

namespace mendel {
namespace {

double sup_norm(const State& n) {
    double m = 0.0;
    for (const double x : n) m = std::max(m, std::fabs(x));
    return m;
}

Eigen::Matrix<double, 6, 1> as_vector(const State& n) {
    Eigen::Matrix<double, 6, 1> v;
    for (std::size_t i = 0; i < kNumGenotypes; ++i) v(static_cast<Eigen::Index>(i)) = n[i];
    return v;
}

State as_state(const Eigen::Matrix<double, 6, 1>& v) {
    State n;
    for (std::size_t i = 0; i < kNumGenotypes; ++i) n[i] = v(static_cast<Eigen::Index>(i));
    return n;
}

FixedPoint labelled(std::string label, const State& n, const ModelParams& p) {
    return {std::move(label), n, sup_norm(vector_field(n, p))};
}

// aa-BB coexistence with c_aB > 0: Newton on (F_aa, F_BB) restricted to the
// face where only aa and BB are present, step halved until the residual drops.
State coexistence_newton(const ModelParams& p) {
    const auto eq = equilibria(p);
    Eigen::Vector2d x(eq.a, eq.B);
    auto residual = [&](const Eigen::Vector2d& y) {
        const auto F = vector_field(State{y(0), 0, 0, 0, 0, y(1)}, p);
        return Eigen::Vector2d(F[0], F[5]);
    };
    Eigen::Vector2d r = residual(x);
    for (int iter = 0; iter < 100 && r.lpNorm<Eigen::Infinity>() > 1e-14; ++iter) {
        const auto ex = expand_field(State{x(0), 0, 0, 0, 0, x(1)}, p);
        Eigen::Matrix2d Jr;
        Jr << ex.jacobian(0, 0), ex.jacobian(0, 5), ex.jacobian(5, 0), ex.jacobian(5, 5);
        const Eigen::Vector2d step = Jr.fullPivLu().solve(-r);
        if (!step.allFinite()) throw NumericError("coexistence Newton: singular Jacobian");
        double scale = 1.0;
        for (;; scale *= 0.5) {
            if (scale < 1e-12) throw NumericError("coexistence Newton: line search failed");
            const Eigen::Vector2d trial = x + scale * step;
            if (trial.minCoeff() <= 0.0) continue;
            const Eigen::Vector2d rt = residual(trial);
            if (rt.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>() || scale == 1.0) {
                x = trial;
                r = rt;
                break;
            }
        }
    }
    if (r.lpNorm<Eigen::Infinity>() > 1e-10 || x.minCoeff() <= 0.0)
        throw NumericError("coexistence Newton did not converge to a positive root");
    return {x(0), 0, 0, 0, 0, x(1)};
}

}  // namespace

FixedPointSet fixed_points(const ModelParams& p) {
    p.validate();
    const auto eq = equilibria(p);
    FixedPointSet s;
    s.p_a = {eq.a, 0, 0, 0, 0, 0};
    s.p_A = {0, 0, eq.A, 0, 0, 0};
    s.p_B = {0, 0, 0, 0, 0, eq.B};
    s.p_aB = p.c_aB == 0.0 ? State{eq.a, 0, 0, 0, 0, eq.B} : coexistence_newton(p);
    s.all = {labelled("p_a", s.p_a, p), labelled("p_A", s.p_A, p), labelled("p_B", s.p_B, p),
             labelled("p_aB", s.p_aB, p)};
    return s;
}

Matrix6 jacobian(const State& n, const ModelParams& p) {
    const double h = 1e-6 * std::max(1.0, sup_norm(n));
    auto central = [&](double step) {
        Matrix6 J;
        for (std::size_t j = 0; j < kNumGenotypes; ++j) {
            State up = n, down = n;
            up[j] += step;
            down[j] -= step;
            const auto Fu = vector_field(up, p);
            const auto Fd = vector_field(down, p);
            for (std::size_t i = 0; i < kNumGenotypes; ++i)
                J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (Fu[i] - Fd[i]) / (2.0 * step);
        }
        return J;
    };
    const Matrix6 J = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    if (!J.allFinite()) throw NumericError("jacobian: non-finite entries");
    return J;
}

SecondOrderExpansion expand_field(const State& n, const ModelParams& p) {
    StateT<Jet2> x;
    for (std::size_t i = 0; i < kNumGenotypes; ++i) x[i] = Jet2::variable(n[i], i);
    const auto F = vector_field(x, p);
    SecondOrderExpansion e;
    for (std::size_t i = 0; i < kNumGenotypes; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        e.value[i] = F[i].v;
        for (std::size_t j = 0; j < kNumGenotypes; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            e.jacobian(ii, jj) = F[i].g[j];
            for (std::size_t k = 0; k < kNumGenotypes; ++k)
                e.hessian[i](jj, static_cast<Eigen::Index>(k)) = F[i].hess(j, k);
        }
    }
    return e;
}

std::string_view name(Stability s) noexcept {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::non_hyperbolic: return "non-hyperbolic";
    }
    return "?";
}

SpectrumReport spectrum(const std::string& label, const State& n, const ModelParams& p, double zero_tol) {
    Eigen::EigenSolver<Matrix6> solver(jacobian(n, p), false);
    if (solver.info() != Eigen::Success) throw NumericError("eigenvalue computation failed at " + label);
    SpectrumReport r;
    r.label = label;
    for (Eigen::Index i = 0; i < 6; ++i) r.eigenvalues.push_back(solver.eigenvalues()(i));
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
              [](const auto& a, const auto& b) { return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag()); });
    bool zero = false, positive = false;
    for (const auto& ev : r.eigenvalues) {
        if (std::fabs(ev.real()) <= zero_tol) zero = true;
        else if (ev.real() > 0.0) positive = true;
    }
    r.classification = positive ? Stability::unstable : zero ? Stability::non_hyperbolic : Stability::stable;
    return r;
}

double printed_aA_eigenvalue(const ModelParams& p) {
    const double nB = equilibria(p).B;
    return -((p.f - p.D) * (5 * p.f - 4 * p.D) + p.f * p.delta) / (4 * (p.f - p.D) + p.eta * nB);
}

double exact_aA_eigenvalue(const ModelParams& p) {
    const double nB = equilibria(p).B;
    return -((p.f - p.D) * (5 * p.f - 4 * p.D) + p.f * p.delta) / (4 * (p.f - p.D)) + p.eta * nB;
}

ReducedFlow closed_form_reduced_flow(const ModelParams& p) {
    const double f = p.f, D = p.D, De = p.delta, c = p.c, eta = p.eta;
    const double f2 = f * f, f3 = f2 * f, f4 = f3 * f, f5 = f4 * f;
    const double c2 = c * c, D2 = D * D, D3 = D2 * D, De2 = De * De;
    const double Q = 4 * c * D2 - 9 * c * D * f + c * De * f + 5 * c * f2 - 4 * D2 * eta + 4 * D * De * eta +
                     8 * D * eta * f - 4 * De * eta * f - 4 * eta * f2;
    const double A1 = 3 * c2 * D * f2 - c2 * De * f2 - 3 * c2 * f3;
    const double B1 = (D - De - f) * Q;
    const double C1 = 12 * c2 * D3 * f2 - 4 * c2 * D2 * De * f2 - 39 * c2 * D2 * f3 + 12 * c2 * D * De * f3 +
                      42 * c2 * D * f4 - c2 * De2 * f3 - 8 * c2 * De * f4 - 15 * c2 * f5 + 12 * c * D3 * eta * f2 -
                      16 * c * D2 * De * eta * f2 - 36 * c * D2 * eta * f3 + 4 * c * D * De2 * eta * f2 +
                      32 * c * D * De * eta * f3 + 36 * c * D * eta * f4 - 4 * c * De2 * eta * f3 -
                      16 * c * De * eta * f4 - 12 * c * eta * f5;
    const double D1 = 8 * (D - 2 * f) * (D - f) * (D - De - f) * Q;
    const double E1 = c * f, F1 = 2 * (-D + De + f);
    const double A2 = 2 * c2 * D2 * f - 3 * c2 * D * f2 + c2 * f3 - 2 * c * D2 * eta * f + 2 * c * D * De * eta * f +
                      4 * c * D * eta * f2 - 2 * c * De * eta * f2 - 2 * c * eta * f3;
    const double B2 = B1;
    const double C2 = -3 * c * D * eta * f2 + c * De * eta * f2 + 3 * c * eta * f3;
    const double D2q = 2 * (D - 2 * f) * Q;
    const double E2 = 0.0, F2 = 1.0;
    return {Quadratic2{A1 / B1, C1 / D1, E1 / F1}, Quadratic2{A2 / B2, C2 / D2q, E2 / F2}};
}

namespace {

double s_on_ray(const ReducedFlow& flow, double theta) {
    const double y1 = std::cos(theta), y2 = std::sin(theta);
    const double x1 = y1 + y2, x2 = y2;
    const double dx1 = flow[0](x1, x2), dx2 = flow[1](x1, x2);
    return y1 * (dx1 - dx2) + y2 * dx2;
}

}  // namespace

FlowVerdict flow_verdict(const ReducedFlow& flow) {
    constexpr int kGrid = 4000;
    const double half_pi = std::acos(0.0);
    FlowVerdict v;
    v.max_s = -std::numeric_limits<double>::infinity();
    v.min_s = std::numeric_limits<double>::infinity();
    int best = 0;
    for (int i = 0; i <= kGrid; ++i) {
        const double th = half_pi * i / kGrid;
        const double s = s_on_ray(flow, th);
        if (s > v.max_s) {
            v.max_s = s;
            best = i;
        }
        v.min_s = std::min(v.min_s, s);
    }
    // golden-section refinement of the maximum around the best grid node
    double a = half_pi * std::max(0, best - 1) / kGrid, b = half_pi * std::min(kGrid, best + 1) / kGrid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double s1 = s_on_ray(flow, x1), s2 = s_on_ray(flow, x2);
    for (int it = 0; it < 60; ++it) {
        if (s1 > s2) {
            b = x2, x2 = x1, s2 = s1;
            x1 = b - g * (b - a), s1 = s_on_ray(flow, x1);
        } else {
            a = x1, x1 = x2, s1 = s2;
            x2 = a + g * (b - a), s2 = s_on_ray(flow, x2);
        }
    }
    v.argmax_theta = half_pi * best / kGrid;
    const double th = 0.5 * (a + b);
    if (const double s = s_on_ray(flow, th); s > v.max_s) {
        v.max_s = s;
        v.argmax_theta = th;
    }
    v.attracting = v.max_s < 0.0;
    return v;
}

CenterManifoldReduction center_manifold(const ModelParams& p) {
    p.validate();
    if (p.c_aB != 0.0 || p.compat != Compatibility::no_reproduction_a_B)
        throw ConfigError("center manifold reduction is defined for the base model (c_aB = 0, no a-B matings)");

    CenterManifoldReduction cm;
    cm.params = p;
    const auto eq = equilibria(p);
    cm.point = {eq.a, 0, 0, 0, 0, eq.B};
    const auto ex = expand_field(cm.point, p);
    const Matrix6& J = ex.jacobian;
    const double scale = J.cwiseAbs().maxCoeff();

    Eigen::Matrix<double, 6, 2> Ec;
    Ec << 0, 0, 0, 0, 0, 0, 1, -1, 0, 1, -1, 0;
    if ((J * Ec).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericError("EV1/EV2 are not null vectors of the Jacobian at p_aB");

    Eigen::EigenSolver<Matrix6> solver(J);
    if (solver.info() != Eigen::Success) throw NumericError("eigen decomposition failed at p_aB");
    std::vector<std::pair<double, Eigen::Matrix<double, 6, 1>>> stable;
    for (Eigen::Index i = 0; i < 6; ++i) {
        const auto lam = solver.eigenvalues()(i);
        if (std::fabs(lam.real()) <= 1e-8 * scale) continue;
        if (lam.real() >= 0.0 || std::fabs(lam.imag()) > 1e-10 * scale)
            throw NumericError("p_aB spectrum is not two zeros plus four real negative eigenvalues");
        Eigen::Matrix<double, 6, 1> v = solver.eigenvectors().col(i).real();
        Eigen::Index arg;
        v.cwiseAbs().maxCoeff(&arg);
        v /= v(arg);
        stable.emplace_back(lam.real(), v);
    }
    if (stable.size() != 4) throw NumericError("expected exactly two zero eigenvalues at p_aB");
    std::sort(stable.begin(), stable.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    cm.basis.leftCols<2>() = Ec;
    for (int k = 0; k < 4; ++k) {
        cm.basis.col(2 + k) = stable[static_cast<std::size_t>(k)].second;
        cm.stable_eigenvalues[static_cast<std::size_t>(k)] = stable[static_cast<std::size_t>(k)].first;
    }
    Eigen::FullPivLU<Matrix6> lu(cm.basis);
    if (!lu.isInvertible()) throw NumericError("eigenbasis at p_aB is singular");
    const Matrix6 Tinv = lu.inverse();
    const Matrix6 A = Tinv * J * cm.basis;
    cm.C = A.topLeftCorner<2, 2>();
    cm.P = A.bottomRightCorner<4, 4>();

    // Quadratic part of the transformed field on the centre directions:
    // component k gets 1/2 sum_l Tinv(k,l) x^T (Ec^T H_l Ec) x.
    Eigen::Matrix<double, 6, 3> G2 = Eigen::Matrix<double, 6, 3>::Zero();  // columns x1^2, x1x2, x2^2
    for (int l = 0; l < 6; ++l) {
        const Eigen::Matrix2d Q = Ec.transpose() * ex.hessian[static_cast<std::size_t>(l)] * Ec;
        const Eigen::Vector3d mono(0.5 * Q(0, 0), Q(0, 1), 0.5 * Q(1, 1));
        for (int k = 0; k < 6; ++k) G2.row(k) += Tinv(k, l) * mono.transpose();
    }

    // Dh(x) C x in the monomial basis (x1^2, x1x2, x2^2).
    const auto& Cm = cm.C;
    Eigen::Matrix3d M;
    M << 2 * Cm(0, 0), 2 * Cm(0, 1), 0,
         Cm(1, 0), Cm(0, 0) + Cm(1, 1), Cm(0, 1),
         0, 2 * Cm(1, 0), 2 * Cm(1, 1);
    const Eigen::Matrix<double, 4, 3> Gs = G2.bottomRows<4>();
    Eigen::Matrix<double, 12, 12> L = Eigen::Matrix<double, 12, 12>::Zero();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) L.block<4, 4>(4 * a, 4 * b) = M(b, a) * Eigen::Matrix4d::Identity();
    for (int a = 0; a < 3; ++a) L.block<4, 4>(4 * a, 4 * a) -= cm.P;
    Eigen::FullPivLU<Eigen::Matrix<double, 12, 12>> lu12(L);
    if (!lu12.isInvertible()) throw NumericError("centre-manifold coefficient system is singular");
    Eigen::Matrix<double, 12, 1> rhs;
    for (int a = 0; a < 3; ++a) rhs.segment<4>(4 * a) = Gs.col(a);
    const Eigen::Matrix<double, 12, 1> sol = lu12.solve(rhs);
    for (int a = 0; a < 3; ++a) cm.h.col(a) = sol.segment<4>(4 * a);
    cm.cme_residual = (cm.h * M - cm.P * cm.h - Gs).cwiseAbs().maxCoeff();

    for (int k = 0; k < 2; ++k)
        cm.flow[static_cast<std::size_t>(k)] = Quadratic2{G2(k, 1), G2(k, 2), G2(k, 0)};
    cm.closed_form = closed_form_reduced_flow(p);

    const char* names[2][3] = {{"A1/B1", "C1/D1", "E1/F1"}, {"A2/B2", "C2/D2", "E2/F2"}};
    cm.max_relative_mismatch = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const double num[3] = {cm.flow[k].x1x2, cm.flow[k].x2x2, cm.flow[k].x1x1};
        const double ref[3] = {cm.closed_form[k].x1x2, cm.closed_form[k].x2x2, cm.closed_form[k].x1x1};
        const double row_scale = std::max({std::fabs(ref[0]), std::fabs(ref[1]), std::fabs(ref[2])});
        for (int m = 0; m < 3; ++m) {
            const double denom = ref[m] != 0.0 ? std::fabs(ref[m]) : row_scale;
            const double rel = std::fabs(num[m] - ref[m]) / denom;
            cm.checks.push_back({names[k][m], num[m], ref[m], rel});
            cm.max_relative_mismatch = std::max(cm.max_relative_mismatch, rel);
        }
    }
    cm.closed_form_agrees = cm.max_relative_mismatch <= 1e-8;
    cm.verdict = flow_verdict(cm.flow);
    cm.closed_form_verdict = flow_verdict(cm.closed_form);
    return cm;
}

Eigen::Vector4d cme_residual_at(const CenterManifoldReduction& cm, double x1, double x2) {
    const Eigen::Vector3d mono(x1 * x1, x1 * x2, x2 * x2);
    const Eigen::Vector4d hx = cm.h * mono;
    Eigen::Matrix<double, 6, 1> z;
    z << x1, x2, hx;
    const Eigen::Matrix<double, 6, 1> n = as_vector(cm.point) + cm.basis * z;
    const Eigen::Matrix<double, 6, 1> Fz = cm.basis.fullPivLu().solve(as_vector(vector_field(as_state(n), cm.params)));
    Eigen::Matrix<double, 4, 2> Dh;
    for (int k = 0; k < 4; ++k) {
        Dh(k, 0) = 2 * cm.h(k, 0) * x1 + cm.h(k, 1) * x2;
        Dh(k, 1) = cm.h(k, 1) * x1 + 2 * cm.h(k, 2) * x2;
    }
    return Dh * Fz.head<2>() - Fz.tail<4>();
}

double r_ratio(double lambda) {
    if (!(lambda >= 0.0)) throw ConfigError("r_ratio needs lambda >= 0");
    const double l = lambda, l2 = l * l, l3 = l2 * l;
    return (16 * l3 + 7 * l2 + 16 * l + 40) / (4 * (5 * l3 + 8 * l2 + 8 * l + 8));
}

Extremum r_extremum() {
    // coarse scan for the interior minimum, then golden-section refinement
    double best = 0.0, best_value = r_ratio(0.0);
    for (int i = 1; i <= 100000; ++i) {
        const double l = 1e-3 * i;
        const double v = r_ratio(l);
        if (v < best_value) best = l, best_value = v;
    }
    double a = std::max(0.0, best - 1e-3), b = best + 1e-3;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = r_ratio(x1), f2 = r_ratio(x2);
    while (b - a > 1e-12) {
        if (f1 < f2) {
            b = x2, x2 = x1, f2 = f1;
            x1 = b - g * (b - a), f1 = r_ratio(x1);
        } else {
            a = x1, x1 = x2, f1 = f2;
            x2 = a + g * (b - a), f2 = r_ratio(x2);
        }
    }
    const double arg = 0.5 * (a + b);
    return {arg, r_ratio(arg)};
}

double stability_threshold(const ModelParams& p) { return p.c * r_extremum().value; }

double verdict_flip_eta(ModelParams p, double lo, double hi, double tol) {
    auto attracting = [&](double eta) {
        p.eta = eta;
        return center_manifold(p).verdict.attracting;
    };
    const bool at_lo = attracting(lo);
    if (at_lo == attracting(hi)) throw ConfigError("verdict does not change on the given eta interval");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (attracting(mid) == at_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string_view name(ScalingAxes a) noexcept { return a == ScalingAxes::log_log ? "log-log" : "log-x"; }

ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y, ScalingAxes axes) {
    if (x.size() != y.size()) throw ConfigError("fit_scaling: x and y lengths differ");
    if (x.size() < 4) throw ConfigError("fit_scaling: at least 4 points required");
    std::vector<double> X, Y;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || (axes == ScalingAxes::log_log && !(y[i] > 0.0)) || !std::isfinite(y[i]))
            throw ConfigError("fit_scaling: log of a nonpositive or non-finite value");
        X.push_back(std::log(x[i]));
        Y.push_back(axes == ScalingAxes::log_log ? std::log(y[i]) : y[i]);
    }
    const double n = static_cast<double>(X.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < X.size(); ++i) mx += X[i] / n, my += Y[i] / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
        syy += (Y[i] - my) * (Y[i] - my);
    }
    if (sxx <= 1e-300 * std::max(1.0, mx * mx)) throw ConfigError("fit_scaling: degenerate design (all x equal)");
    ScalingFit fit;
    fit.axes = axes;
    fit.points = X.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double r = Y[i] - (fit.intercept + fit.slope * X[i]);
        ssr += r * r;
    }
    fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;
    fit.residual_rms = std::sqrt(ssr / n);
    return fit;
}

std::vector<double> geometric_grid(double first, double ratio, int count) {
    if (!(first > 0.0) || !(ratio > 0.0) || count < 1) throw ConfigError("geometric grid needs positive values");
    std::vector<double> g;
    for (int k = 0; k < count; ++k) g.push_back(first * std::pow(ratio, k));
    return g;
}

}  // namespace mendel

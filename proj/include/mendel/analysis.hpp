#pragma once

// Fixed points, Jacobian spectra, the second-order centre-manifold reduction
// at p_aB, the stability threshold c * r_max and power-law fits.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mendel/rates.hpp"

namespace mendel {

using Matrix6 = Eigen::Matrix<double, 6, 6>;

struct FixedPoint {
    std::string label;
    State n{};
    double residual = 0.0;  ///< |F(n)|_inf
};

struct FixedPointSet {
    State p_a{}, p_A{}, p_B{}, p_aB{};
    /// Labelled list in the order p_a, p_A, p_B, p_aB with residuals.
    std::vector<FixedPoint> all;
};

/// Closed forms for the monomorphic points; with c_aB > 0 the aa-BB
/// coexistence point is found by damped Newton from (nbar_a, nbar_B).
/// Throws NumericError if Newton fails or the root leaves the orthant.
FixedPointSet fixed_points(const ModelParams& p);

/// Central differences, step 1e-6 * max(1, |n|_inf), one Richardson extrapolation.
Matrix6 jacobian(const State& n, const ModelParams& p);

/// Value, Jacobian and per-component Hessians from Taylor jets.
struct SecondOrderExpansion {
    State value{};
    Matrix6 jacobian = Matrix6::Zero();
    std::array<Matrix6, 6> hessian{};
};
SecondOrderExpansion expand_field(const State& n, const ModelParams& p);

enum class Stability { stable, unstable, non_hyperbolic };
std::string_view name(Stability s) noexcept;

struct SpectrumReport {
    std::string label;
    std::vector<std::complex<double>> eigenvalues;  ///< sorted by real part, descending
    Stability classification = Stability::stable;
};

/// Eigenvalues of the finite-difference Jacobian; an eigenvalue with
/// |Re| <= zero_tol makes the point non-hyperbolic.
SpectrumReport spectrum(const std::string& label, const State& n, const ModelParams& p, double zero_tol = 1e-8);

/// The eigenvalue of J(p_aB) that is not one of -(2f - D), -(f - D + Delta),
/// -(f - D - Delta) or 0, in two forms: the rational expression as printed,
/// ((f-D)(5f-4D) + f Delta) / (4(f-D) + eta nbar_B) negated, and the exact
/// Jacobian entry -((f-D)(5f-4D) + f Delta) / (4(f-D)) + eta nbar_B.
/// They coincide at eta = 0.
double printed_aA_eigenvalue(const ModelParams& p);
double exact_aA_eigenvalue(const ModelParams& p);

/// Homogeneous quadratic a x1 x2 + b x2^2 + c x1^2.
struct Quadratic2 {
    double x1x2 = 0.0, x2x2 = 0.0, x1x1 = 0.0;
    double operator()(double x1, double x2) const { return x1x2 * x1 * x2 + x2x2 * x2 * x2 + x1x1 * x1 * x1; }
};

/// Second-order reduced flow (x1', x2') on the centre manifold.
using ReducedFlow = std::array<Quadratic2, 2>;

/// The closed forms A1/B1 ... E2/F2 as printed.
ReducedFlow closed_form_reduced_flow(const ModelParams& p);

struct FlowVerdict {
    bool attracting = false;
    /// s(theta) = y . y' on the unit quarter circle, y1 = n_aB, y2 = n_AB.
    double max_s = 0.0;
    double argmax_theta = 0.0;
    double min_s = 0.0;
};
FlowVerdict flow_verdict(const ReducedFlow& flow);

struct CoefficientCheck {
    std::string name;  ///< "A1/B1", "C1/D1", ...
    double numeric = 0.0;
    double closed_form = 0.0;
    double relative_error = 0.0;
};

struct CenterManifoldReduction {
    ModelParams params;
    State point{};
    Matrix6 basis = Matrix6::Zero();  ///< columns EV1, EV2, then the stable eigenvectors
    Eigen::Matrix2d C = Eigen::Matrix2d::Zero();
    Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
    std::array<double, 4> stable_eigenvalues{};
    /// h_k(x) = lambda_k x1^2 + nu_k x1 x2 + mu_k x2^2 for k = 3..6, rows k-3.
    Eigen::Matrix<double, 4, 3> h = Eigen::Matrix<double, 4, 3>::Zero();
    double cme_residual = 0.0;  ///< max |quadratic terms| after substitution
    ReducedFlow flow{};
    ReducedFlow closed_form{};
    std::vector<CoefficientCheck> checks;
    double max_relative_mismatch = 0.0;
    bool closed_form_agrees = false;  ///< every coefficient within 1e-8 relative
    FlowVerdict verdict;
    FlowVerdict closed_form_verdict;  ///< verdict the printed coefficients would give
};

/// Throws ConfigError unless c_aB = 0 and compat is the default, NumericError
/// if the linear system for h is singular or the spectrum is not 2 zeros + 4 stable.
CenterManifoldReduction center_manifold(const ModelParams& p);

/// Full nonlinear residual of the centre-manifold equation at x, using the
/// quadratic h; O(|x|^3) when h is right.
Eigen::Vector4d cme_residual_at(const CenterManifoldReduction& cm, double x1, double x2);

/// r(l) = (16 l^3 + 7 l^2 + 16 l + 40) / (4 (5 l^3 + 8 l^2 + 8 l + 8)); ConfigError for l < 0.
double r_ratio(double lambda);

struct Extremum {
    double argument = 0.0;
    double value = 0.0;
};
/// Interior extremum of r on (0, inf), located by golden-section search.
Extremum r_extremum();

/// c * r_max.
double stability_threshold(const ModelParams& p);

/// eta in [lo, hi] where the reduced-flow verdict flips, by bisection.
/// ConfigError if the verdicts at lo and hi agree.
double verdict_flip_eta(ModelParams p, double lo, double hi, double tol = 1e-6);

enum class ScalingAxes {
    log_log,  ///< log y against log x
    log_x,    ///< y against log x
};
std::string_view name(ScalingAxes a) noexcept;

struct ScalingFit {
    ScalingAxes axes = ScalingAxes::log_log;
    std::size_t points = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r_squared = 0.0;
    double residual_rms = 0.0;
};

/// Ordinary least squares. ConfigError for fewer than 4 points, mismatched
/// lengths, nonpositive values under a log, or all x equal.
ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y, ScalingAxes axes);

/// eps_k = first * ratio^k, k = 0..count-1.
std::vector<double> geometric_grid(double first, double ratio, int count);

}  // namespace mendel

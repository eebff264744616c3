#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gnormal/auxiliary.hpp"
#include "gnormal/forward.hpp"

namespace gnormal {

/// Piecewise-linear interpolant through sorted nodes (xs, ys). Throws
/// WindowOutOfRange outside [xs.front(), xs.back()].
double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x);

/// Nodes carrying the quadrature of the L2 density error.
enum class L2Nodes {
    /// Coarse density interpolated linearly onto the reference nodes,
    /// weighted by h_ref. Resolves the switching interfaces at the
    /// reference spacing.
    reference,
    /// Reference density interpolated linearly onto the coarse nodes,
    /// weighted by h_coarse.
    coarse,
};

/// sqrt(sum_k (f_coarse(x_k) - f_ref(x_k))^2 dx) over the nodes x_k of the
/// chosen table that fall inside `window`; the other table is interpolated
/// linearly. Throws WindowOutOfRange unless the window lies inside both
/// tables' spans.
double l2_density_error(const DensityTable& coarse, const DensityTable& reference,
                        Interval window, L2Nodes nodes = L2Nodes::reference);

/// log(err_coarse / err_fine) / log(h_coarse / h_fine). Throws InvalidParam
/// for nonpositive inputs or equal spacings.
double convergence_rate(double err_coarse, double h_coarse, double err_fine, double h_fine);

struct RefinementRow {
    int n_steps = 0;
    double h = 0.0;
    double error = 0.0;
    std::optional<double> rate;
};

struct StudyConfig {
    GParams params;
    double ratio = 1.1;
    double tol = kDefaultTolerance;
    bool strict = false;
};

/// L2 density error of each N in `n_list` against `n_ref`, sorted by N.
std::vector<RefinementRow> refine_study_density(const StudyConfig& config, const Payoff& payoff,
                                                std::span<const int> n_list, int n_ref,
                                                Interval window,
                                                L2Nodes nodes = L2Nodes::reference);

struct CurvatureRow {
    int n_steps = 0;
    double h = 0.0;
    double err_v = 0.0;
    std::optional<double> order_v;
    double err_w = 0.0;
    std::optional<double> order_w;
};

/// Window covering every node of a lattice level.
inline constexpr Interval kWholeLevel{-std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity()};

/// L-infinity errors of the curvature delta_h^2 U and of the flux recursion
/// at the level nearest `t_eval`, against a reference run at `n_ref`
/// interpolated linearly in x. The maximum runs over the coarse nodes of that
/// level inside `window`; throws WindowOutOfRange if there are none.
std::vector<CurvatureRow> refine_study_curvature(const StudyConfig& config, const Payoff& payoff,
                                                 std::span<const int> n_list, int n_ref,
                                                 double t_eval, Interval window = kWholeLevel,
                                                 FluxTerminal terminal = FluxTerminal::discrete);

}  // namespace gnormal

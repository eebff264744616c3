#include "gnormal/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace gnormal {

namespace {

std::optional<double> rate_or_none(double err_coarse, double h_coarse, double err_fine,
                                   double h_fine)
{
    if (!(err_coarse > 0.0) || !(err_fine > 0.0)) {
        return std::nullopt;
    }
    return convergence_rate(err_coarse, h_coarse, err_fine, h_fine);
}

std::vector<int> sorted_levels(std::span<const int> n_list, int n_ref)
{
    if (n_list.empty()) {
        throw InvalidParam("n_list must not be empty");
    }
    std::vector<int> ns(n_list.begin(), n_list.end());
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (!(n_ref > ns.back())) {
        throw InvalidParam("n_ref must exceed every entry of n_list");
    }
    return ns;
}

// Nodes x_i and values of one lattice level, for interpolation.
struct LevelProfile {
    std::vector<double> xs;
    std::vector<double> ys;
};

LevelProfile profile(const Lattice& lat, int n, const Grid& grid)
{
    LevelProfile p;
    const int hw = lat.half_width(n);
    const auto vals = lat.level(n);
    for (int i = -hw; i <= hw; ++i) {
        p.xs.push_back(grid.x(i));
        p.ys.push_back(vals[static_cast<std::size_t>(i + hw)]);
    }
    return p;
}

int nearest_level(const Grid& grid, double t_eval)
{
    const int n = static_cast<int>(std::lround(t_eval / grid.dt));
    return std::clamp(n, 1, grid.n_steps);
}

double sup_error(const LevelProfile& coarse, const LevelProfile& ref, Interval window)
{
    double err = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < coarse.xs.size(); ++k) {
        if (!window.contains(coarse.xs[k])) {
            continue;
        }
        const double r = interpolate_linear(ref.xs, ref.ys, coarse.xs[k]);
        err = std::max(err, std::abs(coarse.ys[k] - r));
        any = true;
    }
    if (!any) {
        throw WindowOutOfRange("no coarse lattice node inside the evaluation window");
    }
    return err;
}

void split(const DensityTable& table, std::vector<double>& xs, std::vector<double>& fs)
{
    xs.reserve(table.rows.size());
    fs.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        xs.push_back(row.x);
        fs.push_back(row.density);
    }
}

}  // namespace

double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x)
{
    if (xs.empty() || xs.size() != ys.size() || x < xs.front() || x > xs.back()) {
        throw WindowOutOfRange("interpolation point outside the reference span");
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) {
        return ys.back();
    }
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

double l2_density_error(const DensityTable& coarse, const DensityTable& reference,
                        Interval window, L2Nodes nodes)
{
    if (coarse.rows.empty() || reference.rows.empty()) {
        throw WindowOutOfRange("empty density table");
    }
    if (!(window.lo <= window.hi) || window.lo < reference.rows.front().x
        || window.hi > reference.rows.back().x || window.lo < coarse.rows.front().x
        || window.hi > coarse.rows.back().x) {
        throw WindowOutOfRange("window is not inside both density tables");
    }
    const bool on_reference = nodes == L2Nodes::reference;
    const DensityTable& quad = on_reference ? reference : coarse;
    const DensityTable& other = on_reference ? coarse : reference;
    std::vector<double> xs;
    std::vector<double> fs;
    split(other, xs, fs);

    double acc = 0.0;
    for (const auto& row : quad.rows) {
        if (!window.contains(row.x)) {
            continue;
        }
        const double diff = row.density - interpolate_linear(xs, fs, row.x);
        acc += diff * diff * quad.h;
    }
    return std::sqrt(acc);
}

double convergence_rate(double err_coarse, double h_coarse, double err_fine, double h_fine)
{
    if (!(err_coarse > 0.0) || !(err_fine > 0.0) || !(h_coarse > 0.0) || !(h_fine > 0.0)) {
        throw InvalidParam("convergence rate needs positive errors and spacings");
    }
    if (h_coarse == h_fine) {
        throw InvalidParam("convergence rate needs two distinct spacings");
    }
    return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

std::vector<RefinementRow> refine_study_density(const StudyConfig& config, const Payoff& payoff,
                                                std::span<const int> n_list, int n_ref,
                                                Interval window, L2Nodes nodes)
{
    const std::vector<int> ns = sorted_levels(n_list, n_ref);

    auto terminal_density = [&](int n) {
        const Grid grid = build_grid(config.params, n, config.ratio, config.strict);
        const BackwardSolution sol = solve_backward(grid, payoff, config.tol);
        return std::pair{grid, density(propagate(sol).terminal)};
    };

    const DensityTable reference = terminal_density(n_ref).second;
    std::vector<RefinementRow> rows;
    for (int n : ns) {
        const auto [grid, table] = terminal_density(n);
        RefinementRow row;
        row.n_steps = n;
        row.h = grid.h;
        row.error = l2_density_error(table, reference, window, nodes);
        if (!rows.empty()) {
            row.rate = rate_or_none(rows.back().error, rows.back().h, row.error, row.h);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<CurvatureRow> refine_study_curvature(const StudyConfig& config, const Payoff& payoff,
                                                 std::span<const int> n_list, int n_ref,
                                                 double t_eval, Interval window,
                                                 FluxTerminal terminal)
{
    const std::vector<int> ns = sorted_levels(n_list, n_ref);
    if (!(t_eval > 0.0) || !(t_eval <= config.params.horizon)) {
        throw InvalidParam("t_eval must lie in (0, T]");
    }

    struct Profiles {
        Grid grid;
        LevelProfile v;
        LevelProfile w;
    };
    auto run = [&](int n) {
        const Grid grid = build_grid(config.params, n, config.ratio, config.strict);
        const int level = nearest_level(grid, t_eval);
        Profiles out{grid, {}, {}};
        {
            const BackwardSolution sol = solve_backward(grid, payoff, config.tol);
            out.v = profile(curvature_from_solution(sol).v, level, grid);
        }
        const FluxSolution flux = solve_w_scheme(grid, payoff, config.tol, terminal);
        out.w = profile(flux.flux, level, grid);
        return out;
    };

    const Profiles reference = run(n_ref);
    std::vector<CurvatureRow> rows;
    for (int n : ns) {
        const Profiles coarse = run(n);
        CurvatureRow row;
        row.n_steps = n;
        row.h = coarse.grid.h;
        row.err_v = sup_error(coarse.v, reference.v, window);
        row.err_w = sup_error(coarse.w, reference.w, window);
        if (!rows.empty()) {
            row.order_v = rate_or_none(rows.back().err_v, rows.back().h, row.err_v, row.h);
            row.order_w = rate_or_none(rows.back().err_w, rows.back().h, row.err_w, row.h);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gnormal

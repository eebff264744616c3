#include "gnormal/core.hpp"

#include <cmath>
#include <cstdio>

namespace gnormal {

namespace {

// h is derived through a square root, so 1/ratio^2 lands a few ulps either
// side of the exact bound when ratio is 1 or sqrt(2).
constexpr double kCflSlack = 1e-12;

std::string format_cfl_message(double cfl, double bound)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "CFL violated: %.4g > %.4g", cfl, bound);
    return buf;
}

}  // namespace

CflViolation::CflViolation(double cfl, double bound)
    : ConfigError(format_cfl_message(cfl, bound)), cfl_(cfl), bound_(bound)
{
}

void GParams::validate() const
{
    if (!(std::isfinite(sigma_lo_sq) && std::isfinite(sigma_hi_sq) && std::isfinite(horizon))) {
        throw InvalidParam("parameters must be finite");
    }
    if (!(sigma_lo_sq > 0.0)) {
        throw InvalidParam("sigma_lo_sq must be positive");
    }
    if (!(sigma_lo_sq <= sigma_hi_sq)) {
        throw InvalidParam("sigma_lo_sq must not exceed sigma_hi_sq");
    }
    if (!(horizon > 0.0)) {
        throw InvalidParam("horizon must be positive");
    }
}

void Grid::check_cfl() const
{
    const double bound = cfl_bound();
    if (!(cfl <= bound * (1.0 + kCflSlack))) {
        throw CflViolation(cfl, bound);
    }
}

bool Grid::same_mesh(const Grid& other) const noexcept
{
    return n_steps == other.n_steps && dt == other.dt && h == other.h
           && params.sigma_lo_sq == other.params.sigma_lo_sq
           && params.sigma_hi_sq == other.params.sigma_hi_sq
           && params.horizon == other.params.horizon;
}

Grid build_grid(const GParams& params, int n_steps, double ratio, bool strict)
{
    params.validate();
    if (n_steps < 1) {
        throw InvalidParam("n_steps must be at least 1");
    }
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        throw InvalidParam("ratio must be positive");
    }

    Grid g;
    g.params = params;
    g.n_steps = n_steps;
    g.dt = params.horizon / n_steps;
    g.h = std::sqrt(params.sigma_hi_sq * g.dt) * ratio;
    g.ratio = ratio;
    g.cfl = params.sigma_hi_sq * g.dt / (g.h * g.h);
    g.strict = strict;
    g.check_cfl();
    return g;
}

// ---------------------------------------------------------------------------

template <typename T>
TriangularLattice<T>::TriangularLattice(int n_levels, int inset, T fill) : inset_(inset)
{
    if (n_levels < 0 || inset < 0) {
        throw InvalidParam("lattice dimensions must be nonnegative");
    }
    offsets_.assign(static_cast<std::size_t>(n_levels) + 1, 0);
    for (int n = 0; n < n_levels; ++n) {
        const int hw = n - inset;
        const std::size_t size = hw >= 0 ? static_cast<std::size_t>(2 * hw + 1) : 0;
        offsets_[n + 1] = offsets_[n] + size;
    }
    data_.assign(offsets_.back(), fill);
}

template <typename T>
T& TriangularLattice<T>::at(int n, int i)
{
    if (!contains(n, i)) {
        throw IndexOutOfLattice("node (" + std::to_string(n) + ", " + std::to_string(i)
                                + ") is outside the lattice");
    }
    return (*this)(n, i);
}

template <typename T>
const T& TriangularLattice<T>::at(int n, int i) const
{
    if (!contains(n, i)) {
        throw IndexOutOfLattice("node (" + std::to_string(n) + ", " + std::to_string(i)
                                + ") is outside the lattice");
    }
    return (*this)(n, i);
}

template class TriangularLattice<double>;

}  // namespace gnormal

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnormal {

// ---------------------------------------------------------------------------
// Errors
//
// ConfigError covers everything a user can fix by changing inputs (the CLI
// maps it to exit code 2); NumericalError covers failures discovered while
// computing (exit code 3).
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class NumericalError : public Error {
  public:
    using Error::Error;
};

class InvalidParam : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class CflViolation : public ConfigError {
  public:
    CflViolation(double cfl, double bound);
    double cfl() const noexcept { return cfl_; }
    double bound() const noexcept { return bound_; }

  private:
    double cfl_;
    double bound_;
};

class IndexOutOfLattice : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class GridMismatch : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class WindowOutOfRange : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class HistoryMissing : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class NonFiniteValue : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class NegativeMass : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class StabilityViolation : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// ---------------------------------------------------------------------------
// Model parameters and grid
// ---------------------------------------------------------------------------

/// Variance interval [sigma_lo_sq, sigma_hi_sq] of a G-normal variable and the
/// time horizon of the associated control problem.
struct GParams {
    double sigma_lo_sq = 0.04;
    double sigma_hi_sq = 1.0;
    double horizon = 1.0;

    /// Throws InvalidParam unless 0 < sigma_lo_sq <= sigma_hi_sq and horizon > 0.
    void validate() const;
};

/// Uniform space-time mesh with the parabolic scaling h = sqrt(sigma_hi_sq * dt) * ratio.
struct Grid {
    GParams params;
    int n_steps = 0;
    double dt = 0.0;
    double h = 0.0;
    double ratio = 0.0;
    /// sigma_hi_sq * dt / h^2, equal to 1 / ratio^2 up to rounding.
    double cfl = 0.0;
    bool strict = false;

    double x(int i) const noexcept { return i * h; }
    double t(int n) const noexcept { return n * dt; }
    /// Active CFL bound: 1, or 1/2 in strict mode.
    double cfl_bound() const noexcept { return strict ? 0.5 : 1.0; }

    /// Re-checks the CFL bound; throws CflViolation.
    void check_cfl() const;

    /// True when both grids describe the same mesh and parameters.
    bool same_mesh(const Grid& other) const noexcept;
};

/// Builds the mesh for N time steps. Rejects the grid when the CFL number
/// exceeds 1 (or 1/2 when `strict` is set).
Grid build_grid(const GParams& params, int n_steps, double ratio, bool strict = false);

// ---------------------------------------------------------------------------
// Triangular lattice
// ---------------------------------------------------------------------------

/// Dense per-level storage over the trinomial triangle. Level n holds the
/// nodes i = -(n - inset) .. (n - inset); levels with n < inset are empty.
/// With inset 0 level n has exactly 2n + 1 entries.
template <typename T>
class TriangularLattice {
  public:
    TriangularLattice() = default;
    TriangularLattice(int n_levels, int inset = 0, T fill = T{});

    int n_levels() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
    int inset() const noexcept { return inset_; }

    /// Largest |i| stored at level n, or -1 for an empty level.
    int half_width(int n) const noexcept { return n - inset_ >= 0 ? n - inset_ : -1; }
    std::size_t level_size(int n) const noexcept { return offsets_[n + 1] - offsets_[n]; }
    std::size_t total_size() const noexcept { return data_.size(); }

    bool contains(int n, int i) const noexcept
    {
        return n >= 0 && n < n_levels() && half_width(n) >= 0 && i >= -half_width(n)
               && i <= half_width(n);
    }

    /// Level n, indexed from i = -half_width(n).
    std::span<T> level(int n) noexcept
    {
        return {data_.data() + offsets_[n], level_size(n)};
    }
    std::span<const T> level(int n) const noexcept
    {
        return {data_.data() + offsets_[n], level_size(n)};
    }

    /// Bounds-checked access; throws IndexOutOfLattice.
    T& at(int n, int i);
    const T& at(int n, int i) const;

    /// Unchecked access.
    T& operator()(int n, int i) noexcept { return data_[offsets_[n] + (i + half_width(n))]; }
    const T& operator()(int n, int i) const noexcept
    {
        return data_[offsets_[n] + (i + half_width(n))];
    }

    std::span<const T> data() const noexcept { return data_; }

  private:
    int inset_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<T> data_;
};

using Lattice = TriangularLattice<double>;

extern template class TriangularLattice<double>;

/// Closed interval [lo, hi] on the real line.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Default switching tolerance for the bang-bang control.
inline constexpr double kDefaultTolerance = 1e-6;

}  // namespace gnormal

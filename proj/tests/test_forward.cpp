#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gnormal/forward.hpp"
#include "oracles.hpp"

using namespace gnormal;

namespace {

const GParams kParams{0.04, 1.0, 1.0};

double bump(double t, double x)
{
    const double r = x / 1.5;
    if (std::abs(r) >= 1.0) {
        return 0.0;
    }
    return (1.0 + t) * std::exp(-1.0 / (1.0 - r * r)) * std::cos(2.0 * x);
}

}  // namespace

TEST_CASE("one step spreads the unit mass over three nodes")
{
    const Grid g = build_grid(kParams, 1, 1.1);
    const ForwardResult fwd = propagate(solve_backward(g, builtin_payoff("square")));
    const double q = 1.0 / 2.42;
    REQUIRE(fwd.terminal.masses.size() == 3);
    CHECK(fwd.terminal.mass(-1) == doctest::Approx(q).epsilon(1e-15));
    CHECK(fwd.terminal.mass(0) == doctest::Approx(1.0 - 2.0 * q).epsilon(1e-15));
    CHECK(fwd.terminal.mass(1) == doctest::Approx(q).epsilon(1e-15));
    CHECK(fwd.terminal.level == 1);
    CHECK(fwd.terminal.x(1) == g.h);
}

TEST_CASE("second moment of the controlled law")
{
    const Grid g = build_grid(kParams, 800, 1.1);
    const ForwardResult sq = propagate(solve_backward(g, builtin_payoff("square")));
    const ForwardResult nsq = propagate(solve_backward(g, builtin_payoff("neg_square")));
    CHECK(sq.terminal.moment(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nsq.terminal.moment(2) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(std::abs(sq.terminal.moment(1)) <= 1e-14);
    CHECK(sq.terminal.moment(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("forward expectation equals the backward root")
{
    for (const int N : {1, 7, 100, 400, 800}) {
        const Grid g = build_grid(kParams, N, 1.1);
        for (const char* name : {"square", "neg_square", "sin3x", "cube"}) {
            CAPTURE(N);
            const Payoff phi = builtin_payoff(name);
            const BackwardSolution sol = solve_backward(g, phi);
            const ForwardResult fwd = propagate(sol);
            const double gap = std::abs(expectation_forward(fwd.terminal, phi) - sol.root);
            CHECK(gap <= 1e-12 * std::max(1.0, std::abs(sol.root)));
            CHECK(fwd.max_mass_defect <= 1e-12);
            CHECK(fwd.min_mass >= 0.0);
        }
    }
}

TEST_CASE("terminal law matches path enumeration")
{
    for (const int N : {2, 4, 6}) {
        const Grid g = build_grid(kParams, N, 1.3);
        for (const char* text : {"sin3x", "cos(5*x)", "x^4 - 3*x^2"}) {
            const BackwardSolution sol = solve_backward(g, make_payoff(text));
            const auto law =
                oracle::chain_law(g, [&](int n, int i) { return control_at(sol, n, i); });
            const ForwardResult fwd = propagate(sol);
            for (int i = -N; i <= N; ++i) {
                const auto it = law.find(i);
                const double expected = it == law.end() ? 0.0 : it->second;
                CHECK(fwd.terminal.mass(i) == doctest::Approx(expected).epsilon(1e-13).scale(1.0));
            }
        }
    }
}

TEST_CASE("mass history")
{
    const Grid g = build_grid(kParams, 120, 1.1);
    const BackwardSolution sol = solve_backward(g, builtin_payoff("sin3x"));
    const ForwardResult fwd = propagate(sol, true);
    REQUIRE(fwd.history.has_value());
    const Lattice& p = *fwd.history;
    CHECK(p(0, 0) == 1.0);
    for (int n = 0; n <= g.n_steps; ++n) {
        double total = 0.0;
        for (const double m : p.level(n)) {
            CHECK(m >= 0.0);
            total += m;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
    for (int i = -g.n_steps; i <= g.n_steps; ++i) {
        CHECK(p(g.n_steps, i) == fwd.terminal.mass(i));
    }
    CHECK_FALSE(propagate(sol).history.has_value());
}

TEST_CASE("even payoffs give symmetric laws")
{
    const Grid g = build_grid(kParams, 300, 1.1);
    for (const char* text : {"square", "cos(3*x)", "x^4 - 2*x^2"}) {
        const ForwardResult fwd = propagate(solve_backward(g, make_payoff(text)));
        for (int i = 1; i <= g.n_steps; ++i) {
            CHECK(fwd.terminal.mass(i) == doctest::Approx(fwd.terminal.mass(-i)).epsilon(1e-12).scale(1e-3));
        }
    }
}

TEST_CASE("density table")
{
    const Grid g = build_grid(kParams, 100, 1.1);
    const ForwardResult fwd = propagate(solve_backward(g, builtin_payoff("sin3x")));
    const DensityTable table = density(fwd.terminal);
    CHECK(table.h == g.h);
    REQUIRE(table.rows.size() == 201);
    double integral = 0.0;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& row = table.rows[k];
        CHECK(row.density == row.mass / g.h);
        CHECK(row.x == g.x(static_cast<int>(k) - 100));
        if (k) {
            CHECK(row.x > table.rows[k - 1].x);
        }
        integral += row.density * g.h;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("discrete weak form")
{
    const Grid g = build_grid(kParams, 200, 1.1);
    const BackwardSolution sol = solve_backward(g, builtin_payoff("sin3x"));
    const ForwardResult fwd = propagate(sol, true);

    SUBCASE("zero test function")
    {
        const WeakFormResidual r = weak_form_residual(fwd, sol, [](double, double) { return 0.0; });
        CHECK(r.residual == 0.0);
        CHECK(r.scale == 0.0);
    }
    SUBCASE("constants reduce to mass conservation")
    {
        const WeakFormResidual r = weak_form_residual(fwd, sol, [](double, double) { return 1.0; });
        CHECK(r.residual <= 1e-12 * r.scale);
    }
    SUBCASE("smooth compactly supported bump")
    {
        const WeakFormResidual r = weak_form_residual(fwd, sol, bump);
        CHECK(r.scale > 1e-3);
        CHECK(r.residual <= 1e-10 * r.scale);
    }
    SUBCASE("small lattice")
    {
        const Grid small = build_grid(kParams, 3, 1.1);
        const BackwardSolution s = solve_backward(small, builtin_payoff("cube"));
        const ForwardResult f = propagate(s, true);
        const WeakFormResidual r = weak_form_residual(f, s, [](double t, double x) {
            return std::sin(x + t) + x * x * t;
        });
        CHECK(r.residual <= 1e-12 * r.scale);
    }
}

TEST_CASE("forward errors")
{
    const Grid g = build_grid(kParams, 20, 1.1);
    const BackwardSolution sol = solve_backward(g, builtin_payoff("sin3x"));
    CHECK_THROWS_AS(weak_form_residual(propagate(sol), sol, bump), HistoryMissing);
    const Grid other = build_grid(kParams, 21, 1.1);
    CHECK_THROWS_AS(weak_form_residual(propagate(sol, true), solve_backward(other, builtin_payoff("sin3x")), bump),
                    GridMismatch);
    CHECK_THROWS_AS(propagate(sol).terminal.mass(21), std::out_of_range);
}

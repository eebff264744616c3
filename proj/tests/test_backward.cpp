#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gnormal/backward.hpp"
#include "oracles.hpp"

using namespace gnormal;

namespace {

const GParams kParams{0.04, 1.0, 1.0};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TEST_CASE("closed-form payoffs")
{
    const Grid g = build_grid(kParams, 800, 1.1);

    const BackwardSolution sq = solve_backward(g, builtin_payoff("square"));
    CHECK(std::abs(sq.root - 1.0) <= 1e-12);
    CHECK(expectation(sq) == sq.root);
    for (int n = 0; n < g.n_steps; n += 97) {
        CHECK(control_at(sq, n, 0) == 1.0);
        CHECK(control_at(sq, n, -n) == 1.0);
    }

    const BackwardSolution nsq = solve_backward(g, builtin_payoff("neg_square"));
    CHECK(std::abs(nsq.root + 0.04) <= 1e-12);
    CHECK(control_at(nsq, 400, 17) == 0.04);

    const BackwardSolution c = solve_backward(g, parse_payoff("5"));
    CHECK(c.root == 5.0);
    CHECK(control_at(c, 0, 0) == 0.04);

    const BackwardSolution lin = solve_backward(g, parse_payoff("x"));
    CHECK(std::abs(lin.root) <= 1e-14);
}

TEST_CASE("controls only take the two extreme variances")
{
    const Grid g = build_grid(kParams, 300, 1.1);
    const BackwardSolution sol = solve_backward(g, builtin_payoff("sin3x"));
    int hi = 0;
    int lo = 0;
    for (const double v : sol.controls.data()) {
        if (v == 1.0) {
            ++hi;
        } else if (v == 0.04) {
            ++lo;
        } else {
            FAIL("unexpected control " << v);
        }
    }
    CHECK(hi > 0);
    CHECK(lo > 0);
    CHECK(sol.controls.n_levels() == g.n_steps);
    CHECK(sol.values.n_levels() == g.n_steps + 1);
}

TEST_CASE("root agrees with path enumeration under the computed control")
{
    const std::vector<std::string> payoffs{"sin3x", "cube", "exp(-x^2)", "x^4 - 3*x^2", "cos(5*x)"};
    for (int N = 1; N <= 6; ++N) {
        for (const double ratio : {1.0, 1.1, 1.7}) {
            const Grid g = build_grid(kParams, N, ratio);
            for (const auto& text : payoffs) {
                CAPTURE(text);
                CAPTURE(N);
                const Payoff phi = make_payoff(text);
                const BackwardSolution sol = solve_backward(g, phi);
                auto f = [&](double x) { return phi(x); };
                const double chain = oracle::chain_expectation(
                    g, [&](int n, int i) { return control_at(sol, n, i); }, f);
                CHECK(std::abs(chain - sol.root) <= 1e-12);

                const auto naive = oracle::naive_value_lattice(g, f);
                for (int n = 0; n <= N; ++n) {
                    for (int i = -n; i <= n; ++i) {
                        CHECK(std::abs(naive[n][i + n] - sol.values(n, i)) <= 1e-10);
                    }
                }
            }
        }
    }
}

TEST_CASE("computed control is optimal among all Markov policies")
{
    const Grid g = build_grid(kParams, 4, 1.1);
    for (const char* text : {"sin3x", "cube", "cos(5*x)", "x^4 - 3*x^2"}) {
        CAPTURE(text);
        const Payoff phi = make_payoff(text);
        const BackwardSolution sol = solve_backward(g, phi, 0.0);
        const auto search = oracle::optimise_over_policies(g, [&](double x) { return phi(x); });
        CHECK(std::abs(search.best_value - sol.root) <= 1e-12);
    }
}

TEST_CASE("probability form reproduces the difference form")
{
    for (const int N : {1, 10, 200, 800}) {
        const Grid g = build_grid(kParams, N, 1.1);
        for (const char* text : {"sin3x", "cube", "square", "exp(-x^2)*x"}) {
            CAPTURE(text);
            const Payoff phi = make_payoff(text);
            const BackwardSolution sol = solve_backward(g, phi);
            const double b = solve_backward_probability_form(g, phi);
            // Rounding grows with the largest value carried by the lattice.
            const double scale = std::max({1.0, std::abs(sol.root), sol.terminal_sup});
            CHECK(std::abs(sol.root - b) <= 1e-14 * scale);
        }
    }
}

TEST_CASE("invariances")
{
    const Grid g = build_grid(kParams, 120, 1.25);
    const BackwardSolution base = solve_backward(g, builtin_payoff("sin3x"), 0.0);

    SUBCASE("adding a constant shifts the value")
    {
        const BackwardSolution s = solve_backward(g, parse_payoff("sin(3*x) + 2.5"), 0.0);
        CHECK(s.root == doctest::Approx(base.root + 2.5).epsilon(1e-13));
    }
    SUBCASE("positive scaling commutes")
    {
        const BackwardSolution s = solve_backward(g, parse_payoff("3*sin(3*x)"), 0.0);
        CHECK(s.root == doctest::Approx(3.0 * base.root).epsilon(1e-13));
    }
    SUBCASE("reflection leaves the root unchanged")
    {
        const BackwardSolution s = solve_backward(g, parse_payoff("exp(x) + sin(3*x)"), 0.0);
        const BackwardSolution r = solve_backward(g, parse_payoff("exp(-x) - sin(3*x)"), 0.0);
        CHECK(s.root == doctest::Approx(r.root).epsilon(1e-13));
    }
}

TEST_CASE("one backward step preserves order of random lattice pairs")
{
    const auto& table = kernels::active_kernels();
    std::mt19937_64 rng(21);
    std::normal_distribution<double> value(0.0, 1.0);
    std::exponential_distribution<double> gap(1.0);
    std::uniform_real_distribution<double> ratio_dist(1.0, 3.0);
    std::uniform_int_distribution<int> width(1, 60);
    std::bernoulli_distribution sparse(0.3);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Grid g = build_grid(kParams, 100, trial == 0 ? 1.0 : ratio_dist(rng));
        const auto c = step_coefficients(g, trial % 2 ? 0.0 : kDefaultTolerance);
        const std::size_t m = static_cast<std::size_t>(width(rng));
        std::vector<double> lower(m + 2), upper(m + 2);
        for (std::size_t k = 0; k < m + 2; ++k) {
            lower[k] = value(rng);
            upper[k] = lower[k] + (sparse(rng) ? 0.0 : gap(rng));
        }
        std::vector<double> out_l(m), out_u(m), ctl(m);
        table.backward_step(lower, out_l, ctl, c);
        table.backward_step(upper, out_u, ctl, c);
        for (std::size_t k = 0; k < m; ++k) {
            if (out_l[k] > out_u[k]) {
                ++violations;
            }
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("monotone in the payoff")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> ratio_dist(1.0, 2.0);
    std::uniform_int_distribution<int> steps(1, 40);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Grid g = build_grid(kParams, steps(rng), ratio_dist(rng));
        const std::string base = fmt(unit(rng)) + "*sin(" + fmt(4 * unit(rng)) + "*x) + "
                                 + fmt(unit(rng)) + "*x^2";
        // Adds a nonnegative bump so phi_1 <= phi_2 pointwise.
        const std::string bumped = base + " + " + fmt(std::abs(unit(rng))) + "*exp(-(x - "
                                   + fmt(unit(rng)) + ")^2*" + fmt(1 + 10 * std::abs(unit(rng)))
                                   + ")";
        const double tol = trial % 2 ? 0.0 : kDefaultTolerance;
        const BackwardSolution a = solve_backward(g, parse_payoff(base), tol);
        const BackwardSolution b = solve_backward(g, parse_payoff(bumped), tol);
        for (int n = 0; n <= g.n_steps; ++n) {
            for (int i = -n; i <= n; ++i) {
                if (a.values(n, i) > b.values(n, i) + 1e-14) {
                    ++violations;
                }
            }
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("discrete maximum principle")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ratio_dist(1.0, 3.0);
    for (const char* text : {"sin3x", "cube", "square", "cos(7*x)*exp(-x^2)"}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Grid g = build_grid(kParams, 50 + 37 * trial, ratio_dist(rng));
            const BackwardSolution sol = solve_backward(g, make_payoff(text));
            CHECK(sol.lattice_sup <= sol.terminal_sup * (1 + 1e-12));
            double sup_n = sol.terminal_sup;
            for (int n = g.n_steps - 1; n >= 0; --n) {
                double s = 0.0;
                for (const double v : sol.values.level(n)) {
                    s = std::max(s, std::abs(v));
                }
                CHECK(s <= sup_n * (1 + 1e-12));
                sup_n = s;
            }
        }
    }
}

TEST_CASE("tolerance sends near-flat curvature to the lower variance")
{
    const Grid g = build_grid(kParams, 10, 1.1);
    // delta^2 of 1e-9 x^2 is 2e-9, inside the default band.
    const BackwardSolution flat = solve_backward(g, parse_payoff("1e-9*x^2"));
    for (const double v : flat.controls.data()) {
        CHECK(v == 0.04);
    }
    const BackwardSolution sharp = solve_backward(g, parse_payoff("1e-9*x^2"), 0.0);
    for (const double v : sharp.controls.data()) {
        CHECK(v == 1.0);
    }
}

TEST_CASE("error reporting")
{
    const Grid g = build_grid(kParams, 10, 1.1);
    CHECK_THROWS_AS(solve_backward(g, builtin_payoff("square"), -1.0), InvalidParam);
    CHECK_THROWS_AS(solve_backward(g, parse_payoff("exp(1000*x)")), NonFiniteValue);
    CHECK_THROWS_AS(solve_backward(g, parse_payoff("1/x")), DomainError);

    Grid bad = g;
    bad.h *= 0.5;
    bad.cfl *= 4.0;
    CHECK_THROWS_AS(solve_backward(bad, builtin_payoff("square")), CflViolation);

    const BackwardSolution sol = solve_backward(g, builtin_payoff("square"));
    CHECK_THROWS_AS(control_at(sol, 10, 0), IndexOutOfLattice);
    CHECK_THROWS_AS(control_at(sol, 3, 4), IndexOutOfLattice);
    CHECK_THROWS_AS(control_at(sol, -1, 0), IndexOutOfLattice);
    CHECK_NOTHROW(control_at(sol, 9, -9));
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "gnormal/core.hpp"

using namespace gnormal;

TEST_CASE("build_grid follows the parabolic mesh rule")
{
    const GParams p{0.04, 1.0, 1.0};

    const Grid g100 = build_grid(p, 100, 1.1);
    CHECK(g100.dt == 1.0 / 100);
    CHECK(g100.h == doctest::Approx(0.110000).epsilon(1e-6));
    CHECK(g100.cfl == doctest::Approx(1.0 / 1.21).epsilon(1e-12));
    CHECK(g100.cfl == doctest::Approx(0.8264).epsilon(1e-4));

    const Grid g800 = build_grid(p, 800, 1.1);
    CHECK(std::abs(g800.h - 0.038891) < 5e-7);
    CHECK(g800.dt == 1.0 / 800);
}

TEST_CASE("build_grid rejects CFL violations and bad inputs")
{
    const GParams p{0.04, 1.0, 1.0};
    CHECK_THROWS_AS(build_grid(p, 100, 0.9), CflViolation);
    try {
        build_grid(p, 100, 0.9);
    } catch (const CflViolation& e) {
        CHECK(e.cfl() == doctest::Approx(1.0 / 0.81));
        CHECK(std::string(e.what()) == "CFL violated: 1.235 > 1");
    }

    CHECK_THROWS_AS(build_grid(p, 0, 1.1), InvalidParam);
    CHECK_THROWS_AS(build_grid(p, 10, 0.0), InvalidParam);
    CHECK_THROWS_AS(build_grid(p, 10, -1.0), InvalidParam);
    CHECK_THROWS_AS(build_grid(GParams{0.0, 1.0, 1.0}, 10, 1.1), InvalidParam);
    CHECK_THROWS_AS(build_grid(GParams{2.0, 1.0, 1.0}, 10, 1.1), InvalidParam);
    CHECK_THROWS_AS(build_grid(GParams{0.04, 1.0, 0.0}, 10, 1.1), InvalidParam);
}

TEST_CASE("strict mode enforces the half bound")
{
    const GParams p{0.04, 1.0, 1.0};
    CHECK_THROWS_AS(build_grid(p, 100, 1.1, true), CflViolation);
    CHECK_NOTHROW(build_grid(p, 100, std::sqrt(2.0), true));
    CHECK_NOTHROW(build_grid(p, 100, 1.0, false));
    CHECK(build_grid(p, 100, 1.5, true).cfl_bound() == 0.5);
}

TEST_CASE("cfl equals 1/ratio^2 across random grids")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ratio_dist(1.0, 4.0);
    std::uniform_int_distribution<int> steps(1, 5000);
    std::uniform_real_distribution<double> var(0.01, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double hi = var(rng);
        const GParams p{hi * 0.5, hi, 0.25 + var(rng)};
        const double ratio = ratio_dist(rng);
        const Grid g = build_grid(p, steps(rng), ratio, ratio >= std::sqrt(2.0));
        CHECK(g.cfl == doctest::Approx(1.0 / (ratio * ratio)).epsilon(1e-12));
        CHECK(g.dt == p.horizon / g.n_steps);
        CHECK(g.cfl <= g.cfl_bound() * (1 + 1e-12));
    }
}

TEST_CASE("lattice storage")
{
    SUBCASE("level sizes")
    {
        for (int n_steps : {1, 2, 7, 40}) {
            Lattice lat(n_steps + 1);
            std::size_t total = 0;
            for (int n = 0; n <= n_steps; ++n) {
                CHECK(lat.level_size(n) == static_cast<std::size_t>(2 * n + 1));
                total += lat.level_size(n);
            }
            CHECK(total == static_cast<std::size_t>((n_steps + 1) * (n_steps + 1)));
            CHECK(lat.total_size() == total);
        }
    }

    SUBCASE("indexing")
    {
        Lattice lat(4);
        lat.at(3, -3) = 1.5;
        lat.at(3, 3) = 2.5;
        CHECK(lat.level(3).front() == 1.5);
        CHECK(lat.level(3).back() == 2.5);
        CHECK(lat(3, 3) == 2.5);
        CHECK_THROWS_AS(lat.at(3, 4), IndexOutOfLattice);
        CHECK_THROWS_AS(lat.at(4, 0), IndexOutOfLattice);
        CHECK_THROWS_AS(lat.at(-1, 0), IndexOutOfLattice);
    }

    SUBCASE("inset levels")
    {
        Lattice lat(5, 1);
        CHECK(lat.level_size(0) == 0);
        CHECK(lat.level_size(1) == 1);
        CHECK(lat.level_size(4) == 7);
        CHECK(lat.half_width(0) == -1);
        CHECK_FALSE(lat.contains(0, 0));
        CHECK(lat.contains(4, 3));
        CHECK_FALSE(lat.contains(4, 4));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gen.hpp"
#include "offreach/bihari.hpp"
#include "offreach/error.hpp"

#include <cmath>

using namespace offreach;

namespace {

GrowthSpec scalar(double a, double b, double kappa, GrowthFn w = [](double s, double) { return s; })
{
    GrowthSpec s;
    s.dim = 1;
    s.a = {[a](double) { return a; }};
    s.b = {[b](double, double) { return b; }};
    s.w = {std::move(w)};
    s.kappa = kappa;
    return s;
}

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

template <class F>
void expect_code(ErrorCode code, F&& f)
{
    try {
        f();
        FAIL("expected ", to_string(code));
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

} // namespace

TEST_CASE("linear growth reproduces the Gronwall closed form")
{
    // Oracle: with w(s) = s, G = log and the bound is (kappa + b t) e^{a t}.
    gen::Rng r(11);
    for (int k = 0; k < 25; ++k) {
        const double a = r.uniform(0.0, 2.0), b = r.uniform(0.0, 1.0), kappa = r.uniform(0.0, 1.0);
        const double T = r.uniform(0.1, 3.0);
        const auto bound = eta(scalar(a, b, kappa), uniform_grid(0.0, T, 16), {10000, 4096, 0.0});
        REQUIRE_FALSE(bound.escape_time);
        for (std::size_t j = 1; j < bound.t_grid.size(); ++j) {
            const double t = bound.t_grid[j];
            CHECK(rel(bound.eta[j][0], (kappa + b * t) * std::exp(a * t)) < 1e-6);
        }
    }
}

TEST_CASE("zero rate reduces to the integrated forcing")
{
    const auto bound = eta(scalar(0.0, 0.3, 0.2), uniform_grid(0.0, 2.0, 8));
    for (std::size_t j = 0; j < bound.t_grid.size(); ++j)
        CHECK(bound.eta[j][0] == doctest::Approx(0.2 + 0.3 * bound.t_grid[j]).epsilon(1e-12));
}

TEST_CASE("affine growth w = s + 1")
{
    // G(r) = log(1 + r) up to a constant: eta = (1 + kappa + b t) e^{a t} - 1.
    const double a = 0.7, b = 0.4, kappa = 0.1;
    const auto bound = eta(scalar(a, b, kappa, [](double s, double) { return s + 1.0; }), uniform_grid(0.0, 2.0, 8),
                           {8192, 8192, 0.0});
    for (std::size_t j = 1; j < bound.t_grid.size(); ++j) {
        const double t = bound.t_grid[j];
        CHECK(rel(bound.eta[j][0], (1.0 + kappa + b * t) * std::exp(a * t) - 1.0) < 1e-5);
    }
}

TEST_CASE("quadratic growth escapes in finite time")
{
    // w = s^2, b = 0: eta = kappa / (1 - a kappa t), escaping at 1/(a kappa).
    const double a = 1.0, kappa = 0.5;
    const auto bound = eta(scalar(a, 0.0, kappa, [](double s, double) { return s * s; }), uniform_grid(0.0, 3.0, 300),
                           {30000, 8192, 0.0});
    REQUIRE(bound.escape_time);
    CHECK(*bound.escape_time <= 2.0 + 1e-9);
    CHECK(*bound.escape_time > 1.9);
    for (std::size_t j = 0; j < bound.t_grid.size(); ++j) {
        const double t = bound.t_grid[j];
        if (t < 1.8)
            CHECK(rel(bound.eta[j][0], kappa / (1.0 - a * kappa * t)) < 1e-3);
    }
    expect_code(ErrorCode::BoundEscaped, [&] { bound.at(2.5); });
}

TEST_CASE("bound evaluation outside the horizon")
{
    const auto bound = eta(scalar(1.0, 1.0, 0.0), uniform_grid(0.0, 1.0, 4));
    expect_code(ErrorCode::HorizonExceedsBound, [&] { bound.at(1.5); });
    CHECK(bound.at(0.3) == bound.eta[2]); // first grid time >= t
}

TEST_CASE("no forcing from zero stays at zero")
{
    const auto bound = eta(scalar(2.0, 0.0, 0.0), uniform_grid(0.0, 1.0, 4));
    for (const auto& row : bound.eta)
        CHECK(row[0] == 0.0);
}

TEST_CASE("coupled integrator chain")
{
    // eta_0 = b t (a = 0), eta_1 = c * b t^2 / 2.
    GrowthSpec s;
    s.dim = 2;
    s.a = {[](double) { return 0.0; }, [](double) { return 0.0; }};
    s.b = {[](double, double) { return 0.5; }, [](double, double) { return 0.0; }};
    s.w = {[](double x, double) { return x; }, [](double x, double) { return x; }};
    s.coupling = {{0, 1, 3.0}};
    const auto bound = eta(s, uniform_grid(0.0, 2.0, 4), {4096, 64, 0.0});
    for (std::size_t j = 0; j < bound.t_grid.size(); ++j) {
        const double t = bound.t_grid[j];
        CHECK(bound.eta[j][0] == doctest::Approx(0.5 * t).epsilon(1e-12));
        CHECK(bound.eta[j][1] == doctest::Approx(3.0 * 0.5 * t * t / 2.0).epsilon(1e-6));
    }
}

TEST_CASE("coupling order and cycles")
{
    GrowthSpec s;
    s.dim = 3;
    for (int k = 0; k < 3; ++k) {
        s.a.push_back([](double) { return 0.1; });
        s.b.push_back([](double, double) { return 0.1; });
        s.w.push_back([](double x, double) { return x; });
    }
    s.coupling = {{2, 0, 1.0}, {0, 1, 1.0}};
    CHECK(s.topological_order() == std::vector<std::size_t>{2, 0, 1});
    s.coupling.push_back({1, 2, 1.0});
    expect_code(ErrorCode::CouplingCycle, [&] { s.topological_order(); });
    s.coupling = {{1, 1, 1.0}};
    expect_code(ErrorCode::CouplingCycle, [&] { s.topological_order(); });
}

TEST_CASE("G table construction errors")
{
    expect_code(ErrorCode::DegenerateRange, [] { compute_G([](double s, double) { return s; }, 0.0, 1.0, 1.0); });
    expect_code(ErrorCode::NonPositiveW, [] { compute_G([](double, double) { return -1.0; }, 0.0, 1.0, 2.0); });
    expect_code(ErrorCode::InvalidSpec,
                [] { compute_G([](double s, double) { return 1.0 / s; }, 0.0, 1.0, 2.0); });
    const GInverse inv(compute_G([](double s, double) { return s; }, 0.0, 1.0, 10.0, 64));
    expect_code(ErrorCode::OutOfDomain, [&] { inv(inv.upper() + 1.0); });
    CHECK(inv(0.0) == 1.0);
}

TEST_CASE("property: G inverse round trip")
{
    gen::Rng r(5);
    const GrowthFn w = [](double s, double) { return s + s * s * s + 0.3 * s * s; };
    const GTable tab = compute_G(w, 0.0, 1e-6, 1e3, 8192);
    const GInverse inv(tab);
    for (int k = 0; k < 200; ++k) {
        const double x = r.log_uniform(1e-6, 1e3);
        const double back = inv(evaluate_G(tab, w, 0.0, x));
        CHECK(rel(back, x) < 1e-5);
        // w(s)/s nondecreasing makes G concave in log r, so the interpolated inverse never undershoots.
        CHECK(back >= x * (1.0 - 1e-12));
    }
}

TEST_CASE("property: monotone in time, epsilon and kappa")
{
    gen::Rng r(7);
    for (int k = 0; k < 30; ++k) {
        const double a = r.uniform(0.0, 1.5), c = r.uniform(0.0, 2.0), kappa = r.uniform(0.0, 0.2);
        const double e1 = r.uniform(0.0, 0.5), e2 = e1 + r.uniform(0.0, 0.5);
        auto spec = [&](double eps, double kp) {
            GrowthSpec s = scalar(a, 0.0, kp, [](double x, double) { return x + 0.5 * x * x; });
            s.b = {[c](double, double e) { return c * e; }};
            s.epsilon = eps;
            return s;
        };
        const auto grid = uniform_grid(0.0, 0.5, 20);
        const auto lo = eta(spec(e1, kappa), grid), hi = eta(spec(e2, kappa + 0.01), grid);
        for (std::size_t j = 0; j < lo.eta.size(); ++j) {
            if (j > 0)
                CHECK(lo.eta[j][0] >= lo.eta[j - 1][0]);
            if (j < hi.eta.size())
                CHECK(lo.eta[j][0] <= hi.eta[j][0] * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("negative samples are rejected")
{
    expect_code(ErrorCode::InvalidSpec, [] { eta(scalar(-1.0, 0.0, 0.0), uniform_grid(0.0, 1.0, 2)); });
}

TEST_CASE("integrator chain bound")
{
    const auto grid = uniform_grid(0.0, 2.0, 4);
    std::vector<double> src;
    for (double t : grid)
        src.push_back(3.0 * t);
    const auto tight = integrator_chain_bound(src, grid);
    const auto loose = integrator_chain_bound(src, grid, true);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(tight[k] == doctest::Approx(1.5 * grid[k] * grid[k]));
        CHECK(loose[k] == doctest::Approx(6.0 * grid[k]));
        CHECK(loose[k] >= tight[k]);
    }
}

TEST_CASE("outer epsilon")
{
    CHECK(outer_epsilon(0.1, 0.2) == doctest::Approx(0.4));
    expect_code(ErrorCode::InvalidSpec, [] { outer_epsilon(-0.1, 0.2); });
}

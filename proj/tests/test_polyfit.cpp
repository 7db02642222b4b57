#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wsncluster/polyfit.hpp"

using Catch::Approx;
using wsncluster::harness::fit_polynomial;

TEST_CASE("exact quadratic recovery", "[polyfit]") {
    std::vector<std::pair<double, double>> pts;
    for (double x = 0.0; x <= 6.0; x += 1.0) pts.emplace_back(x, 2.0 + 3.0 * x - x * x);
    const auto fit = fit_polynomial(pts, 2);
    REQUIRE(fit.degree == 2);
    REQUIRE(fit.coefficients.size() == 3);
    REQUIRE(fit.coefficients[0] == Approx(2.0).margin(1e-10));
    REQUIRE(fit.coefficients[1] == Approx(3.0).margin(1e-10));
    REQUIRE(fit.coefficients[2] == Approx(-1.0).margin(1e-10));
    REQUIRE(fit.r_squared == Approx(1.0).margin(1e-12));
    REQUIRE(fit.evaluate(10.0) == Approx(2.0 + 30.0 - 100.0).margin(1e-8));
}

TEST_CASE("overdetermined line with hand-checked solution", "[polyfit]") {
    const std::vector<std::pair<double, double>> pts = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}};
    const auto fit = fit_polynomial(pts, 1);
    REQUIRE(fit.coefficients[0] == Approx(1.0 / 6.0).margin(1e-12));
    REQUIRE(fit.coefficients[1] == Approx(0.5).margin(1e-12));
    REQUIRE(fit.r_squared == Approx(0.75).margin(1e-12));
}

TEST_CASE("large-abscissa quartic stays stable", "[polyfit]") {
    // x up to 500 at degree 4: the normal-equations route would lose this
    std::vector<std::pair<double, double>> pts;
    for (double x = 100.0; x <= 500.0; x += 25.0)
        pts.emplace_back(x, 5.0 + 1e-4 * x * x + 2e-9 * x * x * x * x);
    const auto fit = fit_polynomial(pts, 4);
    for (const auto& [x, y] : pts) REQUIRE(fit.evaluate(x) == Approx(y).epsilon(1e-8));
    REQUIRE(fit.r_squared == Approx(1.0).margin(1e-9));
}

TEST_CASE("degree zero is the mean", "[polyfit]") {
    const std::vector<std::pair<double, double>> pts = {{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
    const auto fit = fit_polynomial(pts, 0);
    REQUIRE(fit.coefficients[0] == Approx(4.0).margin(1e-12));
}

TEST_CASE("constant data fits perfectly", "[polyfit]") {
    const std::vector<std::pair<double, double>> pts = {{1.0, 3.0}, {2.0, 3.0}, {5.0, 3.0}};
    const auto fit = fit_polynomial(pts, 1);
    REQUIRE(fit.coefficients[0] == Approx(3.0).margin(1e-12));
    REQUIRE(fit.coefficients[1] == Approx(0.0).margin(1e-12));
    REQUIRE(fit.r_squared == 1.0);
}

TEST_CASE("error handling", "[polyfit]") {
    const std::vector<std::pair<double, double>> two = {{1.0, 1.0}, {2.0, 2.0}};
    REQUIRE_THROWS_AS(fit_polynomial(two, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_polynomial(two, -1), std::invalid_argument);
    const std::vector<std::pair<double, double>> dup = {{1.0, 1.0}, {1.0, 2.0}};
    REQUIRE_THROWS_AS(fit_polynomial(dup, 1), std::runtime_error);
}

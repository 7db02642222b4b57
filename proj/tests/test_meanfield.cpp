#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracle_helpers.hpp"
#include "wsncluster/meanfield.hpp"

using Catch::Approx;
namespace mf = wsncluster::meanfield;

TEST_CASE("constants: coefficients of the reduced growth law", "[meanfield]") {
    const auto c = mf::constants(0.5);
    REQUIRE(c.degree_coeff == Approx(1.0 / 3.0).margin(1e-12));
    REQUIRE(c.intake_coeff == Approx(1.0).margin(1e-12));
    REQUIRE(c.deletion_coeff == Approx(4.0).margin(1e-12));

    const auto c2 = mf::constants(0.366);
    REQUIRE(c2.degree_coeff == Approx(0.2679355783).margin(1e-9));
    REQUIRE(c2.intake_coeff == Approx(1.7322404372).margin(1e-9));
    REQUIRE(c2.deletion_coeff == Approx(4.3095275034).margin(1e-9));

    const auto c3 = mf::constants(0.2);
    REQUIRE(c3.degree_coeff == Approx(1.0 / 6.0).margin(1e-12));
    REQUIRE(c3.intake_coeff == Approx(4.0).margin(1e-12));
    REQUIRE(c3.deletion_coeff == Approx(6.25).margin(1e-12));

    REQUIRE_THROWS_AS(mf::constants(0.0), std::domain_error);
    REQUIRE_THROWS_AS(mf::constants(1.0), std::domain_error);
    REQUIRE_THROWS_AS(mf::constants(-0.1), std::domain_error);
}

TEST_CASE("uniform_attachment_rate and mean_degree", "[meanfield]") {
    REQUIRE(mf::uniform_attachment_rate(7.0, 3.0, 0.3) == Approx(1.0 / 5.1).margin(1e-12));
    REQUIRE(mf::uniform_attachment_rate(0.0, 3.0, 0.3) == Approx(1.0 / 3.0).margin(1e-12));
    REQUIRE(mf::mean_degree(7.0, 3.0, 0.3) == Approx(15.1 / 5.1).margin(1e-12));
    REQUIRE(mf::mean_degree(0.0, 3.0, 0.3) == Approx(2.0).margin(1e-12));

    // long-run limit (1 + p) / p
    for (double p : {0.1, 0.25, 0.5}) {
        REQUIRE(mf::mean_degree(1e9, 5.0, p) == Approx((1.0 + p) / p).epsilon(1e-6));
    }
    REQUIRE(mf::mean_cluster_edges() == 2.0);

    REQUIRE_THROWS_AS(mf::uniform_attachment_rate(1.0, 0.5, 0.3), std::domain_error);
    REQUIRE_THROWS_AS(mf::mean_degree(-1.0, 3.0, 0.3), std::domain_error);
}

TEST_CASE("reduced_rate evaluates the growth law", "[meanfield]") {
    const auto c = mf::constants(0.5);
    // (k/3 + 1 - 8*z) / t
    REQUIRE(mf::reduced_rate(3.0, 2.0, c, 0.0) == Approx(1.0).margin(1e-12));
    REQUIRE(mf::reduced_rate(3.0, 2.0, c, 0.25) == Approx(0.0).margin(1e-12));
    REQUIRE(mf::reduced_rate(6.0, 10.0, c, 0.1) == Approx((2.0 + 1.0 - 0.8) / 10.0).margin(1e-12));
    REQUIRE_THROWS_AS(mf::reduced_rate(3.0, 0.0, c, 0.0), std::domain_error);
}

TEST_CASE("degree_trajectory solves the reduced growth law", "[meanfield]") {
    const auto c5 = mf::constants(0.5);

    SECTION("frozen value: eightfold age ratio at p = 0.5, z = 0 gives degree 5") {
        REQUIRE(mf::degree_trajectory(8.0, 1.0, c5, 0.0) == Approx(5.0).margin(1e-12));
    }

    SECTION("initial condition and monotone growth") {
        for (double p : {0.1, 0.3, 0.5}) {
            const auto c = mf::constants(p);
            for (double z : {0.0, 0.05}) {
                REQUIRE(mf::degree_trajectory(3.0, 3.0, c, z) == Approx(1.0).margin(1e-12));
                double prev = 1.0;
                for (double t : {4.0, 8.0, 40.0, 400.0}) {
                    const double k = mf::degree_trajectory(t, 3.0, c, z);
                    REQUIRE(k > prev);
                    prev = k;
                }
            }
        }
    }

    SECTION("agrees with an independent numerical integration") {
        for (double p : {0.2, 0.4}) {
            const auto c = mf::constants(p);
            for (double z : {0.0, 0.1}) {
                auto deriv = [&](double k, double t) { return mf::reduced_rate(k, t, c, z); };
                for (double ratio : {5.0, 50.0, 500.0}) {
                    const double numeric = oracle::rk4_geometric(deriv, 2.0, 1.0, 2.0 * ratio, 4000);
                    const double closed = mf::degree_trajectory(2.0 * ratio, 2.0, c, z);
                    REQUIRE(numeric == Approx(closed).epsilon(1e-9));
                }
            }
        }
    }

    SECTION("rejects a non-growing regime") {
        // a + b - 2*z*c < 0: every head loses links faster than it gains them
        REQUIRE_THROWS_AS(mf::degree_trajectory(4.0, 2.0, c5, 1.0), std::domain_error);
        REQUIRE_THROWS_AS(mf::degree_trajectory(1.0, 2.0, c5, 0.0), std::domain_error);
        REQUIRE_THROWS_AS(mf::degree_trajectory(4.0, 0.0, c5, 0.0), std::domain_error);
    }
}

TEST_CASE("degree_distribution shape and tail", "[meanfield]") {
    SECTION("frozen value: P(1) = 0.75 at p = 0.5, z = 0") {
        REQUIRE(mf::degree_distribution({1.0, 0.5, 0.0}) == Approx(0.75).margin(1e-12));
    }

    SECTION("positive and strictly decreasing in k") {
        for (double p : {0.1, 0.3, 0.5}) {
            for (double z : {-0.5, 0.0, 0.05}) {
                double prev = mf::degree_distribution({1.0, p, z});
                REQUIRE(prev > 0.0);
                for (double k = 2.0; k <= 512.0; k *= 2.0) {
                    const double cur = mf::degree_distribution({k, p, z});
                    REQUIRE(cur > 0.0);
                    REQUIRE(cur < prev);
                    prev = cur;
                }
            }
        }
    }

    SECTION("tail exponent -(1+2p)/p") {
        for (double p : {0.1, 0.2, 0.3, 0.4, 0.5}) {
            const auto c = mf::constants(p);
            const double expected = -(1.0 + 2.0 * p) / p;
            for (double z : {0.0, 0.02}) {
                // exact in the shifted coordinate ln(k*a + b - 2*z*c)
                auto shifted = [&](double k) {
                    return k * c.degree_coeff + c.intake_coeff - 2.0 * z * c.deletion_coeff;
                };
                const double s_exact =
                    (std::log(mf::degree_distribution({50.0, p, z})) -
                     std::log(mf::degree_distribution({10.0, p, z}))) /
                    (std::log(shifted(50.0)) - std::log(shifted(10.0)));
                REQUIRE(s_exact == Approx(expected).margin(1e-9));

                // plain log-log slope converges to the same exponent far out
                const double k_far = 1e7;
                const double s_far = (std::log(mf::degree_distribution({2.0 * k_far, p, z})) -
                                      std::log(mf::degree_distribution({k_far, p, z}))) /
                                     std::log(2.0);
                REQUIRE(s_far == Approx(expected).margin(1e-3));
            }
        }
    }

    SECTION("rejects parameters outside the growing regime") {
        REQUIRE_THROWS_AS(mf::DegreeDistributionQuery(1.0, 0.45, 0.2), std::domain_error);
        REQUIRE_THROWS_AS(mf::DegreeDistributionQuery(0.5, 0.3, 0.0), std::domain_error);
        REQUIRE_THROWS_AS(mf::DegreeDistributionQuery(1.0, 1.0, 0.0), std::domain_error);
    }
}

TEST_CASE("z_critical: deletion rate maximizing the chance of degree k", "[meanfield]") {
    SECTION("frozen values at p = 0.5") {
        REQUIRE(mf::z_critical(4.0, 0.5) == Approx(-5.0 / 24.0).margin(1e-12));
        REQUIRE(mf::z_critical(6.0, 0.5) == Approx(-11.0 / 24.0).margin(1e-12));
        REQUIRE(mf::z_critical(8.0, 0.5) == Approx(-17.0 / 24.0).margin(1e-12));
        REQUIRE(mf::z_critical(10.0, 0.5) == Approx(-23.0 / 24.0).margin(1e-12));
        REQUIRE(mf::z_critical(13.0, 0.5) == Approx(-4.0 / 3.0).margin(1e-12));
    }

    SECTION("matches a scan of the distribution over z") {
        for (double p : {0.2, 0.5}) {
            const auto c = mf::constants(p);
            const double z_top =
                (c.degree_coeff + c.intake_coeff) / (2.0 * c.deletion_coeff) - 1e-9;
            for (double k : {3.0, 6.0}) {
                auto prob = [&](double z) { return mf::degree_distribution({k, p, z}); };
                const double found = oracle::argmax_scan_bisect(prob, z_top - 30.0, z_top);
                REQUIRE(found == Approx(mf::z_critical(k, p)).margin(1e-6));
            }
        }
    }

    REQUIRE_THROWS_AS(mf::z_critical(0.5, 0.3), std::domain_error);
    REQUIRE_THROWS_AS(mf::z_critical(4.0, 0.0), std::domain_error);
}

TEST_CASE("p_of_k inverts the long-run mean degree", "[meanfield]") {
    SECTION("frozen values") {
        const auto r2 = mf::p_of_k(2.0);
        REQUIRE(r2.value == Approx(0.6180339887).margin(1e-9));
        REQUIRE_FALSE(r2.in_model_range);

        const auto r3 = mf::p_of_k(3.0);
        REQUIRE(r3.value == Approx(0.3660254038).margin(1e-9));
        REQUIRE(r3.in_model_range);

        const auto r13 = mf::p_of_k(13.0);
        REQUIRE(r13.value == Approx(0.0773502692).margin(1e-9));
        REQUIRE(r13.in_model_range);
    }

    SECTION("round trip through 1 + a + b") {
        for (int i = 1; i <= 100; ++i) {
            const double p = i / 202.0;
            const auto c = mf::constants(p);
            const double k = 1.0 + c.degree_coeff + c.intake_coeff;
            REQUIRE(mf::p_of_k(k).value == Approx(p).margin(1e-12));
        }
    }

    SECTION("decreasing in k and vanishing for dense topologies") {
        double prev = mf::p_of_k(2.0).value;
        for (double k : {3.0, 5.0, 9.0, 17.0, 65.0}) {
            const double cur = mf::p_of_k(k).value;
            REQUIRE(cur < prev);
            prev = cur;
        }
        REQUIRE(mf::p_of_k(1e8).value == Approx(0.0).margin(1e-3));
    }

    REQUIRE_THROWS_AS(mf::p_of_k(1.0), std::domain_error);
}

TEST_CASE("predict_cluster_count reproduces the bundled deployment rows", "[meanfield]") {
    struct Row {
        int n;
        double k;
        int expected;
    };
    const std::vector<Row> rows = {
        {100, 3, 37},  {200, 3, 74},  {300, 4, 80},  {400, 4, 106}, {500, 4, 132},
        {100, 4, 27},  {200, 6, 35},  {300, 10, 31}, {400, 10, 41}, {500, 13, 39},
        {100, 4, 27},  {200, 6, 35},  {300, 8, 39},  {400, 10, 41}, {500, 12, 42},
    };
    for (const auto& row : rows) {
        CAPTURE(row.n, row.k);
        REQUIRE(mf::predict_cluster_count(row.n, row.k) == row.expected);
    }
    // whole expected counts stay whole
    REQUIRE(mf::predict_cluster_count(100, 7.0 / 3.0) == 50);
    REQUIRE_THROWS_AS(mf::predict_cluster_count(0, 3.0), std::domain_error);
    REQUIRE_THROWS_AS(mf::predict_cluster_count(100, 1.0), std::domain_error);
}

TEST_CASE("full_rate: attachment minus deletion drain", "[meanfield]") {
    SECTION("frozen spot value") {
        const mf::MeanFieldParams mp(0.4, 0.1, 3.0, 3.0);
        const double k_share = mf::degree_share(2.0, 10.0, 3.0, 0.4);
        const double c_share = mf::cluster_edge_share(2.0, 10.0, 3.0, 0.4);
        REQUIRE(k_share == Approx(0.1).margin(1e-12));
        REQUIRE(c_share == Approx(1.0 / 7.0).margin(1e-12));
        const double rate = mf::full_rate(2.0, 2.0, 10.0, 10.0, mp, k_share, c_share);
        REQUIRE(rate == Approx(8.0 / 375.0).margin(1e-12));
    }

    SECTION("saturated heads only lose links") {
        const mf::MeanFieldParams mp(0.3, 0.2, 3.0, 5.0);
        const double k_share = mf::degree_share(10.0, 50.0, 3.0, 0.3);
        const double c_share = mf::cluster_edge_share(2.0, 50.0, 3.0, 0.3);
        REQUIRE(mf::full_rate(10.0, 2.0, 10.0, 50.0, mp, k_share, c_share) < 0.0);
        const mf::MeanFieldParams no_del(0.3, 0.0, 3.0, 5.0);
        REQUIRE(mf::full_rate(10.0, 2.0, 10.0, 50.0, no_del, k_share, c_share) ==
                Approx(0.0).margin(1e-15));
    }

    SECTION("reduces to the closed-form growth law at late times") {
        // with mean-field shares, c_i = 2 and no saturation, the full rate
        // approaches (local_world / (p t)) * reduced_rate
        for (double p : {0.25, 0.4}) {
            for (double z : {0.0, 0.05}) {
                const mf::MeanFieldParams mp(p, z, 3.0, 7.0);
                const auto c = mf::constants(p);
                const double t = 1e9;
                const double k = 12.0;
                const double full =
                    mf::full_rate(k, 2.0, 1e15, t, mp, mf::degree_share(k, t, 3.0, p),
                                  mf::cluster_edge_share(2.0, t, 3.0, p));
                const double reduced = (7.0 / (p * t)) * mf::reduced_rate(k, t, c, z);
                REQUIRE(full == Approx(reduced).epsilon(1e-6));
            }
        }
    }

    SECTION("domain checks") {
        const mf::MeanFieldParams mp(0.4, 0.1, 3.0, 3.0);
        REQUIRE_THROWS_AS(mf::full_rate(11.0, 2.0, 10.0, 10.0, mp, 0.1, 0.1), std::domain_error);
        REQUIRE_THROWS_AS(mf::full_rate(2.0, 2.0, 10.0, 0.0, mp, 0.1, 0.1), std::domain_error);
        REQUIRE_THROWS_AS(mf::MeanFieldParams(0.4, -0.1, 3.0, 3.0), std::domain_error);
        REQUIRE_THROWS_AS(mf::MeanFieldParams(0.4, 0.1, 0.0, 3.0), std::domain_error);
    }
}

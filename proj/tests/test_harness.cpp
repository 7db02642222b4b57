#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "wsncluster/harness.hpp"

using Catch::Approx;
using namespace wsncluster;
using namespace wsncluster::harness;

namespace {

geoproto::GeoNetwork make_star(int leaves) {
    std::vector<geoproto::GeoNode> nodes;
    nodes.push_back({0, 200.0, 200.0, 0.9});
    for (int i = 1; i <= leaves; ++i) {
        const double angle = 6.283185307179586 * i / leaves;
        nodes.push_back(
            {i, 200.0 + 95.0 * std::cos(angle), 200.0 + 95.0 * std::sin(angle), 0.8});
    }
    return geoproto::GeoNetwork(std::move(nodes), 400.0, 400.0, 100.0);
}

}  // namespace

TEST_CASE("closed-form table reproduction matches the bundled reference rows") {
    const auto report = reproduce_theory_tables();
    REQUIRE(report.rows.size() == 15);
    REQUIRE(report.z_rows.size() == 5);

    REQUIRE(report.exact_rows == 12);
    REQUIRE(report.max_abs_deviation == 1);
    for (const auto& row : report.rows) {
        INFO(row.protocol << " N=" << row.n_nodes);
        REQUIRE(std::abs(row.deviation) <= 1);
        REQUIRE(row.predicted == meanfield::predict_cluster_count(row.n_nodes, row.k));
    }

    // Ceiling rounding reproduces 12 of 15 reference rows exactly; the
    // three N=200..400 tree rows land one high (79.13 -> 80 vs 79, etc.).
    const auto& mid = report.rows[2];  // simple-tree, N=300
    REQUIRE(mid.n_nodes == 300);
    REQUIRE(mid.k == 4);
    REQUIRE(mid.predicted == 80);
    REQUIRE(mid.deviation == 1);
    REQUIRE(report.rows[0].deviation == 0);  // (100, 3) -> 37
    REQUIRE(report.rows[4].deviation == 0);  // (500, 4) -> 132

    // Every reference deletion-rate row disagrees with the closed form and
    // must carry the flag.
    for (const auto& zr : report.z_rows) REQUIRE_FALSE(zr.matches);
    REQUIRE(report.z_rows[0].z_model == Approx(-5.0 / 24.0).epsilon(1e-12));
    REQUIRE(report.z_rows[4].z_model == Approx(-4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("table report text prints both deletion-rate columns with flags") {
    const auto text = format_theory_tables(reproduce_theory_tables());
    REQUIRE(text.find("protocol,N,k,predicted,reference,observed,deviation") != std::string::npos);
    REQUIRE(text.find("N,k,p,z_model,z_reference,flag") != std::string::npos);
    REQUIRE(text.find("-0.2083") != std::string::npos);  // closed form at k=4, p=0.5
    REQUIRE(text.find(",-7,") != std::string::npos);     // reference column kept verbatim
    REQUIRE(text.find("deviates") != std::string::npos);
    REQUIRE(text.find("15 rows, 12 exact, max |deviation| 1") != std::string::npos);
    REQUIRE(text == format_theory_tables(reproduce_theory_tables()));
}

TEST_CASE("trial summaries aggregate usable deployments only") {
    std::vector<TrialOutcome> outcomes = {
        {10, 3.4, true}, {0, 0.0, false}, {12, 4.6, true}, {14, 4.0, true}};
    const auto row =
        summarize_trials(200, outcomes, geoproto::Protocol::CdsRuleK, 4, 77);
    REQUIRE(row.n_nodes == 200);
    REQUIRE(row.protocol == "cds-rule-k");
    REQUIRE(row.trials == 4);
    REQUIRE(row.seed0 == 77);
    REQUIRE(row.heads_mean == Approx(12.0));
    REQUIRE(row.heads_std == Approx(2.0));
    REQUIRE(row.k_mean == Approx(4.0));
    REQUIRE(row.heads_theory == meanfield::predict_cluster_count(200, 4.0));

    SECTION("the measured neighbor count is rounded before inversion") {
        std::vector<TrialOutcome> frac = {{10, 3.0, true}, {12, 4.8, true}};
        const auto r = summarize_trials(100, frac, geoproto::Protocol::A3, 2, 1);
        REQUIRE(r.k_mean == Approx(3.9));
        REQUIRE(r.heads_theory == meanfield::predict_cluster_count(100, 4.0));
    }

    SECTION("a rounded neighbor count below 2 yields no closed-form column") {
        std::vector<TrialOutcome> low = {{3, 1.2, true}};
        const auto r = summarize_trials(50, low, geoproto::Protocol::SimpleTree, 1, 1);
        REQUIRE(r.heads_theory == -1);
        REQUIRE(r.heads_std == 0.0);
    }

    SECTION("no usable deployment is an error") {
        std::vector<TrialOutcome> none = {{0, 0.0, false}};
        REQUIRE_THROWS_AS(summarize_trials(50, none, geoproto::Protocol::A3, 1, 1),
                          std::runtime_error);
    }
}

TEST_CASE("a pinned star deployment gives one head with neighbor count N-1") {
    const auto net = make_star(5);
    const auto outcome = run_protocol_trial(net, geoproto::Protocol::SimpleTree, 9);
    REQUIRE(outcome.usable);
    REQUIRE(outcome.heads == 1);
    REQUIRE(outcome.avg_k == Approx(5.0));  // N = 6 including the hub

    const auto row = summarize_trials(net.size(), {outcome}, geoproto::Protocol::SimpleTree, 1, 9);
    REQUIRE(row.heads_mean == Approx(1.0));
    REQUIRE(row.k_mean == Approx(5.0));
}

TEST_CASE("experiment tables are deterministic and round-trip through text") {
    ProtocolTableConfig config;
    config.node_counts = {40, 80};
    config.width = 300.0;
    config.height = 300.0;
    config.radius = 90.0;
    config.trials = 6;
    config.seed0 = 11;

    const auto result = run_protocol_table(geoproto::Protocol::A3, config);
    REQUIRE(result.unusable_trials.size() == 2);
    REQUIRE_FALSE(result.rows.empty());
    for (const auto& row : result.rows) {
        REQUIRE(row.trials == 6);
        REQUIRE(row.seed0 == 11);
        REQUIRE(row.heads_mean >= 1.0);
        REQUIRE(row.heads_std >= 0.0);
    }

    const auto again = run_protocol_table(geoproto::Protocol::A3, config);
    REQUIRE(to_csv(result.rows) == to_csv(again.rows));

    const auto csv = to_csv(result.rows);
    REQUIRE(csv.rfind("N,k,n_T,n_E_mean,n_E_std,protocol,trials,seed0\n", 0) == 0);
    const auto parsed = parse_csv(csv);
    REQUIRE(parsed.size() == result.rows.size());
    REQUIRE(to_csv(parsed) == csv);
}

TEST_CASE("a geometry too sparse to connect yields no usable rows") {
    ProtocolTableConfig config;
    config.node_counts = {20};
    config.width = 1000.0;
    config.height = 1000.0;
    config.radius = 1.0;
    config.trials = 3;
    const auto result = run_protocol_table(geoproto::Protocol::SimpleTree, config);
    REQUIRE(result.rows.empty());
    REQUIRE(result.unusable_trials == std::vector<int>{3});
    REQUIRE(result.unusable_node_counts == std::vector<int>{20});
}

TEST_CASE("experiment table text rejects malformed input") {
    REQUIRE_THROWS_AS(parse_csv("N,k,n_T\n"), std::invalid_argument);
    const std::string header = "N,k,n_T,n_E_mean,n_E_std,protocol,trials,seed0\n";
    REQUIRE_THROWS_AS(parse_csv(header + "100,abc,37,40,2,simple-tree,20,1\n"),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(parse_csv(header + "100,3,37,40,2,mystery-protocol,20,1\n"),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(parse_csv(header + "100,3,37,40,2,simple-tree,20,1,extra\n"),
                      std::invalid_argument);
    REQUIRE(parse_csv(header).empty());
}

TEST_CASE("reference head-count curves admit an exact fourth-degree interpolation") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : reference_rows())
        if (std::string(row.protocol) == "simple-tree")
            pts.emplace_back(row.n_nodes, row.heads_reference);
    REQUIRE(pts.size() == 5);
    const auto fit = fit_polynomial(pts, 4);
    REQUIRE(fit.r_squared == Approx(1.0).margin(1e-9));
    REQUIRE(fit.evaluate(300.0) == Approx(79.0).margin(1e-6));

    // At fixed neighbor count the predicted curve is near-linear in N, so a
    // fourth-degree fit over a dense grid is essentially exact.
    std::vector<std::pair<double, double>> curve;
    for (int n = 50; n <= 1000; n += 50)
        curve.emplace_back(n, meanfield::predict_cluster_count(n, 4.0));
    const auto curve_fit = fit_polynomial(curve, 4);
    REQUIRE(curve_fit.r_squared >= 0.999);
}

TEST_CASE("degree-tail fitting recovers an exact power law") {
    evolve::Snapshot snap;
    snap.head_degree_hist = {{1, 100},  {2, 100}, {3, 100}, {4, 10000},
                             {5, 4096}, {8, 625}, {10, 256}};
    for (const auto& [degree, count] : snap.head_degree_hist) snap.heads += count;

    const auto fit = fit_degree_tail(snap);
    REQUIRE(fit.has_value());
    // Counts follow (40/k)^4 exactly, so the log-log slope is exactly -4.
    REQUIRE(fit->slope == Approx(-4.0).margin(1e-9));
    REQUIRE(fit->r_squared == Approx(1.0).margin(1e-12));
    REQUIRE(fit->k_min == 4);
    REQUIRE(fit->k_max == 8);  // 95th percentile cuts the k=10 bin
    REQUIRE(fit->points == 3);

    SECTION("an empty histogram has no fit") {
        evolve::Snapshot empty;
        REQUIRE_FALSE(fit_degree_tail(empty).has_value());
    }

    SECTION("fewer than three qualifying degrees has no fit") {
        evolve::Snapshot thin;
        thin.heads = 30;
        thin.head_degree_hist = {{1, 10}, {4, 10}, {5, 10}};
        REQUIRE_FALSE(fit_degree_tail(thin).has_value());
    }
}

TEST_CASE("pooled histograms merge counts degree-wise") {
    evolve::RunResult a;
    a.snapshots.emplace_back();
    a.snapshots.back().heads = 6;
    a.snapshots.back().t = 10;
    a.snapshots.back().head_degree_hist = {{1, 2}, {3, 4}};
    evolve::RunResult b;
    b.snapshots.emplace_back();
    b.snapshots.back().heads = 3;
    b.snapshots.back().t = 20;
    b.snapshots.back().head_degree_hist = {{3, 1}, {5, 2}};

    const auto pooled = pool_final_histograms({a, b});
    REQUIRE(pooled.heads == 9);
    REQUIRE(pooled.t == 20);
    REQUIRE(pooled.head_degree_hist ==
            std::vector<std::pair<int, long long>>{{1, 2}, {3, 5}, {5, 2}});
    REQUIRE(pooled.mean_head_degree == Approx(3.0));
}

TEST_CASE("growth reports carry totals, regime, overlays, and round-trip") {
    evolve::EvolutionParams params;
    params.m0 = 5;
    params.local_world = 20;
    params.p = 0.5;
    params.z = 0.0;
    params.seed = 41;
    const auto ex = evolve_experiment(params, 10000, 2500);

    REQUIRE(ex.run.deletions == 0);
    REQUIRE(ex.deletion_ratio == 0.0);
    REQUIRE(ex.tail.has_value());
    REQUIRE(std::isfinite(ex.tail->slope));
    REQUIRE(ex.regime == "peak-at-negative-z");  // z* < 0 whenever mean degree > 1 + A + B

    const auto text = evolve_report(ex);
    REQUIRE(text.find("\"kind\": \"growth-report\"") != std::string::npos);
    REQUIRE(text.find("\"tail_exponent\": -4.0") != std::string::npos);
    REQUIRE(text.find("\"deletions\": 0") != std::string::npos);

    const auto doc = parse_evolve_report(text);
    REQUIRE(doc["params"]["seed"] == 41);
    REQUIRE(doc["snapshots"].size() == ex.run.snapshots.size());
    REQUIRE(doc["analytic"]["mean_degree_limit"] == Approx(3.0));
    REQUIRE(reemit_evolve_report(text) == text);

    // Re-running the experiment reproduces the report byte-for-byte.
    REQUIRE(evolve_report(evolve_experiment(params, 10000, 2500)) == text);

    SECTION("tampered documents are rejected") {
        auto broken = text;
        const auto pos = broken.find("growth-report");
        broken.replace(pos, 13, "something-else");
        REQUIRE_THROWS_AS(parse_evolve_report(broken), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_evolve_report("{}"), std::invalid_argument);
    }
}

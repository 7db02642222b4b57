// Command-line front end: closed-form tables, protocol experiments, growth
// runs, polynomial fitting, and analytic curve evaluation.
//
// Exit codes: 0 success (all invariant checks passed), 1 bad input or I/O,
// 2 an invariant check failed during the run.
#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "wsncluster/harness.hpp"

namespace {

using namespace wsncluster;

void append_num(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("failed writing output file: " + out_path);
}

std::pair<double, double> parse_area(const std::string& text) {
    const auto parse_part = [](std::string_view part) {
        double v = 0.0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || !(v > 0.0))
            throw std::invalid_argument("--area expects WIDTHxHEIGHT or a positive side length");
        return v;
    };
    const auto cross = text.find('x');
    if (cross == std::string::npos) {
        const double side = parse_part(text);
        return {side, side};
    }
    return {parse_part(std::string_view(text).substr(0, cross)),
            parse_part(std::string_view(text).substr(cross + 1))};
}

int run_tables(const std::string& out_path) {
    const auto report = harness::reproduce_theory_tables();
    write_output(out_path, harness::format_theory_tables(report));
    // The deletion-rate column is expected to deviate (documented
    // inconsistency); the head-count reproduction itself must hold.
    if (report.rows.size() != 15 || report.max_abs_deviation > 1 || report.exact_rows < 11) {
        std::cerr << "tables: head-count reproduction drifted from the bundled references\n";
        return 2;
    }
    return 0;
}

int run_protocol(const std::string& tag, const std::vector<int>& node_counts, int trials,
                 const std::string& area, double radius, std::uint64_t seed0, int coverage_limit,
                 const std::string& out_path) {
    harness::ProtocolTableConfig config;
    config.node_counts = node_counts;
    std::tie(config.width, config.height) = parse_area(area);
    config.radius = radius;
    config.trials = trials;
    config.seed0 = seed0;
    config.coverage_limit = coverage_limit;

    const auto protocol = geoproto::protocol_from_tag(tag);
    const auto result = harness::run_protocol_table(protocol, config);
    for (std::size_t i = 0; i < config.node_counts.size(); ++i)
        if (result.unusable_trials[i] > 0)
            std::cerr << "protocol: N=" << config.node_counts[i] << ": "
                      << result.unusable_trials[i] << "/" << trials
                      << " deployments disconnected, skipped\n";

    const auto csv = harness::to_csv(result.rows);
    if (harness::to_csv(harness::parse_csv(csv)) != csv) {
        std::cerr << "protocol: emitted table failed its round-trip check\n";
        return 2;
    }
    write_output(out_path, csv);
    if (!result.unusable_node_counts.empty()) {
        std::cerr << "protocol: no usable deployment at " << result.unusable_node_counts.size()
                  << " node count(s)\n";
        return 2;
    }
    return 0;
}

int run_evolve(const evolve::EvolutionParams& params, long long steps, long long snapshot_every,
               const std::string& out_path) {
    params.validate();
    // evolve_experiment deep-validates the final structure and throws
    // std::logic_error on violation (mapped to exit code 2 in main).
    const auto ex = harness::evolve_experiment(params, steps, snapshot_every);
    const auto text = harness::evolve_report(ex);
    if (harness::reemit_evolve_report(text) != text) {
        std::cerr << "evolve: emitted report failed its round-trip check\n";
        return 2;
    }
    write_output(out_path, text);
    return 0;
}

int run_fit(int degree, const std::string& input, const std::string& out_path) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (input != "-") {
        file.open(input);
        if (!file) throw std::runtime_error("cannot open input file: " + input);
        in = &file;
    }
    std::vector<std::pair<double, double>> pts;
    double x = 0.0;
    double y = 0.0;
    while (*in >> x >> y) pts.emplace_back(x, y);
    if (!in->eof()) throw std::invalid_argument("fit: input must hold two numbers per line");

    const auto fit = harness::fit_polynomial(pts, degree);
    nlohmann::ordered_json doc;
    doc["degree"] = fit.degree;
    doc["coefficients"] = fit.coefficients;
    doc["r_squared"] = fit.r_squared;
    write_output(out_path, doc.dump(2) + "\n");
    return 0;
}

int run_analytic(double p, double z, int k_min, int k_max, const std::string& out_path) {
    if (k_min < 1 || k_max < k_min)
        throw std::invalid_argument("analytic: need 1 <= k-min <= k-max");
    const auto mc = meanfield::constants(p);
    const double growth = mc.degree_coeff + mc.intake_coeff - 2.0 * z * mc.deletion_coeff;
    std::string text = "k,degree_distribution,z_critical,p_of_k,p_in_model_range\n";
    for (int k = k_min; k <= k_max; ++k) {
        text += std::to_string(k);
        text += ',';
        if (growth > 0.0)
            append_num(text, meanfield::degree_distribution({static_cast<double>(k), p, z}));
        else
            text += "nan";
        text += ',';
        append_num(text, meanfield::z_critical(k, p));
        text += ',';
        if (k > 1) {
            const auto pk = meanfield::p_of_k(k);
            append_num(text, pk.value);
            text += pk.in_model_range ? ",1" : ",0";
        } else {
            text += "nan,0";
        }
        text += '\n';
    }
    write_output(out_path, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"local-world growth model and sensor-network clustering toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --out appear after the subcommand name

    std::string out_path;
    app.add_option("--out", out_path, "write the report to this path instead of stdout")
        ->capture_default_str();

    auto* tables_cmd = app.add_subcommand(
        "tables", "reproduce the bundled reference head-count tables from the closed forms");

    auto* protocol_cmd =
        app.add_subcommand("protocol", "run a clustering protocol over random deployments");
    std::string tag = "simple-tree";
    std::vector<int> node_counts = {100, 200, 300, 400, 500};
    int trials = 20;
    std::string area = "600x600";
    double radius = 100.0;
    std::uint64_t seed0 = 1;
    int coverage_limit = 0;
    protocol_cmd->add_option("--protocol", tag, "simple-tree, a3, or cds-rule-k")
        ->capture_default_str();
    protocol_cmd->add_option("--nodes", node_counts, "node counts (comma separated or repeated)")
        ->delimiter(',')
        ->capture_default_str();
    protocol_cmd->add_option("--trials", trials, "deployments per node count")
        ->capture_default_str();
    protocol_cmd->add_option("--area", area, "deployment area, WIDTHxHEIGHT or one side length")
        ->capture_default_str();
    protocol_cmd->add_option("--radius", radius, "communication radius")->capture_default_str();
    protocol_cmd->add_option("--seed", seed0, "seed of the first trial (consecutive afterwards)")
        ->capture_default_str();
    protocol_cmd
        ->add_option("--coverage-limit", coverage_limit,
                     "cds-rule-k neighbor-coverage bound (0 = unbounded)")
        ->capture_default_str();

    auto* evolve_cmd = app.add_subcommand("evolve", "run the stochastic growth model");
    evolve::EvolutionParams params;
    long long steps = 10000;
    long long snapshot_every = 1000;
    evolve_cmd->add_option("--m0", params.m0, "initial cluster-node count")->capture_default_str();
    evolve_cmd
        ->add_option("--local-world", params.local_world,
                     "cluster nodes sampled per attachment decision")
        ->capture_default_str();
    evolve_cmd->add_option("--p", params.p, "probability a newcomer is a cluster node")
        ->capture_default_str();
    evolve_cmd->add_option("--z", params.z, "expected edge deletions per step")
        ->capture_default_str();
    evolve_cmd->add_option("--kmax", params.degree_cap, "degree cap at full battery")
        ->capture_default_str();
    evolve_cmd->add_option("--steps", steps, "growth steps")->capture_default_str();
    evolve_cmd
        ->add_option("--snapshot-every", snapshot_every, "snapshot cadence (0 = ends only)")
        ->capture_default_str();
    evolve_cmd->add_option("--seed", params.seed, "random seed")->capture_default_str();

    auto* fit_cmd = app.add_subcommand("fit", "least-squares polynomial fit of x-y points");
    int degree = 4;
    std::string input = "-";
    fit_cmd->add_option("--degree", degree, "polynomial degree")->capture_default_str();
    fit_cmd->add_option("--input", input, "points file, two numbers per line (- = stdin)")
        ->capture_default_str();

    auto* analytic_cmd =
        app.add_subcommand("analytic", "evaluate the closed forms on a degree grid");
    double p = 0.5;
    double z = 0.0;
    int k_min = 1;
    int k_max = 50;
    analytic_cmd->add_option("--p", p, "cluster-node arrival probability")->capture_default_str();
    analytic_cmd->add_option("--z", z, "deletion rate")->capture_default_str();
    analytic_cmd->add_option("--k-min", k_min, "first degree")->capture_default_str();
    analytic_cmd->add_option("--k-max", k_max, "last degree")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (tables_cmd->parsed()) return run_tables(out_path);
        if (protocol_cmd->parsed())
            return run_protocol(tag, node_counts, trials, area, radius, seed0, coverage_limit,
                                out_path);
        if (evolve_cmd->parsed()) return run_evolve(params, steps, snapshot_every, out_path);
        if (fit_cmd->parsed()) return run_fit(degree, input, out_path);
        if (analytic_cmd->parsed()) return run_analytic(p, z, k_min, k_max, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

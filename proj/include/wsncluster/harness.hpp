#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evolve.hpp"
#include "geo.hpp"
#include "meanfield.hpp"
#include "polyfit.hpp"
#include "protocols.hpp"

// Experiment drivers: reproduce the bundled reference tables from the
// closed forms, run protocol head-count experiments over random
// deployments, and run growth experiments with tail-slope analysis.
namespace wsncluster::harness {

namespace detail {
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline void append_fixed(std::string& out, double v, int precision) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    out.append(buf, res.ptr);
}

inline double take_double(const char*& cur, const char* end, char delim, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(cur, end, v);
    if (res.ec != std::errc{}) throw std::invalid_argument(std::string("csv: bad ") + what);
    cur = res.ptr;
    if (cur != end && *cur == delim) ++cur;
    return v;
}

inline long long take_int(const char*& cur, const char* end, char delim, const char* what) {
    long long v = 0;
    const auto res = std::from_chars(cur, end, v);
    if (res.ec != std::errc{}) throw std::invalid_argument(std::string("csv: bad ") + what);
    cur = res.ptr;
    if (cur != end && *cur == delim) ++cur;
    return v;
}
}  // namespace detail

// ---- bundled reference deployment rows -----------------------------------

// Published head counts for three protocols on reference deployments of N
// nodes with mean neighbor count k: `heads_reference` is the count the
// closed form is expected to reproduce, `heads_observed` the protocol
// measurement reported alongside it.
struct ReferenceRow {
    const char* protocol;
    int n_nodes;
    int k;
    int heads_reference;
    int heads_observed;
};

inline const std::vector<ReferenceRow>& reference_rows() {
    static const std::vector<ReferenceRow> rows = {
        {"simple-tree", 100, 3, 37, 40},  {"simple-tree", 200, 3, 73, 71},
        {"simple-tree", 300, 4, 79, 71},  {"simple-tree", 400, 4, 105, 96},
        {"simple-tree", 500, 4, 132, 130},
        {"cds-rule-k", 100, 4, 27, 27},   {"cds-rule-k", 200, 6, 35, 38},
        {"cds-rule-k", 300, 10, 31, 33},  {"cds-rule-k", 400, 10, 41, 43},
        {"cds-rule-k", 500, 13, 39, 43},
        {"a3", 100, 4, 27, 34},           {"a3", 200, 6, 35, 40},
        {"a3", 300, 8, 39, 49},           {"a3", 400, 10, 41, 48},
        {"a3", 500, 12, 42, 46},
    };
    return rows;
}

// Reference deletion rates quoted for the head-count optima at p = 0.5.
// Kept verbatim even though the closed form z*(k, p) lands elsewhere; the
// report prints both and flags every such row as a known inconsistency.
struct ReferenceZRow {
    int n_nodes;
    int k;
    double p;
    double z_reference;
};

inline const std::vector<ReferenceZRow>& reference_z_rows() {
    static const std::vector<ReferenceZRow> rows = {
        {100, 4, 0.5, -7.0},   {200, 6, 0.5, -9.0},   {300, 8, 0.5, -11.0},
        {400, 10, 0.5, -13.0}, {500, 13, 0.5, -16.0},
    };
    return rows;
}

// ---- closed-form table reproduction --------------------------------------

struct TheoryRow {
    std::string protocol;
    int n_nodes;
    int k;
    int heads_reference;
    int heads_observed;
    int predicted;
    int deviation;  // predicted - heads_reference
};

struct ZCriticalRow {
    int n_nodes;
    int k;
    double p;
    double z_model;
    double z_reference;
    bool matches;  // |z_model - z_reference| <= 0.5
};

struct TheoryTablesReport {
    std::vector<TheoryRow> rows;
    std::vector<ZCriticalRow> z_rows;
    int exact_rows = 0;
    int max_abs_deviation = 0;
};

inline TheoryTablesReport reproduce_theory_tables() {
    TheoryTablesReport report;
    for (const auto& ref : reference_rows()) {
        TheoryRow row;
        row.protocol = ref.protocol;
        row.n_nodes = ref.n_nodes;
        row.k = ref.k;
        row.heads_reference = ref.heads_reference;
        row.heads_observed = ref.heads_observed;
        row.predicted = meanfield::predict_cluster_count(ref.n_nodes, ref.k);
        row.deviation = row.predicted - ref.heads_reference;
        report.exact_rows += row.deviation == 0 ? 1 : 0;
        report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(row.deviation));
        report.rows.push_back(std::move(row));
    }
    for (const auto& ref : reference_z_rows()) {
        ZCriticalRow row;
        row.n_nodes = ref.n_nodes;
        row.k = ref.k;
        row.p = ref.p;
        row.z_model = meanfield::z_critical(ref.k, ref.p);
        row.z_reference = ref.z_reference;
        row.matches = std::abs(row.z_model - row.z_reference) <= 0.5;
        report.z_rows.push_back(row);
    }
    return report;
}

inline std::string format_theory_tables(const TheoryTablesReport& report) {
    std::string out;
    out += "head-count prediction vs bundled reference rows\n";
    out += "protocol,N,k,predicted,reference,observed,deviation\n";
    for (const auto& r : report.rows) {
        out += r.protocol;
        out += ',';
        out += std::to_string(r.n_nodes);
        out += ',';
        out += std::to_string(r.k);
        out += ',';
        out += std::to_string(r.predicted);
        out += ',';
        out += std::to_string(r.heads_reference);
        out += ',';
        out += std::to_string(r.heads_observed);
        out += ',';
        out += std::to_string(r.deviation);
        out += '\n';
    }
    out += "summary: ";
    out += std::to_string(report.rows.size());
    out += " rows, ";
    out += std::to_string(report.exact_rows);
    out += " exact, max |deviation| ";
    out += std::to_string(report.max_abs_deviation);
    out += '\n';
    out += "\npeak-probability deletion rate z* vs bundled reference column\n";
    out += "N,k,p,z_model,z_reference,flag\n";
    for (const auto& r : report.z_rows) {
        out += std::to_string(r.n_nodes);
        out += ',';
        out += std::to_string(r.k);
        out += ',';
        detail::append_double(out, r.p);
        out += ',';
        detail::append_fixed(out, r.z_model, 4);
        out += ',';
        detail::append_double(out, r.z_reference);
        out += ',';
        out += r.matches ? "ok" : "deviates";
        out += '\n';
    }
    return out;
}

// ---- protocol head-count experiments -------------------------------------

struct ProtocolTableConfig {
    std::vector<int> node_counts = {100, 200, 300, 400, 500};
    double width = 600.0;
    double height = 600.0;
    double radius = 100.0;
    int trials = 20;
    std::uint64_t seed0 = 1;
    int coverage_limit = 0;  // forwarded to the dominating-set election

    void validate() const {
        if (node_counts.empty()) throw std::invalid_argument("ProtocolTableConfig: no node counts");
        for (int n : node_counts)
            if (n < 1) throw std::invalid_argument("ProtocolTableConfig: node counts must be >= 1");
        if (trials < 1) throw std::invalid_argument("ProtocolTableConfig: trials must be >= 1");
        if (!(width > 0.0 && height > 0.0 && radius > 0.0))
            throw std::invalid_argument("ProtocolTableConfig: geometry must be positive");
    }
};

// One experiment table line.  `heads_theory` is the closed-form count for
// the measured neighbor count rounded to the nearest integer, or -1 when
// that rounded value is below 2 and the closed form does not apply.
struct ExperimentRow {
    int n_nodes = 0;
    double k_mean = 0.0;     // mean neighbors per elected head, across usable trials
    int heads_theory = -1;
    double heads_mean = 0.0;
    double heads_std = 0.0;  // sample standard deviation over usable trials
    std::string protocol;
    int trials = 0;          // configured trials (usable count may be lower)
    std::uint64_t seed0 = 0;
};

struct ProtocolTableResult {
    geoproto::Protocol protocol = geoproto::Protocol::SimpleTree;
    ProtocolTableConfig config;
    std::vector<ExperimentRow> rows;        // node counts with >= 1 usable trial
    std::vector<int> unusable_trials;       // disconnected deployments, per node count
    std::vector<int> unusable_node_counts;  // node counts where every trial was disconnected
};

// Head count and head neighbor count for one deployment instance.
struct TrialOutcome {
    int heads = 0;
    double avg_k = 0.0;
    bool usable = false;
};

inline TrialOutcome run_protocol_trial(const geoproto::GeoNetwork& net, geoproto::Protocol protocol,
                                       std::uint64_t seed, int coverage_limit = 0) {
    TrialOutcome out;
    if (!net.connected()) return out;
    const int sink = net.nearest_to_center();
    const auto result = geoproto::run_protocol(net, protocol, sink, seed, coverage_limit);
    out.heads = static_cast<int>(geoproto::head_count(result));
    out.avg_k = result.active.empty() ? 0.0 : geoproto::avg_neighbor_count(net, result);
    out.usable = true;
    return out;
}

// Collapses per-trial outcomes into one table row; requires at least one
// usable outcome.
inline ExperimentRow summarize_trials(int n_nodes, const std::vector<TrialOutcome>& outcomes,
                                      geoproto::Protocol protocol, int trials,
                                      std::uint64_t seed0) {
    ExperimentRow row;
    row.n_nodes = n_nodes;
    row.protocol = geoproto::protocol_tag(protocol);
    row.trials = trials;
    row.seed0 = seed0;
    double sum_heads = 0.0;
    double sum_k = 0.0;
    int usable = 0;
    for (const auto& o : outcomes) {
        if (!o.usable) continue;
        ++usable;
        sum_heads += o.heads;
        sum_k += o.avg_k;
    }
    if (usable == 0) throw std::runtime_error("summarize_trials: no usable deployment");
    row.heads_mean = sum_heads / usable;
    row.k_mean = sum_k / usable;
    double ss = 0.0;
    for (const auto& o : outcomes) {
        if (!o.usable) continue;
        ss += (o.heads - row.heads_mean) * (o.heads - row.heads_mean);
    }
    row.heads_std = usable > 1 ? std::sqrt(ss / (usable - 1)) : 0.0;
    const long long k_rounded = std::llround(row.k_mean);
    if (k_rounded >= 2)
        row.heads_theory = meanfield::predict_cluster_count(n_nodes, static_cast<double>(k_rounded));
    return row;
}

// Runs `trials` deployments per node count.  Trials are independent and
// execute concurrently; outcomes are aggregated in seed order, so the
// result is byte-identical regardless of scheduling.
inline ProtocolTableResult run_protocol_table(geoproto::Protocol protocol,
                                              const ProtocolTableConfig& config) {
    config.validate();
    ProtocolTableResult result;
    result.protocol = protocol;
    result.config = config;
    std::uint64_t seed = config.seed0;
    for (int n : config.node_counts) {
        std::vector<std::future<TrialOutcome>> pending;
        pending.reserve(config.trials);
        for (int trial = 0; trial < config.trials; ++trial, ++seed) {
            pending.push_back(std::async(std::launch::async, [=, &config] {
                const auto net =
                    geoproto::generate_rgg(n, config.width, config.height, config.radius, seed);
                return run_protocol_trial(net, protocol, seed, config.coverage_limit);
            }));
        }
        std::vector<TrialOutcome> outcomes;
        outcomes.reserve(config.trials);
        int skipped = 0;
        for (auto& f : pending) {
            outcomes.push_back(f.get());
            if (!outcomes.back().usable) ++skipped;
        }
        result.unusable_trials.push_back(skipped);
        if (skipped == config.trials) {
            result.unusable_node_counts.push_back(n);
            continue;
        }
        result.rows.push_back(summarize_trials(n, outcomes, protocol, config.trials, config.seed0));
    }
    return result;
}

inline const char* csv_header() { return "N,k,n_T,n_E_mean,n_E_std,protocol,trials,seed0"; }

inline std::string to_csv(const std::vector<ExperimentRow>& rows) {
    std::string out = csv_header();
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.n_nodes);
        out += ',';
        detail::append_double(out, r.k_mean);
        out += ',';
        out += std::to_string(r.heads_theory);
        out += ',';
        detail::append_double(out, r.heads_mean);
        out += ',';
        detail::append_double(out, r.heads_std);
        out += ',';
        out += r.protocol;
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += std::to_string(r.seed0);
        out += '\n';
    }
    return out;
}

inline std::vector<ExperimentRow> parse_csv(std::string_view text) {
    const auto header_end = text.find('\n');
    if (header_end == std::string_view::npos || text.substr(0, header_end) != csv_header())
        throw std::invalid_argument("csv: missing or unexpected header");
    std::vector<ExperimentRow> rows;
    std::size_t pos = header_end + 1;
    while (pos < text.size()) {
        auto line_end = text.find('\n', pos);
        if (line_end == std::string_view::npos) line_end = text.size();
        const std::string_view line = text.substr(pos, line_end - pos);
        pos = line_end + 1;
        if (line.empty()) continue;
        const char* cur = line.data();
        const char* end = line.data() + line.size();
        ExperimentRow row;
        row.n_nodes = static_cast<int>(detail::take_int(cur, end, ',', "N"));
        row.k_mean = detail::take_double(cur, end, ',', "k");
        row.heads_theory = static_cast<int>(detail::take_int(cur, end, ',', "n_T"));
        row.heads_mean = detail::take_double(cur, end, ',', "n_E_mean");
        row.heads_std = detail::take_double(cur, end, ',', "n_E_std");
        const char* tag_start = cur;
        while (cur != end && *cur != ',') ++cur;
        row.protocol.assign(tag_start, cur);
        geoproto::protocol_from_tag(row.protocol);  // validate
        if (cur != end) ++cur;
        row.trials = static_cast<int>(detail::take_int(cur, end, ',', "trials"));
        row.seed0 = static_cast<std::uint64_t>(detail::take_int(cur, end, ',', "seed0"));
        if (cur != end) throw std::invalid_argument("csv: trailing characters on a row");
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---- growth experiments ---------------------------------------------------

// Least-squares log-log slope of the head-degree distribution between
// degree `k_min` and the 95th-percentile head degree.
struct TailFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int k_min = 0;
    int k_max = 0;
    int points = 0;
};

inline std::optional<TailFit> fit_degree_tail(const evolve::Snapshot& snap, int k_min = 4) {
    if (snap.heads <= 0) return std::nullopt;
    long long cum = 0;
    int k95 = 0;
    for (const auto& [degree, count] : snap.head_degree_hist) {
        cum += count;
        k95 = degree;
        if (cum * 20 >= snap.heads * 19) break;  // the 95th percentile
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& [degree, count] : snap.head_degree_hist) {
        if (degree < k_min || degree > k95 || count <= 0) continue;
        pts.emplace_back(std::log(static_cast<double>(degree)),
                         std::log(static_cast<double>(count) / static_cast<double>(snap.heads)));
    }
    if (pts.size() < 3) return std::nullopt;
    const auto fit = fit_polynomial(pts, 1);
    TailFit out;
    out.slope = fit.coefficients[1];
    out.r_squared = fit.r_squared;
    out.k_min = k_min;
    out.k_max = k95;
    out.points = static_cast<int>(pts.size());
    return out;
}

// Explicit-window variant: fits over degrees in [k_min, k_max] whose count
// reaches `min_count`.  The default-window overload above chops at the 95th
// percentile instead, which suits single-run reports; pooled multi-seed
// histograms carry enough tail mass to fit far beyond it.
inline std::optional<TailFit> fit_degree_tail_window(const evolve::Snapshot& snap, int k_min,
                                                     int k_max, long long min_count = 1) {
    if (snap.heads <= 0 || k_min < 1 || k_max < k_min) return std::nullopt;
    std::vector<std::pair<double, double>> pts;
    int top = 0;
    for (const auto& [degree, count] : snap.head_degree_hist) {
        if (degree < k_min || degree > k_max || count < min_count) continue;
        top = std::max(top, degree);
        pts.emplace_back(std::log(static_cast<double>(degree)),
                         std::log(static_cast<double>(count) / static_cast<double>(snap.heads)));
    }
    if (pts.size() < 3) return std::nullopt;
    const auto fit = fit_polynomial(pts, 1);
    TailFit out;
    out.slope = fit.coefficients[1];
    out.r_squared = fit.r_squared;
    out.k_min = k_min;
    out.k_max = top;
    out.points = static_cast<int>(pts.size());
    return out;
}

// Merges final-state head-degree histograms from several runs (degree-wise
// count sums), for pooled tail fits across seeds.
inline evolve::Snapshot pool_final_histograms(const std::vector<evolve::RunResult>& runs) {
    evolve::Snapshot pooled;
    std::vector<long long> counts;
    for (const auto& r : runs) {
        if (r.snapshots.empty()) continue;
        const auto& final_snap = r.snapshots.back();
        pooled.t = std::max(pooled.t, final_snap.t);
        pooled.heads += final_snap.heads;
        pooled.normals += final_snap.normals;
        pooled.edges += final_snap.edges;
        pooled.deletions += final_snap.deletions;
        pooled.orphans += final_snap.orphans;
        for (const auto& [degree, count] : final_snap.head_degree_hist) {
            if (static_cast<std::size_t>(degree) >= counts.size()) counts.resize(degree + 1, 0);
            counts[degree] += count;
        }
    }
    long long degree_sum = 0;
    for (std::size_t d = 0; d < counts.size(); ++d) {
        if (counts[d] == 0) continue;
        pooled.head_degree_hist.emplace_back(static_cast<int>(d), counts[d]);
        degree_sum += static_cast<long long>(d) * counts[d];
    }
    pooled.mean_head_degree =
        pooled.heads > 0 ? static_cast<double>(degree_sum) / pooled.heads : 0.0;
    return pooled;
}

struct EvolveExperiment {
    evolve::RunResult run;
    long long snapshot_every = 0;
    double final_mean_head_degree = 0.0;
    double deletion_ratio = 0.0;
    double z_critical_at_mean_k = std::numeric_limits<double>::quiet_NaN();
    std::string regime;  // peak-at-{negative,zero,positive}-z by sign of z*
    std::optional<TailFit> tail;
};

inline EvolveExperiment evolve_experiment(const evolve::EvolutionParams& params, long long steps,
                                          long long snapshot_every) {
    EvolveExperiment ex;
    ex.run = evolve::run(params, steps, snapshot_every);
    ex.snapshot_every = snapshot_every;
    const auto& final_snap = ex.run.snapshots.back();
    ex.final_mean_head_degree = final_snap.mean_head_degree;
    ex.deletion_ratio =
        ex.run.additions > 0 ? static_cast<double>(ex.run.deletions) / ex.run.additions : 0.0;
    if (ex.final_mean_head_degree >= 1.0) {
        ex.z_critical_at_mean_k = meanfield::z_critical(ex.final_mean_head_degree, params.p);
        if (std::abs(ex.z_critical_at_mean_k) < 1e-9)
            ex.regime = "peak-at-zero-z";
        else
            ex.regime = ex.z_critical_at_mean_k < 0.0 ? "peak-at-negative-z" : "peak-at-positive-z";
    } else {
        ex.regime = "degenerate";
    }
    ex.tail = fit_degree_tail(final_snap);
    return ex;
}

// ---- structured growth report (single JSON document) ----------------------

// Emits the full-run report: parameters, totals, final-state summary,
// regime annotation, tail fit, analytic overlay curves on the same grids,
// and the snapshot trajectory in its one-line text form.  Parsing an
// emitted report and re-emitting it is byte-identical.
inline std::string evolve_report(const EvolveExperiment& ex) {
    using json = nlohmann::ordered_json;
    const auto& params = ex.run.params;
    json doc;
    doc["kind"] = "growth-report";
    doc["params"] = {{"m0", params.m0},
                     {"local_world", params.local_world},
                     {"p", params.p},
                     {"z", params.z},
                     {"degree_cap", params.degree_cap},
                     {"energy_min", params.energy_min},
                     {"energy_max", params.energy_max},
                     {"initial_edges", params.initial_edges},
                     {"seed", params.seed}};
    doc["steps"] = ex.run.steps;
    doc["snapshot_every"] = ex.snapshot_every;
    doc["totals"] = {{"additions", ex.run.additions},
                     {"deletions", ex.run.deletions},
                     {"orphans", ex.run.orphans},
                     {"forced_attachments", ex.run.forced_attachments},
                     {"uniform_fallbacks", ex.run.uniform_fallbacks},
                     {"newcomer_heads", ex.run.newcomer_heads},
                     {"newcomer_normals", ex.run.newcomer_normals}};
    const auto& final_snap = ex.run.snapshots.back();
    doc["final"] = {{"heads", final_snap.heads},
                    {"normals", final_snap.normals},
                    {"edges", final_snap.edges},
                    {"mean_head_degree", final_snap.mean_head_degree},
                    {"deletion_ratio", ex.deletion_ratio}};
    doc["regime"] = {{"label", ex.regime},
                     {"z_critical_at_mean_k", std::isfinite(ex.z_critical_at_mean_k)
                                                  ? json(ex.z_critical_at_mean_k)
                                                  : json(nullptr)}};
    if (ex.tail) {
        doc["tail_fit"] = {{"slope", ex.tail->slope},
                           {"r_squared", ex.tail->r_squared},
                           {"k_min", ex.tail->k_min},
                           {"k_max", ex.tail->k_max},
                           {"points", ex.tail->points}};
    } else {
        doc["tail_fit"] = nullptr;
    }

    json analytic;
    const auto mc = meanfield::constants(params.p);
    analytic["tail_exponent"] = -(1.0 / mc.degree_coeff + 1.0);
    analytic["mean_degree_limit"] = (1.0 + params.p) / params.p;
    json degree_curve = json::array();
    for (const auto& s : ex.run.snapshots)
        degree_curve.push_back(
            {s.t, meanfield::mean_degree(static_cast<double>(s.t), params.m0, params.p)});
    analytic["mean_degree_curve"] = std::move(degree_curve);
    const double growth = mc.degree_coeff + mc.intake_coeff - 2.0 * params.z * mc.deletion_coeff;
    if (growth > 0.0) {
        json dist = json::array();
        for (const auto& [degree, count] : final_snap.head_degree_hist) {
            if (degree < 1) continue;
            dist.push_back({degree, meanfield::degree_distribution(
                                        {static_cast<double>(degree), params.p, params.z})});
        }
        analytic["degree_distribution"] = std::move(dist);
    } else {
        analytic["degree_distribution"] = nullptr;
    }
    doc["analytic"] = std::move(analytic);

    json lines = json::array();
    for (const auto& s : ex.run.snapshots) lines.push_back(evolve::snapshot_line(s));
    doc["snapshots"] = std::move(lines);
    return doc.dump(2) + "\n";
}

// Parses a growth report, validating the envelope and every snapshot line.
inline nlohmann::ordered_json parse_evolve_report(std::string_view text) {
    auto doc = nlohmann::ordered_json::parse(text);
    if (!doc.is_object() || doc.value("kind", "") != "growth-report")
        throw std::invalid_argument("growth report: unexpected document kind");
    for (const char* key : {"params", "steps", "snapshot_every", "totals", "final", "regime",
                            "tail_fit", "analytic", "snapshots"})
        if (!doc.contains(key))
            throw std::invalid_argument(std::string("growth report: missing field ") + key);
    for (const auto& line : doc["snapshots"])
        evolve::parse_snapshot_line(line.get<std::string>());
    return doc;
}

inline std::string reemit_evolve_report(std::string_view text) {
    return parse_evolve_report(text).dump(2) + "\n";
}

}  // namespace wsncluster::harness

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rng.hpp"

// Stochastic growth of a two-tier sensor topology: each step one newcomer
// joins (a cluster head with probability p, an ordinary node otherwise) and
// links to one existing head chosen from a sampled local world with
// probability proportional to saturation-damped degree (head newcomers) or
// saturation-damped head-to-head link count (ordinary newcomers).  A rate-z
// anti-preferential deletion then removes links next to low-energy heads.
namespace wsncluster::evolve {

enum class NodeKind : std::uint8_t { Cluster, Normal };

struct EvolutionParams {
    int m0 = 5;                  // seed cluster heads
    int local_world = 10;        // heads sampled per attachment decision
    double p = 0.3;              // cluster-head arrival probability
    double z = 0.0;              // link deletions per step (may be fractional)
    int degree_cap = 50;         // cap scale; head i accepts at most floor(cap * E_i / E_max) links
    double energy_min = 0.5;
    double energy_max = 1.0;
    int initial_edges = -1;      // links among the seeds; -1 means m0 - 1 (a random tree)
    std::uint64_t seed = 1;

    void validate() const {
        if (m0 < 1) throw std::invalid_argument("EvolutionParams: m0 must be >= 1");
        if (local_world < 1) throw std::invalid_argument("EvolutionParams: local_world must be >= 1");
        if (!(p > 0.0 && p <= 0.5))
            throw std::invalid_argument("EvolutionParams: p must lie in (0, 0.5]");
        if (!(z >= 0.0)) throw std::invalid_argument("EvolutionParams: z must be >= 0");
        if (degree_cap < 1) throw std::invalid_argument("EvolutionParams: degree_cap must be >= 1");
        if (!(energy_min > 0.0 && energy_min <= energy_max))
            throw std::invalid_argument("EvolutionParams: need 0 < energy_min <= energy_max");
        const long long pairs = static_cast<long long>(m0) * (m0 - 1) / 2;
        if (initial_edges > pairs)
            throw std::invalid_argument("EvolutionParams: initial_edges exceeds seed pair count");
    }
};

struct NodeState {
    NodeKind kind;
    double energy;
    int degree_cap;      // personal cap (1 for ordinary nodes)
    int degree;
    int cluster_edges;   // head-to-head links (maintained for heads; 0 otherwise)
    long long birth;
};

struct StepReport {
    long long t = 0;                    // time after the step
    NodeKind newcomer_kind = NodeKind::Normal;
    int newcomer_id = -1;
    int target_id = -1;
    int deletions = 0;
    int orphaned_normals = 0;           // ordinary nodes cut loose this step
    bool used_uniform_fallback = false; // zero attachment weight, picked uniformly
    bool forced_attachment = false;     // every head saturated, cap overridden
};

class EvolvingNetwork {
public:
    explicit EvolvingNetwork(const EvolutionParams& params) : params_(params), rng_(params.seed) {
        params_.validate();
        nodes_.reserve(static_cast<std::size_t>(params_.m0));
        for (int i = 0; i < params_.m0; ++i) push_node(NodeKind::Cluster, 0);
        seed_topology();
    }

    const EvolutionParams& params() const { return params_; }
    long long time() const { return time_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    long long edge_count() const { return static_cast<long long>(edge_list_.size()); }
    const NodeState& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const std::vector<int>& neighbors(int id) const {
        return adjacency_.at(static_cast<std::size_t>(id));
    }
    const std::vector<int>& cluster_ids() const { return cluster_ids_; }
    const std::vector<std::pair<int, int>>& edges() const { return edge_list_; }

    long long additions() const { return additions_; }
    long long deletions() const { return deletions_; }
    long long orphans() const { return orphans_; }
    long long forced_attachments() const { return forced_; }
    long long uniform_fallbacks() const { return uniform_fallbacks_; }
    long long newcomer_heads() const { return newcomer_heads_; }
    long long newcomer_normals() const { return newcomer_normals_; }

    // One growth event plus its z-governed deletions.
    StepReport step() {
        StepReport report;
        const NodeKind kind = rng_.bernoulli(params_.p) ? NodeKind::Cluster : NodeKind::Normal;
        const int target = choose_target(kind, report);
        const int id = push_node(kind, time_ + 1);
        add_edge(id, target);
        ++additions_;
        (kind == NodeKind::Cluster ? newcomer_heads_ : newcomer_normals_) += 1;
        if (params_.z > 0.0) run_deletions(&report);
        ++time_;
        report.t = time_;
        report.newcomer_kind = kind;
        report.newcomer_id = id;
        report.target_id = target;
        return report;
    }

    // Distinct heads drawn uniformly; min(local_world, head count) of them.
    std::vector<int> select_local_world() {
        const std::size_t n = cluster_ids_.size();
        const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(params_.local_world), n);
        std::vector<int> out(want);
        if (want == n) {
            std::copy(cluster_ids_.begin(), cluster_ids_.end(), out.begin());
            return out;
        }
        // partial Fisher-Yates over a persistent index permutation
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(n - i));
            std::swap(scratch_perm_[i], scratch_perm_[j]);
            out[i] = cluster_ids_[static_cast<std::size_t>(scratch_perm_[i])];
        }
        return out;
    }

    // Normalized attachment weight of `target` within `local_world` for the
    // given newcomer kind: (1 - k/kmax) * q_target / sum of q over the world,
    // with q = degree for head newcomers and q = head-to-head links otherwise.
    double attach_weight(int target, NodeKind newcomer_kind,
                         const std::vector<int>& local_world) const {
        bool member = false;
        double denom = 0.0;
        for (int id : local_world) {
            member = member || id == target;
            denom += quantity(id, newcomer_kind);
        }
        if (!member) throw std::domain_error("attach_weight: target not in the local world");
        if (denom <= 0.0)
            throw std::domain_error("attach_weight: local world holds no attachment weight");
        return saturation(target) * quantity(target, newcomer_kind) / denom;
    }

    // Draws an attachment target exactly as step() would, without modifying
    // the topology (only the generator state advances).
    int sample_target(NodeKind newcomer_kind) {
        StepReport scratch;
        return choose_target(newcomer_kind, scratch);
    }

    // Exact attachment distribution over heads for the whole-network case
    // (local_world >= head count): normalized saturation-damped weights.
    std::vector<std::pair<int, double>> attachment_distribution(NodeKind newcomer_kind) const {
        double total = 0.0;
        for (int id : cluster_ids_) total += saturation(id) * quantity(id, newcomer_kind);
        std::vector<std::pair<int, double>> out;
        if (total <= 0.0) return out;
        for (int id : cluster_ids_) {
            const double w = saturation(id) * quantity(id, newcomer_kind);
            if (w > 0.0) out.emplace_back(id, w / total);
        }
        return out;
    }

    // The z-governed deletion batch for one step; returns links removed.
    int run_deletions(StepReport* report) {
        int attempts = static_cast<int>(std::floor(params_.z));
        const double frac = params_.z - std::floor(params_.z);
        if (frac > 0.0 && rng_.bernoulli(frac)) ++attempts;
        int done = 0;
        for (int i = 0; i < attempts; ++i)
            if (delete_attempt(report)) ++done;
        if (report) report->deletions = done;
        return done;
    }
    int anti_preferential_delete() { return run_deletions(nullptr); }

    // Node counts by degree; index = degree.  No filter means all nodes.
    std::vector<long long> degree_histogram(std::optional<NodeKind> kind = {}) const {
        std::vector<long long> hist;
        for (const auto& s : nodes_) {
            if (kind && s.kind != *kind) continue;
            if (static_cast<std::size_t>(s.degree) >= hist.size())
                hist.resize(static_cast<std::size_t>(s.degree) + 1, 0);
            ++hist[static_cast<std::size_t>(s.degree)];
        }
        return hist;
    }

    // Structural audit; throws std::logic_error on the first violation.
    // Cheap O(nodes + edges) checks always run; `deep` adds the
    // bookkeeping-index cross-checks.
    void validate_structure(bool deep = false) const {
        if (static_cast<long long>(nodes_.size()) != params_.m0 + time_)
            bad("node count != m0 + t");
        // Stamps must be cleared every audit: values left by a previous call
        // would fake parallel links when no step ran in between.
        stamp_.assign(nodes_.size(), -1);
        long long degree_sum = 0;
        long long cc_twice = 0;
        long long zero_degree_normals = 0;
        long long heads = 0;
        for (std::size_t id = 0; id < nodes_.size(); ++id) {
            const auto& s = nodes_[id];
            const auto& adj = adjacency_[id];
            if (static_cast<int>(adj.size()) != s.degree) bad("stored degree != adjacency size");
            int head_links = 0;
            for (int u : adj) {
                if (u < 0 || static_cast<std::size_t>(u) >= nodes_.size()) bad("neighbor out of range");
                if (static_cast<std::size_t>(u) == id) bad("self loop");
                if (stamp_[static_cast<std::size_t>(u)] == static_cast<long long>(id))
                    bad("parallel link");
                stamp_[static_cast<std::size_t>(u)] = static_cast<long long>(id);
                if (nodes_[static_cast<std::size_t>(u)].kind == NodeKind::Cluster) ++head_links;
            }
            degree_sum += s.degree;
            if (s.kind == NodeKind::Normal) {
                if (s.cluster_edges != 0) bad("ordinary node with a head-link tally");
                if (s.degree > 1) bad("ordinary node with more than one link");
                if (s.degree == 1 && head_links != 1) bad("ordinary node linked to a non-head");
                if (s.degree == 0) ++zero_degree_normals;
            } else {
                if (head_links != s.cluster_edges) bad("stored head-link count is stale");
                ++heads;
                cc_twice += head_links;
                if (s.degree_cap < 1) bad("head cap below 1");
                if (forced_ == 0 && s.degree > s.degree_cap) bad("head above its degree cap");
            }
        }
        if (heads != static_cast<long long>(cluster_ids_.size())) bad("head roster out of date");
        if (degree_sum != 2 * static_cast<long long>(edge_list_.size()))
            bad("degree sum != 2 * edge count");
        if (cc_twice != 2 * static_cast<long long>(cc_list_.size()))
            bad("head-to-head edge roster out of date");
        if (zero_degree_normals != orphans_) bad("orphan tally != zero-degree ordinary nodes");
        if (!deep) return;
        if (edge_index_.size() != edge_list_.size() || cc_index_.size() != cc_list_.size())
            bad("edge index size mismatch");
        for (std::size_t i = 0; i < edge_list_.size(); ++i) {
            const auto it = edge_index_.find(key_of(edge_list_[i].first, edge_list_[i].second));
            if (it == edge_index_.end() || it->second != i) bad("edge index entry mismatch");
            if (!adjacent(edge_list_[i].first, edge_list_[i].second)) bad("listed edge not in adjacency");
        }
        for (std::size_t i = 0; i < cc_list_.size(); ++i) {
            const auto it = cc_index_.find(key_of(cc_list_[i].first, cc_list_[i].second));
            if (it == cc_index_.end() || it->second != i) bad("head-edge index entry mismatch");
        }
    }

    bool adjacent(int a, int b) const { return edge_index_.count(key_of(a, b)) != 0; }

private:
    [[noreturn]] static void bad(const char* what) {
        throw std::logic_error(std::string("EvolvingNetwork: ") + what);
    }

    static std::uint64_t key_of(int a, int b) {
        const auto lo = static_cast<std::uint64_t>(std::min(a, b));
        const auto hi = static_cast<std::uint64_t>(std::max(a, b));
        return (lo << 32) | hi;
    }

    double saturation(int id) const {
        const auto& s = nodes_[static_cast<std::size_t>(id)];
        return std::max(0.0, 1.0 - static_cast<double>(s.degree) / s.degree_cap);
    }

    double quantity(int id, NodeKind newcomer_kind) const {
        const auto& s = nodes_[static_cast<std::size_t>(id)];
        return newcomer_kind == NodeKind::Cluster ? static_cast<double>(s.degree)
                                                  : static_cast<double>(s.cluster_edges);
    }

    int push_node(NodeKind kind, long long birth) {
        const double energy = rng_.uniform(params_.energy_min, params_.energy_max);
        NodeState s;
        s.kind = kind;
        s.energy = energy;
        s.degree_cap =
            kind == NodeKind::Cluster
                ? std::max(1, static_cast<int>(std::floor(params_.degree_cap * energy /
                                                          params_.energy_max)))
                : 1;
        s.degree = 0;
        s.cluster_edges = 0;
        s.birth = birth;
        nodes_.push_back(s);
        adjacency_.emplace_back();
        const int id = static_cast<int>(nodes_.size()) - 1;
        if (kind == NodeKind::Cluster) {
            scratch_perm_.push_back(static_cast<int>(cluster_ids_.size()));
            cluster_ids_.push_back(id);
        }
        return id;
    }

    void seed_topology() {
        const int m0 = params_.m0;
        const int want = params_.initial_edges < 0 ? m0 - 1 : params_.initial_edges;
        int placed = 0;
        if (want >= m0 - 1) {
            // spanning links first: each later seed hooks onto a random earlier one
            for (int i = 1; i < m0; ++i, ++placed) add_edge(i, static_cast<int>(rng_.below(i)));
        }
        while (placed < want) {
            const int a = static_cast<int>(rng_.below(static_cast<std::uint64_t>(m0)));
            const int b = static_cast<int>(rng_.below(static_cast<std::uint64_t>(m0)));
            if (a == b || adjacent(a, b)) continue;
            add_edge(a, b);
            ++placed;
        }
    }

    void add_edge(int a, int b) {
        adjacency_[static_cast<std::size_t>(a)].push_back(b);
        adjacency_[static_cast<std::size_t>(b)].push_back(a);
        auto& sa = nodes_[static_cast<std::size_t>(a)];
        auto& sb = nodes_[static_cast<std::size_t>(b)];
        ++sa.degree;
        ++sb.degree;
        edge_index_[key_of(a, b)] = edge_list_.size();
        edge_list_.emplace_back(a, b);
        if (sa.kind == NodeKind::Cluster && sb.kind == NodeKind::Cluster) {
            ++sa.cluster_edges;
            ++sb.cluster_edges;
            cc_index_[key_of(a, b)] = cc_list_.size();
            cc_list_.emplace_back(a, b);
        }
    }

    void drop_from(std::vector<int>& adj, int v) {
        const auto it = std::find(adj.begin(), adj.end(), v);
        *it = adj.back();
        adj.pop_back();
    }

    void erase_listed(std::vector<std::pair<int, int>>& list,
                      std::unordered_map<std::uint64_t, std::size_t>& index, int a, int b) {
        const auto it = index.find(key_of(a, b));
        const std::size_t pos = it->second;
        index.erase(it);
        if (pos + 1 != list.size()) {
            list[pos] = list.back();
            index[key_of(list[pos].first, list[pos].second)] = pos;
        }
        list.pop_back();
    }

    void remove_edge(int a, int b) {
        drop_from(adjacency_[static_cast<std::size_t>(a)], b);
        drop_from(adjacency_[static_cast<std::size_t>(b)], a);
        auto& sa = nodes_[static_cast<std::size_t>(a)];
        auto& sb = nodes_[static_cast<std::size_t>(b)];
        --sa.degree;
        --sb.degree;
        erase_listed(edge_list_, edge_index_, a, b);
        if (sa.kind == NodeKind::Cluster && sb.kind == NodeKind::Cluster) {
            --sa.cluster_edges;
            --sb.cluster_edges;
            erase_listed(cc_list_, cc_index_, a, b);
        }
    }

    int choose_target(NodeKind kind, StepReport& report) {
        if (static_cast<std::size_t>(params_.local_world) >= cluster_ids_.size())
            return choose_target_whole(kind, report);
        std::vector<int> world = select_local_world();
        for (int attempt = 0; attempt < 8; ++attempt) {
            double total = 0.0;
            for (int id : world) total += saturation(id) * quantity(id, kind);
            if (total > 0.0) return weighted_pick(world, kind, total);
            int n_open = 0;
            for (int id : world)
                if (saturation(id) > 0.0) ++n_open;
            if (n_open > 0) {
                report.used_uniform_fallback = true;
                ++uniform_fallbacks_;
                auto pick = rng_.below(static_cast<std::uint64_t>(n_open));
                for (int id : world)
                    if (saturation(id) > 0.0 && pick-- == 0) return id;
            }
            world = select_local_world();  // everyone saturated: try elsewhere
        }
        return forced_target(report);
    }

    // Local world == every head.  Sampling by rejection from uniform edge
    // endpoints (degree-proportional) or uniform head-to-head endpoints
    // (head-link-proportional) realizes exactly the same distribution as the
    // explicit weighted scan, in O(1) expected time.
    int choose_target_whole(NodeKind kind, StepReport& report) {
        if (kind == NodeKind::Cluster && !edge_list_.empty()) {
            for (int tries = 0; tries < 512; ++tries) {
                const auto& e = edge_list_[static_cast<std::size_t>(
                    rng_.below(static_cast<std::uint64_t>(edge_list_.size())))];
                const int v = rng_.bernoulli(0.5) ? e.first : e.second;
                if (nodes_[static_cast<std::size_t>(v)].kind != NodeKind::Cluster) continue;
                if (rng_.uniform01() < saturation(v)) return v;
            }
        } else if (kind == NodeKind::Normal && !cc_list_.empty()) {
            for (int tries = 0; tries < 512; ++tries) {
                const auto& e = cc_list_[static_cast<std::size_t>(
                    rng_.below(static_cast<std::uint64_t>(cc_list_.size())))];
                const int v = rng_.bernoulli(0.5) ? e.first : e.second;
                if (rng_.uniform01() < saturation(v)) return v;
            }
        }
        // degenerate or badly saturated: fall back to the explicit scan
        double total = 0.0;
        for (int id : cluster_ids_) total += saturation(id) * quantity(id, kind);
        if (total > 0.0) return weighted_pick(cluster_ids_, kind, total);
        int n_open = 0;
        for (int id : cluster_ids_)
            if (saturation(id) > 0.0) ++n_open;
        if (n_open > 0) {
            report.used_uniform_fallback = true;
            ++uniform_fallbacks_;
            auto pick = rng_.below(static_cast<std::uint64_t>(n_open));
            for (int id : cluster_ids_)
                if (saturation(id) > 0.0 && pick-- == 0) return id;
        }
        return forced_target(report);
    }

    int weighted_pick(const std::vector<int>& pool, NodeKind kind, double total) {
        double u = (1.0 - rng_.uniform01()) * total;  // in (0, total]
        int chosen = -1;
        for (int id : pool) {
            const double w = saturation(id) * quantity(id, kind);
            if (w <= 0.0) continue;
            chosen = id;
            u -= w;
            if (u <= 0.0) break;
        }
        return chosen;
    }

    int forced_target(StepReport& report) {
        report.forced_attachment = true;
        ++forced_;
        int best = cluster_ids_.front();
        double best_ratio = 2.0;
        for (int id : cluster_ids_) {
            const auto& s = nodes_[static_cast<std::size_t>(id)];
            const double ratio = static_cast<double>(s.degree) / s.degree_cap;
            if (ratio < best_ratio) {
                best_ratio = ratio;
                best = id;
            }
        }
        return best;
    }

    // One anti-preferential deletion: a uniformly chosen linked head sheds
    // the link whose far end has the least energy, preferring head-side links
    // so ordinary nodes are only cut loose when the victim has nothing else.
    bool delete_attempt(StepReport* report) {
        const std::size_t n = cluster_ids_.size();
        int victim = -1;
        for (int tries = 0; tries < 64 && victim < 0; ++tries) {
            const int cand = cluster_ids_[static_cast<std::size_t>(rng_.below(n))];
            if (nodes_[static_cast<std::size_t>(cand)].degree > 0) victim = cand;
        }
        if (victim < 0) {
            std::vector<int> linked;
            for (int id : cluster_ids_)
                if (nodes_[static_cast<std::size_t>(id)].degree > 0) linked.push_back(id);
            if (linked.empty()) return false;
            victim = linked[static_cast<std::size_t>(
                rng_.below(static_cast<std::uint64_t>(linked.size())))];
        }
        int best_head = -1;
        int best_normal = -1;
        for (int u : adjacency_[static_cast<std::size_t>(victim)]) {
            if (nodes_[static_cast<std::size_t>(u)].kind == NodeKind::Cluster) {
                if (best_head < 0 || lower_energy(u, best_head)) best_head = u;
            } else {
                if (best_normal < 0 || lower_energy(u, best_normal)) best_normal = u;
            }
        }
        if (best_head >= 0) {
            remove_edge(victim, best_head);
        } else {
            remove_edge(victim, best_normal);
            ++orphans_;
            if (report) ++report->orphaned_normals;
        }
        ++deletions_;
        return true;
    }

    bool lower_energy(int a, int b) const {
        const auto& sa = nodes_[static_cast<std::size_t>(a)];
        const auto& sb = nodes_[static_cast<std::size_t>(b)];
        if (sa.energy != sb.energy) return sa.energy < sb.energy;
        return a < b;
    }

    EvolutionParams params_;
    Rng rng_;
    long long time_ = 0;
    std::vector<NodeState> nodes_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<int> cluster_ids_;
    std::vector<int> scratch_perm_;
    std::vector<std::pair<int, int>> edge_list_;
    std::vector<std::pair<int, int>> cc_list_;
    std::unordered_map<std::uint64_t, std::size_t> edge_index_;
    std::unordered_map<std::uint64_t, std::size_t> cc_index_;
    long long additions_ = 0;
    long long deletions_ = 0;
    long long orphans_ = 0;
    long long forced_ = 0;
    long long uniform_fallbacks_ = 0;
    long long newcomer_heads_ = 0;
    long long newcomer_normals_ = 0;
    mutable std::vector<long long> stamp_;
};

// A point-in-time summary of a run, serializable one record per line.
struct Snapshot {
    long long t = 0;
    long long heads = 0;
    long long normals = 0;
    long long edges = 0;
    long long deletions = 0;
    long long orphans = 0;
    double mean_head_degree = 0.0;
    std::vector<std::pair<int, long long>> head_degree_hist;  // (degree, count), ascending
};

inline Snapshot make_snapshot(const EvolvingNetwork& net) {
    Snapshot s;
    s.t = net.time();
    s.heads = static_cast<long long>(net.cluster_ids().size());
    s.normals = net.node_count() - s.heads;
    s.edges = net.edge_count();
    s.deletions = net.deletions();
    s.orphans = net.orphans();
    long long degree_sum = 0;
    for (int id : net.cluster_ids()) degree_sum += net.node(id).degree;
    s.mean_head_degree = s.heads > 0 ? static_cast<double>(degree_sum) / s.heads : 0.0;
    const auto hist = net.degree_histogram(NodeKind::Cluster);
    for (std::size_t k = 0; k < hist.size(); ++k)
        if (hist[k] > 0) s.head_degree_hist.emplace_back(static_cast<int>(k), hist[k]);
    return s;
}

namespace detail {
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}
}  // namespace detail

// Field order: t heads normals edges deletions orphans mean_head_degree
// then degree:count pairs in ascending degree order.
inline std::string snapshot_line(const Snapshot& s) {
    std::string out;
    out += std::to_string(s.t);
    out += ' ';
    out += std::to_string(s.heads);
    out += ' ';
    out += std::to_string(s.normals);
    out += ' ';
    out += std::to_string(s.edges);
    out += ' ';
    out += std::to_string(s.deletions);
    out += ' ';
    out += std::to_string(s.orphans);
    out += ' ';
    detail::append_double(out, s.mean_head_degree);
    for (const auto& [degree, count] : s.head_degree_hist) {
        out += ' ';
        out += std::to_string(degree);
        out += ':';
        out += std::to_string(count);
    }
    return out;
}

inline Snapshot parse_snapshot_line(std::string_view line) {
    Snapshot s;
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    auto skip_space = [&] {
        while (cur != end && *cur == ' ') ++cur;
    };
    auto take_ll = [&](long long& v) {
        skip_space();
        const auto res = std::from_chars(cur, end, v);
        if (res.ec != std::errc{}) throw std::invalid_argument("parse_snapshot_line: bad integer");
        cur = res.ptr;
    };
    take_ll(s.t);
    take_ll(s.heads);
    take_ll(s.normals);
    take_ll(s.edges);
    take_ll(s.deletions);
    take_ll(s.orphans);
    skip_space();
    {
        const auto res = std::from_chars(cur, end, s.mean_head_degree);
        if (res.ec != std::errc{}) throw std::invalid_argument("parse_snapshot_line: bad mean degree");
        cur = res.ptr;
    }
    while (true) {
        skip_space();
        if (cur == end) break;
        int degree = 0;
        long long count = 0;
        auto res = std::from_chars(cur, end, degree);
        if (res.ec != std::errc{} || res.ptr == end || *res.ptr != ':')
            throw std::invalid_argument("parse_snapshot_line: bad histogram entry");
        cur = res.ptr + 1;
        res = std::from_chars(cur, end, count);
        if (res.ec != std::errc{}) throw std::invalid_argument("parse_snapshot_line: bad histogram count");
        cur = res.ptr;
        s.head_degree_hist.emplace_back(degree, count);
    }
    return s;
}

struct RunResult {
    EvolutionParams params;
    long long steps = 0;
    std::vector<Snapshot> snapshots;
    long long additions = 0;
    long long deletions = 0;
    long long orphans = 0;
    long long forced_attachments = 0;
    long long uniform_fallbacks = 0;
    long long newcomer_heads = 0;
    long long newcomer_normals = 0;
};

// Runs `steps` growth events, snapshotting at t = 0, every `snapshot_every`
// steps (when positive), and at the end.  The final state is deep-validated;
// a structural violation throws std::logic_error.
inline RunResult run(const EvolutionParams& params, long long steps, long long snapshot_every) {
    if (steps < 0) throw std::invalid_argument("run: steps must be >= 0");
    EvolvingNetwork net(params);
    RunResult out;
    out.params = params;
    out.steps = steps;
    out.snapshots.push_back(make_snapshot(net));
    for (long long i = 1; i <= steps; ++i) {
        net.step();
        const bool due = snapshot_every > 0 && i % snapshot_every == 0;
        if (due || i == steps) out.snapshots.push_back(make_snapshot(net));
    }
    net.validate_structure(true);
    out.additions = net.additions();
    out.deletions = net.deletions();
    out.orphans = net.orphans();
    out.forced_attachments = net.forced_attachments();
    out.uniform_fallbacks = net.uniform_fallbacks();
    out.newcomer_heads = net.newcomer_heads();
    out.newcomer_normals = net.newcomer_normals();
    return out;
}

}  // namespace wsncluster::evolve

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geo.hpp"
#include "rng.hpp"

// Localized topology-control protocols over a unit-disk deployment.  Each
// builds a reduced structure rooted in (or dominating) the deployment and
// reports which nodes stay awake as cluster heads.
namespace wsncluster::geoproto {

enum class Protocol { SimpleTree, A3, CdsRuleK };

inline const char* protocol_tag(Protocol p) {
    switch (p) {
        case Protocol::SimpleTree: return "simple-tree";
        case Protocol::A3: return "a3";
        case Protocol::CdsRuleK: return "cds-rule-k";
    }
    return "unknown";
}

inline Protocol protocol_from_tag(std::string_view tag) {
    if (tag == "simple-tree") return Protocol::SimpleTree;
    if (tag == "a3") return Protocol::A3;
    if (tag == "cds-rule-k") return Protocol::CdsRuleK;
    throw std::invalid_argument("unknown protocol tag: " + std::string(tag));
}

struct TopologyResult {
    Protocol protocol = Protocol::SimpleTree;
    std::vector<int> active;                        // awake nodes, ascending id
    std::vector<int> parent;                        // tree parent per node, -1 if none
    std::vector<std::pair<int, int>> retained_edges;  // links kept by the protocol, a < b
    std::vector<int> unreached;                     // nodes the construction never saw
    std::vector<std::string> diagnostics;
};

inline std::size_t head_count(const TopologyResult& r) { return r.active.size(); }

// Mean deployment degree over the elected heads: how many radio neighbors an
// awake node actually has.
inline double avg_neighbor_count(const GeoNetwork& net, const TopologyResult& r) {
    if (r.active.empty())
        throw std::domain_error("avg_neighbor_count: no active nodes");
    long long total = 0;
    for (int v : r.active) total += net.degree(v);
    return static_cast<double>(total) / static_cast<double>(r.active.size());
}

namespace detail {
inline void check_sink(const GeoNetwork& net, int sink, const char* who) {
    if (sink < 0 || sink >= net.size())
        throw std::invalid_argument(std::string(who) + ": sink id out of range");
}

inline void sort_edges(std::vector<std::pair<int, int>>& edges) {
    for (auto& e : edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
}

// battery level first, id as the tie break
inline bool higher_priority(const GeoNetwork& net, int a, int b) {
    const double ea = net.node(a).energy;
    const double eb = net.node(b).energy;
    if (ea != eb) return ea > eb;
    return a > b;
}
}  // namespace detail

// Broadcast tree: breadth-first flood from the sink with the neighbor visit
// order shuffled per node, so repeated trials explore different valid trees.
// Nodes that relayed the broadcast (gained a child) stay awake.
inline TopologyResult simple_tree(const GeoNetwork& net, int sink, std::uint64_t seed) {
    detail::check_sink(net, sink, "simple_tree");
    Rng rng(seed);
    TopologyResult result;
    result.protocol = Protocol::SimpleTree;
    result.parent.assign(static_cast<std::size_t>(net.size()), -1);

    std::vector<char> visited(static_cast<std::size_t>(net.size()), 0);
    std::vector<int> children(static_cast<std::size_t>(net.size()), 0);
    std::queue<int> frontier;
    visited[static_cast<std::size_t>(sink)] = 1;
    frontier.push(sink);
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        std::vector<int> order = net.neighbors(v);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
        for (int u : order) {
            if (visited[static_cast<std::size_t>(u)]) continue;
            visited[static_cast<std::size_t>(u)] = 1;
            result.parent[static_cast<std::size_t>(u)] = v;
            ++children[static_cast<std::size_t>(v)];
            result.retained_edges.emplace_back(v, u);
            frontier.push(u);
        }
    }
    for (int v = 0; v < net.size(); ++v) {
        if (!visited[static_cast<std::size_t>(v)])
            result.unreached.push_back(v);
        else if (children[static_cast<std::size_t>(v)] > 0)
            result.active.push_back(v);
    }
    detail::sort_edges(result.retained_edges);
    if (net.degree(sink) == 0)
        result.diagnostics.push_back("sink has no neighbors; broadcast reaches nothing");
    if (!result.unreached.empty())
        result.diagnostics.push_back(std::to_string(result.unreached.size()) +
                                     " node(s) outside the sink's component");
    return result;
}

// Wave-based tree with explicit sleep decisions.  Each newly active node
// ranks its undecided neighbors (battery first, then distance, then id) and
// walks them greedily: a candidate adjacent to a sibling activated in the
// same round goes to sleep, as does one that would claim nobody new; the
// rest activate and continue the wave.  A sleeping node can later be
// promoted back to active when a region turns out to be reachable only
// through it, so on a connected deployment the awake set always dominates.
// The `seed` is accepted for interface symmetry; the construction itself is
// deterministic.
inline TopologyResult a3(const GeoNetwork& net, int sink, std::uint64_t /*seed*/) {
    detail::check_sink(net, sink, "a3");
    TopologyResult result;
    result.protocol = Protocol::A3;
    result.parent.assign(static_cast<std::size_t>(net.size()), -1);

    enum : char { Undecided = 0, Active = 1, Sleep = 2 };
    std::vector<char> state(static_cast<std::size_t>(net.size()), Undecided);
    std::vector<char> covered(static_cast<std::size_t>(net.size()), 0);  // adjacent to an active node
    auto mark_active = [&](int v) {
        state[static_cast<std::size_t>(v)] = Active;
        covered[static_cast<std::size_t>(v)] = 1;
        for (int u : net.neighbors(v)) covered[static_cast<std::size_t>(u)] = 1;
    };

    std::queue<int> wave;
    std::vector<int> activated_round;
    int promotions = 0;
    mark_active(sink);
    wave.push(sink);
    while (true) {
        while (!wave.empty()) {
            const int u = wave.front();
            wave.pop();
            std::vector<int> candidates;
            for (int v : net.neighbors(u))
                if (state[static_cast<std::size_t>(v)] == Undecided) candidates.push_back(v);
            std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
                const double ea = net.node(a).energy;
                const double eb = net.node(b).energy;
                if (ea != eb) return ea > eb;
                const double da = net.distance(u, a);
                const double db = net.distance(u, b);
                if (da != db) return da > db;
                return a < b;
            });
            activated_round.clear();
            for (int v : candidates) {
                result.parent[static_cast<std::size_t>(v)] = u;
                result.retained_edges.emplace_back(u, v);
                bool sibling_covered = false;
                for (int w : activated_round)
                    if (net.adjacent(v, w)) {
                        sibling_covered = true;
                        break;
                    }
                bool claims_new = false;
                if (!sibling_covered) {
                    for (int w : net.neighbors(v)) {
                        if (state[static_cast<std::size_t>(w)] == Undecided &&
                            !covered[static_cast<std::size_t>(w)]) {
                            claims_new = true;
                            break;
                        }
                    }
                }
                if (!sibling_covered && claims_new) {
                    mark_active(v);
                    activated_round.push_back(v);
                    wave.push(v);
                } else {
                    state[static_cast<std::size_t>(v)] = Sleep;
                }
            }
        }
        // Promotion pass: an undecided node at this point can only hang off
        // sleeping nodes.  Wake the best-placed sleeper and keep going.
        int chosen = -1;
        for (int s = 0; s < net.size(); ++s) {
            if (state[static_cast<std::size_t>(s)] != Sleep) continue;
            bool frontier = false;
            for (int w : net.neighbors(s))
                if (state[static_cast<std::size_t>(w)] == Undecided) {
                    frontier = true;
                    break;
                }
            if (frontier && (chosen < 0 || detail::higher_priority(net, s, chosen))) chosen = s;
        }
        if (chosen < 0) break;
        mark_active(chosen);
        wave.push(chosen);
        ++promotions;
    }
    for (int v = 0; v < net.size(); ++v) {
        if (state[static_cast<std::size_t>(v)] == Active)
            result.active.push_back(v);
        else if (state[static_cast<std::size_t>(v)] == Undecided)
            result.unreached.push_back(v);
    }
    detail::sort_edges(result.retained_edges);
    if (net.degree(sink) == 0)
        result.diagnostics.push_back("sink has no neighbors; it forms the whole backbone");
    if (promotions > 0)
        result.diagnostics.push_back(std::to_string(promotions) +
                                     " sleeping node(s) promoted to keep coverage");
    if (!result.unreached.empty())
        result.diagnostics.push_back(std::to_string(result.unreached.size()) +
                                     " node(s) outside the sink's component");
    return result;
}

namespace detail {
// Connectivity of a (small) candidate covering set.
inline bool connected_subset(const GeoNetwork& net, const std::vector<int>& subset) {
    if (subset.size() <= 1) return true;
    std::vector<char> seen(subset.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < subset.size(); ++j) {
            if (!seen[j] && net.adjacent(subset[i], subset[j])) {
                seen[j] = 1;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    return reached == subset.size();
}

// True when every neighbor of v lies in T or next to a member of T.
inline bool covers_neighborhood(const GeoNetwork& net, int v, const std::vector<int>& T,
                                std::vector<int>& stamp, int epoch) {
    for (int t : T) {
        stamp[static_cast<std::size_t>(t)] = epoch;
        for (int w : net.neighbors(t)) stamp[static_cast<std::size_t>(w)] = epoch;
    }
    for (int w : net.neighbors(v))
        if (stamp[static_cast<std::size_t>(w)] != epoch) return false;
    return true;
}
}  // namespace detail

// Connected-dominating-set election.  Marking: a node with two neighbors
// that cannot hear each other volunteers.  Pruning: in ascending battery
// priority, a volunteer withdraws when a connected set of higher-priority
// marked neighbors already reaches its whole neighborhood; coverage_limit
// bounds that set's size (0 = unbounded).  `on_unmark` observes each
// withdrawal with the marking state right after it.
inline TopologyResult cds_rule_k(
    const GeoNetwork& net, int coverage_limit = 0,
    const std::function<void(int, const std::vector<char>&)>& on_unmark = {}) {
    if (coverage_limit < 0)
        throw std::invalid_argument("cds_rule_k: coverage_limit must be >= 0");
    if (net.size() == 0) throw std::invalid_argument("cds_rule_k: empty deployment");
    TopologyResult result;
    result.protocol = Protocol::CdsRuleK;
    result.parent.assign(static_cast<std::size_t>(net.size()), -1);

    std::vector<char> marked(static_cast<std::size_t>(net.size()), 0);
    for (int v = 0; v < net.size(); ++v) {
        const auto& nb = net.neighbors(v);
        bool volunteer = false;
        for (std::size_t i = 0; i < nb.size() && !volunteer; ++i)
            for (std::size_t j = i + 1; j < nb.size() && !volunteer; ++j)
                if (!net.adjacent(nb[i], nb[j])) volunteer = true;
        marked[static_cast<std::size_t>(v)] = volunteer ? 1 : 0;
    }

    bool any_marked = std::any_of(marked.begin(), marked.end(), [](char m) { return m != 0; });
    if (!any_marked) {
        // nothing qualifies (clique-like or tiny deployment): highest battery leads
        int head = 0;
        for (int v = 1; v < net.size(); ++v)
            if (detail::higher_priority(net, v, head)) head = v;
        marked[static_cast<std::size_t>(head)] = 1;
        result.diagnostics.push_back("no volunteer under the two-neighbor rule; "
                                     "highest-battery node elected");
    } else {
        std::vector<int> order;
        for (int v = 0; v < net.size(); ++v)
            if (marked[static_cast<std::size_t>(v)]) order.push_back(v);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return detail::higher_priority(net, b, a); });

        std::vector<int> stamp(static_cast<std::size_t>(net.size()), -1);
        int epoch = 0;
        for (int v : order) {
            // higher-priority marked neighbors, as the pruning rule sees them now
            std::vector<int> pool;
            for (int u : net.neighbors(v))
                if (marked[static_cast<std::size_t>(u)] && detail::higher_priority(net, u, v))
                    pool.push_back(u);
            if (pool.empty()) continue;

            bool withdraw = false;
            if (coverage_limit == 0) {
                // connected components of the pool, each tried as the covering set
                std::vector<char> seen(pool.size(), 0);
                for (std::size_t i = 0; i < pool.size() && !withdraw; ++i) {
                    if (seen[i]) continue;
                    std::vector<int> component{pool[i]};
                    seen[i] = 1;
                    for (std::size_t head = 0; head < component.size(); ++head) {
                        for (std::size_t j = 0; j < pool.size(); ++j) {
                            if (!seen[j] && net.adjacent(component[head], pool[j])) {
                                seen[j] = 1;
                                component.push_back(pool[j]);
                            }
                        }
                    }
                    withdraw = detail::covers_neighborhood(net, v, component, stamp, ++epoch);
                }
            } else {
                // every pool subset up to the configured size, kept when it
                // is connected and covers; a combination budget guards
                // against dense pools (running out keeps v marked, which is
                // always safe)
                const int limit = std::min<int>(coverage_limit, static_cast<int>(pool.size()));
                long long budget = 200000;
                std::vector<int> subset;
                for (int size = 1; size <= limit && !withdraw && budget > 0; ++size) {
                    std::vector<int> idx(static_cast<std::size_t>(size));
                    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
                    while (budget-- > 0) {
                        subset.clear();
                        for (int i : idx) subset.push_back(pool[static_cast<std::size_t>(i)]);
                        if (detail::connected_subset(net, subset) &&
                            detail::covers_neighborhood(net, v, subset, stamp, ++epoch)) {
                            withdraw = true;
                            break;
                        }
                        int i = size - 1;
                        while (i >= 0 &&
                               idx[static_cast<std::size_t>(i)] ==
                                   static_cast<int>(pool.size()) - size + i)
                            --i;
                        if (i < 0) break;
                        ++idx[static_cast<std::size_t>(i)];
                        for (int j = i + 1; j < size; ++j)
                            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
                    }
                }
            }
            if (withdraw) {
                marked[static_cast<std::size_t>(v)] = 0;
                if (on_unmark) on_unmark(v, marked);
            }
        }
    }

    for (int v = 0; v < net.size(); ++v)
        if (marked[static_cast<std::size_t>(v)]) result.active.push_back(v);
    for (std::size_t i = 0; i < result.active.size(); ++i)
        for (std::size_t j = i + 1; j < result.active.size(); ++j)
            if (net.adjacent(result.active[i], result.active[j]))
                result.retained_edges.emplace_back(result.active[i], result.active[j]);
    detail::sort_edges(result.retained_edges);
    return result;
}

inline TopologyResult run_protocol(const GeoNetwork& net, Protocol protocol, int sink,
                                   std::uint64_t seed, int coverage_limit = 0) {
    switch (protocol) {
        case Protocol::SimpleTree: return simple_tree(net, sink, seed);
        case Protocol::A3: return a3(net, sink, seed);
        case Protocol::CdsRuleK: return cds_rule_k(net, coverage_limit);
    }
    throw std::invalid_argument("run_protocol: unknown protocol");
}

}  // namespace wsncluster::geoproto

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rng.hpp"

// Unit-disk deployments: nodes scattered in a rectangle, linked whenever
// they sit within radio range, each carrying a battery level in [0.5, 1].
namespace wsncluster::geoproto {

struct GeoNode {
    int id;
    double x;
    double y;
    double energy;
};

class GeoNetwork {
public:
    GeoNetwork(std::vector<GeoNode> nodes, double width, double height, double radius)
        : nodes_(std::move(nodes)), width_(width), height_(height), radius_(radius) {
        if (!(width_ > 0.0) || !(height_ > 0.0)) throw std::invalid_argument("GeoNetwork: area must be positive");
        if (!(radius_ > 0.0)) throw std::invalid_argument("GeoNetwork: radius must be positive");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const auto& n = nodes_[i];
            if (n.id != static_cast<int>(i)) throw std::invalid_argument("GeoNetwork: ids must be 0..N-1 in order");
            if (!(n.x >= 0.0 && n.x <= width_ && n.y >= 0.0 && n.y <= height_))
                throw std::invalid_argument("GeoNetwork: node outside the area");
            if (!(n.energy > 0.0)) throw std::invalid_argument("GeoNetwork: energy must be positive");
        }
        build_adjacency();
    }

    int size() const { return static_cast<int>(nodes_.size()); }
    const GeoNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const std::vector<GeoNode>& nodes() const { return nodes_; }
    const std::vector<int>& neighbors(int id) const { return adjacency_.at(static_cast<std::size_t>(id)); }
    int degree(int id) const { return static_cast<int>(neighbors(id).size()); }
    double width() const { return width_; }
    double height() const { return height_; }
    double radius() const { return radius_; }

    bool adjacent(int a, int b) const {
        for (int u : neighbors(a))
            if (u == b) return true;
        return false;
    }

    double distance(int a, int b) const {
        const auto& na = node(a);
        const auto& nb = node(b);
        return std::hypot(na.x - nb.x, na.y - nb.y);
    }

    long long edge_count() const {
        long long twice = 0;
        for (const auto& adj : adjacency_) twice += static_cast<long long>(adj.size());
        return twice / 2;
    }

    bool connected() const {
        if (nodes_.empty()) return true;
        std::vector<char> seen(nodes_.size(), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int u : adjacency_[static_cast<std::size_t>(v)]) {
                if (!seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    ++reached;
                    q.push(u);
                }
            }
        }
        return reached == size();
    }

    // Node closest to the middle of the rectangle (ties to the lowest id):
    // the conventional sink placement for protocol runs.
    int nearest_to_center() const {
        if (nodes_.empty()) throw std::logic_error("GeoNetwork: empty deployment has no sink");
        const double cx = width_ / 2.0;
        const double cy = height_ / 2.0;
        int best = 0;
        double best_d = std::hypot(nodes_[0].x - cx, nodes_[0].y - cy);
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            const double d = std::hypot(nodes_[i].x - cx, nodes_[i].y - cy);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    }

    // Text form.  Line 1: N width height radius.  Then N lines of
    // "id x y energy" in id order, then one "u v" line per link with u < v,
    // sorted.  Numbers use shortest round-trip formatting, so save/load/save
    // is byte-identical.
    std::string to_text() const {
        std::string out;
        out += std::to_string(size());
        out += ' ';
        append_double(out, width_);
        out += ' ';
        append_double(out, height_);
        out += ' ';
        append_double(out, radius_);
        out += '\n';
        for (const auto& n : nodes_) {
            out += std::to_string(n.id);
            out += ' ';
            append_double(out, n.x);
            out += ' ';
            append_double(out, n.y);
            out += ' ';
            append_double(out, n.energy);
            out += '\n';
        }
        for (int a = 0; a < size(); ++a) {
            for (int b : neighbors(a)) {
                if (b <= a) continue;
                out += std::to_string(a);
                out += ' ';
                out += std::to_string(b);
                out += '\n';
            }
        }
        return out;
    }

    static GeoNetwork from_text(std::string_view text) {
        Cursor cur{text.data(), text.data() + text.size()};
        const int n = static_cast<int>(cur.take_int("node count"));
        if (n < 0) throw std::invalid_argument("GeoNetwork: negative node count");
        const double width = cur.take_double("width");
        const double height = cur.take_double("height");
        const double radius = cur.take_double("radius");
        std::vector<GeoNode> nodes;
        nodes.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            GeoNode g;
            g.id = static_cast<int>(cur.take_int("node id"));
            g.x = cur.take_double("x");
            g.y = cur.take_double("y");
            g.energy = cur.take_double("energy");
            nodes.push_back(g);
        }
        GeoNetwork net(std::move(nodes), width, height, radius);
        // the listed links must match what the geometry dictates
        long long listed = 0;
        while (cur.more()) {
            const int a = static_cast<int>(cur.take_int("link endpoint"));
            const int b = static_cast<int>(cur.take_int("link endpoint"));
            if (a < 0 || b < 0 || a >= n || b >= n || !net.adjacent(a, b))
                throw std::invalid_argument("GeoNetwork: listed link absent from the geometry");
            ++listed;
        }
        if (listed != net.edge_count())
            throw std::invalid_argument("GeoNetwork: link list does not cover the geometry");
        return net;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("GeoNetwork: cannot open " + path + " for writing");
        const std::string text = to_text();
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw std::runtime_error("GeoNetwork: write failed for " + path);
    }

    static GeoNetwork load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("GeoNetwork: cannot open " + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return from_text(text);
    }

private:
    struct Cursor {
        const char* cur;
        const char* end;
        void skip_ws() {
            while (cur != end && (*cur == ' ' || *cur == '\n' || *cur == '\r' || *cur == '\t')) ++cur;
        }
        bool more() {
            skip_ws();
            return cur != end;
        }
        long long take_int(const char* what) {
            skip_ws();
            long long v = 0;
            const auto res = std::from_chars(cur, end, v);
            if (res.ec != std::errc{})
                throw std::invalid_argument(std::string("GeoNetwork: bad ") + what);
            cur = res.ptr;
            return v;
        }
        double take_double(const char* what) {
            skip_ws();
            double v = 0.0;
            const auto res = std::from_chars(cur, end, v);
            if (res.ec != std::errc{})
                throw std::invalid_argument(std::string("GeoNetwork: bad ") + what);
            cur = res.ptr;
            return v;
        }
    };

    static void append_double(std::string& out, double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.append(buf, res.ptr);
    }

    void build_adjacency() {
        adjacency_.assign(nodes_.size(), {});
        const double r2 = radius_ * radius_;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
                const double dx = nodes_[i].x - nodes_[j].x;
                const double dy = nodes_[i].y - nodes_[j].y;
                if (dx * dx + dy * dy <= r2) {
                    adjacency_[i].push_back(static_cast<int>(j));
                    adjacency_[j].push_back(static_cast<int>(i));
                }
            }
        }
    }

    std::vector<GeoNode> nodes_;
    double width_;
    double height_;
    double radius_;
    std::vector<std::vector<int>> adjacency_;
};

// Uniform random deployment: positions i.i.d. over the rectangle, battery
// levels i.i.d. in [0.5, 1].
inline GeoNetwork generate_rgg(int n, double width, double height, double radius,
                               std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_rgg: need at least one node");
    Rng rng(seed);
    std::vector<GeoNode> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        GeoNode g;
        g.id = i;
        g.x = rng.uniform(0.0, width);
        g.y = rng.uniform(0.0, height);
        g.energy = rng.uniform(0.5, 1.0);
        nodes.push_back(g);
    }
    return GeoNetwork(std::move(nodes), width, height, radius);
}

}  // namespace wsncluster::geoproto

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "causent/errors.hpp"

namespace causent {

enum class Slice { Past, Present };
enum class Mark { Tail, Arrow, Circle };

inline const char* to_string(Slice s) { return s == Slice::Past ? "past" : "present"; }
inline const char* to_string(Mark m) {
    switch (m) {
        case Mark::Tail: return "tail";
        case Mark::Arrow: return "arrow";
        default: return "circle";
    }
}

// One of the 2d vertices of an extended summary graph: a series index plus
// the slice it lives in. X^p_{t-} is (p, Past), X^p_t is (p, Present).
struct SliceNode {
    int series = 0;
    Slice slice = Slice::Present;

    bool is_past() const { return slice == Slice::Past; }
    friend bool operator==(const SliceNode&, const SliceNode&) = default;
    friend auto operator<=>(const SliceNode& a, const SliceNode& b) {
        if (auto c = a.series <=> b.series; c != 0) return c;
        return static_cast<int>(a.slice) <=> static_cast<int>(b.slice);
    }
};

inline SliceNode past(int series) { return {series, Slice::Past}; }
inline SliceNode present(int series) { return {series, Slice::Present}; }

// A conditioning-set member: series plus the slice tag that selects the
// embedding (full past window vs present instant).
using Conditioner = std::pair<int, Slice>;

inline SliceNode to_node(const Conditioner& c) { return {c.first, c.second}; }
inline Conditioner to_conditioner(const SliceNode& n) { return {n.series, n.slice}; }

// Two-slice causal graph over d series. Edge identity is an unordered node
// pair; direction lives only in the endpoint marks, so the same structure
// serves as skeleton, CPDAG and PAG.
//
// Structural invariants enforced on every mutation:
//   - no Past-Past edges,
//   - no Arrow mark at a Past endpoint,
//   - Present-Present edges only between distinct series.
class ExtendedSummaryGraph {
public:
    struct Edge {
        SliceNode a, b;
        Mark mark_a, mark_b;
    };

    ExtendedSummaryGraph() = default;

    explicit ExtendedSummaryGraph(int d, std::vector<std::string> names = {})
        : d_(d), names_(std::move(names)) {
        if (d < 1) throw InvalidArgumentError("graph: series count must be >= 1");
        if (names_.empty()) {
            for (int i = 0; i < d; ++i) names_.push_back("X" + std::to_string(i + 1));
        }
        if (static_cast<int>(names_.size()) != d)
            throw InvalidArgumentError("graph: names size must equal d");
    }

    // The fully connected starting graph of skeleton construction: every past
    // node linked to every present node with (Tail, Circle), every present
    // pair linked with (Circle, Circle).
    static ExtendedSummaryGraph full(int d, std::vector<std::string> names = {}) {
        ExtendedSummaryGraph g(d, std::move(names));
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
                g.add_edge(past(p), present(q), Mark::Tail, Mark::Circle);
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q)
                g.add_edge(present(p), present(q), Mark::Circle, Mark::Circle);
        return g;
    }

    int num_series() const { return d_; }
    const std::vector<std::string>& series_names() const { return names_; }
    const std::string& series_name(int i) const { return names_.at(i); }

    std::size_t edge_count() const { return edges_.size(); }

    bool adjacent(SliceNode a, SliceNode b) const { return edges_.count(key(a, b)) > 0; }

    // Marks as stored for the ordered request (first mark belongs to `a`).
    std::optional<std::pair<Mark, Mark>> marks(SliceNode a, SliceNode b) const {
        auto it = edges_.find(key(a, b));
        if (it == edges_.end()) return std::nullopt;
        if (key(a, b).first == id(a)) return it->second;
        return std::make_pair(it->second.second, it->second.first);
    }

    Mark mark_at(SliceNode node, SliceNode other) const {
        auto m = marks(node, other);
        if (!m) throw MissingEdgeError("graph: no edge " + label(node) + " -- " + label(other));
        return m->first;
    }

    void add_edge(SliceNode a, SliceNode b, Mark mark_a, Mark mark_b) {
        validate_nodes(a, b);
        validate_marks(a, b, mark_a, mark_b);
        auto k = key(a, b);
        if (edges_.count(k)) throw InvalidArgumentError("graph: duplicate edge");
        edges_[k] = oriented(a, b, mark_a, mark_b);
    }

    void set_marks(SliceNode a, SliceNode b, Mark mark_a, Mark mark_b) {
        auto it = edges_.find(key(a, b));
        if (it == edges_.end())
            throw MissingEdgeError("graph: no edge " + label(a) + " -- " + label(b));
        validate_marks(a, b, mark_a, mark_b);
        it->second = oriented(a, b, mark_a, mark_b);
    }

    void set_mark_at(SliceNode node, SliceNode other, Mark m) {
        auto cur = marks(node, other);
        if (!cur) throw MissingEdgeError("graph: no edge " + label(node) + " -- " + label(other));
        set_marks(node, other, m, cur->second);
    }

    void remove_edge(SliceNode a, SliceNode b) {
        if (edges_.erase(key(a, b)) == 0)
            throw MissingEdgeError("graph: no edge " + label(a) + " -- " + label(b));
    }

    std::vector<SliceNode> nodes() const {
        std::vector<SliceNode> out;
        for (int i = 0; i < d_; ++i) {
            out.push_back(past(i));
            out.push_back(present(i));
        }
        return out;
    }

    std::vector<SliceNode> neighbors(SliceNode n) const {
        std::vector<SliceNode> out;
        for (const auto& [k, m] : edges_) {
            if (k.first == id(n)) out.push_back(node(k.second));
            else if (k.second == id(n)) out.push_back(node(k.first));
        }
        return out;
    }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edges_.size());
        for (const auto& [k, m] : edges_)
            out.push_back({node(k.first), node(k.second), m.first, m.second});
        return out;
    }

    // True when `from` has a Tail here and an Arrow at `to`.
    bool is_directed(SliceNode from, SliceNode to) const {
        auto m = marks(from, to);
        return m && m->first == Mark::Tail && m->second == Mark::Arrow;
    }

    bool has_arrow_at(SliceNode node, SliceNode other) const {
        auto m = marks(node, other);
        return m && m->first == Mark::Arrow;
    }

    // Reachability over fully directed (Tail -> Arrow) edges.
    bool has_directed_path(SliceNode from, SliceNode to) const {
        std::vector<SliceNode> stack{from};
        std::set<SliceNode> seen{from};
        while (!stack.empty()) {
            SliceNode cur = stack.back();
            stack.pop_back();
            for (SliceNode nb : neighbors(cur)) {
                if (!is_directed(cur, nb) || seen.count(nb)) continue;
                if (nb == to) return true;
                seen.insert(nb);
                stack.push_back(nb);
            }
        }
        return false;
    }

    bool directed_subgraph_acyclic() const {
        for (SliceNode n : nodes())
            if (has_directed_cycle_from(n)) return false;
        return true;
    }

    friend bool operator==(const ExtendedSummaryGraph& x, const ExtendedSummaryGraph& y) {
        return x.d_ == y.d_ && x.edges_ == y.edges_;
    }

    std::string label(SliceNode n) const {
        return names_.at(n.series) + (n.is_past() ? "_past" : "");
    }

private:
    static int id(SliceNode n) { return n.series * 2 + (n.slice == Slice::Present ? 1 : 0); }
    static SliceNode node(int id) {
        return {id / 2, (id % 2) ? Slice::Present : Slice::Past};
    }
    static std::pair<int, int> key(SliceNode a, SliceNode b) {
        return std::minmax(id(a), id(b));
    }

    void validate_nodes(SliceNode a, SliceNode b) const {
        for (SliceNode n : {a, b})
            if (n.series < 0 || n.series >= d_)
                throw InvalidArgumentError("graph: series index out of range");
        if (a.is_past() && b.is_past())
            throw InvariantViolationError("graph: Past-Past edges are not allowed");
        if (a == b) throw InvalidArgumentError("graph: self edge on a single node");
        if (!a.is_past() && !b.is_past() && a.series == b.series)
            throw InvalidArgumentError("graph: instantaneous edge requires distinct series");
    }

    void validate_marks(SliceNode a, SliceNode b, Mark mark_a, Mark mark_b) const {
        if ((a.is_past() && mark_a == Mark::Arrow) || (b.is_past() && mark_b == Mark::Arrow))
            throw InvariantViolationError("graph: arrowhead at a Past node");
    }

    // Store marks in canonical (lower id first) order.
    std::pair<Mark, Mark> oriented(SliceNode a, SliceNode b, Mark ma, Mark mb) const {
        if (key(a, b).first == id(a)) return {ma, mb};
        return {mb, ma};
    }

    bool has_directed_cycle_from(SliceNode start) const {
        std::vector<SliceNode> stack{start};
        std::set<SliceNode> seen;
        while (!stack.empty()) {
            SliceNode cur = stack.back();
            stack.pop_back();
            for (SliceNode nb : neighbors(cur)) {
                if (!is_directed(cur, nb)) continue;
                if (nb == start) return true;
                if (seen.insert(nb).second) stack.push_back(nb);
            }
        }
        return false;
    }

    int d_ = 0;
    std::vector<std::string> names_;
    std::map<std::pair<int, int>, std::pair<Mark, Mark>> edges_;
};

// Conditioning sets that certified edge removals, split by edge kind.
// Lagged entries are keyed (cause series, effect series); instantaneous
// entries by the unordered pair.
struct SepsetTable {
    std::map<std::pair<int, int>, std::vector<Conditioner>> lagged;
    std::map<std::pair<int, int>, std::vector<Conditioner>> instantaneous;

    static std::pair<int, int> inst_key(int p, int q) { return std::minmax(p, q); }

    void set_lagged(int cause, int effect, std::vector<Conditioner> s) {
        std::sort(s.begin(), s.end());
        lagged[{cause, effect}] = std::move(s);
    }
    void set_instantaneous(int p, int q, std::vector<Conditioner> s) {
        std::sort(s.begin(), s.end());
        instantaneous[inst_key(p, q)] = std::move(s);
    }

    const std::vector<Conditioner>* find_lagged(int cause, int effect) const {
        auto it = lagged.find({cause, effect});
        return it == lagged.end() ? nullptr : &it->second;
    }
    const std::vector<Conditioner>* find_instantaneous(int p, int q) const {
        auto it = instantaneous.find(inst_key(p, q));
        return it == instantaneous.end() ? nullptr : &it->second;
    }

    static bool contains(const std::vector<Conditioner>& s, const Conditioner& c) {
        return std::binary_search(s.begin(), s.end(), c);
    }
};

// One node per series; time information conflated. Cross edges keep the
// endpoint-mark vocabulary; self loops record discovered self causes.
struct SummaryGraph {
    int d = 0;
    std::vector<std::string> names;
    std::map<std::pair<int, int>, std::pair<Mark, Mark>> edges;  // key: (lo, hi) series
    std::set<int> self_loops;

    friend bool operator==(const SummaryGraph&, const SummaryGraph&) = default;
};

namespace detail {
// When a lagged and an instantaneous edge collapse onto the same series pair
// with different marks, the more informative mark wins at each endpoint.
inline Mark stronger(Mark a, Mark b) {
    auto rank = [](Mark m) { return m == Mark::Arrow ? 2 : (m == Mark::Tail ? 1 : 0); };
    return rank(a) >= rank(b) ? a : b;
}
}  // namespace detail

inline SummaryGraph collapse_to_summary(const ExtendedSummaryGraph& g) {
    SummaryGraph s;
    s.d = g.num_series();
    s.names = g.series_names();
    for (const auto& e : g.edges()) {
        if (e.a.is_past() && e.a.series == e.b.series) {
            s.self_loops.insert(e.a.series);
            continue;
        }
        auto key = std::minmax(e.a.series, e.b.series);
        Mark m_lo = e.a.series == key.first ? e.mark_a : e.mark_b;
        Mark m_hi = e.a.series == key.first ? e.mark_b : e.mark_a;
        auto it = s.edges.find(key);
        if (it == s.edges.end()) {
            s.edges[key] = {m_lo, m_hi};
        } else {
            it->second.first = detail::stronger(it->second.first, m_lo);
            it->second.second = detail::stronger(it->second.second, m_hi);
        }
    }
    return s;
}

}  // namespace causent

#pragma once

// Test-only reference implementations, deliberately independent of the
// library's estimation path: a histogram plug-in (C)MI for discrete data, a
// brute-force d-separation checker over explicit path enumeration, and a
// brute-force CPDAG builder that enumerates Markov-equivalent orientations.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "causent/graph.hpp"

namespace testsupport {

// Plug-in mutual information of integer-valued columns: I(x; y) with the
// empirical joint distribution, in nats.
inline double plugin_mi(const std::vector<std::vector<int>>& xcols,
                        const std::vector<std::vector<int>>& ycols) {
    std::size_t n = xcols.empty() ? ycols.front().size() : xcols.front().size();
    std::map<std::vector<int>, double> px, py, pxy;
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<int> xv, yv;
        for (const auto& c : xcols) xv.push_back(c[r]);
        for (const auto& c : ycols) yv.push_back(c[r]);
        std::vector<int> xy = xv;
        xy.insert(xy.end(), yv.begin(), yv.end());
        px[xv] += 1.0;
        py[yv] += 1.0;
        pxy[xy] += 1.0;
    }
    double mi = 0.0;
    for (const auto& [xy, cnt] : pxy) {
        std::vector<int> xv(xy.begin(), xy.end() - ycols.size());
        std::vector<int> yv(xy.end() - ycols.size(), xy.end());
        double pj = cnt / n, pa = px[xv] / n, pb = py[yv] / n;
        mi += pj * std::log(pj / (pa * pb));
    }
    return mi;
}

// Plug-in conditional mutual information I(x; y | z).
inline double plugin_cmi(const std::vector<std::vector<int>>& xcols,
                         const std::vector<std::vector<int>>& ycols,
                         const std::vector<std::vector<int>>& zcols) {
    if (zcols.empty()) return plugin_mi(xcols, ycols);
    std::size_t n = xcols.front().size();
    std::map<std::vector<int>, double> pz, pxz, pyz, pxyz;
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<int> xv, yv, zv;
        for (const auto& c : xcols) xv.push_back(c[r]);
        for (const auto& c : ycols) yv.push_back(c[r]);
        for (const auto& c : zcols) zv.push_back(c[r]);
        auto xz = xv;
        xz.insert(xz.end(), zv.begin(), zv.end());
        auto yz = yv;
        yz.insert(yz.end(), zv.begin(), zv.end());
        auto xyz = xv;
        xyz.insert(xyz.end(), yv.begin(), yv.end());
        xyz.insert(xyz.end(), zv.begin(), zv.end());
        pz[zv] += 1.0;
        pxz[xz] += 1.0;
        pyz[yz] += 1.0;
        pxyz[xyz] += 1.0;
    }
    double cmi = 0.0;
    for (const auto& [xyz, cnt] : pxyz) {
        std::vector<int> xv(xyz.begin(), xyz.begin() + xcols.size());
        std::vector<int> yv(xyz.begin() + xcols.size(),
                            xyz.begin() + xcols.size() + ycols.size());
        std::vector<int> zv(xyz.begin() + xcols.size() + ycols.size(), xyz.end());
        auto xz = xv;
        xz.insert(xz.end(), zv.begin(), zv.end());
        auto yz = yv;
        yz.insert(yz.end(), zv.begin(), zv.end());
        double pj = cnt / n;
        cmi += pj * std::log((cnt * pz[zv]) / (pxz[xz] * pyz[yz]));
    }
    return cmi;
}

// Brute-force d-separation by explicit path enumeration: a path is active
// given Z when every non-collider on it is outside Z and every collider has
// a descendant in Z (itself included).
class BruteForceDsep {
public:
    explicit BruteForceDsep(const causent::ExtendedSummaryGraph& dag) {
        using causent::Mark;
        n_ = 2 * dag.num_series();
        adj_.resize(n_);
        for (const auto& e : dag.edges()) {
            int a = id(e.a), b = id(e.b);
            bool a_to_b = e.mark_a == Mark::Tail && e.mark_b == Mark::Arrow;
            adj_[a].push_back({b, a_to_b});
            adj_[b].push_back({a, !a_to_b});
        }
    }

    bool dsep(causent::SliceNode a, causent::SliceNode b,
              const std::vector<causent::Conditioner>& cond) const {
        std::vector<char> in_z(n_, 0);
        for (const auto& c : cond) in_z[id(causent::to_node(c))] = 1;
        std::vector<char> anc_z = ancestors_of_z(in_z);
        std::vector<int> path{id(a)};
        std::vector<char> on_path(n_, 0);
        on_path[id(a)] = 1;
        return !active_path_exists(path, on_path, id(b), in_z, anc_z, true);
    }

private:
    struct Arc {
        int to;
        bool forward;  // true: tail at source, arrowhead at `to`
    };

    static int id(causent::SliceNode n) {
        return n.series * 2 + (n.slice == causent::Slice::Present ? 1 : 0);
    }

    std::vector<char> ancestors_of_z(const std::vector<char>& in_z) const {
        std::vector<char> anc(in_z.begin(), in_z.end());
        bool grew = true;
        while (grew) {
            grew = false;
            for (int v = 0; v < n_; ++v) {
                if (anc[v]) continue;
                for (const Arc& arc : adj_[v]) {
                    if (arc.forward && anc[arc.to]) {
                        anc[v] = 1;
                        grew = true;
                        break;
                    }
                }
            }
        }
        return anc;
    }

    bool active_path_exists(std::vector<int>& path, std::vector<char>& on_path, int target,
                            const std::vector<char>& in_z, const std::vector<char>& anc_z,
                            bool /*first*/ = false) const {
        int cur = path.back();
        for (const Arc& arc : adj_[cur]) {
            if (on_path[arc.to]) continue;
            // check the triple ending at `cur` when the path has >= 2 edges
            if (path.size() >= 2) {
                int prev = path[path.size() - 2];
                bool into_cur_from_prev = arrow_into(prev, cur);
                bool into_cur_from_next = !arc.forward ? false : false;
                into_cur_from_next = arrow_at_source_side(cur, arc);
                bool collider = into_cur_from_prev && into_cur_from_next;
                if (collider && !anc_z[cur]) continue;
                if (!collider && in_z[cur]) continue;
            }
            if (arc.to == target) return true;
            path.push_back(arc.to);
            on_path[arc.to] = 1;
            if (active_path_exists(path, on_path, target, in_z, anc_z)) return true;
            on_path[arc.to] = 0;
            path.pop_back();
        }
        return false;
    }

    bool arrow_into(int from, int to) const {
        for (const Arc& arc : adj_[from])
            if (arc.to == to) return arc.forward;
        return false;
    }

    // Walking cur -> arc.to: arrowhead at cur iff the reverse arc points in.
    bool arrow_at_source_side(int cur, const Arc& arc) const {
        for (const Arc& back : adj_[arc.to])
            if (back.to == cur) return back.forward;
        return false;
    }

    int n_ = 0;
    std::vector<std::vector<Arc>> adj_;
};

// Maximally oriented PDAG of a two-slice DAG under the temporal constraint
// that lagged edges always point past -> present: enumerate every acyclic
// orientation of the instantaneous edges with the same unshielded colliders
// as the truth, then keep the directions shared by all members. Compelled
// edges become Tail->Arrow, the rest Circle-Circle, matching the discovery
// output convention.
inline causent::ExtendedSummaryGraph brute_force_cpdag(
    const causent::ExtendedSummaryGraph& truth_dag) {
    using namespace causent;
    std::vector<ExtendedSummaryGraph::Edge> inst, lagged;
    for (const auto& e : truth_dag.edges())
        (e.a.is_past() || e.b.is_past() ? lagged : inst).push_back(e);

    auto collider_signature = [&](const ExtendedSummaryGraph& g) {
        std::vector<std::tuple<int, int, int, int, int, int>> sig;
        for (SliceNode mid : g.nodes()) {
            auto nbs = g.neighbors(mid);
            for (std::size_t i = 0; i < nbs.size(); ++i) {
                for (std::size_t j = i + 1; j < nbs.size(); ++j) {
                    if (g.adjacent(nbs[i], nbs[j])) continue;
                    if (g.is_directed(nbs[i], mid) && g.is_directed(nbs[j], mid)) {
                        auto lo = std::min(nbs[i], nbs[j]);
                        auto hi = std::max(nbs[i], nbs[j]);
                        sig.emplace_back(lo.series, static_cast<int>(lo.slice), hi.series,
                                         static_cast<int>(hi.slice), mid.series,
                                         static_cast<int>(mid.slice));
                    }
                }
            }
        }
        std::sort(sig.begin(), sig.end());
        return sig;
    };
    auto truth_sig = collider_signature(truth_dag);

    std::size_t m = inst.size();
    std::vector<ExtendedSummaryGraph> members;
    for (std::size_t bits = 0; bits < (1ULL << m); ++bits) {
        ExtendedSummaryGraph g(truth_dag.num_series(), truth_dag.series_names());
        for (const auto& e : lagged) {
            SliceNode p = e.a.is_past() ? e.a : e.b;
            SliceNode q = e.a.is_past() ? e.b : e.a;
            g.add_edge(p, q, Mark::Tail, Mark::Arrow);
        }
        for (std::size_t i = 0; i < m; ++i) {
            SliceNode from = inst[i].mark_b == Mark::Arrow ? inst[i].a : inst[i].b;
            SliceNode to = inst[i].mark_b == Mark::Arrow ? inst[i].b : inst[i].a;
            if (bits & (1ULL << i)) std::swap(from, to);
            g.add_edge(from, to, Mark::Tail, Mark::Arrow);
        }
        if (!g.directed_subgraph_acyclic()) continue;
        if (collider_signature(g) != truth_sig) continue;
        members.push_back(std::move(g));
    }

    ExtendedSummaryGraph out(truth_dag.num_series(), truth_dag.series_names());
    for (const auto& e : lagged) {
        SliceNode p = e.a.is_past() ? e.a : e.b;
        SliceNode q = e.a.is_past() ? e.b : e.a;
        out.add_edge(p, q, Mark::Tail, Mark::Arrow);
    }
    for (const auto& e : inst) {
        bool all_forward = true, all_backward = true;
        SliceNode from = e.mark_b == Mark::Arrow ? e.a : e.b;
        SliceNode to = e.mark_b == Mark::Arrow ? e.b : e.a;
        for (const auto& g : members) {
            if (!g.is_directed(from, to)) all_forward = false;
            if (!g.is_directed(to, from)) all_backward = false;
        }
        if (all_forward)
            out.add_edge(from, to, Mark::Tail, Mark::Arrow);
        else if (all_backward)
            out.add_edge(to, from, Mark::Tail, Mark::Arrow);
        else
            out.add_edge(from, to, Mark::Circle, Mark::Circle);
    }
    return out;
}

}  // namespace testsupport

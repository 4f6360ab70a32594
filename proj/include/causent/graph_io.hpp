#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "causent/errors.hpp"
#include "causent/graph.hpp"

namespace causent {

inline Mark mark_from_string(const std::string& s) {
    if (s == "tail") return Mark::Tail;
    if (s == "arrow") return Mark::Arrow;
    if (s == "circle") return Mark::Circle;
    throw InvalidArgumentError("unknown mark: " + s);
}

inline Slice slice_from_string(const std::string& s) {
    if (s == "past") return Slice::Past;
    if (s == "present") return Slice::Present;
    throw InvalidArgumentError("unknown slice: " + s);
}

inline nlohmann::json to_json(const SliceNode& n) {
    return {{"series", n.series}, {"slice", to_string(n.slice)}};
}

inline nlohmann::json to_json(const ExtendedSummaryGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges()) {
        edges.push_back({{"a", to_json(e.a)},
                         {"b", to_json(e.b)},
                         {"mark_a", to_string(e.mark_a)},
                         {"mark_b", to_string(e.mark_b)}});
    }
    return {{"d", g.num_series()}, {"series", g.series_names()}, {"edges", edges}};
}

inline ExtendedSummaryGraph graph_from_json(const nlohmann::json& j) {
    int d = j.at("d").get<int>();
    std::vector<std::string> names = j.at("series").get<std::vector<std::string>>();
    ExtendedSummaryGraph g(d, names);
    for (const auto& e : j.at("edges")) {
        SliceNode a{e.at("a").at("series").get<int>(),
                    slice_from_string(e.at("a").at("slice").get<std::string>())};
        SliceNode b{e.at("b").at("series").get<int>(),
                    slice_from_string(e.at("b").at("slice").get<std::string>())};
        g.add_edge(a, b, mark_from_string(e.at("mark_a").get<std::string>()),
                   mark_from_string(e.at("mark_b").get<std::string>()));
    }
    return g;
}

namespace detail {
inline const char* dot_arrow(Mark m) {
    switch (m) {
        case Mark::Tail: return "none";
        case Mark::Arrow: return "normal";
        default: return "odot";
    }
}
}  // namespace detail

// Past nodes are suffixed "_past" and drawn dashed; endpoint marks map to
// arrowhead styles (tail -> none, arrow -> normal, circle -> odot).
inline void to_dot(const ExtendedSummaryGraph& g, std::ostream& out) {
    out << "digraph esg {\n  rankdir=LR;\n";
    for (int i = 0; i < g.num_series(); ++i) {
        out << "  \"" << g.series_name(i) << "_past\" [style=dashed];\n";
        out << "  \"" << g.series_name(i) << "\";\n";
    }
    for (const auto& e : g.edges()) {
        out << "  \"" << g.label(e.a) << "\" -> \"" << g.label(e.b) << "\" [dir=both, arrowtail="
            << detail::dot_arrow(e.mark_a) << ", arrowhead=" << detail::dot_arrow(e.mark_b)
            << "];\n";
    }
    out << "}\n";
}

inline void to_dot(const SummaryGraph& s, std::ostream& out) {
    out << "digraph summary {\n";
    for (int i = 0; i < s.d; ++i) out << "  \"" << s.names.at(i) << "\";\n";
    for (int i : s.self_loops)
        out << "  \"" << s.names.at(i) << "\" -> \"" << s.names.at(i) << "\";\n";
    for (const auto& [key, m] : s.edges) {
        out << "  \"" << s.names.at(key.first) << "\" -> \"" << s.names.at(key.second)
            << "\" [dir=both, arrowtail=" << detail::dot_arrow(m.first)
            << ", arrowhead=" << detail::dot_arrow(m.second) << "];\n";
    }
    out << "}\n";
}

}  // namespace causent

#ifndef FLM_GRAPH_HPP
#define FLM_GRAPH_HPP

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "flm/errors.hpp"

namespace flm {

using Edge = std::pair<int, int>; // normalized: first < second

inline Edge make_edge(int u, int v) {
    if (u == v) throw precondition_error("self-loop edge {" + std::to_string(u) + "}");
    return u < v ? Edge{u, v} : Edge{v, u};
}

// Simple undirected graph with a canonical (sorted, deduplicated) edge list.
// Edge ids are indices into edges().
struct Graph {
    Graph() = default;
    Graph(int n_vertices, std::vector<Edge> edge_list) : n(n_vertices) {
        for (auto& e : edge_list) e = make_edge(e.first, e.second);
        std::sort(edge_list.begin(), edge_list.end());
        edge_list.erase(std::unique(edge_list.begin(), edge_list.end()), edge_list.end());
        for (const auto& [u, v] : edge_list) {
            if (u < 0 || v >= n) throw identifier_error("edge endpoint out of range");
        }
        edges = std::move(edge_list);
        for (int id = 0; id < (int)edges.size(); ++id) index_[edges[id]] = id;
    }

    int n = 0;
    std::vector<Edge> edges;

    int edge_count() const { return (int)edges.size(); }

    int edge_id(int u, int v) const {
        auto it = index_.find(make_edge(u, v));
        if (it == index_.end())
            throw identifier_error("no edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
        return it->second;
    }

    bool has_edge(int u, int v) const {
        if (u == v) return false;
        return index_.count(make_edge(u, v)) > 0;
    }

    // edge ids incident to each vertex
    std::vector<std::vector<int>> incidence() const {
        std::vector<std::vector<int>> inc(n);
        for (int id = 0; id < edge_count(); ++id) {
            inc[edges[id].first].push_back(id);
            inc[edges[id].second].push_back(id);
        }
        return inc;
    }

private:
    std::map<Edge, int> index_;
};

// A matching as a sorted list of edge ids of some Graph.
using Matching = std::vector<int>;

inline Matching normalize_matching(Matching m) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

} // namespace flm

#endif

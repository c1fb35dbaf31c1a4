// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Token-exchange topology: which places may trade tokens, and the
// neighbourhood that governs each directed move. Places are 0-based; the
// place_to_antenna bijection maps them onto channel-tensor antenna rows
// (identity by default, replaceable for custom physical layouts).

#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rpnsel {

struct RpnTopology {
    int n_places = 0;
    std::vector<std::pair<int, int>> edges;                       // undirected, first < second
    std::map<std::pair<int, int>, std::vector<int>> edge_neighbourhood;  // directed key
    std::vector<int> place_to_antenna;                            // bijection
    std::vector<std::vector<int>> adjacency;                      // sorted neighbour lists

    const std::vector<int>& neighbours(int place) const {
        return adjacency.at(static_cast<std::size_t>(place));
    }

    const std::vector<int>& neighbourhood(int from, int to) const {
        auto it = edge_neighbourhood.find({from, to});
        if (it == edge_neighbourhood.end())
            throw std::invalid_argument("RpnTopology: no neighbourhood for edge " +
                                        std::to_string(from) + "->" + std::to_string(to));
        return it->second;
    }

    int antenna(int place) const { return place_to_antenna.at(static_cast<std::size_t>(place)); }

    void rebuild_adjacency() {
        adjacency.assign(static_cast<std::size_t>(n_places), {});
        for (const auto& [a, b] : edges) {
            adjacency[static_cast<std::size_t>(a)].push_back(b);
            adjacency[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& nb : adjacency) {
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        }
    }
};

// Structural checks; an empty result means the topology is well formed.
inline std::vector<std::string> validate(const RpnTopology& t) {
    std::vector<std::string> out;
    if (t.n_places < 1) out.push_back("topology has no places");
    if (static_cast<int>(t.place_to_antenna.size()) != t.n_places) {
        out.push_back("place_to_antenna size != n_places");
    } else {
        std::set<int> seen(t.place_to_antenna.begin(), t.place_to_antenna.end());
        if (static_cast<int>(seen.size()) != t.n_places)
            out.push_back("place_to_antenna is not a bijection");
    }

    for (const auto& [a, b] : t.edges) {
        if (a == b) out.push_back("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") connects a place to itself");
        if (a < 0 || a >= t.n_places || b < 0 || b >= t.n_places) {
            out.push_back("edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") references an unknown place");
            continue;
        }
        for (const auto& dir : {std::pair{a, b}, std::pair{b, a}}) {
            auto it = t.edge_neighbourhood.find(dir);
            if (it == t.edge_neighbourhood.end()) {
                out.push_back("edge (" + std::to_string(dir.first) + "," +
                              std::to_string(dir.second) + ") has no neighbourhood");
                continue;
            }
            const auto& nb = it->second;
            if (std::find(nb.begin(), nb.end(), dir.first) == nb.end() ||
                std::find(nb.begin(), nb.end(), dir.second) == nb.end())
                out.push_back("neighbourhood of edge (" + std::to_string(dir.first) + "," +
                              std::to_string(dir.second) + ") does not contain both endpoints");
            for (int p : nb)
                if (p < 0 || p >= t.n_places)
                    out.push_back("neighbourhood of edge (" + std::to_string(dir.first) + "," +
                                  std::to_string(dir.second) + ") references an unknown place");
        }
    }
    for (const auto& [key, nb] : t.edge_neighbourhood) {
        const auto norm = std::minmax(key.first, key.second);
        if (std::find(t.edges.begin(), t.edges.end(), std::pair{norm.first, norm.second}) ==
            t.edges.end())
            out.push_back("neighbourhood entry (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ") has no matching edge");
    }

    // Connectivity over the undirected edge set.
    if (t.n_places > 1) {
        std::vector<char> seen(static_cast<std::size_t>(t.n_places), 0);
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(t.n_places));
        for (const auto& [a, b] : t.edges)
            if (a >= 0 && a < t.n_places && b >= 0 && b < t.n_places && a != b) {
                adj[static_cast<std::size_t>(a)].push_back(b);
                adj[static_cast<std::size_t>(b)].push_back(a);
            }
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            const int p = q.front();
            q.pop();
            for (int n : adj[static_cast<std::size_t>(p)])
                if (!seen[static_cast<std::size_t>(n)]) {
                    seen[static_cast<std::size_t>(n)] = 1;
                    ++reached;
                    q.push(n);
                }
        }
        if (reached != t.n_places) out.push_back("graph not connected");
    }
    return out;
}

// rows x cols toroidal grid. Place ids advance along each ring of length
// `cols` (place = row * cols + col), wrapping in both directions, which
// reproduces the 4x16 layout where place 0 is adjacent to places 1, 15, 16
// and 48. A "column" is the set of `rows` places sharing a col index; moves
// are governed by two-column neighbourhoods of size 2*rows: left and down
// moves by {col-1, col}, right and up moves by {col, col+1}.
//
// The neighbourhood is a property of the place pair, so both directions of
// an edge share one: the lower-id endpoint's pattern decides. Horizontal
// edges agree from both ends anyway; for vertical edges this symmetrisation
// matters, since giving the two directions different neighbourhoods makes a
// token oscillate forever between two places whenever each direction
// improves its own neighbourhood.
inline RpnTopology build_toroid(int rows, int cols) {
    if (rows < 2 || cols < 2)
        throw std::domain_error("build_toroid: need rows >= 2 and cols >= 2 (at least 4 places)");

    RpnTopology t;
    t.n_places = rows * cols;
    t.place_to_antenna.resize(static_cast<std::size_t>(t.n_places));
    for (int p = 0; p < t.n_places; ++p) t.place_to_antenna[static_cast<std::size_t>(p)] = p;

    auto id = [cols](int i, int j) { return i * cols + j; };
    auto column = [&](int j) {
        std::vector<int> c;
        c.reserve(static_cast<std::size_t>(rows));
        for (int i = 0; i < rows; ++i) c.push_back(id(i, j));
        return c;
    };
    auto two_columns = [&](int ja, int jb) {
        std::vector<int> nb = column(ja);
        if (jb != ja) {
            const std::vector<int> second = column(jb);
            nb.insert(nb.end(), second.begin(), second.end());
        }
        return nb;
    };

    std::set<std::pair<int, int>> undirected;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const int p = id(i, j);
            const int jl = (j + cols - 1) % cols;
            const int jr = (j + 1) % cols;
            const std::vector<int> left_nb = two_columns(jl, j);
            const std::vector<int> right_nb = two_columns(j, jr);

            // Move order fixes which neighbourhood wins when a 2-wide wrap
            // collapses the two vertical (or horizontal) moves onto one edge.
            const std::pair<int, std::vector<int>> moves[4] = {
                {id(i, jl), left_nb},                 // left
                {id((i + 1) % rows, j), left_nb},     // down
                {id(i, jr), right_nb},                // right
                {id((i + rows - 1) % rows, j), right_nb},  // up
            };
            for (const auto& [to, nb] : moves) {
                if (to == p) continue;
                if (p < to && t.edge_neighbourhood.emplace(std::pair{p, to}, nb).second) {
                    t.edge_neighbourhood[{to, p}] = nb;
                    undirected.insert({p, to});
                }
            }
        }
    }
    t.edges.assign(undirected.begin(), undirected.end());
    t.rebuild_adjacency();
    return t;
}

// Arbitrary validated topology. Neighbourhoods may be keyed by either or
// both directions of an edge; a missing direction inherits the other one.
inline RpnTopology build_custom(int n_places, const std::vector<std::pair<int, int>>& edges,
                                const std::map<std::pair<int, int>, std::vector<int>>& neighbourhoods) {
    RpnTopology t;
    t.n_places = n_places;
    t.place_to_antenna.resize(static_cast<std::size_t>(std::max(n_places, 0)));
    for (int p = 0; p < n_places; ++p) t.place_to_antenna[static_cast<std::size_t>(p)] = p;
    for (const auto& [a, b] : edges) t.edges.push_back(std::minmax(a, b));
    std::sort(t.edges.begin(), t.edges.end());
    t.edges.erase(std::unique(t.edges.begin(), t.edges.end()), t.edges.end());

    t.edge_neighbourhood = neighbourhoods;
    for (const auto& [a, b] : t.edges) {
        const bool fwd = t.edge_neighbourhood.count({a, b}) > 0;
        const bool rev = t.edge_neighbourhood.count({b, a}) > 0;
        if (fwd && !rev) t.edge_neighbourhood[{b, a}] = t.edge_neighbourhood[{a, b}];
        if (rev && !fwd) t.edge_neighbourhood[{a, b}] = t.edge_neighbourhood[{b, a}];
    }
    t.rebuild_adjacency();

    const std::vector<std::string> violations = validate(t);
    if (!violations.empty()) {
        std::string msg = "build_custom: invalid topology:";
        for (const std::string& v : violations) msg += "\n  - " + v;
        throw std::invalid_argument(msg);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Plain-text format, one line per item:
//   # comments and blank lines ignored
//   places <n>
//   map <antenna id for place 0> <for place 1> ...        (optional)
//   edge <from> <to> : <member> <member> ...              (directed)
// Edges listed in one direction only inherit the neighbourhood for the
// reverse direction, matching build_custom.
// ---------------------------------------------------------------------------

inline void save_topology(const RpnTopology& t, std::ostream& os) {
    os << "# rpnsel-topology v1\n";
    os << "places " << t.n_places << '\n';
    os << "map";
    for (int a : t.place_to_antenna) os << ' ' << a;
    os << '\n';
    for (const auto& [key, nb] : t.edge_neighbourhood) {
        os << "edge " << key.first << ' ' << key.second << " :";
        for (int p : nb) os << ' ' << p;
        os << '\n';
    }
}

inline RpnTopology load_topology(std::istream& is) {
    RpnTopology t;
    std::set<std::pair<int, int>> undirected;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "places") {
            if (!(ss >> t.n_places) || t.n_places < 1)
                throw std::runtime_error("topology load: bad places line: " + line);
        } else if (key == "map") {
            t.place_to_antenna.clear();
            int a;
            while (ss >> a) t.place_to_antenna.push_back(a);
        } else if (key == "edge") {
            int from, to;
            std::string colon;
            if (!(ss >> from >> to >> colon) || colon != ":")
                throw std::runtime_error("topology load: bad edge line: " + line);
            std::vector<int> nb;
            int p;
            while (ss >> p) nb.push_back(p);
            t.edge_neighbourhood[{from, to}] = std::move(nb);
            undirected.insert(std::minmax(from, to));
        } else {
            throw std::runtime_error("topology load: unknown directive: " + line);
        }
    }
    if (t.n_places < 1) throw std::runtime_error("topology load: missing places line");
    if (t.place_to_antenna.empty()) {
        t.place_to_antenna.resize(static_cast<std::size_t>(t.n_places));
        for (int p = 0; p < t.n_places; ++p) t.place_to_antenna[static_cast<std::size_t>(p)] = p;
    }
    t.edges.assign(undirected.begin(), undirected.end());
    for (const auto& [a, b] : t.edges) {
        const bool fwd = t.edge_neighbourhood.count({a, b}) > 0;
        const bool rev = t.edge_neighbourhood.count({b, a}) > 0;
        if (fwd && !rev) t.edge_neighbourhood[{b, a}] = t.edge_neighbourhood[{a, b}];
        if (rev && !fwd) t.edge_neighbourhood[{a, b}] = t.edge_neighbourhood[{b, a}];
    }
    t.rebuild_adjacency();
    return t;
}

inline void save_topology(const RpnTopology& t, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_topology: cannot open " + path);
    save_topology(t, os);
}

inline RpnTopology load_topology(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_topology: cannot open " + path);
    return load_topology(is);
}

}  // namespace rpnsel

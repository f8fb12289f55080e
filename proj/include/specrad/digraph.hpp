#pragma once

// Paths, multi digraphs and even digraphs.
//
// A path (i_1, ..., i_{m+1}) generates the multi digraph whose edge (i, j)
// has multiplicity equal to the number of adjacent occurrences of (i, j).
// An even digraph is one generated by a closed path in which every adjacent
// pair occurs an even number of times. For a strongly connected multi digraph
// with all multiplicities even this is the same as balanced in/out degrees,
// and the same as being a disjoint union of double cycles.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specrad/errors.hpp"
#include "specrad/report.hpp"

namespace specrad {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

/// A path is its vertex sequence; its length is the number of adjacent pairs.
using Path = std::vector<Vertex>;

inline std::size_t path_length(const Path& p) { return p.empty() ? 0 : p.size() - 1; }
inline bool is_closed(const Path& p) { return !p.empty() && p.front() == p.back(); }

class MultiDigraph {
public:
    MultiDigraph() = default;

    void add_vertex(Vertex v) { vertices_.insert(v); }

    void add_edge(Vertex u, Vertex v, int multiplicity = 1) {
        if (multiplicity < 1) throw ConfigError("edge multiplicity must be >= 1");
        vertices_.insert(u);
        vertices_.insert(v);
        edges_[{u, v}] += multiplicity;
    }

    /// Removes `multiplicity` copies of (u, v); the vertex set is unchanged.
    void remove_edge(Vertex u, Vertex v, int multiplicity = 1) {
        auto it = edges_.find({u, v});
        if (it == edges_.end() || it->second < multiplicity)
            throw ConfigError("removing more copies of an edge than present");
        it->second -= multiplicity;
        if (it->second == 0) edges_.erase(it);
    }

    const std::set<Vertex>& vertices() const { return vertices_; }
    const std::map<Edge, int>& edges() const { return edges_; }

    int multiplicity(const Edge& e) const {
        auto it = edges_.find(e);
        return it == edges_.end() ? 0 : it->second;
    }

    /// |E| counted with multiplicity.
    long edge_count() const {
        long total = 0;
        for (const auto& [e, n] : edges_) total += n;
        return total;
    }

    std::size_t distinct_edge_count() const { return edges_.size(); }

    // A loop (v, v) adds one to both the in- and the out-degree of v.
    long out_degree(Vertex v) const {
        long d = 0;
        for (auto it = edges_.lower_bound({v, std::numeric_limits<Vertex>::min()}); it != edges_.end() && it->first.first == v; ++it)
            d += it->second;
        return d;
    }

    long in_degree(Vertex v) const {
        long d = 0;
        for (const auto& [e, n] : edges_)
            if (e.second == v) d += n;
        return d;
    }

    bool strongly_connected() const {
        if (vertices_.empty()) return false;
        std::map<Vertex, std::vector<Vertex>> fwd, bwd;
        for (const auto& [e, n] : edges_) {
            fwd[e.first].push_back(e.second);
            bwd[e.second].push_back(e.first);
        }
        auto reach = [&](const std::map<Vertex, std::vector<Vertex>>& adj) {
            std::set<Vertex> seen{*vertices_.begin()};
            std::vector<Vertex> stack{*vertices_.begin()};
            while (!stack.empty()) {
                const Vertex v = stack.back();
                stack.pop_back();
                auto it = adj.find(v);
                if (it == adj.end()) continue;
                for (Vertex w : it->second)
                    if (seen.insert(w).second) stack.push_back(w);
            }
            return seen.size() == vertices_.size();
        };
        return reach(fwd) && reach(bwd);
    }

    auto operator<=>(const MultiDigraph&) const = default;
    bool operator==(const MultiDigraph&) const = default;

private:
    std::set<Vertex> vertices_;
    std::map<Edge, int> edges_;
};

/// A multi digraph with a distinguished directed edge.
struct RootedMultiDigraph {
    MultiDigraph base;
    Edge root;

    RootedMultiDigraph(MultiDigraph g, Edge r) : base(std::move(g)), root(r) {
        if (base.multiplicity(root) < 1) throw ConfigError("root edge must belong to the digraph");
    }

    auto operator<=>(const RootedMultiDigraph&) const = default;
    bool operator==(const RootedMultiDigraph&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const MultiDigraph& g) {
    os << "{";
    bool first = true;
    for (const auto& [e, n] : g.edges()) {
        os << (first ? "" : ", ") << "(" << e.first << "," << e.second << ")x" << n;
        first = false;
    }
    return os << "}";
}

// ---------------------------------------------------------------------------
// Paths and evenness

inline MultiDigraph digraph_of_path(const Path& p) {
    MultiDigraph g;
    for (Vertex v : p) g.add_vertex(v);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) g.add_edge(p[i], p[i + 1]);
    return g;
}

inline bool all_multiplicities_even(const MultiDigraph& g) {
    return std::all_of(g.edges().begin(), g.edges().end(),
                       [](const auto& kv) { return kv.second % 2 == 0; });
}

/// Closed, of positive length, and every adjacent pair occurs an even number of times.
inline bool is_even_path(const Path& p) {
    return path_length(p) >= 1 && is_closed(p) && all_multiplicities_even(digraph_of_path(p));
}

/// deg+(v) = deg-(v) and even at every vertex (loops counted once each way).
inline bool degree_condition(const MultiDigraph& g) {
    for (Vertex v : g.vertices()) {
        const long out = g.out_degree(v);
        if (out != g.in_degree(v) || out % 2 != 0) return false;
    }
    return true;
}

/// Strongly connected, with edges, even multiplicities and the degree condition.
///
/// The degree condition alone does not force even multiplicities (three
/// vertices with all six off-diagonal edges once each satisfy it), so it is
/// checked together with multiplicity parity.
inline bool is_even_digraph(const MultiDigraph& g) {
    return g.edge_count() > 0 && g.strongly_connected() && all_multiplicities_even(g) &&
           degree_condition(g);
}

// ---------------------------------------------------------------------------
// Double cycle decomposition

/// A simple directed cycle by its vertices in order; edges are
/// (c[0], c[1]), ..., (c[m-1], c[0]). A single vertex is a loop.
using Cycle = std::vector<Vertex>;

inline std::vector<Edge> cycle_edges(const Cycle& c) {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < c.size(); ++i) out.push_back({c[i], c[(i + 1) % c.size()]});
    return out;
}

namespace detail {

class HalfGraph {
public:
    explicit HalfGraph(const MultiDigraph& g) {
        for (const auto& [e, n] : g.edges()) out_[e.first][e.second] = n / 2;
    }

    bool take(Vertex u, Vertex v) {
        auto& m = out_[u];
        auto it = m.find(v);
        if (it == m.end() || it->second == 0) return false;
        --it->second;
        return true;
    }

    std::optional<Vertex> smallest_out(Vertex u) const {
        auto it = out_.find(u);
        if (it == out_.end()) return std::nullopt;
        for (const auto& [v, n] : it->second)
            if (n > 0) return v;
        return std::nullopt;
    }

    std::optional<Vertex> lowest_with_out_edges() const {
        for (const auto& [u, m] : out_)
            for (const auto& [v, n] : m)
                if (n > 0) return u;
        return std::nullopt;
    }

private:
    std::map<Vertex, std::map<Vertex, int>> out_;
};

/// Walks from `start`, closing a cycle whenever the walk revisits a vertex on
/// its current stack. Returns the index (into `cycles`) of the first cycle
/// closed at the start vertex when `first` was forced, else nothing.
inline std::optional<std::size_t> peel_walk(HalfGraph& h, Vertex start, std::optional<Vertex> first,
                                            std::vector<Cycle>& cycles) {
    std::vector<Vertex> stack{start};
    std::map<Vertex, std::size_t> pos{{start, 0}};
    std::optional<std::size_t> root_cycle;
    std::optional<Vertex> next = first;
    if (next && !h.take(start, *next)) throw ConfigError("root edge not available in decomposition");
    while (true) {
        if (!next) {
            next = h.smallest_out(stack.back());
            if (!next) break;
            h.take(stack.back(), *next);
        }
        auto it = pos.find(*next);
        if (it != pos.end()) {
            const std::size_t idx = it->second;
            cycles.emplace_back(stack.begin() + static_cast<std::ptrdiff_t>(idx), stack.end());
            if (idx == 0 && first && !root_cycle) root_cycle = cycles.size() - 1;
            for (std::size_t i = idx + 1; i < stack.size(); ++i) pos.erase(stack[i]);
            stack.resize(idx + 1);
        } else {
            pos[*next] = stack.size();
            stack.push_back(*next);
        }
        next.reset();
    }
    return root_cycle;
}

}  // namespace detail

/// Partition of an even digraph into double cycles, or nothing when `g` is
/// not even.
///
/// Cycles are peeled from the halved multigraph by walks that always take the
/// smallest-numbered available out-neighbour; the first walk starts with the
/// root edge when one is given, otherwise from the lowest vertex. The result
/// is ordered so that the first cycle contains the root and every later cycle
/// shares at least one vertex with the union of the earlier ones.
inline std::optional<std::vector<Cycle>> double_cycle_decomposition(
    const MultiDigraph& g, std::optional<Edge> root = std::nullopt) {
    if (!is_even_digraph(g)) return std::nullopt;
    if (root && g.multiplicity(*root) < 2) throw ConfigError("root must be an edge of the digraph");
    detail::HalfGraph h(g);
    std::vector<Cycle> found;
    std::size_t first_index = 0;
    if (root) {
        const auto rc = detail::peel_walk(h, root->first, root->second, found);
        first_index = rc.value();
    }
    while (auto u = h.lowest_with_out_edges()) detail::peel_walk(h, *u, std::nullopt, found);

    std::vector<Cycle> ordered{found[first_index]};
    std::vector<bool> used(found.size(), false);
    used[first_index] = true;
    std::set<Vertex> covered(found[first_index].begin(), found[first_index].end());
    while (ordered.size() < found.size()) {
        bool progressed = false;
        for (std::size_t i = 0; i < found.size(); ++i) {
            if (used[i]) continue;
            if (std::any_of(found[i].begin(), found[i].end(),
                            [&](Vertex v) { return covered.count(v) > 0; })) {
                used[i] = true;
                ordered.push_back(found[i]);
                covered.insert(found[i].begin(), found[i].end());
                progressed = true;
                break;
            }
        }
        if (!progressed) throw Error("internal: decomposition of a connected digraph is disconnected");
    }
    return ordered;
}

/// r_i = number of vertices cycle i shares with cycles 0..i-1 (r_0 = 0).
inline std::vector<int> shared_vertex_counts(const std::vector<Cycle>& cycles) {
    std::vector<int> r;
    std::set<Vertex> covered;
    for (const auto& c : cycles) {
        int shared = 0;
        for (Vertex v : c) shared += covered.count(v) ? 1 : 0;
        r.push_back(shared);
        covered.insert(c.begin(), c.end());
    }
    return r;
}

/// Sum of doubled cycle edge multisets.
inline MultiDigraph union_of_double_cycles(const std::vector<Cycle>& cycles) {
    MultiDigraph g;
    for (const auto& c : cycles)
        for (const auto& e : cycle_edges(c)) g.add_edge(e.first, e.second, 2);
    return g;
}

// ---------------------------------------------------------------------------
// Generating paths

namespace detail {

class EdgeBudget {
public:
    explicit EdgeBudget(const MultiDigraph& g) {
        for (const auto& [e, n] : g.edges()) out_[e.first].push_back({e.second, n});
        remaining_ = g.edge_count();
    }
    std::map<Vertex, std::vector<std::pair<Vertex, int>>> out_;
    long remaining_;
};

template <class OnComplete>
bool euler_dfs(EdgeBudget& b, Vertex at, Vertex start, std::uint64_t& nodes, std::uint64_t budget,
               std::uint64_t& found, OnComplete&& on_complete) {
    if (++nodes > budget) throw BudgetError("generating-path enumeration exceeded its budget", found);
    if (b.remaining_ == 0) {
        if (at == start) {
            ++found;
            return on_complete();
        }
        return false;
    }
    auto it = b.out_.find(at);
    if (it == b.out_.end()) return false;
    for (auto& [w, n] : it->second) {
        if (n == 0) continue;
        --n;
        --b.remaining_;
        const bool stop = euler_dfs(b, w, start, nodes, budget, found, on_complete);
        ++n;
        ++b.remaining_;
        if (stop) return true;
    }
    return false;
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultPathBudget = 50'000'000;

/// Exact number of closed paths generating `g`, by depth-first enumeration
/// of edge orders from every start vertex.
inline std::uint64_t count_generating_paths(const MultiDigraph& g,
                                            std::uint64_t budget = kDefaultPathBudget) {
    if (g.edge_count() == 0) return 0;
    std::uint64_t nodes = 0, found = 0;
    for (Vertex s : g.vertices()) {
        detail::EdgeBudget b(g);
        detail::euler_dfs(b, s, s, nodes, budget, found, [] { return false; });
    }
    return found;
}

/// Search oracle for "generated by an even path": even multiplicities and a
/// closed walk using every edge copy exactly once, found by brute force.
inline bool has_generating_even_path(const MultiDigraph& g,
                                     std::uint64_t budget = kDefaultPathBudget) {
    if (g.edge_count() == 0 || !all_multiplicities_even(g)) return false;
    std::uint64_t nodes = 0, found = 0;
    const Vertex s = *g.vertices().begin();
    detail::EdgeBudget b(g);
    detail::euler_dfs(b, s, s, nodes, budget, found, [] { return true; });
    // a circuit from s covers every vertex only if each vertex has an edge
    if (found == 0) return false;
    for (Vertex v : g.vertices())
        if (g.out_degree(v) == 0) return false;
    return true;
}

/// Search oracle for "partitioned into double cycles": tries every simple
/// cycle through the smallest remaining edge, recursively.
inline bool has_double_cycle_partition(const MultiDigraph& g) {
    std::map<Edge, int> rest = g.edges();
    std::function<bool()> solve = [&]() -> bool {
        auto it = std::find_if(rest.begin(), rest.end(), [](const auto& kv) { return kv.second > 0; });
        if (it == rest.end()) return true;
        const Edge e = it->first;
        if (it->second < 2) return false;
        if (e.first == e.second) {
            rest[e] -= 2;
            const bool ok = solve();
            rest[e] += 2;
            return ok;
        }
        // simple paths e.second -> ... -> e.first over edges with >= 2 copies left, no loops
        std::vector<Vertex> path{e.first, e.second};
        std::function<bool()> extend = [&]() -> bool {
            const Vertex at = path.back();
            if (at == e.first) {
                std::vector<Edge> used;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) used.push_back({path[i], path[i + 1]});
                for (const auto& u : used) rest[u] -= 2;
                const bool ok = solve();
                for (const auto& u : used) rest[u] += 2;
                return ok;
            }
            for (auto jt = rest.lower_bound({at, std::numeric_limits<Vertex>::min()}); jt != rest.end() && jt->first.first == at;
                 ++jt) {
                const Vertex w = jt->first.second;
                if (jt->second < 2 || w == at) continue;
                if (w != e.first && std::find(path.begin(), path.end(), w) != path.end()) continue;
                path.push_back(w);
                const bool ok = extend();
                path.pop_back();
                if (ok) return true;
            }
            return false;
        };
        return extend();
    };
    return solve();
}

// ---------------------------------------------------------------------------
// Counting bounds

inline double factorial(int n) {
    if (n < 0) throw ConfigError("factorial of a negative number");
    return std::tgamma(n + 1.0);
}

/// l (4k - 4l)! for an even digraph with 2k edges and l vertices (k >= l).
inline double generating_path_bound(int k, int l) {
    if (k < l) throw ConfigError("generating path bound needs k >= l");
    return l * factorial(4 * k - 4 * l);
}

/// N^l k^(2(k-l)+1) for rooted even digraphs on [N] with 2k edges and l vertices.
inline double rooted_digraph_count_bound(int n, int k, int l) {
    return std::pow(n, l) * std::pow(k, 2 * (k - l) + 1);
}

/// k^2 (4k)^(6(k-l)) N^l for even closed paths of length 2k with l vertices.
inline double even_path_count_bound(int n, int k, int l) {
    return static_cast<double>(k) * k * std::pow(4.0 * k, 6 * (k - l)) * std::pow(n, l);
}

// ---------------------------------------------------------------------------
// Even closed path enumeration

inline constexpr double kDefaultEnumerationGuard = 1e8;

/// N(k, l) for l = 0..k (index 0 unused).
struct PathTally {
    int n = 0;
    int k = 0;
    std::uint64_t total = 0;
    std::vector<std::uint64_t> by_vertex_count;
};

/// Streams every even closed path of length 2k over vertices 1..N, each once,
/// in lexicographic order.
inline PathTally enumerate_even_closed_paths(int n, int k,
                                             const std::function<void(const Path&)>& visit = {},
                                             double guard = kDefaultEnumerationGuard) {
    if (n < 1 || k < 1) throw ConfigError("enumeration needs N >= 1 and k >= 1");
    const int len = 2 * k;
    if (std::pow(static_cast<double>(n), len) > guard)
        throw CapacityError("N^(2k) = " + fmt(std::pow(static_cast<double>(n), len)) +
                            " exceeds the enumeration guard " + fmt(guard));
    PathTally t;
    t.n = n;
    t.k = k;
    t.by_vertex_count.assign(static_cast<std::size_t>(k) + 1, 0);

    Path p(static_cast<std::size_t>(len) + 1, 1);
    std::vector<int> mult(static_cast<std::size_t>(n * n), 0);
    std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
    while (true) {
        p[static_cast<std::size_t>(len)] = p[0];
        std::fill(mult.begin(), mult.end(), 0);
        for (int i = 0; i < len; ++i) ++mult[static_cast<std::size_t>((p[i] - 1) * n + (p[i + 1] - 1))];
        const bool even = std::all_of(mult.begin(), mult.end(), [](int m) { return m % 2 == 0; });
        if (even) {
            std::fill(seen.begin(), seen.end(), 0);
            int l = 0;
            for (int i = 0; i < len; ++i)
                if (!seen[static_cast<std::size_t>(p[i])]++) ++l;
            ++t.total;
            ++t.by_vertex_count[static_cast<std::size_t>(l)];
            if (visit) visit(p);
        }
        int pos = len - 1;
        while (pos >= 0 && p[static_cast<std::size_t>(pos)] == n) p[static_cast<std::size_t>(pos--)] = 1;
        if (pos < 0) break;
        ++p[static_cast<std::size_t>(pos)];
    }
    return t;
}

// ---------------------------------------------------------------------------
// Canonical keys

/// Opaque identifier of an isomorphism class of (rooted) multi digraphs.
struct CanonicalKey {
    std::string bytes;
    auto operator<=>(const CanonicalKey&) const = default;
};

inline constexpr std::size_t kCanonicalVertexCap = 12;

namespace detail {

inline CanonicalKey canonical_key_impl(const MultiDigraph& g, const std::optional<Edge>& root) {
    const std::vector<Vertex> verts(g.vertices().begin(), g.vertices().end());
    const std::size_t l = verts.size();
    if (l > kCanonicalVertexCap)
        throw UnsupportedError("canonical key limited to " + std::to_string(kCanonicalVertexCap) +
                               " vertices");
    std::map<Vertex, int> index;
    for (std::size_t i = 0; i < l; ++i) index[verts[i]] = static_cast<int>(i);

    std::vector<int> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<std::string> best;
    std::vector<std::array<int, 3>> rows;
    do {
        rows.clear();
        for (const auto& [e, n] : g.edges())
            rows.push_back({perm[static_cast<std::size_t>(index[e.first])],
                            perm[static_cast<std::size_t>(index[e.second])], n});
        std::sort(rows.begin(), rows.end());
        std::string s;
        s.push_back(root ? 'R' : 'U');
        s.push_back(static_cast<char>(l));
        if (root) {
            s.push_back(static_cast<char>(perm[static_cast<std::size_t>(index[root->first])]));
            s.push_back(static_cast<char>(perm[static_cast<std::size_t>(index[root->second])]));
        }
        for (const auto& r : rows) {
            s.push_back(static_cast<char>(r[0]));
            s.push_back(static_cast<char>(r[1]));
            s.push_back(static_cast<char>((r[2] >> 8) & 0xff));
            s.push_back(static_cast<char>(r[2] & 0xff));
        }
        if (!best || s < *best) best = std::move(s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {*best};
}

}  // namespace detail

/// Minimal serialized adjacency over all vertex relabelings.
inline CanonicalKey canonical_key(const MultiDigraph& g) {
    return detail::canonical_key_impl(g, std::nullopt);
}

inline CanonicalKey canonical_key(const RootedMultiDigraph& g) {
    return detail::canonical_key_impl(g.base, g.root);
}

// ---------------------------------------------------------------------------
// Rooted even digraph census

struct EvenDigraphCensus {
    int n = 0;
    int k = 0;
    int l = 0;
    std::vector<MultiDigraph> digraphs;        // distinct labeled even digraphs
    std::uint64_t labeled_count = 0;           // |G_N(k, l)|: digraphs times root choices
    std::map<CanonicalKey, std::uint64_t> classes;  // rooted class -> labeled members
    double bound = 0.0;
    bool bound_ok = true;
};

/// Labeled rooted even digraphs on [N] with 2k edges and l vertices, built as
/// the set of digraphs of the enumerated even closed paths.
inline EvenDigraphCensus enumerate_even_digraphs(int n, int k, int l,
                                                 double guard = kDefaultEnumerationGuard) {
    EvenDigraphCensus c;
    c.n = n;
    c.k = k;
    c.l = l;
    c.bound = rooted_digraph_count_bound(n, k, l);
    if (l < 1 || l > std::min(k, n)) return c;
    std::set<MultiDigraph> distinct;
    enumerate_even_closed_paths(
        n, k,
        [&](const Path& p) {
            auto g = digraph_of_path(p);
            if (static_cast<int>(g.vertices().size()) == l) distinct.insert(std::move(g));
        },
        guard);
    c.digraphs.assign(distinct.begin(), distinct.end());
    for (const auto& g : c.digraphs) {
        for (const auto& [e, mult] : g.edges()) {
            ++c.labeled_count;
            ++c.classes[canonical_key(RootedMultiDigraph(g, e))];
        }
    }
    c.bound_ok = static_cast<double>(c.labeled_count) <= c.bound;
    return c;
}

/// enumerate_even_digraphs for l = 1..k from a single pass over the paths.
inline std::vector<EvenDigraphCensus> enumerate_even_digraphs_by_size(int n, int k,
                                                                      double guard = kDefaultEnumerationGuard) {
    std::vector<EvenDigraphCensus> out(static_cast<std::size_t>(k));
    std::vector<std::set<MultiDigraph>> distinct(static_cast<std::size_t>(k) + 1);
    enumerate_even_closed_paths(
        n, k,
        [&](const Path& p) {
            auto g = digraph_of_path(p);
            distinct[g.vertices().size()].insert(std::move(g));
        },
        guard);
    for (int l = 1; l <= k; ++l) {
        auto& c = out[static_cast<std::size_t>(l - 1)];
        c.n = n;
        c.k = k;
        c.l = l;
        c.bound = rooted_digraph_count_bound(n, k, l);
        c.digraphs.assign(distinct[static_cast<std::size_t>(l)].begin(), distinct[static_cast<std::size_t>(l)].end());
        for (const auto& g : c.digraphs) {
            for (const auto& [e, mult] : g.edges()) {
                ++c.labeled_count;
                ++c.classes[canonical_key(RootedMultiDigraph(g, e))];
            }
        }
        c.bound_ok = static_cast<double>(c.labeled_count) <= c.bound;
    }
    return out;
}

inline void write_census_csv(std::ostream& out, const std::vector<EvenDigraphCensus>& rows) {
    CsvWriter w(out, {"k", "l", "N", "labeled_count", "class_count", "bound", "bound_ok"});
    for (const auto& c : rows)
        w.row(c.k, c.l, c.n, c.labeled_count, c.classes.size(), c.bound, c.bound_ok);
}

// ---------------------------------------------------------------------------
// Exhaustive multi digraph generation

/// Calls `visit` for every multi digraph on vertex set {1..v}, v = 1..max_vertices,
/// with between 1 and max_edges edges counted with multiplicity, in which every
/// vertex is an endpoint of some edge.
inline void for_each_multidigraph(int max_vertices, int max_edges,
                                  const std::function<void(const MultiDigraph&)>& visit) {
    for (int v = 1; v <= max_vertices; ++v) {
        std::vector<Edge> slots;
        for (int a = 1; a <= v; ++a)
            for (int b = 1; b <= v; ++b) slots.push_back({a, b});
        std::vector<int> mult(slots.size(), 0);
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
            if (i == slots.size()) {
                if (left == max_edges) return;  // no edges
                MultiDigraph g;
                for (std::size_t s = 0; s < slots.size(); ++s)
                    if (mult[s] > 0) g.add_edge(slots[s].first, slots[s].second, mult[s]);
                if (static_cast<int>(g.vertices().size()) == v) visit(g);
                return;
            }
            for (int m = 0; m <= left; ++m) {
                mult[i] = m;
                rec(i + 1, left - m);
            }
            mult[i] = 0;
        };
        rec(0, max_edges);
    }
}

}  // namespace specrad

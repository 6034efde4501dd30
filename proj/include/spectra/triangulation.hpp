#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/surface.hpp"

namespace spectra {

// Explicit arc/triangulation machinery for unpunctured polygons and
// once-punctured polygons. Boundary marked points are labeled 0..k-1 in the
// positive (counterclockwise) boundary order; the puncture is labeled -1.
constexpr int kPuncture = -1;

struct Arc {
    int a = 0, b = 0;  // endpoints, normalized a <= b (puncture sorts first)
    int side = 0;      // chords on punctured disks: 1 iff the puncture lies in
                       // the region bounded by the chord and the ccw boundary
                       // path a -> b

    bool is_radius() const { return a == kPuncture; }
    bool is_loop() const { return a >= 0 && a == b; }
    bool is_chord() const { return a >= 0 && a < b; }
    std::tuple<int, int, int> key() const { return {a, b, side}; }
    bool operator==(const Arc&) const = default;
    bool operator<(const Arc& o) const { return key() < o.key(); }
};

inline Arc make_chord(int u, int v, int side_ccw_from_u) {
    if (u > v) {
        std::swap(u, v);
        side_ccw_from_u = 1 - side_ccw_from_u;
    }
    return Arc{u, v, side_ccw_from_u};
}
inline Arc make_radius(int v) { return Arc{kPuncture, v, 0}; }
inline Arc make_loop(int v) { return Arc{v, v, 0}; }

// Triangles are stored with their edge cycle in counterclockwise order.
// corner[i] is the marked point between edge[i] and edge[(i+1)%3].
struct Triangle {
    std::array<int, 3> edge{};
    std::array<int, 3> corner{};
};

struct IdealTriangulation {
    MarkedBorderedSurface surface;
    std::vector<Arc> arcs;
    std::vector<Triangle> triangles;

    int n() const { return static_cast<int>(arcs.size()); }
    int marks() const { return surface.boundary_marks.at(0); }
    bool punctured() const { return surface.punctures == 1; }
    int boundary_edge_id(int v) const { return n() + v; }
    bool is_arc_edge(int e) const { return e < n(); }

    std::vector<std::tuple<int, int, int>> canonical_arcs() const {
        std::vector<std::tuple<int, int, int>> keys;
        keys.reserve(arcs.size());
        for (const Arc& a : arcs) keys.push_back(a.key());
        std::sort(keys.begin(), keys.end());
        return keys;
    }
    bool same_arcs(const IdealTriangulation& o) const {
        return surface == o.surface && canonical_arcs() == o.canonical_arcs();
    }
};

inline void check_supported(const MarkedBorderedSurface& s) {
    validate(s);
    if (s.genus != 0 || s.boundary_marks.size() != 1 || s.punctures > 1)
        throw UnsupportedSurface(
            "explicit triangulations cover polygons and once-punctured disks");
    if (s.punctures == 0 && s.boundary_marks[0] < 3)
        throw UnsupportedSurface("polygon needs at least 3 marked points");
}

// Fan triangulation: all chords from vertex 0 (polygon) or all radii
// (once-punctured polygon).
inline IdealTriangulation fan_triangulation(const MarkedBorderedSurface& s) {
    check_supported(s);
    IdealTriangulation T;
    T.surface = s;
    const int k = s.boundary_marks[0];
    if (s.punctures == 0) {
        const int n = k - 3;
        for (int j = 2; j <= k - 2; ++j) T.arcs.push_back(make_chord(0, j, 0));
        for (int j = 1; j <= k - 2; ++j) {
            Triangle t;
            t.edge[0] = (j == 1) ? T.boundary_edge_id(0) : j - 2;
            t.edge[1] = T.boundary_edge_id(j);
            t.edge[2] = (j == k - 2) ? T.boundary_edge_id(k - 1) : j - 1;
            t.corner = {j, j + 1 == k ? 0 : j + 1, 0};
            T.triangles.push_back(t);
        }
        (void)n;
    } else {
        for (int v = 0; v < k; ++v) T.arcs.push_back(make_radius(v));
        for (int v = 0; v < k; ++v) {
            Triangle t;
            const int w = (v + 1) % k;
            t.edge = {T.boundary_edge_id(v), w, v};
            t.corner = {w, kPuncture, v};
            T.triangles.push_back(t);
        }
    }
    return T;
}

namespace detail {

inline Triangle rotate_to_front(const Triangle& t, int slot) {
    Triangle r;
    for (int i = 0; i < 3; ++i) {
        r.edge[i] = t.edge[(i + slot) % 3];
        r.corner[i] = t.corner[(i + slot) % 3];
    }
    return r;
}

// Locate the (triangle, slot) occurrences of an edge id.
inline std::vector<std::pair<int, int>> edge_slots(const IdealTriangulation& T,
                                                   int e) {
    std::vector<std::pair<int, int>> occ;
    for (int ti = 0; ti < static_cast<int>(T.triangles.size()); ++ti)
        for (int s = 0; s < 3; ++s)
            if (T.triangles[ti].edge[s] == e) occ.push_back({ti, s});
    return occ;
}

// Which side of arc `cut` contains the puncture: returns the set of boundary
// edge ids on the puncture side. Assumes `cut` separates (true on a disk).
inline void puncture_side(const IdealTriangulation& T, int cut, bool& has_p,
                          std::set<int>& segs, int start_tri) {
    std::vector<char> seen(T.triangles.size(), 0);
    std::deque<int> q{start_tri};
    seen[start_tri] = 1;
    has_p = false;
    segs.clear();
    // arc -> adjacent triangles
    std::map<int, std::vector<int>> adj;
    for (int ti = 0; ti < static_cast<int>(T.triangles.size()); ++ti)
        for (int s = 0; s < 3; ++s)
            if (T.is_arc_edge(T.triangles[ti].edge[s]))
                adj[T.triangles[ti].edge[s]].push_back(ti);
    while (!q.empty()) {
        int ti = q.front();
        q.pop_front();
        const Triangle& t = T.triangles[ti];
        for (int s = 0; s < 3; ++s) {
            if (t.corner[s] == kPuncture) has_p = true;
            if (!T.is_arc_edge(t.edge[s]))
                segs.insert(t.edge[s]);
            else if (t.edge[s] != cut)
                for (int other : adj[t.edge[s]])
                    if (!seen[other]) {
                        seen[other] = 1;
                        q.push_back(other);
                    }
        }
    }
}

inline Arc classify_new_arc(const IdealTriangulation& T_new, int arc_id, int y1,
                            int y2, int new_t1_index) {
    if (y1 == kPuncture || y2 == kPuncture) {
        const int v = (y1 == kPuncture) ? y2 : y1;
        if (v == kPuncture) throw Stalled("arc with both ends at the puncture");
        return make_radius(v);
    }
    if (y1 == y2) {
        if (!T_new.punctured())
            throw Stalled("loop arc produced on an unpunctured polygon");
        return make_loop(y1);
    }
    if (!T_new.punctured()) return Arc{std::min(y1, y2), std::max(y1, y2), 0};
    bool has_p = false;
    std::set<int> segs;
    puncture_side(T_new, arc_id, has_p, segs, new_t1_index);
    std::set<int> p_segs;
    if (has_p) {
        p_segs = segs;
    } else {
        for (int v = 0; v < T_new.marks(); ++v) {
            int e = T_new.boundary_edge_id(v);
            if (!segs.count(e)) p_segs.insert(e);
        }
    }
    const int u = std::min(y1, y2);
    // ccw interval u -> v holds boundary segments b_u .. b_{v-1}
    const int s = p_segs.count(T_new.boundary_edge_id(u)) ? 1 : 0;
    return make_chord(u, std::max(y1, y2), s);
}

}  // namespace detail

// Flip of arc k. Throws FlipNotAllowed when k is the interior edge of a
// self-folded triangle.
inline IdealTriangulation flip(const IdealTriangulation& T, int k) {
    if (k < 0 || k >= T.n()) throw InvalidInput("arc index out of range");
    auto occ = detail::edge_slots(T, k);
    if (occ.size() != 2) throw Stalled("arc does not border two triangle slots");
    if (occ[0].first == occ[1].first)
        throw FlipNotAllowed("interior edge of a self-folded triangle");

    const Triangle t1 = detail::rotate_to_front(T.triangles[occ[0].first], occ[0].second);
    const Triangle t2 = detail::rotate_to_front(T.triangles[occ[1].first], occ[1].second);
    const int a = t1.edge[1], b = t1.edge[2];
    const int c = t2.edge[1], d = t2.edge[2];
    const int y1 = t1.corner[1], z1 = t1.corner[2];
    const int y2 = t2.corner[1], z2 = t2.corner[2];

    IdealTriangulation R = T;
    Triangle nt1, nt2;
    nt1.edge = {k, b, c};
    nt1.corner = {y1, z1, y2};
    nt2.edge = {k, d, a};
    nt2.corner = {y2, z2, y1};
    R.triangles[occ[0].first] = nt1;
    R.triangles[occ[1].first] = nt2;
    R.arcs[k] = detail::classify_new_arc(R, k, y1, y2, occ[0].first);
    return R;
}

inline int puncture_valency(const IdealTriangulation& T) {
    int v = 0;
    for (const Arc& a : T.arcs)
        if (a.is_radius()) ++v;
    return v;
}

inline bool is_regular(const IdealTriangulation& T) {
    if (!T.punctured()) return true;
    return puncture_valency(T) >= 3;
}

// Index of the triangle in which arc j appears twice, if any.
inline std::optional<int> self_folded_triangle_of(const IdealTriangulation& T,
                                                  int j) {
    auto occ = detail::edge_slots(T, j);
    if (occ.size() == 2 && occ[0].first == occ[1].first) return occ[0].first;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tagged triangulations: signed triangulations up to equality of signings at
// valency-one punctures. Only one puncture is ever present here.

struct TaggedTriangulation {
    IdealTriangulation T;
    int sign = +1;  // signing at the puncture; +1 for unpunctured surfaces

    using Key = std::pair<std::vector<std::tuple<int, int, int>>, int>;
    Key key() const {
        int s = sign;
        if (!T.punctured() || puncture_valency(T) == 1) s = +1;
        return {T.canonical_arcs(), s};
    }
    bool operator==(const TaggedTriangulation& o) const { return key() == o.key(); }
};

inline TaggedTriangulation tagged_flip(const TaggedTriangulation& tau, int j) {
    check_supported(tau.T.surface);
    auto sf = self_folded_triangle_of(tau.T, j);
    if (!sf) return TaggedTriangulation{flip(tau.T, j), tau.sign};
    // j is the interior edge: re-represent the tagged arc by the encircling
    // edge with the signing flipped at the puncture, then flip that edge.
    const Triangle& t = tau.T.triangles[*sf];
    int enc = -1;
    for (int s = 0; s < 3; ++s)
        if (t.edge[s] != j) enc = t.edge[s];
    if (enc < 0 || !tau.T.is_arc_edge(enc))
        throw FlipNotAllowed(
            "encircling edge is a boundary segment (once-punctured monogon)");
    // Under the re-representation the tagged-arc slots j and enc exchange
    // roles, so the flipped arc is moved back into slot j.
    IdealTriangulation R = flip(tau.T, enc);
    std::swap(R.arcs[j], R.arcs[enc]);
    for (Triangle& t : R.triangles)
        for (int s = 0; s < 3; ++s) {
            if (t.edge[s] == j)
                t.edge[s] = enc;
            else if (t.edge[s] == enc)
                t.edge[s] = j;
        }
    return TaggedTriangulation{R, -tau.sign};
}

// ---------------------------------------------------------------------------
// Exchange matrices and the Fomin-Zelevinsky mutation rule.

using ExchangeMatrix = std::vector<std::vector<int>>;

inline ExchangeMatrix exchange_matrix(const IdealTriangulation& T) {
    const int n = T.n();
    ExchangeMatrix eps(n, std::vector<int>(n, 0));
    // pi redirection: interior edges of self-folded triangles map to the
    // encircling edge.
    std::vector<int> pi(n);
    for (int j = 0; j < n; ++j) pi[j] = j;
    std::vector<char> self_folded_tri(T.triangles.size(), 0);
    for (int ti = 0; ti < static_cast<int>(T.triangles.size()); ++ti) {
        const Triangle& t = T.triangles[ti];
        for (int s = 0; s < 3; ++s)
            if (t.edge[s] == t.edge[(s + 1) % 3]) {
                self_folded_tri[ti] = 1;
                const int j = t.edge[s];
                const int enc = t.edge[(s + 2) % 3];
                if (T.is_arc_edge(j) && T.is_arc_edge(enc)) pi[j] = enc;
            }
    }
    std::map<int, std::vector<int>> preimage;  // edge -> arcs mapping to it
    for (int j = 0; j < n; ++j) preimage[pi[j]].push_back(j);
    for (int ti = 0; ti < static_cast<int>(T.triangles.size()); ++ti) {
        if (self_folded_tri[ti]) continue;
        const Triangle& t = T.triangles[ti];
        for (int s = 0; s < 3; ++s) {
            const int x = t.edge[s], y = t.edge[(s + 1) % 3];
            if (!T.is_arc_edge(x) || !T.is_arc_edge(y)) continue;
            for (int i : preimage[x])
                for (int j : preimage[y]) {
                    eps[i][j] += 1;
                    eps[j][i] -= 1;
                }
        }
    }
    return eps;
}

inline ExchangeMatrix matrix_mutation(const ExchangeMatrix& e, int k) {
    const int n = static_cast<int>(e.size());
    if (k < 0 || k >= n) throw InvalidInput("mutation index out of range");
    ExchangeMatrix r(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == k || j == k) {
                r[i][j] = -e[i][j];
            } else {
                const int s = (e[i][k] > 0) - (e[i][k] < 0);
                r[i][j] = e[i][j] + s * std::max(0, e[i][k] * e[k][j]);
            }
        }
    return r;
}

// ---------------------------------------------------------------------------
// Quivers with potential (regular triangulations only).

struct QuiverWithPotential {
    int vertices = 0;                                  // arcs of T
    std::vector<std::pair<int, int>> arrows;           // (source, target)
    // cycles as vertex lists in arrow-following order, with a coefficient:
    // +1 for triangle cycles, -epsilon(p) for the puncture cycle
    std::vector<std::pair<int, std::vector<int>>> potential_terms;
};

inline QuiverWithPotential quiver_with_potential(const IdealTriangulation& T,
                                                 int puncture_sign = +1) {
    if (!is_regular(T))
        throw NotRegular("potential is defined here for regular triangulations");
    QuiverWithPotential Q;
    Q.vertices = T.n();
    ExchangeMatrix eps = exchange_matrix(T);
    for (int i = 0; i < T.n(); ++i)
        for (int j = 0; j < T.n(); ++j)
            for (int m = 0; m < eps[i][j]; ++m) Q.arrows.push_back({j, i});
    // one clockwise 3-cycle per triangle whose edges are all arcs
    for (const Triangle& t : T.triangles) {
        if (T.is_arc_edge(t.edge[0]) && T.is_arc_edge(t.edge[1]) &&
            T.is_arc_edge(t.edge[2]))
            Q.potential_terms.push_back({+1, {t.edge[2], t.edge[1], t.edge[0]}});
    }
    // counterclockwise cycle around the puncture
    if (T.punctured()) {
        std::map<int, int> next_cw;  // wedge (x,y) at the puncture: x -> y
        for (const Triangle& t : T.triangles)
            for (int s = 0; s < 3; ++s)
                if (t.corner[s] == kPuncture)
                    next_cw[t.edge[s]] = t.edge[(s + 1) % 3];
        std::vector<int> chain;
        int start = next_cw.begin()->first;
        int cur = start;
        do {
            chain.push_back(cur);
            cur = next_cw.at(cur);
        } while (cur != start && chain.size() <= next_cw.size());
        std::reverse(chain.begin(), chain.end());  // ccw order
        Q.potential_terms.push_back({-puncture_sign, chain});
    }
    return Q;
}

// ---------------------------------------------------------------------------
// Flip-graph exploration.

struct FlipGraph {
    std::vector<IdealTriangulation> nodes;
    std::vector<std::vector<int>> adj;  // adj[v][arc] = neighbor index, -1 if
                                        // the arc is not flippable
};

inline FlipGraph flip_graph(const MarkedBorderedSurface& s) {
    FlipGraph G;
    std::map<std::vector<std::tuple<int, int, int>>, int> index;
    std::deque<int> q;
    G.nodes.push_back(fan_triangulation(s));
    index[G.nodes[0].canonical_arcs()] = 0;
    q.push_back(0);
    while (!q.empty()) {
        const int v = q.front();
        q.pop_front();
        const int n = G.nodes[v].n();
        if (static_cast<int>(G.adj.size()) <= v) G.adj.resize(v + 1);
        G.adj[v].assign(n, -1);
        for (int k = 0; k < n; ++k) {
            IdealTriangulation next;
            try {
                next = flip(G.nodes[v], k);
            } catch (const FlipNotAllowed&) {
                continue;
            }
            auto key = next.canonical_arcs();
            auto it = index.find(key);
            int w;
            if (it == index.end()) {
                w = static_cast<int>(G.nodes.size());
                G.nodes.push_back(next);
                index[key] = w;
                q.push_back(w);
            } else {
                w = it->second;
            }
            G.adj[v][k] = w;
        }
    }
    G.adj.resize(G.nodes.size());
    return G;
}

struct TaggedFlipGraph {
    std::vector<TaggedTriangulation> nodes;
    std::vector<std::vector<int>> adj;  // adj[v][arc] = neighbor index
};

inline TaggedFlipGraph tagged_flip_graph(const MarkedBorderedSurface& s) {
    TaggedFlipGraph G;
    std::map<TaggedTriangulation::Key, int> index;
    std::deque<int> q;
    G.nodes.push_back(TaggedTriangulation{fan_triangulation(s), +1});
    index[G.nodes[0].key()] = 0;
    q.push_back(0);
    while (!q.empty()) {
        const int v = q.front();
        q.pop_front();
        const int n = G.nodes[v].T.n();
        if (static_cast<int>(G.adj.size()) <= v) G.adj.resize(v + 1);
        G.adj[v].assign(n, -1);
        for (int k = 0; k < n; ++k) {
            TaggedTriangulation next = tagged_flip(G.nodes[v], k);
            auto key = next.key();
            auto it = index.find(key);
            int w;
            if (it == index.end()) {
                w = static_cast<int>(G.nodes.size());
                G.nodes.push_back(next);
                index[key] = w;
                q.push_back(w);
            } else {
                w = it->second;
            }
            G.adj[v][k] = w;
        }
    }
    G.adj.resize(G.nodes.size());
    return G;
}

// Reconstruct the triangulation carrying a given compatible arc set.
inline IdealTriangulation triangulation_from_arcs(
    const MarkedBorderedSurface& s, std::vector<Arc> arcs) {
    std::vector<std::tuple<int, int, int>> want;
    for (const Arc& a : arcs) want.push_back(a.key());
    std::sort(want.begin(), want.end());
    FlipGraph G = flip_graph(s);
    for (const IdealTriangulation& T : G.nodes)
        if (T.canonical_arcs() == want) return T;
    throw InvalidInput("arc set is not an ideal triangulation of the surface");
}

// Quadrilateral around an arc: corners c1..c4 in counterclockwise order with
// the arc joining c1 and c3; side[i] is the edge id between corner i and
// corner i+1 (mod 4). Throws for self-folded interior edges.
struct ArcQuad {
    std::array<int, 4> corner{};  // c1, c2, c3, c4
    std::array<int, 4> side{};    // edges c1c2, c2c3, c3c4, c4c1
};

inline ArcQuad quad_of_arc(const IdealTriangulation& T, int j) {
    auto occ = detail::edge_slots(T, j);
    if (occ.size() != 2 || occ[0].first == occ[1].first)
        throw DegenerateQuadrilateral("arc is the interior edge of a self-folded triangle");
    const Triangle t1 = detail::rotate_to_front(T.triangles[occ[0].first], occ[0].second);
    const Triangle t2 = detail::rotate_to_front(T.triangles[occ[1].first], occ[1].second);
    // ccw around the quad: cB(=x1=z2), y1, cA(=z1=x2), y2; arc joins cB-cA
    ArcQuad q;
    q.corner = {t1.corner[0], t1.corner[1], t1.corner[2], t2.corner[1]};
    q.side = {t1.edge[1], t1.edge[2], t2.edge[1], t2.edge[2]};
    return q;
}

}  // namespace spectra

#pragma once

#include "relutopo/transversality.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace relutopo {

/// N = F^-1(-inf, t), B = F^-1(t), Y = F^-1(t, inf).
enum class Region : int { N = 0, B = 1, Y = 2 };

inline const char* to_string(Region r) {
    switch (r) {
    case Region::N: return "N";
    case Region::B: return "B";
    case Region::Y: return "Y";
    }
    return "?";
}

inline Region region_of(Sign s) {
    return static_cast<Region>(static_cast<int>(s) + 1);
}

/// The threshold hits a value of F on a cell where F is constant.
class NonTransversalThreshold : public std::domain_error {
public:
    NonTransversalThreshold(Rational t, std::set<Rational> bad)
        : std::domain_error("threshold " + relutopo::to_string(t) + " is not transversal"), threshold(std::move(t)),
          nontransversal(std::move(bad)) {}
    Rational threshold;
    std::set<Rational> nontransversal;
};

/// A theorem checker was asked about an architecture outside its hypotheses.
class NotApplicable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Component {
    std::vector<SignVector> cells; // keys in the threshold-refined complex, sorted
    bool bounded = false;
};

struct RegionComponents {
    std::vector<Component> components;

    bool empty() const noexcept { return components.empty(); }
    std::size_t bounded_count() const {
        std::size_t n = 0;
        for (const auto& c : components) n += c.bounded;
        return n;
    }
};

struct DecisionTopology {
    Rational threshold;
    std::array<RegionComponents, 3> regions; // indexed by Region

    const RegionComponents& operator[](Region r) const { return regions[static_cast<int>(r)]; }
    RegionComponents& operator[](Region r) { return regions[static_cast<int>(r)]; }
};

namespace detail {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace detail

/// Components of each decision region of a threshold-refined complex. Two cells of
/// the same region are joined when one is a face of the other.
inline DecisionTopology topology_of_refined(const CanonicalComplex& refined) {
    if (!refined.threshold) throw PreconditionError("topology_of_refined: complex has no threshold coordinate");
    DecisionTopology topo;
    topo.threshold = *refined.threshold;
    for (Region r : {Region::N, Region::B, Region::Y}) {
        std::vector<const Cell*> members;
        for (const auto& [key, cell] : refined.cells)
            if (region_of(key.back()) == r) members.push_back(&cell);
        detail::DisjointSets ds(members.size());
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                if (is_face_of(members[a]->sign, members[b]->sign) || is_face_of(members[b]->sign, members[a]->sign))
                    ds.unite(a, b);
        std::map<std::size_t, Component> by_root; // root is the smallest index, so roots follow key order
        for (std::size_t a = 0; a < members.size(); ++a) {
            auto& comp = by_root[ds.find(a)];
            if (comp.cells.empty()) comp.bounded = true;
            comp.cells.push_back(members[a]->sign);
            comp.bounded = comp.bounded && members[a]->bounded;
        }
        for (auto& [root, comp] : by_root) topo[r].components.push_back(std::move(comp));
    }
    return topo;
}

/// Everything computed for one (network, threshold) pair.
struct DecisionAnalysis {
    CanonicalComplex complex;
    CanonicalComplex refined;
    DecisionTopology topology;

    /// Index of the component of region r holding the refined key, if any.
    std::optional<std::size_t> component_of(Region r, const SignVector& refined_key) const {
        const auto& comps = topology[r].components;
        for (std::size_t i = 0; i < comps.size(); ++i)
            if (std::binary_search(comps[i].cells.begin(), comps[i].cells.end(), refined_key)) return i;
        return std::nullopt;
    }
};

inline DecisionAnalysis analyze_decision(CanonicalComplex c, const Rational& t) {
    if (!is_transversal_threshold(c, t)) throw NonTransversalThreshold(t, nontransversal_thresholds(c));
    DecisionAnalysis a;
    a.refined = refine_by_threshold(c, t);
    a.topology = topology_of_refined(a.refined);
    a.complex = std::move(c);
    return a;
}

inline DecisionAnalysis analyze_decision(const ReluNetwork& net, const Rational& t) {
    return analyze_decision(build_complex(net), t);
}

inline DecisionTopology decision_topology(const ReluNetwork& net, const Rational& t) {
    return analyze_decision(net, t).topology;
}

enum class EdgeShape { Segment, Ray, Line };

inline const char* to_string(EdgeShape s) {
    switch (s) {
    case EdgeShape::Segment: return "segment";
    case EdgeShape::Ray: return "ray";
    case EdgeShape::Line: return "line";
    }
    return "?";
}

/// A 1-cell with its geometry. Segments run from `base` to `base + direction`;
/// rays start at `base`; lines pass through it. For oriented segments and lines the
/// direction points where F increases, so `slope` is 0 (flat) or +1 for those; rays
/// keep their outward direction and may have slope -1.
struct SkeletonEdge {
    SignVector key;
    EdgeShape shape = EdgeShape::Segment;
    RatVector base;
    RatVector direction;
    int slope = 0;

    bool flat() const noexcept { return slope == 0; }
    RatVector far_point() const { return base + direction; }
};

struct SkeletonVertex {
    SignVector key;
    RatVector point;
};

struct OrientedSkeleton {
    std::vector<SkeletonVertex> vertices;
    std::vector<SkeletonEdge> edges;
};

namespace detail {

inline SkeletonEdge edge_geometry(const Cell& cell) {
    const auto dirs = null_space(RatMatrix::from_rows(equality_normals(cell.hrep), cell.hrep.dim));
    if (dirs.size() != 1) throw std::logic_error("edge_geometry: cell is not one-dimensional");
    SkeletonEdge e;
    e.key = cell.sign;
    const RatVector& d = dirs.front();
    auto hi = lp_optimize(cell.hrep, d, true);
    auto lo = lp_optimize(cell.hrep, d, false);
    const bool has_hi = hi.status == LpStatus::Optimal, has_lo = lo.status == LpStatus::Optimal;
    if (has_hi && has_lo) {
        e.shape = EdgeShape::Segment;
        e.base = lo.point;
        e.direction = hi.point - lo.point;
    } else if (has_lo) {
        e.shape = EdgeShape::Ray;
        e.base = lo.point;
        e.direction = d;
    } else if (has_hi) {
        e.shape = EdgeShape::Ray;
        e.base = hi.point;
        e.direction = Rational(-1) * d;
    } else {
        e.shape = EdgeShape::Line;
        e.base = cell.interior_point;
        e.direction = d;
    }
    // Two exact evaluations of F on the edge closure.
    e.slope = sign(cell.value_at(e.far_point()) - cell.value_at(e.base));
    if (e.slope < 0 && e.shape != EdgeShape::Ray) {
        if (e.shape == EdgeShape::Segment) e.base = e.far_point();
        e.direction = Rational(-1) * e.direction;
        e.slope = 1;
    }
    return e;
}

} // namespace detail

inline OrientedSkeleton oriented_skeleton(const CanonicalComplex& c) {
    OrientedSkeleton s;
    for (const auto& [key, cell] : c.cells) {
        if (cell.dim == 0) s.vertices.push_back({key, cell.interior_point});
        if (cell.dim == 1) s.edges.push_back(detail::edge_geometry(cell));
    }
    return s;
}

inline OrientedSkeleton oriented_skeleton(const ReluNetwork& net) {
    return oriented_skeleton(build_complex(net));
}

/// Sign of (W(m+1) W_m^theta ... W_1^theta) . direction, where theta is the
/// coordinatewise product of the patterns of the full-dimensional cells around the edge.
inline int hadamard_orientation(const ReluNetwork& net, const CanonicalComplex& c, const SkeletonEdge& e) {
    std::optional<ActivationPattern> theta;
    for (const Cell* f : c.cofaces(e.key)) {
        if (static_cast<std::size_t>(f->dim) != c.ambient_dim) continue;
        auto p = pattern_of(c, f->sign);
        if (!theta) {
            theta = std::move(p);
            continue;
        }
        for (std::size_t i = 0; i < p.layers.size(); ++i)
            for (std::size_t j = 0; j < p.layers[i].size(); ++j)
                theta->layers[i][j] = theta->layers[i][j] && p.layers[i][j];
    }
    if (!theta) throw std::logic_error("hadamard_orientation: edge has no full-dimensional coface");
    return sign(dot(masked_affine(net, *theta).weights.row(0), e.direction));
}

struct MaxSubgraphCertificate {
    Region region = Region::Y;
    std::size_t component = 0;
    bool maximize = true;
    Rational extremum;
    // Keys below are cells of the unrefined complex.
    std::vector<SignVector> flat_vertices, flat_edges;           // where F equals the extremum
    std::vector<SignVector> enclosing_vertices, enclosing_edges; // graph inside S reaching the flat part
    std::vector<SignVector> inward_edges;                        // leave the enclosing graph across the boundary
    bool all_inward = true;
    bool enclosing_equals_flat = false;
};

/// Where a bounded Y-component attains its maximum (N: minimum), with the subgraph
/// of the 1-skeleton inside the component that reaches it and the edges pointing in.
inline MaxSubgraphCertificate max_subgraph(const DecisionAnalysis& a, Region r, std::size_t index) {
    if (r == Region::B) throw PreconditionError("max_subgraph: component must belong to Y or N");
    const auto& comps = a.topology[r].components;
    if (index >= comps.size()) throw std::out_of_range("max_subgraph: no such component");
    if (!comps[index].bounded) throw PreconditionError("max_subgraph: component is unbounded");

    MaxSubgraphCertificate cert;
    cert.region = r;
    cert.component = index;
    cert.maximize = r == Region::Y;
    const Rational& t = a.topology.threshold;

    auto refined_key = [&](const SignVector& key, const Rational& value) {
        SignVector k = key;
        k.push_back(sign_of(value - t));
        return k;
    };

    std::map<SignVector, Rational> inside; // vertices of the component
    for (const auto& [key, cell] : a.complex.cells) {
        if (cell.dim != 0) continue;
        Rational v = cell.value_at(cell.interior_point);
        if (a.component_of(r, refined_key(key, v)) == index) inside.emplace(key, std::move(v));
    }
    if (inside.empty()) throw std::logic_error("max_subgraph: bounded component without a vertex");
    cert.extremum = inside.begin()->second;
    for (const auto& [key, v] : inside)
        if (cert.maximize ? v > cert.extremum : v < cert.extremum) cert.extremum = v;

    // Edge endpoints are its 0-dimensional faces.
    std::map<SignVector, std::vector<SignVector>> ends;
    for (const auto& [key, cell] : a.complex.cells) {
        if (cell.dim != 1) continue;
        auto& e = ends[key];
        for (const Cell* f : a.complex.faces(key))
            if (f->dim == 0) e.push_back(f->sign);
    }
    auto in_s = [&](const SignVector& v) { return inside.count(v) > 0; };
    std::vector<SignVector> inner_edges;
    for (const auto& [key, e] : ends)
        if (e.size() == 2 && in_s(e[0]) && in_s(e[1])) inner_edges.push_back(key);

    for (const auto& [key, v] : inside)
        if (v == cert.extremum) cert.flat_vertices.push_back(key);
    std::set<SignVector> flat_set(cert.flat_vertices.begin(), cert.flat_vertices.end());
    for (const auto& key : inner_edges) {
        const auto& e = ends[key];
        if (flat_set.count(e[0]) && flat_set.count(e[1])) cert.flat_edges.push_back(key);
    }

    // Connected components of (inside, inner_edges) that meet the flat part.
    std::vector<SignVector> verts;
    std::map<SignVector, std::size_t> vid;
    for (const auto& [key, v] : inside) {
        vid[key] = verts.size();
        verts.push_back(key);
    }
    detail::DisjointSets ds(verts.size());
    for (const auto& key : inner_edges) ds.unite(vid[ends[key][0]], vid[ends[key][1]]);
    std::set<std::size_t> roots;
    for (const auto& key : cert.flat_vertices) roots.insert(ds.find(vid[key]));
    std::set<SignVector> enclosing;
    for (std::size_t i = 0; i < verts.size(); ++i)
        if (roots.count(ds.find(i))) {
            cert.enclosing_vertices.push_back(verts[i]);
            enclosing.insert(verts[i]);
        }
    for (const auto& key : inner_edges)
        if (enclosing.count(ends[key][0])) cert.enclosing_edges.push_back(key);
    cert.enclosing_equals_flat =
        cert.enclosing_vertices == cert.flat_vertices && cert.enclosing_edges == cert.flat_edges;

    for (const auto& [key, e] : ends) {
        const bool touches = std::any_of(e.begin(), e.end(), [&](const SignVector& v) { return enclosing.count(v) > 0; });
        const bool contained = e.size() == 2 && in_s(e[0]) && in_s(e[1]);
        if (!touches || contained) continue;
        cert.inward_edges.push_back(key);
        const auto edge = detail::edge_geometry(a.complex.at(key));
        const SignVector& anchor = enclosing.count(e[0]) ? e[0] : e[1];
        const Rational at_anchor = inside.at(anchor);
        // Any other point of the closed edge.
        const Cell& ec = a.complex.at(key);
        const RatVector other = a.complex.at(anchor).interior_point == edge.base ? edge.far_point() : edge.base;
        const Rational elsewhere = ec.value_at(other);
        const bool inward = cert.maximize ? at_anchor > elsewhere : at_anchor < elsewhere;
        cert.all_inward = cert.all_inward && inward;
    }
    return cert;
}

inline MaxSubgraphCertificate max_subgraph(const ReluNetwork& net, const Rational& t, Region r, std::size_t index) {
    return max_subgraph(analyze_decision(net, t), r, index);
}

enum class Theorem { Johnson, OneBounded };

inline const char* to_string(Theorem t) {
    return t == Theorem::Johnson ? "johnson" : "one-bounded";
}

struct VerificationReport {
    Theorem theorem = Theorem::Johnson;
    Rational threshold;
    bool pass = false;
    std::array<std::size_t, 3> bounded{}; // bounded components per region, indexed by Region
    std::vector<std::pair<Region, std::size_t>> offending; // components violating the claim
};

inline void check_johnson_applicable(const ReluNetwork& net) {
    if (net.input_dim() < 2) throw NotApplicable("input dimension must be at least 2");
    if (net.width() > net.input_dim())
        throw NotApplicable("network width " + std::to_string(net.width()) + " exceeds input dimension " +
                            std::to_string(net.input_dim()));
}

inline void check_one_bounded_applicable(const ReluNetwork& net) {
    const auto& a = net.architecture();
    if (a.size() != 3 || a[1] != a[0] + 1)
        throw NotApplicable("architecture must be (n, n+1, 1)");
}

/// No decision region has a bounded component when every hidden layer is at most n0 wide.
inline VerificationReport verify_johnson(const ReluNetwork& net, const DecisionAnalysis& a) {
    check_johnson_applicable(net);
    VerificationReport rep;
    rep.theorem = Theorem::Johnson;
    rep.threshold = a.topology.threshold;
    for (Region r : {Region::N, Region::B, Region::Y}) {
        const auto& comps = a.topology[r].components;
        rep.bounded[static_cast<int>(r)] = a.topology[r].bounded_count();
        for (std::size_t i = 0; i < comps.size(); ++i)
            if (comps[i].bounded) rep.offending.emplace_back(r, i);
    }
    rep.pass = rep.offending.empty();
    return rep;
}

inline VerificationReport verify_johnson(const ReluNetwork& net, const Rational& t) {
    check_johnson_applicable(net);
    return verify_johnson(net, analyze_decision(net, t));
}

/// At most one bounded component in each of Y and N for architecture (n, n+1, 1).
inline VerificationReport verify_one_bounded(const ReluNetwork& net, const DecisionAnalysis& a) {
    check_one_bounded_applicable(net);
    VerificationReport rep;
    rep.theorem = Theorem::OneBounded;
    rep.threshold = a.topology.threshold;
    for (Region r : {Region::N, Region::B, Region::Y}) rep.bounded[static_cast<int>(r)] = a.topology[r].bounded_count();
    for (Region r : {Region::N, Region::Y}) {
        if (a.topology[r].bounded_count() <= 1) continue;
        const auto& comps = a.topology[r].components;
        for (std::size_t i = 0; i < comps.size(); ++i)
            if (comps[i].bounded) rep.offending.emplace_back(r, i);
    }
    rep.pass = rep.offending.empty();
    return rep;
}

inline VerificationReport verify_one_bounded(const ReluNetwork& net, const Rational& t) {
    check_one_bounded_applicable(net);
    return verify_one_bounded(net, analyze_decision(net, t));
}

} // namespace relutopo

#pragma once

#include "relutopo/cell.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <set>
#include <vector>

namespace relutopo {

/// Zero set of weight . x + bias. A row with zero weight is degenerate.
struct AffineRow {
    RatVector weight;
    Rational bias;

    Rational eval(std::span<const Rational> x) const { return dot(weight, x) + bias; }
    bool degenerate() const { return is_zero(weight); }
    bool operator==(const AffineRow&) const = default;
};

/// Ordered solution sets of the rows of (W|b).
struct SolutionSetArrangement {
    std::size_t ambient_dim = 0;
    std::vector<AffineRow> rows;

    static SolutionSetArrangement from_affine(const AffineMap& a) {
        SolutionSetArrangement s{a.in_dim(), {}};
        for (std::size_t i = 0; i < a.out_dim(); ++i) s.rows.push_back({a.weights.row_vector(i), a.bias[i]});
        return s;
    }
};

/// Ordered hyperplanes co-oriented toward {weight . x + bias > 0}.
struct CoorientedArrangement {
    std::size_t ambient_dim = 0;
    std::vector<AffineRow> hyperplanes;
    std::vector<std::size_t> provenance; // index of each hyperplane in the source arrangement

    std::size_t size() const noexcept { return hyperplanes.size(); }
};

/// Bit i is set iff the region lies on the positive side of hyperplane i.
using RegionCode = std::vector<bool>;

inline CoorientedArrangement derive_arrangement(const SolutionSetArrangement& s) {
    CoorientedArrangement a{s.ambient_dim, {}, {}};
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        if (s.rows[i].degenerate()) continue;
        a.hyperplanes.push_back(s.rows[i]);
        a.provenance.push_back(i);
    }
    return a;
}

/// Every p-fold intersection has dimension n - p, and is empty when n - p < 0.
inline bool is_generic(const SolutionSetArrangement& s) {
    const std::size_t n = s.ambient_dim;
    const std::size_t k = s.rows.size();
    const std::size_t max_p = std::min(k, n + 1);
    std::vector<std::size_t> idx;
    // Subsets larger than n + 1 are empty whenever all (n+1)-subsets are.
    std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
        if (!idx.empty()) {
            std::vector<RatVector> w, wb;
            for (auto i : idx) {
                w.push_back(s.rows[i].weight);
                RatVector aug = s.rows[i].weight;
                aug.push_back(s.rows[i].bias);
                wb.push_back(std::move(aug));
            }
            const std::size_t p = idx.size();
            const std::size_t rw = rank(w, n);
            if (p <= n) {
                if (rw != p) return false;
            } else if (rank(wb, n + 1) == rw) {
                return false; // consistent, so nonempty
            }
        }
        if (idx.size() == max_p) return true;
        for (std::size_t i = start; i < k; ++i) {
            idx.push_back(i);
            bool ok = rec(i + 1);
            idx.pop_back();
            if (!ok) return false;
        }
        return true;
    };
    return rec(0);
}

/// Rank of the arrangement: dimension spanned by the normals.
inline std::size_t arrangement_rank(const CoorientedArrangement& a) {
    std::vector<RatVector> w;
    for (const auto& h : a.hyperplanes) w.push_back(h.weight);
    return w.empty() ? 0 : rank(w, a.ambient_dim);
}

namespace detail {

inline bool coincident(const AffineRow& a, const AffineRow& b) {
    RatVector x = a.weight, y = b.weight;
    x.push_back(a.bias);
    y.push_back(b.bias);
    return rank({x, y}, x.size()) == 1;
}

// Restrict `rows` to the hyperplane h by eliminating one coordinate. Rows whose
// trace on h is empty or all of h are dropped.
inline std::vector<AffineRow> restrict_to(const std::vector<AffineRow>& rows, const AffineRow& h) {
    const std::size_t n = h.weight.size();
    std::size_t p = 0;
    while (h.weight[p].is_zero()) ++p;
    std::vector<AffineRow> out;
    for (const auto& k : rows) {
        Rational f = k.weight[p] / h.weight[p];
        AffineRow r;
        r.weight.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != p) r.weight.push_back(k.weight[j] - f * h.weight[j]);
        r.bias = k.bias - f * h.bias;
        if (!r.degenerate()) out.push_back(std::move(r));
    }
    return out;
}

inline std::size_t count_regions(const std::vector<AffineRow>& hs) {
    if (hs.empty()) return 1;
    const AffineRow& h = hs.back();
    std::vector<AffineRow> rest(hs.begin(), hs.end() - 1);
    for (const auto& k : rest)
        if (coincident(k, h)) return count_regions(rest);
    return count_regions(rest) + count_regions(restrict_to(rest, h));
}

} // namespace detail

/// Number of connected components of the complement, by deletion-restriction.
inline std::size_t count_regions(const CoorientedArrangement& a) {
    return detail::count_regions(a.hyperplanes);
}

/// Codes whose open sign systems are nonempty.
inline std::set<RegionCode> realizable_codes(const CoorientedArrangement& a) {
    std::set<RegionCode> out;
    RegionCode code;
    LinearSystem sys(a.ambient_dim);
    std::function<void()> rec = [&] {
        if (!lp_feasible(sys, all_inequalities(sys))) return;
        if (code.size() == a.size()) {
            out.insert(code);
            return;
        }
        const auto& h = a.hyperplanes[code.size()];
        for (bool bit : {false, true}) {
            code.push_back(bit);
            sys.geq(bit ? h.weight : Rational(-1) * h.weight, bit ? h.bias : Rational(-h.bias));
            rec();
            sys.inequalities.pop_back();
            code.pop_back();
        }
    };
    rec();
    return out;
}

/// The open region carrying `code`, as a system with all inequalities strict.
inline LinearSystem region_system(const CoorientedArrangement& a, const RegionCode& code) {
    if (code.size() != a.size()) throw InvalidInput("region_system: code length mismatch");
    LinearSystem sys(a.ambient_dim);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& h = a.hyperplanes[i];
        sys.geq(code[i] ? h.weight : Rational(-1) * h.weight, code[i] ? h.bias : Rational(-h.bias));
    }
    return sys;
}

/// Intersection points of every rank-n family of n hyperplanes.
inline std::set<RatVector> enumerate_vertices(const CoorientedArrangement& a) {
    const std::size_t n = a.ambient_dim;
    std::set<RatVector> out;
    if (a.size() < n) return out;
    std::vector<std::size_t> idx;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (idx.size() == n) {
            RatMatrix m(n, n);
            RatVector rhs(n);
            for (std::size_t r = 0; r < n; ++r) {
                const auto& h = a.hyperplanes[idx[r]];
                for (std::size_t c = 0; c < n; ++c) m(r, c) = h.weight[c];
                rhs[r] = -h.bias;
            }
            if (auto x = solve(m, rhs)) out.insert(std::move(*x));
            return;
        }
        for (std::size_t i = start; i < a.size(); ++i) {
            idx.push_back(i);
            rec(i + 1);
            idx.pop_back();
        }
    };
    rec(0);
    return out;
}

inline bool is_vertex(const CoorientedArrangement& a, const RatVector& p) {
    if (p.size() != a.ambient_dim) return false;
    std::vector<RatVector> through;
    for (const auto& h : a.hyperplanes)
        if (h.eval(p).is_zero()) through.push_back(h.weight);
    if (a.ambient_dim == 0) return true;
    return !through.empty() && rank(through, a.ambient_dim) == a.ambient_dim;
}

/// Whether the closed segment [p, q] is the closure of a 1-cell.
inline bool vertices_adjacent(const CoorientedArrangement& a, const RatVector& p, const RatVector& q) {
    if (!is_vertex(a, p) || !is_vertex(a, q)) throw PreconditionError("vertices_adjacent: argument is not a vertex");
    if (p == q) return false;
    std::vector<RatVector> common;
    for (const auto& h : a.hyperplanes) {
        Rational hp = h.eval(p), hq = h.eval(q);
        if (hp.is_zero() && hq.is_zero()) {
            common.push_back(h.weight);
        } else if (hp.sign() * hq.sign() < 0) {
            return false;
        }
    }
    const std::size_t r = common.empty() ? 0 : rank(common, a.ambient_dim);
    return r + 1 == a.ambient_dim;
}

/// The face of the closed all-ones region selected by theta: hyperplanes with
/// theta_i = 0 become equalities. For the coordinate arrangement this is
/// {theta (Hadamard) v : v in the closed positive orthant}.
inline Cell face_of_positive_region(const CoorientedArrangement& a, const RegionCode& theta) {
    if (a.size() != a.ambient_dim) throw PreconditionError("face_of_positive_region: need exactly n hyperplanes");
    SolutionSetArrangement s{a.ambient_dim, a.hyperplanes};
    if (!is_generic(s)) throw PreconditionError("face_of_positive_region: arrangement is not generic");
    if (theta.size() != a.size()) throw InvalidInput("face_of_positive_region: code length mismatch");
    Cell c;
    c.hrep = LinearSystem(a.ambient_dim);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& h = a.hyperplanes[i];
        if (theta[i]) {
            c.sign.push_back(Sign::Pos);
            c.hrep.geq(h.weight, h.bias);
        } else {
            c.sign.push_back(Sign::Zero);
            c.hrep.eq(h.weight, h.bias);
        }
    }
    auto pt = lp_interior_point(c.hrep, all_inequalities(c.hrep));
    if (!pt) throw std::logic_error("face_of_positive_region: empty face of a generic arrangement");
    c.interior_point = std::move(*pt);
    c.dim = detail::relative_dimension(c.hrep);
    c.bounded = recession_cone_is_trivial(c.hrep);
    return c;
}

} // namespace relutopo

#pragma once

#include "relutopo/linalg.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace relutopo {

/// normal . x + offset, compared against zero.
struct Constraint {
    RatVector normal;
    Rational offset;

    Rational eval(std::span<const Rational> x) const { return dot(normal, x) + offset; }
    bool operator==(const Constraint&) const = default;
};

/// Inequalities read `>= 0`, equalities `= 0`. The empty system is all of R^dim.
struct LinearSystem {
    std::size_t dim = 0;
    std::vector<Constraint> inequalities;
    std::vector<Constraint> equalities;

    explicit LinearSystem(std::size_t d = 0) : dim(d) {}

    LinearSystem& geq(RatVector normal, Rational offset) {
        inequalities.push_back({std::move(normal), std::move(offset)});
        return *this;
    }
    LinearSystem& eq(RatVector normal, Rational offset) {
        equalities.push_back({std::move(normal), std::move(offset)});
        return *this;
    }

    void validate() const {
        for (const auto& c : inequalities)
            if (c.normal.size() != dim) throw InvalidInput("LinearSystem: inequality normal has wrong dimension");
        for (const auto& c : equalities)
            if (c.normal.size() != dim) throw InvalidInput("LinearSystem: equality normal has wrong dimension");
    }

    /// Closed membership: every inequality >= 0 and every equality = 0.
    bool contains(std::span<const Rational> x) const {
        for (const auto& c : equalities)
            if (!c.eval(x).is_zero()) return false;
        for (const auto& c : inequalities)
            if (c.eval(x).sign() < 0) return false;
        return true;
    }

    /// Membership with all inequalities strict.
    bool contains_strictly(std::span<const Rational> x) const {
        for (const auto& c : equalities)
            if (!c.eval(x).is_zero()) return false;
        for (const auto& c : inequalities)
            if (c.eval(x).sign() <= 0) return false;
        return true;
    }

    bool operator==(const LinearSystem&) const = default;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    RatVector point;
};

namespace simplex {

// maximize c.z subject to A z = b, z >= 0. Dense tableau, Bland's rule.
struct StandardForm {
    std::vector<RatVector> a;
    RatVector b;
    RatVector c;
};

struct Solution {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    RatVector z;
};

class Tableau {
public:
    // rows: constraints, last entry of each row is the rhs. objective row separate.
    std::vector<RatVector> t;
    RatVector obj; // reduced costs d_j, rhs at end: z + d.x = obj.back()
    std::vector<std::size_t> basis;
    std::size_t ncols = 0;

    void pivot(std::size_t r, std::size_t c) {
        Rational inv = 1 / t[r][c];
        for (auto& x : t[r]) x *= inv;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i == r || t[i][c].is_zero()) continue;
            Rational f = t[i][c];
            for (std::size_t j = 0; j <= ncols; ++j)
                if (!t[r][j].is_zero()) t[i][j] -= f * t[r][j];
        }
        if (!obj[c].is_zero()) {
            Rational f = obj[c];
            for (std::size_t j = 0; j <= ncols; ++j)
                if (!t[r][j].is_zero()) obj[j] -= f * t[r][j];
        }
        basis[r] = c;
    }

    // Returns false on unboundedness. `allowed` masks columns that may enter.
    bool run(const std::vector<bool>& allowed) {
        for (;;) {
            std::size_t enter = ncols;
            for (std::size_t j = 0; j < ncols; ++j)
                if (allowed[j] && obj[j].sign() < 0) {
                    enter = j;
                    break;
                }
            if (enter == ncols) return true;
            std::size_t leave = t.size();
            Rational best;
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (t[i][enter].sign() <= 0) continue;
                Rational ratio = t[i][ncols] / t[i][enter];
                if (leave == t.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == t.size()) return false;
            pivot(leave, enter);
        }
    }
};

inline Solution solve(const StandardForm& sf) {
    const std::size_t m = sf.a.size();
    const std::size_t n = sf.c.size();
    Tableau tab;
    tab.ncols = n + m; // structural + artificial
    tab.t.assign(m, zeros(n + m + 1));
    tab.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        bool flip = sf.b[i].sign() < 0;
        for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = flip ? Rational(-sf.a[i][j]) : sf.a[i][j];
        tab.t[i][n + i] = 1;
        tab.t[i][n + m] = flip ? Rational(-sf.b[i]) : sf.b[i];
        tab.basis[i] = n + i;
    }
    // Phase 1: maximize -sum(artificial).
    tab.obj = zeros(n + m + 1);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) tab.obj[j] -= tab.t[i][j];
    for (std::size_t i = 0; i < m; ++i) tab.obj[n + m] -= tab.t[i][n + m];
    std::vector<bool> allowed(n + m, true);
    tab.run(allowed);
    if (!tab.obj[n + m].is_zero()) return {LpStatus::Infeasible, {}, {}};

    // Drive artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < tab.t.size();) {
        if (tab.basis[i] < n) {
            ++i;
            continue;
        }
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!tab.t[i][j].is_zero()) {
                col = j;
                break;
            }
        if (col == n) {
            tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
            tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            tab.pivot(i, col);
            ++i;
        }
    }

    // Phase 2 with artificial columns frozen out.
    tab.obj = zeros(n + m + 1);
    for (std::size_t j = 0; j < n; ++j) tab.obj[j] = -sf.c[j];
    for (std::size_t i = 0; i < tab.t.size(); ++i) {
        std::size_t bj = tab.basis[i];
        if (tab.obj[bj].is_zero()) continue;
        Rational f = tab.obj[bj];
        for (std::size_t j = 0; j <= n + m; ++j)
            if (!tab.t[i][j].is_zero()) tab.obj[j] -= f * tab.t[i][j];
    }
    for (std::size_t j = n; j < n + m; ++j) allowed[j] = false;
    if (!tab.run(allowed)) return {LpStatus::Unbounded, {}, {}};

    Solution s{LpStatus::Optimal, tab.obj[n + m], zeros(n)};
    for (std::size_t i = 0; i < tab.t.size(); ++i)
        if (tab.basis[i] < n) s.z[tab.basis[i]] = tab.t[i][n + m];
    return s;
}

// Free variables x are split as x = u - v. Optional extra column `eps` for strict rows.
struct Builder {
    std::size_t dim;
    std::size_t extra; // extra nonnegative columns after u, v (eps)
    std::size_t slack_count = 0;
    std::vector<std::pair<RatVector, Rational>> rows; // coefficients over u,v,extra; rhs
    std::vector<int> slack_sign;                      // -1: row - s = rhs; 0: equality; +1: row + s = rhs

    Builder(std::size_t d, std::size_t e) : dim(d), extra(e) {}

    RatVector expand(const RatVector& normal) const {
        RatVector r = zeros(2 * dim + extra);
        for (std::size_t k = 0; k < dim; ++k) {
            r[k] = normal[k];
            r[dim + k] = -normal[k];
        }
        return r;
    }
    void add(RatVector coeffs, Rational rhs, int s) {
        rows.emplace_back(std::move(coeffs), std::move(rhs));
        slack_sign.push_back(s);
        if (s != 0) ++slack_count;
    }
    StandardForm finish(const RatVector& objective_over_base) const {
        const std::size_t base = 2 * dim + extra;
        StandardForm sf;
        std::size_t slack = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            RatVector r = zeros(base + slack_count);
            std::copy(rows[i].first.begin(), rows[i].first.end(), r.begin());
            if (slack_sign[i] != 0) r[base + slack++] = slack_sign[i];
            sf.a.push_back(std::move(r));
            sf.b.push_back(rows[i].second);
        }
        sf.c = zeros(base + slack_count);
        std::copy(objective_over_base.begin(), objective_over_base.end(), sf.c.begin());
        return sf;
    }
    RatVector recover(const RatVector& z) const {
        RatVector x(dim);
        for (std::size_t k = 0; k < dim; ++k) x[k] = z[k] - z[dim + k];
        return x;
    }
};

} // namespace simplex

/// Exact LP over a LinearSystem with free variables.
inline LpResult lp_optimize(const LinearSystem& sys, const RatVector& objective, bool maximize) {
    sys.validate();
    if (objective.size() != sys.dim) throw InvalidInput("lp_optimize: objective has wrong dimension");
    simplex::Builder b(sys.dim, 0);
    for (const auto& c : sys.inequalities) b.add(b.expand(c.normal), -c.offset, -1);
    for (const auto& c : sys.equalities) b.add(b.expand(c.normal), -c.offset, 0);
    RatVector obj = b.expand(objective);
    if (!maximize)
        for (auto& x : obj) x = -x;
    auto sol = simplex::solve(b.finish(obj));
    if (sol.status != LpStatus::Optimal) return {sol.status, {}, {}};
    LpResult r{LpStatus::Optimal, {}, b.recover(sol.z)};
    r.value = dot(objective, r.point);
    return r;
}

/// A point satisfying the system with the listed inequality rows strict, chosen to
/// maximize the common slack (capped at 1). nullopt when no such point exists.
inline std::optional<RatVector> lp_interior_point(const LinearSystem& sys, const std::set<std::size_t>& strict) {
    sys.validate();
    for (auto i : strict)
        if (i >= sys.inequalities.size()) throw InvalidInput("lp_feasible: strict index out of range");
    simplex::Builder b(sys.dim, 1);
    const std::size_t eps = 2 * sys.dim;
    for (std::size_t i = 0; i < sys.inequalities.size(); ++i) {
        const auto& c = sys.inequalities[i];
        RatVector row = b.expand(c.normal);
        if (strict.count(i)) row[eps] = -1;
        b.add(std::move(row), -c.offset, -1);
    }
    for (const auto& c : sys.equalities) b.add(b.expand(c.normal), -c.offset, 0);
    RatVector cap = zeros(2 * sys.dim + 1);
    cap[eps] = 1;
    b.add(cap, 1, +1);
    RatVector obj = zeros(2 * sys.dim + 1);
    if (!strict.empty()) obj[eps] = 1;
    auto sol = simplex::solve(b.finish(obj));
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    if (!strict.empty() && sol.value.sign() <= 0) return std::nullopt;
    return b.recover(sol.z);
}

inline bool lp_feasible(const LinearSystem& sys, const std::set<std::size_t>& strict = {}) {
    return lp_interior_point(sys, strict).has_value();
}

inline std::set<std::size_t> all_inequalities(const LinearSystem& sys) {
    std::set<std::size_t> s;
    for (std::size_t i = 0; i < sys.inequalities.size(); ++i) s.insert(i);
    return s;
}

/// The homogeneous cone {d : normals.d >= 0, equality normals.d = 0}.
inline LinearSystem recession_cone(const LinearSystem& sys) {
    LinearSystem cone(sys.dim);
    for (const auto& c : sys.inequalities) cone.geq(c.normal, 0);
    for (const auto& c : sys.equalities) cone.eq(c.normal, 0);
    return cone;
}

/// Whether the recession cone of a feasible system is {0}, i.e. the closed set is bounded.
inline bool recession_cone_is_trivial(const LinearSystem& sys) {
    if (!lp_feasible(sys)) throw std::logic_error("recession_cone_is_trivial: infeasible system");
    LinearSystem boxed = recession_cone(sys);
    for (std::size_t k = 0; k < sys.dim; ++k) {
        RatVector e = zeros(sys.dim);
        e[k] = 1;
        boxed.geq(e, 1);
        e[k] = -1;
        boxed.geq(e, 1);
    }
    for (std::size_t k = 0; k < sys.dim; ++k) {
        RatVector e = zeros(sys.dim);
        e[k] = 1;
        for (bool maximize : {true, false}) {
            auto r = lp_optimize(boxed, e, maximize);
            if (!r.value.is_zero()) return false;
        }
    }
    return true;
}

} // namespace relutopo

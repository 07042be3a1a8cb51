#pragma once

#include "relutopo/affine.hpp"
#include "relutopo/lp.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relutopo {

enum class Sign : std::int8_t { Neg = -1, Zero = 0, Pos = 1 };

using SignVector = std::vector<Sign>;

inline Sign sign_of(const Rational& r) {
    return static_cast<Sign>(r.sign());
}

inline char sign_char(Sign s) {
    switch (s) {
    case Sign::Neg: return '-';
    case Sign::Zero: return '0';
    case Sign::Pos: return '+';
    }
    return '?';
}

inline std::string to_string(const SignVector& v) {
    std::string s;
    s.reserve(v.size());
    for (auto x : v) s.push_back(sign_char(x));
    return s;
}

inline SignVector parse_sign_vector(std::string_view s) {
    SignVector v;
    v.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '-': v.push_back(Sign::Neg); break;
        case '0': v.push_back(Sign::Zero); break;
        case '+': v.push_back(Sign::Pos); break;
        default: throw ParseError("bad sign character '" + std::string(1, c) + "'");
        }
    }
    return v;
}

/// Closure order: `face` is obtained from `cell` by turning some -/+ entries into 0.
inline bool is_face_of(const SignVector& face, const SignVector& cell) {
    if (face.size() != cell.size()) return false;
    for (std::size_t i = 0; i < face.size(); ++i)
        if (face[i] != Sign::Zero && face[i] != cell[i]) return false;
    return true;
}

/// Raised when an operation's stated precondition does not hold.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A relatively open polyhedral cell. Every inequality of `hrep` is strict on the
/// cell; relaxing them gives the closure.
struct Cell {
    SignVector sign;
    LinearSystem hrep;
    int dim = 0;
    bool bounded = false;
    AffineMap restriction; // 1 x n0; empty when the cell carries no function
    RatVector interior_point;

    bool contains(std::span<const Rational> x) const { return hrep.contains_strictly(x); }
    bool closure_contains(std::span<const Rational> x) const { return hrep.contains(x); }

    Rational value_at(std::span<const Rational> x) const { return restriction.apply(x)[0]; }
    RatVector gradient() const { return restriction.weights.row_vector(0); }
};

namespace detail {

inline std::vector<RatVector> equality_normals(const LinearSystem& sys) {
    std::vector<RatVector> rows;
    rows.reserve(sys.equalities.size());
    for (const auto& e : sys.equalities) rows.push_back(e.normal);
    return rows;
}

// Dimension of a nonempty relatively open system (strict inequalities feasible).
inline int relative_dimension(const LinearSystem& sys) {
    if (sys.equalities.empty()) return static_cast<int>(sys.dim);
    return static_cast<int>(sys.dim) - static_cast<int>(rank(equality_normals(sys), sys.dim));
}

} // namespace detail

} // namespace relutopo

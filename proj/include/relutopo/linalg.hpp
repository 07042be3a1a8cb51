#pragma once

#include "relutopo/rational.hpp"

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace relutopo {

using RatVector = std::vector<Rational>;

/// Dimension mismatch or otherwise inconsistent arguments.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline RatVector zeros(std::size_t n) {
    return RatVector(n, Rational(0));
}

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size()) throw InvalidInput("dot: dimension mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
    return s;
}

inline bool is_zero(std::span<const Rational> v) {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

inline RatVector operator+(const RatVector& a, const RatVector& b) {
    if (a.size() != b.size()) throw InvalidInput("vector add: dimension mismatch");
    RatVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline RatVector operator-(const RatVector& a, const RatVector& b) {
    if (a.size() != b.size()) throw InvalidInput("vector sub: dimension mismatch");
    RatVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline RatVector operator*(const Rational& s, const RatVector& a) {
    RatVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

/// Dense row-major rational matrix.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    RatMatrix(std::initializer_list<std::initializer_list<Rational>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw InvalidInput("RatMatrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }
    static RatMatrix from_rows(const std::vector<RatVector>& rows, std::size_t cols) {
        RatMatrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) throw InvalidInput("RatMatrix: row length mismatch");
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }
    static RatMatrix identity(std::size_t n) {
        RatMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<Rational> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const Rational> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    RatVector row_vector(std::size_t i) const { return {row(i).begin(), row(i).end()}; }

    RatMatrix transpose() const {
        RatMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    RatVector operator*(std::span<const Rational> x) const {
        if (x.size() != cols_) throw InvalidInput("matrix-vector: dimension mismatch");
        RatVector y(rows_);
        for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
        return y;
    }

    RatMatrix operator*(const RatMatrix& o) const {
        if (cols_ != o.rows_) throw InvalidInput("matrix-matrix: dimension mismatch");
        RatMatrix p(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Rational& a = (*this)(i, k);
                if (a.is_zero()) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) p(i, j) += a * o(k, j);
            }
        return p;
    }

    bool operator==(const RatMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

namespace detail {

// In-place reduced row echelon form; returns pivot columns.
inline std::vector<std::size_t> rref(RatMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c).is_zero()) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        Rational inv = 1 / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c).is_zero()) continue;
            Rational f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace detail

inline std::size_t rank(RatMatrix m) {
    return detail::rref(m).size();
}

inline std::size_t rank(const std::vector<RatVector>& rows, std::size_t cols) {
    return rank(RatMatrix::from_rows(rows, cols));
}

/// Basis of {x : m x = 0}.
inline std::vector<RatVector> null_space(RatMatrix m) {
    auto pivots = detail::rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<RatVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        RatVector v = zeros(m.cols());
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Unique solution of m x = rhs, if m is square and nonsingular.
inline std::optional<RatVector> solve(const RatMatrix& m, std::span<const Rational> rhs) {
    if (m.rows() != rhs.size()) throw InvalidInput("solve: dimension mismatch");
    if (m.rows() != m.cols()) return std::nullopt;
    RatMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = rhs[i];
    }
    auto pivots = detail::rref(aug);
    if (pivots.size() != m.cols() || (!pivots.empty() && pivots.back() == m.cols())) return std::nullopt;
    RatVector x(m.cols());
    for (std::size_t i = 0; i < m.cols(); ++i) x[i] = aug(i, m.cols());
    return x;
}

/// Whether v lies in the span of the given rows.
inline bool in_row_space(const std::vector<RatVector>& rows, const RatVector& v) {
    if (is_zero(v)) return true;
    if (rows.empty()) return false;
    auto with = rows;
    with.push_back(v);
    return rank(with, v.size()) == rank(rows, v.size());
}

} // namespace relutopo

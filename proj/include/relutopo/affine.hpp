#pragma once

#include "relutopo/linalg.hpp"

#include <cstddef>
#include <stdexcept>

namespace relutopo {

/// x -> W x + b, the augmented (W|b) form.
struct AffineMap {
    RatMatrix weights;
    RatVector bias;

    AffineMap() = default;
    AffineMap(RatMatrix w, RatVector b) : weights(std::move(w)), bias(std::move(b)) {
        if (bias.size() != weights.rows()) throw InvalidInput("AffineMap: bias length must equal row count");
    }

    static AffineMap identity(std::size_t n) { return {RatMatrix::identity(n), zeros(n)}; }

    std::size_t in_dim() const noexcept { return weights.cols(); }
    std::size_t out_dim() const noexcept { return weights.rows(); }

    RatVector apply(std::span<const Rational> x) const {
        RatVector y = weights * x;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias[i];
        return y;
    }

    /// (*this) after inner: x -> W (inner(x)) + b.
    AffineMap after(const AffineMap& inner) const {
        if (in_dim() != inner.out_dim()) throw InvalidInput("AffineMap::after: dimension mismatch");
        RatVector b = weights * inner.bias;
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += bias[i];
        return {weights * inner.weights, std::move(b)};
    }

    bool operator==(const AffineMap&) const = default;
};

} // namespace relutopo

#pragma once

// Helpers shared by the test suites. The evaluators and the grid flood fill here
// share no code with the library, so they can serve as oracles.

#include "relutopo/harness.hpp"

#include <cmath>
#include <deque>
#include <random>
#include <string>
#include <vector>

namespace support {

using namespace relutopo;

inline std::string sample_path(const std::string& name) {
    return std::string(RELUTOPO_SAMPLES_DIR) + "/" + name;
}

inline Rational random_int(std::mt19937_64& rng, int bound) {
    return Rational(std::uniform_int_distribution<int>(-bound, bound)(rng));
}

inline ReluNetwork random_net(std::mt19937_64& rng, const std::vector<std::size_t>& arch, int bound) {
    std::vector<AffineMap> layers;
    for (std::size_t i = 0; i + 1 < arch.size(); ++i) {
        RatMatrix w(arch[i + 1], arch[i]);
        for (std::size_t r = 0; r < w.rows(); ++r)
            for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = random_int(rng, bound);
        RatVector b(arch[i + 1]);
        for (auto& x : b) x = random_int(rng, bound);
        layers.emplace_back(std::move(w), std::move(b));
    }
    return {arch, std::move(layers)};
}

/// Network from integer tables, layer by layer.
inline ReluNetwork make_net(const std::vector<std::size_t>& arch, const std::vector<std::vector<std::vector<int>>>& w,
                            const std::vector<std::vector<int>>& b) {
    std::vector<AffineMap> layers;
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::vector<RatVector> rows;
        for (const auto& r : w[i]) rows.emplace_back(r.begin(), r.end());
        layers.emplace_back(RatMatrix::from_rows(rows, arch[i]), RatVector(b[i].begin(), b[i].end()));
    }
    return {arch, std::move(layers)};
}

inline RatVector random_point(std::mt19937_64& rng, std::size_t dim, int range = 10, int denom = 16) {
    RatVector x(dim);
    for (auto& v : x) v = Rational(std::uniform_int_distribution<int>(-range * denom, range * denom)(rng), denom);
    return x;
}

/// A random point of the relative interior: walk from the stored witness along a
/// random direction of the affine hull, stopping short of every facet.
inline RatVector sample_in_cell(const Cell& cell, std::mt19937_64& rng) {
    const RatVector& p = cell.interior_point;
    const std::size_t n = p.size();
    std::vector<RatVector> basis;
    if (cell.hrep.equalities.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            RatVector e = zeros(n);
            e[i] = 1;
            basis.push_back(e);
        }
    } else {
        std::vector<RatVector> rows;
        for (const auto& e : cell.hrep.equalities) rows.push_back(e.normal);
        basis = null_space(RatMatrix::from_rows(rows, n));
    }
    if (basis.empty()) return p;
    RatVector d = zeros(n);
    for (const auto& b : basis) d = d + random_int(rng, 3) * b;
    std::optional<Rational> limit;
    for (const auto& c : cell.hrep.inequalities) {
        const Rational a = dot(c.normal, d);
        if (a.sign() < 0) {
            const Rational s = c.eval(p) / -a;
            if (!limit || s < *limit) limit = s;
        }
    }
    const Rational frac(std::uniform_int_distribution<int>(1, 99)(rng), 100);
    return p + (limit ? frac * *limit : Rational(4) * frac) * d;
}

/// Evaluation written out directly from the definition, sharing no code with the library.
inline Rational reference_eval(const ReluNetwork& net, const RatVector& x) {
    std::vector<Rational> h = x;
    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& a = layers[i];
        std::vector<Rational> next(a.out_dim());
        for (std::size_t r = 0; r < a.out_dim(); ++r) {
            Rational acc = a.bias[r];
            for (std::size_t c = 0; c < a.in_dim(); ++c) acc += a.weights(r, c) * h[c];
            const bool hidden = i + 1 < layers.size();
            next[r] = hidden && acc < 0 ? Rational(0) : acc;
        }
        h = std::move(next);
    }
    return h[0];
}

inline double double_eval(const ReluNetwork& net, double x, double y) {
    std::vector<double> h{x, y};
    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& a = layers[i];
        std::vector<double> next(a.out_dim());
        for (std::size_t r = 0; r < a.out_dim(); ++r) {
            double acc = to_double(a.bias[r]);
            for (std::size_t c = 0; c < a.in_dim(); ++c) acc += to_double(a.weights(r, c)) * h[c];
            next[r] = i + 1 < layers.size() ? std::max(0.0, acc) : acc;
        }
        h = std::move(next);
    }
    return h[0];
}

struct GridCounts {
    std::size_t y = 0, n = 0;
    std::size_t y_bounded = 0, n_bounded = 0;
    std::size_t unresolved = 0; // components too thin to certify at this resolution
};

/// Largest gradient norm of F over all activation patterns, feasible or not.
/// F is continuous and piecewise linear, so this bounds its Lipschitz constant.
inline double lipschitz_bound(const ReluNetwork& net) {
    const auto& layers = net.layers();
    std::size_t hidden = 0;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) hidden += layers[i].out_dim();
    double best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << hidden); ++mask) {
        // Row vector g = W_last D ... D W_1, accumulated from the output side.
        std::vector<double> g(layers.back().in_dim());
        for (std::size_t c = 0; c < g.size(); ++c) g[c] = to_double(layers.back().weights(0, c));
        std::size_t bit = hidden;
        for (std::size_t i = layers.size() - 1; i-- > 0;) {
            const auto& a = layers[i];
            bit -= a.out_dim();
            std::vector<double> next(a.in_dim(), 0.0);
            for (std::size_t r = 0; r < a.out_dim(); ++r) {
                if (!((mask >> (bit + r)) & 1)) continue;
                for (std::size_t c = 0; c < a.in_dim(); ++c) next[c] += g[r] * to_double(a.weights(r, c));
            }
            g = std::move(next);
        }
        double norm = 0;
        for (double v : g) norm += v * v;
        best = std::max(best, std::sqrt(norm));
    }
    return best;
}

/// Components of {F > t} and {F < t} among grid cell centers (4-neighbour flood fill).
/// A component touching the border of the box counts as unbounded. A pixel is
/// certified when the Lipschitz bound keeps its whole square on one side of t. A
/// bounded component without any certified pixel may be a broken-off piece of a
/// sliver thinner than the grid, so it is reported in `unresolved` instead.
inline GridCounts grid_components(const ReluNetwork& net, double t, double x0, double y0, double x1, double y1,
                                  int steps) {
    const double hx = (x1 - x0) / steps, hy = (y1 - y0) / steps;
    const double margin = lipschitz_bound(net) * 0.5 * std::sqrt(hx * hx + hy * hy);
    std::vector<int> cls(static_cast<std::size_t>(steps) * steps);
    std::vector<bool> certain(cls.size());
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) {
            const double v = double_eval(net, x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy) - t;
            cls[i * steps + j] = v > 0 ? 1 : (v < 0 ? -1 : 0);
            certain[i * steps + j] = std::abs(v) > margin;
        }
    GridCounts g;
    std::vector<bool> seen(cls.size(), false);
    for (int start = 0; start < steps * steps; ++start) {
        if (seen[start] || cls[start] == 0) continue;
        const int c = cls[start];
        bool border = false, resolved = false;
        std::deque<int> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            const int k = queue.front();
            queue.pop_front();
            resolved = resolved || certain[k];
            const int i = k / steps, j = k % steps;
            if (i == 0 || j == 0 || i == steps - 1 || j == steps - 1) border = true;
            const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int a = i + di[d], b = j + dj[d];
                if (a < 0 || b < 0 || a >= steps || b >= steps) continue;
                const int m = a * steps + b;
                if (!seen[m] && cls[m] == c) {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        if (!resolved && !border) {
            ++g.unresolved;
        } else if (c > 0) {
            ++g.y;
            g.y_bounded += !border;
        } else {
            ++g.n;
            g.n_bounded += !border;
        }
    }
    return g;
}

/// A transversal threshold drawn by the harness policy with a seed taken from rng.
inline Rational random_transversal(const CanonicalComplex& c, std::mt19937_64& rng) {
    const auto bad = nontransversal_thresholds(c);
    auto t = random_transversal_threshold(bad, rng(), 0);
    if (!t) throw std::runtime_error("no transversal threshold found");
    return *t;
}

} // namespace support

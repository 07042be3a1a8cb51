#pragma once

#include "relutopo/arrangement.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace relutopo {

/// A hidden node (layer i in 1..m, unit j in 1..n_i).
struct NodeRef {
    std::size_t layer = 1;
    std::size_t unit = 1;
    auto operator<=>(const NodeRef&) const = default;
};

/// One binary tuple per hidden layer; bit 1 means the node is active.
struct ActivationPattern {
    std::vector<std::vector<bool>> layers;
    auto operator<=>(const ActivationPattern&) const = default;
};

inline RatVector relu(RatVector v) {
    for (auto& x : v)
        if (x.sign() < 0) x = 0;
    return v;
}

/// Architecture (n0, ..., nm, 1) with affine maps A1..A(m+1); ReLU on hidden layers only.
class ReluNetwork {
public:
    ReluNetwork(std::vector<std::size_t> architecture, std::vector<AffineMap> layers)
        : arch_(std::move(architecture)), layers_(std::move(layers)) {
        if (arch_.size() < 3) throw InvalidInput("network needs at least one hidden layer");
        if (arch_.back() != 1) throw InvalidInput("network output dimension must be 1");
        if (layers_.size() != arch_.size() - 1) throw InvalidInput("layer count does not match architecture");
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (layers_[i].in_dim() != arch_[i] || layers_[i].out_dim() != arch_[i + 1])
                throw InvalidInput("layer " + std::to_string(i + 1) + " has shape " +
                                   std::to_string(layers_[i].out_dim()) + "x" + std::to_string(layers_[i].in_dim()) +
                                   ", expected " + std::to_string(arch_[i + 1]) + "x" + std::to_string(arch_[i]));
        }
    }

    const std::vector<std::size_t>& architecture() const noexcept { return arch_; }
    const std::vector<AffineMap>& layers() const noexcept { return layers_; }
    const AffineMap& layer(std::size_t i) const { return layers_.at(i - 1); } // 1-based

    std::size_t input_dim() const noexcept { return arch_.front(); }
    std::size_t hidden_layers() const noexcept { return arch_.size() - 2; }
    std::size_t hidden_width(std::size_t i) const { return arch_.at(i); }
    std::size_t hidden_node_count() const {
        return std::accumulate(arch_.begin() + 1, arch_.end() - 1, std::size_t{0});
    }
    std::size_t width() const { return std::max<std::size_t>(1, *std::max_element(arch_.begin() + 1, arch_.end() - 1)); }

    /// Total number of weights and biases.
    std::size_t parameter_count() const {
        std::size_t d = 0;
        for (std::size_t i = 0; i + 1 < arch_.size(); ++i) d += (arch_[i] + 1) * arch_[i + 1];
        return d;
    }

    /// Position of node (i,j) in the flattened hidden-node order.
    std::size_t node_index(NodeRef ref) const {
        check(ref);
        std::size_t k = 0;
        for (std::size_t i = 1; i < ref.layer; ++i) k += arch_[i];
        return k + ref.unit - 1;
    }

    std::vector<NodeRef> nodes() const {
        std::vector<NodeRef> out;
        for (std::size_t i = 1; i <= hidden_layers(); ++i)
            for (std::size_t j = 1; j <= arch_[i]; ++j) out.push_back({i, j});
        return out;
    }

    void check(NodeRef ref) const {
        if (ref.layer < 1 || ref.layer > hidden_layers() || ref.unit < 1 || ref.unit > arch_[ref.layer])
            throw InvalidInput("node reference out of range");
    }

    bool operator==(const ReluNetwork&) const = default;

private:
    std::vector<std::size_t> arch_;
    std::vector<AffineMap> layers_;
};

/// Pre-activation values of every hidden layer at x.
inline std::vector<RatVector> pre_activations(const ReluNetwork& net, std::span<const Rational> x) {
    if (x.size() != net.input_dim()) throw InvalidInput("input has wrong dimension");
    std::vector<RatVector> out;
    RatVector h(x.begin(), x.end());
    for (std::size_t i = 1; i <= net.hidden_layers(); ++i) {
        out.push_back(net.layer(i).apply(h));
        h = relu(out.back());
    }
    return out;
}

inline Rational evaluate(const ReluNetwork& net, std::span<const Rational> x) {
    auto pre = pre_activations(net, x);
    return net.layers().back().apply(relu(pre.back()))[0];
}

/// Pre-activation of node (i,j): pi_j . A_i . F_(i-1) ... F_1.
inline Rational node_map_value(const ReluNetwork& net, NodeRef ref, std::span<const Rational> x) {
    net.check(ref);
    return pre_activations(net, x)[ref.layer - 1][ref.unit - 1];
}

/// Bit (i,j) is 1 iff the pre-activation is strictly positive.
inline ActivationPattern activation_pattern_at(const ReluNetwork& net, std::span<const Rational> x) {
    ActivationPattern p;
    for (const auto& layer : pre_activations(net, x)) {
        std::vector<bool> bits;
        for (const auto& v : layer) bits.push_back(v.sign() > 0);
        p.layers.push_back(std::move(bits));
    }
    return p;
}

/// Replace every hidden layer by one of the full width, padding with zero rows
/// (and zero columns in the following layer).
inline ReluNetwork pad_to_width(const ReluNetwork& net) {
    const std::size_t w = net.width();
    const auto& arch = net.architecture();
    std::vector<std::size_t> padded(arch.size());
    padded.front() = arch.front();
    padded.back() = 1;
    for (std::size_t i = 1; i + 1 < arch.size(); ++i) padded[i] = w;
    std::vector<AffineMap> layers;
    for (std::size_t i = 0; i + 1 < arch.size(); ++i) {
        const auto& src = net.layers()[i];
        RatMatrix wm(padded[i + 1], padded[i]);
        RatVector b = zeros(padded[i + 1]);
        for (std::size_t r = 0; r < src.out_dim(); ++r) {
            for (std::size_t c = 0; c < src.in_dim(); ++c) wm(r, c) = src.weights(r, c);
            b[r] = src.bias[r];
        }
        layers.emplace_back(std::move(wm), std::move(b));
    }
    return {std::move(padded), std::move(layers)};
}

struct LayerClass {
    bool degenerate = false;
    bool generic = false;
};

struct NetworkClass {
    std::vector<LayerClass> layers; // A1 .. A(m+1)
    bool degenerate = false;
    bool generic = true;
};

inline NetworkClass classify_layers(const ReluNetwork& net) {
    NetworkClass nc;
    for (const auto& a : net.layers()) {
        LayerClass lc;
        for (std::size_t r = 0; r < a.out_dim(); ++r)
            if (is_zero(a.weights.row(r))) lc.degenerate = true;
        lc.generic = is_generic(SolutionSetArrangement::from_affine(a));
        nc.degenerate = nc.degenerate || lc.degenerate;
        nc.generic = nc.generic && lc.generic;
        nc.layers.push_back(lc);
    }
    return nc;
}

namespace detail {

// Post-activation map of layer i on a region: diag(theta) (W_i M + b_i).
inline AffineMap masked_step(const AffineMap& layer, const AffineMap& inner, const std::vector<bool>& theta) {
    AffineMap pre = layer.after(inner);
    for (std::size_t r = 0; r < pre.out_dim(); ++r) {
        if (theta[r]) continue;
        for (auto& x : pre.weights.row(r)) x = 0;
        pre.bias[r] = 0;
    }
    return pre;
}

inline void check_pattern(const ReluNetwork& net, const ActivationPattern& p) {
    if (p.layers.size() != net.hidden_layers()) throw InvalidInput("activation pattern has wrong layer count");
    for (std::size_t i = 0; i < p.layers.size(); ++i)
        if (p.layers[i].size() != net.hidden_width(i + 1)) throw InvalidInput("activation pattern has wrong layer width");
}

} // namespace detail

/// The affine function agreeing with F on the closure of the region with this
/// pattern: weights W(m+1) W_m^theta_m ... W_1^theta_1, biases composed alike.
inline AffineMap masked_affine(const ReluNetwork& net, const ActivationPattern& pattern) {
    detail::check_pattern(net, pattern);
    AffineMap m = AffineMap::identity(net.input_dim());
    for (std::size_t i = 1; i <= net.hidden_layers(); ++i) m = detail::masked_step(net.layer(i), m, pattern.layers[i - 1]);
    return net.layers().back().after(m);
}

} // namespace relutopo

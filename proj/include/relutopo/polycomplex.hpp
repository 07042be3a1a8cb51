#pragma once

#include "relutopo/network.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace relutopo {

/// Cells of the canonical polyhedral complex keyed by sign vector (one entry per
/// hidden node, ordered by layer then unit). A threshold refinement appends one
/// more coordinate holding sign(F - t).
struct CanonicalComplex {
    std::size_t ambient_dim = 0;
    std::vector<std::size_t> layer_sizes;
    std::vector<bool> degenerate_nodes; // zero weight row: constant node form, never part of the BHA
    std::optional<Rational> threshold;
    std::map<SignVector, Cell> cells;

    std::size_t node_coordinates() const { return degenerate_nodes.size(); }

    const Cell& at(const SignVector& key) const {
        auto it = cells.find(key);
        if (it == cells.end()) throw std::out_of_range("no cell with sign vector " + to_string(key));
        return it->second;
    }

    /// The unique cell whose relative interior holds x (linear scan).
    const Cell* locate(std::span<const Rational> x) const {
        for (const auto& [key, cell] : cells)
            if (cell.contains(x)) return &cell;
        return nullptr;
    }

    std::size_t count_dim(int d) const {
        std::size_t n = 0;
        for (const auto& [key, cell] : cells)
            if (cell.dim == d) ++n;
        return n;
    }

    /// Proper faces of the cell with this key.
    std::vector<const Cell*> faces(const SignVector& key) const {
        std::vector<const Cell*> out;
        for (const auto& [k, cell] : cells)
            if (k != key && is_face_of(k, key)) out.push_back(&cell);
        return out;
    }

    /// Cells having the given key as a proper face.
    std::vector<const Cell*> cofaces(const SignVector& key) const {
        std::vector<const Cell*> out;
        for (const auto& [k, cell] : cells)
            if (k != key && is_face_of(key, k)) out.push_back(&cell);
        return out;
    }
};

namespace detail {

struct PartialCell {
    SignVector sign;
    LinearSystem hrep;
    RatVector point; // relative-interior witness
    AffineMap post;  // output of the last processed layer as an affine map of x
};

inline void add_sign_row(LinearSystem& sys, const Constraint& f, Sign s) {
    switch (s) {
    case Sign::Pos: sys.geq(f.normal, f.offset); break;
    case Sign::Neg: sys.geq(Rational(-1) * f.normal, -f.offset); break;
    case Sign::Zero: sys.eq(f.normal, f.offset); break;
    }
}

// Depth-first split of a relatively open cell by the signs of `forms`, keeping
// only nonempty pieces. Visits pieces in (-, 0, +) lexicographic order.
template <class Emit>
void split_by_forms(const LinearSystem& hrep, const RatVector& point, const std::vector<Constraint>& forms, Emit&& emit) {
    SignVector signs;
    std::function<void(const LinearSystem&, const RatVector&)> rec = [&](const LinearSystem& sys,
                                                                        const RatVector& pt) {
        if (signs.size() == forms.size()) {
            emit(signs, sys, pt);
            return;
        }
        const Constraint& f = forms[signs.size()];
        const Sign here = sign_of(f.eval(pt));
        const bool constant = in_row_space(equality_normals(sys), f.normal);
        for (Sign s : {Sign::Neg, Sign::Zero, Sign::Pos}) {
            if (constant && s != here) continue;
            LinearSystem next = sys;
            add_sign_row(next, f, s);
            RatVector next_pt;
            if (s == here) {
                next_pt = pt;
            } else {
                auto p = lp_interior_point(next, all_inequalities(next));
                if (!p) continue;
                next_pt = std::move(*p);
            }
            signs.push_back(s);
            rec(next, next_pt);
            signs.pop_back();
        }
    };
    rec(hrep, point);
}

inline std::vector<Constraint> forms_of(const AffineMap& a) {
    std::vector<Constraint> out;
    for (std::size_t r = 0; r < a.out_dim(); ++r) out.push_back({a.weights.row_vector(r), a.bias[r]});
    return out;
}

/// Cells of C(F_i o ... o F_1) for i = 0..m, produced one layer at a time.
class LayerSweep {
public:
    explicit LayerSweep(const ReluNetwork& net) : net_(net) {
        const std::size_t n = net.input_dim();
        cells_.push_back({{}, LinearSystem(n), zeros(n), AffineMap::identity(n)});
    }

    std::size_t layers_done() const noexcept { return done_; }
    const std::vector<PartialCell>& cells() const noexcept { return cells_; }

    /// Pre-activation forms of the next layer on a current cell.
    std::vector<Constraint> next_forms(const PartialCell& c) const {
        return forms_of(net_.layer(done_ + 1).after(c.post));
    }

    void advance() {
        if (done_ == net_.hidden_layers()) throw std::logic_error("LayerSweep: no layers left");
        const AffineMap& layer = net_.layer(done_ + 1);
        std::vector<PartialCell> next;
        for (const auto& c : cells_) {
            split_by_forms(c.hrep, c.point, next_forms(c),
                           [&](const SignVector& s, const LinearSystem& sys, const RatVector& pt) {
                               std::vector<bool> theta;
                               for (auto x : s) theta.push_back(x == Sign::Pos);
                               PartialCell p{c.sign, sys, pt, masked_step(layer, c.post, theta)};
                               p.sign.insert(p.sign.end(), s.begin(), s.end());
                               next.push_back(std::move(p));
                           });
        }
        cells_ = std::move(next);
        ++done_;
    }

private:
    const ReluNetwork& net_;
    std::vector<PartialCell> cells_;
    std::size_t done_ = 0;
};

inline Cell finish_cell(SignVector sign, LinearSystem hrep, RatVector point, AffineMap restriction) {
    Cell c;
    c.sign = std::move(sign);
    c.dim = relative_dimension(hrep);
    c.bounded = c.dim == 0 || recession_cone_is_trivial(hrep);
    c.hrep = std::move(hrep);
    c.interior_point = std::move(point);
    c.restriction = std::move(restriction);
    return c;
}

inline std::vector<bool> degenerate_nodes(const ReluNetwork& net) {
    std::vector<bool> out;
    for (std::size_t i = 1; i <= net.hidden_layers(); ++i) {
        const auto& w = net.layer(i).weights;
        for (std::size_t r = 0; r < w.rows(); ++r) out.push_back(is_zero(w.row(r)));
    }
    return out;
}

} // namespace detail

namespace detail {

inline CanonicalComplex complex_from_sweep(const ReluNetwork& net, const LayerSweep& sweep) {
    if (sweep.layers_done() != net.hidden_layers()) throw std::logic_error("complex_from_sweep: sweep incomplete");
    CanonicalComplex c;
    c.ambient_dim = net.input_dim();
    for (std::size_t i = 1; i <= net.hidden_layers(); ++i) c.layer_sizes.push_back(net.hidden_width(i));
    c.degenerate_nodes = degenerate_nodes(net);
    const AffineMap& out = net.layers().back();
    for (const auto& p : sweep.cells())
        c.cells.emplace(p.sign, finish_cell(p.sign, p.hrep, p.point, out.after(p.post)));
    return c;
}

} // namespace detail

/// Iterated level-set subdivision of the input space, one hidden layer at a time.
inline CanonicalComplex build_complex(const ReluNetwork& net) {
    detail::LayerSweep sweep(net);
    while (sweep.layers_done() < net.hidden_layers()) sweep.advance();
    return detail::complex_from_sweep(net, sweep);
}

/// Sign vector of the cell containing x.
inline SignVector sign_vector_at(const ReluNetwork& net, std::span<const Rational> x) {
    SignVector s;
    for (const auto& layer : pre_activations(net, x))
        for (const auto& v : layer) s.push_back(sign_of(v));
    return s;
}

/// All cells of dimension at most k.
inline std::vector<const Cell*> skeleton(const CanonicalComplex& c, int k) {
    if (k < 0 || static_cast<std::size_t>(k) > c.ambient_dim) throw std::out_of_range("skeleton: k out of range");
    std::vector<const Cell*> out;
    for (const auto& [key, cell] : c.cells)
        if (cell.dim <= k) out.push_back(&cell);
    return out;
}

namespace detail {

inline bool has_node_zero(const CanonicalComplex& c, const SignVector& s) {
    for (std::size_t i = 0; i < c.node_coordinates(); ++i)
        if (!c.degenerate_nodes[i] && s[i] == Sign::Zero) return true;
    return false;
}

} // namespace detail

/// Cells lying in the bent hyperplane arrangement. Faces of such cells carry the
/// same zero, so the result is closed under faces.
inline std::vector<const Cell*> bent_hyperplane_arrangement(const CanonicalComplex& c) {
    std::vector<const Cell*> out;
    for (const auto& [key, cell] : c.cells)
        if (detail::has_node_zero(c, key)) out.push_back(&cell);
    return out;
}

/// Full-dimensional cells off the bent hyperplane arrangement.
inline std::vector<const Cell*> activation_regions(const CanonicalComplex& c) {
    std::vector<const Cell*> out;
    for (const auto& [key, cell] : c.cells)
        if (static_cast<std::size_t>(cell.dim) == c.ambient_dim && !detail::has_node_zero(c, key)) out.push_back(&cell);
    return out;
}

inline bool cell_bounded(const Cell& cell) {
    return recession_cone_is_trivial(cell.hrep);
}

/// Activation pattern read off a sign vector (bit 1 iff +).
inline ActivationPattern pattern_of(const CanonicalComplex& c, const SignVector& s) {
    ActivationPattern p;
    std::size_t k = 0;
    for (auto w : c.layer_sizes) {
        std::vector<bool> bits;
        for (std::size_t j = 0; j < w; ++j) bits.push_back(s[k++] == Sign::Pos);
        p.layers.push_back(std::move(bits));
    }
    return p;
}

/// Split every cell by the level set F = t. The new trailing sign coordinate is sign(F - t).
inline CanonicalComplex refine_by_threshold(const CanonicalComplex& c, const Rational& t) {
    if (c.threshold) throw PreconditionError("refine_by_threshold: complex is already refined");
    CanonicalComplex r;
    r.ambient_dim = c.ambient_dim;
    r.layer_sizes = c.layer_sizes;
    r.degenerate_nodes = c.degenerate_nodes;
    r.threshold = t;
    for (const auto& [key, cell] : c.cells) {
        Constraint level{cell.gradient(), cell.restriction.bias[0] - t};
        detail::split_by_forms(cell.hrep, cell.interior_point, {level},
                               [&](const SignVector& s, const LinearSystem& sys, const RatVector& pt) {
                                   SignVector k = key;
                                   k.push_back(s[0]);
                                   Cell sub;
                                   sub.sign = k;
                                   sub.dim = detail::relative_dimension(sys);
                                   sub.bounded = cell.bounded || sub.dim == 0 || recession_cone_is_trivial(sys);
                                   sub.hrep = sys;
                                   sub.interior_point = pt;
                                   sub.restriction = cell.restriction;
                                   r.cells.emplace(std::move(k), std::move(sub));
                               });
    }
    return r;
}

/// The key of the unrefined parent of a refined cell.
inline SignVector parent_key(const CanonicalComplex& refined, const SignVector& key) {
    if (!refined.threshold) return key;
    return {key.begin(), key.end() - 1};
}

} // namespace relutopo

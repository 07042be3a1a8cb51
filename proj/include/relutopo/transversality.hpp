#pragma once

#include "relutopo/polycomplex.hpp"

#include <set>
#include <vector>

namespace relutopo {

// F is constant on a cell iff its gradient is orthogonal to every direction of
// the affine hull, i.e. lies in the row space of the equality normals.
inline bool is_f_constant(const Cell& cell) {
    const RatVector g = cell.gradient();
    return is_zero(g) || in_row_space(detail::equality_normals(cell.hrep), g);
}

/// Values of F on the cells where it is constant. Every vertex is such a cell.
inline std::set<Rational> nontransversal_thresholds(const CanonicalComplex& c) {
    std::set<Rational> out;
    for (const auto& [key, cell] : c.cells)
        if (is_f_constant(cell)) out.insert(cell.value_at(cell.interior_point));
    return out;
}

inline std::set<Rational> nontransversal_thresholds(const ReluNetwork& net) {
    return nontransversal_thresholds(build_complex(net));
}

inline bool is_transversal_threshold(const CanonicalComplex& c, const Rational& t) {
    for (const auto& [key, cell] : c.cells)
        if (is_f_constant(cell) && cell.value_at(cell.interior_point) == t) return false;
    return true;
}

inline bool is_transversal_threshold(const ReluNetwork& net, const Rational& t) {
    return is_transversal_threshold(build_complex(net), t);
}

struct TransversalityReport {
    bool generic = false;
    bool transversal = false;
    std::vector<NodeRef> failures;
    std::set<Rational> thresholds; // nontransversal thresholds of F itself
};

/// Checks t = 0 for every node map against the complex of the layers before it.
/// The complex of F itself falls out of the same sweep and is stored in `complex_out`.
inline TransversalityReport is_transversal_network(const ReluNetwork& net, CanonicalComplex* complex_out = nullptr) {
    TransversalityReport r;
    r.generic = classify_layers(net).generic;
    detail::LayerSweep sweep(net);
    for (std::size_t i = 1; i <= net.hidden_layers(); ++i) {
        std::vector<bool> failed(net.hidden_width(i), false);
        for (const auto& cell : sweep.cells()) {
            const auto forms = sweep.next_forms(cell);
            const auto normals = detail::equality_normals(cell.hrep);
            for (std::size_t j = 0; j < forms.size(); ++j) {
                if (failed[j]) continue;
                const auto& f = forms[j];
                if (f.eval(cell.point).is_zero() && (is_zero(f.normal) || in_row_space(normals, f.normal)))
                    failed[j] = true;
            }
        }
        for (std::size_t j = 0; j < failed.size(); ++j)
            if (failed[j]) r.failures.push_back({i, j + 1});
        sweep.advance();
    }
    r.transversal = r.failures.empty();
    CanonicalComplex c = detail::complex_from_sweep(net, sweep);
    r.thresholds = nontransversal_thresholds(c);
    if (complex_out) *complex_out = std::move(c);
    return r;
}

} // namespace relutopo

#pragma once

#include "relutopo/topology.hpp"

#include <array>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace relutopo {

struct BoundingBox {
    Rational xmin, ymin, xmax, ymax;

    Rational width() const { return xmax - xmin; }
    Rational height() const { return ymax - ymin; }
};

/// "xmin,ymin,xmax,ymax" with rational entries.
inline BoundingBox parse_bbox(std::string_view s) {
    std::array<Rational, 4> v;
    std::size_t k = 0;
    while (k < 4) {
        const auto comma = s.find(',');
        v[k++] = parse_rational(s.substr(0, comma));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    if (k != 4 || s.find(',') != std::string_view::npos) throw ParseError("bbox needs four comma-separated values");
    BoundingBox b{v[0], v[1], v[2], v[3]};
    if (b.width().sign() <= 0 || b.height().sign() <= 0) throw ParseError("bbox must have positive width and height");
    return b;
}

/// Vertex bounding box padded by 20% on every side; a unit margin when it is degenerate.
inline BoundingBox default_bbox(const CanonicalComplex& c) {
    std::vector<RatVector> pts;
    for (const auto& [key, cell] : c.cells)
        if (cell.dim == 0) pts.push_back(cell.interior_point);
    if (pts.empty()) return {-1, -1, 1, 1};
    BoundingBox b{pts[0][0], pts[0][1], pts[0][0], pts[0][1]};
    for (const auto& p : pts) {
        b.xmin = std::min(b.xmin, p[0]);
        b.xmax = std::max(b.xmax, p[0]);
        b.ymin = std::min(b.ymin, p[1]);
        b.ymax = std::max(b.ymax, p[1]);
    }
    const Rational px = b.width().is_zero() ? Rational(1) : b.width() / 5;
    const Rational py = b.height().is_zero() ? Rational(1) : b.height() / 5;
    return {b.xmin - px, b.ymin - py, b.xmax + px, b.ymax + py};
}

namespace detail {

using Polygon = std::vector<RatVector>;

// Sutherland-Hodgman against normal . x + offset >= 0, exactly.
inline Polygon clip_polygon(const Polygon& poly, const Constraint& c) {
    Polygon out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const RatVector& p = poly[i];
        const RatVector& q = poly[(i + 1) % poly.size()];
        const Rational fp = c.eval(p), fq = c.eval(q);
        if (fp.sign() >= 0) out.push_back(p);
        if (fp.sign() * fq.sign() < 0) out.push_back(p + (fp / (fp - fq)) * (q - p));
    }
    return out;
}

inline std::vector<Constraint> box_constraints(const BoundingBox& b) {
    return {{{1, 0}, -b.xmin}, {{-1, 0}, b.xmax}, {{0, 1}, -b.ymin}, {{0, -1}, b.ymax}};
}

inline Polygon clip_cell(const Cell& cell, const BoundingBox& b) {
    Polygon poly{{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
    for (const auto& c : cell.hrep.inequalities) {
        poly = clip_polygon(poly, c);
        if (poly.empty()) break;
    }
    return poly;
}

// Parameter interval of the edge closure clipped to the box.
inline std::optional<std::pair<RatVector, RatVector>> clip_edge(const SkeletonEdge& e, const BoundingBox& b) {
    std::optional<Rational> lo, hi;
    if (e.shape != EdgeShape::Line) lo = Rational(0);
    if (e.shape == EdgeShape::Segment) hi = Rational(1);
    for (const auto& c : box_constraints(b)) {
        // c(base + s d) = c(base) + s (normal . d) >= 0
        const Rational a0 = c.eval(e.base), slope = dot(c.normal, e.direction);
        if (slope.is_zero()) {
            if (a0.sign() < 0) return std::nullopt;
            continue;
        }
        const Rational s = -a0 / slope;
        if (slope.sign() > 0) lo = lo ? std::max(*lo, s) : s;
        else hi = hi ? std::min(*hi, s) : s;
    }
    if (!lo || !hi || *lo >= *hi) return std::nullopt;
    return std::make_pair(e.base + *lo * e.direction, e.base + *hi * e.direction);
}

class SvgCanvas {
public:
    SvgCanvas(const BoundingBox& b, double size) : box_(b) {
        const double w = to_double(b.width()), h = to_double(b.height());
        scale_ = size / std::max(w, h);
        width_ = w * scale_;
        height_ = h * scale_;
    }

    std::string x(const Rational& v) const { return num((to_double(v - box_.xmin)) * scale_); }
    std::string y(const Rational& v) const { return num((to_double(box_.ymax - v)) * scale_); }
    std::string point(const RatVector& p) const { return x(p[0]) + "," + y(p[1]); }
    double width() const { return width_; }
    double height() const { return height_; }

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v == 0 ? 0.0 : v); // no "-0.000"
        return buf;
    }

private:
    BoundingBox box_;
    double scale_ = 1, width_ = 0, height_ = 0;
};

} // namespace detail

struct SvgOptions {
    std::optional<BoundingBox> bbox;
    std::optional<Rational> threshold;
    double size = 600;
};

/// Picture of a network on the plane. Flat bent-hyperplane edges are dashed; the
/// others carry an arrow toward increasing F. With a threshold the Y and N regions are
/// filled and the level set is drawn on top; without one, each activation region gets
/// a neutral fill.
inline std::string render_svg(const ReluNetwork& net, const SvgOptions& opt) {
    if (net.input_dim() != 2) throw NotApplicable("svg output needs input dimension 2");
    const CanonicalComplex c = build_complex(net);
    const BoundingBox box = opt.bbox ? *opt.bbox : default_bbox(c);
    detail::SvgCanvas cv(box, opt.size);
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cv.num(cv.width()) << "\" height=\""
      << cv.num(cv.height()) << "\" viewBox=\"0 0 " << cv.num(cv.width()) << " " << cv.num(cv.height()) << "\">\n";
    s << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" "
         "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n";
    s << "<style>.Y{fill:#f4c56a}.N{fill:#7fb2d9}.region{fill:#e6e6e6;stroke:#fff}"
         ".edge{stroke:#333;stroke-width:1.5;fill:none}.flat{stroke-dasharray:6 4}"
         ".level{stroke:#c0392b;stroke-width:2.5;fill:none}.vertex{fill:#333}</style>\n";

    auto polygon = [&](const detail::Polygon& p, const char* cls, const SignVector& key) {
        if (p.size() < 3) return;
        s << "<polygon class=\"" << cls << "\" data-sign=\"" << to_string(key) << "\" points=\"";
        for (std::size_t i = 0; i < p.size(); ++i) s << (i ? " " : "") << cv.point(p[i]);
        s << "\"/>\n";
    };

    std::optional<CanonicalComplex> refined;
    if (opt.threshold) {
        if (!is_transversal_threshold(c, *opt.threshold))
            throw NonTransversalThreshold(*opt.threshold, nontransversal_thresholds(c));
        refined = refine_by_threshold(c, *opt.threshold);
    }

    s << "<g class=\"fills\">\n";
    if (refined) {
        for (const auto& [key, cell] : refined->cells)
            if (cell.dim == 2 && key.back() != Sign::Zero)
                polygon(detail::clip_cell(cell, box), key.back() == Sign::Pos ? "Y" : "N", key);
    } else {
        for (const Cell* cell : activation_regions(c)) polygon(detail::clip_cell(*cell, box), "region", cell->sign);
    }
    s << "</g>\n<g class=\"edges\">\n";
    const auto bha = bent_hyperplane_arrangement(c);
    for (const Cell* cell : bha) {
        if (cell->dim != 1) continue;
        const SkeletonEdge e = detail::edge_geometry(*cell);
        auto seg = detail::clip_edge(e, box);
        if (!seg) continue;
        if (e.slope < 0) std::swap(seg->first, seg->second); // draw toward increasing F
        const RatVector mid = Rational(1, 2) * (seg->first + seg->second);
        s << "<path class=\"edge" << (e.flat() ? " flat" : "") << "\" data-sign=\"" << to_string(e.key) << "\" d=\"M"
          << cv.point(seg->first) << " L" << cv.point(mid) << " L" << cv.point(seg->second) << "\""
          << (e.flat() ? "" : " marker-mid=\"url(#arrow)\"") << "/>\n";
    }
    s << "</g>\n";
    if (refined) {
        s << "<g class=\"level-set\">\n";
        for (const auto& [key, cell] : refined->cells) {
            if (cell.dim != 1 || key.back() != Sign::Zero) continue;
            auto seg = detail::clip_edge(detail::edge_geometry(cell), box);
            if (!seg) continue;
            s << "<path class=\"level\" data-sign=\"" << to_string(key) << "\" d=\"M" << cv.point(seg->first) << " L"
              << cv.point(seg->second) << "\"/>\n";
        }
        s << "</g>\n";
    }
    s << "<g class=\"vertices\">\n";
    for (const Cell* cell : bha) {
        if (cell->dim != 0) continue;
        const auto& p = cell->interior_point;
        if (p[0] < box.xmin || p[0] > box.xmax || p[1] < box.ymin || p[1] > box.ymax) continue;
        s << "<circle class=\"vertex\" data-sign=\"" << to_string(cell->sign) << "\" cx=\"" << cv.x(p[0]) << "\" cy=\""
          << cv.y(p[1]) << "\" r=\"3\"/>\n";
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

} // namespace relutopo

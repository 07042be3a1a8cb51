#pragma once

#include "relutopo/topology.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace relutopo {

using json = nlohmann::ordered_json;

namespace io {

inline std::string pointer(const std::string& path) { return path.empty() ? "/" : path; }

inline Rational rational_from(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(Integer(j.dump()));
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " at " + pointer(path));
        }
    }
    if (j.is_number_float()) throw ParseError("floating-point value at " + pointer(path) + "; write it as a rational string");
    throw ParseError("expected a rational at " + pointer(path));
}

inline json rational_to(const Rational& r) { return to_string(r); }

inline json vector_to(std::span<const Rational> v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(rational_to(x));
    return a;
}

inline RatVector vector_from(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError("expected an array at " + pointer(path));
    RatVector v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(rational_from(j[i], path + "/" + std::to_string(i)));
    return v;
}

inline const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ParseError("expected an object at " + pointer(path));
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing \"") + key + "\" at " + pointer(path));
    return *it;
}

inline json parse_text(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Convert the byte offset into a line number for the diagnostic.
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
        throw ParseError("JSON syntax error on line " + std::to_string(line) + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace io

inline json to_json(const AffineMap& a) {
    json w = json::array();
    for (std::size_t r = 0; r < a.out_dim(); ++r) w.push_back(io::vector_to(a.weights.row(r)));
    return {{"W", w}, {"b", io::vector_to(a.bias)}};
}

inline AffineMap affine_from_json(const json& j, std::size_t cols, const std::string& path) {
    const json& w = io::member(j, "W", path);
    if (!w.is_array()) throw ParseError("expected an array at " + path + "/W");
    std::vector<RatVector> rows;
    for (std::size_t r = 0; r < w.size(); ++r) {
        rows.push_back(io::vector_from(w[r], path + "/W/" + std::to_string(r)));
        if (rows.back().size() != cols)
            throw ParseError("row " + path + "/W/" + std::to_string(r) + " has " + std::to_string(rows.back().size()) +
                             " entries, expected " + std::to_string(cols));
    }
    RatVector b = io::vector_from(io::member(j, "b", path), path + "/b");
    if (b.size() != rows.size()) throw ParseError("bias length mismatch at " + path + "/b");
    return {RatMatrix::from_rows(rows, cols), std::move(b)};
}

inline json to_json(const ReluNetwork& net) {
    json layers = json::array();
    for (const auto& a : net.layers()) layers.push_back(to_json(a));
    return {{"architecture", net.architecture()}, {"layers", layers}};
}

inline ReluNetwork network_from_json(const json& j) {
    const json& arch_j = io::member(j, "architecture", "");
    if (!arch_j.is_array()) throw ParseError("expected an array at /architecture");
    std::vector<std::size_t> arch;
    for (std::size_t i = 0; i < arch_j.size(); ++i) {
        if (!arch_j[i].is_number_unsigned() || arch_j[i].get<std::size_t>() == 0)
            throw ParseError("expected a positive integer at /architecture/" + std::to_string(i));
        arch.push_back(arch_j[i].get<std::size_t>());
    }
    const json& layers_j = io::member(j, "layers", "");
    if (!layers_j.is_array()) throw ParseError("expected an array at /layers");
    if (layers_j.size() + 1 != arch.size())
        throw ParseError("/layers has " + std::to_string(layers_j.size()) + " entries, architecture needs " +
                         std::to_string(arch.empty() ? 0 : arch.size() - 1));
    std::vector<AffineMap> layers;
    for (std::size_t i = 0; i < layers_j.size(); ++i)
        layers.push_back(affine_from_json(layers_j[i], arch[i], "/layers/" + std::to_string(i)));
    try {
        return {std::move(arch), std::move(layers)};
    } catch (const InvalidInput& e) {
        throw ParseError(e.what());
    }
}

inline ReluNetwork parse_network(std::string_view text) { return network_from_json(io::parse_text(text)); }

inline ReluNetwork load_network(const std::string& path) {
    const std::string text = io::read_file(path);
    try {
        return parse_network(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// FNV-1a over the compact canonical JSON of the network.
inline std::string network_hash(const ReluNetwork& net) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json(net).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json to_json(const LinearSystem& s) {
    auto rows = [](const std::vector<Constraint>& cs) {
        json a = json::array();
        for (const auto& c : cs) a.push_back({{"normal", io::vector_to(c.normal)}, {"offset", io::rational_to(c.offset)}});
        return a;
    };
    return {{"inequalities", rows(s.inequalities)}, {"equalities", rows(s.equalities)}};
}

inline LinearSystem system_from_json(const json& j, std::size_t dim, const std::string& path) {
    LinearSystem s(dim);
    for (const char* kind : {"inequalities", "equalities"}) {
        const json& rows = io::member(j, kind, path);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string p = path + "/" + kind + "/" + std::to_string(i);
            RatVector n = io::vector_from(io::member(rows[i], "normal", p), p + "/normal");
            if (n.size() != dim) throw ParseError("normal has wrong length at " + p);
            Rational off = io::rational_from(io::member(rows[i], "offset", p), p + "/offset");
            if (kind[0] == 'i') s.geq(std::move(n), std::move(off));
            else s.eq(std::move(n), std::move(off));
        }
    }
    return s;
}

inline json to_json(const CanonicalComplex& c) {
    json cells = json::array();
    for (const auto& [key, cell] : c.cells) {
        json faces = json::array();
        for (const Cell* f : c.faces(key)) faces.push_back(to_string(f->sign));
        cells.push_back({{"sign", to_string(key)},
                         {"dim", cell.dim},
                         {"bounded", cell.bounded},
                         {"restriction", to_json(cell.restriction)},
                         {"interior_point", io::vector_to(cell.interior_point)},
                         {"hrep", to_json(cell.hrep)},
                         {"faces", faces}});
    }
    json counts = json::array();
    for (std::size_t d = 0; d <= c.ambient_dim; ++d) counts.push_back(c.count_dim(static_cast<int>(d)));
    std::vector<bool> degenerate(c.degenerate_nodes.begin(), c.degenerate_nodes.end());
    json j = {{"ambient_dim", c.ambient_dim},
              {"layer_sizes", c.layer_sizes},
              {"degenerate_nodes", degenerate},
              {"cell_counts", counts}};
    if (c.threshold) j["threshold"] = io::rational_to(*c.threshold);
    j["cells"] = cells;
    return j;
}

inline CanonicalComplex complex_from_json(const json& j) {
    CanonicalComplex c;
    c.ambient_dim = io::member(j, "ambient_dim", "").get<std::size_t>();
    c.layer_sizes = io::member(j, "layer_sizes", "").get<std::vector<std::size_t>>();
    c.degenerate_nodes = io::member(j, "degenerate_nodes", "").get<std::vector<bool>>();
    if (j.contains("threshold")) c.threshold = io::rational_from(j["threshold"], "/threshold");
    const json& cells = io::member(j, "cells", "");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string p = "/cells/" + std::to_string(i);
        const json& cj = cells[i];
        Cell cell;
        cell.sign = parse_sign_vector(io::member(cj, "sign", p).get<std::string>());
        cell.dim = io::member(cj, "dim", p).get<int>();
        cell.bounded = io::member(cj, "bounded", p).get<bool>();
        cell.restriction = affine_from_json(io::member(cj, "restriction", p), c.ambient_dim, p + "/restriction");
        cell.interior_point = io::vector_from(io::member(cj, "interior_point", p), p + "/interior_point");
        cell.hrep = system_from_json(io::member(cj, "hrep", p), c.ambient_dim, p + "/hrep");
        c.cells.emplace(cell.sign, std::move(cell));
    }
    return c;
}

inline json to_json(const DecisionTopology& t) {
    json j = {{"threshold", io::rational_to(t.threshold)}};
    for (Region r : {Region::Y, Region::B, Region::N}) {
        json comps = json::array();
        for (const auto& comp : t[r].components) {
            json keys = json::array();
            for (const auto& k : comp.cells) keys.push_back(to_string(k));
            comps.push_back({{"bounded", comp.bounded}, {"cells", keys}});
        }
        j[to_string(r)] = {{"empty", t[r].empty()},
                           {"components", t[r].components.size()},
                           {"bounded_components", t[r].bounded_count()},
                           {"component_list", comps}};
    }
    return j;
}

inline json to_json(const TransversalityReport& r) {
    json failures = json::array();
    for (const auto& n : r.failures) failures.push_back({{"layer", n.layer}, {"unit", n.unit}});
    json ts = json::array();
    for (const auto& t : r.thresholds) ts.push_back(io::rational_to(t));
    return {{"generic", r.generic}, {"transversal", r.transversal}, {"failures", failures}, {"nontransversal_thresholds", ts}};
}

inline json to_json(const OrientedSkeleton& s) {
    json verts = json::array();
    for (const auto& v : s.vertices) verts.push_back({{"sign", to_string(v.key)}, {"point", io::vector_to(v.point)}});
    json edges = json::array();
    for (const auto& e : s.edges) {
        json ej = {{"sign", to_string(e.key)}, {"shape", to_string(e.shape)}, {"base", io::vector_to(e.base)},
                   {"direction", io::vector_to(e.direction)}};
        ej["state"] = e.flat() ? "flat" : (e.slope > 0 ? "increasing" : "decreasing");
        edges.push_back(std::move(ej));
    }
    return {{"vertices", verts}, {"edges", edges}};
}

inline json to_json(const MaxSubgraphCertificate& c) {
    auto keys = [](const std::vector<SignVector>& v) {
        json a = json::array();
        for (const auto& k : v) a.push_back(to_string(k));
        return a;
    };
    return {{"region", to_string(c.region)},
            {"component", c.component},
            {"objective", c.maximize ? "max" : "min"},
            {"extremum", io::rational_to(c.extremum)},
            {"flat_vertices", keys(c.flat_vertices)},
            {"flat_edges", keys(c.flat_edges)},
            {"enclosing_vertices", keys(c.enclosing_vertices)},
            {"enclosing_edges", keys(c.enclosing_edges)},
            {"inward_edges", keys(c.inward_edges)},
            {"all_inward", c.all_inward},
            {"enclosing_equals_flat", c.enclosing_equals_flat}};
}

inline json to_json(const VerificationReport& r) {
    json off = json::array();
    for (const auto& [reg, i] : r.offending) off.push_back({{"region", to_string(reg)}, {"component", i}});
    return {{"theorem", to_string(r.theorem)},
            {"threshold", io::rational_to(r.threshold)},
            {"verdict", r.pass ? "pass" : "counterexample"},
            {"bounded_components",
             {{"Y", r.bounded[static_cast<int>(Region::Y)]},
              {"B", r.bounded[static_cast<int>(Region::B)]},
              {"N", r.bounded[static_cast<int>(Region::N)]}}},
            {"offending", off}};
}

} // namespace relutopo

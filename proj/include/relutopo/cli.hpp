#pragma once

#include "relutopo/harness.hpp"
#include "relutopo/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace relutopo::cli {

enum ExitCode : int {
    Success = 0,
    Counterexample = 1,
    InputError = 2,
    NonTransversal = 3,
    NotApplicableArch = 4,
};

/// Smallest-denominator rational strictly inside the range of constant-cell values
/// that avoids them, nearest the midpoint (ties go up). A degenerate range is padded by 1.
inline Rational auto_threshold(const std::set<Rational>& bad) {
    Rational lo = -1, hi = 1;
    if (!bad.empty()) {
        lo = *bad.begin();
        hi = *bad.rbegin();
        if (lo == hi) {
            lo -= 1;
            hi += 1;
        }
    }
    const Rational mid = (lo + hi) / 2;
    for (Integer q = 1;; ++q) {
        std::optional<Rational> best;
        for (Integer p = numerator(floor(lo * q)); Rational(p, q) < hi; ++p) {
            Rational t(p, q);
            if (t <= lo || bad.count(t)) continue;
            if (!best || abs(t - mid) < abs(*best - mid) || (abs(t - mid) == abs(*best - mid) && t > *best)) best = t;
        }
        if (best) return *best;
    }
}

/// Human-readable pointer to the transversal thresholds next to a bad one.
inline std::string nearest_gap(const Rational& t, const std::set<Rational>& bad) {
    auto it = bad.find(t);
    const std::optional<Rational> below = it == bad.begin() ? std::nullopt : std::optional<Rational>(*std::prev(it));
    const std::optional<Rational> above =
        std::next(it) == bad.end() ? std::nullopt : std::optional<Rational>(*std::next(it));
    auto fmt = [](const std::optional<Rational>& r, const char* inf) { return r ? to_string(*r) : std::string(inf); };
    // A simple suggestion inside the closer gap.
    const Rational left = below ? (*below + t) / 2 : t - 1;
    const Rational right = above ? (*above + t) / 2 : t + 1;
    const Rational suggestion = (t - left) < (right - t) ? left : right;
    return "nearest transversal gaps are (" + fmt(below, "-inf") + ", " + to_string(t) + ") and (" + to_string(t) +
           ", " + fmt(above, "+inf") + "); for example -t " + to_string(suggestion);
}

namespace detail {

inline Rational resolve_threshold(const std::string& text, const CanonicalComplex& c) {
    if (text == "auto") return auto_threshold(nontransversal_thresholds(c));
    return parse_rational(text);
}

inline std::string default_output(const std::string& input, const std::string& suffix) {
    const char* dir = std::getenv("RELUTOPO_OUTPUT_DIR");
    if (!dir || !*dir) return {};
    std::filesystem::path p = std::filesystem::path(input).stem();
    return (std::filesystem::path(dir) / (p.string() + suffix)).string();
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw InvalidInput("cannot write " + path);
}

inline std::vector<std::size_t> parse_arch(const std::string& s) {
    std::vector<std::size_t> arch;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string part = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("bad architecture '" + s + "'");
        arch.push_back(std::stoul(part));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return arch;
}

} // namespace detail

/// Runs the command line (without the program name) and returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact combinatorics of ReLU network decision regions"};
    app.require_subcommand(1);

    std::string input, out_path, threshold = "auto", bbox;
    int k = -1;
    bool certificates = false;

    auto add_input = [&](CLI::App* sub) { sub->add_option("network", input, "network JSON file")->required(); };

    auto* complex_cmd = app.add_subcommand("complex", "dump the canonical polyhedral complex");
    add_input(complex_cmd);
    complex_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

    auto* skeleton_cmd = app.add_subcommand("skeleton", "cells of dimension at most k and the oriented 1-skeleton");
    add_input(skeleton_cmd);
    skeleton_cmd->add_option("-k", k, "skeleton dimension (default n0 - 1)");
    skeleton_cmd->add_option("-o,--out", out_path, "output file");

    auto* regions_cmd = app.add_subcommand("regions", "components of the decision regions at a threshold");
    add_input(regions_cmd);
    regions_cmd->add_option("-t,--threshold", threshold, "rational threshold or 'auto'");
    regions_cmd->add_flag("--certificates", certificates, "attach extremum certificates to bounded components");
    regions_cmd->add_option("-o,--out", out_path, "output file");

    auto* trans_cmd = app.add_subcommand("transversality", "genericity and transversality report");
    add_input(trans_cmd);
    std::string trans_t;
    trans_cmd->add_option("-t,--threshold", trans_t, "also test this threshold");
    trans_cmd->add_option("-o,--out", out_path, "output file");

    auto* johnson_cmd = app.add_subcommand("verify-johnson", "check that no decision region has a bounded component");
    add_input(johnson_cmd);
    johnson_cmd->add_option("-t,--threshold", threshold, "rational threshold or 'auto'");
    johnson_cmd->add_option("-o,--out", out_path, "output file");

    auto* bounded_cmd = app.add_subcommand("verify-bounded", "check at most one bounded component in Y and in N");
    add_input(bounded_cmd);
    bounded_cmd->add_option("-t,--threshold", threshold, "rational threshold or 'auto'");
    bounded_cmd->add_option("-o,--out", out_path, "output file");

    auto* exp_cmd = app.add_subcommand("experiment", "randomized batch verification");
    std::string config_path, arch_s, exp_threshold = "random", check_s = "generic", dist_s = "integer";
    ExperimentConfig cfg;
    exp_cmd->add_option("--config", config_path, "experiment config JSON (flags override it)");
    exp_cmd->add_option("--arch", arch_s, "architecture, e.g. 2,3,1");
    exp_cmd->add_option("--trials", cfg.trials, "number of networks");
    exp_cmd->add_option("--seed", cfg.seed, "64-bit seed");
    exp_cmd->add_option("--bound", cfg.bound, "parameters drawn from [-B, B]");
    exp_cmd->add_option("--distribution", dist_s, "integer or dyadic");
    exp_cmd->add_option("--dyadic-bits", cfg.dyadic_bits, "dyadic denominator exponent");
    exp_cmd->add_option("--threshold", exp_threshold, "rational threshold or 'random'");
    exp_cmd->add_option("--check", check_s, "generic, johnson or bounded");
    exp_cmd->add_option("--workers", cfg.workers, "worker threads (0: all cores)");
    exp_cmd->add_option("-o,--out", out_path, "JSONL record file");

    auto* svg_cmd = app.add_subcommand("svg", "draw a network with two inputs");
    add_input(svg_cmd);
    std::string svg_t;
    svg_cmd->add_option("-t,--threshold", svg_t, "rational threshold or 'auto' (omit for activation regions)");
    svg_cmd->add_option("--bbox", bbox, "xmin,ymin,xmax,ymax");
    svg_cmd->add_option("-o,--out", out_path, "output SVG file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return InputError;
    }

    auto emit = [&](const json& j, const char* suffix) {
        const std::string path = out_path.empty() ? detail::default_output(input, suffix) : out_path;
        detail::write_text(path, j.dump(2) + "\n", out);
    };

    try {
        if (complex_cmd->parsed()) {
            emit(to_json(build_complex(load_network(input))), ".complex.json");
        } else if (skeleton_cmd->parsed()) {
            const auto net = load_network(input);
            const auto c = build_complex(net);
            if (k < 0) k = static_cast<int>(c.ambient_dim) - 1;
            if (k > static_cast<int>(c.ambient_dim)) throw InvalidInput("-k must lie in [0, n0]");
            json cells = json::array();
            for (const Cell* cell : skeleton(c, k))
                cells.push_back({{"sign", to_string(cell->sign)}, {"dim", cell->dim}, {"bounded", cell->bounded}});
            emit({{"k", k}, {"cells", cells}, {"oriented_skeleton", to_json(oriented_skeleton(c))}}, ".skeleton.json");
        } else if (regions_cmd->parsed()) {
            const auto net = load_network(input);
            auto c = build_complex(net);
            const Rational t = detail::resolve_threshold(threshold, c);
            const auto a = analyze_decision(std::move(c), t);
            json j = to_json(a.topology);
            if (certificates) {
                json certs = json::array();
                for (Region r : {Region::Y, Region::N})
                    for (std::size_t i = 0; i < a.topology[r].components.size(); ++i)
                        if (a.topology[r].components[i].bounded) certs.push_back(to_json(max_subgraph(a, r, i)));
                j["certificates"] = certs;
            }
            emit(j, ".regions.json");
        } else if (trans_cmd->parsed()) {
            const auto net = load_network(input);
            json j = to_json(is_transversal_network(net));
            if (!trans_t.empty()) {
                const Rational t = parse_rational(trans_t);
                j["threshold"] = to_string(t);
                j["threshold_transversal"] = is_transversal_threshold(net, t);
            }
            emit(j, ".transversality.json");
        } else if (johnson_cmd->parsed() || bounded_cmd->parsed()) {
            const bool johnson = johnson_cmd->parsed();
            const auto net = load_network(input);
            if (johnson) check_johnson_applicable(net);
            else check_one_bounded_applicable(net);
            auto c = build_complex(net);
            const Rational t = detail::resolve_threshold(threshold, c);
            const auto a = analyze_decision(std::move(c), t);
            const auto rep = johnson ? verify_johnson(net, a) : verify_one_bounded(net, a);
            json j = to_json(rep);
            if (!rep.pass) j["network"] = to_json(net);
            emit(j, johnson ? ".johnson.json" : ".bounded.json");
            return rep.pass ? Success : Counterexample;
        } else if (exp_cmd->parsed()) {
            ExperimentConfig base;
            if (!config_path.empty()) base = config_from_json(io::parse_text(io::read_file(config_path)));
            if (!arch_s.empty()) base.architecture = detail::parse_arch(arch_s);
            auto given = [&](const char* name) { return exp_cmd->count(name) > 0; };
            if (given("--trials")) base.trials = cfg.trials;
            if (given("--seed")) base.seed = cfg.seed;
            if (given("--bound")) base.bound = cfg.bound;
            if (given("--dyadic-bits")) base.dyadic_bits = cfg.dyadic_bits;
            if (given("--workers")) base.workers = cfg.workers;
            if (given("--distribution")) {
                if (dist_s == "integer") base.distribution = Distribution::IntegerUniform;
                else if (dist_s == "dyadic") base.distribution = Distribution::Dyadic;
                else throw ParseError("unknown distribution '" + dist_s + "'");
            }
            if (given("--check")) base.check = parse_check(check_s);
            if (given("--threshold")) {
                if (exp_threshold == "random") {
                    base.threshold_policy = ThresholdPolicy::Random;
                } else {
                    base.threshold_policy = ThresholdPolicy::Fixed;
                    base.threshold = parse_rational(exp_threshold);
                }
            }
            if (!out_path.empty()) base.output = out_path;
            else if (base.output.empty()) base.output = detail::default_output("experiment", ".jsonl");
            const auto summary = run_experiment(base);
            out << to_json(summary).dump(2) << "\n";
            return summary.counterexamples ? Counterexample : Success;
        } else if (svg_cmd->parsed()) {
            const auto net = load_network(input);
            SvgOptions opt;
            if (!bbox.empty()) opt.bbox = parse_bbox(bbox);
            if (!svg_t.empty())
                opt.threshold = svg_t == "auto" ? auto_threshold(nontransversal_thresholds(net)) : parse_rational(svg_t);
            const std::string path = out_path.empty() ? detail::default_output(input, ".svg") : out_path;
            detail::write_text(path, render_svg(net, opt), out);
        }
        return Success;
    } catch (const NonTransversalThreshold& e) {
        err << "error: " << e.what() << "; " << nearest_gap(e.threshold, e.nontransversal) << "\n";
        return NonTransversal;
    } catch (const NotApplicable& e) {
        err << "not applicable: " << e.what() << "\n";
        return NotApplicableArch;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return InputError;
    } catch (const InvalidInput& e) {
        err << "input error: " << e.what() << "\n";
        return InputError;
    } catch (const json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return InputError;
    } catch (const ExperimentIoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return InputError;
    }
}

} // namespace relutopo::cli

#pragma once

#include "relutopo/serialize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace relutopo {

enum class Distribution { IntegerUniform, Dyadic };
enum class ThresholdPolicy { Fixed, Random };
enum class Check { Generic, Johnson, OneBounded };

inline const char* to_string(Check c) {
    switch (c) {
    case Check::Generic: return "generic";
    case Check::Johnson: return "johnson";
    case Check::OneBounded: return "bounded";
    }
    return "?";
}

inline Check parse_check(std::string_view s) {
    if (s == "generic") return Check::Generic;
    if (s == "johnson") return Check::Johnson;
    if (s == "bounded") return Check::OneBounded;
    throw ParseError("unknown check '" + std::string(s) + "' (expected generic, johnson or bounded)");
}

struct ExperimentConfig {
    std::vector<std::size_t> architecture;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    Distribution distribution = Distribution::IntegerUniform;
    std::int64_t bound = 1;   // parameters lie in [-bound, bound]
    unsigned dyadic_bits = 4; // dyadic parameters are multiples of 2^-dyadic_bits
    ThresholdPolicy threshold_policy = ThresholdPolicy::Random;
    Rational threshold = 0;
    Check check = Check::Generic;
    std::size_t workers = 0; // 0: hardware concurrency
    std::string output;      // JSONL path; empty disables persistence

    void validate() const {
        if (architecture.size() < 3 || architecture.back() != 1 ||
            std::find(architecture.begin(), architecture.end(), std::size_t{0}) != architecture.end())
            throw InvalidInput("architecture must be (n0, ..., nm, 1) with positive widths and m >= 1");
        if (trials < 1) throw InvalidInput("trials must be at least 1");
        // bound = 0 is allowed: it yields the zero network.
        if (bound < 0) throw InvalidInput("parameter bound must be nonnegative");
        if (dyadic_bits > 30) throw InvalidInput("dyadic exponent too large");
        const std::size_t n0 = architecture.front();
        std::size_t width = 0;
        for (std::size_t i = 1; i + 1 < architecture.size(); ++i) width = std::max(width, architecture[i]);
        if (check == Check::Johnson && (n0 < 2 || width > n0))
            throw NotApplicable("johnson check needs n0 >= 2 and every hidden layer at most n0 wide");
        if (check == Check::OneBounded && (architecture.size() != 3 || architecture[1] != n0 + 1))
            throw NotApplicable("bounded check needs architecture (n, n+1, 1)");
    }
};

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.architecture = io::member(j, "architecture", "").get<std::vector<std::size_t>>();
    c.trials = j.value("trials", std::size_t{1});
    c.seed = j.value("seed", std::uint64_t{0});
    c.bound = j.value("bound", std::int64_t{1});
    const std::string dist = j.value("distribution", std::string("integer"));
    if (dist == "integer") c.distribution = Distribution::IntegerUniform;
    else if (dist == "dyadic") c.distribution = Distribution::Dyadic;
    else throw ParseError("unknown distribution '" + dist + "'");
    c.dyadic_bits = j.value("dyadic_bits", 4u);
    if (j.contains("threshold") && !(j["threshold"].is_string() && j["threshold"] == "random")) {
        c.threshold_policy = ThresholdPolicy::Fixed;
        c.threshold = io::rational_from(j["threshold"], "/threshold");
    }
    c.check = parse_check(j.value("check", std::string("generic")));
    c.workers = j.value("workers", std::size_t{0});
    c.output = j.value("output", std::string());
    return c;
}

/// Deterministic in (seed, index); parameters drawn layer by layer, W row-major then b.
inline ReluNetwork sample_network(const ExperimentConfig& cfg, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    const std::int64_t scale = cfg.distribution == Distribution::Dyadic ? (std::int64_t{1} << cfg.dyadic_bits) : 1;
    std::uniform_int_distribution<std::int64_t> draw(-cfg.bound * scale, cfg.bound * scale);
    auto next = [&] { return Rational(draw(rng), scale); };
    const auto& arch = cfg.architecture;
    std::vector<AffineMap> layers;
    for (std::size_t i = 0; i + 1 < arch.size(); ++i) {
        RatMatrix w(arch[i + 1], arch[i]);
        for (std::size_t r = 0; r < w.rows(); ++r)
            for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = next();
        RatVector b(arch[i + 1]);
        for (auto& x : b) x = next();
        layers.emplace_back(std::move(w), std::move(b));
    }
    return {arch, std::move(layers)};
}

/// A random multiple of 1/1024 around the constant-cell values that avoids them.
inline std::optional<Rational> random_transversal_threshold(const std::set<Rational>& bad, std::uint64_t seed,
                                                            std::uint64_t index, int attempts = 32) {
    Rational lo = -1, hi = 1;
    if (!bad.empty()) {
        lo = *bad.begin() - 1;
        hi = *bad.rbegin() + 1;
    }
    constexpr std::int64_t grid = 1024;
    const auto a = boost::multiprecision::numerator(ceil(lo * grid)).convert_to<std::int64_t>();
    const auto b = boost::multiprecision::numerator(floor(hi * grid)).convert_to<std::int64_t>();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x7468u};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::int64_t> draw(a, b);
    for (int k = 0; k < attempts; ++k) {
        Rational t(draw(rng), grid);
        if (!bad.count(t)) return t;
    }
    return std::nullopt;
}

struct TrialRecord {
    std::uint64_t index = 0;
    std::string hash;
    bool generic = false;
    bool transversal = false;
    std::optional<Rational> threshold;
    std::optional<std::array<std::size_t, 3>> bounded; // per Region
    std::string verdict;                               // pass, fail, counterexample, no-threshold
    double wall_ms = 0;
    std::optional<json> network; // embedded when the verdict is not a pass

    bool passed() const { return verdict == "pass"; }
};

inline json to_json(const TrialRecord& r) {
    json j = {{"index", r.index}, {"hash", r.hash}, {"generic", r.generic}, {"transversal", r.transversal}};
    j["threshold"] = r.threshold ? json(to_string(*r.threshold)) : json(nullptr);
    if (r.bounded)
        j["bounded_components"] = {{"Y", (*r.bounded)[static_cast<int>(Region::Y)]},
                                   {"B", (*r.bounded)[static_cast<int>(Region::B)]},
                                   {"N", (*r.bounded)[static_cast<int>(Region::N)]}};
    else
        j["bounded_components"] = nullptr;
    j["verdict"] = r.verdict;
    j["wall_ms"] = r.wall_ms;
    if (r.network) j["network"] = *r.network;
    return j;
}

/// Runs the configured check on one network. A threshold may be forced, which is
/// how embedded counterexamples are replayed.
inline TrialRecord run_trial(const ExperimentConfig& cfg, const ReluNetwork& net, std::uint64_t index,
                             std::optional<Rational> forced = std::nullopt) {
    const auto start = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.index = index;
    rec.hash = network_hash(net);
    CanonicalComplex complex;
    const auto report = is_transversal_network(net, &complex);
    rec.generic = report.generic;
    rec.transversal = report.transversal;

    if (cfg.check == Check::Generic) {
        rec.verdict = rec.generic && rec.transversal ? "pass" : "fail";
    } else {
        if (forced) rec.threshold = forced;
        else if (cfg.threshold_policy == ThresholdPolicy::Fixed) rec.threshold = cfg.threshold;
        else rec.threshold = random_transversal_threshold(report.thresholds, cfg.seed, index);

        if (!rec.threshold || report.thresholds.count(*rec.threshold)) {
            rec.verdict = "no-threshold";
        } else {
            const auto analysis = analyze_decision(std::move(complex), *rec.threshold);
            const auto v = cfg.check == Check::Johnson ? verify_johnson(net, analysis) : verify_one_bounded(net, analysis);
            rec.bounded = v.bounded;
            rec.verdict = v.pass ? "pass" : "counterexample";
        }
    }
    if (!rec.passed()) rec.network = to_json(net);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

/// Re-runs the check on the network embedded in a record and returns the new verdict.
inline std::string replay(const ExperimentConfig& cfg, const json& record) {
    if (!record.contains("network")) throw InvalidInput("record has no embedded network");
    const ReluNetwork net = network_from_json(record["network"]);
    std::optional<Rational> t;
    if (record.contains("threshold") && !record["threshold"].is_null())
        t = io::rational_from(record["threshold"], "/threshold");
    return run_trial(cfg, net, record.value("index", std::uint64_t{0}), t).verdict;
}

struct ExperimentSummary {
    std::size_t trials = 0;
    std::size_t passes = 0;
    std::size_t generic = 0;
    std::size_t transversal = 0;
    std::size_t no_threshold = 0;
    std::size_t counterexamples = 0;
    std::array<std::size_t, 3> max_bounded{}; // per Region
    std::vector<std::uint64_t> failures;      // indices whose verdict is not a pass

    double pass_rate() const { return trials ? static_cast<double>(passes) / trials : 0.0; }
    double generic_rate() const { return trials ? static_cast<double>(generic) / trials : 0.0; }
    double transversal_rate() const { return trials ? static_cast<double>(transversal) / trials : 0.0; }

    void add(const TrialRecord& r) {
        ++trials;
        passes += r.passed();
        generic += r.generic;
        transversal += r.transversal;
        no_threshold += r.verdict == "no-threshold";
        counterexamples += r.verdict == "counterexample";
        if (r.bounded)
            for (std::size_t k = 0; k < 3; ++k) max_bounded[k] = std::max(max_bounded[k], (*r.bounded)[k]);
        if (!r.passed()) failures.push_back(r.index);
    }
};

inline json to_json(const ExperimentSummary& s) {
    return {{"trials", s.trials},
            {"passes", s.passes},
            {"pass_rate", s.pass_rate()},
            {"generic_rate", s.generic_rate()},
            {"transversal_rate", s.transversal_rate()},
            {"no_threshold", s.no_threshold},
            {"counterexamples", s.counterexamples},
            {"max_bounded_components",
             {{"Y", s.max_bounded[static_cast<int>(Region::Y)]},
              {"B", s.max_bounded[static_cast<int>(Region::B)]},
              {"N", s.max_bounded[static_cast<int>(Region::N)]}}},
            {"failures", s.failures}};
}

class ExperimentIoError : public std::runtime_error {
public:
    ExperimentIoError(const std::string& what, std::size_t written)
        : std::runtime_error(what + " after " + std::to_string(written) + " records"), records_written(written) {}
    std::size_t records_written;
};

/// Trials run on a worker pool; records reach the JSONL file and `on_record` in
/// index order from this thread only.
template <class OnRecord>
ExperimentSummary run_experiment(const ExperimentConfig& cfg, OnRecord&& on_record) {
    cfg.validate();
    std::ofstream out;
    if (!cfg.output.empty()) {
        out.open(cfg.output, std::ios::binary | std::ios::trunc);
        if (!out) throw ExperimentIoError("cannot open " + cfg.output, 0);
    }
    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.trials);

    std::vector<std::optional<TrialRecord>> slots(cfg.trials);
    std::atomic<std::size_t> next{0};
    std::mutex m;
    std::condition_variable ready;
    std::exception_ptr error;

    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < cfg.trials;) {
                std::optional<TrialRecord> rec;
                try {
                    rec = run_trial(cfg, sample_network(cfg, i), i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!error) error = std::current_exception();
                    next = cfg.trials;
                }
                std::lock_guard lock(m);
                slots[i] = std::move(rec);
                if (!slots[i]) slots[i].emplace(); // placeholder; the writer stops on `error`
                ready.notify_one();
            }
        });

    ExperimentSummary summary;
    std::size_t written = 0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
        TrialRecord rec;
        {
            std::unique_lock lock(m);
            // Every index below a failed one was claimed earlier, so its slot does get filled.
            ready.wait(lock, [&] { return slots[i].has_value(); });
            if (error) break;
            rec = std::move(*slots[i]);
        }
        summary.add(rec);
        on_record(rec);
        if (out.is_open()) {
            out << to_json(rec).dump() << '\n';
            if (!out) {
                for (auto& t : pool) t.join();
                throw ExperimentIoError("write to " + cfg.output + " failed", written);
            }
        }
        ++written;
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    if (out.is_open()) {
        out.flush();
        if (!out) throw ExperimentIoError("write to " + cfg.output + " failed", written);
    }
    return summary;
}

inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, [](const TrialRecord&) {});
}

} // namespace relutopo

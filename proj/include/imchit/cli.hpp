// This file is part of imchit, a C++ library for bounding hitting
// probabilities and expected hitting times of Markov chains with
// set-valued transition rows.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

// Command-line front end. Exit codes: 0 success, 1 bad input or a failed
// verification, 2 iteration budget exhausted. Output is deterministic:
// identical invocations produce byte-identical bytes.

#pragma once

#include "imchit/model_io.hpp"
#include "imchit/verify.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <ostream>

namespace imchit {

struct CliConfig {
    std::string model_path;
    std::vector<std::string> target_override;
    prec_t tolerance = 1e-9;
    size_t max_iterations = 1000000;
    uint64_t seed = 0;
    std::string output_format = "table";
    size_t runs = 100000;
    size_t cap = 1000000;
    size_t max_family = 50;
};

namespace detail {

inline std::string fixed6(prec_t v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
}

inline std::string fixed6(const ExtendedValue& v) { return v.is_finite() ? fixed6(v.value()) : "inf"; }

inline std::string label_list(const StateSpace& states, const stateset& s) {
    std::string out = "{";
    bool first = true;
    for (size_t x : s) {
        if (!first) out += ", ";
        first = false;
        out += states.labels[x];
    }
    return out + "}";
}

inline size_t label_column_width(const std::vector<std::string>& labels) {
    size_t w = 5;
    for (const auto& l : labels) w = std::max(w, l.size());
    return w;
}

inline void print_analysis_table(const AnalysisResult& r, std::ostream& out) {
    const size_t lw = label_column_width(r.states.labels);
    out << std::left << std::setw(static_cast<int>(lw)) << "state" << std::right << std::setw(12)
        << "lower_prob" << std::setw(12) << "upper_prob" << std::setw(12) << "lower_time" << std::setw(12)
        << "upper_time"
        << "  region\n";
    for (size_t x = 0; x < r.states.labels.size(); ++x) {
        out << std::left << std::setw(static_cast<int>(lw)) << r.states.labels[x] << std::right << std::setw(12)
            << fixed6(r.lower_prob[x]) << std::setw(12) << fixed6(r.upper_prob[x]) << std::setw(12)
            << fixed6(r.lower_time[x]) << std::setw(12) << fixed6(r.upper_time[x]) << "  "
            << region_name(r.regions[x]) << "\n";
    }
    out << "target: " << label_list(r.states, r.target.members) << "\n";
    out << "avoidable: " << label_list(r.states, r.partition.avoidable) << "\n";
    out << "avoidable_exposure: " << label_list(r.states, r.partition.avoidable_exposure) << "\n";
    out << "unreachable: " << label_list(r.states, r.partition.unreachable) << "\n";
    out << "unreachable_exposure: " << label_list(r.states, r.partition.unreachable_exposure) << "\n";
    out << "almost_sure: " << label_list(r.states, r.partition.almost_sure) << "\n";
    for (const auto& finding : r.findings) out << "note: " << finding << "\n";
}

inline Model load_model_with_target(const CliConfig& cfg) {
    Model m = load_model(cfg.model_path);
    if (!cfg.target_override.empty()) {
        m.target = target_from_labels(m.states, cfg.target_override);
        const auto errors = validate_model(m);
        if (!errors.empty()) throw std::invalid_argument("invalid model: " + errors.front());
    }
    return m;
}

inline int cmd_analyze(const CliConfig& cfg, std::ostream& out) {
    const Model m = load_model_with_target(cfg);
    const AnalysisResult r = analyze(m, IterationSettings{cfg.tolerance, cfg.max_iterations});
    if (cfg.output_format == "structured") {
        out << serialize_result(r);
    } else {
        print_analysis_table(r, out);
    }
    return 0;
}

inline int cmd_verify(const CliConfig& cfg, std::ostream& out) {
    const IterationSettings settings{cfg.tolerance, cfg.max_iterations};
    std::vector<std::pair<std::string, Model>> corpus;
    if (!cfg.model_path.empty()) {
        corpus.emplace_back(cfg.model_path, load_model_with_target(cfg));
    } else {
        for (size_t i = 0; i < 100; ++i)
            corpus.emplace_back("interval-" + std::to_string(i),
                                random_interval_model(2 + i % 7, 0.25 + 0.05 * static_cast<prec_t>(i % 6),
                                                      0.1 + 0.1 * static_cast<prec_t>(i % 5),
                                                      cfg.seed * 1000003ULL + i));
        for (size_t i = 0; i < 100; ++i)
            corpus.emplace_back("vertex-" + std::to_string(i),
                                random_vertex_model(2 + i % 4, 1 + i % 3, 0.3,
                                                    cfg.seed * 1000003ULL + 500 + i));
    }

    // Aggregated per-relation tallies, in first-seen order.
    std::vector<std::string> order;
    std::vector<std::array<size_t, 3>> tallies;
    auto slot = [&](const std::string& name) -> std::array<size_t, 3>& {
        for (size_t i = 0; i < order.size(); ++i)
            if (order[i] == name) return tallies[i];
        order.push_back(name);
        tallies.push_back({0, 0, 0});
        return tallies.back();
    };

    size_t states_checked = 0;
    std::vector<std::string> failures, noted;
    for (const auto& [name, model] : corpus) {
        const RelationReport rep = check_relations(model, settings);
        states_checked += model.size();
        for (const auto& [relation, verdicts] : rep.relations) {
            auto& t = slot(relation);
            for (const Verdict v : verdicts) ++t[static_cast<size_t>(v)];
        }
        for (const auto& w : rep.failure_witnesses) failures.push_back(name + ": " + w);
        for (const auto& w : rep.mismatch_witnesses) noted.push_back(name + ": " + w);
    }

    size_t name_width = 8;
    for (const auto& name : order) name_width = std::max(name_width, name.size());
    out << "corpus: " << corpus.size() << " models, " << states_checked << " states\n";
    out << std::left << std::setw(static_cast<int>(name_width)) << "relation" << std::right << std::setw(8)
        << "pass" << std::setw(8) << "fail" << std::setw(8) << "noted\n";
    for (size_t i = 0; i < order.size(); ++i)
        out << std::left << std::setw(static_cast<int>(name_width)) << order[i] << std::right << std::setw(8)
            << tallies[i][0] << std::setw(8) << tallies[i][1] << std::setw(8) << tallies[i][2] << "\n";

    auto print_capped = [&](const std::vector<std::string>& lines, const char* prefix, size_t cap) {
        for (size_t i = 0; i < lines.size() && i < cap; ++i) out << prefix << lines[i] << "\n";
        if (lines.size() > cap) out << prefix << "(" << lines.size() - cap << " more)\n";
    };
    print_capped(failures, "failure: ", 20);
    print_capped(noted, "noted: ", 10);

    const bool ok = failures.empty();
    out << "result: " << (ok ? "PASS" : "FAIL") << " (" << failures.size() << " failures, " << noted.size()
        << " noted converse gaps)\n";
    return ok ? 0 : 1;
}

inline int cmd_counterexample(const CliConfig& cfg, std::ostream& out) {
    const CounterexampleTrend trend =
        counterexample_trend(cfg.max_family, IterationSettings{cfg.tolerance, cfg.max_iterations});
    out << std::left << std::setw(8) << "family" << std::right << std::setw(12) << "lower_prob"
        << std::setw(12) << "upper_prob" << std::setw(12) << "lower_time" << std::setw(12) << "upper_time"
        << "\n";
    for (const auto& e : trend.entries) {
        out << std::left << std::setw(8) << e.family_size << std::right << std::setw(12)
            << fixed6(e.lower_prob) << std::setw(12) << fixed6(e.upper_prob) << std::setw(12)
            << (e.lower_time_finite ? "finite" : "inf") << std::setw(12)
            << (e.upper_time_finite ? "finite" : "inf") << "\n";
    }
    out << "partition (all sizes): " << trend.entries.back().partition_summary << "\n";
    out << "best-case probability climbs toward 1 while both expected times stay infinite\n";
    return 0;
}

inline int cmd_simulate(const CliConfig& cfg, std::ostream& out) {
    const Model m = load_model_with_target(cfg);
    const StochasticMatrix T = to_matrix(m);
    out << "runs: " << cfg.runs << ", horizon cap: " << cfg.cap << ", seed: " << cfg.seed << "\n";
    const size_t lw = label_column_width(m.states.labels);
    out << std::left << std::setw(static_cast<int>(lw)) << "state" << std::right << std::setw(14)
        << "hit_fraction" << std::setw(14) << "mean_time" << std::setw(10) << "censored\n";
    for (size_t x = 0; x < m.size(); ++x) {
        const SimulationEstimate est =
            simulate_chain(T, m.target, x, cfg.runs, cfg.cap, cfg.seed * m.size() + x);
        out << std::left << std::setw(static_cast<int>(lw)) << m.states.labels[x] << std::right
            << std::setw(14) << fixed6(est.hit_fraction) << std::setw(14) << fixed6(est.mean_time_given_hit)
            << std::setw(10) << est.censored_runs << "\n";
    }
    return 0;
}

inline int cmd_oracle(const CliConfig& cfg, std::ostream& out) {
    const Model m = load_model_with_target(cfg);
    const AnalysisResult r = analyze(m, IterationSettings{cfg.tolerance, cfg.max_iterations});
    const BruteForceEnvelopes oracle = brute_force_envelopes(m);

    auto close = [](prec_t a, prec_t b) {
        return std::fabs(a - b) <= 1e-6 * std::max({1.0, std::fabs(a), std::fabs(b)});
    };
    const size_t lw = label_column_width(m.states.labels);
    out << "pure selections enumerated: " << oracle.selections << "\n";
    out << std::left << std::setw(static_cast<int>(lw)) << "state" << std::setw(12) << "quantity"
        << std::right << std::setw(14) << "analysis" << std::setw(14) << "enumeration"
        << "  status\n";
    bool ok = true;
    auto row = [&](size_t x, const char* quantity, const std::string& a, const std::string& b, bool match) {
        ok = ok && match;
        out << std::left << std::setw(static_cast<int>(lw)) << m.states.labels[x] << std::setw(12) << quantity
            << std::right << std::setw(14) << a << std::setw(14) << b << "  " << (match ? "ok" : "MISMATCH")
            << "\n";
    };
    auto time_match = [&](const ExtendedValue& a, const ExtendedValue& b) {
        if (a.is_finite() != b.is_finite()) return false;
        return !a.is_finite() || close(a.value(), b.value());
    };
    for (size_t x = 0; x < m.size(); ++x) {
        row(x, "lower_prob", fixed6(r.lower_prob[x]), fixed6(oracle.lower_prob[x]),
            close(r.lower_prob[x], oracle.lower_prob[x]));
        row(x, "upper_prob", fixed6(r.upper_prob[x]), fixed6(oracle.upper_prob[x]),
            close(r.upper_prob[x], oracle.upper_prob[x]));
        row(x, "lower_time", fixed6(r.lower_time[x]), fixed6(oracle.lower_time[x]),
            time_match(r.lower_time[x], oracle.lower_time[x]));
        row(x, "upper_time", fixed6(r.upper_time[x]), fixed6(oracle.upper_time[x]),
            time_match(r.upper_time[x], oracle.upper_time[x]));
    }
    out << "result: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

} // namespace detail

/**
 * Parses `args` (program name excluded) and runs the chosen subcommand,
 * writing results to `out` and errors to `err`. Returns the process exit
 * code; never throws.
 */
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    CLI::App app{"Bounds on hitting probabilities and expected hitting times of Markov chains whose "
                 "transition rows are known only up to a set"};
    app.require_subcommand(1);

    auto add_iteration_options = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tolerance, "Sup-norm step size at which value iteration stops")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-iters", cfg.max_iterations, "Sweep budget before giving up")
            ->check(CLI::PositiveNumber);
    };
    auto add_model_option = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--model", cfg.model_path, "Model JSON file");
        if (required) opt->required();
        sub->add_option("--target", cfg.target_override,
                        "Comma-separated state labels overriding the model's target set")
            ->delimiter(',');
    };

    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "Bound hitting probabilities and times for a model file");
    add_model_option(analyze_cmd, true);
    add_iteration_options(analyze_cmd);
    analyze_cmd->add_option("--format", cfg.output_format, "Output format")
        ->check(CLI::IsMember({"table", "structured"}));

    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "Check the structural laws on a model file or on a generated random corpus");
    add_model_option(verify_cmd, false);
    add_iteration_options(verify_cmd);
    verify_cmd->add_option("--seed", cfg.seed, "Seed for the generated corpus");

    CLI::App* counterexample_cmd = app.add_subcommand(
        "counterexample", "Grow the three-state family whose best-case hitting probability approaches 1 "
                          "while both expected times stay infinite");
    counterexample_cmd->add_option("--n-max", cfg.max_family, "Largest family size to run");
    add_iteration_options(counterexample_cmd);

    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo hitting estimates for a point model (exact rows)");
    add_model_option(simulate_cmd, true);
    simulate_cmd->add_option("--runs", cfg.runs, "Independent runs per start state")
        ->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--cap", cfg.cap, "Horizon after which a run is censored")
        ->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", cfg.seed, "Base seed; per-state streams are derived from it");

    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle", "Compare the iterative solvers against exhaustive pure-selection enumeration");
    add_model_option(oracle_cmd, true);
    add_iteration_options(oracle_cmd);

    try {
        // CLI11 consumes pre-reversed argument vectors.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        for (CLI::App* sub : app.get_subcommands()) {
            out << sub->help();
            return 0;
        }
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (analyze_cmd->parsed()) return detail::cmd_analyze(cfg, out);
        if (verify_cmd->parsed()) return detail::cmd_verify(cfg, out);
        if (counterexample_cmd->parsed()) return detail::cmd_counterexample(cfg, out);
        if (simulate_cmd->parsed()) return detail::cmd_simulate(cfg, out);
        if (oracle_cmd->parsed()) return detail::cmd_oracle(cfg, out);
    } catch (const iteration_limit_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace imchit

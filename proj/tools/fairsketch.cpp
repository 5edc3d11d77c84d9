// fairsketch: command-line driver for the frequency-sketch library.
// Subcommands: alloc, gen, run, mc-wl, estimate. Exit codes: 0 success,
// 2 usage error or infeasible allocation, 1 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcm/fcm.hpp"

namespace {

using nlohmann::json;

bool is_genspec(const std::string& text) {
    for (const char* prefix : {"zipf:", "gaussian:", "exponential:", "uniform:", "2pop:"}) {
        if (text.rfind(prefix, 0) == 0) return true;
    }
    return false;
}

// "2pop:DIST;DIST" with DIST as in parse_distribution.
std::pair<fcm::distribution_spec, fcm::distribution_spec> parse_two_pop(const std::string& text) {
    const std::string rest = text.substr(5);
    const auto semi = rest.find(';');
    if (semi == std::string::npos) {
        throw std::invalid_argument("2pop spec needs two ';'-separated distributions: " + text);
    }
    return {fcm::parse_distribution(rest.substr(0, semi)),
            fcm::parse_distribution(rest.substr(semi + 1))};
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": bad number '" + text + "'");
    }
}

void warn_if_degenerate(const std::vector<std::uint32_t>& labels, std::size_t requested) {
    std::vector<bool> seen(requested, false);
    std::size_t distinct = 0;
    for (const std::uint32_t l : labels) {
        if (l < requested && !seen[l]) {
            seen[l] = true;
            distinct += 1;
        }
    }
    if (distinct < requested) {
        std::cerr << "warning: grouping produced " << distinct << " group(s) of " << requested
                  << " requested\n";
    }
}

// Applies "threshold:T" or "equiwidth:L" to raw frequencies.
fcm::stream_dataset group_and_build(const std::vector<std::uint64_t>& freqs,
                                    const std::string& group_spec) {
    const auto colon = group_spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("group spec must be threshold:T or equiwidth:L");
    }
    const std::string kind = group_spec.substr(0, colon);
    const std::string arg = group_spec.substr(colon + 1);
    if (kind == "threshold") {
        const std::uint64_t tau = parse_u64(arg, "threshold");
        const auto labels = fcm::group_by_threshold(freqs, tau);
        warn_if_degenerate(labels, 2);
        return fcm::make_dataset(freqs, labels, {"low", "high"});
    }
    if (kind == "equiwidth") {
        const std::uint64_t groups = parse_u64(arg, "equiwidth");
        if (groups == 0) throw std::invalid_argument("equiwidth: need at least one group");
        const auto labels = fcm::group_equi_width(freqs, groups);
        warn_if_degenerate(labels, groups);
        std::vector<std::string> names;
        names.reserve(groups);
        for (std::uint64_t g = 0; g < groups; ++g) names.push_back("g" + std::to_string(g));
        return fcm::make_dataset(freqs, labels, names);
    }
    throw std::invalid_argument("unknown group spec kind: " + kind);
}

json dataset_summary(const fcm::frequency_oracle& oracle) {
    json groups = json::array();
    for (std::size_t g = 0; g < oracle.group_count(); ++g) {
        groups.push_back({{"name", oracle.group_name(g)},
                          {"elements", oracle.group_elements(g)},
                          {"mass", oracle.group_mass(g)}});
    }
    return {{"elements", oracle.elements()},
            {"total_mass", oracle.total_mass()},
            {"groups", std::move(groups)}};
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

struct gen_args {
    std::string dist;
    std::uint64_t n = 0;
    std::uint64_t nl = 0;
    std::uint64_t seed = 0;
    std::string group;
    std::string out;
};

void cmd_gen(const gen_args& a) {
    fcm::stream_dataset data;
    if (a.dist.rfind("2pop:", 0) == 0) {
        if (!a.group.empty()) {
            throw std::invalid_argument("2pop streams are grouped by population; drop --group");
        }
        if (a.n < 2) throw std::invalid_argument("2pop streams need --n of at least 2");
        const auto [low, high] = parse_two_pop(a.dist);
        const std::uint64_t n_low = a.nl == 0 ? a.n / 2 : a.nl;
        if (n_low == 0 || n_low >= a.n) {
            throw std::invalid_argument("--nl must be strictly between 0 and --n");
        }
        data = fcm::make_two_population_dataset(low, n_low, high, a.n - n_low, a.seed);
    } else {
        if (a.group.empty()) {
            throw std::invalid_argument("single-distribution streams need --group threshold:T|equiwidth:L");
        }
        if (a.n == 0) throw std::invalid_argument("--n must be positive");
        const auto spec = fcm::parse_distribution(a.dist);
        data = group_and_build(fcm::gen_frequencies(spec, a.n, a.seed), a.group);
    }
    fcm::write_dataset_csv(a.out, data);
    const fcm::frequency_oracle oracle(data);
    const std::string summary = dataset_summary(oracle).dump(2) + "\n";
    write_text_file(a.out + ".json", summary);
    std::cout << summary;
}

struct alloc_args {
    std::vector<std::uint64_t> sizes;
    std::uint64_t w = 0;
    std::uint64_t d = 0;
    std::string precision = "exact";
};

void cmd_alloc(const alloc_args& a) {
    const fcm::precision mode =
        a.precision == "stirling" ? fcm::precision::stirling : fcm::precision::exact;
    const auto result = fcm::solve_multi(a.sizes, a.w, static_cast<std::size_t>(a.d), mode);
    const json out = {{"widths", result.widths}, {"residuals", result.residuals}};
    std::cout << out.dump(2) << "\n";
}

struct run_args {
    std::string experiment;
    std::string sweep;
    std::vector<std::uint64_t> values;
    std::string dataset;
    std::uint64_t n = 0;
    std::uint64_t nl = 0;
    std::uint64_t w = 0;
    std::uint64_t d = 0;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::string out;
    bool with_rp = false;
};

void cmd_run(const run_args& a) {
    fcm::run_config cfg;
    cfg.experiment = fcm::parse_experiment(a.experiment);
    cfg.sweep = fcm::parse_sweep(a.sweep);
    cfg.values = a.values;
    cfg.width = a.w;
    cfg.depth = static_cast<std::size_t>(a.d);
    cfg.trials = static_cast<std::size_t>(a.trials);
    cfg.seed = a.seed;
    cfg.with_rp = a.with_rp;

    fcm::stream_dataset base;
    if (is_genspec(a.dataset)) {
        if (a.n == 0) throw std::invalid_argument("generated streams need --n");
        const std::uint64_t data_seed = fcm::mix_seed(a.seed, 0xD5);
        if (a.dataset.rfind("2pop:", 0) == 0) {
            const auto [low, high] = parse_two_pop(a.dataset);
            const std::uint64_t n_low = a.nl == 0 ? a.n / 2 : a.nl;
            if (n_low == 0 || n_low >= a.n) {
                throw std::invalid_argument("--nl must be strictly between 0 and --n");
            }
            base = fcm::make_two_population_dataset(low, n_low, high, a.n - n_low, data_seed);
            if (cfg.sweep == fcm::sweep_kind::n_low) {
                cfg.regen = fcm::two_pop_source{low, high, a.n, data_seed};
            }
        } else {
            const auto spec = fcm::parse_distribution(a.dataset);
            const auto freqs = fcm::gen_frequencies(spec, a.n, data_seed);
            const auto labels = fcm::group_equi_width(freqs, 2);
            warn_if_degenerate(labels, 2);
            base = fcm::make_dataset(freqs, labels, {"g0", "g1"});
        }
    } else {
        base = fcm::read_dataset_csv(a.dataset);
    }

    const auto rows = fcm::run_experiment(cfg, base);
    fcm::write_results_csv(a.out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << a.out << "\n";
}

struct mc_args {
    std::uint64_t nl = 0;
    std::uint64_t nh = 0;
    std::uint64_t w = 0;
    std::uint64_t d = 0;
    std::string dist_l;
    std::string dist_h;
    std::uint64_t trials = 20;
    std::uint64_t seed = 0;
};

void cmd_mc_wl(const mc_args& a) {
    fcm::mc_config cfg;
    cfg.n_low = a.nl;
    cfg.n_high = a.nh;
    cfg.dist_low = fcm::parse_distribution(a.dist_l);
    cfg.dist_high = fcm::parse_distribution(a.dist_h);
    cfg.width = a.w;
    cfg.depth = static_cast<std::size_t>(a.d);
    cfg.trials = static_cast<std::size_t>(a.trials);
    cfg.seed = a.seed;
    const auto result = fcm::mc_estimate_wl(cfg);
    const std::uint64_t solver_wl =
        fcm::solve_two_group(a.nl, a.nh, a.w, static_cast<std::size_t>(a.d));
    const json out = {{"avg_wl", result.mean_wl},
                      {"solver_wl", solver_wl},
                      {"per_trial", result.trial_means}};
    std::cout << out.dump(2) << "\n";
}

struct estimate_args {
    std::string dataset;
    std::string sketch;
    std::uint64_t w = 0;
    std::uint64_t d = 0;
    std::uint64_t seed = 0;
    std::string query;
};

void cmd_estimate(const estimate_args& a) {
    const fcm::stream_dataset data = fcm::read_dataset_csv(a.dataset);
    const fcm::frequency_oracle oracle(data);
    const std::size_t depth = static_cast<std::size_t>(a.d);

    std::string key;
    std::uint64_t estimate = 0;
    bool group_matches = true;
    if (a.sketch == "cm") {
        key = a.query;
        fcm::count_min sketch({.width = a.w, .depth = depth, .seed = a.seed});
        for (const auto& e : oracle.entries()) sketch.update(e.key, e.frequency);
        estimate = sketch.estimate(key);
    } else {
        const auto comma = a.query.rfind(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("fcm estimates need --query key,group");
        }
        key = a.query.substr(0, comma);
        const std::string group_name = a.query.substr(comma + 1);
        std::size_t group = oracle.group_count();
        for (std::size_t g = 0; g < oracle.group_count(); ++g) {
            if (oracle.group_name(g) == group_name) {
                group = g;
                break;
            }
        }
        if (group == oracle.group_count()) {
            throw std::invalid_argument("unknown group: " + group_name);
        }
        std::vector<std::uint64_t> widths;
        if (oracle.group_count() == 1) {
            widths = {a.w};
        } else {
            widths = fcm::solve_multi(oracle.group_element_counts(), a.w, depth).widths;
        }
        fcm::fair_count_min sketch({.width = a.w, .depth = depth, .seed = a.seed},
                                   fcm::column_layout(widths));
        for (const auto& e : oracle.entries()) sketch.update(e.key, e.group, e.frequency);
        estimate = sketch.estimate(key, group);
        group_matches = oracle.contains(key) && oracle.lookup(key).group == group;
    }

    std::cout << "estimate: " << estimate << "\n";
    if (oracle.contains(key) && group_matches) {
        const std::uint64_t f = oracle.lookup(key).frequency;
        std::cout << "frequency: " << f << "\n";
        std::cout << "alpha: " << fcm::alpha(f, estimate) << "\n";
        std::cout << "additive_error: " << fcm::additive_error(f, estimate) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency sketches with per-group column budgets"};
    app.require_subcommand(1);

    gen_args ga;
    auto* gen = app.add_subcommand("gen", "generate a synthetic grouped stream as CSV");
    gen->add_option("--dist", ga.dist, "zipf:s | gaussian:mu,sigma | exponential:rate | uniform:a,b | 2pop:DIST;DIST")
        ->required();
    gen->add_option("--n", ga.n, "number of distinct elements")->required();
    gen->add_option("--nl", ga.nl, "low-population size for 2pop (default n/2)");
    gen->add_option("--seed", ga.seed, "RNG seed")->envname("FAIR_SKETCH_SEED");
    gen->add_option("--group", ga.group, "threshold:T | equiwidth:L (single-distribution only)");
    gen->add_option("--out", ga.out, "output CSV path (summary goes to out.json)")->required();
    gen->callback([&] { cmd_gen(ga); });

    alloc_args aa;
    auto* alloc = app.add_subcommand("alloc", "split a column budget across groups");
    alloc->add_option("--sizes", aa.sizes, "group element counts")->delimiter(',')->required();
    alloc->add_option("--w", aa.w, "total columns per row")->required();
    alloc->add_option("--d", aa.d, "rows")->required();
    alloc->add_option("--precision", aa.precision, "exact | stirling")
        ->check(CLI::IsMember({"exact", "stirling"}));
    alloc->callback([&] { cmd_alloc(aa); });

    run_args ra;
    auto* run = app.add_subcommand("run", "sweep experiments over sketches, write results CSV");
    run->add_option("--experiment", ra.experiment, "unfairness | pof | efficiency")
        ->check(CLI::IsMember({"unfairness", "pof", "efficiency"}))
        ->required();
    run->add_option("--sweep", ra.sweep, "n_l | w | d | groups")
        ->check(CLI::IsMember({"n_l", "w", "d", "groups"}))
        ->required();
    run->add_option("--values", ra.values, "sweep values")->delimiter(',')->required();
    run->add_option("--dataset", ra.dataset, "CSV path or generation spec (as gen --dist)")
        ->required();
    run->add_option("--n", ra.n, "element count for generated streams");
    run->add_option("--nl", ra.nl, "low-population size for 2pop base streams (default n/2)");
    run->add_option("--w", ra.w, "total columns per row")->required();
    run->add_option("--d", ra.d, "rows")->required();
    run->add_option("--trials", ra.trials, "hash-seed repetitions per sweep value");
    run->add_option("--seed", ra.seed, "RNG seed")->envname("FAIR_SKETCH_SEED");
    run->add_option("--out", ra.out, "results CSV path")->required();
    run->add_flag("--with-rp", ra.with_rp, "include the row-partitioned baseline");
    run->callback([&] { cmd_run(ra); });

    mc_args ma;
    auto* mc = app.add_subcommand("mc-wl", "simulate the equalizing low-group width");
    mc->add_option("--nl", ma.nl, "low-group element count")->required();
    mc->add_option("--nh", ma.nh, "high-group element count")->required();
    mc->add_option("--w", ma.w, "total columns per row")->required();
    mc->add_option("--d", ma.d, "single-row repetitions per trial")->required();
    mc->add_option("--dist-l", ma.dist_l, "low-group distribution")->required();
    mc->add_option("--dist-h", ma.dist_h, "high-group distribution")->required();
    mc->add_option("--trials", ma.trials, "independent frequency draws");
    mc->add_option("--seed", ma.seed, "RNG seed")->envname("FAIR_SKETCH_SEED");
    mc->callback([&] { cmd_mc_wl(ma); });

    estimate_args ea;
    auto* est = app.add_subcommand("estimate", "build a sketch from a CSV and query one key");
    est->add_option("--dataset", ea.dataset, "stream CSV path")->required();
    est->add_option("--sketch", ea.sketch, "cm | fcm")
        ->check(CLI::IsMember({"cm", "fcm"}))
        ->required();
    est->add_option("--w", ea.w, "total columns per row")->required();
    est->add_option("--d", ea.d, "rows")->required();
    est->add_option("--seed", ea.seed, "RNG seed")->envname("FAIR_SKETCH_SEED");
    est->add_option("--query", ea.query, "key (cm) or key,group (fcm)")->required();
    est->callback([&] { cmd_estimate(ea); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const fcm::infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcm/allocate.hpp"
#include "fcm/datagen.hpp"
#include "fcm/dataset.hpp"
#include "fcm/hash.hpp"
#include "fcm/layout.hpp"
#include "fcm/metrics.hpp"
#include "fcm/oracle.hpp"
#include "fcm/sketches.hpp"

namespace fcm {

enum class experiment_kind { unfairness, pof, efficiency };
enum class sweep_kind { n_low, width, depth, groups };

inline std::string to_string(experiment_kind k) {
    switch (k) {
        case experiment_kind::unfairness: return "unfairness";
        case experiment_kind::pof: return "pof";
        case experiment_kind::efficiency: return "efficiency";
    }
    throw std::logic_error("to_string: bad experiment_kind");
}

inline std::string to_string(sweep_kind k) {
    switch (k) {
        case sweep_kind::n_low: return "n_l";
        case sweep_kind::width: return "w";
        case sweep_kind::depth: return "d";
        case sweep_kind::groups: return "groups";
    }
    throw std::logic_error("to_string: bad sweep_kind");
}

inline experiment_kind parse_experiment(const std::string& text) {
    if (text == "unfairness") return experiment_kind::unfairness;
    if (text == "pof") return experiment_kind::pof;
    if (text == "efficiency") return experiment_kind::efficiency;
    throw std::invalid_argument("unknown experiment: " + text);
}

inline sweep_kind parse_sweep(const std::string& text) {
    if (text == "n_l") return sweep_kind::n_low;
    if (text == "w") return sweep_kind::width;
    if (text == "d") return sweep_kind::depth;
    if (text == "groups") return sweep_kind::groups;
    throw std::invalid_argument("unknown sweep variable: " + text);
}

// Two sub-populations with independent frequency models; when present, a
// sweep over the low-group size regenerates the stream at each sweep value
// instead of re-splitting a fixed stream by frequency rank.
struct two_pop_source {
    distribution_spec low;
    distribution_spec high;
    std::uint64_t n_total = 0;
    std::uint64_t seed = 0;
};

struct run_config {
    experiment_kind experiment = experiment_kind::unfairness;
    sweep_kind sweep = sweep_kind::n_low;
    std::vector<std::uint64_t> values;
    std::uint64_t width = 0;
    std::size_t depth = 0;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    bool with_rp = false;
    std::optional<two_pop_source> regen;
};

// One results row. NaN in a numeric field serializes as an empty cell
// (used by infeasible rows, which carry no measurements).
struct experiment_record {
    std::string experiment;
    std::string sketch;
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string trial;
    std::string group;
    double mean_alpha = 0.0;
    double unfairness = 0.0;
    double total_additive_error = 0.0;
    double pof = 0.0;
    double build_ms = 0.0;
    double query_ns = 0.0;
    std::string status = "ok";
};

inline const char* results_csv_header() {
    return "experiment,sketch,sweep_var,sweep_value,trial,group,mean_alpha,unfairness,"
           "total_additive_error,pof,build_ms,query_ns,status";
}

namespace detail {

inline std::string format_cell(double v) {
    if (std::isnan(v)) return "";
    if (v == std::floor(v) && std::fabs(v) < 9.0e15) {
        return std::to_string(static_cast<std::int64_t>(v));
    }
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

struct measured_estimates {
    std::vector<std::uint64_t> estimates;
    double build_ms = 0.0;
    double query_ns = 0.0;
};

// Times the insert pass of the whole stream and the mean per-element query
// after a warm-up pass over every element.
template <typename UpdateFn, typename EstimateFn>
measured_estimates measure_sketch(const frequency_oracle& oracle, UpdateFn&& update,
                                  EstimateFn&& estimate) {
    using clock = std::chrono::steady_clock;
    const auto& entries = oracle.entries();

    const auto build_start = clock::now();
    for (const auto& e : entries) update(e);
    const auto build_end = clock::now();

    measured_estimates out;
    out.estimates.reserve(entries.size());
    std::uint64_t warm = 0;
    for (const auto& e : entries) warm += estimate(e);
    volatile std::uint64_t sink = warm;

    const auto query_start = clock::now();
    for (const auto& e : entries) out.estimates.push_back(estimate(e));
    const auto query_end = clock::now();

    out.build_ms = std::chrono::duration<double, std::milli>(build_end - build_start).count();
    out.query_ns = std::chrono::duration<double, std::nano>(query_end - query_start).count() /
                   static_cast<double>(entries.empty() ? 1 : entries.size());
    (void)sink;
    return out;
}

// Re-groups an existing stream, keeping keys and counts; group ids are
// compacted by first appearance, names taken from the original label.
inline stream_dataset relabel_dataset(const frequency_oracle& oracle,
                                      const std::vector<std::uint32_t>& labels,
                                      const std::vector<std::string>& label_names) {
    if (labels.size() != oracle.elements()) {
        throw std::invalid_argument("relabel_dataset: one label per element expected");
    }
    stream_dataset data;
    data.records.reserve(labels.size());
    std::vector<std::int64_t> dense_of_label;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::uint32_t label = labels[i];
        if (label >= dense_of_label.size()) dense_of_label.resize(label + 1, -1);
        if (dense_of_label[label] < 0) {
            dense_of_label[label] = static_cast<std::int64_t>(data.group_names.size());
            if (label < label_names.size()) {
                data.group_names.push_back(label_names[label]);
            } else {
                data.group_names.push_back("g" + std::to_string(label));
            }
        }
        const auto& e = oracle.entries()[i];
        data.records.push_back({e.key, static_cast<std::uint32_t>(dense_of_label[label]),
                                e.frequency});
    }
    return data;
}

struct trial_measurement {
    std::vector<group_report> reports;
    double unfairness = 0.0;
    std::uint64_t total_error = 0;
    double build_ms = 0.0;
    double query_ns = 0.0;
};

inline trial_measurement summarize(const frequency_oracle& oracle,
                                   const measured_estimates& m) {
    trial_measurement out;
    out.reports = build_group_reports(oracle, m.estimates);
    std::vector<double> means;
    means.reserve(out.reports.size());
    for (const auto& r : out.reports) means.push_back(r.mean_alpha);
    out.unfairness = fcm::unfairness(means);
    out.total_error = total_additive_error(oracle, m.estimates);
    out.build_ms = m.build_ms;
    out.query_ns = m.query_ns;
    return out;
}

// Per-sketch accumulator for the trial="mean" summary rows.
struct summary_accum {
    std::vector<double> mean_alpha_sums;
    double unfairness_sum = 0.0;
    double total_error_sum = 0.0;
    double pof_sum = 0.0;
    double build_ms_sum = 0.0;
    double query_ns_sum = 0.0;
    std::size_t trials = 0;

    void add(const trial_measurement& m, double pof_value) {
        if (mean_alpha_sums.empty()) mean_alpha_sums.assign(m.reports.size(), 0.0);
        for (std::size_t g = 0; g < m.reports.size(); ++g) {
            mean_alpha_sums[g] += m.reports[g].mean_alpha;
        }
        unfairness_sum += m.unfairness;
        total_error_sum += static_cast<double>(m.total_error);
        pof_sum += pof_value;
        build_ms_sum += m.build_ms;
        query_ns_sum += m.query_ns;
        trials += 1;
    }
};

}  // namespace detail

inline std::vector<experiment_record> run_experiment(const run_config& cfg,
                                                     const stream_dataset& base) {
    if (cfg.values.empty()) throw std::invalid_argument("run_experiment: no sweep values");
    if (cfg.trials == 0) throw std::invalid_argument("run_experiment: trials must be positive");
    if (cfg.width == 0) throw std::invalid_argument("run_experiment: width must be positive");
    if (cfg.depth == 0) throw std::invalid_argument("run_experiment: depth must be positive");

    const std::string exp_name = to_string(cfg.experiment);
    const std::string sweep_name = to_string(cfg.sweep);
    const frequency_oracle base_oracle(base);
    std::vector<std::uint64_t> base_freqs;
    base_freqs.reserve(base_oracle.elements());
    for (const auto& e : base_oracle.entries()) base_freqs.push_back(e.frequency);

    std::vector<experiment_record> rows;
    for (std::size_t vi = 0; vi < cfg.values.size(); ++vi) {
        const std::uint64_t value = cfg.values[vi];
        const double sweep_value = static_cast<double>(value);

        auto infeasible_row = [&](const std::string& sketch) {
            experiment_record r;
            r.experiment = exp_name;
            r.sketch = sketch;
            r.sweep_var = sweep_name;
            r.sweep_value = sweep_value;
            r.trial = "-";
            r.group = "-";
            const double nan = std::nan("");
            r.mean_alpha = r.unfairness = r.total_additive_error = nan;
            r.pof = r.build_ms = r.query_ns = nan;
            r.status = "infeasible";
            return r;
        };

        std::uint64_t w = cfg.width;
        std::size_t d = cfg.depth;
        stream_dataset relabeled;
        const stream_dataset* data = &base;
        bool point_valid = true;
        switch (cfg.sweep) {
            case sweep_kind::n_low:
                if (cfg.regen) {
                    if (value == 0 || value >= cfg.regen->n_total) {
                        point_valid = false;
                        break;
                    }
                    relabeled = make_two_population_dataset(
                        cfg.regen->low, value, cfg.regen->high, cfg.regen->n_total - value,
                        mix_seed(cfg.regen->seed, 0x2707, value));
                    data = &relabeled;
                    break;
                }
                if (value > base_freqs.size()) {
                    point_valid = false;
                    break;
                }
                relabeled = detail::relabel_dataset(
                    base_oracle, group_lowest_n(base_freqs, value), {"low", "high"});
                data = &relabeled;
                break;
            case sweep_kind::width:
                if (value == 0) point_valid = false;
                w = value;
                break;
            case sweep_kind::depth:
                if (value == 0) point_valid = false;
                d = value;
                break;
            case sweep_kind::groups: {
                if (value == 0) {
                    point_valid = false;
                    break;
                }
                std::vector<std::string> names;
                names.reserve(value);
                for (std::uint64_t g = 0; g < value; ++g) names.push_back("g" + std::to_string(g));
                relabeled = detail::relabel_dataset(
                    base_oracle, group_equi_width(base_freqs, value), names);
                data = &relabeled;
                break;
            }
        }
        if (!point_valid) {
            rows.push_back(infeasible_row("cm"));
            rows.push_back(infeasible_row("fcm"));
            if (cfg.with_rp) rows.push_back(infeasible_row("rp"));
            continue;
        }

        const frequency_oracle oracle(*data);
        const auto sizes = oracle.group_element_counts();

        bool fcm_ok = true;
        std::vector<std::uint64_t> widths;
        if (sizes.size() == 1) {
            widths = {w};
        } else {
            try {
                widths = solve_multi(sizes, w, d).widths;
            } catch (const infeasible_error&) {
                fcm_ok = false;
            }
        }

        bool rp_ok = cfg.with_rp;
        std::size_t rp_rows_low = 0;
        if (cfg.with_rp) {
            if (sizes.size() != 2) {
                rp_ok = false;
            } else {
                try {
                    rp_rows_low = solve_row_partition(sizes[0], sizes[1], w, d).rows_low;
                } catch (const infeasible_error&) {
                    rp_ok = false;
                }
            }
        }

        if (!fcm_ok) rows.push_back(infeasible_row("fcm"));
        if (cfg.with_rp && !rp_ok) rows.push_back(infeasible_row("rp"));

        detail::summary_accum acc_cm, acc_fcm, acc_rp;
        auto emit_trial_rows = [&](const std::string& sketch, const std::string& trial,
                                   const detail::trial_measurement& m, double pof_value) {
            for (const auto& rep : m.reports) {
                experiment_record r;
                r.experiment = exp_name;
                r.sketch = sketch;
                r.sweep_var = sweep_name;
                r.sweep_value = sweep_value;
                r.trial = trial;
                r.group = oracle.group_name(rep.group);
                r.mean_alpha = rep.mean_alpha;
                r.unfairness = m.unfairness;
                r.total_additive_error = static_cast<double>(m.total_error);
                r.pof = pof_value;
                r.build_ms = m.build_ms;
                r.query_ns = m.query_ns;
                rows.push_back(std::move(r));
            }
        };

        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const std::uint64_t seed_t = mix_seed(cfg.seed, vi, t);

            count_min cm({.width = w, .depth = d, .seed = seed_t});
            const auto cm_run = detail::measure_sketch(
                oracle, [&](const frequency_oracle::entry& e) { cm.update(e.key, e.frequency); },
                [&](const frequency_oracle::entry& e) { return cm.estimate(e.key); });
            const auto cm_m = detail::summarize(oracle, cm_run);
            emit_trial_rows("cm", std::to_string(t), cm_m, 0.0);
            acc_cm.add(cm_m, 0.0);

            if (fcm_ok) {
                fair_count_min fc({.width = w, .depth = d, .seed = seed_t},
                                  column_layout(widths));
                const auto fc_run = detail::measure_sketch(
                    oracle,
                    [&](const frequency_oracle::entry& e) { fc.update(e.key, e.group, e.frequency); },
                    [&](const frequency_oracle::entry& e) { return fc.estimate(e.key, e.group); });
                const auto fc_m = detail::summarize(oracle, fc_run);
                const double fc_pof = static_cast<double>(static_cast<std::int64_t>(fc_m.total_error) -
                                                          static_cast<std::int64_t>(cm_m.total_error));
                emit_trial_rows("fcm", std::to_string(t), fc_m, fc_pof);
                acc_fcm.add(fc_m, fc_pof);
            }

            if (rp_ok) {
                row_partition_sketch rp({.width = w, .depth = d, .seed = seed_t},
                                        {rp_rows_low, d - rp_rows_low});
                const auto rp_run = detail::measure_sketch(
                    oracle,
                    [&](const frequency_oracle::entry& e) { rp.update(e.key, e.group, e.frequency); },
                    [&](const frequency_oracle::entry& e) { return rp.estimate(e.key, e.group); });
                const auto rp_m = detail::summarize(oracle, rp_run);
                const double rp_pof = static_cast<double>(static_cast<std::int64_t>(rp_m.total_error) -
                                                          static_cast<std::int64_t>(cm_m.total_error));
                emit_trial_rows("rp", std::to_string(t), rp_m, rp_pof);
                acc_rp.add(rp_m, rp_pof);
            }
        }

        auto emit_mean_rows = [&](const std::string& sketch, const detail::summary_accum& acc) {
            if (acc.trials == 0) return;
            const double nt = static_cast<double>(acc.trials);
            for (std::size_t g = 0; g < acc.mean_alpha_sums.size(); ++g) {
                experiment_record r;
                r.experiment = exp_name;
                r.sketch = sketch;
                r.sweep_var = sweep_name;
                r.sweep_value = sweep_value;
                r.trial = "mean";
                r.group = oracle.group_name(g);
                r.mean_alpha = acc.mean_alpha_sums[g] / nt;
                r.unfairness = acc.unfairness_sum / nt;
                r.total_additive_error = acc.total_error_sum / nt;
                r.pof = acc.pof_sum / nt;
                r.build_ms = acc.build_ms_sum / nt;
                r.query_ns = acc.query_ns_sum / nt;
                rows.push_back(std::move(r));
            }
        };
        emit_mean_rows("cm", acc_cm);
        emit_mean_rows("fcm", acc_fcm);
        emit_mean_rows("rp", acc_rp);
    }
    return rows;
}

inline void write_results_csv(std::ostream& out, const std::vector<experiment_record>& rows) {
    out << results_csv_header() << "\n";
    for (const auto& r : rows) {
        detail::write_csv_field(out, r.experiment);
        out << ',';
        detail::write_csv_field(out, r.sketch);
        out << ',';
        detail::write_csv_field(out, r.sweep_var);
        out << ',' << detail::format_cell(r.sweep_value) << ',';
        detail::write_csv_field(out, r.trial);
        out << ',';
        detail::write_csv_field(out, r.group);
        out << ',' << detail::format_cell(r.mean_alpha) << ',' << detail::format_cell(r.unfairness)
            << ',' << detail::format_cell(r.total_additive_error) << ',' << detail::format_cell(r.pof)
            << ',' << detail::format_cell(r.build_ms) << ',' << detail::format_cell(r.query_ns)
            << ',';
        detail::write_csv_field(out, r.status);
        out << "\n";
    }
}

inline void write_results_csv(const std::string& path, const std::vector<experiment_record>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_results_csv(out, rows);
}

}  // namespace fcm

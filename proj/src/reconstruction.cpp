#include "lorasim/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "lorasim/csv.hpp"
#include "lorasim/error.hpp"
#include "lorasim/parallel.hpp"
#include "lorasim/rng.hpp"

namespace lorasim {

SampleSet apply_loss(const SampleSet& samples, const LossModel& loss) {
    if (!(loss.outage_probability >= 0.0 && loss.outage_probability <= 1.0)) {
        throw DomainError("outage probability must be in [0, 1]");
    }
    SampleSet out = samples;
    out.samples.clear();
    Engine rng = make_engine(loss.seed);
    std::bernoulli_distribution lost(loss.outage_probability);
    for (const auto& s : samples.samples) {
        if (!lost(rng)) out.samples.push_back(s);
    }
    return out;
}

bool reconstruct_window(std::span<const Sample> received, std::size_t offset, std::span<double> out) {
    const std::size_t end = offset + out.size();
    auto first = std::lower_bound(received.begin(), received.end(), offset,
                                  [](const Sample& s, std::size_t slot) { return s.slot_index < slot; });
    auto last = std::lower_bound(first, received.end(), end,
                                 [](const Sample& s, std::size_t slot) { return s.slot_index < slot; });
    if (first == last) {
        std::fill(out.begin(), out.end(), 0.0);
        return false;
    }
    const std::span<const Sample> window(first, last);

    std::size_t slot = offset;
    for (; slot < window.front().slot_index; ++slot) out[slot - offset] = window.front().power;
    for (std::size_t k = 0; k + 1 < window.size(); ++k) {
        const auto& a = window[k];
        const auto& b = window[k + 1];
        const double span = static_cast<double>(b.slot_index - a.slot_index);
        for (; slot < b.slot_index; ++slot) {
            const double w = static_cast<double>(slot - a.slot_index) / span;
            out[slot - offset] = a.power + w * (b.power - a.power);
        }
    }
    for (; slot < end; ++slot) out[slot - offset] = window.back().power;
    return true;
}

namespace {

PowerSeries empty_like(const PowerSeries& grid) {
    PowerSeries s;
    s.household_id = grid.household_id;
    s.start = grid.start;
    s.slot = grid.slot;
    s.values.assign(grid.size(), 0.0);
    return s;
}

}  // namespace

Reconstruction reconstruct(const SampleSet& received, const PowerSeries& grid) {
    Reconstruction r{empty_like(grid), false};
    r.empty = !reconstruct_window(received.samples, 0, r.series.values);
    return r;
}

Reconstruction reconstruct_daily(const SampleSet& received, const PowerSeries& grid) {
    Reconstruction r{empty_like(grid), true};
    const std::size_t per_day = grid.slots_per_day();
    std::span<double> values(r.series.values);
    for (std::size_t start = 0; start < values.size(); start += per_day) {
        const std::size_t len = std::min(per_day, values.size() - start);
        if (reconstruct_window(received.samples, start, values.subspan(start, len))) r.empty = false;
    }
    return r;
}

double cv_rmse(const PowerSeries& original, const PowerSeries& reconstructed) {
    if (original.size() != reconstructed.size() || original.slot != reconstructed.slot ||
        original.start != reconstructed.start) {
        throw DomainError("cv_rmse: series are on different grids");
    }
    if (original.values.empty()) throw DomainError("cv_rmse: empty series");
    double sq = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double d = original.values[i] - reconstructed.values[i];
        sq += d * d;
        sum += original.values[i];
    }
    const double n = static_cast<double>(original.size());
    const double mean = sum / n;
    if (!(mean > 0.0)) {
        throw DomainError("cv_rmse: household '" + original.household_id + "' has zero mean power");
    }
    return std::sqrt(sq / n) / mean;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw DomainError("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return values[lo] + w * (values[hi] - values[lo]);
}

Summary summarize(const std::vector<double>& values) {
    if (values.empty()) return {};
    Summary s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.p10 = percentile(values, 0.10);
    s.p25 = percentile(values, 0.25);
    s.p50 = percentile(values, 0.50);
    s.p75 = percentile(values, 0.75);
    s.p90 = percentile(values, 0.90);
    return s;
}

double EvaluationResult::mean() const noexcept {
    if (cv_rmse_samples.empty()) return 0.0;
    return std::accumulate(cv_rmse_samples.begin(), cv_rmse_samples.end(), 0.0) /
           static_cast<double>(cv_rmse_samples.size());
}

std::vector<EvaluationResult> evaluate(const PowerSeries& series, const SampleSet& samples,
                                       const std::vector<double>& outage_grid, std::size_t runs,
                                       std::uint64_t seed, unsigned workers) {
    if (runs == 0) throw ConfigError("evaluation needs at least one run");
    for (const double p : outage_grid) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("outage grid values must be in [0, 1]");
    }
    const std::uint64_t household_key = fnv1a(series.household_id);

    std::vector<EvaluationResult> results(outage_grid.size());
    for (std::size_t level = 0; level < outage_grid.size(); ++level) {
        auto& res = results[level];
        res.household_id = series.household_id;
        res.strategy = samples.strategy;
        res.outage_probability = outage_grid[level];
        res.runs = runs;
        res.cv_rmse_samples.assign(runs, 0.0);
    }
    parallel_for(outage_grid.size() * runs, workers, [&](std::size_t job) {
        const std::size_t level = job / runs;
        const std::size_t run = job % runs;
        const LossModel loss{outage_grid[level], derive_seed(seed, household_key, level, run)};
        const Reconstruction rec = reconstruct_daily(apply_loss(samples, loss), series);
        results[level].cv_rmse_samples[run] = cv_rmse(series, rec.series);
    });
    for (auto& res : results) res.summary = summarize(res.cv_rmse_samples);
    return results;
}

CorpusReport corpus_report(const std::vector<EvaluationResult>& results) {
    // outage -> strategy -> household -> mean CV(RMSE)
    std::map<double, std::map<Strategy, std::map<std::string, double>>> table;
    for (const auto& r : results) table[r.outage_probability][r.strategy][r.household_id] = r.mean();

    CorpusReport report;
    for (const auto& [outage, by_strategy] : table) {
        for (const Strategy s : {Strategy::time, Strategy::event}) {
            const auto it = by_strategy.find(s);
            if (it == by_strategy.end()) continue;
            std::vector<double> values;
            for (const auto& [id, v] : it->second) values.push_back(v);
            report.bands.push_back({outage, std::string(to_string(s)), summarize(values)});
        }
        const auto t = by_strategy.find(Strategy::time);
        const auto e = by_strategy.find(Strategy::event);
        if (t == by_strategy.end() || e == by_strategy.end()) continue;
        std::vector<double> diffs;
        std::size_t event_better = 0;
        for (const auto& [id, tv] : t->second) {
            const auto match = e->second.find(id);
            if (match == e->second.end()) continue;
            const double d = tv - match->second;
            diffs.push_back(d);
            event_better += d > 0.0 ? 1 : 0;
        }
        if (diffs.empty()) continue;
        report.bands.push_back({outage, "time_minus_event", summarize(diffs)});
        report.differences.push_back(
            {outage, diffs.size(), static_cast<double>(event_better) / static_cast<double>(diffs.size())});
    }
    return report;
}

void write_evaluation_csv_header(std::ostream& out) { out << "household_id,strategy,outage,run,cv_rmse\n"; }

void write_evaluation_csv_rows(std::ostream& out, const EvaluationResult& result) {
    for (std::size_t run = 0; run < result.cv_rmse_samples.size(); ++run) {
        out << result.household_id << ',' << to_string(result.strategy) << ','
            << csv::format_double(result.outage_probability) << ',' << run << ','
            << csv::format_double(result.cv_rmse_samples[run]) << '\n';
    }
}

void write_report_csv(std::ostream& out, const CorpusReport& report) {
    out << "outage,strategy,p10,p25,p50,p75,p90,min,max\n";
    for (const auto& row : report.bands) {
        const auto& b = row.bands;
        out << csv::format_double(row.outage) << ',' << row.strategy;
        for (const double v : {b.p10, b.p25, b.p50, b.p75, b.p90, b.min, b.max}) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

void write_difference_csv(std::ostream& out, const CorpusReport& report) {
    out << "outage,households,fraction_event_better\n";
    for (const auto& row : report.differences) {
        out << csv::format_double(row.outage) << ',' << row.households << ','
            << csv::format_double(row.fraction_event_better) << '\n';
    }
}

std::vector<EvaluationResult> read_evaluation_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw LoadError("evaluation CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "household_id,strategy,outage,run,cv_rmse") {
        throw LoadError("evaluation CSV: unexpected header '" + line + "'");
    }
    std::map<std::tuple<std::string, Strategy, double>, std::map<long long, double>> grouped;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto f = csv::split(line);
        const auto outage = f.size() == 5 ? csv::parse_double(f[2]) : std::nullopt;
        const auto run = f.size() == 5 ? csv::parse_int(f[3]) : std::nullopt;
        const auto value = f.size() == 5 ? csv::parse_double(f[4]) : std::nullopt;
        if (!outage || !run || !value || (f[1] != "time" && f[1] != "event")) {
            throw LoadError("evaluation CSV: malformed row " + std::to_string(row));
        }
        grouped[{std::string(f[0]), parse_strategy(f[1]), *outage}][*run] = *value;
    }
    std::vector<EvaluationResult> results;
    for (auto& [key, runs] : grouped) {
        EvaluationResult r;
        std::tie(r.household_id, r.strategy, r.outage_probability) = key;
        for (const auto& [run, v] : runs) r.cv_rmse_samples.push_back(v);
        r.runs = r.cv_rmse_samples.size();
        r.summary = summarize(r.cv_rmse_samples);
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace lorasim

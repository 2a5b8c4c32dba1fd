#pragma once

// Sample loss, linear-interpolation reconstruction and CV(RMSE) scoring.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lorasim/power_series.hpp"
#include "lorasim/sampling.hpp"

namespace lorasim {

struct LossModel {
    double outage_probability = 0.0;
    std::uint64_t seed = 0;
};

/// Drops each sample independently with the outage probability; keeps order.
SampleSet apply_loss(const SampleSet& samples, const LossModel& loss);

struct Reconstruction {
    PowerSeries series;
    bool empty = false;  ///< nothing was received; series is all zero
};

/// Linear interpolation between received samples on the grid of `grid`
/// (its values are ignored), holding the first/last received value at the edges.
Reconstruction reconstruct(const SampleSet& received, const PowerSeries& grid);

/// Same interpolation restricted to `out.size()` slots starting at slot
/// `offset`; only samples inside that window are used.
/// Returns false (and zero-fills) when the window holds no samples.
bool reconstruct_window(std::span<const Sample> received, std::size_t offset, std::span<double> out);

/// Each day is rebuilt from that day's samples only.
Reconstruction reconstruct_daily(const SampleSet& received, const PowerSeries& grid);

/// RMSE over all slots divided by the mean original power.
/// Throws DomainError for mismatched grids or an all-zero original.
double cv_rmse(const PowerSeries& original, const PowerSeries& reconstructed);

/// Linear-interpolated quantile (q in [0, 1]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

struct Summary {
    double min = 0.0;
    double p10 = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p90 = 0.0;
    double max = 0.0;
};

Summary summarize(const std::vector<double>& values);

struct EvaluationResult {
    std::string household_id;
    Strategy strategy = Strategy::time;
    double outage_probability = 0.0;
    std::size_t runs = 0;
    std::vector<double> cv_rmse_samples;  ///< one per run
    Summary summary;

    double mean() const noexcept;
};

/// For each outage level, `runs` independent loss/daily-reconstruct/score
/// cycles over the whole series. Streams are keyed by (seed, household,
/// level index, run), so any worker count gives the same output.
std::vector<EvaluationResult> evaluate(const PowerSeries& series, const SampleSet& samples,
                                       const std::vector<double>& outage_grid, std::size_t runs,
                                       std::uint64_t seed, unsigned workers = 1);

inline const std::vector<double> kDefaultOutageGrid{0.0, 0.1, 0.2, 0.3};

struct BandRow {
    double outage;
    std::string strategy;  ///< "time", "event" or "time_minus_event"
    Summary bands;
};

struct DifferenceRow {
    double outage;
    std::size_t households;
    double fraction_event_better;  ///< share of households with time - event > 0
};

struct CorpusReport {
    std::vector<BandRow> bands;
    std::vector<DifferenceRow> differences;
};

/// Household value = mean CV(RMSE) over runs. The difference table pairs a
/// household's time and event results at the same outage level; positive
/// means event-based sampling reconstructs better.
CorpusReport corpus_report(const std::vector<EvaluationResult>& results);

void write_evaluation_csv_header(std::ostream& out);
void write_evaluation_csv_rows(std::ostream& out, const EvaluationResult& result);
/// `outage,strategy,p10,p25,p50,p75,p90,min,max`
void write_report_csv(std::ostream& out, const CorpusReport& report);
/// `outage,households,fraction_event_better`
void write_difference_csv(std::ostream& out, const CorpusReport& report);

/// Reads back the `household_id,strategy,outage,run,cv_rmse` format.
std::vector<EvaluationResult> read_evaluation_csv(std::istream& in);

}  // namespace lorasim

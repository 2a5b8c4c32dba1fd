#include "lorasim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "lorasim/csv.hpp"
#include "lorasim/dataio.hpp"
#include "lorasim/error.hpp"
#include "lorasim/link_model.hpp"
#include "lorasim/planner.hpp"
#include "lorasim/ppp_oracle.hpp"
#include "lorasim/reconstruction.hpp"
#include "lorasim/sampling.hpp"

namespace lorasim::cli {

namespace {

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> values;
    if (text.empty()) return values;
    for (const auto field : csv::split(text)) {
        const auto v = csv::parse_double(field);
        if (!v) throw ConfigError(std::string("bad number '") + std::string(field) + "' in " + what);
        values.push_back(*v);
    }
    return values;
}

/// Writes to the named file, or stdout when the name is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw Error("cannot write '" + path + "'");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

struct LinkOptions {
    LinkParams params;
    std::string k_variant = "canonical";
    std::string sf_table;
    bool allow_non_monotone = false;

    void add_to(CLI::App& cmd, bool with_r = true) {
        cmd.add_option("--alpha", params.alpha, "Path-loss exponent (> 2)")->capture_default_str();
        cmd.add_option("--beta-sf", params.beta_cosf, "Co-SF SIR threshold")->capture_default_str();
        cmd.add_option("--p0", params.p_active, "Activity thinning probability")->capture_default_str();
        cmd.add_option("--p-sf", params.p_sf, "SF allocation probability")->capture_default_str();
        cmd.add_option("--lambda-sf", params.lambda_sf, "Smart-meter density per km^2")->capture_default_str();
        cmd.add_option("--lambda-i", params.lambda_i, "Non-LoRa interferer density per km^2")->capture_default_str();
        if (with_r) cmd.add_option("--r", params.r, "Link distance, km")->capture_default_str();
        cmd.add_option("--k-variant", k_variant, "canonical|as_printed")->capture_default_str();
        cmd.add_option("--sf-table", sf_table, "CSV file overriding the SF table");
        cmd.add_flag("--allow-non-monotone", allow_non_monotone, "Accept SF tables that are not monotone");
    }

    LinkParams resolved() const {
        LinkParams p = params;
        p.k_variant = parse_k_variant(k_variant);
        try {
            p.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        return p;
    }

    SfTable table() const {
        return sf_table.empty() ? SfTable::lora_default() : SfTable::load(sf_table, allow_non_monotone);
    }
};

struct SamplingOptions {
    int interval_min = 30;
    EventThresholds thresholds;
    bool no_tune = false;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--interval", interval_min, "Time-based sampling interval, minutes")->capture_default_str();
        cmd.add_option("--e-lim", thresholds.e_lim, "Energy threshold, kWh")->capture_default_str();
        cmd.add_option("--p-lim", thresholds.p_lim, "Power-change threshold, kW")->capture_default_str();
        cmd.add_option("--p-step", thresholds.p_step, "Power-threshold increment, kW")->capture_default_str();
        cmd.add_flag("--no-tune", no_tune, "Use the event thresholds as given (skip tuning)");
    }

    Duration interval() const { return std::chrono::minutes(interval_min); }
};

struct SampledHousehold {
    SampleSet time;
    TuneResult event;
};

SampledHousehold sample_household(const PowerSeries& s, const SamplingOptions& opt) {
    SampledHousehold out;
    out.time = time_sample(s, opt.interval());
    if (opt.no_tune) {
        out.event.thresholds = opt.thresholds;
        out.event.samples = event_sample(s, opt.thresholds);
    } else {
        out.event = tune_thresholds(s, opt.thresholds, out.time);
        if (out.event.cap_reached) {
            std::cerr << "warning: " << s.household_id << ": threshold tuning hit the iteration cap ("
                      << out.event.samples.size() << " event samples vs budget " << out.time.size() << ")\n";
        }
    }
    return out;
}

Corpus load_or_usage(const std::string& path) {
    if (path.empty()) throw ConfigError("--corpus is required");
    return load_corpus(path);
}

// ---- subcommands ----------------------------------------------------------

struct LinkCmd {
    LinkOptions link;
    std::string axis = "lambda_sf";
    double from = 0.0;
    double to = 4.0;
    int points = 41;
    std::string grid;
    std::string metric = "outage";
    bool average_only = false;
    std::string out;

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("link", "Outage / effective bit-rate sweep (CSV)");
        link.add_to(*cmd);
        cmd->add_option("--axis", axis, "lambda_sf|lambda_i|r")->capture_default_str();
        cmd->add_option("--from", from, "First grid value")->capture_default_str();
        cmd->add_option("--to", to, "Last grid value")->capture_default_str();
        cmd->add_option("--points", points, "Number of evenly spaced grid values")->capture_default_str();
        cmd->add_option("--grid", grid, "Explicit comma-separated grid (overrides --from/--to/--points)");
        cmd->add_option("--metric", metric, "outage|bitrate")->capture_default_str();
        cmd->add_flag("--average-only", average_only, "Omit the per-SF columns");
        cmd->add_option("-o,--out", out, "Output file (default stdout)");
        cmd->callback([this] { run(); });
    }

    void run() {
        const SweepAxis ax = parse_sweep_axis(axis);
        if (metric != "outage" && metric != "bitrate") throw ConfigError("--metric must be outage or bitrate");
        std::vector<double> values;
        if (!grid.empty()) {
            values = parse_list(grid, "--grid");
        } else {
            if (points < 1) throw ConfigError("--points must be at least 1");
            for (int i = 0; i < points; ++i) {
                values.push_back(points == 1 ? from : from + (to - from) * i / (points - 1));
            }
        }
        const LinkParams base = link.resolved();
        std::vector<SweepRow> rows;
        try {
            rows = sweep(base, ax, values, link.table());
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        Output o(out);
        write_sweep_csv(o.stream(), rows, metric == "outage" ? SweepMetric::outage : SweepMetric::bitrate,
                        !average_only);
    }
};

struct ValidateCmd {
    LinkOptions link;
    std::string lambda_sf = "0.5,1,2,4";
    std::string lambda_i = "0.01,0.05,0.1,0.2";
    std::string r = "0.5,1.5,3";
    std::string sfs = "7,12";
    long long trials = 100000;
    std::uint64_t seed = 1;
    double radius_factor = 10.0;
    std::string fading = "independent_per_condition";
    unsigned parallel = 1;
    std::string out;

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("validate", "Monte Carlo check of the closed-form outage (CSV)");
        link.add_to(*cmd, false);
        cmd->add_option("--lambda-sf-grid", lambda_sf, "Comma-separated lambda_sf values")->capture_default_str();
        cmd->add_option("--lambda-i-grid", lambda_i, "Comma-separated lambda_i values")->capture_default_str();
        cmd->add_option("--r-grid", r, "Comma-separated link distances, km")->capture_default_str();
        cmd->add_option("--sfs", sfs, "Spreading factors to check")->capture_default_str();
        cmd->add_option("--trials", trials, "Trials per grid point")->capture_default_str();
        cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        cmd->add_option("--radius-factor", radius_factor, "Simulation disk radius / r (>= 10)")->capture_default_str();
        cmd->add_option("--fading-mode", fading, "independent_per_condition|shared_gain")->capture_default_str();
        cmd->add_option("--parallel", parallel, "Worker threads")->capture_default_str();
        cmd->add_option("-o,--out", out, "Output file (default stdout)");
        cmd->callback([this] { run(); });
    }

    void run() {
        if (trials < 1) throw ConfigError("--trials must be at least 1");
        if (radius_factor < 10.0) throw ConfigError("--radius-factor must be at least 10");
        std::vector<GridPoint> grid;
        for (const double a : parse_list(lambda_sf, "--lambda-sf-grid")) {
            for (const double b : parse_list(lambda_i, "--lambda-i-grid")) {
                for (const double c : parse_list(r, "--r-grid")) grid.push_back({a, b, c});
            }
        }
        ValidationSettings settings;
        settings.base = link.resolved();
        settings.sfs.clear();
        for (const double sf : parse_list(sfs, "--sfs")) {
            try {
                settings.sfs.push_back(SpreadingFactor(static_cast<int>(sf)).index());
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        }
        settings.trials = static_cast<std::uint64_t>(trials);
        settings.seed = seed;
        settings.radius_factor = radius_factor;
        settings.fading_mode = parse_fading_mode(fading);
        for (const auto& p : grid) {
            LinkParams check = settings.base;
            check.lambda_sf = p.lambda_sf;
            check.lambda_i = p.lambda_i;
            check.r = p.r;
            try {
                check.validate();
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        }
        const auto rows = validate_grid(grid, settings, link.table(), parallel);
        Output o(out);
        write_validation_csv(o.stream(), rows);
    }
};

struct SampleCmd {
    std::string corpus;
    std::string strategy = "event";
    SamplingOptions sampling;
    std::string out;
    std::string log;

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("sample", "Sample a household corpus (CSV)");
        cmd->add_option("--corpus", corpus, "Corpus directory or CSV file");
        cmd->add_option("--strategy", strategy, "time|event")->capture_default_str();
        sampling.add_to(*cmd);
        cmd->add_option("-o,--out", out, "Sample CSV (default stdout)");
        cmd->add_option("--log", log, "Per-household tuning log CSV");
        cmd->callback([this] { run(); });
    }

    void run() {
        const Strategy s = parse_strategy(strategy);
        sampling.thresholds.validate();
        const Corpus c = load_or_usage(corpus);
        Output o(out);
        std::unique_ptr<Output> log_out;
        if (!log.empty()) {
            log_out = std::make_unique<Output>(log);
            log_out->stream() << "household_id,time_samples,event_samples,e_lim,p_lim,iterations,cap_reached\n";
        }
        write_samples_csv_header(o.stream());
        for (const auto& series : c.series) {
            if (s == Strategy::time) {
                write_samples_csv_rows(o.stream(), series, time_sample(series, sampling.interval()));
                continue;
            }
            const auto sampled = sample_household(series, sampling);
            write_samples_csv_rows(o.stream(), series, sampled.event.samples);
            if (log_out) {
                const auto& t = sampled.event;
                log_out->stream() << series.household_id << ',' << sampled.time.size() << ',' << t.samples.size()
                                  << ',' << csv::format_double(t.thresholds.e_lim) << ','
                                  << csv::format_double(t.thresholds.p_lim) << ',' << t.iterations << ','
                                  << (t.cap_reached ? "true" : "false") << '\n';
            }
        }
    }
};

struct EvaluateCmd {
    std::string corpus;
    std::string strategies = "time,event";
    std::string outages = "0,0.1,0.2,0.3";
    long long runs = 100;
    std::uint64_t seed = 1;
    SamplingOptions sampling;
    unsigned parallel = 1;
    std::string out;
    std::string report;
    std::string differences;

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("evaluate", "Loss / reconstruction / CV(RMSE) evaluation");
        cmd->add_option("--corpus", corpus, "Corpus directory or CSV file");
        cmd->add_option("--strategies", strategies, "Comma-separated subset of time,event")->capture_default_str();
        cmd->add_option("--outages", outages, "Comma-separated outage probabilities")->capture_default_str();
        cmd->add_option("--runs", runs, "Loss realizations per household and outage")->capture_default_str();
        cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        sampling.add_to(*cmd);
        cmd->add_option("--parallel", parallel, "Worker threads")->capture_default_str();
        cmd->add_option("-o,--out", out, "Per-run results CSV (default stdout)");
        cmd->add_option("--report", report, "Percentile band report CSV");
        cmd->add_option("--differences", differences, "Event-vs-time difference summary CSV");
        cmd->callback([this] { run(); });
    }

    void run() {
        if (runs < 1) throw ConfigError("--runs must be at least 1");
        std::vector<Strategy> which;
        for (const auto field : csv::split(strategies)) which.push_back(parse_strategy(field));
        const auto grid = parse_list(outages, "--outages");
        for (const double p : grid) {
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("--outages values must be in [0, 1]");
        }
        sampling.thresholds.validate();
        const Corpus c = load_or_usage(corpus);

        std::vector<EvaluationResult> all;
        for (const auto& series : c.series) {
            const auto sampled = sample_household(series, sampling);
            for (const Strategy s : which) {
                const SampleSet& set = s == Strategy::time ? sampled.time : sampled.event.samples;
                auto res = evaluate(series, set, grid, static_cast<std::size_t>(runs), seed, parallel);
                all.insert(all.end(), std::make_move_iterator(res.begin()), std::make_move_iterator(res.end()));
            }
        }
        Output o(out);
        write_evaluation_csv_header(o.stream());
        for (const auto& r : all) write_evaluation_csv_rows(o.stream(), r);

        const CorpusReport rep = corpus_report(all);
        if (!report.empty()) {
            Output ro(report);
            write_report_csv(ro.stream(), rep);
        }
        if (!differences.empty()) {
            Output d(differences);
            write_difference_csv(d.stream(), rep);
        }
    }
};

struct PlanCmd {
    LinkOptions link;
    double target_outage = -1.0;
    double max_cv = -1.0;
    double quantile = 0.9;
    std::string strategy = "event";
    std::string evaluation;
    std::string out;
    CLI::Option* target_opt = nullptr;
    CLI::Option* cv_opt = nullptr;

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("plan", "Maximum gateway range for an outage or quality target (JSON)");
        link.add_to(*cmd, false);
        target_opt = cmd->add_option("--target-outage", target_outage, "Maximum average outage, in (0, 1)");
        cv_opt = cmd->add_option("--max-cv-rmse", max_cv, "CV(RMSE) bound for the household quantile");
        cmd->add_option("--quantile", quantile, "Household coverage quantile")->capture_default_str();
        cmd->add_option("--strategy", strategy, "time|event")->capture_default_str();
        cmd->add_option("--evaluation", evaluation, "Evaluation results CSV (from `evaluate`)");
        cmd->add_option("-o,--out", out, "Output file (default stdout)");
        target_opt->excludes(cv_opt);
        cmd->callback([this] { run(); });
    }

    void run() {
        PlanRequest req;
        req.params = link.resolved();
        std::vector<EvaluationResult> corpus;
        if (target_opt->count() > 0) {
            if (!(target_outage > 0.0 && target_outage < 1.0)) throw ConfigError("--target-outage must be in (0, 1)");
            req.target = OutageTarget{target_outage};
        } else if (cv_opt->count() > 0) {
            if (evaluation.empty()) throw ConfigError("--max-cv-rmse needs --evaluation");
            std::ifstream in(evaluation);
            if (!in) throw ConfigError("cannot open evaluation file '" + evaluation + "'");
            corpus = read_evaluation_csv(in);
            req.target = QualityTarget{max_cv, quantile, parse_strategy(strategy)};
        } else {
            throw ConfigError("give --target-outage or --max-cv-rmse");
        }
        const PlanResult result = plan(req, link.table(), corpus);
        Output o(out);
        write_plan_json(o.stream(), result);
    }
};

struct GenSyntheticCmd {
    SyntheticLoadConfig cfg;
    long long households = 50;
    long long days = 7;
    unsigned parallel = 1;
    std::string out = "corpus";

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("gen-synthetic", "Write a synthetic household corpus");
        cmd->add_option("--households", households, "Number of households")->capture_default_str();
        cmd->add_option("--days", days, "Days per household")->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "Seed")->capture_default_str();
        cmd->add_option("--base-load", cfg.base_load, "kW")->capture_default_str();
        cmd->add_option("--events-per-day", cfg.events_per_day, "Appliance events per day")->capture_default_str();
        cmd->add_option("--magnitude-min", cfg.magnitude_min, "kW")->capture_default_str();
        cmd->add_option("--magnitude-max", cfg.magnitude_max, "kW")->capture_default_str();
        cmd->add_option("--duration-min", cfg.duration_min, "Slots")->capture_default_str();
        cmd->add_option("--duration-max", cfg.duration_max, "Slots")->capture_default_str();
        cmd->add_option("--diurnal-amplitude", cfg.diurnal_amplitude, "Relative, 0..1")->capture_default_str();
        cmd->add_option("--parallel", parallel, "Worker threads")->capture_default_str();
        cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
        cmd->callback([this] { run(); });
    }

    void run() {
        if (households < 1 || days < 1) throw ConfigError("--households and --days must be at least 1");
        const auto corpus = generate_synthetic(cfg, static_cast<std::size_t>(households),
                                               static_cast<std::size_t>(days), parallel);
        write_corpus(out, corpus.series);
    }
};

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"LoRa smart-meter outage, sampling and gateway-range toolkit", "lorasim"};
    app.require_subcommand(1);
    const char* env_config = std::getenv(kConfigEnv);
    app.set_config("--config", env_config ? env_config : "", "key=value config file (flags win)");

    LinkCmd link;
    ValidateCmd validate;
    SampleCmd sample;
    EvaluateCmd evaluate_cmd;
    PlanCmd plan_cmd;
    GenSyntheticCmd gen;
    link.add_to(app);
    validate.add_to(app);
    sample.add_to(app);
    evaluate_cmd.add_to(app);
    plan_cmd.add_to(app);
    gen.add_to(app);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        // help requests exit 0; everything else is a usage error
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace lorasim::cli

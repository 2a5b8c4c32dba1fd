#include "lorasim/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "lorasim/csv.hpp"
#include "lorasim/error.hpp"
#include "lorasim/parallel.hpp"
#include "lorasim/rng.hpp"

namespace lorasim {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kHeader = "timestamp,household_id,power_kw";

struct Row {
    Timestamp time;
    double power;
    std::size_t line;
};

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw LoadError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<PowerSeries> read_series_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) fail(source, 1, "missing header");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) fail(source, 1, "expected header '" + std::string(kHeader) + "'");

    std::map<std::string, std::vector<Row>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = csv::split(line);
        if (f.size() != 3) fail(source, lineno, "expected 3 fields, got " + std::to_string(f.size()));
        const auto t = parse_timestamp(f[0]);
        if (!t) fail(source, lineno, "bad timestamp '" + std::string(f[0]) + "'");
        if (t->time_since_epoch() % kDefaultSlot != Duration::zero()) {
            fail(source, lineno, "timestamp not on a 10-minute boundary: " + std::string(f[0]));
        }
        if (f[1].empty()) fail(source, lineno, "empty household_id");
        const auto p = csv::parse_double(f[2]);
        if (!p || !std::isfinite(*p)) fail(source, lineno, "bad power value '" + std::string(f[2]) + "'");
        if (*p < 0.0) fail(source, lineno, "negative power " + std::string(f[2]));
        rows[std::string(f[1])].push_back({*t, *p, lineno});
    }

    std::vector<PowerSeries> out;
    for (auto& [id, recs] : rows) {
        std::stable_sort(recs.begin(), recs.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
        PowerSeries s;
        s.household_id = id;
        s.start = recs.front().time;
        s.slot = kDefaultSlot;
        if (s.start.time_since_epoch() % kDay != Duration::zero()) {
            fail(source, recs.front().line, "household '" + id + "' does not start at midnight UTC");
        }
        s.values.reserve(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const Timestamp expected = s.time_at(i);
            if (recs[i].time < expected) {
                fail(source, recs[i].line, "duplicate timestamp " + format_timestamp(recs[i].time) + " for '" + id + "'");
            }
            if (recs[i].time > expected) {
                fail(source, recs[i].line, "missing slot " + format_timestamp(expected) + " for '" + id + "'");
            }
            s.values.push_back(recs[i].power);
        }
        if (s.values.size() % s.slots_per_day() != 0) {
            fail(source, recs.back().line,
                 "household '" + id + "' ends mid-day (" + std::to_string(s.values.size()) + " slots)");
        }
        out.push_back(std::move(s));
    }
    return out;
}

Corpus load_corpus(const fs::path& path) {
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    } else if (fs::is_regular_file(path)) {
        files.push_back(path);
    } else {
        throw LoadError("corpus path '" + path.string() + "' does not exist");
    }

    Corpus corpus;
    std::set<std::string> seen;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw LoadError("cannot open '" + file.string() + "'");
        const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        corpus.manifest.checksums.emplace_back(file, fnv1a(bytes));
        std::istringstream text(bytes);
        for (auto& s : read_series_csv(text, file.string())) {
            if (!seen.insert(s.household_id).second) {
                throw LoadError(file.string() + ": household '" + s.household_id + "' appears in more than one file");
            }
            corpus.manifest.households.push_back({s.household_id, file, s.days()});
            corpus.series.push_back(std::move(s));
        }
    }
    return corpus;
}

void write_series_csv(std::ostream& out, const std::vector<PowerSeries>& series) {
    out << kHeader << '\n';
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << format_timestamp(s.time_at(i)) << ',' << s.household_id << ','
                << csv::format_double(s.values[i]) << '\n';
        }
    }
}

void write_corpus(const fs::path& dir, const std::vector<PowerSeries>& series) {
    fs::create_directories(dir);
    for (const auto& s : series) {
        std::ofstream out(dir / (s.household_id + ".csv"), std::ios::binary);
        if (!out) throw Error("cannot write '" + (dir / (s.household_id + ".csv")).string() + "'");
        write_series_csv(out, {s});
    }
}

void SyntheticLoadConfig::validate() const {
    const bool ok = base_load >= 0.0 && std::isfinite(base_load) && events_per_day >= 0.0 &&
                    std::isfinite(events_per_day) && magnitude_min >= 0.0 && magnitude_max >= magnitude_min &&
                    std::isfinite(magnitude_max) && duration_min >= 1 && duration_max >= duration_min &&
                    diurnal_amplitude >= 0.0 && diurnal_amplitude <= 1.0 && slot > Duration::zero() &&
                    kDay % slot == Duration::zero();
    if (!ok) throw ConfigError("invalid synthetic load configuration");
}

SyntheticCorpus generate_synthetic(const SyntheticLoadConfig& cfg, std::size_t households, std::size_t days,
                                   unsigned workers) {
    cfg.validate();
    if (households == 0 || days == 0) throw ConfigError("synthetic corpus needs at least one household and day");

    SyntheticCorpus corpus;
    corpus.series.resize(households);
    corpus.event_counts.assign(households, 0);
    parallel_for(households, workers, [&](std::size_t h) {
        Engine rng = make_engine(derive_seed(cfg.seed, h));
        PowerSeries& s = corpus.series[h];
        char id[32];
        std::snprintf(id, sizeof id, "h%04zu", h + 1);
        s.household_id = id;
        s.start = cfg.start;
        s.slot = cfg.slot;
        const std::size_t per_day = s.slots_per_day();
        s.values.resize(per_day * days);

        for (std::size_t t = 0; t < s.values.size(); ++t) {
            const double hour = 24.0 * static_cast<double>(t % per_day) / static_cast<double>(per_day);
            const double swing = std::sin(2.0 * std::numbers::pi * (hour - 12.0) / 24.0);
            s.values[t] = cfg.base_load * (1.0 + cfg.diurnal_amplitude * swing);
        }

        std::poisson_distribution<std::size_t> event_count(cfg.events_per_day);
        std::uniform_int_distribution<std::size_t> start_slot(0, per_day - 1);
        std::uniform_real_distribution<double> magnitude(cfg.magnitude_min, cfg.magnitude_max);
        std::uniform_int_distribution<int> duration(cfg.duration_min, cfg.duration_max);
        std::size_t total = 0;
        for (std::size_t d = 0; d < days; ++d) {
            const std::size_t n = cfg.events_per_day > 0.0 ? event_count(rng) : 0;
            total += n;
            for (std::size_t e = 0; e < n; ++e) {
                const std::size_t begin = d * per_day + start_slot(rng);
                const double kw = magnitude(rng);
                const auto len = static_cast<std::size_t>(duration(rng));
                const std::size_t end = std::min(begin + len, s.values.size());
                for (std::size_t t = begin; t < end; ++t) s.values[t] += kw;
            }
        }
        for (double& v : s.values) v = std::max(v, 0.0);
        corpus.event_counts[h] = total;
    });
    return corpus;
}

}  // namespace lorasim

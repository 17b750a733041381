#include "patsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace patsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t phase_index(SessionPhase p) { return static_cast<std::size_t>(p); }

double log_step() { return std::log(ErrorHistogram::kHigh / ErrorHistogram::kLow) / ErrorHistogram::kBins; }

void finalize_fractions(RunMetrics& m) {
    m.connected_fraction =
        m.slots > 0 ? static_cast<double>(m.phase_slots[phase_index(SessionPhase::WellConnected)]) / m.slots : 0.0;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) {
        return kNaN;
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mu) * (x - mu);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double ErrorHistogram::edge(int i) { return kLow * std::exp(log_step() * i); }

void ErrorHistogram::add(double err) {
    if (err < kLow) {
        ++underflow_;
        return;
    }
    if (err >= kHigh) {
        ++overflow_;
        return;
    }
    const int bin = std::clamp(static_cast<int>(std::log(err / kLow) / log_step()), 0, kBins - 1);
    ++counts_[static_cast<std::size_t>(bin)];
}

void ErrorHistogram::merge(const ErrorHistogram& other) {
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
    }
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
}

std::uint64_t ErrorHistogram::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), underflow_ + overflow_);
}

double ErrorHistogram::quantile(double q) const {
    const std::uint64_t n = total();
    if (n == 0) {
        return kNaN;
    }
    const double target = q * static_cast<double>(n);
    double cum = static_cast<double>(underflow_);
    if (target <= cum) {
        return kLow;
    }
    for (int i = 0; i < kBins; ++i) {
        const double c = static_cast<double>(counts_[static_cast<std::size_t>(i)]);
        if (c > 0 && target <= cum + c) {
            const double frac = (target - cum) / c;
            return edge(i) * std::exp(log_step() * frac);
        }
        cum += c;
    }
    return kHigh;
}

double RunMetrics::phase_fraction(SessionPhase p) const {
    return slots > 0 ? static_cast<double>(phase_slots[phase_index(p)]) / slots : 0.0;
}

double RunMetrics::mean_acquisition_time() const { return mean_of(acquisition_times); }

double RunMetrics::error_quantile(double q) const {
    if (pointing_errors.empty()) {
        return kNaN;
    }
    std::vector<double> s = pointing_errors;
    std::sort(s.begin(), s.end());
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

void MetricsAccumulator::add(const SlotRecord& rec) {
    const SessionPhase p = rec.phase;
    const bool entered = !prev_ || *prev_ != p;
    ++m_.slots;
    ++m_.phase_slots[phase_index(p)];

    if (entered && p == SessionPhase::LinkOutage) {
        ++m_.link_outage_count;
    }
    if (entered && p == SessionPhase::FineTrackingOutage) {
        ++m_.fine_tracking_outage_count;
    }
    const bool up = p == SessionPhase::WellConnected || p == SessionPhase::FineTrackingOutage;
    if (!up && !episode_start_) {
        episode_start_ = rec.t;
    }
    if (entered && p == SessionPhase::WellConnected && prev_ == SessionPhase::Olcp && episode_start_) {
        m_.acquisition_times.push_back(rec.t - *episode_start_);
    }
    if (up) {
        episode_start_.reset();
    }
    if (p != SessionPhase::LinkOutage) {
        m_.pointing_errors.push_back(rec.err_down_comm);
        m_.pointing_error_histogram.add(rec.err_down_comm);
    }
    prev_ = p;
}

RunMetrics MetricsAccumulator::finish() const {
    RunMetrics out = m_;
    finalize_fractions(out);
    return out;
}

RunMetrics compute_metrics(std::span<const SlotRecord> trace) {
    if (trace.empty()) {
        throw std::invalid_argument("cannot compute metrics of an empty trace");
    }
    RunMetrics m;
    m.slots = static_cast<long>(trace.size());
    for (const auto& r : trace) {
        ++m.phase_slots[phase_index(r.phase)];
        if (r.phase != SessionPhase::LinkOutage) {
            m.pointing_errors.push_back(r.err_down_comm);
            m.pointing_error_histogram.add(r.err_down_comm);
        }
    }
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const auto from = trace[i - 1].phase;
        const auto to = trace[i].phase;
        if (from == to) {
            continue;
        }
        if (to == SessionPhase::LinkOutage) {
            ++m.link_outage_count;
        } else if (to == SessionPhase::FineTrackingOutage) {
            ++m.fine_tracking_outage_count;
        } else if (to == SessionPhase::WellConnected && from == SessionPhase::Olcp) {
            // back to the first slot after the link was last up
            std::size_t j = i - 1;
            while (j > 0 && trace[j - 1].phase != SessionPhase::WellConnected &&
                   trace[j - 1].phase != SessionPhase::FineTrackingOutage) {
                --j;
            }
            m.acquisition_times.push_back(trace[i].t - trace[j].t);
        }
    }
    if (trace.front().phase == SessionPhase::LinkOutage) {
        ++m.link_outage_count;
    }
    if (trace.front().phase == SessionPhase::FineTrackingOutage) {
        ++m.fine_tracking_outage_count;
    }
    finalize_fractions(m);
    return m;
}

MissionResult run_mission(const ScenarioConfig& cfg, SessionHooks hooks, bool keep_trace) {
    validate(cfg);
    Session session(cfg, std::move(hooks));
    MetricsAccumulator acc;
    MissionResult out;
    const long n = cfg.slot_count();
    if (keep_trace) {
        out.trace.reserve(static_cast<std::size_t>(n));
    }
    for (long i = 0; i < n; ++i) {
        const SlotRecord rec = session.step();
        acc.add(rec);
        if (keep_trace) {
            out.trace.push_back(rec);
        }
    }
    out.metrics = acc.finish();
    return out;
}

RunSummary summarize(std::uint64_t seed, const RunMetrics& m) {
    RunSummary s;
    s.seed = seed;
    s.link_outages = m.link_outage_count;
    s.fine_tracking_outages = m.fine_tracking_outage_count;
    s.acquisitions = m.acquisition_times.size();
    s.acq_time_mean_s = m.mean_acquisition_time();
    s.err_p50 = m.error_quantile(0.50);
    s.err_p95 = m.error_quantile(0.95);
    s.connected_fraction = m.connected_fraction;
    return s;
}

int default_thread_count() {
    if (const char* env = std::getenv("PATSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void aggregate(CellSummary& cell) {
    std::vector<double> outages;
    std::vector<double> acq;
    std::vector<double> connected;
    for (const auto& r : cell.runs) {
        outages.push_back(r.link_outages);
        if (!std::isnan(r.acq_time_mean_s)) {
            acq.push_back(r.acq_time_mean_s);
        }
        connected.push_back(r.connected_fraction);
    }
    cell.outages_mean = mean_of(outages);
    cell.outages_std = sample_std(outages);
    cell.acq_time_mean_s = mean_of(acq);
    cell.acq_time_std_s = sample_std(acq);
    cell.err_p50 = cell.pooled_errors.quantile(0.50);
    cell.err_p95 = cell.pooled_errors.quantile(0.95);
    cell.connected_fraction_mean = mean_of(connected);
}

ComparisonSummary run_comparison(const ScenarioConfig& base, std::span<const AlgorithmVariant> variants,
                                 std::span<const double> rhos, int n_runs, int threads) {
    if (variants.empty()) {
        throw ConfigError("variants", "at least one variant is required");
    }
    if (rhos.empty()) {
        throw ConfigError("rhos", "at least one correlation coefficient is required");
    }
    if (n_runs < 1) {
        throw ConfigError("runs", "must be >= 1");
    }
    validate(base);
    for (double rho : rhos) {
        if (!(rho >= 0.0 && rho <= 1.0)) {
            throw ConfigError("rhos", "each value must lie in [0, 1]");
        }
    }

    ComparisonSummary out;
    out.base = base;
    for (int i = 0; i < n_runs; ++i) {
        out.seeds.push_back(base.seed + static_cast<std::uint64_t>(i));
    }
    for (auto v : variants) {
        for (double rho : rhos) {
            CellSummary cell;
            cell.variant = v;
            cell.rho = rho;
            cell.runs.resize(static_cast<std::size_t>(n_runs));
            out.cells.push_back(std::move(cell));
        }
    }

    const std::size_t runs = static_cast<std::size_t>(n_runs);
    const std::size_t total = out.cells.size() * runs;
    std::vector<ErrorHistogram> histograms(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto worker = [&] {
        for (std::size_t task = next++; task < total; task = next++) {
            const std::size_t c = task / runs;
            const std::size_t i = task % runs;
            try {
                ScenarioConfig cfg = base;
                cfg.variant = out.cells[c].variant;
                cfg.rho = out.cells[c].rho;
                cfg.seed = out.seeds[i];
                const auto result = run_mission(cfg, {}, false);
                out.cells[c].runs[i] = summarize(cfg.seed, result.metrics);
                histograms[task] = result.metrics.pointing_error_histogram;
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };

    const int n_threads = std::clamp(threads > 0 ? threads : default_thread_count(), 1, static_cast<int>(total));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        for (std::size_t i = 0; i < runs; ++i) {
            out.cells[c].pooled_errors.merge(histograms[c * runs + i]);
        }
        aggregate(out.cells[c]);
    }
    return out;
}

}  // namespace patsim

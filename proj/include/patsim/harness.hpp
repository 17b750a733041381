#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "patsim/session.hpp"

namespace patsim {

/// Log-spaced histogram of pointing error magnitudes.
class ErrorHistogram {
public:
    static constexpr int kBins = 100;
    static constexpr double kLow = 1e-6;
    static constexpr double kHigh = 0.1;

    void add(double err);
    void merge(const ErrorHistogram& other);

    /// Quantile with log-linear interpolation inside the bin.
    [[nodiscard]] double quantile(double q) const;
    [[nodiscard]] std::uint64_t total() const;
    [[nodiscard]] static double edge(int i);

    [[nodiscard]] const std::array<std::uint64_t, kBins>& counts() const { return counts_; }
    [[nodiscard]] std::uint64_t underflow() const { return underflow_; }
    [[nodiscard]] std::uint64_t overflow() const { return overflow_; }

    friend bool operator==(const ErrorHistogram&, const ErrorHistogram&) = default;

private:
    std::array<std::uint64_t, kBins> counts_{};
    std::uint64_t underflow_ = 0;
    std::uint64_t overflow_ = 0;
};

struct RunMetrics {
    int link_outage_count = 0;
    int fine_tracking_outage_count = 0;
    std::vector<double> acquisition_times;  // s
    std::vector<double> pointing_errors;    // rad, slots not in link outage
    ErrorHistogram pointing_error_histogram;
    std::array<long, kAllPhases.size()> phase_slots{};
    long slots = 0;
    double connected_fraction = 0.0;

    [[nodiscard]] double phase_fraction(SessionPhase p) const;
    /// NaN when no acquisition completed.
    [[nodiscard]] double mean_acquisition_time() const;
    /// Exact sample quantile of pointing_errors (linear interpolation).
    [[nodiscard]] double error_quantile(double q) const;

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Online metric computation, fed one record at a time by the engine.
///
/// An acquisition episode starts at the first slot after the link was last
/// up (the request or outage slot, or mission start) and ends at the
/// WellConnected slot that completes the handshake; failed scan rounds inside
/// the episode count toward its duration.
class MetricsAccumulator {
public:
    void add(const SlotRecord& rec);
    [[nodiscard]] RunMetrics finish() const;

private:
    RunMetrics m_;
    std::optional<SessionPhase> prev_;
    std::optional<double> episode_start_;
};

/// Batch recomputation from a trace. Must agree field-for-field with the
/// engine's online metrics. Throws std::invalid_argument on an empty trace.
RunMetrics compute_metrics(std::span<const SlotRecord> trace);

struct MissionResult {
    std::vector<SlotRecord> trace;
    RunMetrics metrics;
};

/// Runs cfg.mission_duration_s / cfg.slot_dt_s slots. Deterministic in
/// cfg.seed. Throws ConfigError for an invalid config.
MissionResult run_mission(const ScenarioConfig& cfg, SessionHooks hooks = {}, bool keep_trace = true);

struct RunSummary {
    std::uint64_t seed = 0;
    int link_outages = 0;
    int fine_tracking_outages = 0;
    std::size_t acquisitions = 0;
    double acq_time_mean_s = 0.0;  // NaN when none completed
    double err_p50 = 0.0;
    double err_p95 = 0.0;
    double connected_fraction = 0.0;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

RunSummary summarize(std::uint64_t seed, const RunMetrics& m);

struct CellSummary {
    AlgorithmVariant variant = AlgorithmVariant::Baseline;
    double rho = 0.0;
    std::vector<RunSummary> runs;
    ErrorHistogram pooled_errors;

    double outages_mean = 0.0;
    double outages_std = 0.0;
    double acq_time_mean_s = 0.0;
    double acq_time_std_s = 0.0;
    double err_p50 = 0.0;
    double err_p95 = 0.0;
    double connected_fraction_mean = 0.0;
};

/// Fills the aggregate fields of a cell from its runs and pooled histogram.
void aggregate(CellSummary& cell);

struct ComparisonSummary {
    ScenarioConfig base;
    std::vector<std::uint64_t> seeds;
    std::vector<CellSummary> cells;  // variant-major, rho-minor
};

/// Thread count from PATSIM_THREADS, else the hardware concurrency.
int default_thread_count();

/// Every (variant, rho) cell runs the same seeds base.seed + i for i < n_runs.
/// threads <= 0 selects default_thread_count(). Results do not depend on the
/// thread count.
ComparisonSummary run_comparison(const ScenarioConfig& base, std::span<const AlgorithmVariant> variants,
                                 std::span<const double> rhos, int n_runs, int threads = 0);

}  // namespace patsim

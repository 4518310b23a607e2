#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "odtomo/estimator.hpp"
#include "odtomo/network_io.hpp"
#include "odtomo/simulator.hpp"

namespace odtomo {

/// Everything needed to reproduce a simulate/benchmark run.
struct ExperimentSpec {
    std::string network_path;
    NetworkFormat format = NetworkFormat::Json;
    std::vector<std::size_t> k_values{5};
    std::vector<std::size_t> sample_counts{1000, 10000, 100000};
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    std::string observe = "all"; // "all" or a file of edge indices
    MeanRange means;
    DpConfig dp;
    bool exact = false;
    std::string out;
    unsigned threads = 0; // 0 = hardware concurrency

    /// trials ≥ 1; k values and sample counts nonempty, positive, strictly ascending.
    void validate() const;
};

/// Seeds are derived from (spec seed, k, trial) and (instance seed, N) so
/// simulate and benchmark draw identical data.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t k, std::size_t trial);
std::uint64_t measurement_seed(std::uint64_t instance_seed, std::size_t samples);

/// "all", or a file listing edge indices separated by whitespace or commas.
ObservationPlan load_observation_plan(const std::string& observe, std::size_t edge_count);

/// Network label used in reports: the file name without directory and extension.
std::string network_label(const std::string& path);

struct ReportRow {
    std::string network;
    std::size_t k = 0;
    std::size_t samples = 0;
    std::size_t trial = 0;
    ErrorMetrics metrics;
    double runtime_ms = 0.0;
    bool truncated = false;
};

struct MetricSummary {
    double rel_total_error = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double l1_error = 0.0;
    double truncated = 0.0; // fraction of truncated trials
};

struct SummaryRow {
    std::string network;
    std::size_t k = 0;
    std::size_t samples = 0;
    std::size_t trials = 0;
    MetricSummary mean;
    MetricSummary median;
};

struct BenchmarkReport {
    std::vector<ReportRow> rows;      // ordered by (k, trial, samples)
    std::vector<SummaryRow> summary;  // ordered by (k, samples)
};

/// Writes k{K}_t{T}_truth.json and k{K}_t{T}_n{N}.csv into spec.out; returns the paths written.
std::vector<std::string> cmd_simulate(const ExperimentSpec& spec);

struct EstimateOptions {
    std::string measurements; // CSV path; optional in exact mode
    std::string truth;        // sidecar path; required in exact mode
    DpConfig dp;
    bool exact = false;
    std::string out; // empty: no file written
};

/// Runs the estimator on a measurement CSV (or, in exact mode, on the truth
/// sidecar's exact cumulants) and returns the result document.
nlohmann::json cmd_estimate(const EstimateOptions& opts);

BenchmarkReport run_benchmark(const ExperimentSpec& spec);

/// Runs the full pipeline per (k, trial, N) and writes spec.out (report CSV)
/// plus spec.out + ".timing.csv" (wall-clock per row).
BenchmarkReport cmd_benchmark(const ExperimentSpec& spec);

/// Report CSV: header, one "trial" row per (k, trial, N), then "mean" and
/// "median" rows per (k, N). Wall-clock time is kept out so reports are reproducible.
void write_report_csv(std::ostream& out, const BenchmarkReport& report);
void write_timing_csv(std::ostream& out, const BenchmarkReport& report);

/// Mean and median of each metric over the given trial rows (nonempty, same network, k and N).
SummaryRow summarize(const std::vector<const ReportRow*>& rows);

} // namespace odtomo

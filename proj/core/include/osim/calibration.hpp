#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "osim/cascade.hpp"
#include "osim/distribution.hpp"
#include "osim/engine.hpp"
#include "osim/overload.hpp"

namespace osim {

struct GridSpec {
    std::vector<int32_t> m_max_values{5, 10, 15, 20, 25, 30, 35};
    std::vector<double> alpha_values{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int reps = 10;
    uint64_t base_seed = 0;
    int wiener_bins = 20;
};

struct CalibrationCell {
    int32_t m_max = 0;
    double alpha = 0.0;
    // Per-repetition divergences, then the within-cell means; the aggregate
    // is the unweighted mean of the three per-metric means.
    std::vector<double> jsd_volume;
    std::vector<double> jsd_virality;
    std::vector<double> jsd_unique;
    double mean_jsd_volume = 0.0;
    double mean_jsd_virality = 0.0;
    double mean_jsd_unique = 0.0;
    double mean_jsd = 0.0;
    bool failed = false;
    std::string error;
};

// Runs one simulation for a parameter cell; returns its event log.
using CellSimulator = std::function<CompactLog(const OverloadParams&, uint64_t seed)>;

// Per-metric sample vectors of one log's cascades.
struct MetricSamples {
    std::vector<double> volume;
    std::vector<double> virality;
    std::vector<double> unique_users;
};

MetricSamples metric_samples(const CompactLog& log);

// Divergence of two sample sets under the calibration binning: integer log2
// bins for volume/unique counts, `wiener_bins` equal-width bins over the
// pooled range for virality. A simulation with zero cascades scores the
// maximal divergence of 1 per metric.
void score_against(const MetricSamples& truth, const MetricSamples& sim, int wiener_bins, double& jsd_volume,
                   double& jsd_virality, double& jsd_unique);

// Factorial sweep: reps simulations per (M_max, alpha) cell, each seeded
// mix(base_seed, cell, rep). A throwing simulator marks the cell failed and
// the sweep continues. Cells come back in (m_max-major, alpha-minor) order
// regardless of job count.
std::vector<CalibrationCell> grid_sweep(const GridSpec& spec, const MetricSamples& truth,
                                        const CellSimulator& simulate, int jobs = 1);

// Argmin of mean JSD over non-failed cells; ties break to lower M_max, then
// lower alpha. Throws if every cell failed.
const CalibrationCell& select_best(const std::vector<CalibrationCell>& cells);

// Non-dominated cells under component-wise <= on the three per-metric mean
// divergences, in input order.
std::vector<CalibrationCell> pareto_front(const std::vector<CalibrationCell>& cells);

struct CapacitySummary {
    Distribution dist;  // unit-width bins over observed M_t
    int32_t max_m = 0;
    int32_t mode_m = 0;  // lowest value on count ties
    int64_t samples = 0;
};

CapacitySummary capacity_distribution(const std::vector<TraceRow>& traces);

// Long-format rows: m_max, alpha, rep, metric, jsd. Failed cells emit one
// row per metric with an empty jsd field and rep = -1.
void write_sweep_csv(std::ostream& out, const std::vector<CalibrationCell>& cells);

}  // namespace osim

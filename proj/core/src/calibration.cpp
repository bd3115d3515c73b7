#include "osim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "osim/parallel.hpp"
#include "osim/rng.hpp"

namespace osim {

namespace {
constexpr uint64_t kSweepSalt = 0x5eeb;
}

MetricSamples metric_samples(const CompactLog& log) {
    const auto trees = build_cascades(log);
    MetricSamples out;
    out.volume.reserve(trees.size());
    out.virality.reserve(trees.size());
    out.unique_users.reserve(trees.size());
    for (const auto& t : trees) {
        const auto m = cascade_metrics(t, log);
        out.volume.push_back(static_cast<double>(m.volume));
        out.virality.push_back(m.virality);
        out.unique_users.push_back(static_cast<double>(m.unique_users));
    }
    return out;
}

namespace {

double pooled_max(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 1.0;
    for (const double v : a) m = std::max(m, v);
    for (const double v : b) m = std::max(m, v);
    return m;
}

double jsd_log2_binned(const std::vector<double>& truth, const std::vector<double>& sim) {
    const auto edges = log2_integer_edges(pooled_max(truth, sim));
    return js_divergence(histogram(truth, edges), histogram(sim, edges));
}

double jsd_equal_width(const std::vector<double>& truth, const std::vector<double>& sim, int bins) {
    double lo = truth.empty() ? 0.0 : truth.front();
    double hi = lo;
    for (const double v : truth) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (const double v : sim) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const auto edges = equal_width_edges(lo, hi, bins);
    return js_divergence(histogram(truth, edges), histogram(sim, edges));
}

}  // namespace

void score_against(const MetricSamples& truth, const MetricSamples& sim, int wiener_bins, double& jsd_volume,
                   double& jsd_virality, double& jsd_unique) {
    if (truth.volume.empty()) throw std::invalid_argument("ground truth has no cascades");
    if (sim.volume.empty()) {
        // Nothing simulated: as far from any truth as a distribution can be.
        jsd_volume = jsd_virality = jsd_unique = 1.0;
        return;
    }
    jsd_volume = jsd_log2_binned(truth.volume, sim.volume);
    jsd_virality = jsd_equal_width(truth.virality, sim.virality, wiener_bins);
    jsd_unique = jsd_log2_binned(truth.unique_users, sim.unique_users);
}

std::vector<CalibrationCell> grid_sweep(const GridSpec& spec, const MetricSamples& truth,
                                        const CellSimulator& simulate, int jobs) {
    if (spec.m_max_values.empty() || spec.alpha_values.empty()) throw std::invalid_argument("empty grid axis");
    if (spec.reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (truth.volume.empty()) throw std::invalid_argument("ground truth has no cascades");

    const size_t n_cells = spec.m_max_values.size() * spec.alpha_values.size();
    std::vector<CalibrationCell> cells(n_cells);
    for (size_t i = 0; i < spec.m_max_values.size(); ++i) {
        for (size_t j = 0; j < spec.alpha_values.size(); ++j) {
            auto& c = cells[i * spec.alpha_values.size() + j];
            c.m_max = spec.m_max_values[i];
            c.alpha = spec.alpha_values[j];
            c.jsd_volume.assign(static_cast<size_t>(spec.reps), 0.0);
            c.jsd_virality.assign(static_cast<size_t>(spec.reps), 0.0);
            c.jsd_unique.assign(static_cast<size_t>(spec.reps), 0.0);
        }
    }

    // (cell, rep) jobs are independent; errors are joined per cell afterwards.
    const size_t n_jobs = n_cells * static_cast<size_t>(spec.reps);
    std::vector<std::string> job_error(n_jobs);
    parallel_shards(jobs, n_jobs, [&](size_t begin, size_t end) {
        for (size_t job = begin; job < end; ++job) {
            const size_t cell_idx = job / static_cast<size_t>(spec.reps);
            const size_t rep = job % static_cast<size_t>(spec.reps);
            auto& cell = cells[cell_idx];
            const uint64_t seed = mix_seed(spec.base_seed, cell_idx, rep, kSweepSalt);
            try {
                const CompactLog log = simulate(OverloadParams{cell.m_max, cell.alpha}, seed);
                const MetricSamples sim = metric_samples(log);
                score_against(truth, sim, spec.wiener_bins, cell.jsd_volume[rep], cell.jsd_virality[rep],
                              cell.jsd_unique[rep]);
            } catch (const std::exception& ex) {
                job_error[job] = ex.what();
            } catch (...) {
                job_error[job] = "unknown error";
            }
        }
    });

    for (size_t job = 0; job < n_jobs; ++job) {
        if (job_error[job].empty()) continue;
        auto& cell = cells[job / static_cast<size_t>(spec.reps)];
        cell.failed = true;
        if (cell.error.empty()) cell.error = job_error[job];
    }

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (const double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    for (auto& c : cells) {
        if (c.failed) {
            c.jsd_volume.clear();
            c.jsd_virality.clear();
            c.jsd_unique.clear();
            continue;
        }
        c.mean_jsd_volume = mean_of(c.jsd_volume);
        c.mean_jsd_virality = mean_of(c.jsd_virality);
        c.mean_jsd_unique = mean_of(c.jsd_unique);
        c.mean_jsd = (c.mean_jsd_volume + c.mean_jsd_virality + c.mean_jsd_unique) / 3.0;
    }
    return cells;
}

const CalibrationCell& select_best(const std::vector<CalibrationCell>& cells) {
    const CalibrationCell* best = nullptr;
    for (const auto& c : cells) {
        if (c.failed) continue;
        if (best == nullptr || c.mean_jsd < best->mean_jsd ||
            (c.mean_jsd == best->mean_jsd &&
             (c.m_max < best->m_max || (c.m_max == best->m_max && c.alpha < best->alpha))))
            best = &c;
    }
    if (best == nullptr) throw std::runtime_error("no successful calibration cells");
    return *best;
}

std::vector<CalibrationCell> pareto_front(const std::vector<CalibrationCell>& cells) {
    auto dominates = [](const CalibrationCell& a, const CalibrationCell& b) {
        const bool le = a.mean_jsd_volume <= b.mean_jsd_volume && a.mean_jsd_virality <= b.mean_jsd_virality &&
                        a.mean_jsd_unique <= b.mean_jsd_unique;
        const bool lt = a.mean_jsd_volume < b.mean_jsd_volume || a.mean_jsd_virality < b.mean_jsd_virality ||
                        a.mean_jsd_unique < b.mean_jsd_unique;
        return le && lt;
    };
    std::vector<CalibrationCell> front;
    for (const auto& c : cells) {
        if (c.failed) continue;
        bool dominated = false;
        for (const auto& other : cells) {
            if (other.failed) continue;
            if (dominates(other, c)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(c);
    }
    return front;
}

CapacitySummary capacity_distribution(const std::vector<TraceRow>& traces) {
    CapacitySummary out;
    if (traces.empty()) {
        out.dist.edges = {0.0, 1.0};
        out.dist.counts = {0};
        return out;
    }
    int32_t max_m = 0;
    for (const auto& r : traces) max_m = std::max(max_m, r.m_t);
    out.max_m = max_m;
    out.dist.edges.resize(static_cast<size_t>(max_m) + 2);
    for (size_t i = 0; i < out.dist.edges.size(); ++i) out.dist.edges[i] = static_cast<double>(i);
    out.dist.counts.assign(static_cast<size_t>(max_m) + 1, 0);
    for (const auto& r : traces) out.dist.counts[static_cast<size_t>(std::max(r.m_t, 0))]++;
    out.samples = static_cast<int64_t>(traces.size());
    int64_t best = -1;
    for (size_t i = 0; i < out.dist.counts.size(); ++i) {
        if (out.dist.counts[i] > best) {
            best = out.dist.counts[i];
            out.mode_m = static_cast<int32_t>(i);
        }
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<CalibrationCell>& cells) {
    out << std::setprecision(12);
    out << "m_max,alpha,rep,metric,jsd\n";
    for (const auto& c : cells) {
        if (c.failed) {
            for (const char* metric : {"volume", "virality", "unique_users"})
                out << c.m_max << ',' << c.alpha << ",-1," << metric << ",\n";
            continue;
        }
        for (size_t r = 0; r < c.jsd_volume.size(); ++r) {
            out << c.m_max << ',' << c.alpha << ',' << r << ",volume," << c.jsd_volume[r] << '\n';
            out << c.m_max << ',' << c.alpha << ',' << r << ",virality," << c.jsd_virality[r] << '\n';
            out << c.m_max << ',' << c.alpha << ',' << r << ",unique_users," << c.jsd_unique[r] << '\n';
        }
    }
}

}  // namespace osim

#include "osim/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "osim/rng.hpp"

namespace osim {

namespace {

// Joe-Kuo primitive-polynomial parameters for dimensions 2..10 (dimension 1
// is the van der Corput sequence with no parameters).
struct JoeKuoRow {
    int s;
    uint32_t a;
    uint32_t m[5];
};
constexpr JoeKuoRow kJoeKuo[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
};
constexpr int kMaxDims = 1 + static_cast<int>(sizeof(kJoeKuo) / sizeof(kJoeKuo[0]));
constexpr int kBits = 32;

double mean_of(const std::vector<double>& y) {
    double s = 0.0;
    for (const double v : y) s += v;
    return s / static_cast<double>(y.size());
}

}  // namespace

SobolSeq::SobolSeq(int dims) {
    if (dims < 1 || dims > kMaxDims)
        throw std::invalid_argument("sobol sequence supports 1.." + std::to_string(kMaxDims) + " dimensions");
    v_.resize(static_cast<size_t>(dims), std::vector<uint32_t>(kBits, 0));
    for (int k = 1; k <= kBits; ++k) v_[0][static_cast<size_t>(k - 1)] = 1u << (kBits - k);
    for (int d = 1; d < dims; ++d) {
        const JoeKuoRow& row = kJoeKuo[d - 1];
        auto& v = v_[static_cast<size_t>(d)];
        for (int k = 1; k <= row.s; ++k) v[static_cast<size_t>(k - 1)] = row.m[k - 1] << (kBits - k);
        for (int k = row.s + 1; k <= kBits; ++k) {
            uint32_t val = v[static_cast<size_t>(k - row.s - 1)];
            val ^= val >> row.s;
            for (int i = 1; i < row.s; ++i) {
                if ((row.a >> (row.s - 1 - i)) & 1u) val ^= v[static_cast<size_t>(k - i - 1)];
            }
            v[static_cast<size_t>(k - 1)] = val;
        }
    }
}

std::vector<double> SobolSeq::point(uint64_t n) const {
    std::vector<double> x(v_.size(), 0.0);
    for (size_t d = 0; d < v_.size(); ++d) {
        uint32_t acc = 0;
        uint64_t nn = n;
        int k = 0;
        while (nn != 0 && k < kBits) {
            if (nn & 1u) acc ^= v_[d][static_cast<size_t>(k)];
            nn >>= 1;
            ++k;
        }
        x[d] = static_cast<double>(acc) * 0x1.0p-32;
    }
    return x;
}

std::vector<std::vector<double>> SaltelliDesign::flat_rows() const {
    std::vector<std::vector<double>> rows;
    rows.reserve(n_base * (2 + ab.size()));
    rows.insert(rows.end(), a.begin(), a.end());
    rows.insert(rows.end(), b.begin(), b.end());
    for (const auto& block : ab) rows.insert(rows.end(), block.begin(), block.end());
    return rows;
}

SaltelliDesign saltelli_sample(const std::vector<ParamSpec>& params, size_t n_base) {
    if (params.empty()) throw std::invalid_argument("no parameters");
    if (n_base < 2 || (n_base & (n_base - 1)) != 0)
        throw std::invalid_argument("n_base must be a power of 2");
    for (const auto& p : params) {
        if (!(p.hi > p.lo)) throw std::invalid_argument("invalid range for parameter '" + p.name + "'");
    }
    const auto d = static_cast<int>(params.size());
    SobolSeq seq(2 * d);

    auto scale = [&](double u, const ParamSpec& p) {
        double x = p.lo + u * (p.hi - p.lo);
        if (p.integer) x = static_cast<double>(std::llround(x));
        return x;
    };

    SaltelliDesign out;
    out.n_base = n_base;
    out.params = params;
    out.a.resize(n_base, std::vector<double>(static_cast<size_t>(d)));
    out.b.resize(n_base, std::vector<double>(static_cast<size_t>(d)));
    for (uint64_t n = 0; n < n_base; ++n) {
        const auto u = seq.point(n);
        for (int i = 0; i < d; ++i) {
            out.a[n][static_cast<size_t>(i)] = scale(u[static_cast<size_t>(i)], params[static_cast<size_t>(i)]);
            out.b[n][static_cast<size_t>(i)] = scale(u[static_cast<size_t>(d + i)], params[static_cast<size_t>(i)]);
        }
    }
    out.ab.resize(static_cast<size_t>(d), out.a);
    for (int i = 0; i < d; ++i) {
        for (size_t n = 0; n < n_base; ++n) out.ab[static_cast<size_t>(i)][n][static_cast<size_t>(i)] = out.b[n][static_cast<size_t>(i)];
    }
    return out;
}

namespace {

// One full estimator evaluation over the row subset `idx` (identity subset
// for the point estimate, bootstrap resamples otherwise).
struct PointEstimates {
    bool defined = false;
    std::vector<double> s_i;
    std::vector<double> s_t;
};

PointEstimates estimate_on(const std::vector<double>& ya, const std::vector<double>& yb,
                           const std::vector<std::vector<double>>& yab, const std::vector<size_t>& idx) {
    const size_t d = yab.size();
    const auto nn = static_cast<double>(idx.size());
    double mu = 0.0;
    for (const size_t j : idx) mu += ya[j] + yb[j];
    mu /= 2.0 * nn;
    double var = 0.0;
    for (const size_t j : idx) {
        var += (ya[j] - mu) * (ya[j] - mu);
        var += (yb[j] - mu) * (yb[j] - mu);
    }
    var /= 2.0 * nn;

    PointEstimates out;
    if (!(var > 1e-12 * std::max(1.0, mu * mu))) return out;  // constant output: undefined
    out.defined = true;
    out.s_i.resize(d);
    out.s_t.resize(d);
    for (size_t i = 0; i < d; ++i) {
        double acc_s = 0.0;
        double acc_t = 0.0;
        for (const size_t j : idx) {
            acc_s += yb[j] * (yab[i][j] - ya[j]);
            const double diff = ya[j] - yab[i][j];
            acc_t += diff * diff;
        }
        out.s_i[i] = acc_s / nn / var;
        out.s_t[i] = acc_t / (2.0 * nn) / var;
    }
    return out;
}

void percentile_ci(std::vector<double>& samples, double& lo, double& hi) {
    if (samples.empty()) return;
    std::sort(samples.begin(), samples.end());
    const auto last = static_cast<double>(samples.size() - 1);
    lo = samples[static_cast<size_t>(std::llround(0.025 * last))];
    hi = samples[static_cast<size_t>(std::llround(0.975 * last))];
}

}  // namespace

SobolResult sobol_indices(const std::vector<double>& ya, const std::vector<double>& yb,
                          const std::vector<std::vector<double>>& yab, int bootstrap_resamples,
                          uint64_t bootstrap_seed) {
    const size_t n = ya.size();
    if (n < 2 || yb.size() != n) throw std::invalid_argument("output blocks must align (>= 2 rows)");
    for (const auto& col : yab)
        if (col.size() != n) throw std::invalid_argument("output blocks must align (>= 2 rows)");
    const size_t d = yab.size();
    if (d == 0) throw std::invalid_argument("no parameters");

    std::vector<size_t> idx(n);
    for (size_t j = 0; j < n; ++j) idx[j] = j;
    const PointEstimates point = estimate_on(ya, yb, yab, idx);

    SobolResult out;
    out.n_base = n;
    out.params.assign(d, SobolIndexEstimate{});
    if (!point.defined) return out;

    std::vector<std::vector<double>> boot_s(d), boot_t(d);
    Rng rng(mix_seed(bootstrap_seed, n, d, 0xb001));
    std::vector<size_t> re(n);
    for (int r = 0; r < bootstrap_resamples; ++r) {
        for (size_t j = 0; j < n; ++j) re[j] = static_cast<size_t>(rng.uniform_int(n));
        const PointEstimates pe = estimate_on(ya, yb, yab, re);
        if (!pe.defined) continue;
        for (size_t i = 0; i < d; ++i) {
            boot_s[i].push_back(pe.s_i[i]);
            boot_t[i].push_back(pe.s_t[i]);
        }
    }
    for (size_t i = 0; i < d; ++i) {
        auto& e = out.params[i];
        e.defined = true;
        e.s_i = point.s_i[i];
        e.s_t = point.s_t[i];
        e.s_i_lo = e.s_i;
        e.s_i_hi = e.s_i;
        e.s_t_lo = e.s_t;
        e.s_t_hi = e.s_t;
        percentile_ci(boot_s[i], e.s_i_lo, e.s_i_hi);
        percentile_ci(boot_t[i], e.s_t_lo, e.s_t_hi);
    }
    return out;
}

namespace {

struct GridEstimates {
    bool defined = false;
    double s1 = 0.0, s2 = 0.0;
};

// Variance decomposition over replicate-averaged cell means.
GridEstimates grid_estimate(const std::vector<std::vector<double>>& cell_means) {
    const size_t n1 = cell_means.size();
    const size_t n2 = cell_means[0].size();
    double mu = 0.0;
    for (const auto& row : cell_means)
        for (const double v : row) mu += v;
    mu /= static_cast<double>(n1 * n2);

    double var = 0.0;
    for (const auto& row : cell_means)
        for (const double v : row) var += (v - mu) * (v - mu);
    var /= static_cast<double>(n1 * n2);

    GridEstimates out;
    if (!(var > 1e-12 * std::max(1.0, mu * mu))) return out;
    out.defined = true;

    double v1 = 0.0;
    for (size_t i = 0; i < n1; ++i) {
        double m = 0.0;
        for (size_t j = 0; j < n2; ++j) m += cell_means[i][j];
        m /= static_cast<double>(n2);
        v1 += (m - mu) * (m - mu);
    }
    v1 /= static_cast<double>(n1);

    double v2 = 0.0;
    for (size_t j = 0; j < n2; ++j) {
        double m = 0.0;
        for (size_t i = 0; i < n1; ++i) m += cell_means[i][j];
        m /= static_cast<double>(n1);
        v2 += (m - mu) * (m - mu);
    }
    v2 /= static_cast<double>(n2);

    out.s1 = v1 / var;
    out.s2 = v2 / var;
    return out;
}

}  // namespace

SobolResult grid_sobol_indices(const std::vector<std::vector<std::vector<double>>>& y, int bootstrap_resamples,
                               uint64_t bootstrap_seed) {
    const size_t n1 = y.size();
    if (n1 < 2) throw std::invalid_argument("need >= 2 values per grid axis");
    const size_t n2 = y[0].size();
    if (n2 < 2) throw std::invalid_argument("need >= 2 values per grid axis");
    size_t total = 0;
    for (const auto& row : y) {
        if (row.size() != n2) throw std::invalid_argument("ragged grid");
        for (const auto& cell : row) {
            if (cell.empty()) throw std::invalid_argument("empty grid cell");
            total += cell.size();
        }
    }

    auto means_of = [&](Rng* rng) {
        std::vector<std::vector<double>> means(n1, std::vector<double>(n2));
        for (size_t i = 0; i < n1; ++i) {
            for (size_t j = 0; j < n2; ++j) {
                const auto& cell = y[i][j];
                if (rng == nullptr) {
                    means[i][j] = mean_of(cell);
                } else {
                    double s = 0.0;
                    for (size_t r = 0; r < cell.size(); ++r) s += cell[rng->uniform_int(cell.size())];
                    means[i][j] = s / static_cast<double>(cell.size());
                }
            }
        }
        return means;
    };

    const GridEstimates point = grid_estimate(means_of(nullptr));
    SobolResult out;
    out.n_base = total;
    out.params.assign(2, SobolIndexEstimate{});
    if (!point.defined) return out;

    std::vector<double> boot1, boot2;
    Rng rng(mix_seed(bootstrap_seed, n1, n2, 0xb002));
    for (int r = 0; r < bootstrap_resamples; ++r) {
        const GridEstimates ge = grid_estimate(means_of(&rng));
        if (!ge.defined) continue;
        boot1.push_back(ge.s1);
        boot2.push_back(ge.s2);
    }

    auto fill = [](SobolIndexEstimate& e, double s, double st, std::vector<double>& boot_s,
                   std::vector<double>& boot_st) {
        e.defined = true;
        e.s_i = s;
        e.s_t = st;
        e.s_i_lo = e.s_i_hi = s;
        e.s_t_lo = e.s_t_hi = st;
        percentile_ci(boot_s, e.s_i_lo, e.s_i_hi);
        percentile_ci(boot_st, e.s_t_lo, e.s_t_hi);
    };
    // Two-factor identity: the total effect of one parameter is everything
    // the other's first-order term does not explain.
    std::vector<double> boot_t1(boot2.size()), boot_t2(boot1.size());
    for (size_t r = 0; r < boot2.size(); ++r) boot_t1[r] = 1.0 - boot2[r];
    for (size_t r = 0; r < boot1.size(); ++r) boot_t2[r] = 1.0 - boot1[r];
    fill(out.params[0], point.s1, 1.0 - point.s2, boot1, boot_t1);
    fill(out.params[1], point.s2, 1.0 - point.s1, boot2, boot_t2);
    return out;
}

std::vector<double> sliced_first_order(const std::vector<std::vector<std::vector<double>>>& y) {
    if (y.empty()) throw std::invalid_argument("empty sweep");
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& slice : y) {
        if (slice.size() < 2) throw std::invalid_argument("need >= 2 primary values per slice");
        size_t total = 0;
        for (const auto& cell : slice) {
            if (cell.size() < 2) throw std::invalid_argument("need >= 2 replicates per cell");
            total += cell.size();
        }
        double mu = 0.0;
        for (const auto& cell : slice)
            for (const double v : cell) mu += v;
        mu /= static_cast<double>(total);
        double var = 0.0;
        for (const auto& cell : slice)
            for (const double v : cell) var += (v - mu) * (v - mu);
        var /= static_cast<double>(total);
        if (!(var > 0.0)) {
            out.push_back(0.0);  // flat slice: nothing to attribute
            continue;
        }
        double between = 0.0;
        for (const auto& cell : slice) {
            const double m = mean_of(cell);
            between += static_cast<double>(cell.size()) * (m - mu) * (m - mu);
        }
        between /= static_cast<double>(total);
        out.push_back(between / var);
    }
    return out;
}

void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows) {
    out << std::setprecision(12);
    out << "metric,parameter,s_i,s_ti,ci_lo,ci_hi,n\n";
    for (const auto& r : rows) {
        out << r.metric << ',' << r.parameter << ',';
        if (r.estimate.defined) {
            out << r.estimate.s_i << ',' << r.estimate.s_t << ',' << r.estimate.s_i_lo << ','
                << r.estimate.s_i_hi;
        } else {
            out << ",,,";
        }
        out << ',' << r.n << '\n';
    }
}

}  // namespace osim

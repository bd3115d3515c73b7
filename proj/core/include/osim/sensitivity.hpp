#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace osim {

// Low-discrepancy Sobol sequence, direction numbers from the Joe-Kuo table,
// good through 10 dimensions. point(0) is the origin.
class SobolSeq {
public:
    explicit SobolSeq(int dims);
    int dims() const { return static_cast<int>(v_.size()); }
    std::vector<double> point(uint64_t n) const;

private:
    std::vector<std::vector<uint32_t>> v_;  // v_[dim][k-1], k = 1..32
};

struct ParamSpec {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool integer = false;  // round after scaling (countable parameters)
};

// Saltelli design: matrices A and B from one 2d-dimensional Sobol stream,
// and AB_i = A with column i swapped in from B. N(2 + d) rows total.
struct SaltelliDesign {
    size_t n_base = 0;
    std::vector<ParamSpec> params;
    std::vector<std::vector<double>> a;                // n_base x d
    std::vector<std::vector<double>> b;                // n_base x d
    std::vector<std::vector<std::vector<double>>> ab;  // d x n_base x d

    // A rows, then B rows, then AB_1 ... AB_d rows.
    std::vector<std::vector<double>> flat_rows() const;
};

SaltelliDesign saltelli_sample(const std::vector<ParamSpec>& params, size_t n_base);

struct SobolIndexEstimate {
    bool defined = false;  // false when the output variance is (near) zero
    double s_i = 0.0;
    double s_i_lo = 0.0;  // bootstrap 95% CI
    double s_i_hi = 0.0;
    double s_t = 0.0;
    double s_t_lo = 0.0;
    double s_t_hi = 0.0;
};

struct SobolResult {
    size_t n_base = 0;
    std::vector<SobolIndexEstimate> params;
};

// First-order (Saltelli 2010) and total (Jansen) estimators with bootstrap
// CIs. ya/yb/yab[i] are the model outputs on the design blocks.
SobolResult sobol_indices(const std::vector<double>& ya, const std::vector<double>& yb,
                          const std::vector<std::vector<double>>& yab, int bootstrap_resamples = 1000,
                          uint64_t bootstrap_seed = 0x0b00);

// Factorial-grid approximation over cell means for two parameters:
// S_i = V(E[Y|x_i]) / V(Y) over the grid of replicate-averaged cells, and
// S_Ti = 1 - S_j (two-factor identity). Bootstrap resamples replicates
// within cells. y[i][j] holds the replicate outputs of cell (i, j).
SobolResult grid_sobol_indices(const std::vector<std::vector<std::vector<double>>>& y,
                               int bootstrap_resamples = 1000, uint64_t bootstrap_seed = 0x0b00);

// Conditional first-order index of the primary parameter at each fixed value
// of the slice parameter. y[j][i] holds the replicate outputs with slice
// value j and primary value i; every cell needs >= 2 replicates. A slice
// with zero total variance yields 0.
std::vector<double> sliced_first_order(const std::vector<std::vector<std::vector<double>>>& y);

struct SensitivityRow {
    std::string metric;
    std::string parameter;
    SobolIndexEstimate estimate;
    size_t n = 0;
};

// CSV schema: metric, parameter, s_i, s_ti, ci_lo, ci_hi, n. The CI columns
// carry the first-order bootstrap interval; undefined estimates emit empty
// numeric fields.
void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows);

}  // namespace osim

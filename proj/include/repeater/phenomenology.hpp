#pragma once

#include <vector>

#include "repeater/core_params.hpp"
#include "repeater/fock_sim.hpp"

namespace repeater {

/// Level QBERs of a hierarchical chain across a p2 grid, with the
/// propagation ratios r_i = (1-2Q_{i+1})/(1-2Q_i)^2 and a linear fit of
/// their mean C(p2).
struct QberScan {
    std::vector<double> p2_grid;
    std::vector<std::vector<double>> level_qbers;  // [p2 index][level]
    std::vector<std::vector<double>> ratios;       // [p2 index][level - 1]
    std::vector<double> c_values;                  // mean ratio per p2
    double fit_intercept = 0.0;
    double fit_slope = 0.0;
    /// Largest |r_i - r_j| over all levels and grid points.
    double max_ratio_spread = 0.0;
};

/// Runs fock-sim chains of 2^(max_level-1) links, each elem_length_km long.
QberScan qber_ratio_scan(const SystemParams& params, double elem_length_km, int max_level,
                         const std::vector<double>& p2_grid, const FockOptions& opts = {});

struct ElementaryQberFit {
    std::vector<double> p2_grid;
    std::vector<double> one_minus_2q;  // 1 - 2 Q_1 per grid point
    double bound_intercept = 0.0;      // t_d t_e of the p2 = 0 link
    double fit_intercept = 0.0;
    double fit_slope = 0.0;
    double max_residual = 0.0;
    /// 1 - 2Q_1 >= t_d t_e - p2/2 at every grid point.
    bool bound_holds = true;
};

ElementaryQberFit elementary_qber_model(const SystemParams& params, double elem_length_km,
                                        const std::vector<double>& p2_grid,
                                        const FockOptions& opts = {});

/// ceil(8/9 + (1/18)/p2); INT_MAX for p2 = 0.
int n_max_estimate(double p2);

enum class RangeRule { ten_km, single_link };

/// Total range used by a rule: 10 km, or the computed maximum QKD range of a
/// single elementary link at p2 = 0.
double rule_range_km(const SystemParams& params, RangeRule rule);

/// p2 at which Q(N) over the given total range reaches Q_th, by bisection to
/// 1e-4 on [0, 1 - p1]. Returns 0 if the chain fails already at p2 = 0 and
/// kUnbounded if it never fails on that interval.
double p2_threshold(const SystemParams& params, int n_links, double range_km,
                    const FockOptions& opts = {}, double tol = 1e-4);

/// Whether the N-link chain still has Q below Q_th at the given p2 and range.
bool chain_viable(const SystemParams& params, int n_links, double range_km, double p2,
                  const FockOptions& opts = {});

struct NmaxRow {
    int n_links = 0;
    double range_km = 0.0;
    double p2_threshold = 0.0;
    int estimate_at_threshold = 0;
};

/// One row per N in n_list under the given rule.
std::vector<NmaxRow> n_max_table(const SystemParams& params, const std::vector<int>& n_list,
                                 RangeRule rule, const FockOptions& opts = {});

}  // namespace repeater

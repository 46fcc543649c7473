#include "repeater/phenomenology.hpp"

#include <algorithm>
#include <climits>

#include "repeater/analytic_chain.hpp"
#include "repeater/envelope.hpp"
#include "repeater/parallel.hpp"

namespace repeater {

namespace {

SystemParams with_p2(const SystemParams& params, double p2) {
    SystemParams p = params;
    p.p2 = p2;
    return SystemParams::checked(p);
}

double propagation_ratio(double q_next, double q_prev) {
    const double e = 1.0 - 2.0 * q_prev;
    return (1.0 - 2.0 * q_next) / (e * e);
}

}  // namespace

QberScan qber_ratio_scan(const SystemParams& params, double elem_length_km, int max_level,
                         const std::vector<double>& p2_grid, const FockOptions& opts) {
    if (max_level < 2) throw ParamError("qber_ratio_scan: max_level must be >= 2");
    if (p2_grid.size() < 2) throw ParamError("qber_ratio_scan: need at least two p2 values");
    const int n_links = 1 << (max_level - 1);
    QberScan scan;
    scan.p2_grid = p2_grid;
    scan.level_qbers.resize(p2_grid.size());
    parallel_for(p2_grid.size(), [&](std::size_t g) {
        const ChainResult r =
            simulate_chain(with_p2(params, p2_grid[g]), {elem_length_km * n_links, n_links}, opts);
        scan.level_qbers[g] = r.level_qbers;
    });
    for (const auto& qs : scan.level_qbers) {
        if (static_cast<int>(qs.size()) != max_level) {
            throw NumericError("qber_ratio_scan: a chain failed before the last level");
        }
        std::vector<double> r;
        for (int i = 0; i + 1 < max_level; ++i) r.push_back(propagation_ratio(qs[i + 1], qs[i]));
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        scan.max_ratio_spread = std::max(scan.max_ratio_spread, *hi - *lo);
        double mean = 0.0;
        for (double x : r) mean += x;
        scan.c_values.push_back(mean / r.size());
        scan.ratios.push_back(std::move(r));
    }
    const auto [c0, c1] = linear_fit(scan.p2_grid, scan.c_values);
    scan.fit_intercept = c0;
    scan.fit_slope = c1;
    return scan;
}

ElementaryQberFit elementary_qber_model(const SystemParams& params, double elem_length_km,
                                        const std::vector<double>& p2_grid,
                                        const FockOptions& opts) {
    if (p2_grid.size() < 2) throw ParamError("elementary_qber_model: need at least two p2 values");
    ElementaryQberFit fit;
    fit.p2_grid = p2_grid;
    const ChainConfig link{elem_length_km, 1};
    const SystemParams base = with_p2(params, 0.0);
    fit.bound_intercept =
        sift_model(base).t_d() * elementary_coeffs(base, link).t_e();
    fit.one_minus_2q.resize(p2_grid.size());
    parallel_for(p2_grid.size(), [&](std::size_t g) {
        fit.one_minus_2q[g] = 1.0 - 2.0 * simulate_chain(with_p2(params, p2_grid[g]), link, opts).q;
    });
    for (std::size_t g = 0; g < p2_grid.size(); ++g) {
        if (fit.one_minus_2q[g] < fit.bound_intercept - 0.5 * p2_grid[g]) fit.bound_holds = false;
    }
    const auto [c0, c1] = linear_fit(p2_grid, fit.one_minus_2q);
    fit.fit_intercept = c0;
    fit.fit_slope = c1;
    for (std::size_t g = 0; g < p2_grid.size(); ++g) {
        fit.max_residual =
            std::max(fit.max_residual, std::abs(fit.one_minus_2q[g] - (c0 + c1 * p2_grid[g])));
    }
    return fit;
}

int n_max_estimate(double p2) {
    if (!(p2 >= 0.0)) throw ParamError("n_max_estimate: p2 must be >= 0");
    if (p2 == 0.0) return INT_MAX;
    return static_cast<int>(std::ceil(8.0 / 9.0 + (1.0 / 18.0) / p2));
}

double rule_range_km(const SystemParams& params, RangeRule rule) {
    if (rule == RangeRule::ten_km) return 10.0;
    return max_range_qkd(with_p2(params, 0.0), 1);
}

bool chain_viable(const SystemParams& params, int n_links, double range_km, double p2,
                  const FockOptions& opts) {
    const ChainResult r = simulate_chain(with_p2(params, p2), {range_km, n_links}, opts);
    return r.p_succ > 0.0 && r.q < q_threshold();
}

double p2_threshold(const SystemParams& params, int n_links, double range_km,
                    const FockOptions& opts, double tol) {
    auto excess = [&](double p2) {
        const ChainResult r = simulate_chain(with_p2(params, p2), {range_km, n_links}, opts);
        return r.q - q_threshold();
    };
    const double hi = 1.0 - params.p1;
    if (excess(0.0) >= 0.0) return 0.0;
    if (excess(hi) < 0.0) return kUnbounded;
    return bisect(excess, 0.0, hi, tol);
}

std::vector<NmaxRow> n_max_table(const SystemParams& params, const std::vector<int>& n_list,
                                 RangeRule rule, const FockOptions& opts) {
    const double range = rule_range_km(params, rule);
    std::vector<NmaxRow> rows(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t i) {
        NmaxRow& row = rows[i];
        row.n_links = n_list[i];
        row.range_km = range;
        row.p2_threshold = p2_threshold(params, n_list[i], range, opts);
        row.estimate_at_threshold =
            std::isfinite(row.p2_threshold) && row.p2_threshold > 0.0
                ? n_max_estimate(row.p2_threshold)
                : 0;
    });
    return rows;
}

}  // namespace repeater

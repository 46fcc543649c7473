#include "repeater/envelope.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "repeater/analytic_chain.hpp"
#include "repeater/parallel.hpp"

namespace repeater {

namespace {

double memory_factor(const SystemParams& p) {
    const double x = p.eta_r * p.lambda_m;
    return x * x;
}

double center_efficiency(const SystemParams& p) { return p.eta_e * p.p1; }

}  // namespace

double ThreePieceBound::slope() const { return A * std::pow(B, n_links); }

double ThreePieceBound::operator()(double length_km, double alpha_db_per_km) const {
    if (length_km >= l_max) return 0.0;
    const double eta = db_to_linear(alpha_db_per_km * length_km);
    return std::min(r_max, eta * slope());
}

ThreePieceBound three_piece_bound(const SystemParams& params, int n_links) {
    if (n_links < 1) throw ParamError("n_links: must be >= 1");
    const double mem = memory_factor(params);
    const double ee = center_efficiency(params);
    ThreePieceBound b;
    b.n_links = n_links;
    b.A = params.eta_d * params.eta_d / (mem * params.t_q_seconds);
    b.B = mem * ee * ee * params.m_modes / 4.0;
    b.r_max = b.A * std::pow(mem / 2.0, n_links);
    b.eta_prime = std::pow(2.0 / (params.m_modes * ee * ee), n_links);
    b.l_prime = b.eta_prime >= 1.0 ? 0.0 : range_for_transmittance(b.eta_prime, params.alpha_db_per_km);
    b.l_max = max_range_qkd(params, n_links);
    return b;
}

double three_piece_value(const SystemParams& params, int n_links, double length_km) {
    return three_piece_bound(params, n_links)(length_km, params.alpha_db_per_km);
}

double exponent_t(const SystemParams& params) {
    const double ee = center_efficiency(params);
    const double num = std::log(memory_factor(params) / 2.0);
    const double den = std::log(2.0 / (params.m_modes * ee * ee));
    if (!(num < 0.0 && den < 0.0)) {
        throw std::domain_error(
            "exponent_t: needs eta_r^2 lambda_m^2 < 2 and M eta_e^2 > 2");
    }
    return num / den;
}

namespace {

struct XiTerms {
    double beta;
    double gamma;
    int m;
};

XiTerms xi_terms(const SystemParams& params) {
    const double ee = center_efficiency(params);
    return {memory_factor(params) / 2.0, ee * ee / 2.0, params.m_modes};
}

// 1 - (1 - gamma z)^M without cancellation at small gamma z.
double herald(const XiTerms& t, double z) {
    return -std::expm1(t.m * std::log1p(-t.gamma * z));
}

}  // namespace

double xi_residual(const SystemParams& params, double z) {
    const XiTerms t = xi_terms(params);
    const double h = herald(t, z);
    const double lhs = h * std::log(t.beta * h);
    const double rhs = t.gamma * t.m * z * std::log(z) * std::pow(1.0 - t.gamma * z, t.m - 1);
    return lhs - rhs;
}

XiSolution exponent_xi(const SystemParams& params) {
    const XiTerms t = xi_terms(params);
    if (!(t.beta > 0.0 && t.beta < 1.0) || !(t.gamma > 0.0 && t.gamma <= 0.5)) {
        throw std::domain_error("exponent_xi: needs 0 < eta_r^2 lambda_m^2 / 2 < 1");
    }
    // Log-spaced scan over [1e-12, 1): the root moves towards 0 roughly as 1/M.
    constexpr int kScan = 10000;
    constexpr double kLogZMin = -12.0;
    auto scan_z = [&](int k) { return std::pow(10.0, kLogZMin * (1.0 - static_cast<double>(k) / kScan)); };
    auto f = [&](double z) { return xi_residual(params, z); };

    XiSolution sol;
    double first_lo = -1.0;
    double first_hi = -1.0;
    double prev_z = scan_z(0);
    double prev_f = f(prev_z);
    std::ostringstream profile;
    for (int k = 1; k < kScan; ++k) {
        const double z = scan_z(k);
        const double fz = f(z);
        if ((fz < 0.0) != (prev_f < 0.0)) {
            ++sol.sign_changes;
            if (first_lo < 0.0) {
                first_lo = prev_z;
                first_hi = z;
            }
        }
        if (k % 1000 == 0) profile << (fz < 0.0 ? '-' : '+');
        prev_z = z;
        prev_f = fz;
    }
    if (first_lo < 0.0) {
        throw NumericError("exponent_xi: no sign change in (0,1); sign profile " + profile.str());
    }
    sol.z = bisect(f, first_lo, first_hi, 1e-15 * first_hi);
    sol.residual = f(sol.z);
    sol.xi = std::log(t.beta * herald(t, sol.z)) / std::log(sol.z);
    return sol;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) {
        throw NumericError("linear_fit: need at least two paired points");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw NumericError("linear_fit: degenerate abscissae");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

double envelope_rate(const SystemParams& params, const std::vector<int>& n_candidates,
                     double length_km) {
    double best = 0.0;
    for (int n : n_candidates) {
        best = std::max(best, secret_key_rate(params, {length_km, n}));
    }
    return best;
}

EnvelopeResult numeric_envelope(const SystemParams& params, const std::vector<double>& l_grid,
                                const std::vector<int>& n_candidates,
                                const EnvelopeOptions& opts) {
    if (l_grid.empty() || n_candidates.empty()) {
        throw ParamError("numeric_envelope: empty grid or candidate list");
    }
    EnvelopeResult res;
    res.curve.label = "envelope";
    res.curve.x = l_grid;
    res.curve.y.assign(l_grid.size(), 0.0);
    res.n_star.assign(l_grid.size(), 0);
    parallel_for(l_grid.size(), [&](std::size_t i) {
        for (int n : n_candidates) {
            const double r = secret_key_rate(params, {l_grid[i], n});
            if (r > res.curve.y[i]) {
                res.curve.y[i] = r;
                res.n_star[i] = n;
            }
        }
    });
    res.curve.validate();

    const double l_lo = opts.fit_l_min >= 0.0 ? opts.fit_l_min : three_piece_bound(params, 1).l_prime;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < l_grid.size(); ++i) {
        const double l = l_grid[i];
        if (res.curve.y[i] > 0.0 && l >= l_lo && l <= opts.fit_l_max) {
            lx.push_back(std::log(db_to_linear(params.alpha_db_per_km * l)));
            ly.push_back(std::log(res.curve.y[i]));
        }
    }
    res.fit_points = static_cast<int>(lx.size());
    if (lx.size() >= 2) {
        const auto [c0, c1] = linear_fit(lx, ly);
        res.fit_exponent = c1;
        res.fit_prefactor = std::exp(c0);
    } else {
        res.fit_exponent = std::nan("");
        res.fit_prefactor = std::nan("");
    }
    return res;
}

double tgw_rate(double eta, int m_modes, double t_q) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ParamError("tgw_rate: eta outside [0,1]");
    if (eta == 1.0) return kUnbounded;
    return m_modes * std::log2((1.0 + eta) / (1.0 - eta)) / t_q;
}

double ideal_bb84_rate(double eta, int m_modes, double t_q) { return eta * m_modes / t_q; }

double tgw_crossover_km(const SystemParams& params, const std::vector<int>& n_candidates,
                        double l_lo, double l_hi) {
    auto gap = [&](double l) {
        const double eta = db_to_linear(params.alpha_db_per_km * l);
        return envelope_rate(params, n_candidates, l) -
               tgw_rate(eta, params.m_modes, params.t_q_seconds);
    };
    double last_below = std::nan("");
    for (double l = l_lo; l <= l_hi; l += 1.0) {
        if (gap(l) <= 0.0) last_below = l;
    }
    if (std::isnan(last_below) || last_below + 1.0 > l_hi) return std::nan("");
    return bisect(gap, last_below, last_below + 1.0, 1e-9);
}

std::vector<int> power_of_two_candidates(int max_n) {
    std::vector<int> out;
    for (int n = 1; n <= max_n; n *= 2) out.push_back(n);
    return out;
}

}  // namespace repeater

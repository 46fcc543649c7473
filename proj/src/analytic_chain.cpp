#include "repeater/analytic_chain.hpp"

#include <algorithm>
#include <string>

namespace repeater {

DetectorDerived detector_derived(double p_dark, double eta_eff) {
    // 1 - (1-P)(1-eta) and 1 - (1-P)(1-eta)^2, expanded so that small eta
    // (long links) does not cancel to zero.
    return {p_dark + (1.0 - p_dark) * eta_eff,
            p_dark + (1.0 - p_dark) * eta_eff * (2.0 - eta_eff)};
}

BsmWeights bsm_weights(double p_dark, double eta_eff) {
    const auto [A, B] = detector_derived(p_dark, eta_eff);
    const double P = p_dark;
    BsmWeights w;
    w.a = (P * P * (1.0 - A) * (1.0 - A) + A * A * (1.0 - P) * (1.0 - P)) / 8.0;
    w.b = 2.0 * A * P * (1.0 - A) * (1.0 - P) / 8.0;
    w.c = P * (1.0 - P) * (P * (1.0 - B) + B * (1.0 - P)) / 8.0;
    return w;
}

LinkStateCoeffs LinkStateCoeffs::make(double a, double b, double c, double d) {
    return {a, b, c, d, a + b + 2.0 * (c + d)};
}

void LinkStateCoeffs::validate() const {
    if (!(a >= 0.0 && b >= 0.0 && c >= 0.0 && d >= 0.0)) {
        throw ParamError("LinkStateCoeffs: weights must be non-negative");
    }
    if (!(s > 0.0)) {
        throw ParamError("LinkStateCoeffs: normalization must be positive");
    }
    const double expect = a + b + 2.0 * (c + d);
    if (std::abs(expect - s) > 1e-12 * expect) {
        throw ParamError("LinkStateCoeffs: s does not equal a+b+2(c+d)");
    }
}

double elementary_efficiency(const SystemParams& params, const ChainConfig& chain) {
    return params.eta_e * chain.half_link_transmittance(params.alpha_db_per_km) * params.p1;
}

ElementaryCoeffs elementary_coeffs(const SystemParams& params, const ChainConfig& chain) {
    chain.validate();
    const BsmWeights w = bsm_weights(params.p_dark_e, elementary_efficiency(params, chain));
    return {w.a, w.b, w.c};
}

RepeaterCoeffs repeater_coeffs(const SystemParams& params) {
    const BsmWeights w = bsm_weights(params.p_dark_r, params.eta_r * params.lambda_m);
    return {w.a, w.b, w.c};
}

SiftModel sift_model(const SystemParams& params) {
    const double P = params.p_dark_d;
    SiftModel m;
    m.a_d = params.eta_d + (1.0 - params.eta_d) * P;
    m.q1 = (1.0 - P) * m.a_d;
    m.q2 = (1.0 - m.a_d) * P;
    m.q3 = P * m.a_d;
    return m;
}

LinkStateCoeffs swap_step(const LinkStateCoeffs& prev, const RepeaterCoeffs& rep) {
    const double ai = prev.a, bi = prev.b, ci = prev.c, di = prev.d;
    const double s2 = prev.s * prev.s;
    const double a = rep.a, b = rep.b, c = rep.c;
    const double ab_i = ai + bi;
    const double mix = di * ab_i + ci * ci + di * di;
    const double an = (a * ai * ai + (a + b) * ai * bi + b * bi * bi) / s2;
    const double bn = (b * ai * ai + (a + b) * ai * bi + a * bi * bi) / s2;
    const double cn =
        (c * ab_i * ab_i + 2.0 * (a + b) * ci * (ab_i + 2.0 * di) + 4.0 * c * mix) / s2;
    const double dn = (4.0 * c * ci * (ab_i + 2.0 * di) + 2.0 * (a + b) * mix) / s2;
    return LinkStateCoeffs::make(an, bn, cn, dn);
}

SwapTensor swap_tensor(const RepeaterCoeffs& rep) {
    const double a = rep.a, b = rep.b, c = rep.c;
    const double p = a + b;
    const double c2 = 2.0 * c, c4 = 4.0 * c, p2 = 2.0 * p;
    SwapTensor C{};
    // Rows j = M+ and j = M- share the same outgoing weights.
    for (int j = 0; j < 2; ++j) {
        C[j][0] = {a, b, c, 0, 0, c};
        C[j][1] = {b, a, c, 0, 0, c};
        C[j][2] = {0, 0, p, 0, c2, 0};
        C[j][3] = {0, 0, 0, p, 0, c2};
        C[j][4] = {0, 0, c2, 0, p, 0};
        C[j][5] = {0, 0, 0, c2, 0, p};
    }
    C[2][0] = {0, 0, p, c2, 0, 0};
    C[2][1] = {0, 0, p, c2, 0, 0};
    C[2][2] = {0, 0, c4, 0, 0, 0};
    C[2][3] = {0, 0, 0, c4, 0, 0};
    C[2][4] = {0, 0, p2, 0, 0, 0};
    C[2][5] = {0, 0, 0, p2, 0, 0};

    C[3][0] = {0, 0, c2, p, 0, 0};
    C[3][1] = {0, 0, c2, p, 0, 0};
    C[3][2] = {0, 0, p2, 0, 0, 0};
    C[3][3] = {0, 0, 0, p2, 0, 0};
    C[3][4] = {0, 0, c4, 0, 0, 0};
    C[3][5] = {0, 0, 0, c4, 0, 0};

    C[4][0] = {0, 0, 0, 0, p, c2};
    C[4][1] = {0, 0, 0, 0, p, c2};
    C[4][2] = {0, 0, 0, 0, c4, 0};
    C[4][3] = {0, 0, 0, 0, 0, c4};
    C[4][4] = {0, 0, 0, 0, p2, 0};
    C[4][5] = {0, 0, 0, 0, 0, p2};

    C[5][0] = {0, 0, 0, 0, c2, p};
    C[5][1] = {0, 0, 0, 0, c2, p};
    C[5][2] = {0, 0, 0, 0, p2, 0};
    C[5][3] = {0, 0, 0, 0, 0, p2};
    C[5][4] = {0, 0, 0, 0, c4, 0};
    C[5][5] = {0, 0, 0, 0, 0, c4};
    return C;
}

SixWeights swap_tensor_pair(const SixWeights& left, const SixWeights& right,
                            const RepeaterCoeffs& rep) {
    const SwapTensor C = swap_tensor(rep);
    SixWeights out{};
    for (int j = 0; j < 6; ++j) {
        for (int k = 0; k < 6; ++k) {
            const double w = left[j] * right[k];
            if (w == 0.0) continue;
            for (int l = 0; l < 6; ++l) {
                out[l] += C[j][k][l] * w;
            }
        }
    }
    return out;
}

SixWeights full_swap_tensor_step(const SixWeights& r, const RepeaterCoeffs& rep) {
    return swap_tensor_pair(r, r, rep);
}

SixWeights to_six(const LinkStateCoeffs& x) { return {x.a, x.b, x.c, x.d, x.d, x.c}; }

LinkStateCoeffs from_six(const SixWeights& r) {
    return LinkStateCoeffs::make(r[0], r[1], 0.5 * (r[2] + r[5]), 0.5 * (r[3] + r[4]));
}

LinkStateCoeffs swap_pair(const LinkStateCoeffs& left, const LinkStateCoeffs& right,
                          const RepeaterCoeffs& rep) {
    SixWeights l = to_six(left);
    SixWeights r = to_six(right);
    for (double& x : l) x /= left.s;
    for (double& x : r) x /= right.s;
    return from_six(swap_tensor_pair(l, r, rep));
}

double logistic_solution(double w1, double wr, int i) {
    if (i < 1) throw ParamError("logistic_solution: level must be >= 1");
    const double mu = 1.0 - 2.0 * wr;
    const double k = std::ldexp(1.0, i - 1);
    return 0.5 * (1.0 - std::pow(mu * (1.0 - 2.0 * w1), k) / mu);
}

double logistic_iterate(double w1, double wr, int i) {
    if (i < 1) throw ParamError("logistic_iterate: level must be >= 1");
    double w = w1;
    for (int level = 1; level < i; ++level) {
        w = wr + 2.0 * (1.0 - 2.0 * wr) * w * (1.0 - w);
    }
    return w;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

// log((1 - x)/(1 + x)) without cancellation for small x.
double log_ratio(double x) { return std::log1p(-x) - std::log1p(x); }

}  // namespace

LinkStateCoeffs closed_form_coeffs(const SystemParams& params, const ChainConfig& chain, int i) {
    if (i < 1) throw ParamError("closed_form_coeffs: level must be >= 1");
    const ElementaryCoeffs e = elementary_coeffs(params, chain);
    if (i == 1) return e.state();

    const RepeaterCoeffs r = repeater_coeffs(params);
    const double s = r.s();
    const double k = std::ldexp(1.0, i - 1);
    const double er = 2.0 * r.w_r();
    const double e1 = 2.0 * e.w1();

    // z_i = s^2/(a+b) * ((1+2w1)(1+2wr))^{-K}, with s/(a+b) = 1 + 2wr.
    const double log_z_over_s = std::log1p(er) - k * (std::log1p(er) + std::log1p(e1));
    const double z = s * std::exp(log_z_over_s);

    // (a_i - b_i)/z_i = ((a-b)/(a+b))^{i-1} (a_e-b_e)/(a_e+b_e)
    const double log_pol = (i - 1) * log_ratio(r.b / r.a) + log_ratio(e.b_e / e.a_e);
    const double b_i = -0.5 * z * std::expm1(log_pol);
    const double a_i = z - b_i;

    // The [(1-2wr)(1-2w1)]^K z_i / ((1-2wr) s) term collapses to (t_r t_e)^K / t_r.
    const double log_tr = log_ratio(er);
    const double log_te = log_ratio(e1);
    const double c_i = -0.25 * s * std::expm1(k * (log_tr + log_te) - log_tr);

    // d_i = s/4 [1 + (t_r t_e)^K / t_r] - z_i/2, regrouped so the leading terms cancel
    // analytically: s/4 [expm1(beta)^2 + e^{2 beta} expm1(gamma)].
    const double beta = log_z_over_s;
    const double gamma = (k - 1.0) * std::log1p(-er * er) + k * std::log1p(-e1 * e1);
    const double em = std::expm1(beta);
    const double d_i = 0.25 * s * (em * em + std::exp(2.0 * beta) * std::expm1(gamma));

    return {a_i, b_i, c_i, d_i, s};
}

LinkStateCoeffs chain_state(const SystemParams& params, const ChainConfig& chain) {
    chain.validate();
    const LinkStateCoeffs elem = elementary_coeffs(params, chain).state();
    const RepeaterCoeffs rep = repeater_coeffs(params);
    LinkStateCoeffs st = elem;
    if (is_power_of_two(chain.n_links)) {
        for (int n = chain.n_links; n > 1; n /= 2) {
            st = swap_step(st, rep);
        }
    } else {
        for (int k = 1; k < chain.n_links; ++k) {
            st = swap_pair(st, elem, rep);
        }
    }
    return st;
}

double qber_from_t(double t_e, double t_r, double t_d, int n_links) {
    return 0.5 * (1.0 - (t_d / t_r) * std::pow(t_r * t_e, n_links));
}

double qber(const SystemParams& params, const ChainConfig& chain) {
    const ElementaryCoeffs e = elementary_coeffs(params, chain);
    const RepeaterCoeffs r = repeater_coeffs(params);
    return qber_from_t(e.t_e(), r.t_r(), sift_model(params).t_d(), chain.n_links);
}

double qber_from_state(const LinkStateCoeffs& state, const SiftModel& sift) {
    return 0.5 * (1.0 - sift.t_d() * (1.0 - 2.0 * state.zeta()));
}

double multiplexed_link_success(double p_s0, int m_modes) {
    if (p_s0 >= 1.0) return 1.0;
    return -std::expm1(m_modes * std::log1p(-p_s0));
}

double success_probability(const SystemParams& params, const ChainConfig& chain) {
    const ElementaryCoeffs e = elementary_coeffs(params, chain);
    const RepeaterCoeffs r = repeater_coeffs(params);
    const int n = chain.n_links;
    const double p = std::pow(r.p_swap(), n - 1) *
                     std::pow(multiplexed_link_success(e.p_s0(), params.m_modes), n);
    return std::clamp(p, 0.0, 1.0);
}

double bb84_key_fraction(double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error("bb84_key_fraction: QBER outside [0,1]");
    }
    return std::max(0.0, 1.0 - 2.0 * binary_entropy(q));
}

double secret_key_rate(const SystemParams& params, const ChainConfig& chain) {
    const double q = qber(params, chain);
    return sift_model(params).p1() * success_probability(params, chain) * bb84_key_fraction(q) /
           (2.0 * params.t_q_seconds);
}

double max_range_qkd(const SystemParams& params, int n_links) {
    if (n_links < 1) throw ParamError("n_links: must be >= 1");
    const double pe = params.p_dark_e;
    if (pe == 0.0) return kUnbounded;
    const double t_r = repeater_coeffs(params).t_r();
    const double t_d = sift_model(params).t_d();
    const double q_th = q_threshold();
    const double h = 1.0 + t_r / std::pow((1.0 - 2.0 * q_th) * t_r / t_d, 1.0 / n_links);
    const double u = 1.0 - 2.0 * pe;
    const double arg =
        params.eta_e * params.p1 * (std::sqrt(2.0 * u * h) - 2.0 * u) / (4.0 * pe);
    if (!(arg > 0.0)) return 0.0;
    return std::max(0.0, 20.0 * n_links / params.alpha_db_per_km * std::log10(arg));
}

double max_range_qkd_bisect(const SystemParams& params, int n_links) {
    const double q_th = q_threshold();
    auto excess = [&](double l) { return qber(params, {l, n_links}) - q_th; };
    if (excess(0.0) >= 0.0) return 0.0;
    // Without link-center dark clicks the QBER does not depend on L.
    if (params.p_dark_e == 0.0) return kUnbounded;
    if (excess(kMaxSearchRangeKm) < 0.0) return kUnbounded;
    return bisect(excess, 0.0, kMaxSearchRangeKm, kRangeTolKm);
}

double approx_max_range(const SystemParams& params, int n_links) {
    if (n_links < 1) throw ParamError("n_links: must be >= 1");
    const double pe = params.p_dark_e;
    if (pe == 0.0) return kUnbounded;
    const double q_th = q_threshold();
    const double num = std::sqrt(2.0 * (1.0 + std::pow(1.0 - 2.0 * q_th, -1.0 / n_links))) - 2.0;
    return 20.0 * n_links / params.alpha_db_per_km * std::log10(num / (4.0 * pe));
}

double fidelity(const SystemParams& params, const ChainConfig& chain) {
    return chain_state(params, chain).fidelity();
}

double hashing_bound(const LinkStateCoeffs& x) {
    const double s = x.s;
    return 1.0 - shannon_entropy({x.c / s, x.c / s, (x.a + x.d) / s, (x.b + x.d) / s});
}

double distillation_rate(const SystemParams& params, const ChainConfig& chain) {
    const double info = hashing_bound(chain_state(params, chain));
    return success_probability(params, chain) * std::max(info, 0.0) / params.t_q_seconds;
}

double max_range_distillation(const SystemParams& params, int n_links) {
    if (n_links < 1) throw ParamError("n_links: must be >= 1");
    auto info = [&](double l) { return hashing_bound(chain_state(params, {l, n_links})); };
    if (info(0.0) <= 0.0) return 0.0;
    if (params.p_dark_e == 0.0) return kUnbounded;
    if (info(kMaxSearchRangeKm) > 0.0) return kUnbounded;
    return bisect(info, 0.0, kMaxSearchRangeKm, kRangeTolKm);
}

}  // namespace repeater

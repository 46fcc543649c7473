#pragma once

#include <array>

#include "repeater/core_params.hpp"

namespace repeater {

/// Click probabilities of a noisy detector for one (A) and two (B) photons.
struct DetectorDerived {
    double A;
    double B;
};

DetectorDerived detector_derived(double p_dark, double eta_eff);

/// Heralded-state weights of a linear-optic BSM with dark probability P and
/// effective efficiency eta (channel and memory losses already folded in).
struct BsmWeights {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double s() const { return a + b + 2.0 * c; }
    double w() const { return c / (a + b); }
    double t() const { return (1.0 - 2.0 * w()) / (1.0 + 2.0 * w()); }
};

BsmWeights bsm_weights(double p_dark, double eta_eff);

/// Unnormalized Bell-diagonal-like two-qubit state:
///   (1/s)[a M+ + b M- + c(|01,01> + |10,10>) + d(|01,10> + |10,01>)]
/// in projector form, with s = a + b + 2(c + d).
struct LinkStateCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double s = 0.0;

    static LinkStateCoeffs make(double a, double b, double c, double d);

    /// Throws ParamError on negative weights, s <= 0, or a stale s.
    void validate() const;

    double fidelity() const { return (a + d) / s; }
    /// Fraction of classical-correlation weight, 2c/s.
    double zeta() const { return 2.0 * c / s; }
};

struct RepeaterCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double s() const { return a + b + 2.0 * c; }
    double w_r() const { return c / (a + b); }
    double t_r() const { return (1.0 - 2.0 * w_r()) / (1.0 + 2.0 * w_r()); }
    /// Probability that one swap succeeds, 4s.
    double p_swap() const { return 4.0 * s(); }
};

struct ElementaryCoeffs {
    double a_e = 0.0;
    double b_e = 0.0;
    double c_e = 0.0;

    double s1() const { return a_e + b_e + 2.0 * c_e; }
    double w1() const { return c_e / (a_e + b_e); }
    double t_e() const { return (1.0 - 2.0 * w1()) / (1.0 + 2.0 * w1()); }
    /// Single-frequency heralding probability 4 s_1.
    double p_s0() const { return 4.0 * s1(); }
    LinkStateCoeffs state() const { return LinkStateCoeffs::make(a_e, b_e, c_e, 0.0); }
};

struct SiftModel {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double a_d = 0.0;

    /// Probability that both parties see a usable click pattern.
    double p1() const {
        const double q = q1 + q2 + q3;
        return q * q;
    }
    double t_d() const {
        const double r = (q1 - q2) / (q1 + q2 + q3);
        return r * r;
    }
};

/// Effective efficiency at an elementary-link center: eta_e * lambda * p1.
double elementary_efficiency(const SystemParams& params, const ChainConfig& chain);

ElementaryCoeffs elementary_coeffs(const SystemParams& params, const ChainConfig& chain);
RepeaterCoeffs repeater_coeffs(const SystemParams& params);
SiftModel sift_model(const SystemParams& params);

/// One hierarchical swap of two copies of prev.
LinkStateCoeffs swap_step(const LinkStateCoeffs& prev, const RepeaterCoeffs& rep);

/// Six-weight representation (M+, M-, |01,01>, |01,10>, |10,01>, |10,10>).
using SixWeights = std::array<double, 6>;
/// C[j][k][l], zero-based.
using SwapTensor = std::array<std::array<SixWeights, 6>, 6>;

SwapTensor swap_tensor(const RepeaterCoeffs& rep);

/// r_out[l] = sum_{j,k} C[j][k][l] left[j] right[k]; raw bilinear, no normalization.
SixWeights swap_tensor_pair(const SixWeights& left, const SixWeights& right,
                            const RepeaterCoeffs& rep);
/// Tensor step on two copies of r.
SixWeights full_swap_tensor_step(const SixWeights& r, const RepeaterCoeffs& rep);

SixWeights to_six(const LinkStateCoeffs& x);
/// Collapses r3=r6 -> c, r4=r5 -> d (averaging the pairs).
LinkStateCoeffs from_six(const SixWeights& r);

/// Swap of two different link states; each input is normalized by its own s.
LinkStateCoeffs swap_pair(const LinkStateCoeffs& left, const LinkStateCoeffs& right,
                          const RepeaterCoeffs& rep);

/// Closed-form solution of w_{i+1} = wr + 2(1-2wr) w_i (1-w_i).
double logistic_solution(double w1, double wr, int i);
/// Direct iteration of the same map from w1 to level i.
double logistic_iterate(double w1, double wr, int i);

/// Explicit level-i coefficients for 2^{i-1} links of length L/N each.
LinkStateCoeffs closed_form_coeffs(const SystemParams& params, const ChainConfig& chain, int i);

/// End-to-end state: hierarchical swap_step for N = 2^n, sequential
/// left-to-right swap_pair otherwise.
LinkStateCoeffs chain_state(const SystemParams& params, const ChainConfig& chain);

/// Q(N) = 1/2 [1 - (t_d/t_r)(t_r t_e)^N].
double qber_from_t(double t_e, double t_r, double t_d, int n_links);
double qber(const SystemParams& params, const ChainConfig& chain);
/// Q = 1/2 [1 - t_d (1 - 2 zeta)] with zeta = 2c/s, evaluated on a state.
double qber_from_state(const LinkStateCoeffs& state, const SiftModel& sift);

/// Elementary-link success with M-fold frequency multiplexing.
double multiplexed_link_success(double p_s0, int m_modes);
double success_probability(const SystemParams& params, const ChainConfig& chain);

/// Asymptotic BB84 key fraction 1 + 2(1-Q)log2(1-Q) + 2Q log2 Q, clamped at 0.
double bb84_key_fraction(double q);

double secret_key_rate(const SystemParams& params, const ChainConfig& chain);

/// Closed-form maximum QKD range in km; kUnbounded when P_e = 0.
double max_range_qkd(const SystemParams& params, int n_links);
/// Same quantity by bisection of Q(N; L) = Q_th on [0, 1e5] km.
double max_range_qkd_bisect(const SystemParams& params, int n_links);
/// First-order small-noise approximation of the maximum QKD range.
double approx_max_range(const SystemParams& params, int n_links);

double fidelity(const SystemParams& params, const ChainConfig& chain);
/// I = 1 - H(c/s, c/s, (a+d)/s, (b+d)/s), may be negative.
double hashing_bound(const LinkStateCoeffs& coeffs);
double distillation_rate(const SystemParams& params, const ChainConfig& chain);
/// Root of I(L) = 0 to 1e-6 km; kUnbounded if I stays positive up to 1e5 km.
double max_range_distillation(const SystemParams& params, int n_links);

inline constexpr double kMaxSearchRangeKm = 1e5;
inline constexpr double kRangeTolKm = 1e-6;

bool is_power_of_two(int n);

}  // namespace repeater

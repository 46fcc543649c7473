#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>

namespace repeater {

/// Raised when a parameter set or chain configuration is out of range.
class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numeric procedure (bracketing, truncation) cannot complete.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Loss in dB to a power transmittance, 10^(-x/10).
double db_to_linear(double x_db);
double linear_to_db(double transmittance);

/// h2(x) in bits with 0*log(0) = 0. Throws std::domain_error outside [0,1].
double binary_entropy(double x);

/// Shannon entropy in bits of a probability vector (zeros contribute 0).
double shannon_entropy(std::initializer_list<double> probs);

/// Solves h2(Q) = 1/2 on (0, 1/2) by bisection.
double solve_q_threshold();

/// Cached solve_q_threshold().
double q_threshold();

/// Plain bisection for a sign change of f on [lo, hi]. Requires f(lo), f(hi)
/// of opposite signs (or one of them zero); stops when the bracket is
/// narrower than tol.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iter = 400);

/// Device loss, noise and clock parameters of the whole chain.
///
/// Efficiencies and probabilities are dimensionless; lambda_m is stored
/// linear; alpha is in dB/km; t_q in seconds.
struct SystemParams {
    double eta_e = 0.9;
    double eta_r = 0.9;
    double eta_d = 0.9;
    double p_dark_e = 0.0;
    double p_dark_r = 0.0;
    double p_dark_d = 0.0;
    double lambda_m = 1.0;
    double alpha_db_per_km = 0.15;
    int m_modes = 1;
    double t_q_seconds = 50e-9;
    double p1 = 1.0;
    double p2 = 0.0;

    /// Throws ParamError naming the first offending field.
    void validate() const;

    /// Returns a validated copy; the usual way to build a parameter set.
    static SystemParams checked(SystemParams p);

    bool dark_free() const { return p_dark_e == 0.0 && p_dark_r == 0.0 && p_dark_d == 0.0; }

    /// Same parameters with every dark-click probability set to P.
    SystemParams with_dark(double p) const;
};

/// Total Alice-to-Bob range and number of elementary links.
struct ChainConfig {
    double total_range_km = 0.0;
    int n_links = 1;

    void validate() const;

    double elementary_length_km() const { return total_range_km / n_links; }
    /// Transmittance of half an elementary link, 10^(-alpha L / 2N / 10).
    double half_link_transmittance(double alpha_db_per_km) const;
    /// End-to-end fiber transmittance, 10^(-alpha L / 10).
    double end_to_end_transmittance(double alpha_db_per_km) const;
};

/// Baseline device set: P = 3e-5 everywhere, eta = 0.9, lambda_m = 1 dB,
/// M = 1000, alpha = 0.15 dB/km, T_q = 50 ns, ideal single-pair source.
SystemParams preset_fig4();

/// Same devices with P = 1e-6 and a probabilistic source p1 = 0.9.
SystemParams preset_fig8();

/// Looks up "fig4" / "fig8"; throws ParamError for anything else.
SystemParams preset_by_name(const std::string& name);

/// Range L at which the end-to-end transmittance equals eta.
double range_for_transmittance(double eta, double alpha_db_per_km);

}  // namespace repeater

#pragma once

#include <vector>

#include "repeater/core_params.hpp"
#include "repeater/rate_curve.hpp"

namespace repeater {

/// Plateau / linear-in-transmittance / zero upper bound on R_N(L).
struct ThreePieceBound {
    int n_links = 1;
    double A = 0.0;          // eta_d^2 / (eta_r^2 lambda_m^2 T_q)
    double B = 0.0;          // eta_r^2 lambda_m^2 eta_e^2 M / 4
    double r_max = 0.0;      // A (eta_r^2 lambda_m^2 / 2)^N
    double eta_prime = 0.0;  // (2 / (M eta_e^2))^N
    double l_prime = 0.0;    // km
    double l_max = 0.0;      // km, kUnbounded without link-center dark clicks

    double slope() const;
    double operator()(double length_km, double alpha_db_per_km) const;
};

ThreePieceBound three_piece_bound(const SystemParams& params, int n_links);
double three_piece_value(const SystemParams& params, int n_links, double length_km);

/// log(eta_r^2 lambda_m^2 / 2) / log(2 / (M eta_e^2)); throws std::domain_error
/// unless both logs are negative.
double exponent_t(const SystemParams& params);

struct XiSolution {
    double xi = 0.0;
    double z = 0.0;
    double residual = 0.0;
    int sign_changes = 0;
};

/// Residual of the transcendental equation whose root in (0,1) fixes xi.
double xi_residual(const SystemParams& params, double z);
/// Solves for the exact zero-dark-click envelope exponent. Throws
/// NumericError (with the scanned sign profile) if no sign change is found.
XiSolution exponent_xi(const SystemParams& params);

struct EnvelopeOptions {
    /// Fit window; a negative lower bound means "first corner of N = 1".
    double fit_l_min = -1.0;
    double fit_l_max = kUnbounded;
};

struct EnvelopeResult {
    RateCurve curve;
    /// Optimal link count per grid point, 0 where every candidate rate is 0.
    std::vector<int> n_star;
    double fit_exponent = 0.0;
    double fit_prefactor = 0.0;
    int fit_points = 0;
};

/// Max over candidate N of secret_key_rate at each L, plus a least-squares
/// fit of log R against log eta over the fit window.
EnvelopeResult numeric_envelope(const SystemParams& params, const std::vector<double>& l_grid,
                                const std::vector<int>& n_candidates,
                                const EnvelopeOptions& opts = {});

double envelope_rate(const SystemParams& params, const std::vector<int>& n_candidates,
                     double length_km);

/// Repeaterless capacity over M modes: M log2((1+eta)/(1-eta)) / T_q.
double tgw_rate(double eta, int m_modes, double t_q);
/// Ideal parallel BB84 over M modes: eta M / T_q.
double ideal_bb84_rate(double eta, int m_modes, double t_q);

/// Smallest L in [l_lo, l_hi] beyond which the envelope stays above the
/// M-mode TGW rate, located on a 1 km scan and refined by bisection.
/// Returns NaN if there is no crossing in the window.
double tgw_crossover_km(const SystemParams& params, const std::vector<int>& n_candidates,
                        double l_lo, double l_hi);

/// Default candidate set {1, 2, 4, ..., 1024}.
std::vector<int> power_of_two_candidates(int max_n = 1024);

/// Ordinary least squares y = c0 + c1 x; returns {c0, c1}.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace repeater

#include "repeater/core_params.hpp"

#include <sstream>

namespace repeater {

double db_to_linear(double x_db) {
    if (!std::isfinite(x_db)) {
        throw ParamError("db_to_linear: loss must be finite");
    }
    return std::pow(10.0, -x_db / 10.0);
}

double linear_to_db(double transmittance) {
    if (!(transmittance > 0.0)) {
        throw ParamError("linear_to_db: transmittance must be positive");
    }
    return -10.0 * std::log10(transmittance);
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("binary_entropy: argument outside [0,1]");
    }
    if (x == 0.0 || x == 1.0) {
        return 0.0;
    }
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double shannon_entropy(std::initializer_list<double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iter) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0.0) == (f_hi < 0.0)) {
        std::ostringstream msg;
        msg << "bisect: no sign change on [" << lo << ", " << hi << "] (f = " << f_lo << ", "
            << f_hi << ")";
        throw NumericError(msg.str());
    }
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double solve_q_threshold() {
    // h2 is increasing on [0, 1/2], so the bracket holds a single root.
    return bisect([](double q) { return binary_entropy(q) - 0.5; }, 1e-9, 0.5, 1e-16);
}

double q_threshold() {
    static const double q = solve_q_threshold();
    return q;
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) {
        throw ParamError(std::string(field) + ": " + what);
    }
}

bool efficiency(double x) { return x > 0.0 && x <= 1.0; }
bool dark(double x) { return x >= 0.0 && x < 1.0; }

}  // namespace

void SystemParams::validate() const {
    require(efficiency(eta_e), "eta_e", "must lie in (0,1]");
    require(efficiency(eta_r), "eta_r", "must lie in (0,1]");
    require(efficiency(eta_d), "eta_d", "must lie in (0,1]");
    require(dark(p_dark_e), "p_dark_e", "must lie in [0,1)");
    require(dark(p_dark_r), "p_dark_r", "must lie in [0,1)");
    require(dark(p_dark_d), "p_dark_d", "must lie in [0,1)");
    require(efficiency(lambda_m), "lambda_m", "must lie in (0,1]");
    require(alpha_db_per_km > 0.0 && std::isfinite(alpha_db_per_km), "alpha_db_per_km",
            "must be positive");
    require(m_modes >= 1, "m_modes", "must be >= 1");
    require(t_q_seconds > 0.0 && std::isfinite(t_q_seconds), "t_q_seconds", "must be positive");
    require(p1 >= 0.0 && p1 <= 1.0, "p1", "must lie in [0,1]");
    require(p2 >= 0.0 && p2 <= 1.0, "p2", "must lie in [0,1]");
    require(p1 + p2 <= 1.0 + 1e-15, "p1+p2", "must not exceed 1");
}

SystemParams SystemParams::checked(SystemParams p) {
    p.validate();
    return p;
}

SystemParams SystemParams::with_dark(double p) const {
    SystemParams out = *this;
    out.p_dark_e = out.p_dark_r = out.p_dark_d = p;
    return checked(out);
}

void ChainConfig::validate() const {
    require(total_range_km >= 0.0 && std::isfinite(total_range_km), "total_range_km",
            "must be finite and >= 0");
    require(n_links >= 1, "n_links", "must be >= 1");
}

double ChainConfig::half_link_transmittance(double alpha_db_per_km) const {
    return db_to_linear(alpha_db_per_km * total_range_km / (2.0 * n_links));
}

double ChainConfig::end_to_end_transmittance(double alpha_db_per_km) const {
    return db_to_linear(alpha_db_per_km * total_range_km);
}

SystemParams preset_fig4() {
    SystemParams p;
    p.eta_e = p.eta_r = p.eta_d = 0.9;
    p.p_dark_e = p.p_dark_r = p.p_dark_d = 3e-5;
    p.lambda_m = db_to_linear(1.0);
    p.alpha_db_per_km = 0.15;
    p.m_modes = 1000;
    p.t_q_seconds = 50e-9;
    p.p1 = 1.0;
    p.p2 = 0.0;
    return SystemParams::checked(p);
}

SystemParams preset_fig8() {
    SystemParams p = preset_fig4();
    p.p_dark_e = p.p_dark_r = p.p_dark_d = 1e-6;
    p.p1 = 0.9;
    return SystemParams::checked(p);
}

SystemParams preset_by_name(const std::string& name) {
    if (name == "fig4") return preset_fig4();
    if (name == "fig8") return preset_fig8();
    throw ParamError("unknown preset '" + name + "' (expected fig4 or fig8)");
}

double range_for_transmittance(double eta, double alpha_db_per_km) {
    return linear_to_db(eta) / alpha_db_per_km;
}

}  // namespace repeater

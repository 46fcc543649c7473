#include <doctest.h>

#include "approx.hpp"

#include <cmath>

#include "repeater/analytic_chain.hpp"
#include "repeater/phenomenology.hpp"

using namespace repeater;

// Reference sensitivities of the fig8 chain to two-pair emission. The
// simulator's leading-order QBER is checked against an independent herald
// count in test_fock_sim; these targets sit well below what it predicts.

namespace {

std::vector<double> p2_grid(double hi, int points) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(hi * i / (points - 1));
    return g;
}

double range_at(SystemParams p, int n, double p2) {
    p.p2 = p2;
    auto gap = [&](double l) { return simulate_chain(p, {l, n}).q - q_threshold(); };
    return bisect(gap, 10.0, 1500.0, 0.05);
}

}  // namespace

TEST_CASE("elementary link: 1 - 2Q_1 falls as p2/2") {
    const ElementaryQberFit fit = elementary_qber_model(preset_fig8(), 50.0, p2_grid(0.02, 6));
    CAPTURE(fit.fit_slope);
    CHECK(fit.fit_slope == rel_approx(-0.5).epsilon(0.15));
    CHECK(fit.bound_holds);
}

TEST_CASE("propagation prefactor C falls as 4 p2") {
    const QberScan s = qber_ratio_scan(preset_fig8(), 50.0, 4, p2_grid(0.02, 6));
    CAPTURE(s.fit_slope);
    CHECK(s.fit_slope == rel_approx(-4.0).epsilon(0.10));
}

TEST_CASE("prefactor offset at p2 = 0") {
    const SystemParams p = preset_fig8();
    const double eps = 1.0 - repeater_coeffs(p).t_r() / sift_model(p).t_d();
    CAPTURE(eps);
    CHECK(eps == rel_approx(1.39e-5).epsilon(0.05));
}

TEST_CASE("two-link range is flat from p2 = 0.001 to 0.019") {
    const SystemParams p = preset_fig8();
    const double lo = range_at(p, 2, 0.001);
    const double hi = range_at(p, 2, 0.019);
    CAPTURE(lo);
    CAPTURE(hi);
    CHECK(std::abs(lo - hi) / lo < 0.02);
}

TEST_CASE("rate below the crash threshold stays at its p2 = 0 level") {
    SystemParams p = preset_fig8();
    const ChainConfig mid{300.0, 2};
    const double base = secret_key_rate(p, mid);
    const double th = p2_threshold(p, 2, 10.0);
    for (double p2 : {0.001, 0.5 * th, 0.9 * th}) {
        p.p2 = p2;
        const double r = simulate_chain(p, mid).rate_bits_per_s;
        CAPTURE(p2);
        CAPTURE(r / base);
        CHECK(std::abs(r - base) / base < 0.05);
    }
}

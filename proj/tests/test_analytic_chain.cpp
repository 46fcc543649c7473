#include <doctest.h>

#include "approx.hpp"

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "repeater/analytic_chain.hpp"

using namespace repeater;

namespace {

SystemParams ideal_params() {
    SystemParams p;
    p.eta_e = p.eta_r = p.eta_d = 1.0;
    p.lambda_m = 1.0;
    p.m_modes = 1;
    p.t_q_seconds = 1.0;
    return SystemParams::checked(p);
}

/// Parameters of the maximum-range table: link-center and repeater dark
/// clicks at 3e-5, noiseless end detectors.
SystemParams range_table_params() {
    SystemParams p = preset_fig4();
    p.p_dark_d = 0.0;
    return SystemParams::checked(p);
}

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> eff(0.5, 1.0);
    std::uniform_real_distribution<double> logp(-8.0, -3.0);
    std::uniform_int_distribution<int> modes(1, 2000);
    SystemParams p;
    p.eta_e = eff(rng);
    p.eta_r = eff(rng);
    p.eta_d = eff(rng);
    p.p_dark_e = std::pow(10.0, logp(rng));
    p.p_dark_r = std::pow(10.0, logp(rng));
    p.p_dark_d = std::pow(10.0, logp(rng));
    p.lambda_m = eff(rng);
    p.m_modes = modes(rng);
    p.alpha_db_per_km = 0.15;
    return SystemParams::checked(p);
}

double rel(double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

/// Largest relative deviation between two coefficient sets, on the scale of s.
double coeff_gap(const LinkStateCoeffs& x, const LinkStateCoeffs& y) {
    const double s = std::max(x.s, y.s);
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                     std::abs(x.d - y.d), std::abs(x.s - y.s)}) /
           s;
}

}  // namespace

TEST_CASE("detector_derived") {
    auto d = detector_derived(0.0, 0.9);
    CHECK(d.A == rel_approx(0.9).epsilon(1e-15));
    CHECK(d.B == rel_approx(0.99).epsilon(1e-15));
    d = detector_derived(3e-5, 1.0);
    CHECK(d.A == 1.0);
    CHECK(d.B == 1.0);
    d = detector_derived(3e-5, 0.5);
    CHECK(d.A == rel_approx(0.500015).epsilon(1e-14));
    CHECK(d.B == rel_approx(0.7500075).epsilon(1e-14));
    CHECK(d.A <= d.B);
}

// Independent route to the heralded elementary-link state: apply the
// four-detector POVM to the twelve-term post-beamsplitter state by hand.
TEST_CASE("BSM weights match a brute-force POVM on the swap state") {
    struct Term {
        double amp;
        std::array<int, 2> a;
        std::array<int, 4> det;  // b0 b1 c0 c1
        std::array<int, 2> d;
    };
    const double r2 = std::sqrt(2.0);
    const std::vector<Term> swap = {
        {1, {1, 0}, {1, 1, 0, 0}, {0, 1}},   {-1, {1, 0}, {0, 1, 1, 0}, {0, 1}},
        {r2, {1, 0}, {0, 2, 0, 0}, {1, 0}},  {1, {1, 0}, {1, 0, 0, 1}, {0, 1}},
        {-1, {1, 0}, {0, 0, 1, 1}, {0, 1}},  {-r2, {1, 0}, {0, 0, 0, 2}, {1, 0}},
        {r2, {0, 1}, {2, 0, 0, 0}, {0, 1}},  {1, {0, 1}, {1, 1, 0, 0}, {1, 0}},
        {-1, {0, 1}, {1, 0, 0, 1}, {1, 0}},  {-r2, {0, 1}, {0, 0, 2, 0}, {0, 1}},
        {1, {0, 1}, {0, 1, 1, 0}, {1, 0}},   {-1, {0, 1}, {0, 0, 1, 1}, {1, 0}},
    };
    for (double P : {0.0, 3e-5, 1e-3, 0.05}) {
        for (double eta : {0.3, 0.71, 1.0}) {
            auto coeff = [&](int n, bool click) {
                const double miss = (1.0 - P) * std::pow(1.0 - eta, n);
                return click ? 1.0 - miss : miss;
            };
            // Unnormalized a-d vectors, one per detector occupation pattern,
            // for a click on b0 and b1 only. Index = 2*a_rail1 + d_rail1.
            std::map<std::array<int, 4>, std::array<double, 4>> branches;
            for (const auto& t : swap) {
                const double f = coeff(t.det[0], true) * coeff(t.det[1], true) *
                                 coeff(t.det[2], false) * coeff(t.det[3], false);
                branches[t.det][2 * t.a[1] + t.d[1]] += 0.25 * t.amp * std::sqrt(f);
            }
            // Index 0 = |10,10>, 1 = |10,01>, 2 = |01,10>, 3 = |01,01>.
            double a = 0.0, b = 0.0, c_0101 = 0.0, c_1010 = 0.0, trace = 0.0;
            for (const auto& [n, v] : branches) {
                a += std::pow((v[1] + v[2]) / r2, 2);
                b += std::pow((v[1] - v[2]) / r2, 2);
                c_0101 += v[3] * v[3];
                c_1010 += v[0] * v[0];
                trace += v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
            }
            const BsmWeights w = bsm_weights(P, eta);
            CHECK(a == rel_approx(w.a).epsilon(1e-12));
            CHECK(b == rel_approx(w.b).epsilon(1e-12));
            CHECK(c_0101 == rel_approx(w.c).epsilon(1e-12));
            CHECK(c_1010 == rel_approx(w.c).epsilon(1e-12));
            CHECK(trace == rel_approx(w.s()).epsilon(1e-12));
        }
    }
}

TEST_CASE("elementary coefficients") {
    SystemParams p = preset_fig4();
    p.p_dark_e = 0.0;
    const ChainConfig chain{300.0, 3};
    const double x = p.eta_e * chain.half_link_transmittance(p.alpha_db_per_km);
    const ElementaryCoeffs e = elementary_coeffs(p, chain);
    CHECK(e.a_e == rel_approx(x * x / 8.0).epsilon(1e-14));
    CHECK(e.b_e == 0.0);
    CHECK(e.c_e == 0.0);
    CHECK(e.p_s0() == rel_approx(x * x / 2.0).epsilon(1e-14));
    CHECK(e.t_e() == 1.0);

    const ElementaryCoeffs ideal = elementary_coeffs(ideal_params(), {0.0, 1});
    CHECK(ideal.a_e == 0.125);
    CHECK(ideal.p_s0() == 0.5);
}

TEST_CASE("repeater coefficients") {
    SystemParams p = preset_fig4();
    p.p_dark_r = 0.0;
    const double x = p.eta_r * p.lambda_m;
    CHECK(repeater_coeffs(p).p_swap() == rel_approx(x * x / 2.0).epsilon(1e-14));
    CHECK(repeater_coeffs(ideal_params()).s() == 0.125);

    const RepeaterCoeffs r = repeater_coeffs(preset_fig4());
    CHECK(std::isfinite(r.w_r()));
    CHECK(r.t_r() < 1.0);
    CHECK(r.w_r() == rel_approx(5.3926066313885432e-05).epsilon(1e-12));
    CHECK(r.t_r() == rel_approx(0.99978431899640052).epsilon(1e-14));
}

TEST_CASE("swap_step") {
    const RepeaterCoeffs ideal = repeater_coeffs(ideal_params());
    const LinkStateCoeffs bell = LinkStateCoeffs::make(0.3, 0.0, 0.0, 0.0);
    const LinkStateCoeffs out = swap_step(bell, ideal);
    CHECK(out.b == 0.0);
    CHECK(out.c == 0.0);
    CHECK(out.d == 0.0);
    CHECK(out.fidelity() == 1.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const LinkStateCoeffs prev = LinkStateCoeffs::make(u(rng), u(rng), u(rng), u(rng));
        const RepeaterCoeffs rep = repeater_coeffs(random_params(rng));
        const LinkStateCoeffs next = swap_step(prev, rep);
        CHECK_NOTHROW(next.validate());
        CHECK(next.s == rel_approx(rep.s()).epsilon(1e-12));
    }
}

TEST_CASE("the six-weight tensor reduces to swap_step") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const RepeaterCoeffs rep = repeater_coeffs(random_params(rng));
        const double c = u(rng), d = u(rng);
        const SixWeights r = {u(rng), u(rng), c, d, d, c};
        const SixWeights out = full_swap_tensor_step(r, rep);
        CHECK(out[2] == rel_approx(out[5]).epsilon(1e-14));
        CHECK(out[3] == rel_approx(out[4]).epsilon(1e-14));

        const LinkStateCoeffs x = from_six(r);
        const LinkStateCoeffs via_step = swap_step(x, rep);
        const double s2 = x.s * x.s;
        const LinkStateCoeffs via_tensor =
            LinkStateCoeffs::make(out[0] / s2, out[1] / s2, out[2] / s2, out[3] / s2);
        CHECK(coeff_gap(via_step, via_tensor) < 1e-14);
    }
    const SixWeights zero{};
    const SixWeights z = full_swap_tensor_step(zero, repeater_coeffs(preset_fig4()));
    for (double v : z) CHECK(v == 0.0);
}

// The tensor's M+/M- output follows the right-hand input only, so swap_pair is
// order-dependent in (a, b); the c weight, a + b and s are not.
TEST_CASE("swap_pair agrees with swap_step on equal inputs") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const RepeaterCoeffs rep = repeater_coeffs(random_params(rng));
        const LinkStateCoeffs x = LinkStateCoeffs::make(u(rng), u(rng), u(rng), u(rng));
        const LinkStateCoeffs y = LinkStateCoeffs::make(u(rng), u(rng), u(rng), u(rng));
        const LinkStateCoeffs xy = swap_pair(x, y, rep);
        const LinkStateCoeffs yx = swap_pair(y, x, rep);
        CHECK(xy.c == rel_approx(yx.c).epsilon(1e-13));
        CHECK(xy.d == rel_approx(yx.d).epsilon(1e-13));
        CHECK(xy.a + xy.b == rel_approx(yx.a + yx.b).epsilon(1e-13));
        CHECK(coeff_gap(swap_pair(x, x, rep), swap_step(x, rep)) < 1e-14);
        CHECK(swap_pair(x, y, rep).s == rel_approx(rep.s()).epsilon(1e-12));
    }
}

TEST_CASE("logistic map closed form") {
    for (int i = 1; i <= 10; ++i) CHECK(logistic_solution(0.5, 0.2, i) == rel_approx(0.5));
    for (int i = 1; i <= 10; ++i) {
        const double w1 = 0.07;
        CHECK(logistic_solution(w1, 0.0, i) ==
              rel_approx(0.5 * (1.0 - std::pow(1.0 - 2.0 * w1, std::pow(2.0, i - 1))))
                  .epsilon(1e-13));
    }
    for (int i = 1; i <= 20; ++i) {
        CHECK(std::abs(logistic_solution(0.03, 0.01, i) - logistic_iterate(0.03, 0.01, i)) < 1e-12);
    }
    // Plain iteration written out here, independent of logistic_iterate.
    double w = 0.03;
    for (int i = 1; i <= 20; ++i) {
        CHECK(std::abs(logistic_iterate(0.03, 0.01, i) - w) < 1e-15);
        w = 0.01 + 2.0 * (1.0 - 2.0 * 0.01) * w * (1.0 - w);
    }
}

TEST_CASE("closed-form coefficients") {
    const SystemParams clean = preset_fig4().with_dark(0.0);
    for (int i = 1; i <= 6; ++i) {
        const LinkStateCoeffs x = closed_form_coeffs(clean, {400.0, 1 << (i - 1)}, i);
        CHECK(x.a > 0.0);
        CHECK(x.b == 0.0);
        CHECK(x.c == 0.0);
        CHECK(x.d == 0.0);
    }

    const SystemParams f = preset_fig4();
    const ChainConfig chain{800.0, 32};
    const ElementaryCoeffs e = elementary_coeffs(f, chain);
    const LinkStateCoeffs first = closed_form_coeffs(f, chain, 1);
    CHECK(first.a == e.a_e);
    CHECK(first.b == e.b_e);
    CHECK(first.c == e.c_e);
    CHECK(first.d == 0.0);

    const RepeaterCoeffs rep = repeater_coeffs(f);
    LinkStateCoeffs it = e.state();
    for (int i = 2; i <= 6; ++i) {
        it = swap_step(it, rep);
        CHECK(coeff_gap(it, closed_form_coeffs(f, chain, i)) < 1e-12);
    }
}

TEST_CASE("closed form equals the recursion across random parameters") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> len(0.0, 3000.0);
    for (int k = 0; k < 100; ++k) {
        const SystemParams p = random_params(rng);
        const ChainConfig chain{len(rng), 2048};
        const RepeaterCoeffs rep = repeater_coeffs(p);
        LinkStateCoeffs it = elementary_coeffs(p, chain).state();
        for (int i = 2; i <= 12; ++i) {
            it = swap_step(it, rep);
            const LinkStateCoeffs cf = closed_form_coeffs(p, chain, i);
            CHECK(rel(it.a, cf.a) < 1e-10);
            CHECK(rel(it.s, cf.s) < 1e-10);
            // b, c, d can be tiny; compare them on the scale of s.
            CHECK(coeff_gap(it, cf) < 1e-10);
        }
    }
}

TEST_CASE("sift model") {
    SystemParams p = preset_fig4();
    p.p_dark_d = 0.0;
    SiftModel s = sift_model(p);
    CHECK(s.q2 == 0.0);
    CHECK(s.q3 == 0.0);
    CHECK(s.p1() == rel_approx(0.81).epsilon(1e-15));
    CHECK(s.t_d() == 1.0);
    CHECK(sift_model(ideal_params()).p1() == 1.0);

    s = sift_model(preset_fig4());
    CHECK(s.p1() == rel_approx(0.81001079987399882).epsilon(1e-14));
    CHECK(s.t_d() == rel_approx(0.99992666869996294).epsilon(1e-14));
    CHECK(s.q1 + s.q2 + s.q3 == rel_approx(std::sqrt(s.p1())).epsilon(1e-15));
}

TEST_CASE("QBER") {
    const SystemParams clean = preset_fig4().with_dark(0.0);
    for (int n : {1, 2, 3, 7, 16}) CHECK(qber(clean, {500.0, n}) == 0.0);

    const SystemParams f = preset_fig4();
    const SiftModel sift = sift_model(f);
    for (int i = 1; i <= 6; ++i) {
        const ChainConfig chain{600.0, 1 << (i - 1)};
        CHECK(qber(f, chain) ==
              rel_approx(qber_from_state(closed_form_coeffs(f, chain, i), sift)).epsilon(1e-12));
    }
    // Sequential connection of non-power-of-two chains follows the same law.
    for (int n : {3, 5, 6, 7}) {
        const ChainConfig chain{600.0, n};
        CHECK(qber(f, chain) ==
              rel_approx(qber_from_state(chain_state(f, chain), sift)).epsilon(1e-12));
    }
}

TEST_CASE("error propagation law across random parameter sets") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> len(1.0, 2000.0);
    for (int k = 0; k < 100; ++k) {
        const SystemParams p = random_params(rng);
        const double le = len(rng) / 64.0;
        const double ratio = repeater_coeffs(p).t_r() / sift_model(p).t_d();
        for (int i = 1; i <= 10; ++i) {
            const double qi = qber(p, {le * (1 << (i - 1)), 1 << (i - 1)});
            const double qn = qber(p, {le * (1 << i), 1 << i});
            CHECK(std::abs((1.0 - 2.0 * qn) - ratio * std::pow(1.0 - 2.0 * qi, 2)) < 1e-12);
        }
    }
}

TEST_CASE("QBER is monotone in N and in each dark probability") {
    const SystemParams f = preset_fig4();
    // At fixed total range Q(N) is not monotone (shorter links get cleaner),
    // so N grows here with the elementary-link length held fixed.
    for (double le : {10.0, 100.0, 300.0}) {
        double prev = 0.0;
        for (int n = 1; n <= 40; ++n) {
            const double q = qber(f, {le * n, n});
            CHECK(q >= prev - 1e-15);
            prev = q;
        }
    }
    for (int field = 0; field < 3; ++field) {
        double prev = 0.0;
        for (double P = 0.0; P < 1e-3; P += 5e-5) {
            SystemParams p = f;
            (field == 0 ? p.p_dark_e : field == 1 ? p.p_dark_r : p.p_dark_d) = P;
            const double q = qber(p, {400.0, 4});
            CHECK(q >= prev);
            prev = q;
        }
    }
}

TEST_CASE("success probability") {
    const SystemParams f = preset_fig4();
    const ChainConfig one{250.0, 1};
    const double ps0 = elementary_coeffs(f, one).p_s0();
    CHECK(success_probability(f, one) ==
          rel_approx(1.0 - std::pow(1.0 - ps0, f.m_modes)).epsilon(1e-13));
    for (int n = 1; n <= 6; ++n) {
        CHECK(success_probability(ideal_params(), {0.0, n}) ==
              rel_approx(std::pow(0.5, 2 * n - 1)).epsilon(1e-14));
    }
    // Hierarchical form (1/4s)[4s(1-(1-4s_1)^M)]^N for N = 2^n.
    const ChainConfig eight{900.0, 8};
    const double s4 = repeater_coeffs(f).p_swap();
    const double ps1 = 1.0 - std::pow(1.0 - elementary_coeffs(f, eight).p_s0(), f.m_modes);
    CHECK(success_probability(f, eight) ==
          rel_approx(std::pow(s4 * ps1, 8) / s4).epsilon(1e-12));
    CHECK(multiplexed_link_success(0.0, 1000) == 0.0);
    CHECK(multiplexed_link_success(1.0, 3) == 1.0);
}

TEST_CASE("secret key rate") {
    // P_1 = 1, P_succ = 1/2, R_2 = 1, T_q = 1 s: P_1 P_succ R_2 / (2 T_q) = 1/4.
    CHECK(secret_key_rate(ideal_params(), {0.0, 1}) == rel_approx(0.25).epsilon(1e-15));
    CHECK(bb84_key_fraction(0.0) == 1.0);
    CHECK(std::abs(bb84_key_fraction(q_threshold())) < 1e-12);
    CHECK(bb84_key_fraction(0.2) == 0.0);

    const SystemParams f = preset_fig4();
    const double lmax = max_range_qkd(f, 2);
    CHECK(secret_key_rate(f, {lmax + 1.0, 2}) == 0.0);
    CHECK(secret_key_rate(f, {lmax - 1.0, 2}) > 0.0);
    CHECK(secret_key_rate(f, {600.0, 4}) == rel_approx(77293.938450967806).epsilon(1e-10));
}

TEST_CASE("maximum QKD range") {
    const SystemParams p = range_table_params();
    const std::array<double, 5> expected = {401.348506, 716.968025, 1267.801183, 2208.384453,
                                            3766.303608};
    const std::array<int, 5> links = {1, 2, 4, 8, 16};
    for (std::size_t k = 0; k < links.size(); ++k) {
        const double closed = max_range_qkd(p, links[k]);
        CHECK(closed == rel_approx(expected[k]).epsilon(1e-8));
        CHECK(std::abs(closed - max_range_qkd_bisect(p, links[k])) < 1e-5);
        CHECK(qber(p, {closed, links[k]}) == rel_approx(q_threshold()).epsilon(1e-9));
    }
    CHECK(std::isinf(max_range_qkd(p.with_dark(0.0), 4)));
    SystemParams quiet = p;
    double prev = 0.0;
    for (double P : {1e-4, 1e-6, 1e-8, 1e-10}) {
        quiet.p_dark_e = quiet.p_dark_r = P;
        const double l = max_range_qkd(quiet, 2);
        CHECK(l > prev);
        prev = l;
    }
}

TEST_CASE("first-order maximum range") {
    const SystemParams p = range_table_params();
    for (int n : {1, 2, 4}) {
        CHECK(rel(approx_max_range(p, n), max_range_qkd(p, n)) < 0.02);
    }
    SystemParams half = p;
    half.p_dark_e /= 2.0;
    for (int n : {1, 3, 8}) {
        CHECK(approx_max_range(half, n) - approx_max_range(p, n) ==
              rel_approx(20.0 * n / p.alpha_db_per_km * std::log10(2.0)).epsilon(1e-10));
    }
}

TEST_CASE("fidelity") {
    CHECK(fidelity(ideal_params(), {0.0, 4}) == 1.0);
    const SystemParams f = preset_fig4();
    const ChainConfig chain{1200.0, 16};
    const RepeaterCoeffs rep = repeater_coeffs(f);
    LinkStateCoeffs it = elementary_coeffs(f, chain).state();
    for (int k = 0; k < 4; ++k) it = swap_step(it, rep);
    CHECK(std::abs(fidelity(f, chain) - it.fidelity()) < 1e-12);
    CHECK(std::abs(closed_form_coeffs(f, chain, 5).fidelity() - it.fidelity()) < 1e-12);

    const SystemParams p = range_table_params();
    const std::array<double, 5> at_lmax = {0.834982, 0.860784, 0.873687, 0.880120, 0.883322};
    int idx = 0;
    for (int n : {1, 2, 4, 8, 16}) {
        CHECK(fidelity(p, {max_range_qkd(p, n), n}) == rel_approx(at_lmax[idx++]).epsilon(1e-5));
    }
}

TEST_CASE("hashing bound and distillation") {
    CHECK(hashing_bound(LinkStateCoeffs::make(1.0, 0.0, 0.0, 0.0)) == rel_approx(1.0));
    // c/s = (a+d)/s = (b+d)/s = 1/4.
    CHECK(hashing_bound(LinkStateCoeffs::make(0.25, 0.25, 0.25, 0.0)) == rel_approx(-1.0));

    const SystemParams ideal = preset_fig4().with_dark(0.0);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> len(0.0, 3000.0);
    std::uniform_int_distribution<int> nn(1, 20);
    for (int k = 0; k < 20; ++k) {
        const ChainConfig c{len(rng), nn(rng)};
        const double r = secret_key_rate(ideal, c);
        const double e = distillation_rate(ideal, c);
        CHECK(r == rel_approx(e * ideal.eta_d * ideal.eta_d / 2.0).epsilon(1e-12));
    }
    const SystemParams clean = ideal;
    CHECK(hashing_bound(chain_state(clean, {700.0, 4})) == rel_approx(1.0).epsilon(1e-15));
    CHECK(fidelity(clean, {700.0, 4}) == 1.0);

    const SystemParams f = preset_fig4();
    CHECK(distillation_rate(f, {max_range_distillation(f, 2) + 5.0, 2}) == 0.0);
}

TEST_CASE("maximum distillation range") {
    const SystemParams p = range_table_params();
    const std::array<double, 5> expected = {411.382490, 761.980368, 1389.189442, 2488.036836,
                                            4367.168786};
    int idx = 0;
    for (int n : {1, 2, 4, 8, 16}) {
        const double l = max_range_distillation(p, n);
        CHECK(l == rel_approx(expected[idx++]).epsilon(1e-8));
        CHECK(l >= max_range_qkd(p, n));
        CHECK(std::abs(hashing_bound(chain_state(p, {l, n}))) < 1e-8);
    }
    CHECK(std::isinf(max_range_distillation(p.with_dark(0.0), 2)));
}

TEST_CASE("chain_state matches closed form for power-of-two chains") {
    const SystemParams f = preset_fig4();
    for (int n : {1, 2, 4, 8, 16}) {
        const ChainConfig chain{1000.0, n};
        const int level = static_cast<int>(std::log2(n)) + 1;
        CHECK(coeff_gap(chain_state(f, chain), closed_form_coeffs(f, chain, level)) < 1e-12);
    }
    CHECK(is_power_of_two(1));
    CHECK(is_power_of_two(64));
    CHECK_FALSE(is_power_of_two(12));
    CHECK_FALSE(is_power_of_two(0));
}

TEST_CASE("probabilistic source folds into the link-center efficiency") {
    SystemParams p = preset_fig4();
    p.p1 = 0.8;
    SystemParams folded = preset_fig4();
    folded.eta_e *= 0.8;
    const ChainConfig chain{300.0, 2};
    CHECK(qber(p, chain) == qber(folded, chain));
    CHECK(success_probability(p, chain) == rel_approx(success_probability(folded, chain)));
}

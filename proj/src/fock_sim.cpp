#include "repeater/fock_sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <sstream>

namespace repeater {

namespace {

using Complex = std::complex<double>;
using QubitMatrix = Eigen::Matrix<Complex, 6, 6, Eigen::RowMajor>;
using RealQubitMatrix = Eigen::Matrix<double, 6, 6, Eigen::RowMajor>;
using LinkVector = Eigen::Matrix<Complex, 36, 1>;
using LinkMatrix = Eigen::Matrix<Complex, 36, 36>;

constexpr int kQubitDim = 6;
constexpr int kLinkDim = 36;
constexpr double kPruneWeight = 1e-15;
constexpr double kMaxPrunedMass = 1e-12;

// Dual-rail qubit basis with at most two photons: |00>,|10>,|01>,|20>,|11>,|02>.
constexpr std::array<std::array<int, 2>, kQubitDim> kQubitBasis = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

int qubit_index(int n0, int n1) {
    for (int q = 0; q < kQubitDim; ++q) {
        if (kQubitBasis[q][0] == n0 && kQubitBasis[q][1] == n1) return q;
    }
    throw NumericError("fock-sim: qubit holds more than two photons");
}

LinkVector to_dense(const FockVector& v) {
    if (v.mode_count() != 4) throw ParamError("fock-sim: link states must have 4 modes");
    LinkVector out = LinkVector::Zero();
    for (const auto& [k, a] : v.amplitudes()) {
        const int qa = qubit_index(FockVector::occupation(k, 0), FockVector::occupation(k, 1));
        const int qb = qubit_index(FockVector::occupation(k, 2), FockVector::occupation(k, 3));
        out(qa * kQubitDim + qb) = a;
    }
    return out;
}

FockVector from_dense(const LinkVector& v, int cutoff) {
    FockVector out(4, std::max(cutoff, 2));
    for (int qa = 0; qa < kQubitDim; ++qa) {
        for (int qb = 0; qb < kQubitDim; ++qb) {
            const Complex a = v(qa * kQubitDim + qb);
            if (a == Complex{}) continue;
            out.add({kQubitBasis[qa][0], kQubitBasis[qa][1], kQubitBasis[qb][0], kQubitBasis[qb][1]},
                    a);
        }
    }
    return out;
}

// Amplitudes <n2 n3 n4 n5| U |inner_left, inner_right> for each detector
// occupation n, with U the pair of 50-50 beamsplitters.
struct InnerProjector {
    std::array<int, 4> n;
    RealQubitMatrix g;
};

std::vector<InnerProjector> build_inner_projectors() {
    std::map<FockVector::Key, RealQubitMatrix> table;
    for (int il = 0; il < kQubitDim; ++il) {
        for (int ir = 0; ir < kQubitDim; ++ir) {
            FockVector in(4, 4);
            in.add({kQubitBasis[il][0], kQubitBasis[il][1], kQubitBasis[ir][0], kQubitBasis[ir][1]},
                   1.0);
            const FockVector out = beamsplitter(beamsplitter(in, 0, 2, 0.5), 1, 3, 0.5);
            for (const auto& [k, a] : out.amplitudes()) {
                auto it = table.find(k);
                if (it == table.end()) it = table.emplace(k, RealQubitMatrix::Zero()).first;
                it->second(il, ir) = a.real();
            }
        }
    }
    std::vector<InnerProjector> res;
    for (const auto& [k, g] : table) {
        res.push_back({{FockVector::occupation(k, 0), FockVector::occupation(k, 1),
                        FockVector::occupation(k, 2), FockVector::occupation(k, 3)},
                       g});
    }
    return res;
}

const std::vector<InnerProjector>& inner_projectors() {
    static const std::vector<InnerProjector> table = build_inner_projectors();
    return table;
}

// Parity phase (-1)^{n} on rail 1 of the link's first qubit.
double relabel_phase(int link_index) {
    return kQubitBasis[link_index / kQubitDim][1] % 2 ? -1.0 : 1.0;
}

// Pattern weight prod_k coeff(n_k) for detectors on joint modes 2..5.
double pattern_weight(const BsmPattern& p, const std::array<int, 4>& n, const DetectorModel& det) {
    double w = 1.0;
    for (int d = 0; d < 4; ++d) {
        const int mode = d + 2;
        const bool click = mode == p.click_modes[0] || mode == p.click_modes[1];
        w *= det.coeff(n[d], click);
    }
    return w;
}

PureEnsemble compact(const LinkMatrix& rho, int cutoff, double& pruned) {
    std::vector<int> support;
    for (int k = 0; k < kLinkDim; ++k) {
        if (rho(k, k).real() > 0.0) support.push_back(k);
    }
    const int m = static_cast<int>(support.size());
    Eigen::MatrixXcd sub(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) sub(i, j) = rho(support[i], support[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
    if (es.info() != Eigen::Success) throw NumericError("fock-sim: eigendecomposition failed");
    const double trace = sub.trace().real();
    PureEnsemble out;
    pruned = 0.0;
    for (int i = 0; i < m; ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam <= kPruneWeight * trace) {
            pruned += std::abs(lam);
            continue;
        }
        LinkVector v = LinkVector::Zero();
        for (int j = 0; j < m; ++j) v(support[j]) = es.eigenvectors()(j, i);
        out.add(lam, from_dense(v, cutoff));
    }
    if (pruned > kMaxPrunedMass * trace) {
        std::ostringstream msg;
        msg << "fock-sim: compaction would drop " << pruned / trace << " of the state";
        throw NumericError(msg.str());
    }
    return out;
}

}  // namespace

int effective_cutoff(const SystemParams& params, const FockOptions& opts) {
    if (opts.cutoff != 0) {
        if (opts.cutoff < 2 || opts.cutoff > 4) throw ParamError("fock cutoff must lie in [2,4]");
        return opts.cutoff;
    }
    return params.p2 > 0.0 ? 4 : 2;
}

const std::array<BsmPattern, 4>& accepted_patterns() {
    static const std::array<BsmPattern, 4> patterns = {
        {{{2, 3}, +1}, {{4, 5}, +1}, {{2, 5}, -1}, {{3, 4}, -1}}};
    return patterns;
}

BsmOutcome bsm(const PureEnsemble& left, const PureEnsemble& right, const DetectorModel& det,
               int cutoff) {
    const auto& projectors = inner_projectors();
    const auto& patterns = accepted_patterns();

    // Per detector occupation: summed weights of the + and - pattern pairs.
    std::vector<double> w_plus(projectors.size()), w_minus(projectors.size());
    std::vector<bool> truncated(projectors.size());
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        const auto& n = projectors[i].n;
        truncated[i] = *std::max_element(n.begin(), n.end()) > cutoff;
        for (const auto& p : patterns) {
            (p.sign > 0 ? w_plus[i] : w_minus[i]) += pattern_weight(p, n, det);
        }
    }

    Eigen::Matrix<double, 36, 1> phase;
    for (int k = 0; k < kLinkDim; ++k) phase(k) = relabel_phase(k);

    std::vector<QubitMatrix> alphas, betas;
    for (const auto& b : left.branches) {
        alphas.push_back(Eigen::Map<const QubitMatrix>(to_dense(b.state).data()));
    }
    for (const auto& b : right.branches) {
        betas.push_back(Eigen::Map<const QubitMatrix>(to_dense(b.state).data()));
    }

    LinkMatrix rho = LinkMatrix::Zero();
    LinkMatrix rho_minus = LinkMatrix::Zero();
    double lost = 0.0;
    Eigen::Matrix<Complex, 36, Eigen::Dynamic> cols_plus(kLinkDim, projectors.size());
    Eigen::Matrix<Complex, 36, Eigen::Dynamic> cols_minus(kLinkDim, projectors.size());
    for (std::size_t l = 0; l < alphas.size(); ++l) {
        for (std::size_t r = 0; r < betas.size(); ++r) {
            const double w = left.branches[l].weight * right.branches[r].weight;
            cols_plus.setZero();
            cols_minus.setZero();
            for (std::size_t i = 0; i < projectors.size(); ++i) {
                const QubitMatrix psi = alphas[l] * projectors[i].g.cast<Complex>() * betas[r];
                const Eigen::Map<const LinkVector> v(psi.data());
                if (truncated[i]) {
                    lost += w * v.squaredNorm();
                    continue;
                }
                cols_plus.col(i) = std::sqrt(w * w_plus[i]) * v;
                cols_minus.col(i) = std::sqrt(w * w_minus[i]) * v;
            }
            rho.noalias() += cols_plus * cols_plus.adjoint();
            rho_minus.noalias() += cols_minus * cols_minus.adjoint();
        }
    }
    if (lost > 1e-12) {
        std::ostringstream msg;
        msg << "bsm: " << lost << " of probability needs more than " << cutoff
            << " photons per detector mode";
        throw NumericError(msg.str());
    }

    BsmOutcome out;
    out.success_plus = rho.trace().real();
    out.success_minus = rho_minus.trace().real();
    rho += phase.asDiagonal() * rho_minus * phase.asDiagonal();
    out.success_prob = rho.trace().real();
    if (!(out.success_prob > 0.0)) return out;
    out.post_state = compact(rho / out.success_prob, cutoff, out.pruned_weight).renormalized();
    return out;
}

BsmOutcome bsm_reference(const PureEnsemble& left, const PureEnsemble& right,
                         const DetectorModel& det, int cutoff) {
    BsmOutcome out;
    for (const auto& lb : left.branches) {
        for (const auto& rb : right.branches) {
            FockVector joint = lb.state.with_cutoff(cutoff).tensor(rb.state.with_cutoff(cutoff));
            joint = beamsplitter(joint, 2, 4, 0.5);
            joint = beamsplitter(joint, 3, 5, 0.5);
            for (const auto& p : accepted_patterns()) {
                PureEnsemble ens;
                ens.add(lb.weight * rb.weight, joint);
                for (int mode = 5; mode >= 2; --mode) {
                    const bool click = mode == p.click_modes[0] || mode == p.click_modes[1];
                    ens = measure_mode(ens, mode, click, det).post;
                }
                for (auto& b : ens.branches) {
                    (p.sign > 0 ? out.success_plus : out.success_minus) += b.weight;
                    out.post_state.add(b.weight,
                                       p.sign > 0 ? b.state : parity_phase(b.state, 1));
                }
            }
        }
    }
    out.success_prob = out.success_plus + out.success_minus;
    if (out.success_prob > 0.0) out.post_state = out.post_state.renormalized();
    return out;
}

double ClickDistribution::total() const {
    double t = 0.0;
    for (double p : prob) t += p;
    return t;
}

double ClickDistribution::sift_probability() const {
    double s = 0.0;
    for (int k = 0; k < 16; ++k) {
        if ((k & 3) != 0 && (k >> 2) != 0) s += prob[k];
    }
    return s;
}

double ClickDistribution::error_probability() const {
    double e = 0.0;
    for (int k = 0; k < 16; ++k) {
        const int a = k & 3;
        const int b = k >> 2;
        if (a == 0 || b == 0) continue;
        if (a == 3 || b == 3) {
            e += 0.5 * prob[k];
            continue;
        }
        // Rail-0 click is bit 0 for Alice. In the computational basis the
        // ideal state is anti-correlated, so Bob reads his rails the other way.
        const int bit_a = a == 1 ? 0 : 1;
        int bit_b = b == 1 ? 0 : 1;
        if (basis == Basis::computational) bit_b ^= 1;
        if (bit_a != bit_b) e += prob[k];
    }
    return e;
}

ClickDistribution ab_measure(const PureEnsemble& state, Basis basis, const DetectorModel& det) {
    ClickDistribution dist;
    dist.basis = basis;
    for (const auto& b : state.branches) {
        FockVector v = b.state;
        if (basis == Basis::rotated) {
            v = beamsplitter(beamsplitter(v, 0, 1, 0.5), 2, 3, 0.5);
        }
        for (const auto& [k, a] : v.amplitudes()) {
            const double p = b.weight * std::norm(a);
            if (p == 0.0) continue;
            for (int pattern = 0; pattern < 16; ++pattern) {
                double w = p;
                for (int m = 0; m < 4; ++m) {
                    w *= det.coeff(FockVector::occupation(k, m), (pattern >> m) & 1);
                }
                dist.prob[pattern] += w;
            }
        }
    }
    return dist;
}

LinkStateCoeffs link_coeffs_from_ensemble(const PureEnsemble& ens) {
    const FockVector m_plus = bell_state(+1, 2);
    const FockVector m_minus = bell_state(-1, 2);
    FockVector psi0(4, 2), psi3(4, 2);
    psi0.add({0, 1, 0, 1}, 1.0);
    psi3.add({1, 0, 1, 0}, 1.0);
    double a = 0.0, b = 0.0, c = 0.0;
    for (const auto& br : ens.branches) {
        a += br.weight * std::norm(m_plus.inner(br.state));
        b += br.weight * std::norm(m_minus.inner(br.state));
        c += br.weight * 0.5 * (std::norm(psi0.inner(br.state)) + std::norm(psi3.inner(br.state)));
    }
    // d(|01,10><01,10| + |10,01><10,01|) equals d(M+ + M-), so a and b here carry d.
    return LinkStateCoeffs::make(a, b, c, 0.0);
}

BsmOutcome elementary_link(const SystemParams& params, const ChainConfig& chain,
                           const FockOptions& opts) {
    const int cutoff = effective_cutoff(params, opts);
    const DetectorModel center =
        loss_fold({params.p_dark_e, params.eta_e}, chain.half_link_transmittance(params.alpha_db_per_km));
    PureEnsemble src;
    src.add(1.0, source_state(params.p1, params.p2, cutoff, opts.two_pair).normalized());
    return bsm(src, src, center, cutoff);
}

ChainResult simulate_chain(const SystemParams& params, const ChainConfig& chain,
                           const FockOptions& opts) {
    params.validate();
    chain.validate();
    const int cutoff = effective_cutoff(params, opts);
    const int n_links = chain.n_links;
    const DetectorModel repeater = loss_fold({params.p_dark_r, params.eta_r}, params.lambda_m);
    const DetectorModel ends{params.p_dark_d, params.eta_d};

    ChainResult res;
    const BsmOutcome elem = elementary_link(params, chain, opts);
    res.p_single = elem.success_prob;
    res.pruned_weight = elem.pruned_weight;
    const double ps1 = multiplexed_link_success(elem.success_prob, params.m_modes);
    res.level_success.push_back(ps1);
    if (!(elem.success_prob > 0.0)) return res;

    double p_succ = std::pow(ps1, n_links);
    PureEnsemble st = elem.post_state;
    auto level_qber = [&](const PureEnsemble& s) {
        return ab_measure(s, Basis::computational, ends).qber();
    };

    if (is_power_of_two(n_links)) {
        res.level_qbers.push_back(level_qber(st));
        for (int copies = n_links / 2; copies >= 1; copies /= 2) {
            const BsmOutcome out = bsm(st, st, repeater, cutoff);
            res.level_success.push_back(out.success_prob);
            res.pruned_weight += out.pruned_weight;
            p_succ *= std::pow(out.success_prob, copies);
            if (!(out.success_prob > 0.0)) return res;
            st = out.post_state;
            res.level_qbers.push_back(level_qber(st));
        }
    } else {
        for (int k = 1; k < n_links; ++k) {
            const BsmOutcome out = bsm(st, elem.post_state, repeater, cutoff);
            res.level_success.push_back(out.success_prob);
            res.pruned_weight += out.pruned_weight;
            p_succ *= out.success_prob;
            if (!(out.success_prob > 0.0)) return res;
            st = out.post_state;
        }
    }

    const ClickDistribution comp = ab_measure(st, Basis::computational, ends);
    const ClickDistribution rot = ab_measure(st, Basis::rotated, ends);
    res.p_succ = p_succ;
    res.p_sift = comp.sift_probability();
    res.q = comp.qber();
    res.q_rotated = rot.qber();
    res.rate_bits_per_s =
        res.p_sift * res.p_succ * bb84_key_fraction(std::clamp(res.q, 0.0, 1.0)) /
        (2.0 * params.t_q_seconds);
    res.state = std::move(st);
    res.coeffs = link_coeffs_from_ensemble(res.state);
    return res;
}

}  // namespace repeater

#pragma once

#include <array>
#include <vector>

#include "repeater/analytic_chain.hpp"
#include "repeater/core_params.hpp"
#include "repeater/fock_state.hpp"

namespace repeater {

struct FockOptions {
    /// Photons per mode kept in the BSM; 0 selects 2 when p2 = 0, else 4.
    int cutoff = 0;
    TwoPairAmplitudes two_pair = kDefaultTwoPair;
};

int effective_cutoff(const SystemParams& params, const FockOptions& opts);

/// A two-detector coincidence accepted by the BSM. Modes are numbered in the
/// 8-mode joint space of two links; detectors sit on modes 2, 3, 4, 5.
struct BsmPattern {
    std::array<int, 2> click_modes;
    int sign;
};

const std::array<BsmPattern, 4>& accepted_patterns();

struct BsmOutcome {
    double success_prob = 0.0;
    /// Heralded link state, relabeled to the M+ convention, total weight 1.
    PureEnsemble post_state;
    /// Probability of the +1 and -1 pattern pairs.
    double success_plus = 0.0;
    double success_minus = 0.0;
    /// Weight removed while compacting the heralded ensemble.
    double pruned_weight = 0.0;
};

/// Heralded swap of two 4-mode links: 50-50 beamsplitters on the inner rails,
/// Luders update on the four detectors, -1 outcomes relabeled by a parity
/// phase on mode 1. Works on a dense 6x6-per-qubit basis (up to two photons
/// per qubit) and compacts the result by eigendecomposition.
BsmOutcome bsm(const PureEnsemble& left, const PureEnsemble& right, const DetectorModel& det,
               int cutoff = 4);

/// Same measurement built only from FockVector primitives (tensor,
/// beamsplitter, measure_mode). Slow; kept as an independent route.
BsmOutcome bsm_reference(const PureEnsemble& left, const PureEnsemble& right,
                         const DetectorModel& det, int cutoff = 4);

enum class Basis { computational, rotated };

/// Exact probabilities of Alice's and Bob's 16 click patterns. Pattern index
/// bits: 1 = Alice rail 0, 2 = Alice rail 1, 4 = Bob rail 0, 8 = Bob rail 1.
struct ClickDistribution {
    Basis basis = Basis::computational;
    std::array<double, 16> prob{};

    double total() const;
    /// Both parties see at least one click.
    double sift_probability() const;
    /// Unconditional probability of a sifted bit mismatch, double clicks
    /// counted as a coin flip.
    double error_probability() const;
    double qber() const { return error_probability() / sift_probability(); }
};

ClickDistribution ab_measure(const PureEnsemble& state, Basis basis, const DetectorModel& det);

struct ChainResult {
    double q = 0.0;
    double q_rotated = 0.0;
    double p_succ = 0.0;
    double p_sift = 0.0;
    double rate_bits_per_s = 0.0;
    /// Single-frequency elementary heralding probability.
    double p_single = 0.0;
    /// Per-level QBERs Q_1..Q_{n+1} (hierarchical chains only).
    std::vector<double> level_qbers;
    /// Per-level success probabilities P_s(1) (multiplexed), P_s(2), ...
    std::vector<double> level_success;
    PureEnsemble state;
    /// (a, b, c, d) overlaps of the end-to-end state, s = 1 when p2 = 0.
    LinkStateCoeffs coeffs;
    double pruned_weight = 0.0;
};

/// Builds elementary links from the physical source, swaps them (hierarchically
/// for N = 2^n, left to right otherwise) and measures the ends.
ChainResult simulate_chain(const SystemParams& params, const ChainConfig& chain,
                           const FockOptions& opts = {});

/// Elementary link heralded at the link center (single frequency).
BsmOutcome elementary_link(const SystemParams& params, const ChainConfig& chain,
                           const FockOptions& opts = {});

/// Overlaps <M+|rho|M+>, <M-|rho|M->, <01,01|rho|01,01>, <01,10|rho|01,10>.
LinkStateCoeffs link_coeffs_from_ensemble(const PureEnsemble& ens);

}  // namespace repeater

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace repeater {

using Amplitude = std::complex<double>;

/// Sparse state vector over multi-mode photon-number kets.
///
/// Occupations are packed 4 bits per mode into a 64-bit key, so at most 16
/// modes and at most 15 photons per mode are representable.
class FockVector {
public:
    using Key = std::uint64_t;
    static constexpr int kMaxModes = 16;
    static constexpr int kMaxOccupation = 15;

    FockVector(int mode_count, int cutoff);

    int mode_count() const { return modes_; }
    int cutoff() const { return cutoff_; }
    const std::map<Key, Amplitude>& amplitudes() const { return amps_; }
    bool empty() const { return amps_.empty(); }

    static int occupation(Key key, int mode) { return static_cast<int>((key >> (4 * mode)) & 0xF); }
    static Key with_occupation(Key key, int mode, int n);
    Key encode(const std::vector<int>& occ) const;
    std::vector<int> decode(Key key) const;

    Amplitude amplitude(const std::vector<int>& occ) const;
    /// Adds a to the amplitude of |occ>; throws ParamError past the cutoff.
    void add(const std::vector<int>& occ, Amplitude a);
    void add_key(Key key, Amplitude a);

    double norm2() const;
    FockVector normalized() const;
    FockVector scaled(Amplitude factor) const;
    /// Drops amplitudes with |amp| <= tol.
    void prune(double tol = 0.0);

    /// Joint state with this state's modes first.
    FockVector tensor(const FockVector& other) const;
    /// Same state with a different cutoff; throws if an occupation exceeds it.
    FockVector with_cutoff(int cutoff) const;

    /// Inner product <this|other>.
    Amplitude inner(const FockVector& other) const;

    std::string to_json() const;

private:
    int modes_;
    int cutoff_;
    std::map<Key, Amplitude> amps_;
};

/// Two-mode beamsplitter: b^dag -> sqrt(T) b^dag + sqrt(1-T) c^dag,
/// c^dag -> sqrt(1-T) b^dag - sqrt(T) c^dag. The map is its own inverse.
/// Throws NumericError if more than 1e-12 of norm^2 lands above the cutoff.
FockVector beamsplitter(const FockVector& state, int mode_i, int mode_j, double transmissivity);

/// Multiplies each amplitude by (-1)^{n_mode}.
FockVector parity_phase(const FockVector& state, int mode);

/// Removes `mode`, keeping only the component with occupation n there.
FockVector project_out(const FockVector& state, int mode, int n);

struct Branch {
    double weight = 0.0;
    FockVector state;
};

/// Unnormalized mixture sum_k w_k |psi_k><psi_k| of normalized pure states.
struct PureEnsemble {
    std::vector<Branch> branches;

    double total_weight() const;
    void add(double weight, FockVector state);
    /// Rescales weights to sum to 1; throws NumericError on zero weight.
    PureEnsemble renormalized() const;
    /// Drops branches with weight < threshold relative to total; returns dropped weight.
    double prune(double threshold);
    std::string to_json() const;
};

/// Threshold lossy noisy detector with POVM diagonal
/// noclick(n) = (1-P)(1-eta)^n, click(n) = 1 - noclick(n).
struct DetectorModel {
    double p_dark = 0.0;
    double eta = 1.0;

    double noclick_coeff(int n) const;
    double click_coeff(int n) const;
    double coeff(int n, bool click) const { return click ? click_coeff(n) : noclick_coeff(n); }
};

/// Detector with eta multiplied by an upstream transmittance.
DetectorModel loss_fold(const DetectorModel& det, double extra_transmittance);

struct MeasureResult {
    /// Probability of the outcome (times the input weight).
    double weight = 0.0;
    /// One pure branch per occupation of the measured mode, mode removed.
    PureEnsemble post;
};

/// Luders update for a click or no-click on `mode`.
MeasureResult measure_mode(const FockVector& state, int mode, bool click, const DetectorModel& det);
MeasureResult measure_mode(const PureEnsemble& ens, int mode, bool click, const DetectorModel& det);

/// Relative amplitudes of the |20,02>, |11,11>, |02,20> two-pair terms.
using TwoPairAmplitudes = std::array<double, 3>;
inline constexpr TwoPairAmplitudes kDefaultTwoPair = {1.0, -1.0, 1.0};

/// sqrt(1-p1-p2)|00,00> + sqrt(p1)|M+> + sqrt(p2) (normalized two-pair term).
/// Modes (0,1) and (2,3) are the two dual-rail qubits.
FockVector source_state(double p1, double p2, int cutoff,
                        const TwoPairAmplitudes& two_pair = kDefaultTwoPair);

/// (|10,01> + s|01,10>)/sqrt(2) for sign s = +1 or -1.
FockVector bell_state(int sign, int cutoff);

}  // namespace repeater

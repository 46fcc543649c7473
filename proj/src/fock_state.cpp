#include "repeater/fock_state.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "repeater/core_params.hpp"

namespace repeater {

namespace {

constexpr int kTable = FockVector::kMaxOccupation + 1;

struct Combinatorics {
    std::array<double, 2 * kTable> sqrt_fact{};
    std::array<std::array<double, kTable>, kTable> binom{};

    Combinatorics() {
        double f = 1.0;
        sqrt_fact[0] = 1.0;
        for (int n = 1; n < 2 * kTable; ++n) {
            f *= n;
            sqrt_fact[n] = std::sqrt(f);
        }
        for (int n = 0; n < kTable; ++n) {
            binom[n][0] = 1.0;
            for (int k = 1; k <= n; ++k) {
                binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0.0);
            }
        }
    }
};

const Combinatorics& combinatorics() {
    static const Combinatorics c;
    return c;
}

}  // namespace

FockVector::FockVector(int mode_count, int cutoff) : modes_(mode_count), cutoff_(cutoff) {
    if (mode_count < 1 || mode_count > kMaxModes) {
        throw ParamError("FockVector: mode count must lie in [1,16]");
    }
    if (cutoff < 0 || cutoff > kMaxOccupation) {
        throw ParamError("FockVector: cutoff must lie in [0,15]");
    }
}

FockVector::Key FockVector::with_occupation(Key key, int mode, int n) {
    const Key mask = Key{0xF} << (4 * mode);
    return (key & ~mask) | (static_cast<Key>(n) << (4 * mode));
}

FockVector::Key FockVector::encode(const std::vector<int>& occ) const {
    if (static_cast<int>(occ.size()) != modes_) {
        throw ParamError("FockVector: occupation tuple has wrong length");
    }
    Key key = 0;
    for (int m = 0; m < modes_; ++m) {
        if (occ[m] < 0 || occ[m] > cutoff_) {
            throw ParamError("FockVector: occupation outside [0, cutoff]");
        }
        key = with_occupation(key, m, occ[m]);
    }
    return key;
}

std::vector<int> FockVector::decode(Key key) const {
    std::vector<int> occ(modes_);
    for (int m = 0; m < modes_; ++m) occ[m] = occupation(key, m);
    return occ;
}

Amplitude FockVector::amplitude(const std::vector<int>& occ) const {
    auto it = amps_.find(encode(occ));
    return it == amps_.end() ? Amplitude{} : it->second;
}

void FockVector::add(const std::vector<int>& occ, Amplitude a) { add_key(encode(occ), a); }

void FockVector::add_key(Key key, Amplitude a) {
    if (a == Amplitude{}) return;
    amps_[key] += a;
}

double FockVector::norm2() const {
    double n = 0.0;
    for (const auto& [k, a] : amps_) n += std::norm(a);
    return n;
}

FockVector FockVector::normalized() const {
    const double n = norm2();
    if (!(n > 0.0)) throw NumericError("FockVector: cannot normalize a zero vector");
    return scaled(1.0 / std::sqrt(n));
}

FockVector FockVector::scaled(Amplitude factor) const {
    FockVector out(modes_, cutoff_);
    for (const auto& [k, a] : amps_) out.amps_.emplace(k, a * factor);
    return out;
}

void FockVector::prune(double tol) {
    for (auto it = amps_.begin(); it != amps_.end();) {
        if (std::abs(it->second) <= tol) {
            it = amps_.erase(it);
        } else {
            ++it;
        }
    }
}

FockVector FockVector::tensor(const FockVector& other) const {
    if (modes_ + other.modes_ > kMaxModes) {
        throw ParamError("FockVector: tensor product exceeds 16 modes");
    }
    FockVector out(modes_ + other.modes_, std::max(cutoff_, other.cutoff_));
    const int shift = 4 * modes_;
    for (const auto& [ka, a] : amps_) {
        for (const auto& [kb, b] : other.amps_) {
            out.amps_.emplace(ka | (kb << shift), a * b);
        }
    }
    return out;
}

FockVector FockVector::with_cutoff(int cutoff) const {
    FockVector out(modes_, cutoff);
    for (const auto& [k, a] : amps_) {
        for (int m = 0; m < modes_; ++m) {
            if (occupation(k, m) > cutoff) {
                throw ParamError("FockVector: occupation exceeds requested cutoff");
            }
        }
        out.amps_.emplace(k, a);
    }
    return out;
}

Amplitude FockVector::inner(const FockVector& other) const {
    Amplitude s{};
    for (const auto& [k, a] : amps_) {
        auto it = other.amps_.find(k);
        if (it != other.amps_.end()) s += std::conj(a) * it->second;
    }
    return s;
}

std::string FockVector::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, a] : amps_) {
        arr.push_back({{"occupation", decode(k)}, {"re", a.real()}, {"im", a.imag()}});
    }
    return arr.dump();
}

FockVector beamsplitter(const FockVector& state, int mode_i, int mode_j, double transmissivity) {
    const int modes = state.mode_count();
    if (mode_i == mode_j || mode_i < 0 || mode_j < 0 || mode_i >= modes || mode_j >= modes) {
        throw ParamError("beamsplitter: modes must be distinct and in range");
    }
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
        throw ParamError("beamsplitter: transmissivity outside [0,1]");
    }
    const auto& cb = combinatorics();
    const double st = std::sqrt(transmissivity);
    const double sr = std::sqrt(1.0 - transmissivity);
    const int cutoff = state.cutoff();

    FockVector out(modes, cutoff);
    std::map<FockVector::Key, Amplitude> overflow;
    for (const auto& [key, amp] : state.amplitudes()) {
        const int n = FockVector::occupation(key, mode_i);
        const int m = FockVector::occupation(key, mode_j);
        const double norm = 1.0 / (cb.sqrt_fact[n] * cb.sqrt_fact[m]);
        for (int k = 0; k <= n; ++k) {
            // (sqrt(T) b + sqrt(1-T) c)^n: k quanta stay in b.
            const double fk = cb.binom[n][k] * std::pow(st, k) * std::pow(sr, n - k);
            for (int l = 0; l <= m; ++l) {
                // (sqrt(1-T) b - sqrt(T) c)^m: l quanta go to b.
                double fl = cb.binom[m][l] * std::pow(sr, l) * std::pow(st, m - l);
                if ((m - l) % 2 == 1) fl = -fl;
                const int p = k + l;
                const int q = n + m - p;
                if (p > FockVector::kMaxOccupation || q > FockVector::kMaxOccupation) {
                    throw NumericError("beamsplitter: occupation beyond 15 photons per mode");
                }
                const double c = fk * fl * norm * cb.sqrt_fact[p] * cb.sqrt_fact[q];
                if (c == 0.0) continue;
                FockVector::Key nk = FockVector::with_occupation(key, mode_i, p);
                nk = FockVector::with_occupation(nk, mode_j, q);
                if (p > cutoff || q > cutoff) {
                    overflow[nk] += amp * c;
                } else {
                    out.add_key(nk, amp * c);
                }
            }
        }
    }
    double lost = 0.0;
    for (const auto& [k, a] : overflow) lost += std::norm(a);
    if (lost > 1e-12) {
        std::ostringstream msg;
        msg << "beamsplitter: " << lost << " of norm^2 exceeds cutoff " << cutoff;
        throw NumericError(msg.str());
    }
    out.prune(0.0);
    return out;
}

FockVector parity_phase(const FockVector& state, int mode) {
    FockVector out(state.mode_count(), state.cutoff());
    for (const auto& [k, a] : state.amplitudes()) {
        out.add_key(k, FockVector::occupation(k, mode) % 2 ? -a : a);
    }
    return out;
}

namespace {

FockVector::Key remove_mode(FockVector::Key key, int mode) {
    const FockVector::Key low = key & ((FockVector::Key{1} << (4 * mode)) - 1);
    const FockVector::Key high = key >> (4 * (mode + 1));
    return low | (high << (4 * mode));
}

}  // namespace

FockVector project_out(const FockVector& state, int mode, int n) {
    if (state.mode_count() < 2) throw ParamError("project_out: need at least two modes");
    FockVector out(state.mode_count() - 1, state.cutoff());
    for (const auto& [k, a] : state.amplitudes()) {
        if (FockVector::occupation(k, mode) == n) out.add_key(remove_mode(k, mode), a);
    }
    return out;
}

double PureEnsemble::total_weight() const {
    double w = 0.0;
    for (const auto& b : branches) w += b.weight;
    return w;
}

void PureEnsemble::add(double weight, FockVector state) {
    if (weight < 0.0) throw ParamError("PureEnsemble: negative branch weight");
    if (weight == 0.0) return;
    branches.push_back({weight, std::move(state)});
}

PureEnsemble PureEnsemble::renormalized() const {
    const double w = total_weight();
    if (!(w > 0.0)) throw NumericError("PureEnsemble: zero total weight");
    PureEnsemble out = *this;
    for (auto& b : out.branches) b.weight /= w;
    return out;
}

double PureEnsemble::prune(double threshold) {
    const double total = total_weight();
    double dropped = 0.0;
    std::vector<Branch> kept;
    for (auto& b : branches) {
        if (b.weight < threshold * total) {
            dropped += b.weight;
        } else {
            kept.push_back(std::move(b));
        }
    }
    branches = std::move(kept);
    return dropped;
}

std::string PureEnsemble::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : branches) {
        arr.push_back({{"weight", b.weight}, {"amplitudes", nlohmann::json::parse(b.state.to_json())}});
    }
    return arr.dump();
}

double DetectorModel::noclick_coeff(int n) const {
    return (1.0 - p_dark) * std::pow(1.0 - eta, n);
}

double DetectorModel::click_coeff(int n) const {
    if (n == 0) return p_dark;
    return p_dark - (1.0 - p_dark) * std::expm1(n * std::log1p(-eta));
}

DetectorModel loss_fold(const DetectorModel& det, double extra_transmittance) {
    if (!(extra_transmittance > 0.0 && extra_transmittance <= 1.0)) {
        throw ParamError("loss_fold: transmittance outside (0,1]");
    }
    return {det.p_dark, det.eta * extra_transmittance};
}

MeasureResult measure_mode(const FockVector& state, int mode, bool click, const DetectorModel& det) {
    if (mode < 0 || mode >= state.mode_count()) throw ParamError("measure_mode: mode out of range");
    MeasureResult res;
    for (int n = 0; n <= state.cutoff(); ++n) {
        FockVector part = project_out(state, mode, n);
        const double mass = part.norm2();
        if (mass == 0.0) continue;
        const double w = det.coeff(n, click) * mass;
        res.weight += w;
        if (w > 0.0) res.post.add(w, part.scaled(1.0 / std::sqrt(mass)));
    }
    return res;
}

MeasureResult measure_mode(const PureEnsemble& ens, int mode, bool click, const DetectorModel& det) {
    MeasureResult res;
    for (const auto& b : ens.branches) {
        MeasureResult r = measure_mode(b.state, mode, click, det);
        res.weight += b.weight * r.weight;
        for (auto& br : r.post.branches) res.post.add(b.weight * br.weight, std::move(br.state));
    }
    return res;
}

FockVector source_state(double p1, double p2, int cutoff, const TwoPairAmplitudes& two_pair) {
    if (!(p1 >= 0.0 && p2 >= 0.0 && p1 + p2 <= 1.0 + 1e-15)) {
        throw ParamError("source_state: need p1, p2 >= 0 and p1 + p2 <= 1");
    }
    if (p2 > 0.0 && cutoff < 2) throw ParamError("source_state: two-pair term needs cutoff >= 2");
    if (cutoff < 1) throw ParamError("source_state: cutoff must be >= 1");
    FockVector v(4, cutoff);
    v.add({0, 0, 0, 0}, std::sqrt(std::max(0.0, 1.0 - p1 - p2)));
    const double s1 = std::sqrt(p1 / 2.0);
    v.add({1, 0, 0, 1}, s1);
    v.add({0, 1, 1, 0}, s1);
    if (p2 > 0.0) {
        const double n2 = std::sqrt(two_pair[0] * two_pair[0] + two_pair[1] * two_pair[1] +
                                    two_pair[2] * two_pair[2]);
        if (!(n2 > 0.0)) throw ParamError("source_state: two-pair amplitudes are all zero");
        const double s2 = std::sqrt(p2) / n2;
        v.add({2, 0, 0, 2}, s2 * two_pair[0]);
        v.add({1, 1, 1, 1}, s2 * two_pair[1]);
        v.add({0, 2, 2, 0}, s2 * two_pair[2]);
    }
    return v;
}

FockVector bell_state(int sign, int cutoff) {
    FockVector v(4, cutoff);
    v.add({1, 0, 0, 1}, 1.0 / std::sqrt(2.0));
    v.add({0, 1, 1, 0}, sign / std::sqrt(2.0));
    return v;
}

}  // namespace repeater

#pragma once

// QED pure-state amplitudes over a finite mode set.
//
// Two-photon storage: one coefficient b per unordered pair of (mode, helicity) keys, the
// amplitude of the normalized basis state |1_a 1_b> (a != b) or |2_a> (a == b). The pair
// amplitude c_{a;b} = <0|a_a a_b|Psi> is sqrt(N_ab) * b with N_ab = 1 + delta_ab.

#include "photonwf/kgrid.hpp"
#include "photonwf/polarization.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace photonwf {

struct Mode {
    Vec3 k;
    double kmag = 0.0, theta = 0.0, phi = 0.0;
    double scale = 1.0;  // 1/sqrt(V) (box) or sqrt(w/(2pi)^3) (continuum)
    double weight = 0.0;  // d^3k quadrature weight, continuum only
};

inline Mode make_mode(const Vec3& k, double scale, double weight = 0.0) {
    const double km = k.norm();
    if (!(km > 0.0)) throw std::invalid_argument("mode with k = 0 is excluded (1/k terms are singular)");
    Mode m;
    m.k = k;
    m.kmag = km;
    m.theta = std::acos(std::clamp(k.z() / km, -1.0, 1.0));
    m.phi = (k.x() == 0.0 && k.y() == 0.0) ? 0.0 : std::atan2(k.y(), k.x());
    m.scale = scale;
    m.weight = weight;
    return m;
}

class ModeSet {
public:
    static std::shared_ptr<const ModeSet> from_grid(std::shared_ptr<const KGrid> grid) {
        auto ms = std::shared_ptr<ModeSet>(new ModeSet);
        ms->grid_ = grid;
        ms->norm_ = grid->spec().mode;
        ms->volume_ = grid->spec().volume;
        const double c = std::pow(2.0 * pi, -3.0);
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double w = grid->weight(i);
            Mode m;
            m.k = grid->kvec(i);
            m.kmag = grid->k(i);
            m.theta = grid->theta(i);
            m.phi = grid->phi(i);
            m.weight = w;
            m.scale = ms->norm_ == Normalization::continuum ? std::sqrt(w * c) : 1.0 / std::sqrt(ms->volume_);
            ms->modes_.push_back(m);
        }
        return ms;
    }

    static std::shared_ptr<const ModeSet> box(double volume, const std::vector<Vec3>& kvecs) {
        if (!(volume > 0.0)) throw std::invalid_argument("box volume must be > 0");
        auto ms = std::shared_ptr<ModeSet>(new ModeSet);
        ms->norm_ = Normalization::box;
        ms->volume_ = volume;
        for (const auto& k : kvecs) ms->modes_.push_back(make_mode(k, 1.0 / std::sqrt(volume)));
        return ms;
    }

    // Modes k_j * dir for a list of positive wavenumbers.
    static std::shared_ptr<const ModeSet> collinear(double volume, const Vec3& dir, const std::vector<double>& ks) {
        std::vector<Vec3> kv;
        const Vec3 d = dir.normalized();
        for (double k : ks) {
            if (!(k > 0.0)) throw std::invalid_argument("collinear modes need k > 0");
            kv.push_back(k * d);
        }
        return box(volume, kv);
    }

    std::size_t size() const { return modes_.size(); }
    const Mode& operator[](std::size_t i) const { return modes_.at(i); }
    const std::vector<Mode>& modes() const { return modes_; }
    Normalization normalization() const { return norm_; }
    double volume() const { return volume_; }
    const std::shared_ptr<const KGrid>& grid() const { return grid_; }

    std::optional<std::size_t> find(const Vec3& k, double tol = 1e-12) const {
        for (std::size_t i = 0; i < modes_.size(); ++i)
            if ((modes_[i].k - k).norm() <= tol * std::max(1.0, k.norm())) return i;
        return std::nullopt;
    }

private:
    ModeSet() = default;
    std::vector<Mode> modes_;
    Normalization norm_ = Normalization::box;
    double volume_ = 1.0;
    std::shared_ptr<const KGrid> grid_;
};

inline std::size_t mode_key(std::size_t mode, Helicity s) { return 2 * mode + slot(s); }
inline std::size_t key_mode(std::size_t key) { return key / 2; }
inline Helicity key_helicity(std::size_t key) { return key % 2 == 0 ? Helicity::plus : Helicity::minus; }

struct SectorProbabilities {
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    double total() const { return p0 + p1 + p2; }
};

class FockState {
public:
    using PairKey = std::pair<std::size_t, std::size_t>;

    explicit FockState(std::shared_ptr<const ModeSet> modes) : modes_(std::move(modes)) {
        if (!modes_) throw std::invalid_argument("FockState: null mode set");
        c1_.assign(2 * modes_->size(), cplx(0.0));
    }

    const ModeSet& modes() const { return *modes_; }
    const std::shared_ptr<const ModeSet>& modes_ptr() const { return modes_; }

    cplx vacuum() const { return c0_; }
    void set_vacuum(cplx z) { c0_ = z; }

    cplx one(std::size_t mode, Helicity s) const { return c1_.at(checked(mode, s)); }
    void set_one(std::size_t mode, Helicity s, cplx z) { c1_.at(checked(mode, s)) = z; }
    const std::vector<cplx>& one_photon() const { return c1_; }
    std::vector<cplx>& one_photon() { return c1_; }

    void set_pair(std::size_t m1, Helicity s1, std::size_t m2, Helicity s2, cplx b) {
        const PairKey key = ordered(checked(m1, s1), checked(m2, s2));
        if (b == cplx(0.0))
            c2_.erase(key);
        else
            c2_[key] = b;
    }
    cplx pair(std::size_t m1, Helicity s1, std::size_t m2, Helicity s2) const {
        auto it = c2_.find(ordered(checked(m1, s1), checked(m2, s2)));
        return it == c2_.end() ? cplx(0.0) : it->second;
    }
    const std::map<PairKey, cplx>& pairs() const { return c2_; }
    std::map<PairKey, cplx>& pairs() { return c2_; }
    bool has_two_photon() const { return !c2_.empty(); }

    // <0| a_{m1,s1} a_{m2,s2} |Psi>
    cplx two_photon_amplitude(std::size_t m1, Helicity s1, std::size_t m2, Helicity s2) const {
        const std::size_t a = checked(m1, s1), b = checked(m2, s2);
        const cplx v = pair(m1, s1, m2, s2);
        return a == b ? std::sqrt(2.0) * v : v;
    }
    cplx two_photon_amplitude(const Vec3& k1, Helicity s1, const Vec3& k2, Helicity s2) const {
        auto a = modes_->find(k1), b = modes_->find(k2);
        if (!a || !b) throw std::invalid_argument("two_photon_amplitude: wave vector is not a mode of this state");
        return two_photon_amplitude(*a, s1, *b, s2);
    }

    SectorProbabilities sector_probabilities() const {
        SectorProbabilities p;
        p.p0 = std::norm(c0_);
        for (const auto& c : c1_) p.p1 += std::norm(c);
        for (const auto& [k, v] : c2_) p.p2 += std::norm(v);
        return p;
    }

    double mean_photon_number() const {
        const auto p = sector_probabilities();
        return p.p1 + 2.0 * p.p2;
    }

private:
    std::size_t checked(std::size_t mode, Helicity s) const {
        if (mode >= modes_->size())
            throw std::out_of_range("mode index " + std::to_string(mode) + " is not in the mode set");
        return mode_key(mode, s);
    }
    static PairKey ordered(std::size_t a, std::size_t b) { return a <= b ? PairKey{a, b} : PairKey{b, a}; }

    std::shared_ptr<const ModeSet> modes_;
    cplx c0_ = 0.0;
    std::vector<cplx> c1_;
    std::map<PairKey, cplx> c2_;
};

inline FockState normalize(FockState s) {
    const double p = s.sector_probabilities().total();
    if (!(p > 0.0)) throw std::invalid_argument("normalize: zero state");
    const double f = 1.0 / std::sqrt(p);
    s.set_vacuum(s.vacuum() * f);
    for (auto& c : s.one_photon()) c *= f;
    for (auto& [k, v] : s.pairs()) v *= f;
    return s;
}

class CoherentState {
public:
    explicit CoherentState(std::shared_ptr<const ModeSet> modes) : modes_(std::move(modes)) {
        gamma_.assign(2 * modes_->size(), cplx(0.0));
    }
    static CoherentState from_amplitudes(const FockState& shape, double nbar) {
        CoherentState c(shape.modes_ptr());
        double p = 0.0;
        for (const auto& z : shape.one_photon()) p += std::norm(z);
        if (!(p > 0.0)) throw std::invalid_argument("coherent state needs a nonzero amplitude profile");
        const double f = std::sqrt(nbar / p);
        for (std::size_t i = 0; i < c.gamma_.size(); ++i) c.gamma_[i] = shape.one_photon()[i] * f;
        return c;
    }
    const ModeSet& modes() const { return *modes_; }
    const std::shared_ptr<const ModeSet>& modes_ptr() const { return modes_; }
    std::vector<cplx>& gamma() { return gamma_; }
    const std::vector<cplx>& gamma() const { return gamma_; }
    double mean_photon_number() const {
        double n = 0.0;
        for (const auto& g : gamma_) n += std::norm(g);
        return n;
    }

private:
    std::shared_ptr<const ModeSet> modes_;
    std::vector<cplx> gamma_;
};

// c ~ exp(-|k - k0|^2 / (4 dk^2)) (times sqrt(w/(2pi)^3) on continuum grids), normalized.
inline FockState gaussian_packet(std::shared_ptr<const ModeSet> modes, const Vec3& k0, double dk, Helicity s) {
    if (!(dk > 0.0)) throw std::invalid_argument("gaussian_packet: width must be > 0");
    if (const auto& g = modes->grid()) {
        const double km = k0.norm();
        if (km < g->spec().kmin || km > g->spec().kmax)
            std::cerr << "warning: gaussian_packet center |k0|=" << km << " lies outside the grid shell\n";
    }
    FockState st(modes);
    for (std::size_t i = 0; i < modes->size(); ++i) {
        const Mode& m = (*modes)[i];
        const double amp = std::exp(-(m.k - k0).squaredNorm() / (4.0 * dk * dk));
        const double w = modes->normalization() == Normalization::continuum ? m.scale : 1.0;
        st.set_one(i, s, amp * w);
    }
    return normalize(st);
}

// Shell-synthesized position eigenvector at r0: c = g(k) exp(-i k.r0) (continuum weighted).
inline FockState localized_state(std::shared_ptr<const ModeSet> modes, const Vec3& r0, Helicity s,
                                 const std::function<double(double)>& window, bool normalized = true) {
    FockState st(modes);
    for (std::size_t i = 0; i < modes->size(); ++i) {
        const Mode& m = (*modes)[i];
        const double w = modes->normalization() == Normalization::continuum ? m.scale : 1.0;
        st.set_one(i, s, window(m.kmag) * w * std::exp(-I * m.k.dot(r0)));
    }
    return normalized ? normalize(st) : st;
}

inline Vec3 mean_wavevector(const FockState& s) {
    Vec3 acc = Vec3::Zero();
    double p = 0.0;
    for (std::size_t key = 0; key < s.one_photon().size(); ++key) {
        const double w = std::norm(s.one_photon()[key]);
        acc += w * s.modes()[key_mode(key)].k;
        p += w;
    }
    return p > 0.0 ? Vec3(acc / p) : Vec3::Zero();
}

inline double mean_omega(const FockState& s) {
    double acc = 0.0, p = 0.0;
    for (std::size_t key = 0; key < s.one_photon().size(); ++key) {
        const double w = std::norm(s.one_photon()[key]);
        acc += w * s.modes()[key_mode(key)].kmag;
        p += w;
    }
    return p > 0.0 ? acc / p : 0.0;
}

// Re-express the same physical state in another gauge: c -> c exp(+i sigma (chi_to - chi_from)).
inline FockState regauge(const FockState& s, const GaugeSpec& from, const GaugeSpec& to) {
    FockState out = s;
    auto factor = [&](std::size_t key) {
        const Mode& m = s.modes()[key_mode(key)];
        const double d = to.chi(m.theta, m.phi) - from.chi(m.theta, m.phi);
        return std::exp(I * (sign(key_helicity(key)) * d));
    };
    for (std::size_t key = 0; key < out.one_photon().size(); ++key) out.one_photon()[key] *= factor(key);
    for (auto& [k, v] : out.pairs()) v *= factor(k.first) * factor(k.second);
    return out;
}

}  // namespace photonwf

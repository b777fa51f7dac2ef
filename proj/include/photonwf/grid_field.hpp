#pragma once

#include "photonwf/kgrid.hpp"
#include "photonwf/polarization.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace photonwf {

using FieldArray = std::vector<CVec3>;

// One complex 3-vector array per helicity on a shared grid, tagged with alpha and gauge.
class GridField {
public:
    GridField(std::shared_ptr<const KGrid> grid, AlphaWeight alpha, GaugeSpec gauge)
        : grid_(std::move(grid)), alpha_(alpha), gauge_(gauge) {
        if (!grid_) throw std::invalid_argument("GridField: null grid");
        for (auto& v : values_) v.assign(grid_->size(), CVec3::Zero());
    }

    const KGrid& grid() const { return *grid_; }
    const std::shared_ptr<const KGrid>& grid_ptr() const { return grid_; }
    AlphaWeight alpha() const { return alpha_; }
    const GaugeSpec& gauge() const { return gauge_; }
    void set_alpha(AlphaWeight a) { alpha_ = a; }

    FieldArray& values(Helicity s) { return values_[slot(s)]; }
    const FieldArray& values(Helicity s) const { return values_[slot(s)]; }

    bool finite() const {
        for (const auto& v : values_)
            for (const auto& x : v)
                if (!x.allFinite()) return false;
        return true;
    }

    template <class F>
    GridField map(F&& f) const {
        GridField out(grid_, alpha_, gauge_);
        for (Helicity s : kHelicities) {
            const auto& in = values(s);
            auto& o = out.values(s);
            for (std::size_t i = 0; i < in.size(); ++i) o[i] = f(i, in[i]);
        }
        return out;
    }

    GridField scaled_by_k_power(double p) const {
        const KGrid& g = *grid_;
        return map([&](std::size_t i, const CVec3& v) { return CVec3(v * std::pow(g.k(i), p)); });
    }

private:
    std::shared_ptr<const KGrid> grid_;
    AlphaWeight alpha_;
    GaugeSpec gauge_;
    std::array<FieldArray, 2> values_;
};

inline void require_same_grid(const GridField& a, const GridField& b) {
    if (&a.grid() != &b.grid() && !a.grid().same_layout(b.grid()))
        throw std::invalid_argument("grid fields live on different grids");
}

// Quadrature inner product sum_sigma int d^3k u* . v (no metric).
inline cplx inner(const GridField& u, const GridField& v) {
    require_same_grid(u, v);
    const KGrid& g = u.grid();
    cplx s = 0.0;
    for (Helicity h : kHelicities) {
        const auto& a = u.values(h);
        const auto& b = v.values(h);
        for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * a[i].dot(b[i]);
    }
    return s;
}

inline cplx inner(const KGrid& g, const FieldArray& a, const FieldArray& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * a[i].dot(b[i]);
    return s;
}

inline double norm(const GridField& u) { return std::sqrt(std::real(inner(u, u))); }

inline GridField operator-(const GridField& a, const GridField& b) {
    require_same_grid(a, b);
    GridField out(a.grid_ptr(), a.alpha(), a.gauge());
    for (Helicity h : kHelicities)
        for (std::size_t i = 0; i < a.grid().size(); ++i) out.values(h)[i] = a.values(h)[i] - b.values(h)[i];
    return out;
}

inline GridField operator*(cplx z, const GridField& a) {
    return a.map([&](std::size_t, const CVec3& v) { return CVec3(z * v); });
}

// Position eigenvector psi_{r0,sigma}^(alpha)(k) = k^alpha e_{k,sigma} exp(-i k.r0), times an
// optional real window W(k, theta, phi).
inline GridField position_eigenvector(std::shared_ptr<const KGrid> grid, const Vec3& r0, Helicity s,
                                      AlphaWeight alpha, const GaugeSpec& gauge,
                                      const std::function<double(double, double, double)>& window = {}) {
    GridField f(grid, alpha, gauge);
    const KGrid& g = *grid;
    auto& v = f.values(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k = g.k(i), th = g.theta(i), ph = g.phi(i);
        const double w = window ? window(k, th, ph) : 1.0;
        v[i] = polarization(th, ph, s, gauge) * (w * std::pow(k, alpha.value()) * std::exp(-I * g.kvec(i).dot(r0)));
    }
    return f;
}

}  // namespace photonwf

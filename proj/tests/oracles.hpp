#pragma once

// Independent reference computations used by the tests.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Truncated Fock space over `slots` bosonic modes with at most nmax quanta each.
struct FockAlgebra {
    int slots, nmax, dim;
    std::vector<Mat> a;

    FockAlgebra(int slots_, int nmax_) : slots(slots_), nmax(nmax_) {
        const int d = nmax + 1;
        dim = 1;
        for (int i = 0; i < slots; ++i) dim *= d;
        Mat a1 = Mat::Zero(d, d);
        for (int n = 1; n < d; ++n) a1(n - 1, n) = std::sqrt(double(n));
        for (int s = 0; s < slots; ++s) {
            Mat op = Mat::Identity(1, 1);
            for (int t = 0; t < slots; ++t) op = kron(op, t == s ? a1 : Mat::Identity(d, d));
            a.push_back(op);
        }
    }

    static Mat kron(const Mat& x, const Mat& y) {
        Mat out(x.rows() * y.rows(), x.cols() * y.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    }

    Vec vacuum() const {
        Vec v = Vec::Zero(dim);
        v(0) = 1.0;
        return v;
    }

    // Normalized occupation-number basis state.
    Vec number_state(const std::vector<int>& n) const {
        Vec v = vacuum();
        double norm = 1.0;
        for (int s = 0; s < slots; ++s)
            for (int q = 0; q < n[s]; ++q) {
                v = a[s].adjoint() * v;
                norm *= q + 1;
            }
        return v / std::sqrt(norm);
    }

    // <0| a_i a_j |psi>
    cplx amplitude(int i, int j, const Vec& psi) const { return vacuum().dot(a[i] * (a[j] * psi)); }
};

// int d^3k exp(i k.d) over the shell kmin < |k| < kmax.
inline double shell_delta(double kmin, double kmax, double d) {
    if (d == 0.0) return 4.0 * std::numbers::pi * (kmax * kmax * kmax - kmin * kmin * kmin) / 3.0;
    auto F = [d](double k) { return (std::sin(k * d) - k * d * std::cos(k * d)) / (d * d * d); };
    return 4.0 * std::numbers::pi * (F(kmax) - F(kmin));
}

// J_l(x) by its defining power series; adequate for moderate x.
inline double bessel_series(int l, double x) {
    double term = 1.0;
    for (int i = 1; i <= l; ++i) term *= 0.5 * x / i;
    double sum = term;
    for (int m = 1; m < 200; ++m) {
        term *= -(0.25 * x * x) / (m * double(m + l));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Two collinear co-directed modes with equal amplitudes 1/sqrt2, same helicity, box volume V.
inline double two_mode_density(double k1, double k2, double alpha, double V, double z) {
    const double c = std::pow(k2 / k1, alpha) + std::pow(k1 / k2, alpha);
    return (1.0 + 0.5 * c * std::cos((k2 - k1) * z)) / V;
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace oracle

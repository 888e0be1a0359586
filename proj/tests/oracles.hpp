#pragma once

// Independent numerical oracles for the closed-form meter algebra. The idle
// pointer Gaussian is redefined locally on purpose: these routines must share
// only the convention with the library, not the formulas under test.

#include <weakmeas/meter.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace wmtest {

inline double oracle_phi(double q, double sigma) {
    const double s2 = sigma * sigma;
    return std::pow(2.0 * std::numbers::pi * s2, -0.25) * std::exp(-q * q / (4.0 * s2));
}

// d phi(q - s)/dq without the coefficient
inline double oracle_dphi(double q, double sigma) {
    return -q / (2.0 * sigma * sigma) * oracle_phi(q, sigma);
}

template <class F>
double trapezoid(F f, double lo, double hi, int n) {
    const double h = (hi - lo) / (n - 1);
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i + 1 < n; ++i) acc += f(lo + i * h);
    return acc * h;
}

inline double numeric_overlap(double a, double b, double sigma, int n = 8192) {
    const double lo = std::min(a, b) - 10.0 * sigma;
    const double hi = std::max(a, b) + 10.0 * sigma;
    return trapezoid(
        [&](double q) { return oracle_phi(q - a, sigma) * oracle_phi(q - b, sigma); }, lo, hi,
        n);
}

struct OracleMoments {
    double norm_sq;
    double mean_q;
    double mean_p;
};

// Grid moments of the pure pointer wavefunction psi(q) = sum_k c_k phi(q-s_k):
// <Q> from q |psi|^2 and <P> = Im \int conj(psi) psi' dq, with psi' assembled
// from the analytic Gaussian derivative.
inline OracleMoments numeric_moments(const std::vector<weakmeas::PointerTerm>& terms,
                                     double sigma, int n = 16384) {
    double lo = terms.front().shift, hi = lo;
    for (const auto& t : terms) {
        lo = std::min(lo, t.shift);
        hi = std::max(hi, t.shift);
    }
    lo -= 10.0 * sigma;
    hi += 10.0 * sigma;

    const auto psi = [&](double q) {
        weakmeas::Complex acc = 0.0;
        for (const auto& t : terms) acc += t.coeff * oracle_phi(q - t.shift, sigma);
        return acc;
    };
    const auto dpsi = [&](double q) {
        weakmeas::Complex acc = 0.0;
        for (const auto& t : terms) acc += t.coeff * oracle_dphi(q - t.shift, sigma);
        return acc;
    };

    OracleMoments m{};
    m.norm_sq = trapezoid([&](double q) { return std::norm(psi(q)); }, lo, hi, n);
    m.mean_q =
        trapezoid([&](double q) { return q * std::norm(psi(q)); }, lo, hi, n) / m.norm_sq;
    m.mean_p = trapezoid([&](double q) { return (std::conj(psi(q)) * dpsi(q)).imag(); }, lo,
                         hi, n) /
               m.norm_sq;
    return m;
}

// Equal-probability bin edges for a pointer readout, from its exact CDF by
// bisection, then Pearson's statistic for observed counts.
inline double chi_square_stat(const std::vector<double>& samples,
                              const weakmeas::PointerState& ps, int nbins) {
    double lo = ps.terms.front().shift, hi = lo;
    for (const auto& t : ps.terms) {
        lo = std::min(lo, t.shift);
        hi = std::max(hi, t.shift);
    }
    lo -= 12.0 * ps.meter.sigma;
    hi += 12.0 * ps.meter.sigma;
    const double total = ps.norm_sq();

    std::vector<double> edges;
    edges.reserve(nbins - 1);
    for (int k = 1; k < nbins; ++k) {
        const double target = total * k / nbins;
        double a = lo, b = hi;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (a + b);
            (ps.cdf(mid) < target ? a : b) = mid;
        }
        edges.push_back(0.5 * (a + b));
    }

    std::vector<double> counts(nbins, 0.0);
    for (double s : samples) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), s);
        counts[static_cast<std::size_t>(std::distance(edges.begin(), it))] += 1.0;
    }
    const double expected = static_cast<double>(samples.size()) / nbins;
    double stat = 0.0;
    for (double c : counts) stat += (c - expected) * (c - expected) / expected;
    return stat;
}

inline double chi_square_critical(int dof, double alpha = 0.001) {
    return boost::math::quantile(boost::math::chi_squared(dof), 1.0 - alpha);
}

}  // namespace wmtest

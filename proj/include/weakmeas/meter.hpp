#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "weakmeas/hilbert.hpp"

namespace weakmeas {

inline constexpr double kBranchPruneTol = 1e-14;
inline constexpr double kZeroPostselectionTol = 1e-15;

// Idle pointer wavefunction phi(q) = (2 pi sigma^2)^(-1/4) exp(-q^2/(4 sigma^2)),
// normalized so that Var(Q) = sigma^2 and Var(P) = 1/(4 sigma^2) with hbar = 1.
inline double pointer_wavefunction(double q, double sigma) {
    const double s2 = sigma * sigma;
    return std::pow(2.0 * std::numbers::pi * s2, -0.25) * std::exp(-q * q / (4.0 * s2));
}

// Overlap of two shifted idle pointers: int phi(q-a) phi(q-b) dq.
inline double gaussian_overlap(double a, double b, double sigma) {
    const double d = a - b;
    return std::exp(-d * d / (8.0 * sigma * sigma));
}

// One von Neumann pointer: the measured observable in spectral form, coupling
// strength g (pointer shift per unit eigenvalue), idle width sigma, and a
// label used to address the meter in reports and sweeps.
struct GaussianMeter {
    SpectralDecomposition observable;
    double g = 0.0;
    double sigma = 1.0;
    std::string label;

    GaussianMeter(SpectralDecomposition obs, double g_, double sigma_, std::string label_ = {})
        : observable(std::move(obs)), g(g_), sigma(sigma_), label(std::move(label_)) {
        if (observable.size() == 0)
            throw std::invalid_argument("GaussianMeter: observable has no spectral content");
        if (!(g >= 0.0)) throw std::invalid_argument("GaussianMeter: g must be nonnegative");
        if (!(sigma > 0.0)) throw std::invalid_argument("GaussianMeter: sigma must be positive");
    }

    Eigen::Index dim() const { return observable.dim(); }
};

// One branch of the entangled system-plus-pointers state: an unnormalized
// system component tagged with the pointer translation of every meter coupled
// so far (shift m belongs to meter m, in coupling order).
struct Branch {
    UnnormalizedVector component;
    std::vector<double> shifts;
};

// The joint state after zero or more couplings, kept exact at all g as a
// finite superposition: sum_b |v_b> (x) prod_m phi(q_m - s_{b,m}).
struct BranchedJointState {
    std::vector<GaussianMeter> meters;
    std::vector<Branch> branches;

    static BranchedJointState initial(const StateVector& system) {
        BranchedJointState js;
        js.branches.push_back({system.amplitudes(), {}});
        return js;
    }

    Eigen::Index dim() const { return branches.empty() ? 0 : branches.front().component.size(); }
};

// Product over meters of the pointer overlaps between branches i and j.
inline double branch_pair_overlap(const BranchedJointState& js, std::size_t i, std::size_t j) {
    double f = 1.0;
    for (std::size_t m = 0; m < js.meters.size(); ++m)
        f *= gaussian_overlap(js.branches[i].shifts[m], js.branches[j].shifts[m],
                              js.meters[m].sigma);
    return f;
}

// Tr rho for the joint state; stays at 1 for a unit-norm input because the
// coupling is unitary.
inline double total_norm_sq(const BranchedJointState& js) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < js.branches.size(); ++i)
        for (std::size_t j = 0; j < js.branches.size(); ++j)
            acc += js.branches[j].component.dot(js.branches[i].component) *
                   branch_pair_overlap(js, i, j);
    return acc.real();
}

// Couple one more meter via exp(-i g A (x) P): every branch splits along the
// observable's eigenspaces and the fresh pointer translates by g * a_k.
// Branches whose shift tuples coincide (for instance at g = 0) merge back
// together; components below the prune tolerance are dropped.
inline BranchedJointState couple(const BranchedJointState& joint, const GaussianMeter& meter) {
    if (joint.dim() != meter.dim())
        throw DimensionError("couple: meter dimension does not match the system");

    BranchedJointState out;
    out.meters = joint.meters;
    out.meters.push_back(meter);

    const auto& spec = meter.observable;
    std::vector<double> shift_of(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) shift_of[k] = meter.g * spec.eigenvalues[k];

    for (const Branch& b : joint.branches) {
        for (std::size_t k = 0; k < spec.size(); ++k) {
            Vec comp = spec.projectors[k] * b.component;
            std::vector<double> shifts = b.shifts;
            shifts.push_back(shift_of[k]);

            bool merged = false;
            for (Branch& existing : out.branches) {
                if (existing.shifts == shifts) {
                    existing.component += comp;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.branches.push_back({std::move(comp), std::move(shifts)});
        }
    }

    std::vector<Branch> kept;
    for (Branch& b : out.branches)
        if (b.component.norm() >= kBranchPruneTol) kept.push_back(std::move(b));
    out.branches = std::move(kept);
    return out;
}

// System-side unitary acting between couplings (or after all of them).
inline BranchedJointState apply_to_system(const BranchedJointState& joint, const Mat& u) {
    if (u.rows() != u.cols() || u.cols() != joint.dim())
        throw DimensionError("apply_to_system: operator dimension mismatch");
    BranchedJointState out = joint;
    for (Branch& b : out.branches) b.component = u * b.component;
    return out;
}

struct PointerTerm {
    Complex coeff;
    double shift;
};

// Postselected readout state of a single meter: the unnormalized pointer
// density sum_{kl} conj(c_k) c_l W_kl phi(q - s_k) phi(q - s_l). For a lone
// meter every W_kl is 1 and the state is the pure wavefunction
// sum_k c_k phi(q - s_k); with partner meters traced out, W_kl carries their
// pairwise Gaussian overlap factors and the state is mixed.
struct PointerState {
    GaussianMeter meter;
    std::vector<PointerTerm> terms;
    Eigen::MatrixXd pair_weights;  // symmetric, unit diagonal

    double norm_sq() const {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k)
            for (std::size_t l = 0; l < terms.size(); ++l)
                acc += std::conj(terms[k].coeff) * terms[l].coeff * pair_weights(k, l) *
                       gaussian_overlap(terms[k].shift, terms[l].shift, meter.sigma);
        return acc.real();
    }

    // Unnormalized readout density at q.
    double density(double q) const {
        const std::size_t n = terms.size();
        std::vector<double> phi(n);
        for (std::size_t k = 0; k < n; ++k)
            phi[k] = pointer_wavefunction(q - terms[k].shift, meter.sigma);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += std::norm(terms[k].coeff) * pair_weights(k, k) * phi[k] * phi[k];
            for (std::size_t l = k + 1; l < n; ++l)
                acc += 2.0 * (std::conj(terms[k].coeff) * terms[l].coeff).real() *
                       pair_weights(k, l) * phi[k] * phi[l];
        }
        return acc < 0.0 ? 0.0 : acc;
    }

    // Unnormalized integral of the density over (-inf, q]. Each cross term
    // phi_k phi_l is a width-sigma Gaussian centered at the shift midpoint,
    // scaled by the pair overlap.
    double cdf(double q) const {
        const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
        double acc = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            for (std::size_t l = 0; l < terms.size(); ++l) {
                const double mid = 0.5 * (terms[k].shift + terms[l].shift);
                const double ov =
                    gaussian_overlap(terms[k].shift, terms[l].shift, meter.sigma);
                const double cum = 0.5 * std::erfc(-(q - mid) / meter.sigma * inv_sqrt2);
                acc += (std::conj(terms[k].coeff) * terms[l].coeff).real() *
                       pair_weights(k, l) * ov * cum;
            }
        }
        return acc;
    }
};

struct PostselectionResult {
    double probability;
    std::vector<PointerState> pointers;  // one per meter, coupling order
};

// Project the system on |f> and trace it out. Branch b survives with
// amplitude c_b = <f|v_b>; the acceptance probability is the Hermitian form
// sum conj(c_i) c_j F_ij with F the full pointer overlap product. Each
// meter's own readout keeps its shifts explicit while the partners fold into
// pairwise weights.
inline PostselectionResult postselect(const BranchedJointState& joint, const StateVector& f) {
    if (joint.dim() != f.dim()) throw DimensionError("postselect: dimension mismatch");

    const std::size_t nb = joint.branches.size();
    const std::size_t nm = joint.meters.size();
    std::vector<Complex> coeff(nb);
    for (std::size_t b = 0; b < nb; ++b)
        coeff[b] = f.amplitudes().dot(joint.branches[b].component);

    Complex acc = 0.0;
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            acc += std::conj(coeff[i]) * coeff[j] * branch_pair_overlap(joint, i, j);
    const double prob = acc.real();
    if (prob < kZeroPostselectionTol)
        throw ZeroPostselectionError("postselect: acceptance probability is numerically zero");

    PostselectionResult out;
    out.probability = prob;
    out.pointers.reserve(nm);
    for (std::size_t m = 0; m < nm; ++m) {
        PointerState ps{joint.meters[m], {}, Eigen::MatrixXd::Ones(nb, nb)};
        ps.terms.reserve(nb);
        for (std::size_t b = 0; b < nb; ++b)
            ps.terms.push_back({coeff[b], joint.branches[b].shifts[m]});
        for (std::size_t i = 0; i < nb; ++i) {
            for (std::size_t j = i + 1; j < nb; ++j) {
                double w = 1.0;
                for (std::size_t o = 0; o < nm; ++o) {
                    if (o == m) continue;
                    w *= gaussian_overlap(joint.branches[i].shifts[o],
                                          joint.branches[j].shifts[o], joint.meters[o].sigma);
                }
                ps.pair_weights(i, j) = w;
                ps.pair_weights(j, i) = w;
            }
        }
        out.pointers.push_back(std::move(ps));
    }
    return out;
}

struct PointerMoments {
    double mean_q;
    double mean_p;
};

// Closed-form postselected pointer expectations. Both moments are bilinear
// sums over term pairs: Q picks up the shift midpoint, P the shift difference
// scaled by 1/(4 sigma^2), each weighted by the pair overlap. In the weak
// limit mean_q -> g Re A_w and mean_p -> g Im A_w / (2 sigma^2).
inline PointerMoments pointer_expectations(const PointerState& ps) {
    const double n = ps.norm_sq();
    if (!(n > 0.0) || n < kZeroPostselectionTol)
        throw ZeroNormError("pointer_expectations: pointer state has vanishing norm");

    const double s2 = ps.meter.sigma * ps.meter.sigma;
    double mean_q = 0.0;
    double mean_p = 0.0;
    for (std::size_t k = 0; k < ps.terms.size(); ++k) {
        const double wkk = ps.pair_weights(k, k);
        mean_q += std::norm(ps.terms[k].coeff) * wkk * ps.terms[k].shift;
        for (std::size_t l = k + 1; l < ps.terms.size(); ++l) {
            const Complex cross = std::conj(ps.terms[k].coeff) * ps.terms[l].coeff;
            const double ov =
                gaussian_overlap(ps.terms[k].shift, ps.terms[l].shift, ps.meter.sigma);
            const double w = ps.pair_weights(k, l) * ov;
            mean_q += 2.0 * cross.real() * w * 0.5 * (ps.terms[k].shift + ps.terms[l].shift);
            mean_p += cross.imag() * w * (ps.terms[l].shift - ps.terms[k].shift) / (2.0 * s2);
        }
    }
    return {mean_q / n, mean_p / n};
}

// <ref| rho_system |ref> with the pointers traced out and no postselection:
// rho = sum_{ij} F_ij |v_i><v_j| where F is the pointer overlap product.
// Measures how much the couplings alone disturbed the system.
inline double reduced_state_fidelity(const BranchedJointState& joint, const StateVector& ref) {
    if (joint.dim() != ref.dim()) throw DimensionError("reduced_state_fidelity: dimension mismatch");
    const std::size_t nb = joint.branches.size();
    std::vector<Complex> a(nb);
    for (std::size_t b = 0; b < nb; ++b) a[b] = ref.amplitudes().dot(joint.branches[b].component);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            acc += a[i] * std::conj(a[j]) * branch_pair_overlap(joint, i, j);
    return acc.real();
}

}  // namespace weakmeas

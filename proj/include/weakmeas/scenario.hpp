#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "weakmeas/hilbert.hpp"
#include "weakmeas/meter.hpp"
#include "weakmeas/random.hpp"

namespace weakmeas {

inline constexpr double kVanishingAmplitudeTol = 1e-12;

// The measurement window at the intermediate time. Meters act here while the
// system undergoes no internal evolution; the type has no slot for a unitary,
// which is what enforces that.
struct QuiescentWindow {
    std::vector<GaussianMeter> meters;
};

// A pre- and postselected experiment timeline: |in> at t_i, unitary segment
// u_pre up to the intermediate time, the quiescent window, segment u_post to
// t_f, then postselection on |f>. Construction rejects non-unitary segments
// and a vanishing overall transition amplitude <f| u_post u_pre |in>.
class Scenario {
public:
    Scenario(StateVector preselected, Mat u_pre, Mat u_post, StateVector postselected,
             QuiescentWindow window = {})
        : in_(std::move(preselected)),
          f_(std::move(postselected)),
          u_pre_(std::move(u_pre)),
          u_post_(std::move(u_post)),
          window_(std::move(window)) {
        const Eigen::Index d = in_.dim();
        if (f_.dim() != d) throw DimensionError("scenario: |in> and |f> dimensions differ");
        if (u_pre_.rows() != d || u_pre_.cols() != d)
            throw DimensionError("scenario: u_pre dimension mismatch");
        if (u_post_.rows() != d || u_post_.cols() != d)
            throw DimensionError("scenario: u_post dimension mismatch");
        if (!validate(u_pre_, OperatorRole::Unitary))
            throw NotUnitaryError("scenario: u_pre fails unitarity");
        if (!validate(u_post_, OperatorRole::Unitary))
            throw NotUnitaryError("scenario: u_post fails unitarity");
        for (const GaussianMeter& m : window_.meters)
            if (m.dim() != d)
                throw DimensionError("scenario: meter '" + m.label + "' dimension mismatch");

        at_window_ = u_pre_ * in_.amplitudes();
        effective_f_ = u_post_.adjoint() * f_.amplitudes();
        amplitude_ = effective_f_.dot(at_window_);
        if (std::abs(amplitude_) < kVanishingAmplitudeTol)
            throw VanishingAmplitudeError(
                "scenario: transition amplitude <f|U|in> vanishes; postselection is undefined");
    }

    Eigen::Index dim() const { return in_.dim(); }
    const StateVector& preselected() const { return in_; }
    const StateVector& postselected() const { return f_; }
    const Mat& u_pre() const { return u_pre_; }
    const Mat& u_post() const { return u_post_; }
    const QuiescentWindow& window() const { return window_; }

    // U(t_m, t_i)|in>; unit norm since u_pre is unitary.
    const Vec& state_at_window() const { return at_window_; }
    // U(t_f, t_m)^dagger |f>, the bra side propagated back to the window.
    const Vec& effective_postselected() const { return effective_f_; }
    Complex amplitude() const { return amplitude_; }

private:
    StateVector in_;
    StateVector f_;
    Mat u_pre_;
    Mat u_post_;
    QuiescentWindow window_;
    Vec at_window_;
    Vec effective_f_;
    Complex amplitude_;
};

// <f| u_post u_pre |in>
inline Complex transition_amplitude(const Scenario& s) { return s.amplitude(); }

inline double prob_transition(const Scenario& s) { return std::norm(s.amplitude()); }

// Born probability that a strong measurement of `basis` at the intermediate
// time yields outcome k, with no postselection: |P_k U(t_m,t_i)|in>|^2.
inline double prob_intermediate(const Scenario& s, std::size_t k,
                                const SpectralDecomposition& basis) {
    if (basis.dim() != s.dim()) throw DimensionError("prob_intermediate: basis dimension mismatch");
    if (k >= basis.size()) throw IndexError("prob_intermediate: outcome index out of range");
    return (basis.projectors[k] * s.state_at_window()).squaredNorm();
}

// Unnormalized two-step quantity |<f| u_post P_k u_pre |in>|^2: the chance of
// reaching |f> through channel k when a strong intermediate measurement gave
// outcome k. Summing over k does not reproduce prob_transition, because that
// sum drops the interference between channels.
inline double prob_via_channel(const Scenario& s, std::size_t k,
                               const SpectralDecomposition& basis) {
    if (basis.dim() != s.dim()) throw DimensionError("prob_via_channel: basis dimension mismatch");
    if (k >= basis.size()) throw IndexError("prob_via_channel: outcome index out of range");
    return std::norm(s.effective_postselected().dot(basis.projectors[k] * s.state_at_window()));
}

struct StrongOutcome {
    std::size_t eigenvalue_index;
    double probability;
    StateVector collapsed;
};

// Projective measurement with Born sampling and collapse. The outcome
// probability is the squared norm of the projected state; the collapsed state
// is that projection renormalized. Deterministic given the RandomSource.
inline StrongOutcome strong_measure(const StateVector& state, const SpectralDecomposition& basis,
                                    RandomSource& rng) {
    if (basis.dim() != state.dim()) throw DimensionError("strong_measure: basis dimension mismatch");

    std::vector<double> probs(basis.size());
    double total = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        probs[k] = (basis.projectors[k] * state.amplitudes()).squaredNorm();
        total += probs[k];
    }
    // total is 1 up to roundoff for a complete basis; scale the draw so the
    // last nonzero outcome absorbs the remainder.
    const double u = rng.next_double() * total;
    double cum = 0.0;
    std::size_t pick = basis.size() - 1;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        cum += probs[k];
        if (u < cum) {
            pick = k;
            break;
        }
    }
    while (probs[pick] <= 0.0 && pick > 0) --pick;

    UnnormalizedVector proj = basis.projectors[pick] * state.amplitudes();
    return {pick, probs[pick], StateVector::normalized(proj)};
}

}  // namespace weakmeas

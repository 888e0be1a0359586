#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "weakmeas/hilbert.hpp"
#include "weakmeas/scenario.hpp"

namespace weakmeas {

inline constexpr double kPresenceZeroTol = 1e-9;
inline constexpr double kOrthogonalityTol = 1e-10;

struct WeakValue {
    Complex value;
    std::string operator_label;
};

// A_w = <f|U(t_f,t_m) A U(t_m,t_i)|in> / <f|U(t_f,t_i)|in>. Linear in A, and
// generally complex and unbounded; the real part is what an ideal weak
// pointer reading converges to.
inline WeakValue weak_value(const Mat& op, const Scenario& s, std::string label = {}) {
    if (op.rows() != op.cols() || op.rows() != s.dim())
        throw DimensionError("weak_value: operator dimension mismatch");
    const Complex num = s.effective_postselected().dot(op * s.state_at_window());
    return {num / s.amplitude(), std::move(label)};
}

struct ChannelDecomposition {
    std::vector<Complex> channel_amplitudes;  // one per eigenspace, basis order
    Complex total;                            // equals the transition amplitude
};

// Insert the complete eigenspace family of `basis` at the intermediate time:
// amplitude k is <f| u_post P_k u_pre |in>, and the amplitudes sum to the
// total transition amplitude because sum_k P_k = 1.
inline ChannelDecomposition channel_decomposition(const Scenario& s,
                                                  const SpectralDecomposition& basis) {
    if (basis.dim() != s.dim())
        throw DimensionError("channel_decomposition: basis dimension mismatch");
    Mat sum = Mat::Zero(s.dim(), s.dim());
    for (const Mat& p : basis.projectors) sum += p;
    if ((sum - identity(s.dim())).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("channel_decomposition: basis is not complete");

    ChannelDecomposition out;
    out.total = 0.0;
    out.channel_amplitudes.reserve(basis.size());
    for (const Mat& p : basis.projectors) {
        const Complex a = s.effective_postselected().dot(p * s.state_at_window());
        out.channel_amplitudes.push_back(a);
        out.total += a;
    }
    return out;
}

enum class PresenceVerdict { Present, Absent };

inline const char* to_string(PresenceVerdict v) {
    return v == PresenceVerdict::Present ? "PRESENT" : "ABSENT";
}

// ABSENT exactly when |A_w| < zero_tol. The magnitude is what matters: a
// weak value of -1 is emphatically Present.
inline PresenceVerdict presence_verdict(const WeakValue& wv, double zero_tol = kPresenceZeroTol) {
    if (!(zero_tol > 0.0)) throw std::invalid_argument("presence_verdict: zero_tol must be positive");
    return std::abs(wv.value) < zero_tol ? PresenceVerdict::Absent : PresenceVerdict::Present;
}

struct ParadoxReport {
    WeakValue wv_o;
    WeakValue wv_1;
    WeakValue wv_sum;
    PresenceVerdict verdict_o;
    PresenceVerdict verdict_1;
    PresenceVerdict verdict_sum;
    bool contradiction;
};

// Evaluate the contradiction pattern for two orthogonal projectors: both
// individually Present while their sum projector P_o + P_1 comes out Absent.
// Weak values are additive, so this can only happen through cancellation of
// nonzero parts, which no classical occupation picture supports.
inline ParadoxReport paradox_report(const Scenario& s, const Mat& p_o, const Mat& p_1,
                                    double zero_tol = kPresenceZeroTol,
                                    std::string label_o = "P_o", std::string label_1 = "P_1") {
    if (p_o.rows() != p_o.cols() || p_o.rows() != s.dim() || p_1.rows() != p_1.cols() ||
        p_1.rows() != s.dim())
        throw DimensionError("paradox_report: projector dimension mismatch");
    if (!validate(p_o, OperatorRole::Projector))
        throw NotProjectorError("paradox_report: first operator is not a projector");
    if (!validate(p_1, OperatorRole::Projector))
        throw NotProjectorError("paradox_report: second operator is not a projector");
    if ((p_o * p_1).cwiseAbs().maxCoeff() > kOrthogonalityTol)
        throw NotOrthogonalError("paradox_report: projectors are not orthogonal");

    ParadoxReport r{weak_value(p_o, s, label_o),
                    weak_value(p_1, s, label_1),
                    weak_value(p_o + p_1, s, label_o + "+" + label_1),
                    PresenceVerdict::Absent,
                    PresenceVerdict::Absent,
                    PresenceVerdict::Absent,
                    false};
    r.verdict_o = presence_verdict(r.wv_o, zero_tol);
    r.verdict_1 = presence_verdict(r.wv_1, zero_tol);
    r.verdict_sum = presence_verdict(r.wv_sum, zero_tol);
    r.contradiction = r.verdict_o == PresenceVerdict::Present &&
                      r.verdict_1 == PresenceVerdict::Present &&
                      r.verdict_sum == PresenceVerdict::Absent;
    return r;
}

}  // namespace weakmeas

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "weakmeas/meter.hpp"
#include "weakmeas/random.hpp"
#include "weakmeas/scenario.hpp"
#include "weakmeas/weak_values.hpp"

namespace weakmeas {

inline constexpr int kPointerGridSize = 8192;
inline constexpr double kPointerGridPadding = 8.0;  // in units of sigma
inline constexpr std::int64_t kMinTrials = 100;
inline constexpr int kDefaultZeroTestK = 3;

// Exact postselected pointer states for all meters of a scenario: couple each
// window meter to u_pre|in>, evolve by u_post, project on |f>.
inline PostselectionResult postselected_pointers(const Scenario& s) {
    BranchedJointState joint =
        BranchedJointState::initial(StateVector(s.state_at_window(), 1e-9));
    for (const GaussianMeter& m : s.window().meters) joint = couple(joint, m);
    joint = apply_to_system(joint, s.u_post());
    return postselect(joint, s.postselected());
}

// Tabulated inverse CDF for one pointer readout. The density is a finite
// mixture of width-sigma Gaussians, so a trapezoid accumulation on a grid
// padded by several sigma beyond the extreme shifts captures it to far better
// than sampling accuracy.
class InverseCdfSampler {
public:
    explicit InverseCdfSampler(const PointerState& ps, int n = kPointerGridSize) {
        double lo = ps.terms.front().shift, hi = lo;
        for (const PointerTerm& t : ps.terms) {
            lo = std::min(lo, t.shift);
            hi = std::max(hi, t.shift);
        }
        lo_ = lo - kPointerGridPadding * ps.meter.sigma;
        dq_ = (hi + kPointerGridPadding * ps.meter.sigma - lo_) / (n - 1);

        cum_.resize(n);
        cum_[0] = 0.0;
        double prev = ps.density(lo_);
        for (int i = 1; i < n; ++i) {
            const double d = ps.density(lo_ + i * dq_);
            cum_[i] = cum_[i - 1] + 0.5 * (prev + d) * dq_;
            prev = d;
        }
        const double total = cum_.back();
        if (!(total > 0.0))
            throw ZeroNormError("InverseCdfSampler: pointer density integrates to zero");
        for (double& c : cum_) c /= total;
    }

    // Maps u in [0, 1) to a reading by inverting the tabulated CDF with
    // linear interpolation inside the bracketing grid cell.
    double sample(double u) const {
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        auto idx = static_cast<std::size_t>(std::distance(cum_.begin(), it));
        if (idx == 0) idx = 1;
        if (idx >= cum_.size()) idx = cum_.size() - 1;
        const double c0 = cum_[idx - 1], c1 = cum_[idx];
        const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        return lo_ + (static_cast<double>(idx - 1) + t) * dq_;
    }

private:
    double lo_ = 0.0;
    double dq_ = 0.0;
    std::vector<double> cum_;
};

struct TrialRecord {
    bool accepted = false;
    std::vector<double> readings;  // one per meter when accepted, else empty
};

// Per-scenario machinery reused across trials: the acceptance probability,
// the per-branch postselected coefficients and shifts, and the first meter's
// sampler (its marginal is trial independent). Later meters are sampled from
// the readout distribution conditioned on the earlier readings: reading q_j
// multiplies each branch coefficient by phi_j(q_j - s_{b,j}), while meters
// not yet read keep contributing pairwise overlap weights.
class TrialSampler {
public:
    explicit TrialSampler(const Scenario& s) : meters_(s.window().meters) {
        if (meters_.empty())
            throw std::invalid_argument("TrialSampler: scenario has no meters to sample");
        const PostselectionResult post = postselected_pointers(s);
        prob_ = std::min(post.probability, 1.0);
        pointers_ = post.pointers;

        const std::size_t nb = pointers_.front().terms.size();
        coeff_.reserve(nb);
        for (const PointerTerm& t : pointers_.front().terms) coeff_.push_back(t.coeff);
        shifts_.resize(meters_.size());
        for (std::size_t m = 0; m < meters_.size(); ++m) {
            shifts_[m].reserve(nb);
            for (const PointerTerm& t : pointers_[m].terms) shifts_[m].push_back(t.shift);
        }
        first_.emplace(pointers_.front());
    }

    double acceptance_probability() const { return prob_; }
    const std::vector<PointerState>& pointers() const { return pointers_; }

    TrialRecord run(RandomSource& rng) const {
        TrialRecord rec;
        if (rng.next_double() >= prob_) return rec;
        rec.accepted = true;
        rec.readings.resize(meters_.size());
        rec.readings[0] = first_->sample(rng.next_double());
        for (std::size_t m = 1; m < meters_.size(); ++m) {
            const InverseCdfSampler sampler(conditional_pointer(m, rec.readings));
            rec.readings[m] = sampler.sample(rng.next_double());
        }
        return rec;
    }

    // Readout state of meter m given the readings of meters 0..m-1.
    PointerState conditional_pointer(std::size_t m, const std::vector<double>& readings) const {
        const std::size_t nb = coeff_.size();
        PointerState ps{meters_[m], {}, Eigen::MatrixXd::Ones(nb, nb)};
        ps.terms.reserve(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            Complex c = coeff_[b];
            for (std::size_t j = 0; j < m; ++j)
                c *= pointer_wavefunction(readings[j] - shifts_[j][b], meters_[j].sigma);
            ps.terms.push_back({c, shifts_[m][b]});
        }
        for (std::size_t i = 0; i < nb; ++i) {
            for (std::size_t j = i + 1; j < nb; ++j) {
                double w = 1.0;
                for (std::size_t o = m + 1; o < meters_.size(); ++o)
                    w *= gaussian_overlap(shifts_[o][i], shifts_[o][j], meters_[o].sigma);
                ps.pair_weights(i, j) = w;
                ps.pair_weights(j, i) = w;
            }
        }
        return ps;
    }

private:
    std::vector<GaussianMeter> meters_;
    double prob_ = 0.0;
    std::vector<PointerState> pointers_;
    std::vector<Complex> coeff_;
    std::vector<std::vector<double>> shifts_;
    std::optional<InverseCdfSampler> first_;
};

// One postselected trial: the postselection draw, then one reading per meter
// when accepted.
inline TrialRecord run_once(const Scenario& s, RandomSource& rng) {
    return TrialSampler(s).run(rng);
}

struct Estimate {
    std::string meter_label;
    double g = 0.0;
    double mean_q = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n_accepted)
    std::int64_t n_accepted = 0;
    double acceptance_rate = 0.0;
    double weak_value_estimate = 0.0;  // mean_q / g
};

// Statistical presence verdict for a sampled estimate: ABSENT when the mean
// reading is within k standard errors of zero. Unlike the exact verdict this
// is resolution limited, which reports must flag.
inline PresenceVerdict statistical_verdict(const Estimate& e, int k = kDefaultZeroTestK) {
    return std::abs(e.mean_q) < k * e.std_error ? PresenceVerdict::Absent
                                                : PresenceVerdict::Present;
}

// Monte Carlo pointer statistics over n_trials independent trials. Trial i
// draws from the stream derive(i) of the master seed, so results are
// reproducible bit for bit regardless of n_workers; workers only partition
// the index range and accepted readings are aggregated in trial order.
inline std::vector<Estimate> estimate(const Scenario& s, std::int64_t n_trials,
                                      std::uint64_t seed, int n_workers = 1) {
    if (n_trials < kMinTrials)
        throw std::invalid_argument("estimate: n_trials must be at least 100");
    if (s.window().meters.empty())
        throw std::invalid_argument("estimate: scenario has no meters");
    if (n_workers < 1) n_workers = 1;
    const auto workers = static_cast<std::int64_t>(
        std::min<std::int64_t>(n_workers, std::max<std::int64_t>(n_trials / 1000, 1)));

    const TrialSampler sampler(s);
    const RandomSource master(seed);
    const std::size_t nm = s.window().meters.size();

    std::vector<std::vector<double>> chunk(static_cast<std::size_t>(workers));
    const auto work = [&](std::int64_t w) {
        std::vector<double>& out = chunk[static_cast<std::size_t>(w)];
        const std::int64_t lo = w * n_trials / workers;
        const std::int64_t hi = (w + 1) * n_trials / workers;
        for (std::int64_t i = lo; i < hi; ++i) {
            RandomSource rng = master.derive(static_cast<std::uint64_t>(i));
            const TrialRecord rec = sampler.run(rng);
            if (rec.accepted) out.insert(out.end(), rec.readings.begin(), rec.readings.end());
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (std::thread& t : pool) t.join();
    }

    std::vector<double> readings;  // flat, trial order, nm readings per trial
    for (const auto& c : chunk) readings.insert(readings.end(), c.begin(), c.end());
    const auto n_acc = static_cast<std::int64_t>(readings.size() / nm);
    if (n_acc < 2)
        throw TooFewAcceptedError("estimate: fewer than two trials were accepted");

    std::vector<Estimate> out;
    out.reserve(nm);
    for (std::size_t m = 0; m < nm; ++m) {
        const GaussianMeter& meter = s.window().meters[m];
        double mean = 0.0;
        for (std::int64_t i = 0; i < n_acc; ++i)
            mean += readings[static_cast<std::size_t>(i) * nm + m];
        mean /= static_cast<double>(n_acc);
        double varsum = 0.0;
        for (std::int64_t i = 0; i < n_acc; ++i) {
            const double d = readings[static_cast<std::size_t>(i) * nm + m] - mean;
            varsum += d * d;
        }
        const double se =
            std::sqrt(varsum / static_cast<double>(n_acc - 1) / static_cast<double>(n_acc));
        out.push_back({meter.label, meter.g, mean, se, n_acc,
                       static_cast<double>(n_acc) / static_cast<double>(n_trials),
                       mean / meter.g});
    }
    return out;
}

enum class SweepMode { Exact, Sampled };

struct SweepPoint {
    double g = 0.0;
    double mean_q_over_g = 0.0;
    double std_error = 0.0;  // of mean_q_over_g; zero in exact mode
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double extrapolated = 0.0;   // w in the fit mean_q/g = w + c g^2
    double fit_curvature = 0.0;  // c
    double fit_residual = 0.0;   // rms residual of the fit
};

// Evaluate meanQ/g for one meter across a strictly decreasing list of
// coupling strengths and extrapolate to g -> 0. The postselected pointer
// deflection is even in the meter disturbance, so the leading finite-g error
// is quadratic and a two-parameter fit in g^2 removes it.
inline SweepResult convergence_sweep(const Scenario& s, const std::string& meter_label,
                                     const std::vector<double>& g_list, SweepMode mode,
                                     std::uint64_t seed = 0, std::int64_t n_trials = 100000) {
    if (g_list.size() < 3)
        throw std::invalid_argument("convergence_sweep: need at least three g values");
    for (std::size_t i = 0; i < g_list.size(); ++i) {
        if (!(g_list[i] > 0.0))
            throw std::invalid_argument("convergence_sweep: g values must be positive");
        if (i > 0 && !(g_list[i] < g_list[i - 1]))
            throw std::invalid_argument("convergence_sweep: g values must be strictly decreasing");
    }
    std::size_t target = s.window().meters.size();
    for (std::size_t m = 0; m < s.window().meters.size(); ++m) {
        if (s.window().meters[m].label == meter_label) {
            if (target != s.window().meters.size())
                throw std::invalid_argument("convergence_sweep: meter label is ambiguous");
            target = m;
        }
    }
    if (target == s.window().meters.size())
        throw std::invalid_argument("convergence_sweep: no meter labeled '" + meter_label + "'");

    const RandomSource base(seed);
    SweepResult out;
    out.points.reserve(g_list.size());
    for (std::size_t i = 0; i < g_list.size(); ++i) {
        QuiescentWindow window = s.window();
        window.meters[target].g = g_list[i];
        const Scenario at_g(s.preselected(), s.u_pre(), s.u_post(), s.postselected(),
                            std::move(window));
        SweepPoint pt;
        pt.g = g_list[i];
        if (mode == SweepMode::Exact) {
            const PostselectionResult post = postselected_pointers(at_g);
            pt.mean_q_over_g = pointer_expectations(post.pointers[target]).mean_q / pt.g;
        } else {
            std::uint64_t point_seed = base.derive(static_cast<std::uint64_t>(i)).next_u64();
            const std::vector<Estimate> ests = estimate(at_g, n_trials, point_seed);
            pt.mean_q_over_g = ests[target].weak_value_estimate;
            pt.std_error = ests[target].std_error / pt.g;
        }
        out.points.push_back(pt);
    }

    // Ordinary least squares for y = w + c x with x = g^2.
    const auto n = static_cast<double>(out.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const SweepPoint& p : out.points) {
        const double x = p.g * p.g;
        sx += x;
        sy += p.mean_q_over_g;
        sxx += x * x;
        sxy += x * p.mean_q_over_g;
    }
    const double denom = n * sxx - sx * sx;
    out.fit_curvature = (n * sxy - sx * sy) / denom;
    out.extrapolated = (sy - out.fit_curvature * sx) / n;
    double rss = 0.0;
    for (const SweepPoint& p : out.points) {
        const double r = p.mean_q_over_g - out.extrapolated - out.fit_curvature * p.g * p.g;
        rss += r * r;
    }
    out.fit_residual = std::sqrt(rss / n);
    return out;
}

}  // namespace weakmeas

#pragma once

#include <json.hpp>

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "weakmeas/monte_carlo.hpp"
#include "weakmeas/scenario.hpp"
#include "weakmeas/weak_values.hpp"

namespace weakmeas {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "weakmeas/report/v1";

// %.12g rendering used for all numbers in the text format.
inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string fmt12(Complex z) {
    const double im = z.imag();
    return fmt12(z.real()) + (im < 0.0 ? " - " : " + ") + fmt12(std::abs(im)) + "i";
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

struct WeakValueEntry {
    WeakValue wv;
    PresenceVerdict verdict;
};

struct ParadoxSection {
    ParadoxReport report;
};

struct SweepSection {
    std::string meter_label;
    SweepMode mode;
    SweepResult result;
};

// Everything a CLI command reports, in one structure that renders either as
// human-readable text or as a stable machine document. The machine format
// holds full-precision numbers and no wall-clock data, so a rerun with the
// same flags and seed is byte identical.
struct Report {
    std::string command;          // analyze | simulate | sweep
    std::string scenario_source;  // "builtin:three-box" or the document path
    Eigen::Index dim = 0;
    std::vector<GaussianMeter> meters;
    Complex amplitude;
    double prob = 0.0;
    double zero_tol = kPresenceZeroTol;

    std::vector<WeakValueEntry> weak_values;
    std::optional<ParadoxSection> paradox;

    std::vector<Estimate> estimates;  // simulate
    std::int64_t n_trials = 0;
    std::uint64_t seed = 0;
    int zero_test_k = kDefaultZeroTestK;

    std::optional<SweepSection> sweep;

    Json to_machine() const {
        Json j;
        j["schema"] = kReportSchema;
        j["command"] = command;
        Json sc;
        sc["source"] = scenario_source;
        sc["dim"] = dim;
        sc["transition_amplitude"] = to_json(amplitude);
        sc["prob_transition"] = prob;
        sc["meters"] = Json::array();
        for (const GaussianMeter& m : meters)
            sc["meters"].push_back({{"label", m.label}, {"g", m.g}, {"sigma", m.sigma}});
        j["scenario"] = sc;
        j["zero_tol"] = zero_tol;

        if (!weak_values.empty()) {
            j["weak_values"] = Json::array();
            for (const WeakValueEntry& e : weak_values)
                j["weak_values"].push_back({{"label", e.wv.operator_label},
                                            {"value", to_json(e.wv.value)},
                                            {"verdict", to_string(e.verdict)}});
        }
        if (paradox) {
            const ParadoxReport& r = paradox->report;
            j["paradox"] = {
                {"labels",
                 {r.wv_o.operator_label, r.wv_1.operator_label, r.wv_sum.operator_label}},
                {"weak_values", {to_json(r.wv_o.value), to_json(r.wv_1.value),
                                 to_json(r.wv_sum.value)}},
                {"verdicts", {to_string(r.verdict_o), to_string(r.verdict_1),
                              to_string(r.verdict_sum)}},
                {"contradiction", r.contradiction}};
        }
        if (!estimates.empty()) {
            j["trials"] = n_trials;
            j["seed"] = seed;
            j["zero_test_k"] = zero_test_k;
            j["estimates"] = Json::array();
            for (const Estimate& e : estimates)
                j["estimates"].push_back(
                    {{"label", e.meter_label},
                     {"g", e.g},
                     {"mean_q", e.mean_q},
                     {"std_error", e.std_error},
                     {"n_accepted", e.n_accepted},
                     {"acceptance_rate", e.acceptance_rate},
                     {"weak_value_estimate", e.weak_value_estimate},
                     {"verdict", to_string(statistical_verdict(e, zero_test_k))}});
        }
        if (sweep) {
            Json sj;
            sj["meter"] = sweep->meter_label;
            sj["mode"] = sweep->mode == SweepMode::Exact ? "exact" : "sampled";
            sj["points"] = Json::array();
            for (const SweepPoint& p : sweep->result.points)
                sj["points"].push_back({{"g", p.g},
                                        {"mean_q_over_g", p.mean_q_over_g},
                                        {"std_error", p.std_error}});
            sj["extrapolated"] = sweep->result.extrapolated;
            sj["curvature"] = sweep->result.fit_curvature;
            sj["fit_residual"] = sweep->result.fit_residual;
            j["sweep"] = sj;
        }
        return j;
    }

    // timestamp is injected by the caller so this stays a pure function; pass
    // an empty string to omit the line.
    std::string to_text(const std::string& timestamp) const {
        std::ostringstream os;
        os << "weakmeas " << command << " report\n";
        if (!timestamp.empty()) os << "generated: " << timestamp << "\n";
        os << "scenario: " << scenario_source << " (dim " << dim << ")\n";
        if (!meters.empty()) {
            os << "meters:\n";
            for (const GaussianMeter& m : meters)
                os << "  " << m.label << "  g=" << fmt12(m.g) << "  sigma=" << fmt12(m.sigma)
                   << "\n";
        }
        os << "transition amplitude: " << fmt12(amplitude) << "\n";
        os << "prob(in -> f): " << fmt12(prob) << "\n";

        if (!weak_values.empty()) {
            os << "weak values (zero_tol " << fmt12(zero_tol) << "):\n";
            for (const WeakValueEntry& e : weak_values)
                os << "  " << e.wv.operator_label << ": " << fmt12(e.wv.value) << "  "
                   << to_string(e.verdict) << "\n";
        }
        if (paradox) {
            const ParadoxReport& r = paradox->report;
            os << "paradox pattern:\n";
            os << "  " << r.wv_o.operator_label << ": " << fmt12(r.wv_o.value) << "  "
               << to_string(r.verdict_o) << "\n";
            os << "  " << r.wv_1.operator_label << ": " << fmt12(r.wv_1.value) << "  "
               << to_string(r.verdict_1) << "\n";
            os << "  " << r.wv_sum.operator_label << ": " << fmt12(r.wv_sum.value) << "  "
               << to_string(r.verdict_sum) << "\n";
            os << "  contradiction: " << (r.contradiction ? "yes" : "no") << "\n";
        }
        if (!estimates.empty()) {
            os << "trials: " << n_trials << "  seed: " << seed << "\n";
            os << "estimates (zero test: " << zero_test_k << " standard errors):\n";
            for (const Estimate& e : estimates) {
                os << "  " << e.meter_label << ": mean_q=" << fmt12(e.mean_q)
                   << "  std_error=" << fmt12(e.std_error)
                   << "  weak_value_estimate=" << fmt12(e.weak_value_estimate)
                   << "  n_accepted=" << e.n_accepted
                   << "  acceptance_rate=" << fmt12(e.acceptance_rate) << "  "
                   << to_string(statistical_verdict(e, zero_test_k)) << "\n";
            }
        }
        if (sweep) {
            os << "sweep of meter " << sweep->meter_label << " ("
               << (sweep->mode == SweepMode::Exact ? "exact" : "sampled") << "):\n";
            for (const SweepPoint& p : sweep->result.points) {
                os << "  g=" << fmt12(p.g) << "  mean_q/g=" << fmt12(p.mean_q_over_g);
                if (p.std_error > 0.0) os << "  std_error=" << fmt12(p.std_error);
                os << "\n";
            }
            os << "  extrapolated: " << fmt12(sweep->result.extrapolated) << "\n";
            os << "  curvature: " << fmt12(sweep->result.fit_curvature) << "\n";
            os << "  fit residual: " << fmt12(sweep->result.fit_residual) << "\n";
        }
        return os.str();
    }
};

}  // namespace weakmeas

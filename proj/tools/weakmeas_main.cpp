// Command-line front end: analytic weak-value reports, Monte Carlo pointer
// simulation, and weak-limit convergence sweeps over scenario documents or
// the built-in three-box arrangement.

#include <CLI11.hpp>

#include <weakmeas/weakmeas.hpp>

#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace weakmeas;

// Meters created from --pair / --meter flags use these couplings; documents
// set their own.
constexpr double kFlagMeterG = 0.05;
constexpr double kFlagMeterSigma = 1.0;

struct CommonArgs {
    std::string scenario_path;
    std::string builtin;
    std::vector<std::string> pair;
    std::string meter_label;
    double zero_tol = kPresenceZeroTol;
    std::string format = "text";
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_meter) {
    cmd->add_option("scenario", a.scenario_path, "Scenario document (JSON)");
    cmd->add_option("--builtin", a.builtin, "Built-in scenario name (three-box)");
    cmd->add_option("--pair", a.pair,
                    "Two basis kets; attaches meters for both projectors and their sum")
        ->expected(2);
    if (with_meter)
        cmd->add_option("--meter", a.meter_label,
                        "Meter label; on a built-in scenario, a basis ket to attach a "
                        "projector meter for");
    cmd->add_option("--zero-tol", a.zero_tol, "Presence threshold on |weak value|")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", a.format, "Output format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->capture_default_str();
    cmd->add_option("--out", a.out_path, "Write the report to this file instead of stdout");
}

bool has_meter_label(const QuiescentWindow& w, const std::string& label) {
    for (const GaussianMeter& m : w.meters)
        if (m.label == label) return true;
    return false;
}

Scenario resolve_scenario(const CommonArgs& a) {
    if (!a.builtin.empty() && !a.scenario_path.empty())
        throw std::invalid_argument("give either a scenario document or --builtin, not both");
    if (a.builtin.empty() && a.scenario_path.empty())
        throw std::invalid_argument("no scenario given; pass a document path or --builtin");

    if (!a.builtin.empty()) {
        if (a.builtin != "three-box")
            throw std::invalid_argument("unknown builtin '" + a.builtin +
                                        "' (available: three-box)");
        QuiescentWindow window;
        if (!a.pair.empty()) {
            const Eigen::Index k1 = parse_ket_label(a.pair[0], 3);
            const Eigen::Index k2 = parse_ket_label(a.pair[1], 3);
            if (k1 == k2) throw std::invalid_argument("--pair kets must differ");
            window = pair_window(3, k1, k2, kFlagMeterG, kFlagMeterSigma);
        }
        if (!a.meter_label.empty() && !has_meter_label(window, a.meter_label)) {
            const Eigen::Index k = parse_ket_label(a.meter_label, 3);
            window.meters.push_back(projector_meter(basis_projector(3, {k}), kFlagMeterG,
                                                    kFlagMeterSigma, ket_name(k)));
        }
        return three_box(std::move(window));
    }
    return load_scenario_file(a.scenario_path);
}

Report base_report(std::string command, const CommonArgs& a, const Scenario& s) {
    Report r;
    r.command = std::move(command);
    r.scenario_source = a.builtin.empty() ? a.scenario_path : "builtin:" + a.builtin;
    r.dim = s.dim();
    r.meters = s.window().meters;
    r.amplitude = transition_amplitude(s);
    r.prob = prob_transition(s);
    r.zero_tol = a.zero_tol;
    return r;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const Report& r, const CommonArgs& a) {
    std::string body;
    if (a.format == "machine")
        body = r.to_machine().dump(2) + "\n";
    else
        body = r.to_text(utc_now());

    if (a.out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(a.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write to '" + a.out_path + "'");
    out << body;
}

// Weak values reported by analyze: the scenario's meter observables when it
// has meters, otherwise the computational-basis channel projectors.
void fill_weak_values(Report& r, const Scenario& s, double zero_tol) {
    if (!s.window().meters.empty()) {
        for (const GaussianMeter& m : s.window().meters) {
            const WeakValue wv = weak_value(m.observable.reconstruct(), s, m.label);
            r.weak_values.push_back({wv, presence_verdict(wv, zero_tol)});
        }
        return;
    }
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
        const WeakValue wv =
            weak_value(basis_projector(s.dim(), {k}), s, ket_name(k));
        r.weak_values.push_back({wv, presence_verdict(wv, zero_tol)});
    }
}

int cmd_analyze(const CommonArgs& a) {
    const Scenario s = resolve_scenario(a);
    Report r = base_report("analyze", a, s);
    fill_weak_values(r, s, a.zero_tol);
    if (!a.pair.empty()) {
        const Eigen::Index k1 = parse_ket_label(a.pair[0], s.dim());
        const Eigen::Index k2 = parse_ket_label(a.pair[1], s.dim());
        r.paradox = ParadoxSection{paradox_report(s, basis_projector(s.dim(), {k1}),
                                                  basis_projector(s.dim(), {k2}), a.zero_tol,
                                                  ket_name(k1), ket_name(k2))};
    }
    emit(r, a);
    return 0;
}

int n_default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

int cmd_simulate(const CommonArgs& a, std::int64_t trials, std::uint64_t seed) {
    const Scenario s = resolve_scenario(a);
    if (s.window().meters.empty())
        throw std::invalid_argument(
            "scenario has no meters to simulate; add meters to the document or use "
            "--pair/--meter with a builtin");
    Report r = base_report("simulate", a, s);
    r.n_trials = trials;
    r.seed = seed;
    r.estimates = estimate(s, trials, seed, n_default_workers());
    emit(r, a);
    return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& g_csv, const std::string& mode_name,
              std::int64_t trials, std::uint64_t seed) {
    if (a.meter_label.empty()) throw std::invalid_argument("sweep requires --meter LABEL");
    std::vector<double> g_list;
    std::stringstream ss(g_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            const double g = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            g_list.push_back(g);
        } catch (const std::exception&) {
            throw std::invalid_argument("--g-list entry '" + tok + "' is not a number");
        }
    }

    const Scenario s = resolve_scenario(a);
    const SweepMode mode = mode_name == "exact" ? SweepMode::Exact : SweepMode::Sampled;
    Report r = base_report("sweep", a, s);
    r.sweep = SweepSection{a.meter_label, mode,
                           convergence_sweep(s, a.meter_label, g_list, mode, seed, trials)};
    emit(r, a);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak measurement toolkit: weak values, Gaussian pointer meters, and the "
                 "projector contradiction pattern"};
    app.require_subcommand(1);

    CommonArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Exact weak values and verdicts");
    add_common(analyze, analyze_args, false);

    CommonArgs sim_args;
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo pointer readout");
    add_common(simulate, sim_args, true);
    simulate->add_option("--trials", trials, "Number of trials")->capture_default_str();
    simulate->add_option("--seed", seed, "Master seed")->capture_default_str();

    CommonArgs sweep_args;
    std::string g_csv;
    std::string mode = "exact";
    std::int64_t sweep_trials = 100000;
    std::uint64_t sweep_seed = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "Weak-limit convergence sweep");
    add_common(sweep, sweep_args, true);
    sweep->add_option("--g-list", g_csv, "Comma-separated decreasing coupling strengths")
        ->required();
    sweep->add_option("--mode", mode, "Evaluation mode")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    sweep->add_option("--trials", sweep_trials, "Trials per g in sampled mode")
        ->capture_default_str();
    sweep->add_option("--seed", sweep_seed, "Master seed in sampled mode")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (analyze->parsed()) return cmd_analyze(analyze_args);
        if (simulate->parsed()) return cmd_simulate(sim_args, trials, seed);
        return cmd_sweep(sweep_args, g_csv, mode, sweep_trials, sweep_seed);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const StatisticalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

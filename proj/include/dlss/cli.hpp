#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlss/checks.hpp"
#include "dlss/experiments.hpp"
#include "dlss/io.hpp"
#include "dlss/simulation.hpp"
#include "dlss/version.hpp"

// Command-line front end: simulate, convergence and check.
//
// Exit codes: 0 success, 1 bad arguments, 2 numerical failure (partial
// outputs are still written). Each subcommand is its own CLI11 app so a
// --config TOML file can use the flag names as flat keys.

namespace dlss::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_failure = 2;

struct Streams {
    std::ostream& out = std::cout;
    std::ostream& err = std::cerr;
};

namespace detail {

using json = nlohmann::ordered_json;

inline std::string join_args(const std::string& command, const std::vector<std::string>& args) {
    std::string s = "dlss " + command;
    for (const auto& a : args) s += ' ' + a;
    return s;
}

inline json reals(const std::vector<double>& xs) {
    json j = json::array();
    for (double x : xs) j.push_back(x);
    return j;
}

/// Writes the CSV bodies, then manifest.json listing them with checksums.
class OutputSet {
public:
    OutputSet(std::filesystem::path dir, std::string command, json config)
        : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)),
          started_(io::utc_timestamp()) {
        std::filesystem::create_directories(dir_);
    }

    void add(const std::string& name, const std::string& body) {
        io::write_file(dir_ / name, body);
        outputs_.push_back({{"path", name}, {"sha256", io::sha256_hex(body)}});
    }

    void finish(const std::string& status) {
        json m;
        m["command"] = command_;
        m["config"] = config_;
        m["version"] = std::string(version);
        m["started"] = started_;
        m["finished"] = io::utc_timestamp();
        m["status"] = status;
        m["outputs"] = outputs_;
        io::write_file(dir_ / "manifest.json", m.dump(2) + '\n');
    }

private:
    std::filesystem::path dir_;
    std::string command_;
    json config_;
    std::string started_;
    json outputs_ = json::array();
};

inline InitialCondition<double> parse_init(const std::string& tag) {
    constexpr std::string_view file_prefix = "file:";
    if (tag.starts_with(file_prefix)) {
        const std::string path = tag.substr(file_prefix.size());
        if (path.empty()) throw DomainError("--init file: needs a path");
        return {InitialKind::custom_samples, io::read_samples(path)};
    }
    const auto kind = parse_initial_kind(tag);
    if (kind == InitialKind::custom_samples) throw DomainError("use --init file:<path> for custom samples");
    return {kind, {}};
}

inline int parse_or_exit(CLI::App& app, std::vector<std::string> args, Streams io) {
    std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        io.out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        io.err << app.get_name() << ": " << e.what() << '\n';
        return exit_usage;
    }
    return -1;
}

} // namespace detail

/// dlss simulate: one relaxation run, snapshots.csv + diagnostics.csv.
inline int cmd_simulate(const std::vector<std::string>& args, Streams io = {}) {
    CLI::App app{"Run the scheme from an initial datum to t_end", "dlss simulate"};
    std::string init = "cos16-single";
    double delta = 1, tau = 1e-6, t_end = 1.5e-3, newton_tol = NewtonParams<double>{}.tol_residual;
    std::size_t n = 200;
    int stride = 1;
    std::vector<double> snapshots;
    std::string out;
    app.set_config("--config", "", "TOML file with flag names as keys");
    app.add_option("--init", init, "cos16-single | cos16-double | constant | file:<path>")->capture_default_str();
    app.add_option("--delta", delta, "dispersion parameter, >= 0")->capture_default_str();
    app.add_option("--tau", tau, "time step, 0 < tau < 1")->capture_default_str();
    app.add_option("--n", n, "grid nodes, >= 5")->capture_default_str();
    app.add_option("--t-end", t_end, "final time")->capture_default_str();
    app.add_option("--snapshots", snapshots, "comma-separated snapshot times")->delimiter(',');
    app.add_option("--diag-stride", stride, "record diagnostics every k steps")->capture_default_str();
    app.add_option("--newton-tol", newton_tol, "Newton residual tolerance")->capture_default_str();
    app.add_option("--out", out, "output directory")->required();
    if (const int rc = detail::parse_or_exit(app, args, io); rc >= 0) return rc;

    try {
        SimulationConfig<double> cfg{SchemeParams<double>(Grid<double>(n), tau, delta)};
        cfg.initial = detail::parse_init(init);
        cfg.t_end = t_end;
        cfg.diagnostics_stride = stride;
        cfg.newton.tol_residual = newton_tol;
        if (snapshots.empty()) {
            for (double t : default_snapshot_times<double>())
                if (t <= t_end) snapshots.push_back(t);
            if (snapshots.empty() || snapshots.back() != t_end) snapshots.push_back(t_end);
        }
        cfg.snapshot_times = snapshots;
        cfg.validate();
        (void)initial_density(cfg);

        detail::json config;
        config["init"] = init;
        config["delta"] = delta;
        config["tau"] = tau;
        config["n"] = n;
        config["t_end"] = t_end;
        config["snapshots"] = detail::reals(snapshots);
        config["diag_stride"] = stride;
        config["newton_tol"] = newton_tol;
        detail::OutputSet outputs(out, detail::join_args("simulate", args), config);

        const auto traj = run(cfg);
        outputs.add("snapshots.csv", io::snapshots_csv(traj));
        outputs.add("diagnostics.csv", io::diagnostics_csv(traj));
        outputs.finish(traj.failed ? "failed: " + traj.failure : "ok");
        if (traj.failed) {
            io.err << "simulate: solver failure at " << traj.failure << '\n';
            return exit_failure;
        }
        io.out << "simulate: " << traj.steps_taken << " steps, " << traj.snapshots.size() << " snapshots -> "
               << out << '\n';
        return exit_ok;
    } catch (const DomainError& e) {
        io.err << "simulate: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        io.err << "simulate: " << e.what() << '\n';
        return exit_failure;
    }
}

/// dlss convergence: temporal or spatial convergence study, convergence.csv.
inline int cmd_convergence(const std::vector<std::string>& args, Streams io = {}) {
    CLI::App app{"Observed convergence rates against a reference run", "dlss convergence"};
    const TimeStudySpec<double> time_defaults;
    const SpaceStudySpec<double> space_defaults;
    std::string study = "time", init = "cos16-single", out;
    std::vector<double> taus = time_defaults.taus;
    std::vector<std::size_t> ns = space_defaults.ns;
    double tau_ref = time_defaults.tau_ref, tau = space_defaults.tau, delta = time_defaults.delta;
    double t_compare = time_defaults.t_compare, newton_tol = NewtonParams<double>{}.tol_residual;
    std::size_t n = time_defaults.n, n_ref = space_defaults.n_ref;
    app.set_config("--config", "", "TOML file with flag names as keys");
    app.add_option("--study", study, "time | space")->check(CLI::IsMember({"time", "space"}))->capture_default_str();
    app.add_option("--taus", taus, "time steps of the time study")->delimiter(',');
    app.add_option("--tau-ref", tau_ref, "reference time step")->capture_default_str();
    app.add_option("--n", n, "grid nodes of the time study")->capture_default_str();
    app.add_option("--ns", ns, "grids of the space study (must divide --n-ref)")->delimiter(',');
    app.add_option("--n-ref", n_ref, "reference grid of the space study")->capture_default_str();
    app.add_option("--tau", tau, "time step of the space study")->capture_default_str();
    app.add_option("--t-compare", t_compare, "comparison time")->capture_default_str();
    app.add_option("--delta", delta, "dispersion parameter")->capture_default_str();
    app.add_option("--init", init, "cos16-single | cos16-double | constant | file:<path>")->capture_default_str();
    app.add_option("--newton-tol", newton_tol, "Newton residual tolerance")->capture_default_str();
    app.add_option("--out", out, "output directory")->required();
    if (const int rc = detail::parse_or_exit(app, args, io); rc >= 0) return rc;

    std::optional<detail::OutputSet> outputs;
    try {
        NewtonParams<double> newton;
        newton.tol_residual = newton_tol;
        newton.validate();
        const auto ic = detail::parse_init(init);

        detail::json config;
        config["study"] = study;
        config["init"] = init;
        config["delta"] = delta;
        config["t_compare"] = t_compare;
        config["newton_tol"] = newton_tol;
        if (study == "time") {
            config["taus"] = detail::reals(taus);
            config["tau_ref"] = tau_ref;
            config["n"] = n;
        } else {
            config["ns"] = ns;
            config["n_ref"] = n_ref;
            config["tau"] = tau;
        }

        auto run_study = [&]() {
            if (study == "time") {
                TimeStudySpec<double> spec{n, tau_ref, taus, delta, ic, t_compare, newton};
                // Parameter checks happen before any output is created.
                (void)SchemeParams<double>(Grid<double>(n), tau_ref, delta);
                for (double t : taus) (void)SchemeParams<double>(Grid<double>(n), t, delta);
                outputs.emplace(out, detail::join_args("convergence", args), config);
                return convergence_time_study(spec);
            }
            SpaceStudySpec<double> spec{ns, n_ref, tau, delta, ic, t_compare, newton};
            (void)SchemeParams<double>(Grid<double>(n_ref), tau, delta);
            for (std::size_t m : ns) {
                if (m < Grid<double>::min_nodes || m > n_ref || n_ref % m != 0) {
                    throw DomainError("space sweep is not nested: n=" + std::to_string(m) +
                                      " does not divide n_ref=" + std::to_string(n_ref));
                }
            }
            outputs.emplace(out, detail::join_args("convergence", args), config);
            return convergence_space_study(spec);
        };

        const auto report = run_study();
        outputs->add("convergence.csv", io::convergence_csv(report));
        outputs->finish("ok");
        for (const auto& r : report.rows) {
            io.out << io::format_real(r.parameter) << "  error " << io::format_real(r.error) << "  rate "
                   << (r.rate ? io::format_real(*r.rate) : std::string("-")) << '\n';
        }
        return exit_ok;
    } catch (const StudyError<double>& e) {
        if (outputs) {
            outputs->add("convergence.csv", io::convergence_csv(e.partial()));
            outputs->finish(std::string("failed: ") + e.what());
        }
        io.err << "convergence: " << e.what() << '\n';
        return exit_failure;
    } catch (const DomainError& e) {
        io.err << "convergence: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        io.err << "convergence: " << e.what() << '\n';
        return exit_failure;
    }
}

/// dlss check: randomized identity suites, one line per suite.
inline int cmd_check(const std::vector<std::string>& args, Streams io = {}) {
    CLI::App app{"Randomized checks of the exact discrete identities", "dlss check"};
    std::uint64_t seed = 20240607;
    int trials = 200;
    app.set_config("--config", "", "TOML file with flag names as keys");
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--trials", trials, "trials per suite, >= 1")->capture_default_str();
    if (const int rc = detail::parse_or_exit(app, args, io); rc >= 0) return rc;

    std::vector<checks::SuiteResult> results;
    try {
        results = checks::run_all(seed, trials);
    } catch (const DomainError& e) {
        io.err << "check: " << e.what() << '\n';
        return exit_usage;
    }
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        io.out << (r.passed ? "PASS " : "FAIL ") << r.name << "  worst " << io::format_real(r.worst)
               << "  threshold " << io::format_real(r.threshold) << "  trials " << r.trials << '\n';
    }
    return all ? exit_ok : exit_failure;
}

inline std::string usage() {
    return "usage: dlss <command> [options]\n"
           "\n"
           "commands:\n"
           "  simulate     run the scheme and write snapshots.csv, diagnostics.csv\n"
           "  convergence  time or space convergence study, convergence.csv\n"
           "  check        randomized identity suites\n"
           "\n"
           "Run 'dlss <command> --help' for the options of a command.\n";
}

/// Entry point; args excludes the program name.
inline int main(const std::vector<std::string>& args, Streams io = {}) {
    if (args.empty()) {
        io.err << usage();
        return exit_usage;
    }
    const std::string& cmd = args.front();
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (cmd == "simulate") return cmd_simulate(rest, io);
    if (cmd == "convergence") return cmd_convergence(rest, io);
    if (cmd == "check") return cmd_check(rest, io);
    if (cmd == "-h" || cmd == "--help") {
        io.out << usage();
        return exit_ok;
    }
    if (cmd == "--version") {
        io.out << "dlss " << version << '\n';
        return exit_ok;
    }
    io.err << "dlss: unknown command '" << cmd << "'\n" << usage();
    return exit_usage;
}

} // namespace dlss::cli

// Command-line front end: scenario runs, invariant verification, and graph
// spectrum reports. See README.md for the config format and CSV schemas.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "dfc/config.hpp"
#include "dfc/csv.hpp"
#include "dfc/sim.hpp"
#include "dfc/verify.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<double> duration;
    std::optional<long> log_every;

    // Overrides edit the config document itself before parsing, so they see
    // exactly the validation (and mode-dependent defaults) a file would.
    // Returns the effective text and a human-readable trail.
    std::pair<std::string, std::vector<std::string>> apply(const std::string& text) const {
        nlohmann::json root = nlohmann::json::parse(text);
        std::vector<std::string> trail;
        if (seed) {
            root["seed"] = *seed;
            trail.push_back("seed=" + std::to_string(*seed));
        }
        if (mode) {
            root["mode"] = *mode;
            trail.push_back("mode=" + *mode);
        }
        if (duration) {
            root["duration"] = *duration;
            trail.push_back("duration=" + std::to_string(*duration));
        }
        if (log_every) {
            root["log_every"] = *log_every;
            trail.push_back("log_every=" + std::to_string(*log_every));
        }
        return {root.dump(), trail};
    }
};

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const Overrides& ov) {
    const std::string text = read_file(config_path);
    auto [effective, trail] = ov.apply(text);
    const dfc::ScenarioConfig cfg = dfc::parse_config(effective);
    dfc::RunManifest manifest;
    manifest.overrides = trail;
    manifest.config_hash = dfc::canonical_config_hash(text);
    manifest.seed = cfg.seed;
    manifest.started_at = timestamp_utc();

    dfc::Simulator sim(dfc::resolve(cfg));
    dfc::TrajectoryLog log = sim.run();
    const dfc::RunMetrics m = dfc::metrics(log);
    manifest.finished_at = timestamp_utc();

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path traj = fs::path(out_dir) / "trajectory.csv";
    const fs::path metr = fs::path(out_dir) / "metrics.csv";
    const fs::path summ = fs::path(out_dir) / "summary.json";
    manifest.outputs = {traj.string(), metr.string(), summ.string()};
    {
        std::ofstream out(traj);
        dfc::write_trajectory_csv(log, out);
    }
    {
        std::ofstream out(metr);
        dfc::write_metrics_csv(log, out);
    }
    {
        std::ofstream out(summ);
        out << dfc::summary_json(manifest, m, log);
    }
    std::cout << "run finished: " << log.frames.size() << " logged frames, final spectrum ("
              << m.final_lam1 << ", " << m.final_lam2 << "), |e| = " << m.enorm_final
              << "\noutputs in " << out_dir << "\n";
    for (const std::string& w : log.warnings) std::cout << "warning: " << w << "\n";
    return 0;
}

int cmd_verify(const std::string& config_path, const Overrides& ov) {
    const dfc::ScenarioConfig cfg =
        dfc::parse_config(ov.apply(read_file(config_path)).first);
    const dfc::VerifyReport rep = dfc::verify_scenario(cfg);
    for (const std::string& n : rep.notes) std::cout << "NOTE  " << n << "\n";
    for (const dfc::CheckResult& c : rep.checks)
        std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << " (" << c.detail << ")\n";
    std::cout << (rep.all_pass() ? "verification passed" : "verification FAILED") << "\n";
    return rep.all_pass() ? 0 : 1;
}

int cmd_spectrum(const std::string& config_path) {
    const dfc::ScenarioConfig cfg = dfc::parse_config(read_file(config_path));
    const dfc::ResolvedScenario rs = dfc::resolve(cfg);
    if (!rs.graph) {
        std::cout << "scenario has no interaction graph (centralized mode)\n";
        return 0;
    }
    const dfc::SpectralSummary& s = *rs.spectrum;
    std::cout << "vertices: " << rs.graph->n_vertices()
              << "  edges: " << rs.graph->edges().size() << "\n";
    if (rs.geometric_radius > 0.0)
        std::cout << "geometric radius: " << rs.geometric_radius << "\n";
    std::cout << "connected: " << (dfc::is_connected(*rs.graph) ? "yes" : "no") << "\n";
    std::cout << "algebraic connectivity: " << s.algebraic_connectivity << "\n";
    std::cout << "laplacian eigenvalues:";
    for (double ev : s.laplacian_eigenvalues) std::cout << ' ' << ev;
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dispersion formation control simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    Overrides ov;

    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("config,--config", config_path, "scenario config file (JSON)")
            ->required();
        if (with_out) sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", ov.seed, "override the scenario seed");
        sub->add_option("--mode", ov.mode, "override the mode (centralized|distributed)");
        sub->add_option("--duration", ov.duration, "override the run duration [s]");
        sub->add_option("--log-every", ov.log_every, "override the logging stride [steps]");
    };

    CLI::App* run = app.add_subcommand("run", "run a scenario and write CSV/JSON outputs");
    add_common(run, true);
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite on a scenario");
    add_common(verify, false);
    CLI::App* spectrum = app.add_subcommand("spectrum", "print the interaction graph spectrum");
    spectrum->add_option("config,--config", config_path, "scenario config file (JSON)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, ov);
        if (verify->parsed()) return cmd_verify(config_path, ov);
        if (spectrum->parsed()) return cmd_spectrum(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// Command-line driver: run presets, sweeps over the stratification scale,
// the analytic oracle suite, and admissibility checks on saved series.

#include "stratflow/analytic.hpp"
#include "stratflow/diagnostics.hpp"
#include "stratflow/errors.hpp"
#include "stratflow/experiments.hpp"
#include "stratflow/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <sstream>

using namespace stratflow;

namespace {

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int report(const AdmissibilityVerdict& v)
{
    std::cout << describe(v);
    return v.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stratified inviscid flow solver"};
    app.require_subcommand(1);
    // --h is the mesh spacing, so help is long-form only.
    app.set_help_flag("--help", "print this help");

    std::string preset_name = "baseline";
    std::string config_path;
    std::optional<double> h, H, t_end;
    std::string out_dir;
    auto* sim = app.add_subcommand("simulate", "run one scenario");
    sim->set_help_flag("--help", "print this help");
    sim->add_option("--preset", preset_name, "preset name")->capture_default_str();
    sim->add_option("--config", config_path, "key = value scenario file (overrides --preset)");
    sim->add_option("--h", h, "mesh spacing [m]");
    sim->add_option("--H", H, "stratification scale [m]");
    sim->add_option("--t-end", t_end, "end time [s]");
    sim->add_option("--out", out_dir, "output directory");

    std::string presets_csv;
    auto* sweep = app.add_subcommand("sweep", "run several presets concurrently");
    sweep->set_help_flag("--help", "print this help");
    sweep->add_option("--presets", presets_csv, "comma-separated preset names")->required();
    sweep->add_option("--h", h, "mesh spacing [m]");
    sweep->add_option("--t-end", t_end, "end time [s]");
    sweep->add_option("--out", out_dir, "output directory");

    bool check = false;
    auto* ana = app.add_subcommand("analytic", "closed-form vortex oracles");
    ana->add_flag("--check", check, "run the oracle suite");

    std::string diag_path;
    auto* verify = app.add_subcommand("verify", "admissibility report for a diagnostics.csv");
    verify->add_option("diagnostics", diag_path, "path to diagnostics.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            ScenarioConfig cfg = config_path.empty() ? preset(preset_name) : load_config(config_path);
            Overrides o{h, H, t_end, std::nullopt};
            o.output_dir = out_dir.empty() ? default_output_dir(cfg.output_dir.empty() ? "output"
                                                                                      : cfg.output_dir)
                                           : out_dir;
            cfg = apply_overrides(cfg, o);
            const auto start = std::chrono::steady_clock::now();
            RunResult r = run(cfg);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << cfg.name << ": " << r.steps << " steps to t = " << cfg.t_end << " s in "
                      << secs << " s\n";
            for (const auto& f : r.written_files) std::cout << "  wrote " << f << '\n';
            return report(r.verdict);
        }
        if (*sweep) {
            Overrides o{h, std::nullopt, t_end, default_output_dir("output")};
            if (!out_dir.empty()) o.output_dir = out_dir;
            const auto entries = run_sweep(split_list(presets_csv), o);
            std::cout << format_sweep_table(entries);
            bool all = true;
            for (const auto& e : entries) all = all && e.ok && e.verdict.all_passed();
            return all ? 0 : 1;
        }
        if (*ana) {
            if (!check) {
                std::cout << "nothing to do; pass --check\n";
                return 0;
            }
            bool all = true;
            for (const auto& c : analytic::oracle_suite()) {
                std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail
                          << ")\n";
                all = all && c.passed;
            }
            return all ? 0 : 1;
        }
        if (*verify) {
            return report(admissibility_report(read_diagnostics_csv(diag_path)));
        }
    } catch (const RunFailure& e) {
        std::cerr << "run failed: " << e.what() << " (last good t = " << e.last_good().state.t
                  << " s)\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

// Command-line front end: simulate, benchmark, resume.
// Exit status: 0 pass, 1 tolerance exceeded (or blow-up), 2 error.

#include "clbm/benchmarks.hpp"
#include "clbm/cli.hpp"
#include "clbm/errors.hpp"
#include "clbm/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace clbm;

void log_line(const std::string& s) { std::cerr << s << std::endl; }

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

std::string step_name(const char* stem, long step, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%08ld.%s", stem, step, ext);
    return buf;
}

// Runs `st` for its configured step count and writes snapshots, the final
// checkpoint and the manifest.
int drive(SimulationState& st, const std::string& out_dir, long total_steps) {
    std::filesystem::create_directories(out_dir);
    RunHooks hooks;
    hooks.on_output = [&](const SimulationState& s) {
        write_vtk(join(out_dir, step_name("fields", s.step, "vtk")), s);
        write_checkpoint(join(out_dir, "checkpoint.bin"), s);
    };
    hooks.on_step = [](const SimulationState& s) {
        if (s.step % 10000 == 0) log_line("step " + std::to_string(s.step));
        return true;
    };
    const RunReport rep = run(st, hooks);
    // The stored config keeps the total so that a later resume finishes the plan.
    st.config.max_steps = total_steps;
    write_checkpoint(join(out_dir, "checkpoint.bin"), st);
    RunManifest m = make_manifest("simulate", st, rep);
    if (!rep.convergence.empty()) m.metrics["final_change"] = rep.convergence.back().second;
    write_file_atomic(join(out_dir, "manifest.json"), m.to_json());
    std::cout << "steps " << rep.steps << " (total " << st.step << ")" << (rep.converged ? ", converged" : "")
              << "\n";
    if (rep.blew_up) {
        std::cout << "blew up at step " << rep.blowup_step << ": " << rep.blowup_reason << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cuboid-lattice central-moment lattice Boltzmann solver"};
    app.require_subcommand(1);
    const int threads = configure_threads_from_env();

    std::vector<std::string> overrides;
    std::string out_dir;

    auto* sim = app.add_subcommand("simulate", "Run a configuration file");
    std::string config_path;
    sim->add_option("config", config_path, "Configuration file")->required();
    sim->add_option("--set", overrides, "Override section.key=value")->allow_extra_args(false);
    sim->add_option("--output-dir", out_dir, "Output directory (default: run.output_dir)");

    auto* bench = app.add_subcommand("benchmark", "Run a benchmark preset");
    std::string bench_name;
    BenchmarkOptions opt;
    bench->add_option("name", bench_name, "duct | pulsatile | cavity | shallow-cavity | stability")->required();
    bench->add_option("--set", overrides, "Override section.key=value")->allow_extra_args(false);
    bench->add_option("--output-dir", out_dir, "Output directory")->default_str("results");
    bench->add_option("--data-dir", opt.data_dir, "Reference data directory");
    bench->add_option("--row", opt.duct_rows, "Duct table rows (1-4)")->allow_extra_args(false);
    bench->add_option("--wo", opt.wo, "Womersley number for the pulsatile preset");
    bench->add_option("--omega-nu", opt.stability_points, "omega_nu points for the stability sweep")
        ->allow_extra_args(false);

    auto* res = app.add_subcommand("resume", "Continue from a checkpoint");
    std::string ckpt;
    long extra = -1;
    res->add_option("checkpoint", ckpt, "Checkpoint file")->required();
    res->add_option("--steps", extra, "Additional steps (default: finish the configured run)");
    res->add_option("--output-dir", out_dir, "Output directory (default: run.output_dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            SimulationConfig c = parse_config(config_path);
            for (const auto& a : overrides) apply_override(c, a);
            SimulationState st = initialize(c);
            log_line("threads " + std::to_string(threads));
            return drive(st, out_dir.empty() ? c.output_dir : out_dir, c.max_steps);
        }
        if (*res) {
            SimulationState st = read_checkpoint(ckpt);
            const long total = st.config.max_steps;
            st.config.max_steps = extra >= 0 ? extra : std::max(0L, total - st.step);
            return drive(st, out_dir.empty() ? st.config.output_dir : out_dir,
                         extra >= 0 ? st.step + extra : total);
        }
        opt.overrides = overrides;
        opt.output_dir = out_dir.empty() ? "results" : out_dir;
        opt.log = log_line;
        const BenchmarkResult r = run_benchmark(bench_name, opt);
        std::cout << r.summary();
        return r.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
}

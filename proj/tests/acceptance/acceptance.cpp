// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [criteria...] [--output-dir DIR] [--quiet]
//
// Without criteria every one of 1-10 runs. Exit status is 0 when all
// requested criteria pass, 1 otherwise, 2 on errors.

#include "clbm/benchmarks.hpp"
#include "clbm/central_moments.hpp"
#include "clbm/collision.hpp"
#include "clbm/domain.hpp"
#include "clbm/solver.hpp"
#include "clbm/validation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace clbm;

namespace {

struct Outcome {
    bool pass = false;
    std::vector<std::string> lines; ///< measured values, printed under the verdict
};

struct Context {
    std::string output_dir;
    LogFn log;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

std::string line(const std::string& what, double value, const char* op, double limit) {
    return what + " = " + num(value) + " (" + op + " " + num(limit) + ")";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Populations equilibrium(const LatticeSpec& spec, double rho, const FrameVelocity& u) {
    return raw_to_distributions(scale_raw(raw_equilibria(rho, u, spec.cs2), spec, false));
}

BenchmarkOptions options_for(const Context& ctx, const std::string& sub) {
    BenchmarkOptions o;
    if (!ctx.output_dir.empty()) {
        o.output_dir = (std::filesystem::path(ctx.output_dir) / sub).string();
        std::filesystem::create_directories(o.output_dir);
    }
    o.log = ctx.log;
    return o;
}

Outcome from_benchmark(const BenchmarkResult& res) {
    Outcome out;
    out.pass = res.passed();
    std::istringstream ss(res.summary());
    for (std::string l; std::getline(ss, l);) {
        if (!l.empty()) out.lines.push_back(l);
    }
    return out;
}

// 1. f -> P -> S -> F(u) -> F(-u) -> S^-1 -> P^-1 returns f.
Outcome transform_identity(const Context&) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
    double worst = 0.0;
    const int draws = 1000;
    for (int t = 0; t < draws; ++t) {
        const double r = 0.3 + 1.2 * unit(rng), s = 0.3 + 1.2 * unit(rng);
        const LatticeSpec spec = build_lattice(r, s, 0.3 * std::min(r * r, s * s));
        Populations f;
        for (double& x : f) x = 0.1 * unit(rng);
        const FrameVelocity u{0.3 * sym(rng), 0.3 * sym(rng), 0.3 * sym(rng)};
        const MomentVector k = raw_to_central(scale_raw(distributions_to_raw_cubic(f), spec, true), u);
        const Populations back = raw_to_distributions(scale_raw(central_to_raw(k, u), spec, false));
        for (int a = 0; a < Q; ++a) worst = std::max(worst, std::abs(back[a] - f[a]));
    }
    const double elapsed = seconds_since(t0);
    Outcome out;
    out.pass = worst <= 1e-12 && elapsed < 1.0;
    out.lines.push_back(line("max componentwise error over " + std::to_string(draws) + " draws", worst, "<=", 1e-12));
    out.lines.push_back(line("runtime [s]", elapsed, "<", 1.0));
    return out;
}

// 2. Mass and momentum budgets of single collisions.
Outcome conservation(const Context&) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
    const std::vector<double> omegas{0.2, 0.6, 1.0, 1.4, 1.8, 1.95};
    double dmass = 0.0, dmom = 0.0;
    const int nodes = 10000;
    for (int t = 0; t < nodes; ++t) {
        const double r = 0.3 + 1.2 * unit(rng), s = 0.3 + 1.2 * unit(rng);
        const LatticeSpec spec = build_lattice(r, s, 0.3 * std::min(r * r, s * s));
        const RelaxationSchedule sched{omegas[t % omegas.size()], omegas[(t / 6) % omegas.size()],
                                       omegas[(t / 36) % omegas.size()], omegas[(t / 216) % omegas.size()]};
        const Variant v = (t % 2 == 0) ? Variant::central : Variant::raw;
        Populations f = equilibrium(spec, 1.0 + 0.1 * sym(rng), {0.05 * sym(rng), 0.05 * sym(rng), 0.05 * sym(rng)});
        for (double& x : f) x *= 1.0 + 0.05 * sym(rng);
        const Vec3 F{1e-4 * sym(rng), 1e-4 * sym(rng), 1e-4 * sym(rng)};

        double rho = 0.0;
        Vec3 j0{0, 0, 0};
        for (int a = 0; a < Q; ++a) {
            rho += f[a];
            for (int c = 0; c < 3; ++c) j0[c] += f[a] * spec.velocities[a][c];
        }
        NodeState n;
        n.rho = rho;
        n.u = {(j0[0] + 0.5 * F[0]) / rho, (j0[1] + 0.5 * F[1]) / rho, (j0[2] + 0.5 * F[2]) / rho};
        n.grad_rho = {1e-3 * sym(rng), 1e-3 * sym(rng), 1e-3 * sym(rng)};
        n.force = F;
        const Populations g = collide_node(f, n, sched, spec, v);

        double rho1 = 0.0;
        Vec3 j1{0, 0, 0};
        for (int a = 0; a < Q; ++a) {
            rho1 += g[a];
            for (int c = 0; c < 3; ++c) j1[c] += g[a] * spec.velocities[a][c];
        }
        dmass = std::max(dmass, std::abs(rho1 - rho));
        for (int c = 0; c < 3; ++c) dmom = std::max(dmom, std::abs(j1[c] - j0[c] - F[c]));
    }
    Outcome out;
    out.pass = dmass <= 1e-14 && dmom <= 1e-13;
    out.lines.push_back(line("max mass change over " + std::to_string(nodes) + " nodes", dmass, "<=", 1e-14));
    out.lines.push_back(line("max |momentum change - F|", dmom, "<=", 1e-13));
    return out;
}

// 3. Cubic lattice: no corrections, and the moving wall is the standard
// momentum-augmented bounce-back.
Outcome cubic_degeneracy(const Context&) {
    const LatticeSpec spec = build_lattice(1.0, 1.0, 1.0 / 3.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    int nonzero = 0, samples = 0;
    auto count = [&](const CorrectionCoefficients& c) {
        for (double v : {c.theta_sx, c.theta_sy, c.theta_sz, c.theta_bx, c.theta_by, c.theta_bz, c.lambda_sx,
                         c.lambda_sy, c.lambda_sz, c.lambda_bx, c.lambda_by, c.lambda_bz}) {
            nonzero += v != 0.0;
        }
        ++samples;
    };
    for (int t = 0; t < 100; ++t) {
        const RelaxationSchedule sched{1.0 + 0.95 * sym(rng), 1.0 + 0.95 * sym(rng), 1.0, 1.0};
        NodeState rest;
        rest.rho = 1.0 + 0.1 * sym(rng);
        count(correction_coefficients(rest, sched, spec, CorrectionMode::full));
        // The low-Mach coefficients drop the velocity terms, so they vanish at
        // any velocity.
        NodeState moving = rest;
        moving.u = {0.1 * sym(rng), 0.1 * sym(rng), 0.1 * sym(rng)};
        count(correction_coefficients(moving, sched, spec, CorrectionMode::low_mach));
    }

    // Standard rule: f_opp = f_a - 2 w_a rho (e_a . U) / cs2 with the D3Q27
    // weights 8/27, 2/27, 1/54, 1/216 by number of nonzero components.
    const auto c = moving_wall_coefficients(spec);
    const double w[4] = {8.0 / 27.0, 2.0 / 27.0, 1.0 / 54.0, 1.0 / 216.0};
    double worst = 0.0;
    int edges = 0, corners = 0;
    for (int a = 0; a < Q; ++a) {
        const int nz = (kCx[a] != 0) + (kCy[a] != 0) + (kCz[a] != 0);
        const double expect = kCy[a] == 1 ? -2.0 * w[nz] * kCx[a] / spec.cs2 : 0.0;
        worst = std::max(worst, std::abs(c[a] - expect));
        if (kCy[a] == 1 && nz == 2 && kCx[a] != 0) edges += std::abs(std::abs(c[a]) - 1.0 / 9.0) <= 1e-15;
        if (kCy[a] == 1 && nz == 3) corners += std::abs(std::abs(c[a]) - 1.0 / 36.0) <= 1e-15;
    }
    Outcome out;
    out.pass = nonzero == 0 && worst <= 1e-15 && edges == 2 && corners == 4;
    out.lines.push_back("nonzero correction coefficients: " + std::to_string(nonzero) + " of " +
                        std::to_string(12 * samples) + " (== 0)");
    out.lines.push_back(line("max |moving-wall coefficient - standard bounce-back|", worst, "<=", 1e-15));
    out.lines.push_back("edge links at 1/9: " + std::to_string(edges) + " of 2, corner links at 1/36: " +
                        std::to_string(corners) + " of 4");
    return out;
}

// Decay rate of u_x = A sin(k y) on a periodic box, fitted by least squares
// to log amplitude samples.
double shear_wave_rate(GridDims g, double r, std::optional<double> omega_xi, double& nu) {
    SimulationConfig c;
    c.lattice = {r, 1.0, std::nullopt};
    c.grid = g;
    c.relaxation.omega_nu = 1.0;
    c.relaxation.omega_xi = omega_xi;
    c.tolerance = 0.0;
    SimulationState st = initialize(c);
    const LatticeSpec& spec = st.params.spec;
    nu = st.params.nu;
    const double A = 1e-3, k = 2 * std::numbers::pi / (g.ny * r);
    for (int kk = 0; kk < g.nz; ++kk)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                st.populations.set_node(g.index(i, j, kk),
                                        equilibrium(spec, 1.0, {A * std::sin(k * (j + 0.5) * r), 0.0, 0.0}));
    st.stats = update_hydrodynamics(st.populations, st.hydro, spec);
    auto amplitude = [&] {
        double a = 0.0;
        for (int kk = 0; kk < g.nz; ++kk)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) a += st.hydro.ux[g.index(i, j, kk)] * std::sin(k * (j + 0.5) * r);
        return 2.0 * a / static_cast<double>(g.nodes());
    };
    for (int t = 0; t < 20; ++t) step(st);
    std::vector<double> ts, ls;
    for (int n = 0; n <= 10; ++n) {
        if (n > 0)
            for (int t = 0; t < 30; ++t) step(st);
        ts.push_back(30.0 * n);
        ls.push_back(std::log(amplitude()));
    }
    double mt = 0.0, ml = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        ml += ls[i];
    }
    mt /= static_cast<double>(ts.size());
    ml /= static_cast<double>(ts.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - mt) * (ls[i] - ml);
        sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    return -sxy / sxx;
}

// 4. Shear wave decay rate against nu k^2, and its insensitivity to omega_xi.
Outcome viscosity_recovery(const Context&) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    out.pass = true;
    struct Case {
        GridDims g;
        double r;
    };
    for (const Case& cs : {Case{{32, 32, 32}, 1.0}, Case{{32, 64, 32}, 0.5}}) {
        const std::string tag = std::to_string(cs.g.nx) + "x" + std::to_string(cs.g.ny) + "x" +
                                std::to_string(cs.g.nz) + " r=" + num(cs.r);
        double nu = 0.0;
        const double base = shear_wave_rate(cs.g, cs.r, std::nullopt, nu);
        const double k = 2 * std::numbers::pi / (cs.g.ny * cs.r);
        const double err = std::abs(base / (nu * k * k) - 1.0);
        out.pass = out.pass && err <= 0.01;
        out.lines.push_back(line(tag + ": relative rate error", err, "<=", 0.01));
        for (double oxi : {0.6, 1.4}) {
            double nu2 = 0.0;
            const double change = std::abs(shear_wave_rate(cs.g, cs.r, oxi, nu2) / base - 1.0);
            out.pass = out.pass && change <= 1e-3;
            out.lines.push_back(line(tag + ": rate change at omega_xi=" + num(oxi), change, "<=", 1e-3));
        }
    }
    const double elapsed = seconds_since(t0);
    out.pass = out.pass && elapsed < 60.0;
    out.lines.push_back(line("runtime [s]", elapsed, "<", 60.0));
    return out;
}

Outcome duct(const Context& ctx) { return from_benchmark(run_benchmark("duct", options_for(ctx, "duct"))); }

Outcome pulsatile(const Context& ctx) {
    return from_benchmark(run_benchmark("pulsatile", options_for(ctx, "pulsatile")));
}

Outcome cavity(const Context& ctx) { return from_benchmark(run_benchmark("cavity", options_for(ctx, "cavity"))); }

Outcome stability(const Context& ctx) {
    return from_benchmark(run_benchmark("stability", options_for(ctx, "stability")));
}

// 9. The row-4 duct, r = 0.5 and s = 1/3, with and without corrections.
Outcome ablation(const Context& ctx) {
    SimulationConfig on = duct_preset(4);
    SimulationConfig off = on;
    off.corrections = CorrectionMode::off;
    const DuctOutcome a = run_duct(on, ctx.log);
    const DuctOutcome b = run_duct(off, ctx.log);
    const double ratio = b.l2_error / a.l2_error;
    Outcome out;
    out.pass = ratio >= 3.0 && !a.report.blew_up && !b.report.blew_up;
    out.lines.push_back("L2 error with corrections = " + num(a.l2_error) + ", without = " + num(b.l2_error));
    out.lines.push_back(line("ratio off/on", ratio, ">=", 3.0));
    return out;
}

Outcome shallow(const Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out = from_benchmark(run_benchmark("shallow-cavity", options_for(ctx, "shallow-cavity")));
    const double elapsed = seconds_since(t0);
    out.pass = out.pass && elapsed < 1800.0;
    out.lines.push_back(line("runtime [s]", elapsed, "<", 1800.0));
    return out;
}

struct Criterion {
    const char* title;
    Outcome (*run)(const Context&);
};

const Criterion kCriteria[] = {
    {"transform identity", transform_identity},
    {"conservation", conservation},
    {"cubic degeneracy", cubic_degeneracy},
    {"viscosity recovery", viscosity_recovery},
    {"duct flow", duct},
    {"pulsatile duct flow", pulsatile},
    {"lid-driven cavity", cavity},
    {"stability ordering", stability},
    {"corrections ablation", ablation},
    {"shallow cavity efficiency", shallow},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> chosen;
    Context ctx;
    bool quiet = false;
    app.add_option("criteria", chosen, "criterion numbers, 1-10")->check(CLI::Range(1, 10));
    app.add_option("--output-dir", ctx.output_dir, "directory for benchmark profiles and manifests");
    app.add_flag("--quiet", quiet, "suppress progress messages");
    CLI11_PARSE(app, argc, argv);
    if (chosen.empty())
        for (int i = 1; i <= 10; ++i) chosen.push_back(i);
    if (!quiet) ctx.log = [](const std::string& m) { std::cerr << m << '\n'; };

    bool all = true;
    for (int n : chosen) {
        const Criterion& c = kCriteria[n - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run(ctx);
        } catch (const std::exception& e) {
            out.pass = false;
            out.lines.push_back(std::string("error: ") + e.what());
        }
        all = all && out.pass;
        std::cout << "criterion " << n << " (" << c.title << "): " << (out.pass ? "PASS" : "FAIL") << "  ["
                  << num(seconds_since(t0)) << " s]\n";
        for (const std::string& l : out.lines) std::cout << "    " << l << '\n';
        std::cout.flush();
    }
    return all ? 0 : 1;
}

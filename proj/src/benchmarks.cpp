#include "clbm/benchmarks.hpp"

#include "clbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#ifndef CLBM_DATA_DIR
#define CLBM_DATA_DIR "data"
#endif

namespace clbm {

namespace {

constexpr double kDuctRe = 50.0;
constexpr int kDuctTerms = 199;
constexpr long kProgressEvery = 10000;

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// Middle index, or the two middle indices of an even count.
std::vector<int> middle(int n) {
    if (n % 2 == 1) return {n / 2};
    return {n / 2 - 1, n / 2};
}

RunHooks progress(const std::string& name, const LogFn& log) {
    RunHooks h;
    if (log) {
        h.on_step = [name, log](const SimulationState& st) {
            if (st.step % kProgressEvery == 0) log(name + ": step " + std::to_string(st.step));
            return true;
        };
    }
    return h;
}

void note(const LogFn& log, const std::string& msg) {
    if (log) log(msg);
}

std::string finish_note(const std::string& name, const RunReport& rep) {
    std::ostringstream os;
    os << name << ": " << rep.steps << " steps in " << std::fixed << std::setprecision(1) << rep.wall_seconds << " s";
    if (rep.converged) os << ", converged";
    if (rep.blew_up) os << ", blew up: " << rep.blowup_reason;
    return os.str();
}

ReferenceProfile with_walls(const std::vector<double>& coords, const std::vector<double>& values, double lo,
                            double hi, const std::string& source) {
    ReferenceProfile p;
    p.provenance = Provenance::external;
    p.source = source;
    p.coords.push_back(0.0);
    p.values.push_back(lo);
    p.coords.insert(p.coords.end(), coords.begin(), coords.end());
    p.values.insert(p.values.end(), values.begin(), values.end());
    p.coords.push_back(1.0);
    p.values.push_back(hi);
    p.validate(0.0, 1.0);
    return p;
}

SimulationConfig with_overrides(SimulationConfig c, const BenchmarkOptions& o) {
    for (const auto& a : o.overrides) apply_override(c, a);
    (void)resolve_parameters(c);
    return c;
}

struct Writer {
    const BenchmarkOptions& opt;
    BenchmarkResult& res;

    [[nodiscard]] bool enabled() const { return !opt.output_dir.empty(); }
    std::string path(const std::string& file) const { return (std::filesystem::path(opt.output_dir) / file).string(); }

    void profile(const std::string& file, const std::vector<double>& c, const std::vector<double>& v,
                 const std::string& comment) {
        if (!enabled()) return;
        write_profile(path(file), c, v, comment);
        res.artifacts.push_back(path(file));
    }
    void text(const std::string& file, const std::string& contents) {
        if (!enabled()) return;
        write_file_atomic(path(file), contents);
        res.artifacts.push_back(path(file));
    }
    void manifest(const RunManifest& m) {
        res.manifests.push_back(m);
        text(m.name + "_manifest.json", m.to_json());
    }
};

void duct_benchmark(const BenchmarkOptions& opt, BenchmarkResult& res) {
    Writer w{opt, res};
    for (int row : opt.duct_rows) {
        const SimulationConfig c = with_overrides(duct_preset(row), opt);
        const std::string name = "duct_row" + std::to_string(row);
        DuctOutcome out = run_duct(c, opt.log);
        note(opt.log, finish_note(name, out.report) + ", L2 error " + num(out.l2_error));
        res.checks.push_back({name + "_l2_error", out.l2_error, 0.02, true});
        out.manifest.name = name;
        w.manifest(out.manifest);
        if (!w.enabled()) continue;

        std::ostringstream os;
        os << "# u(y, z) on the x = 1 slice; coordinates centered on the duct axis\n# y z u u_exact\n";
        os << std::setprecision(12);
        for (std::size_t n = 0; n < out.u.size(); ++n) {
            os << out.y[n] << " " << out.z[n] << " " << out.u[n] << " " << out.exact[n] << "\n";
        }
        w.text(name + "_slice.txt", os.str());

        // Lines along z at fixed distances from the y = -L/2 wall.
        const double r = c.lattice.r;
        const double L = c.grid.ny * r;
        for (double f : {0.1, 0.2, 0.3, 0.5}) {
            const int j = std::clamp(static_cast<int>(std::lround(f * L / r - 0.5)), 0, c.grid.ny - 1);
            std::vector<double> zs, us, es;
            for (std::size_t n = 0; n < out.u.size(); ++n) {
                if (std::abs(out.y[n] - ((j + 0.5) * r - 0.5 * L)) < 1e-9) {
                    zs.push_back(out.z[n]);
                    us.push_back(out.u[n]);
                    es.push_back(out.exact[n]);
                }
            }
            const std::string tag = name + "_y" + num(f) + "L";
            const std::string where = "y = " + num((j + 0.5) * r) + " from the wall";
            w.profile(tag + ".txt", zs, us, "u along z, " + where);
            w.profile(tag + "_exact.txt", zs, es, "series solution along z, " + where);
        }
    }
}

void pulsatile_benchmark(const BenchmarkOptions& opt, BenchmarkResult& res) {
    Writer w{opt, res};
    const SimulationConfig c = with_overrides(pulsatile_preset(opt.wo), opt);
    const std::string name = "pulsatile_wo" + num(opt.wo);
    PulsatileOutcome out = run_pulsatile(c, 3, opt.log);
    note(opt.log, finish_note(name, out.report));
    for (int m = 1; m <= 8; ++m) {
        const std::string t = "t" + std::to_string(m) + "T8";
        if (m % 2 == 0) res.checks.push_back({name + "_l2_error_" + t, out.l2_errors[m - 1], 0.03, true});
        w.profile(name + "_" + t + ".txt", out.y, out.profiles[m - 1],
                  "u along y at z = 0, t = " + std::to_string(m) + "T/8 of the last period");
        w.profile(name + "_" + t + "_exact.txt", out.y, out.exact[m - 1],
                  "series solution along y at z = 0, t = " + std::to_string(m) + "T/8");
    }
    out.manifest.name = name;
    w.manifest(out.manifest);
}

void cavity_benchmark(const BenchmarkOptions& opt, BenchmarkResult& res) {
    Writer w{opt, res};
    const std::string dir = opt.data_dir.empty() ? default_data_dir() : opt.data_dir;
    const ReferenceProfile ref_u = read_reference_profile(dir + "/cavity_re100_u.txt");
    const ReferenceProfile ref_v = read_reference_profile(dir + "/cavity_re100_v.txt");
    ref_u.validate(0.0, 1.0);
    ref_v.validate(0.0, 1.0);

    const SimulationConfig c = with_overrides(cavity_preset(), opt);
    CavityOutcome out = run_cavity(c, "cavity", opt.log);
    note(opt.log, finish_note("cavity", out.report));
    res.checks.push_back({"cavity_u_max_deviation", max_deviation(out.lines.y, out.lines.u, ref_u), 0.03, true});
    res.checks.push_back({"cavity_v_max_deviation", max_deviation(out.lines.x, out.lines.v, ref_v), 0.03, true});
    w.profile("cavity_u.txt", out.lines.y, out.lines.u, "u/U along y/H at x = z = H/2");
    w.profile("cavity_v.txt", out.lines.x, out.lines.v, "v/U along x/H at y = z = H/2");
    w.manifest(out.manifest);
}

void shallow_benchmark(const BenchmarkOptions& opt, BenchmarkResult& res) {
    Writer w{opt, res};
    CavityOutcome cub = run_cavity(with_overrides(shallow_cavity_preset(false), opt), "shallow_cubic", opt.log);
    note(opt.log, finish_note("shallow_cubic", cub.report));
    CavityOutcome cbd = run_cavity(with_overrides(shallow_cavity_preset(true), opt), "shallow_cuboid", opt.log);
    note(opt.log, finish_note("shallow_cuboid", cbd.report));

    const ReferenceProfile ref_u = with_walls(cub.lines.y, cub.lines.u, 0.0, 1.0, "cubic lattice run");
    const ReferenceProfile ref_v = with_walls(cub.lines.x, cub.lines.v, 0.0, 0.0, "cubic lattice run");
    res.checks.push_back({"shallow_u_max_deviation", max_deviation(cbd.lines.y, cbd.lines.u, ref_u), 0.02, true});
    res.checks.push_back({"shallow_v_max_deviation", max_deviation(cbd.lines.x, cbd.lines.v, ref_v), 0.02, true});
    const double ratio = static_cast<double>(cub.manifest.allocated_bytes) /
                         static_cast<double>(cbd.manifest.allocated_bytes);
    res.checks.push_back({"shallow_memory_ratio", ratio, 5.0, false});
    cbd.manifest.metrics["memory_ratio_cubic_over_cuboid"] = ratio;

    w.profile("shallow_cuboid_u.txt", cbd.lines.y, cbd.lines.u, "cuboid lattice, u/U along y/H at x = L/2, z = W/2");
    w.profile("shallow_cuboid_v.txt", cbd.lines.x, cbd.lines.v, "cuboid lattice, v/U along x/L at y = H/2, z = W/2");
    w.profile("shallow_cubic_u.txt", cub.lines.y, cub.lines.u, "cubic lattice, u/U along y/H at x = L/2, z = W/2");
    w.profile("shallow_cubic_v.txt", cub.lines.x, cub.lines.v, "cubic lattice, v/U along x/L at y = H/2, z = W/2");
    w.manifest(cub.manifest);
    w.manifest(cbd.manifest);
}

void stability_benchmark(const BenchmarkOptions& opt, BenchmarkResult& res) {
    Writer w{opt, res};
    SweepRequest req = stability_preset();
    req.base = with_overrides(req.base, opt);
    req.points = opt.stability_points;

    struct Line {
        std::string label;
        SweepRow row;
    };
    std::vector<Line> lines;
    auto sweep = [&](double omega_xi, std::vector<Variant> variants) {
        SweepRequest r = req;
        r.base.relaxation.xi.reset();
        r.base.relaxation.omega_xi = omega_xi;
        r.variants = std::move(variants);
        for (SweepRow& row : stability_sweep(r, opt.log)) {
            std::string label = row.variant == Variant::central ? "central" : "raw";
            label += "_xi" + num(omega_xi);
            for (const auto& a : row.anomalies) note(opt.log, "anomaly (" + label + "): " + a);
            lines.push_back({label, std::move(row)});
        }
    };
    sweep(1.0, {Variant::central, Variant::raw});
    sweep(0.5, {Variant::central});
    sweep(1.4, {Variant::central});

    auto find = [&](const std::string& label, double point) -> const SweepRow& {
        for (const auto& l : lines) {
            if (l.label == label && l.row.point == point) return l.row;
        }
        throw InvalidParameter("missing sweep row " + label);
    };
    std::ostringstream table;
    table << "# omega_nu run U_max(stable) U_min(unstable) probes anomalies\n";
    for (const auto& l : lines) {
        table << num(l.row.point) << " " << l.label << " " << num(l.row.max_stable) << " "
              << num(l.row.min_unstable) << " " << l.row.probes.size() << " " << l.row.anomalies.size() << "\n";
    }
    for (double p : req.points) {
        const std::string at = "_omega_nu" + num(p);
        res.checks.push_back({"central_minus_raw" + at,
                              find("central_xi1", p).max_stable - find("raw_xi1", p).max_stable, 0.0, false});
        res.checks.push_back({"xi0.5_minus_xi1.4" + at,
                              find("central_xi0.5", p).max_stable - find("central_xi1.4", p).max_stable, 0.0,
                              false});
    }
    w.text("stability_table.txt", table.str());
}

} // namespace

double duct_center_coefficient() { return duct_velocity(0.0, 0.0, 1.0, 1.0, 1.0, 1.0); }

SimulationConfig duct_preset(int row) {
    struct Row {
        double r, s, cs2, tau, F;
    };
    static const Row rows[] = {
        {1.0, 0.5, 0.10, 0.6, 3.82e-6},
        {1.0, 1.0 / 3.0, 0.04, 0.8, 5.50e-6},
        {0.5, 1.0, 0.04, 1.0, 0.0},
        {0.5, 1.0 / 3.0, 0.04, 1.0, 5.09e-6},
    };
    if (row < 1 || row > 4) throw InvalidParameter("duct row must be 1..4");
    const Row& p = rows[row - 1];
    SimulationConfig c;
    c.lattice = {p.r, p.s, p.cs2};
    c.grid = {3, static_cast<int>(std::lround(kDuctSide / p.r)), static_cast<int>(std::lround(kDuctSide / p.s))};
    c.relaxation.tau = p.tau;
    c.boundary = BoundarySpec::duct();
    double F = p.F;
    if (F == 0.0) {
        const double nu = p.cs2 * (p.tau - 0.5);
        const double uc = kDuctRe * nu / kDuctSide;
        F = uc * nu / (duct_center_coefficient() * kDuctSide * kDuctSide);
    }
    c.force.amplitude = {F, 0.0, 0.0};
    c.max_steps = 400000;
    c.tolerance = 1e-9;
    c.check_interval = 100;
    return c;
}

SimulationConfig pulsatile_preset(double wo) {
    if (!(wo > 0.0)) throw InvalidParameter("Womersley number > 0 violated");
    const double a = kPulsatileHalfWidth;
    const double omega = 2.0 * std::numbers::pi / kPulsatilePeriod;
    SimulationConfig c;
    c.lattice = {0.5, 1.0, std::nullopt};
    c.grid = {40, 80, 40};
    c.relaxation.nu = a * a * omega / (wo * wo);
    c.boundary = BoundarySpec::duct();
    c.force = {{kPulsatileAmplitude, 0.0, 0.0}, kPulsatilePeriod};
    c.max_steps = static_cast<long>(3 * kPulsatilePeriod);
    c.tolerance = 0.0;
    return c;
}

SimulationConfig cavity_preset() {
    constexpr double U = 0.05;
    SimulationConfig c;
    c.lattice = {0.5, 1.0, 0.14};
    c.grid = {40, 80, 40};
    c.relaxation.nu = U * 40.0 / 100.0;
    c.boundary = BoundarySpec::cavity(U);
    c.max_steps = 200000;
    c.tolerance = 1e-6;
    c.check_interval = 100;
    return c;
}

SimulationConfig shallow_cavity_preset(bool cuboid) {
    SimulationConfig c;
    double U = 0.0;
    if (cuboid) {
        U = 0.025;
        c.lattice = {0.406, 1.3, 0.04};
        c.grid = {52, 32, 20};
    } else {
        U = 0.08;
        c.lattice = {1.0, 1.0, 1.0 / 3.0};
        c.grid = {128, 32, 64};
    }
    c.relaxation.nu = U * c.grid.nx / 100.0;
    c.boundary = BoundarySpec::cavity(U);
    c.max_steps = 200000;
    c.tolerance = 1e-6;
    c.check_interval = 100;
    return c;
}

SweepRequest stability_preset() {
    SweepRequest req;
    SimulationConfig& c = req.base;
    c.lattice = {0.5, 1.0, 0.08};
    c.grid = {30, 60, 30};
    c.relaxation.omega_nu = 1.8;
    c.relaxation.omega_xi = 1.0;
    c.boundary = BoundarySpec::cavity(0.05);
    req.axis = SweepAxis::lid_speed;
    req.points = {1.8};
    req.stable = 0.02;
    req.unstable = 0.5;
    req.iterations = 8;
    req.budget = 20000;
    return req;
}

DuctOutcome run_duct(const SimulationConfig& config, const LogFn& log) {
    const GridDims& g = config.grid;
    const double L = g.ny * config.lattice.r;
    if (std::abs(L - g.nz * config.lattice.s) > 1e-9 * L) {
        throw InvalidParameter("square duct needs ny r = nz s");
    }
    SimulationState st = initialize(config);
    DuctOutcome out;
    out.report = run(st, progress("duct", log));
    const int i = std::min(1, g.nx - 1);
    const double F = config.force.amplitude[0];
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            const double y = (j + 0.5) * config.lattice.r - 0.5 * L;
            const double z = (k + 0.5) * config.lattice.s - 0.5 * L;
            out.y.push_back(y);
            out.z.push_back(z);
            out.u.push_back(st.hydro.ux[g.index(i, j, k)]);
            out.exact.push_back(duct_velocity(y, z, L, F, 1.0, st.params.nu, kDuctTerms));
        }
    }
    out.l2_error =
        out.report.blew_up ? std::numeric_limits<double>::infinity() : relative_l2_error(out.u, out.exact);
    out.manifest = make_manifest("duct", st, out.report);
    out.manifest.metrics["l2_error"] = out.l2_error;
    out.manifest.metrics["nu"] = st.params.nu;
    return out;
}

PulsatileOutcome run_pulsatile(const SimulationConfig& config, int periods, const LogFn& log) {
    const double T = config.force.period;
    if (!(T > 0.0) || std::fmod(T, 8.0) != 0.0) throw InvalidParameter("force period a positive multiple of 8 violated");
    if (periods < 1) throw InvalidParameter("periods >= 1 violated");
    const GridDims& g = config.grid;
    const double r = config.lattice.r, s = config.lattice.s;
    const double a = 0.5 * g.ny * r;
    if (std::abs(a - 0.5 * g.nz * s) > 1e-9 * a) throw InvalidParameter("square duct needs ny r = nz s");
    const double Fm = config.force.amplitude[0];
    const double omega = 2.0 * std::numbers::pi / T;

    SimulationConfig c = config;
    c.max_steps = static_cast<long>(periods * T);
    c.tolerance = 0.0;
    SimulationState st = initialize(c);
    const double nu = st.params.nu;

    // u(t) = u(0) cos(omega t) + u(T/4) sin(omega t) for the periodic solution.
    std::vector<double> ys, zs, cos_part, sin_part;
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            const double y = (j + 0.5) * r - a, z = (k + 0.5) * s - a;
            ys.push_back(y);
            zs.push_back(z);
            cos_part.push_back(womersley_velocity(y, z, 0.0, a, Fm, omega, nu));
            sin_part.push_back(womersley_velocity(y, z, 0.25 * T, a, Fm, omega, nu));
        }
    }

    PulsatileOutcome out;
    out.profiles.resize(8);
    out.exact.resize(8);
    out.l2_errors.assign(8, std::numeric_limits<double>::infinity());
    for (int j = 0; j < g.ny; ++j) out.y.push_back((j + 0.5) * r - a);
    const long last = static_cast<long>((periods - 1) * T);
    const long eighth = static_cast<long>(T / 8.0);
    const auto mk = middle(g.nz);

    RunHooks hooks = progress("pulsatile", log);
    auto base = hooks.on_step;
    hooks.on_step = [&](const SimulationState& state) {
        if (base) base(state);
        const long n = state.step - last;
        if (n <= 0 || n % eighth != 0) return true;
        const int m = static_cast<int>(n / eighth);
        const double ph = omega * static_cast<double>(state.step);
        std::vector<double> u, e;
        for (int k = 0; k < g.nz; ++k) {
            for (int j = 0; j < g.ny; ++j) {
                u.push_back(state.hydro.ux[g.index(0, j, k)]);
                const std::size_t q = static_cast<std::size_t>(k) * g.ny + j;
                e.push_back(cos_part[q] * std::cos(ph) + sin_part[q] * std::sin(ph));
            }
        }
        out.l2_errors[m - 1] = relative_l2_error(u, e);
        auto& prof = out.profiles[m - 1];
        auto& ex = out.exact[m - 1];
        for (int j = 0; j < g.ny; ++j) {
            double pu = 0.0, pe = 0.0;
            for (int k : mk) {
                const std::size_t q = static_cast<std::size_t>(k) * g.ny + j;
                pu += u[q];
                pe += e[q];
            }
            prof.push_back(pu / mk.size());
            ex.push_back(pe / mk.size());
        }
        return true;
    };
    out.report = run(st, hooks);
    out.manifest = make_manifest("pulsatile", st, out.report);
    for (int m = 1; m <= 8; ++m) {
        out.manifest.metrics["l2_error_t" + std::to_string(m) + "T8"] = out.l2_errors[m - 1];
    }
    out.manifest.metrics["nu"] = nu;
    return out;
}

CenterlineProfiles cavity_centerlines(const SimulationState& st) {
    const auto& lid = st.config.boundary.faces[Face::y_max];
    if (lid.kind != FaceKind::wall_moving || lid.lid_velocity == 0.0) {
        throw ConfigurationError("centerlines need a moving lid on y_max");
    }
    const double U = lid.lid_velocity;
    const GridDims& g = st.populations.dims();
    const auto mi = middle(g.nx), mj = middle(g.ny), mk = middle(g.nz);
    CenterlineProfiles p;
    for (int j = 0; j < g.ny; ++j) {
        double sum = 0.0;
        for (int i : mi)
            for (int k : mk) sum += st.hydro.ux[g.index(i, j, k)];
        p.y.push_back((j + 0.5) / g.ny);
        p.u.push_back(sum / static_cast<double>(mi.size() * mk.size()) / U);
    }
    for (int i = 0; i < g.nx; ++i) {
        double sum = 0.0;
        for (int j : mj)
            for (int k : mk) sum += st.hydro.uy[g.index(i, j, k)];
        p.x.push_back((i + 0.5) / g.nx);
        p.v.push_back(sum / static_cast<double>(mj.size() * mk.size()) / U);
    }
    return p;
}

CavityOutcome run_cavity(const SimulationConfig& config, const std::string& name, const LogFn& log) {
    SimulationState st = initialize(config);
    CavityOutcome out;
    out.report = run(st, progress(name, log));
    out.lines = cavity_centerlines(st);
    out.manifest = make_manifest(name, st, out.report);
    if (!out.report.convergence.empty()) out.manifest.metrics["final_change"] = out.report.convergence.back().second;
    return out;
}

double max_deviation(const std::vector<double>& coords, const std::vector<double>& values,
                     const ReferenceProfile& ref) {
    if (coords.size() != values.size()) throw InvalidParameter("coordinate and value counts differ");
    double d = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double e = std::abs(values[i] - ref.at(coords[i]));
        if (!(e <= d)) d = e; // NaN propagates
    }
    return d;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("CLBM_DATA_DIR")) return env;
    return CLBM_DATA_DIR;
}

bool BenchmarkResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const BenchmarkCheck& c) { return c.passed(); });
}

std::string BenchmarkResult::summary() const {
    std::ostringstream os;
    os << std::setprecision(6);
    for (const auto& c : checks) {
        os << c.name << " " << c.value << (c.at_most ? " <= " : " >= ") << c.limit << " "
           << (c.passed() ? "PASS" : "FAIL") << "\n";
    }
    return os.str();
}

const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names{"duct", "pulsatile", "cavity", "shallow-cavity", "stability"};
    return names;
}

BenchmarkResult run_benchmark(const std::string& name, const BenchmarkOptions& options) {
    BenchmarkResult res;
    res.name = name;
    if (!options.output_dir.empty()) std::filesystem::create_directories(options.output_dir);
    if (name == "duct") duct_benchmark(options, res);
    else if (name == "pulsatile") pulsatile_benchmark(options, res);
    else if (name == "cavity") cavity_benchmark(options, res);
    else if (name == "shallow-cavity") shallow_benchmark(options, res);
    else if (name == "stability") stability_benchmark(options, res);
    else throw InvalidParameter("unknown benchmark '" + name + "'");
    Writer{options, res}.text(name + "_summary.txt", res.summary());
    return res;
}

} // namespace clbm

#include "clbm/solver.hpp"

#include "clbm/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace clbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

} // namespace

Vec3 ForceConfig::at(long step) const {
    if (period <= 0.0) return amplitude;
    const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(step) / period);
    return {amplitude[0] * c, amplitude[1] * c, amplitude[2] * c};
}

double omega_from_nu(double nu, double cs2) { return 1.0 / (nu / cs2 + 0.5); }

double omega_from_xi(double xi, double cs2) { return 1.0 / (1.5 * xi / cs2 + 0.5); }

ResolvedParameters resolve_parameters(const SimulationConfig& c) {
    ResolvedParameters p;
    p.spec = build_lattice(c.lattice.r, c.lattice.s, c.lattice.cs2);
    require(c.grid.nx >= 1 && c.grid.ny >= 1 && c.grid.nz >= 1, "grid dimensions >= 1 violated");
    c.boundary.validate();

    const auto& rc = c.relaxation;
    const int given = int(rc.omega_nu.has_value()) + int(rc.nu.has_value()) + int(rc.tau.has_value());
    require(given == 1, "exactly one of omega_nu, nu, tau must be given");
    const double cs2 = p.spec.cs2;
    double wnu = 0.0;
    if (rc.omega_nu) wnu = *rc.omega_nu;
    if (rc.tau) {
        require(*rc.tau > 0.5, "tau > 1/2 violated");
        wnu = 1.0 / *rc.tau;
    }
    if (rc.nu) {
        require(*rc.nu > 0.0, "nu > 0 violated");
        wnu = omega_from_nu(*rc.nu, cs2);
    }
    require(rc.omega_xi.has_value() + rc.xi.has_value() <= 1, "at most one of omega_xi, xi may be given");
    double wxi = wnu;
    if (rc.omega_xi) wxi = *rc.omega_xi;
    if (rc.xi) {
        require(*rc.xi > 0.0, "xi > 0 violated");
        wxi = omega_from_xi(*rc.xi, cs2);
    }
    p.sched = {wnu, wxi, rc.omega_1, rc.omega_high};
    validate_schedule(p.sched);
    p.nu = cs2 * (1.0 / wnu - 0.5);
    p.xi = 2.0 * cs2 / 3.0 * (1.0 / wxi - 0.5);
    require(c.max_steps >= 0, "max_steps >= 0 violated");
    require(c.check_interval >= 1, "check_interval >= 1 violated");
    return p;
}

std::size_t SimulationState::allocated_bytes() const {
    return populations.allocated_bytes() + hydro.allocated_bytes();
}

SimulationState initialize(const SimulationConfig& config) {
    SimulationState st;
    st.config = config;
    st.params = resolve_parameters(config);
    st.kernel = detail::make_kernel_params(st.params.sched, st.params.spec, config.variant, config.corrections);
    st.populations = PopulationField(config.grid);
    st.hydro = HydroFieldSet(config.grid);
    st.hydro.force = config.force.at(0);

    MomentVector mc = central_equilibria(1.0, st.params.spec.cs2);
    mc.at(1, 0, 0) = -0.5 * st.hydro.force[0];
    mc.at(0, 1, 0) = -0.5 * st.hydro.force[1];
    mc.at(0, 0, 1) = -0.5 * st.hydro.force[2];
    const Populations f0 =
        raw_to_distributions(scale_raw(central_to_raw(mc, FrameVelocity{}), st.params.spec, false));
    for (int a = 0; a < Q; ++a) std::fill_n(st.populations.current(a), st.populations.nodes(), f0[a]);
    st.stats = update_hydrodynamics(st.populations, st.hydro, st.params.spec);
    return st;
}

void step(SimulationState& st) {
    const auto& spec = st.params.spec;
    auto t0 = Clock::now();
    if (st.config.corrections == CorrectionMode::full) density_gradient(st.hydro, spec, st.config.boundary);
    st.times.gradient += seconds_since(t0);

    t0 = Clock::now();
    st.hydro.force = st.config.force.at(st.step);
    const std::size_t bad = collide_and_stream(st.populations, st.hydro, spec, st.config.boundary, st.kernel);
    st.populations.swap();
    st.times.collide_stream += seconds_since(t0);
    if (bad > 0) {
        std::ostringstream os;
        os << "gradient system singular at " << bad << " node(s), step " << st.step;
        throw SingularSystem(os.str());
    }

    t0 = Clock::now();
    ++st.step;
    st.hydro.force = st.config.force.at(st.step);
    st.stats = update_hydrodynamics(st.populations, st.hydro, spec);
    st.times.hydro += seconds_since(t0);
}

RunReport run(SimulationState& st, const RunHooks& hooks) {
    RunReport rep;
    const auto t0 = Clock::now();
    const SimulationConfig& c = st.config;
    const bool steady = c.tolerance > 0.0 && c.force.period <= 0.0;
    std::vector<double> px, py, pz;
    auto snapshot = [&] {
        px = st.hydro.ux;
        py = st.hydro.uy;
        pz = st.hydro.uz;
    };
    if (steady) snapshot();
    const long start = st.step;
    while (st.step - start < c.max_steps) {
        try {
            step(st);
        } catch (const NonPositiveDensity& e) {
            rep.blew_up = true;
            rep.blowup_step = st.step;
            rep.blowup_reason = e.what();
            break;
        }
        if (!(st.stats.max_speed <= 1.0)) {
            rep.blew_up = true;
            rep.blowup_step = st.step;
            std::ostringstream os;
            os << "max |u| = " << st.stats.max_speed << " exceeds 1";
            rep.blowup_reason = os.str();
            break;
        }
        if (hooks.on_step && !hooks.on_step(st)) break;
        if (hooks.on_output && c.output_every > 0 && st.step % c.output_every == 0) hooks.on_output(st);
        if (steady && (st.step - start) % c.check_interval == 0) {
            double change = 0.0;
            double umax = 0.0;
            const std::size_t N = st.populations.nodes();
            for (std::size_t n = 0; n < N; ++n) {
                change = std::max({change, std::abs(st.hydro.ux[n] - px[n]), std::abs(st.hydro.uy[n] - py[n]),
                                   std::abs(st.hydro.uz[n] - pz[n])});
                umax = std::max({umax, std::abs(st.hydro.ux[n]), std::abs(st.hydro.uy[n]), std::abs(st.hydro.uz[n])});
            }
            // Speeds below 1e-6 count as rest, so round-off alone cannot block convergence.
            const double metric = change / std::max(umax, 1e-6);
            rep.convergence.emplace_back(st.step, metric);
            snapshot();
            if (metric < c.tolerance) {
                rep.converged = true;
                break;
            }
        }
    }
    rep.steps = st.step - start;
    if (hooks.on_output) hooks.on_output(st);
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

std::pair<SimulationState, RunReport> run(const SimulationConfig& config, const RunHooks& hooks) {
    SimulationState st = initialize(config);
    RunReport rep = run(st, hooks);
    return {std::move(st), std::move(rep)};
}

int configure_threads_from_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("CLBM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace clbm

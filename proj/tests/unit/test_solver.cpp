#include "clbm/errors.hpp"
#include "clbm/solver.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace clbm;

namespace {

SimulationConfig periodic_box(GridDims g, double r = 0.5, double s = 1.0, double cs2 = 0.05) {
    SimulationConfig c;
    c.lattice = {r, s, cs2};
    c.grid = g;
    c.relaxation.omega_nu = 1.3;
    c.tolerance = 0.0;
    return c;
}

MomentVector central_of(const SimulationState& st, std::size_t n) {
    const auto& spec = st.params.spec;
    const NodeState ns = st.hydro.node_state(n);
    return raw_to_central(scale_raw(distributions_to_raw_cubic(st.populations.node(n)), spec, true), ns.u);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Taylor-Green vortex decay rate measured from the kinetic energy.
double taylor_green_rate_error(CorrectionMode mode) {
    const double r = 0.5;
    SimulationConfig c = periodic_box({32, 64, 1}, r, 1.0, 0.04);
    c.relaxation.omega_nu = 1.2;
    c.corrections = mode;
    SimulationState st = initialize(c);
    const auto& spec = st.params.spec;
    const auto& g = c.grid;
    const double pi = std::numbers::pi, U = 0.01, k = 2 * pi / 32;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = i + 0.5, y = (j + 0.5) * r;
            const FrameVelocity u{U * std::sin(k * x) * std::cos(k * y), -U * std::cos(k * x) * std::sin(k * y), 0.0};
            const double rho = 1.0 + U * U / 4 * (std::cos(2 * k * x) + std::cos(2 * k * y)) / spec.cs2;
            st.populations.set_node(g.index(i, j, 0),
                                    raw_to_distributions(scale_raw(raw_equilibria(rho, u, spec.cs2), spec, false)));
        }
    }
    st.stats = update_hydrodynamics(st.populations, st.hydro, spec);
    auto energy = [&] {
        double e = 0.0;
        for (std::size_t n = 0; n < g.nodes(); ++n) e += st.hydro.ux[n] * st.hydro.ux[n] + st.hydro.uy[n] * st.hydro.uy[n];
        return e;
    };
    for (int t = 0; t < 50; ++t) step(st);
    const double e0 = energy();
    const int steps = 2000;
    for (int t = 0; t < steps; ++t) step(st);
    const double rate = -std::log(energy() / e0) / (2.0 * steps);
    return rate / (st.params.nu * 2 * k * k) - 1.0;
}

} // namespace

TEST_CASE("relaxation rates from transport coefficients") {
    CHECK(omega_from_nu(0.1 * 0.1, 0.1) == doctest::Approx(1.0 / 0.6).epsilon(1e-14));
    CHECK(omega_from_xi(2.0 * 0.05 / 3.0 * 0.5, 0.05) == doctest::Approx(1.0).epsilon(1e-14));

    SimulationConfig c = periodic_box({2, 2, 2});
    c.relaxation = {};
    c.relaxation.tau = 0.8;
    ResolvedParameters p = resolve_parameters(c);
    CHECK(p.sched.omega_nu == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(p.sched.omega_xi == p.sched.omega_nu);
    CHECK(p.nu == doctest::Approx(0.05 * 0.3).epsilon(1e-14));

    c.relaxation.omega_xi = 1.0;
    CHECK(resolve_parameters(c).sched.omega_xi == 1.0);
    c.relaxation.xi = 0.1;
    CHECK_THROWS_AS((void)resolve_parameters(c), InvalidParameter);
    c.relaxation = {};
    CHECK_THROWS_AS((void)resolve_parameters(c), InvalidParameter);
    c.relaxation.omega_nu = 2.0;
    CHECK_THROWS_AS((void)resolve_parameters(c), InvalidParameter);
    c.relaxation.omega_nu = 1.0;
    c.relaxation.nu = 0.1;
    CHECK_THROWS_AS((void)resolve_parameters(c), InvalidParameter);
}

TEST_CASE("time-periodic force") {
    ForceConfig f{{1e-5, 0.0, 0.0}, 0.0};
    CHECK(f.at(123)[0] == 1e-5);
    f.period = 100.0;
    CHECK(f.at(0)[0] == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(f.at(50)[0] == doctest::Approx(-1e-5).epsilon(1e-14));
    CHECK(std::abs(f.at(25)[0]) <= 1e-18);
}

TEST_CASE("initialization is the resting equilibrium") {
    SimulationConfig c = periodic_box({4, 3, 2}, 1.0, 1.0, 1.0 / 3.0);
    c.force.amplitude = {1e-5, 0.0, 0.0};
    const SimulationState st = initialize(c);
    for (std::size_t n = 0; n < c.grid.nodes(); ++n) {
        CHECK(std::abs(st.hydro.rho[n] - 1.0) <= 1e-15);
        CHECK(std::abs(st.hydro.ux[n]) <= 1e-16);
        CHECK(st.hydro.uy[n] == 0.0);
    }
    const SimulationState still = initialize(periodic_box({2, 2, 2}, 1.0, 1.0, 1.0 / 3.0));
    const Populations f = still.populations.node(3);
    CHECK(f[0] == doctest::Approx(8.0 / 27.0).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(2.0 / 27.0).epsilon(1e-14));
    CHECK(f[7] == doctest::Approx(1.0 / 54.0).epsilon(1e-14));
    CHECK(f[19] == doctest::Approx(1.0 / 216.0).epsilon(1e-14));
}

TEST_CASE("equilibrium without forcing is a fixed point") {
    for (const BoundarySpec& b : {BoundarySpec::all_periodic(), BoundarySpec::duct()}) {
        SimulationConfig c = periodic_box({5, 6, 4}, 0.5, 1.3, 0.05);
        c.boundary = b;
        SimulationState st = initialize(c);
        const std::vector<double> f0 = st.populations.buffer(st.populations.current_index());
        for (int t = 0; t < 20; ++t) step(st);
        CHECK(st.step == 20);
        const std::vector<double>& f1 = st.populations.buffer(st.populations.current_index());
        double d = 0.0;
        for (std::size_t i = 0; i < f0.size(); ++i) d = std::max(d, std::abs(f1[i] - f0[i]));
        CHECK(d <= 1e-14);
    }
}

TEST_CASE("uniform force accelerates a periodic box exactly") {
    SimulationConfig c = periodic_box({4, 6, 3});
    c.force.amplitude = {2e-6, -1e-6, 5e-7};
    for (Variant v : {Variant::central, Variant::raw}) {
        c.variant = v;
        SimulationState st = initialize(c);
        for (int n = 1; n <= 200; ++n) {
            step(st);
            if (n % 50 == 0) {
                CHECK(std::abs(mean(st.hydro.ux) - n * 2e-6) <= 1e-12);
                CHECK(std::abs(mean(st.hydro.uy) + n * 1e-6) <= 1e-12);
                CHECK(std::abs(mean(st.hydro.uz) - n * 5e-7) <= 1e-12);
            }
        }
    }
}

TEST_CASE("duct flow conserves mass over 10^4 steps") {
    SimulationConfig c = periodic_box({3, 12, 10}, 0.5, 0.6, 0.05);
    c.boundary = BoundarySpec::duct();
    c.force.amplitude = {1e-5, 0.0, 0.0};
    c.max_steps = 10000;
    SimulationState st = initialize(c);
    const double m0 = total_mass(st.populations);
    const RunReport rep = run(st);
    CHECK(rep.steps == 10000);
    CHECK_FALSE(rep.blew_up);
    CHECK(std::abs(total_mass(st.populations) - m0) <= 1e-12 * m0);
}

TEST_CASE("runs are deterministic") {
    SimulationConfig c = periodic_box({6, 8, 5}, 0.5, 1.0, 0.08);
    c.boundary = BoundarySpec::cavity(0.05);
    c.max_steps = 300;
    const auto [a, ra] = run(c);
    const auto [b, rb] = run(c);
    CHECK(a.populations.buffer(a.populations.current_index()) == b.populations.buffer(b.populations.current_index()));
    CHECK(a.hydro.ux == b.hydro.ux);
    CHECK(ra.steps == rb.steps);
}

TEST_CASE("steady runs stop on the convergence criterion") {
    SimulationConfig c = periodic_box({3, 3, 3});
    c.tolerance = 1e-9;
    c.max_steps = 5000;
    const auto [st, rep] = run(c);
    CHECK(rep.converged);
    CHECK(rep.steps <= 100);
    CHECK(st.step == rep.steps);
}

TEST_CASE("an unstable configuration is reported, not thrown") {
    SimulationConfig c = periodic_box({8, 16, 8}, 0.5, 1.0, 0.08);
    c.boundary = BoundarySpec::cavity(0.6);
    c.relaxation.omega_nu = 1.99;
    c.max_steps = 5000;
    RunReport rep;
    CHECK_NOTHROW(rep = run(c).second);
    CHECK(rep.blew_up);
    CHECK(rep.blowup_step > 0);
    CHECK(rep.blowup_step <= 5000);
    CHECK_FALSE(rep.blowup_reason.empty());
}

TEST_CASE("wall-driven shear reproduces the Couette strain rate") {
    // Rest wall at y = 0, lid at y = H moving with U; periodic in x and z.
    const double r = 0.5, U = 0.02;
    SimulationConfig c = periodic_box({2, 16, 2}, r, 1.0, 0.05);
    c.relaxation.omega_nu = 1.0;
    c.boundary = BoundarySpec::cavity(U);
    for (int f : {Face::x_min, Face::x_max, Face::z_min, Face::z_max}) c.boundary.faces[f].kind = FaceKind::periodic;
    c.tolerance = 1e-12;
    c.max_steps = 100000;
    auto [st, rep] = run(c);
    REQUIRE(rep.converged);
    const double H = c.grid.ny * r;
    for (int j = 2; j < c.grid.ny - 2; ++j) {
        const std::size_t n = c.grid.index(0, j, 0);
        CHECK(st.hydro.ux[n] == doctest::Approx(U * (j + 0.5) * r / H).epsilon(1e-3));
        const Vec3 S = off_diagonal_strain(central_of(st, n), st.hydro.rho[n], st.params.sched.omega_nu,
                                           st.params.spec.cs2);
        CHECK(S[0] == doctest::Approx(U / (2 * H)).epsilon(0.01));
    }
}

// The recovered du_x/dx of steady duct flow is not exactly zero: the local
// formulas carry no force terms, leaving an O(F u) remainder. It must vanish
// quadratically with the driving force.
TEST_CASE("steady duct flow has no first-order streamwise velocity gradient") {
    auto residual = [](double F) {
        SimulationConfig c = periodic_box({3, 16, 8}, 0.5, 1.0, 0.05);
        c.boundary = BoundarySpec::duct();
        c.relaxation.omega_nu = 1.0 / 0.8;
        c.force.amplitude = {F, 0.0, 0.0};
        c.tolerance = 1e-11;
        c.max_steps = 100000;
        auto [st, rep] = run(c);
        REQUIRE(rep.converged);
        density_gradient(st.hydro, st.params.spec, c.boundary);
        double umax = 0.0, gmax = 0.0;
        for (std::size_t n = 0; n < c.grid.nodes(); ++n) {
            umax = std::max(umax, st.hydro.ux[n]);
            const Vec3 g = diagonal_velocity_gradients(central_of(st, n), st.hydro.node_state(n), st.params.sched,
                                                       st.params.spec);
            gmax = std::max(gmax, std::abs(g[0]));
        }
        return std::pair{gmax, umax};
    };
    const auto [g1, u1] = residual(1e-5);
    const auto [g2, u2] = residual(2e-5);
    CHECK(u2 / u1 == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(g2 / g1 == doctest::Approx(4.0).epsilon(0.02));
    CHECK(g1 < 1e-4 * u1);
}

TEST_CASE("shear wave decays at the viscous rate on a cuboid lattice") {
    // u_x = A sin(k y) along the stretched axis.
    const double r = 0.5, A = 1e-3;
    SimulationConfig c = periodic_box({1, 64, 1}, r, 1.0, 0.05);
    c.relaxation.omega_nu = 1.4;
    SimulationState st = initialize(c);
    const auto& spec = st.params.spec;
    const double k = 2 * std::numbers::pi / (64 * r);
    for (int j = 0; j < 64; ++j) {
        const FrameVelocity u{A * std::sin(k * (j + 0.5) * r), 0.0, 0.0};
        st.populations.set_node(j, raw_to_distributions(scale_raw(raw_equilibria(1.0, u, spec.cs2), spec, false)));
    }
    st.stats = update_hydrodynamics(st.populations, st.hydro, spec);
    auto amplitude = [&] {
        double a = 0.0;
        for (int j = 0; j < 64; ++j) a += st.hydro.ux[j] * std::sin(k * (j + 0.5) * r);
        return a / 32.0;
    };
    for (int t = 0; t < 20; ++t) step(st);
    const double a0 = amplitude();
    for (int t = 0; t < 1000; ++t) step(st);
    const double rate = -std::log(amplitude() / a0) / 1000.0;
    CHECK(rate == doctest::Approx(st.params.nu * k * k).epsilon(0.01));
}

TEST_CASE("corrections restore the Taylor-Green decay rate on a cuboid lattice") {
    CHECK(std::abs(taylor_green_rate_error(CorrectionMode::full)) <= 0.01);
    CHECK(std::abs(taylor_green_rate_error(CorrectionMode::off)) >= 1.0);
}

namespace {

// Standing sound wave along x (axis 0) or y (axis 1). Returns the relative
// error of the energy decay rate against (4/3 nu + xi) k^2.
double sound_rate_error(int axis, double r, double omega_xi, CorrectionMode mode) {
    const double h = axis == 1 ? r : 1.0;
    const int n = static_cast<int>(std::lround(64 / h));
    SimulationConfig c = periodic_box(axis == 0 ? GridDims{n, 1, 1} : GridDims{1, n, 1}, r, 1.0, 0.08);
    c.relaxation.omega_nu = 1.2;
    c.relaxation.omega_xi = omega_xi;
    c.corrections = mode;
    SimulationState st = initialize(c);
    const auto& spec = st.params.spec;
    const double k = 2 * std::numbers::pi / (n * h);
    for (int j = 0; j < n; ++j) {
        const double rho = 1.0 + 1e-5 * std::cos(k * (j + 0.5) * h);
        st.populations.set_node(j, raw_to_distributions(scale_raw(raw_equilibria(rho, {}, spec.cs2), spec, false)));
    }
    st.stats = update_hydrodynamics(st.populations, st.hydro, spec);
    const std::vector<double>& u = axis == 0 ? st.hydro.ux : st.hydro.uy;
    // Averaged over half an acoustic period, where the energy ripple repeats.
    const int half = static_cast<int>(std::lround(std::numbers::pi / (std::sqrt(spec.cs2) * k)));
    auto energy = [&] {
        double s = 0.0;
        for (int t = 0; t < half; ++t) {
            step(st);
            for (int j = 0; j < n; ++j) {
                const double d = st.hydro.rho[j] - 1.0;
                s += spec.cs2 * d * d + u[j] * u[j];
            }
        }
        return s;
    };
    for (int t = 0; t < 50; ++t) step(st);
    const double e0 = energy();
    const int gap = 1500;
    for (int t = 0; t < gap; ++t) step(st);
    const double rate = -std::log(energy() / e0) / (2.0 * (gap + half));
    return rate / (0.5 * (4.0 / 3.0 * st.params.nu + st.params.xi) * k * k) - 1.0;
}

} // namespace

TEST_CASE("sound waves attenuate at the shear-plus-bulk rate") {
    for (double oxi : {0.5, 1.0, 1.4}) {
        CHECK(std::abs(sound_rate_error(0, 1.0, oxi, CorrectionMode::full)) <= 0.005);
        CHECK(std::abs(sound_rate_error(0, 0.5, oxi, CorrectionMode::full)) <= 0.005);
        CHECK(std::abs(sound_rate_error(1, 0.5, oxi, CorrectionMode::full)) <= 0.005);
    }
    // Along the stretched axis the uncorrected scheme misses the rate.
    CHECK(sound_rate_error(1, 0.5, 1.0, CorrectionMode::off) >= 0.03);
}

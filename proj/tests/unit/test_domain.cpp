#include "clbm/detail/kernel.hpp"
#include "clbm/domain.hpp"
#include "clbm/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace clbm;

namespace {

Populations equilibrium(const LatticeSpec& spec, double rho, const FrameVelocity& u) {
    return raw_to_distributions(scale_raw(raw_equilibria(rho, u, spec.cs2), spec, false));
}

BoundarySpec all_walls() {
    BoundarySpec b;
    for (auto& f : b.faces) f.kind = FaceKind::wall_rest;
    return b;
}

// Random near-equilibrium field with smooth-ish density variation.
void fill_random(PopulationField& field, const LatticeSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (std::size_t n = 0; n < field.nodes(); ++n) {
        field.set_node(n, oracle::near_equilibrium(rng, spec, 1.0 + 0.02 * d(rng),
                                                   {0.03 * d(rng), 0.03 * d(rng), 0.03 * d(rng)}, 0.02));
    }
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("boundary validation") {
    CHECK_NOTHROW(BoundarySpec::all_periodic().validate());
    CHECK_NOTHROW(BoundarySpec::duct().validate());
    CHECK_NOTHROW(BoundarySpec::cavity(0.1).validate());
    BoundarySpec mixed = BoundarySpec::duct();
    mixed.faces[Face::y_max].kind = FaceKind::periodic;
    CHECK_THROWS_AS(mixed.validate(), ConfigurationError);
    BoundarySpec lid_x = all_walls();
    lid_x.faces[Face::x_min] = {FaceKind::wall_moving, 0.1};
    CHECK_THROWS_AS(lid_x.validate(), ConfigurationError);
}

TEST_CASE("streaming moves a population one link") {
    const GridDims g{5, 4, 3};
    for (int a = 0; a < Q; ++a) {
        PopulationField field(g);
        field.current(a)[g.index(4, 0, 1)] = 1.0;
        stream(field, BoundarySpec::all_periodic());
        const int i = (4 + kCx[a] + 5) % 5, j = (0 + kCy[a] + 4) % 4, k = (1 + kCz[a] + 3) % 3;
        CHECK(field.next(a)[g.index(i, j, k)] == 1.0);
        double total = 0.0;
        for (std::size_t n = 0; n < g.nodes(); ++n) total += field.next(a)[n];
        CHECK(total == 1.0);
    }
}

TEST_CASE("periodic streaming conserves mass") {
    const LatticeSpec spec = build_lattice(0.5, 1.0, 0.05);
    PopulationField field({7, 6, 5});
    fill_random(field, spec, 30);
    const double m0 = total_mass(field);
    for (int t = 0; t < 5; ++t) {
        stream(field, BoundarySpec::all_periodic());
        field.swap();
    }
    CHECK(std::abs(total_mass(field) - m0) <= 1e-12 * m0);
}

TEST_CASE("half-way bounce-back returns the population to its node") {
    const GridDims g{4, 5, 6};
    const BoundarySpec b = BoundarySpec::duct();
    PopulationField field(g);
    const std::size_t wall_node = g.index(2, 0, 3);
    for (int a = 0; a < Q; ++a) field.current(a)[wall_node] = 1.0 + a;
    stream(field, b);
    apply_halfway_bounce_back(field, b);
    for (int a = 0; a < Q; ++a) {
        if (kCy[a] == -1) CHECK(field.next(kOpposite[a])[wall_node] == 1.0 + a);
    }
    // Rest walls conserve mass with streaming.
    const LatticeSpec spec = build_lattice(0.5, 1.0, 0.05);
    PopulationField f2(g);
    fill_random(f2, spec, 31);
    const double m0 = total_mass(f2);
    for (int t = 0; t < 5; ++t) {
        stream(f2, b);
        apply_halfway_bounce_back(f2, b);
        f2.swap();
    }
    CHECK(std::abs(total_mass(f2) - m0) <= 1e-12 * m0);
}

TEST_CASE("moving-wall coefficients equal the antisymmetric equilibrium part") {
    for (auto [r, s, cs2] : {std::array{1.0, 1.0, 1.0 / 3.0}, std::array{0.5, 1.0, 0.05}, std::array{0.4, 1.3, 0.04}}) {
        const LatticeSpec spec = build_lattice(r, s, cs2);
        const auto c = moving_wall_coefficients(spec);
        const double h = 1e-4;
        const Populations fp = equilibrium(spec, 1.0, {h, 0, 0}), fm = equilibrium(spec, 1.0, {-h, 0, 0});
        double total = 0.0;
        for (int a = 0; a < Q; ++a) {
            if (kCy[a] != 1) {
                CHECK(c[a] == 0.0);
                continue;
            }
            const int o = kOpposite[a];
            const double expect = -((fp[a] - fp[o]) - (fm[a] - fm[o])) / (2 * h);
            CHECK(std::abs(c[a] - expect) <= 1e-10);
            total += c[a];
        }
        CHECK(std::abs(total) <= 1e-16);
    }
    const auto c = moving_wall_coefficients(build_lattice(1.0, 1.0));
    CHECK(std::abs(c[7]) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(std::abs(c[19]) == doctest::Approx(1.0 / 36.0).epsilon(1e-14));
}

TEST_CASE("a resting lid reduces to bounce-back") {
    const LatticeSpec spec = build_lattice(0.5, 1.0, 0.05);
    const GridDims g{4, 5, 3};
    PopulationField a(g), b(g);
    fill_random(a, spec, 32);
    fill_random(b, spec, 32);
    HydroFieldSet h(g);
    update_hydrodynamics(a, h, spec);

    const BoundarySpec lid = BoundarySpec::cavity(0.0);
    stream(a, lid);
    apply_halfway_bounce_back(a, lid);
    apply_moving_wall(a, h.rho, 0.0, spec);

    stream(b, all_walls());
    apply_halfway_bounce_back(b, all_walls());
    CHECK(a.buffer(1 - a.current_index()) == b.buffer(1 - b.current_index()));

    CHECK_THROWS_AS(apply_moving_wall(a, h.rho, 0.1, spec, Face::x_min), ConfigurationError);
}

TEST_CASE("moving lid adds momentum and keeps mass") {
    const LatticeSpec spec = build_lattice(0.5, 1.0, 0.05);
    const GridDims g{4, 5, 3};
    const BoundarySpec lid = BoundarySpec::cavity(0.05);
    PopulationField field(g);
    fill_random(field, spec, 33);
    HydroFieldSet h(g);
    const double m0 = total_mass(field);
    for (int t = 0; t < 10; ++t) {
        update_hydrodynamics(field, h, spec);
        stream(field, lid);
        apply_halfway_bounce_back(field, lid);
        apply_moving_wall(field, h.rho, 0.05, spec);
        field.swap();
    }
    CHECK(std::abs(total_mass(field) - m0) <= 1e-12 * m0);
}

TEST_CASE("hydrodynamic update") {
    const LatticeSpec spec = build_lattice(0.5, 1.3, 0.05);
    const GridDims g{3, 2, 2};
    PopulationField field(g);
    const FrameVelocity u{0.02, -0.01, 0.03};
    for (std::size_t n = 0; n < g.nodes(); ++n) field.set_node(n, equilibrium(spec, 1.1, u));
    HydroFieldSet h(g);
    h.force = {2e-4, 0.0, -4e-4};
    const HydroStats st = update_hydrodynamics(field, h, spec);
    CHECK(h.rho[5] == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(h.ux[5] == doctest::Approx(0.02 + 1e-4 / 1.1).epsilon(1e-13));
    CHECK(h.uy[5] == doctest::Approx(-0.01).epsilon(1e-13));
    CHECK(h.uz[5] == doctest::Approx(0.03 - 2e-4 / 1.1).epsilon(1e-13));
    CHECK(st.min_rho == doctest::Approx(1.1).epsilon(1e-14));

    Populations bad = equilibrium(spec, 1.0, {});
    for (double& x : bad) x = -x;
    field.set_node(7, bad);
    try {
        update_hydrodynamics(field, h, spec);
        FAIL("expected NonPositiveDensity");
    } catch (const NonPositiveDensity& e) {
        CHECK(e.node() == 7);
    }
}

TEST_CASE("density gradient is exact for linear fields") {
    const LatticeSpec spec = build_lattice(0.5, 1.3, 0.05);
    const GridDims g{6, 7, 5};
    HydroFieldSet h(g);
    const double a = 1e-3, b = -2e-3, c = 5e-4;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) h.rho[g.index(i, j, k)] = 1.0 + a * i + b * j * 0.5 + c * k * 1.3;
    density_gradient(h, spec, all_walls());
    for (std::size_t n = 0; n < g.nodes(); ++n) {
        CHECK(h.grad_x[n] == doctest::Approx(a).epsilon(1e-9));
        CHECK(h.grad_y[n] == doctest::Approx(b).epsilon(1e-9));
        CHECK(h.grad_z[n] == doctest::Approx(c).epsilon(1e-9));
    }
}

TEST_CASE("density gradient converges at second order") {
    // rho = 1 + eps sin(2 pi z / Lz) with walls in z; halving the spacing must
    // cut the error at least fourfold (up to round-off).
    auto error = [](int ny) {
        const double r = 0.5;
        const LatticeSpec spec = build_lattice(1.0, r, 0.05);
        const GridDims g{1, 1, ny};
        HydroFieldSet h(g);
        const double L = ny * r, kk = 2 * std::numbers::pi / L;
        for (int k = 0; k < ny; ++k) h.rho[k] = 1.0 + 1e-3 * std::sin(kk * (k + 0.5) * r);
        BoundarySpec b = BoundarySpec::all_periodic();
        b.faces[Face::z_min].kind = b.faces[Face::z_max].kind = FaceKind::wall_rest;
        density_gradient(h, spec, b);
        double e = 0.0;
        for (int k = 0; k < ny; ++k) e = std::max(e, std::abs(h.grad_z[k] - 1e-3 * kk * std::cos(kk * (k + 0.5) * r)));
        return e;
    };
    const double e1 = error(32), e2 = error(64);
    CHECK(e1 / e2 > 3.5);
}

TEST_CASE("collide_field applies collide_node at every node") {
    const LatticeSpec spec = build_lattice(0.5, 1.3, 0.05);
    const RelaxationSchedule sched{1.6, 1.0, 1.2, 1.1};
    const GridDims g{9, 5, 4};
    for (Variant v : {Variant::central, Variant::raw}) {
        PopulationField field(g);
        fill_random(field, spec, 34);
        HydroFieldSet h(g);
        h.force = {1e-5, 0.0, 2e-6};
        update_hydrodynamics(field, h, spec);
        density_gradient(h, spec, BoundarySpec::duct());
        std::vector<Populations> expect(g.nodes());
        for (std::size_t n = 0; n < g.nodes(); ++n)
            expect[n] = collide_node(field.node(n), h.node_state(n), sched, spec, v);
        CHECK(collide_field(field, h, detail::make_kernel_params(sched, spec, v, CorrectionMode::full)) == 0);
        double err = 0.0;
        for (std::size_t n = 0; n < g.nodes(); ++n) err = std::max(err, oracle::max_abs_diff(field.node(n), expect[n]));
        CHECK(err <= 1e-14);
    }
}

TEST_CASE("fused collide-and-stream equals the separate operations") {
    const LatticeSpec spec = build_lattice(0.5, 1.3, 0.05);
    const RelaxationSchedule sched{1.6, 1.0, 1.2, 1.1};
    const auto kp = detail::make_kernel_params(sched, spec, Variant::central, CorrectionMode::full);
    for (const BoundarySpec& b : {BoundarySpec::all_periodic(), BoundarySpec::duct(), BoundarySpec::cavity(0.04)}) {
        for (GridDims g : {GridDims{9, 5, 4}, GridDims{70, 3, 2}, GridDims{1, 8, 8}}) {
            PopulationField fused(g), split(g);
            fill_random(fused, spec, 35);
            fill_random(split, spec, 35);
            HydroFieldSet h(g);
            update_hydrodynamics(fused, h, spec);
            density_gradient(h, spec, b);

            CHECK(collide_and_stream(fused, h, spec, b, kp) == 0);
            collide_field(split, h, kp);
            stream(split, b);
            apply_halfway_bounce_back(split, b);
            if (b.faces[Face::y_max].kind == FaceKind::wall_moving)
                apply_moving_wall(split, h.rho, b.faces[Face::y_max].lid_velocity, spec);
            CHECK(max_diff(fused.buffer(1 - fused.current_index()), split.buffer(1 - split.current_index())) <= 1e-15);
        }
    }
}

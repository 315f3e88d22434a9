#include "clbm/solver.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    using namespace clbm;
    const int n = argc > 1 ? std::atoi(argv[1]) : 40;
    const int steps = argc > 2 ? std::atoi(argv[2]) : 50;
    SimulationConfig c;
    c.lattice = {0.5, 1.0, 0.08};
    c.grid = {n, 2 * n, n};
    c.relaxation.omega_nu = 1.5;
    c.boundary = BoundarySpec::cavity(0.05);
    c.max_steps = steps;
    c.tolerance = 0;
    auto st = initialize(c);
    auto t0 = std::chrono::steady_clock::now();
    auto rep = run(st);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("nodes=%zu steps=%ld time=%.3f MLUPS=%.2f (grad %.2f cs %.2f hydro %.2f) blew=%d\n",
                st.populations.nodes(), rep.steps, dt, st.populations.nodes() * double(rep.steps) / dt / 1e6,
                st.times.gradient, st.times.collide_stream, st.times.hydro, rep.blew_up);
}

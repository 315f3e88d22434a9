#include "clbm/validation.hpp"

#include "clbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

namespace clbm {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// cosh(k x) / cosh(k) for 0 <= x <= 1 without overflow.
double cosh_ratio(double k, double x) {
    return std::exp(k * (x - 1.0)) * (1.0 + std::exp(-2.0 * k * x)) / (1.0 + std::exp(-2.0 * k));
}

cplx cosh_ratio(cplx k, double x) {
    return std::exp(k * (x - 1.0)) * (1.0 + std::exp(-2.0 * k * x)) / (1.0 + std::exp(-2.0 * k));
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

} // namespace

double duct_velocity(double y, double z, double L, double Fx, double rho, double nu, int n_max) {
    require(L > 0.0 && rho > 0.0 && nu > 0.0, "L, rho, nu > 0 violated");
    require(n_max >= 99 && n_max % 2 == 1, "n_max odd and >= 99 violated");
    const double h = 0.5 * L * (1.0 + 1e-12);
    require(std::abs(y) <= h && std::abs(z) <= h, "|y|, |z| <= L/2 violated");
    const double zeta = std::min(1.0, 2.0 * std::abs(z) / L);
    double sum = 0.0;
    for (int n = 1; n <= n_max; n += 2) {
        const double k = n * pi / 2.0;
        const double sign = ((n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
        const double nn = static_cast<double>(n);
        sum += sign * (1.0 - cosh_ratio(k, zeta)) * std::cos(n * pi * y / L) / (nn * nn * nn);
    }
    return 4.0 * L * L * Fx / (pi * pi * pi * rho * nu) * sum;
}

double womersley_velocity(double y, double z, double t, double a, double F_m, double omega, double nu,
                          int n_max) {
    require(a > 0.0 && omega > 0.0 && nu > 0.0, "a, omega, nu > 0 violated");
    require(n_max >= 50, "n_max >= 50 violated");
    const double h = a * (1.0 + 1e-12);
    require(std::abs(y) <= h && std::abs(z) <= h, "|y|, |z| <= a violated");
    const double Y = std::abs(y) / a;
    const double Z = std::abs(z) / a;
    // The series converges only conditionally on the wall itself, where the
    // no-slip value is exact.
    if (Y >= 1.0 || Z >= 1.0) return 0.0;
    const double wo2 = a * a * omega / nu;
    cplx sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = (2 * n + 1) * pi / 2.0;
        const cplx gamma = std::sqrt(cplx(p * p, wo2));
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        sum += sign / p * (cosh_ratio(gamma, Y) * std::cos(p * Z) + cosh_ratio(gamma, Z) * std::cos(p * Y));
    }
    const cplx amp = F_m / cplx(0.0, omega) * (1.0 - 2.0 * sum);
    return (amp * std::exp(cplx(0.0, omega * t))).real();
}

double relative_l2_error(std::span<const double> computed, std::span<const double> reference) {
    if (computed.size() != reference.size()) {
        std::ostringstream os;
        os << "sample counts differ: " << computed.size() << " vs " << reference.size();
        throw InvalidParameter(os.str());
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < computed.size(); ++i) {
        const double d = computed[i] - reference[i];
        num += d * d;
        den += reference[i] * reference[i];
    }
    if (den == 0.0) throw ZeroReference("reference samples are identically zero");
    return std::sqrt(num) / std::sqrt(den);
}

void ReferenceProfile::validate(double lo, double hi) const {
    require(coords.size() == values.size(), "coordinate and value counts differ");
    require(!coords.empty(), "profile has no samples");
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < lo || coords[i] > hi) {
            std::ostringstream os;
            os << "coordinate " << coords[i] << " outside [" << lo << ", " << hi << "]";
            throw InvalidParameter(os.str());
        }
        if (i > 0 && !(coords[i] > coords[i - 1])) throw InvalidParameter("coordinates not strictly increasing");
    }
}

double ReferenceProfile::at(double x) const {
    require(!coords.empty() && coords.size() == values.size(), "profile has no samples");
    if (x <= coords.front()) return values.front();
    if (x >= coords.back()) return values.back();
    const auto it = std::upper_bound(coords.begin(), coords.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - coords.begin());
    const double w = (x - coords[i - 1]) / (coords[i] - coords[i - 1]);
    return (1.0 - w) * values[i - 1] + w * values[i];
}

ReferenceProfile read_reference_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reference profile " + path);
    ReferenceProfile p;
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            if (header) {
                std::string note = line.substr(hash + 1);
                if (!note.empty() && note.front() == ' ') note.erase(0, 1);
                p.source += note + "\n";
            }
            line.erase(hash);
        }
        std::istringstream ls(line);
        double c = 0.0, v = 0.0;
        if (!(ls >> c)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected `coord value`", lineno);
        }
        std::string rest;
        if (!(ls >> v) || (ls >> rest)) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected `coord value`", lineno);
        }
        header = false;
        if (!p.coords.empty() && !(c > p.coords.back())) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": coordinates must increase", lineno);
        }
        p.coords.push_back(c);
        p.values.push_back(v);
    }
    if (p.coords.empty()) throw ParseError(path + ": no samples", lineno);
    return p;
}

SimulationConfig sweep_config(const SweepRequest& req, double point, Variant variant, double value) {
    SimulationConfig c = req.base;
    c.variant = variant;
    auto set_lid = [&](double U) { c.boundary.faces[Face::y_max] = {FaceKind::wall_moving, U}; };
    auto& rc = c.relaxation;
    switch (req.axis) {
    case SweepAxis::lid_speed:
        rc.nu.reset();
        rc.tau.reset();
        rc.omega_nu = point;
        set_lid(value);
        break;
    case SweepAxis::omega:
        rc.nu.reset();
        rc.tau.reset();
        rc.omega_nu = value;
        set_lid(point);
        break;
    case SweepAxis::reynolds:
        rc.omega_nu.reset();
        rc.tau.reset();
        rc.nu = point * c.grid.nx / value;
        set_lid(point);
        break;
    }
    c.max_steps = req.budget;
    c.tolerance = 0.0;
    c.output_every = 0;
    return c;
}

Probe run_probe(const SimulationConfig& config, double value, long budget) {
    SimulationConfig c = config;
    c.max_steps = budget;
    c.tolerance = 0.0;
    Probe p;
    p.value = value;
    SimulationState st = initialize(c);
    try {
        const RunReport rep = run(st);
        p.steps = rep.steps;
        p.stable = !rep.blew_up;
        p.reason = rep.blowup_reason;
    } catch (const SingularSystem& e) {
        p.steps = st.step;
        p.stable = false;
        p.reason = e.what();
    }
    return p;
}

std::vector<SweepRow> stability_sweep(const SweepRequest& req, const std::function<void(const std::string&)>& log) {
    if (req.base.boundary.faces[Face::y_max].kind != FaceKind::wall_moving) {
        throw ConfigurationError("stability sweep needs a moving lid on y_max");
    }
    require(req.iterations >= 0 && req.budget > 0, "iterations >= 0 and budget > 0 violated");
    require(req.stable != req.unstable, "bracket ends must differ");
    const double dir = req.unstable > req.stable ? 1.0 : -1.0;
    std::vector<SweepRow> rows;
    for (double point : req.points) {
        for (Variant v : req.variants) {
            SweepRow row;
            row.point = point;
            row.variant = v;
            auto probe = [&](double value) {
                Probe p = run_probe(sweep_config(req, point, v, value), value, req.budget);
                if (log) {
                    std::ostringstream os;
                    os << (v == Variant::central ? "central" : "raw") << " point " << point << " value " << value
                       << ": " << (p.stable ? "stable" : "unstable at step " + std::to_string(p.steps));
                    log(os.str());
                }
                row.probes.push_back(p);
                return p.stable;
            };
            std::ostringstream where;
            where << "point " << point << " (" << (v == Variant::central ? "central" : "raw") << ")";
            if (!probe(req.stable)) {
                std::ostringstream os;
                os << "bracket end " << req.stable << " is unstable at " << where.str();
                throw BracketNotFound(os.str());
            }
            if (probe(req.unstable)) {
                std::ostringstream os;
                os << "bracket end " << req.unstable << " is stable at " << where.str();
                throw BracketNotFound(os.str());
            }
            double lo = req.stable, hi = req.unstable;
            for (int it = 0; it < req.iterations; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (probe(mid)) lo = mid;
                else hi = mid;
            }
            row.max_stable = lo;
            row.min_unstable = hi;
            for (const Probe& s : row.probes) {
                if (!s.stable) continue;
                for (const Probe& u : row.probes) {
                    if (!u.stable && (s.value - u.value) * dir > 0.0) {
                        std::ostringstream os;
                        os << "stable at " << s.value << " but unstable at " << u.value;
                        row.anomalies.push_back(os.str());
                    }
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace clbm

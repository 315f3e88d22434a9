#include "clbm/cli.hpp"

#include "clbm/errors.hpp"

#include <json.hpp>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace clbm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
    std::ostringstream os;
    os << name << ":" << line << ": " << what;
    throw ParseError(os.str(), line);
}

double to_double(const std::string& v, const std::string& name, int line) {
    double x = 0.0;
    const char* b = v.data();
    const char* e = b + v.size();
    const auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e) fail(name, line, "expected a number, got '" + v + "'");
    return x;
}

long to_long(const std::string& v, const std::string& name, int line) {
    long x = 0;
    const char* b = v.data();
    const char* e = b + v.size();
    const auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e) fail(name, line, "expected an integer, got '" + v + "'");
    return x;
}

int to_int(const std::string& v, const std::string& name, int line) {
    const long x = to_long(v, name, line);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        fail(name, line, "integer out of range: " + v);
    }
    return static_cast<int>(x);
}

void set_axis(BoundarySpec& b, int axis, const std::string& v, const std::string& name, int line) {
    FaceKind k;
    if (v == "periodic") k = FaceKind::periodic;
    else if (v == "wall") k = FaceKind::wall_rest;
    else fail(name, line, "expected periodic or wall, got '" + v + "'");
    for (int f : {2 * axis, 2 * axis + 1}) {
        // A lid on y_max stays a lid when its axis is (re)declared as walls.
        if (k == FaceKind::wall_rest && b.faces[f].kind == FaceKind::wall_moving) continue;
        b.faces[f] = {k, 0.0};
    }
}

void apply_key(SimulationConfig& c, const std::string& section, const std::string& key, const std::string& v,
               const std::string& name, int line) {
    auto num = [&] { return to_double(v, name, line); };
    auto unknown = [&] { fail(name, line, "unknown key '" + key + "' in [" + section + "]"); };
    if (section == "lattice") {
        if (key == "r") c.lattice.r = num();
        else if (key == "s") c.lattice.s = num();
        else if (key == "cs2") {
            if (v == "auto") c.lattice.cs2.reset();
            else c.lattice.cs2 = num();
        } else unknown();
    } else if (section == "grid") {
        if (key == "nx") c.grid.nx = to_int(v, name, line);
        else if (key == "ny") c.grid.ny = to_int(v, name, line);
        else if (key == "nz") c.grid.nz = to_int(v, name, line);
        else unknown();
    } else if (section == "relaxation") {
        auto& r = c.relaxation;
        if (key == "omega_nu") r.omega_nu = num();
        else if (key == "nu") r.nu = num();
        else if (key == "tau") r.tau = num();
        else if (key == "omega_xi") r.omega_xi = num();
        else if (key == "xi") r.xi = num();
        else if (key == "omega_1") r.omega_1 = num();
        else if (key == "omega_high") r.omega_high = num();
        else unknown();
    } else if (section == "boundary") {
        if (key == "x") set_axis(c.boundary, 0, v, name, line);
        else if (key == "y") set_axis(c.boundary, 1, v, name, line);
        else if (key == "z") set_axis(c.boundary, 2, v, name, line);
        else if (key == "lid_velocity") c.boundary.faces[Face::y_max] = {FaceKind::wall_moving, num()};
        else unknown();
    } else if (section == "force") {
        if (key == "fx") c.force.amplitude[0] = num();
        else if (key == "fy") c.force.amplitude[1] = num();
        else if (key == "fz") c.force.amplitude[2] = num();
        else if (key == "period") c.force.period = num();
        else unknown();
    } else if (section == "run") {
        if (key == "variant") {
            if (v == "central") c.variant = Variant::central;
            else if (v == "raw") c.variant = Variant::raw;
            else fail(name, line, "expected central or raw, got '" + v + "'");
        } else if (key == "corrections") {
            if (v == "full") c.corrections = CorrectionMode::full;
            else if (v == "low_mach") c.corrections = CorrectionMode::low_mach;
            else if (v == "off") c.corrections = CorrectionMode::off;
            else fail(name, line, "expected full, low_mach or off, got '" + v + "'");
        } else if (key == "max_steps") c.max_steps = to_long(v, name, line);
        else if (key == "tolerance") c.tolerance = num();
        else if (key == "check_interval") c.check_interval = to_long(v, name, line);
        else if (key == "output_every") c.output_every = to_long(v, name, line);
        else if (key == "output_dir") c.output_dir = v;
        else unknown();
    } else {
        fail(name, line, "unknown section [" + section + "]");
    }
}

SimulationConfig parse_unvalidated(const std::string& text, const std::string& name) {
    SimulationConfig c;
    // Without a [boundary] section every face is periodic.
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, raw)) {
        ++line;
        const auto cut = raw.find_first_of("#;");
        const std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(name, line, "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(name, line, "expected key = value, got '" + s + "'");
        if (section.empty()) fail(name, line, "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) fail(name, line, "expected key = value, got '" + s + "'");
        const std::string full = section + "." + key;
        if (const auto it = seen.find(full); it != seen.end()) {
            fail(name, line, "duplicate key '" + full + "' (first on line " + std::to_string(it->second) + ")");
        }
        seen[full] = line;
        apply_key(c, section, key, value, name, line);
    }
    return c;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

SimulationConfig parse_config_text(const std::string& text, const std::string& name) {
    SimulationConfig c = parse_unvalidated(text, name);
    (void)resolve_parameters(c);
    return c;
}

SimulationConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply_override(SimulationConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ParseError("override must look like section.key=value: '" + assignment + "'", 0);
    }
    const std::string section = trim(assignment.substr(0, dot));
    const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
    // An override replaces whichever alternative the config used.
    if (section == "relaxation") {
        auto& r = config.relaxation;
        if (key == "omega_nu" || key == "nu" || key == "tau") {
            r.omega_nu.reset();
            r.nu.reset();
            r.tau.reset();
        } else if (key == "omega_xi" || key == "xi") {
            r.omega_xi.reset();
            r.xi.reset();
        }
    }
    apply_key(config, section, key, trim(assignment.substr(eq + 1)), "<override>", 0);
}

std::string format_config(const SimulationConfig& c) {
    std::ostringstream os;
    os << "# all values in lattice units, dx = dt = 1\n";
    os << "[lattice]\nr = " << fmt(c.lattice.r) << "\ns = " << fmt(c.lattice.s) << "\n";
    os << "cs2 = " << (c.lattice.cs2 ? fmt(*c.lattice.cs2) : std::string("auto")) << "\n";
    os << "\n[grid]\nnx = " << c.grid.nx << "\nny = " << c.grid.ny << "\nnz = " << c.grid.nz << "\n";
    const auto& r = c.relaxation;
    os << "\n[relaxation]\n";
    if (r.omega_nu) os << "omega_nu = " << fmt(*r.omega_nu) << "\n";
    if (r.nu) os << "nu = " << fmt(*r.nu) << "\n";
    if (r.tau) os << "tau = " << fmt(*r.tau) << "\n";
    if (r.omega_xi) os << "omega_xi = " << fmt(*r.omega_xi) << "\n";
    if (r.xi) os << "xi = " << fmt(*r.xi) << "\n";
    os << "omega_1 = " << fmt(r.omega_1) << "\nomega_high = " << fmt(r.omega_high) << "\n";
    os << "\n[boundary]\n";
    const char* axes = "xyz";
    for (int a = 0; a < 3; ++a) os << axes[a] << " = " << (c.boundary.periodic(a) ? "periodic" : "wall") << "\n";
    if (c.boundary.faces[Face::y_max].kind == FaceKind::wall_moving) {
        os << "lid_velocity = " << fmt(c.boundary.faces[Face::y_max].lid_velocity) << "\n";
    }
    os << "\n[force]\nfx = " << fmt(c.force.amplitude[0]) << "\nfy = " << fmt(c.force.amplitude[1])
       << "\nfz = " << fmt(c.force.amplitude[2]) << "\nperiod = " << fmt(c.force.period) << "\n";
    os << "\n[run]\nvariant = " << (c.variant == Variant::central ? "central" : "raw") << "\n";
    os << "corrections = "
       << (c.corrections == CorrectionMode::full ? "full"
                                                 : (c.corrections == CorrectionMode::low_mach ? "low_mach" : "off"))
       << "\n";
    os << "max_steps = " << c.max_steps << "\ntolerance = " << fmt(c.tolerance)
       << "\ncheck_interval = " << c.check_interval << "\noutput_every = " << c.output_every
       << "\noutput_dir = " << c.output_dir << "\n";
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp + ": " + std::strerror(errno));
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

void write_profile(const std::string& path, std::span<const double> coords, std::span<const double> values,
                   const std::string& comment) {
    if (coords.size() != values.size()) throw InvalidParameter("profile coordinate and value counts differ");
    std::ostringstream os;
    os << std::setprecision(12);
    if (!comment.empty()) {
        std::istringstream lines(comment);
        std::string l;
        while (std::getline(lines, l)) os << "# " << l << "\n";
    }
    for (std::size_t i = 0; i < coords.size(); ++i) os << coords[i] << " " << values[i] << "\n";
    write_file_atomic(path, os.str());
}

void write_vtk(const std::string& path, const SimulationState& st) {
    const GridDims d = st.populations.dims();
    const auto& spec = st.params.spec;
    std::ostringstream os;
    os << std::setprecision(9);
    os << "# vtk DataFile Version 3.0\nclbm step " << st.step << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << d.nx << " " << d.ny << " " << d.nz << "\n";
    os << "ORIGIN " << 0.5 << " " << 0.5 * spec.r << " " << 0.5 * spec.s << "\n";
    os << "SPACING " << 1.0 << " " << spec.r << " " << spec.s << "\n";
    const std::size_t N = d.nodes();
    os << "POINT_DATA " << N << "\nSCALARS rho double 1\nLOOKUP_TABLE default\n";
    for (std::size_t n = 0; n < N; ++n) os << st.hydro.rho[n] << "\n";
    os << "VECTORS u double\n";
    for (std::size_t n = 0; n < N; ++n) os << st.hydro.ux[n] << " " << st.hydro.uy[n] << " " << st.hydro.uz[n] << "\n";
    write_file_atomic(path, os.str());
}

namespace {

constexpr char kMagic[8] = {'C', 'L', 'B', 'M', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::string& out, const T& v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("truncated checkpoint " + path);
    return v;
}

} // namespace

void write_checkpoint(const std::string& path, const SimulationState& st) {
    const GridDims d = st.populations.dims();
    const std::string cfg = format_config(st.config);
    std::string out;
    out.reserve(64 + cfg.size() + 2 * st.populations.buffer(0).size() * sizeof(double));
    out.append(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::int32_t>(out, d.nx);
    put<std::int32_t>(out, d.ny);
    put<std::int32_t>(out, d.nz);
    put<std::int64_t>(out, st.step);
    put<std::int32_t>(out, st.populations.current_index());
    put<std::uint64_t>(out, cfg.size());
    out += cfg;
    for (int b = 0; b < 2; ++b) {
        const auto& buf = st.populations.buffer(b);
        put<std::uint64_t>(out, buf.size());
        out.append(reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(double));
    }
    write_file_atomic(path, out);
}

SimulationState read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path + ": " + std::strerror(errno));
    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError(path + " is not a checkpoint");
    const auto ver = get<std::uint32_t>(in, path);
    if (ver != kCheckpointVersion) {
        throw IoError(path + ": unsupported checkpoint version " + std::to_string(ver));
    }
    GridDims d;
    d.nx = get<std::int32_t>(in, path);
    d.ny = get<std::int32_t>(in, path);
    d.nz = get<std::int32_t>(in, path);
    const auto step = get<std::int64_t>(in, path);
    const auto cur = get<std::int32_t>(in, path);
    const auto len = get<std::uint64_t>(in, path);
    if (len > (1u << 20)) throw IoError(path + ": implausible config length");
    std::string cfg(len, '\0');
    in.read(cfg.data(), static_cast<std::streamsize>(len));
    if (!in) throw IoError("truncated checkpoint " + path);

    SimulationState st = initialize(parse_config_text(cfg, path + " (embedded config)"));
    if (!(st.populations.dims() == d) || (cur != 0 && cur != 1)) throw IoError(path + ": header mismatch");
    for (int b = 0; b < 2; ++b) {
        auto& buf = st.populations.buffer(b);
        const auto n = get<std::uint64_t>(in, path);
        if (n != buf.size()) throw IoError(path + ": buffer size mismatch");
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(double)));
        if (!in) throw IoError("truncated checkpoint " + path);
    }
    st.populations.set_current_index(cur);
    st.step = step;
    st.hydro.force = st.config.force.at(st.step);
    st.stats = update_hydrodynamics(st.populations, st.hydro, st.params.spec);
    return st;
}

std::size_t estimate_memory(const GridDims& dims, bool per_node_force) {
    const std::size_t n = dims.nodes();
    const std::size_t fields = 7 + (per_node_force ? 3 : 0);
    return n * Q * 2 * sizeof(double) + n * fields * sizeof(double);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["version"] = version;
    j["steps"] = steps;
    j["threads"] = threads;
    j["wall_seconds"] = wall_seconds;
    j["phase_seconds"] = {{"density_gradient", phases.gradient},
                          {"collide_stream", phases.collide_stream},
                          {"hydrodynamics", phases.hydro}};
    j["memory_estimate_bytes"] = memory_estimate;
    j["allocated_bytes"] = allocated_bytes;
    j["metrics"] = metrics;
    j["notes"] = notes;
    j["config"] = config_text;
    return j.dump(2) + "\n";
}

RunManifest make_manifest(const std::string& name, const SimulationState& st, const RunReport& rep) {
    RunManifest m;
    m.name = name;
    m.config_text = format_config(st.config);
    m.version = version();
    m.steps = rep.steps;
    m.wall_seconds = rep.wall_seconds;
    m.phases = st.times;
    m.memory_estimate = estimate_memory(st.populations.dims(), !st.hydro.force_x.empty());
    m.allocated_bytes = st.allocated_bytes();
#ifdef _OPENMP
    m.threads = omp_get_max_threads();
#endif
    m.metrics["converged"] = rep.converged ? 1.0 : 0.0;
    m.metrics["blew_up"] = rep.blew_up ? 1.0 : 0.0;
    if (rep.blew_up) m.notes.push_back("blow-up at step " + std::to_string(rep.blowup_step) + ": " + rep.blowup_reason);
    return m;
}

const char* version() { return "0.1.0"; }

} // namespace clbm

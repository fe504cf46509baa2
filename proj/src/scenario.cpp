#include "stratflow/scenario.hpp"

#include "stratflow/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace stratflow {

void ScenarioConfig::validate() const
{
    const Grid g = grid();
    profile.validate(height);
    solver.validate();
    if (t_end < 0.0) {
        throw ConfigurationError("t_end must be non-negative");
    }
    for (double t : snapshot_times) {
        if (t < 0.0 || t > t_end) {
            throw ConfigurationError("snapshot time " + std::to_string(t) + " outside [0, " +
                                     std::to_string(t_end) + "]");
        }
    }
    if (diag_interval <= 0) {
        throw ConfigurationError("diag_interval must be positive");
    }
    if (!(vortex.lx > 0.0) || !(vortex.lz > 0.0)) {
        throw ConfigurationError("vortex scales lx, lz must be positive");
    }
    if (!(vortex.x0 > 0.0 && vortex.x0 < g.width && vortex.z0 > 0.0 && vortex.z0 < g.height)) {
        throw ConfigurationError("vortex centre must lie strictly inside the domain");
    }
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"baseline", "coarse",      "H-half",   "H-double",
                                                "H-huge",   "homogeneous", "tank-50cm"};
    return names;
}

ScenarioConfig preset(const std::string& name)
{
    ScenarioConfig c;
    c.name = name;
    if (name == "baseline") {
        return c;
    }
    if (name == "coarse") {
        c.h = 0.005;
        return c;
    }
    if (name == "H-half" || name == "H-double") {
        c.profile.H = name == "H-half" ? 3.1 : 12.4;
        c.t_end = 7.0;
        c.snapshot_times = {3.0, 7.0};
        return c;
    }
    if (name == "H-huge") {
        c.profile.H = 311.5;
        c.t_end = 7.0;
        c.snapshot_times = {3.0, 6.0, 7.0};
        return c;
    }
    if (name == "homogeneous") {
        c.profile = StratificationProfile::constant(1000.0);
        c.t_end = 7.0;
        c.snapshot_times = {3.0, 7.0};
        return c;
    }
    if (name == "tank-50cm") {
        c.width = 0.5;
        c.vortex.x0 = 0.25;
        return c;
    }
    std::string valid;
    for (const auto& n : preset_names()) {
        valid += (valid.empty() ? "" : ", ") + n;
    }
    throw ConfigurationError("unknown preset '" + name + "'; valid presets: " + valid);
}

ScenarioConfig apply_overrides(ScenarioConfig cfg, const Overrides& o)
{
    if (o.h) cfg.h = *o.h;
    if (o.H) {
        if (cfg.profile.kind != ProfileKind::Exponential) {
            throw ConfigurationError("--H only applies to exponential profiles");
        }
        cfg.profile.H = *o.H;
    }
    if (o.t_end) {
        cfg.t_end = *o.t_end;
        std::erase_if(cfg.snapshot_times, [&](double t) { return t > cfg.t_end; });
    }
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    return cfg;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigurationError("config key '" + key + "': '" + v + "' is not a number");
    }
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ScenarioConfig parse_config(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigurationError("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    ScenarioConfig c = preset(kv.count("preset") ? kv["preset"] : "baseline");
    kv.erase("preset");
    for (const auto& [key, v] : kv) {
        if (key == "name") c.name = v;
        else if (key == "width") c.width = to_double(key, v);
        else if (key == "height") c.height = to_double(key, v);
        else if (key == "h") c.h = to_double(key, v);
        else if (key == "profile.kind") {
            if (v == "exponential") c.profile.kind = ProfileKind::Exponential;
            else if (v == "linear") c.profile.kind = ProfileKind::Linear;
            else if (v == "constant") c.profile.kind = ProfileKind::Constant;
            else throw ConfigurationError("profile.kind must be exponential, linear or constant");
        }
        else if (key == "profile.rho00") c.profile.rho00 = to_double(key, v);
        else if (key == "profile.H") c.profile.H = to_double(key, v);
        else if (key == "profile.a") c.profile.a = to_double(key, v);
        else if (key == "vortex.A") c.vortex.A = to_double(key, v);
        else if (key == "vortex.lx") c.vortex.lx = to_double(key, v);
        else if (key == "vortex.lz") c.vortex.lz = to_double(key, v);
        else if (key == "vortex.x0") c.vortex.x0 = to_double(key, v);
        else if (key == "vortex.z0") c.vortex.z0 = to_double(key, v);
        else if (key == "t_end") c.t_end = to_double(key, v);
        else if (key == "snapshot_times") c.snapshot_times = to_list(key, v);
        else if (key == "diag_interval") c.diag_interval = static_cast<int>(to_double(key, v));
        else if (key == "solver.courant") c.solver.courant = to_double(key, v);
        else if (key == "solver.div_tol") c.solver.div_tol = to_double(key, v);
        else if (key == "solver.poisson_tol") c.solver.poisson_tol = to_double(key, v);
        else if (key == "solver.poisson_max_iter")
            c.solver.poisson_max_iter = static_cast<int>(to_double(key, v));
        else if (key == "solver.limiter") {
            if (v == "minmod") c.solver.limiter = Limiter::Minmod;
            else if (v == "none") c.solver.limiter = Limiter::None;
            else throw ConfigurationError("solver.limiter must be minmod or none");
        }
        else if (key == "solver.momentum") {
            if (v == "centered") c.solver.momentum = MomentumAdvection::Centered;
            else if (v == "upwind") c.solver.momentum = MomentumAdvection::Upwind;
            else throw ConfigurationError("solver.momentum must be centered or upwind");
        }
        else if (key == "solver.dt_max") c.solver.dt_max = to_double(key, v);
        else if (key == "output_dir") c.output_dir = v;
        else throw ConfigurationError("unknown config key '" + key + "'");
    }
    return c;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigurationError("cannot open config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const ScenarioConfig& c)
{
    std::ostringstream o;
    const char* kind = c.profile.kind == ProfileKind::Exponential ? "exponential"
                       : c.profile.kind == ProfileKind::Linear    ? "linear"
                                                                  : "constant";
    o << "name = " << c.name << '\n'
      << "width = " << fmt(c.width) << '\n'
      << "height = " << fmt(c.height) << '\n'
      << "h = " << fmt(c.h) << '\n'
      << "profile.kind = " << kind << '\n'
      << "profile.rho00 = " << fmt(c.profile.rho00) << '\n'
      << "profile.H = " << fmt(c.profile.H) << '\n'
      << "profile.a = " << fmt(c.profile.a) << '\n'
      << "vortex.A = " << fmt(c.vortex.A) << '\n'
      << "vortex.lx = " << fmt(c.vortex.lx) << '\n'
      << "vortex.lz = " << fmt(c.vortex.lz) << '\n'
      << "vortex.x0 = " << fmt(c.vortex.x0) << '\n'
      << "vortex.z0 = " << fmt(c.vortex.z0) << '\n'
      << "t_end = " << fmt(c.t_end) << '\n'
      << "snapshot_times = ";
    for (std::size_t n = 0; n < c.snapshot_times.size(); ++n) {
        o << (n ? ", " : "") << fmt(c.snapshot_times[n]);
    }
    o << '\n'
      << "diag_interval = " << c.diag_interval << '\n'
      << "solver.courant = " << fmt(c.solver.courant) << '\n'
      << "solver.div_tol = " << fmt(c.solver.div_tol) << '\n'
      << "solver.poisson_tol = " << fmt(c.solver.poisson_tol) << '\n'
      << "solver.poisson_max_iter = " << c.solver.poisson_max_iter << '\n'
      << "solver.limiter = " << (c.solver.limiter == Limiter::Minmod ? "minmod" : "none") << '\n'
      << "solver.momentum = "
      << (c.solver.momentum == MomentumAdvection::Centered ? "centered" : "upwind") << '\n'
      << "solver.dt_max = " << fmt(c.solver.dt_max) << '\n';
    if (!c.output_dir.empty()) {
        o << "output_dir = " << c.output_dir << '\n';
    }
    return o.str();
}

std::string default_output_dir(const std::string& fallback)
{
    const char* env = std::getenv(kOutputDirEnv);
    return (env && *env) ? std::string(env) : fallback;
}

} // namespace stratflow

#include "dnls/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace dnls {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) throw ConfigError("not a number: '" + s + "'");
    return v;
}

long long parse_int(const std::string& s) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("not an integer: '" + s + "'");
    return v;
}

std::size_t parse_size(const std::string& s) {
    const long long v = parse_int(s);
    if (v < 0) throw ConfigError("negative size: '" + s + "'");
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& it : split_list(s)) out.push_back(parse_double(it));
    return out;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(v[i]);
    }
    return s;
}

// "t_start:dt, t_start:dt"
std::vector<ScheduleSegment> parse_schedule(const std::string& s) {
    std::vector<ScheduleSegment> out;
    for (const auto& it : split_list(s)) {
        const auto c = it.find(':');
        if (c == std::string::npos) throw ConfigError("schedule entry needs t:dt, got '" + it + "'");
        out.push_back({parse_double(trim(it.substr(0, c))), parse_double(trim(it.substr(c + 1)))});
    }
    return out;
}

std::string fmt_schedule(const std::vector<ScheduleSegment>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(v[i].t_start) + ":" + fmt_double(v[i].dt);
    }
    return s;
}

struct Key {
    std::string section;
    std::string name;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

Key dbl(const char* sec, const char* name, double& r) {
    return {sec, name, [&r](const std::string& s) { r = parse_double(s); }, [&r] { return fmt_double(r); }};
}
Key sz(const char* sec, const char* name, std::size_t& r) {
    return {sec, name, [&r](const std::string& s) { r = parse_size(s); }, [&r] { return std::to_string(r); }};
}
Key integer(const char* sec, const char* name, int& r) {
    return {sec, name, [&r](const std::string& s) { r = static_cast<int>(parse_int(s)); },
            [&r] { return std::to_string(r); }};
}
Key boolean(const char* sec, const char* name, bool& r) {
    return {sec, name, [&r](const std::string& s) { r = parse_bool(s); },
            [&r] { return std::string(r ? "true" : "false"); }};
}
Key str(const char* sec, const char* name, std::string& r) {
    return {sec, name, [&r](const std::string& s) { r = s; }, [&r] { return r; }};
}
Key dlist(const char* sec, const char* name, std::vector<double>& r) {
    return {sec, name, [&r](const std::string& s) { r = parse_list(s); }, [&r] { return fmt_list(r); }};
}

std::vector<Key> keys(ExperimentConfig& c) {
    return {
        str("run", "name", c.name),
        boolean("run", "test_mode", c.test_mode),
        dbl("model", "alpha", c.model.alpha),
        dbl("model", "lambda1", c.model.lambda1),
        dbl("model", "lambda2", c.model.lambda2),
        dbl("symbol", "c2", c.symbol.c2),
        dbl("symbol", "c1", c.symbol.c1),
        dbl("symbol", "c0", c.symbol.c0),
        sz("grid", "n", c.n),
        dbl("grid", "half_width", c.half_width),
        dbl("scaled_grid", "Y", c.scaled.Y),
        sz("scaled_grid", "m", c.scaled.m),
        dbl("time", "dt", c.time.dt),
        dbl("time", "t_max", c.time.t_max),
        dbl("time", "checkpoint_ratio", c.time.checkpoint_ratio),
        dbl("time", "boundary_budget", c.time.boundary_budget),
        {"time", "schedule", [&c](const std::string& s) { c.time.schedule = parse_schedule(s); },
         [&c] { return fmt_schedule(c.time.schedule); }},
        dlist("time", "extra_checkpoints", c.time.extra_checkpoints),
        dbl("time", "sponge_strength", c.time.sponge_strength),
        dbl("cutoff", "r_inner", c.cutoff.r_inner),
        dbl("cutoff", "r_outer", c.cutoff.r_outer),
        boolean("cutoff", "identity", c.cutoff.identity),
        integer("cutoff", "padding", c.filter.padding),
        integer("cutoff", "oversample", c.filter.oversample),
        dbl("cutoff", "support_tol", c.filter.support_tol),
        str("initial", "kind", c.initial.kind),
        dbl("initial", "amplitude", c.initial.amplitude),
        dbl("initial", "width", c.initial.width),
        dbl("initial", "chirp", c.initial.chirp),
        dbl("initial", "velocity", c.initial.velocity),
        dbl("initial", "center", c.initial.center),
        integer("initial", "order", c.initial.order),
        dbl("initial", "amplitude2", c.initial.amplitude2),
        dbl("initial", "separation", c.initial.separation),
        str("initial", "path", c.initial.path),
        str("output", "dir", c.output.dir),
        boolean("output", "write_fields", c.output.write_fields),
        boolean("output", "write_checkpoint", c.output.write_checkpoint),
        boolean("pipeline", "vf_report", c.pipeline.vf_report),
        boolean("pipeline", "asymptotics", c.pipeline.asymptotics),
        dbl("pipeline", "fit_t_min", c.pipeline.fit_t_min),
        dbl("pipeline", "ode_t0", c.pipeline.ode_t0),
        dbl("tolerances", "monotonicity", c.tol.monotonicity),
        dbl("tolerances", "support_threshold", c.tol.support_threshold),
        dbl("tolerances", "limit", c.tol.limit),
        dbl("tolerances", "ode_rel", c.tol.ode_rel),
        dbl("tolerances", "coverage", c.tol.coverage),
        dbl("tolerances", "oracle", c.tol.oracle),
        dbl("tolerances", "identity", c.tol.identity),
        sz("oracle", "n", c.oracle.n),
        dbl("oracle", "half_width", c.oracle.half_width),
        dlist("oracle", "h", c.oracle.h),
        sz("oracle", "cap", c.oracle.cap),
        integer("oracle", "xi_oversample", c.oracle.xi_oversample),
        integer("oracle", "padding", c.oracle.padding),
        dbl("oracle", "chirp_scale", c.oracle.chirp_scale),
    };
}

bool same(const StepConfig& a, const StepConfig& b) {
    if (a.schedule.size() != b.schedule.size()) return false;
    for (std::size_t i = 0; i < a.schedule.size(); ++i)
        if (a.schedule[i].t_start != b.schedule[i].t_start || a.schedule[i].dt != b.schedule[i].dt) return false;
    return a.dt == b.dt && a.t_max == b.t_max && a.checkpoint_ratio == b.checkpoint_ratio &&
           a.boundary_budget == b.boundary_budget && a.extra_checkpoints == b.extra_checkpoints &&
           a.sponge_strength == b.sponge_strength;
}

}  // namespace

InitialSpec InitialConfig::to_spec() const {
    if (kind == "gaussian") return GaussianIC{amplitude, width, chirp, velocity, center};
    if (kind == "supergaussian") return SuperGaussianIC{amplitude, width, order, center};
    if (kind == "twobump") return TwoBumpIC{amplitude, amplitude2, width, separation};
    if (kind == "file") return FileIC{path};
    throw ConfigError("initial.kind: unknown kind '" + kind + "'");
}

void ExperimentConfig::validate() const {
    auto wrap = [](const char* where, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string(where) + ": " + e.what());
        }
    };
    wrap("symbol", [&] { symbol.validate(); });
    wrap("time", [&] { time.validate(); });
    wrap("cutoff", [&] { cutoff.validate(); });
    if (!test_mode && validate_params(model) == Dissipativity::Invalid)
        throw ConfigError("model: parameters violate the dissipation condition (lambda2 > 0 needed outside test mode)");
    if (!(model.alpha > 0.0 && model.alpha < 2.0)) throw ConfigError("model.alpha must lie in (0, 2)");
    if (n < 16 || (n & (n - 1)) != 0) throw ConfigError("grid.n must be a power of two >= 16");
    if (!(half_width > 0.0)) throw ConfigError("grid.half_width must be positive");
    if (!(scaled.Y > 0.0)) throw ConfigError("scaled_grid.Y must be positive");
    if (scaled.m != 0 && (scaled.m & (scaled.m - 1)) != 0) throw ConfigError("scaled_grid.m must be 0 or a power of two");
    if (filter.padding < 1 || (filter.padding & (filter.padding - 1)) != 0)
        throw ConfigError("cutoff.padding must be a power of two");
    if (filter.oversample < 1 || (filter.oversample & (filter.oversample - 1)) != 0)
        throw ConfigError("cutoff.oversample must be a power of two");
    wrap("initial", [&] { (void)initial.to_spec(); });
    if (initial.kind == "file" && initial.path.empty()) throw ConfigError("initial.path is required for kind = file");
    if (!(pipeline.fit_t_min >= 1.0)) throw ConfigError("pipeline.fit_t_min must be >= 1");
    if (!(pipeline.ode_t0 >= 1.0)) throw ConfigError("pipeline.ode_t0 must be >= 1");
    if (oracle.n > oracle.cap) throw ConfigError("oracle.n exceeds oracle.cap");
    if (oracle.xi_oversample < 1) throw ConfigError("oracle.xi_oversample must be >= 1");
    for (double h : oracle.h)
        if (!(h > 0.0 && h <= 1.0)) throw ConfigError("oracle.h entries must lie in (0, 1]");
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.name == b.name && a.test_mode == b.test_mode && a.model.alpha == b.model.alpha &&
           a.model.lambda1 == b.model.lambda1 && a.model.lambda2 == b.model.lambda2 &&
           a.symbol.c2 == b.symbol.c2 && a.symbol.c1 == b.symbol.c1 && a.symbol.c0 == b.symbol.c0 &&
           a.n == b.n && a.half_width == b.half_width && a.scaled == b.scaled && same(a.time, b.time) &&
           a.cutoff.r_inner == b.cutoff.r_inner && a.cutoff.r_outer == b.cutoff.r_outer &&
           a.cutoff.identity == b.cutoff.identity && a.filter.padding == b.filter.padding &&
           a.filter.oversample == b.filter.oversample &&
           a.filter.support_tol == b.filter.support_tol && a.filter.chirp_scale == b.filter.chirp_scale &&
           a.initial == b.initial && a.output == b.output && a.pipeline == b.pipeline && a.tol == b.tol &&
           a.oracle == b.oracle;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    auto table = keys(cfg);
    std::map<std::string, Key*> index;
    std::set<std::string> sections;
    for (auto& k : table) {
        index[k.section + "." + k.name] = &k;
        sections.insert(k.section);
    }
    std::set<std::string> seen;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
        };
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        if (section.empty()) fail("key outside of a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        const auto it = index.find(full);
        if (it == index.end()) fail("unknown key '" + key + "' in [" + section + "]");
        if (!seen.insert(full).second) fail("duplicate key '" + full + "'");
        try {
            it->second->set(value);
        } catch (const ConfigError& e) {
            fail(full + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    ExperimentConfig copy = cfg;
    auto table = keys(copy);
    std::ostringstream os;
    os << "# dnls config v1\n";
    std::string section;
    for (const auto& k : table) {
        if (k.section != section) {
            section = k.section;
            os << "\n[" << section << "]\n";
        }
        os << k.name << " = " << k.get() << "\n";
    }
    return os.str();
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config '" + path + "'");
    out << serialize_config(cfg);
}

}  // namespace dnls

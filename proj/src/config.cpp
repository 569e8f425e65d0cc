#include "elcoinv/config.hpp"

#include "elcoinv/errors.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace elcoinv {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    return x;
}

long long parse_int(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    const long long x = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || t[0] == '-')
        throw ConfigError("config: key '" + key + "' expects a nonnegative integer, got '" + v +
                          "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setter_table() {
    static const std::map<std::string, Setter> table = {
        {"experiment.name",
         [](RunConfig& c, const std::string&, const std::string& v) { c.spec.name = trim(v); }},
        {"geometry.kind",
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.spec.geometry = kind_from_name(trim(v));
         }},
        {"geometry.circle_radius",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.circle_radius = parse_double(k, v);
         }},
        {"geometry.boundary_radius",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.boundary_radius = parse_double(k, v);
         }},
        {"material.lambda",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.material.lambda = parse_double(k, v);
         }},
        {"material.mu",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.material.mu = parse_double(k, v);
         }},
        {"material.rho",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.material.rho = parse_double(k, v);
         }},
        {"material.omega",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.material.omega = parse_double(k, v);
         }},
        {"source.x",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.source[0] = parse_double(k, v);
         }},
        {"source.y",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.source[1] = parse_double(k, v);
         }},
        {"source.scale_re",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.source_scale.real(parse_double(k, v));
         }},
        {"source.scale_im",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.source_scale.imag(parse_double(k, v));
         }},
        {"target.g",
         [](RunConfig& c, const std::string&, const std::string& v) { c.spec.g_name = trim(v); }},
        {"target.chi",
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.spec.chi_name = trim(v);
         }},
        {"cauchy.nodes",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.cauchy_nodes = static_cast<int>(parse_int(k, v));
         }},
        {"cauchy.source_count",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.source_count = static_cast<int>(parse_int(k, v));
         }},
        {"inversion.fourier_degree",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.fourier_degree = static_cast<int>(parse_int(k, v));
         }},
        {"inversion.chi_degree",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.chi_degree = static_cast<int>(parse_int(k, v));
         }},
        {"inversion.grid_nodes",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.grid_nodes = static_cast<int>(parse_int(k, v));
         }},
        {"inversion.gamma0_end",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.gamma0_end = parse_double(k, v);
         }},
        {"inversion.max_iter",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.max_iter = static_cast<int>(parse_int(k, v));
         }},
        {"inversion.stop_tol",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.stop_tol = parse_double(k, v);
         }},
        {"inversion.damping_rel",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.damping_rel = parse_double(k, v);
         }},
        {"inversion.moving_normal",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.moving_normal = parse_bool(k, v);
         }},
        {"inversion.pointwise_chi",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.pointwise_chi = parse_bool(k, v);
         }},
        {"inversion.clamp_chi",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.clamp_chi = parse_bool(k, v);
         }},
        {"inversion.init_radius",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.init_radius = parse_double(k, v);
             c.spec.init_radius = c.inversion.init_radius;
         }},
        {"inversion.chi0",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.inversion.chi0 = parse_double(k, v);
             c.spec.chi0 = c.inversion.chi0;
         }},
        {"noise.delta",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.delta = parse_double(k, v);
         }},
        {"noise.seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spec.seed = parse_uint(k, v);
         }},
    };
    return table;
}

void set_key(RunConfig& cfg, const std::string& qualified, const std::string& value) {
    const auto it = setter_table().find(qualified);
    if (it == setter_table().end())
        throw ConfigError("config: unknown key '" + qualified + "'");
    it->second(cfg, qualified, value);
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::string kind_name(AnalyticCurve::Kind kind) {
    switch (kind) {
    case AnalyticCurve::Kind::Circle: return "circle";
    case AnalyticCurve::Kind::Bean: return "bean";
    case AnalyticCurve::Kind::Peanut: return "peanut";
    case AnalyticCurve::Kind::Starfish: return "starfish";
    }
    throw ConfigError("config: unhandled geometry kind");
}

AnalyticCurve::Kind kind_from_name(const std::string& name) {
    if (name == "circle") return AnalyticCurve::Kind::Circle;
    if (name == "bean") return AnalyticCurve::Kind::Bean;
    if (name == "peanut") return AnalyticCurve::Kind::Peanut;
    if (name == "starfish") return AnalyticCurve::Kind::Starfish;
    throw ConfigError("config: unknown geometry kind '" + name +
                      "' (expected circle, bean, peanut, or starfish)");
}

void RunConfig::validate() const {
    spec.validate();
    inversion.validate();
    // the guesses live in both blocks; a config can only set them together
    if (spec.init_radius != inversion.init_radius || spec.chi0 != inversion.chi0)
        throw ConfigError("config: initial guesses out of sync between experiment and inversion settings");
}

RunConfig config_for_example(const std::string& name) {
    RunConfig cfg;
    cfg.spec = example_spec(name);
    cfg.inversion.init_radius = cfg.spec.init_radius;
    cfg.inversion.chi0 = cfg.spec.chi0;
    return cfg;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config: empty section name at line " + std::to_string(lineno));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config: empty key at line " + std::to_string(lineno));
        if (section.empty())
            throw ConfigError("config: key '" + key + "' appears before any section");
        set_key(cfg, section + "." + key, line.substr(eq + 1));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open '" + file.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("config: override '" + assignment + "' is not of the form key=value");
    const std::string key = trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos)
        throw ConfigError("config: override key '" + key + "' must be section-qualified");
    set_key(cfg, key, assignment.substr(eq + 1));
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "# resolved experiment configuration\n";
    out << "[experiment]\n";
    out << "name = " << cfg.spec.name << "\n\n";
    out << "[geometry]\n";
    out << "kind = " << kind_name(cfg.spec.geometry) << "\n";
    out << "circle_radius = " << fmt_double(cfg.spec.circle_radius) << "\n";
    out << "boundary_radius = " << fmt_double(cfg.spec.boundary_radius) << "\n\n";
    out << "[material]\n";
    out << "lambda = " << fmt_double(cfg.spec.material.lambda) << "\n";
    out << "mu = " << fmt_double(cfg.spec.material.mu) << "\n";
    out << "rho = " << fmt_double(cfg.spec.material.rho) << "\n";
    out << "omega = " << fmt_double(cfg.spec.material.omega) << "\n\n";
    out << "[source]\n";
    out << "x = " << fmt_double(cfg.spec.source[0]) << "\n";
    out << "y = " << fmt_double(cfg.spec.source[1]) << "\n";
    out << "scale_re = " << fmt_double(cfg.spec.source_scale.real()) << "\n";
    out << "scale_im = " << fmt_double(cfg.spec.source_scale.imag()) << "\n\n";
    out << "[target]\n";
    out << "g = " << cfg.spec.g_name << "\n";
    out << "chi = " << cfg.spec.chi_name << "\n\n";
    out << "[cauchy]\n";
    out << "nodes = " << cfg.spec.cauchy_nodes << "\n";
    out << "source_count = " << cfg.spec.source_count << "\n\n";
    out << "[inversion]\n";
    out << "fourier_degree = " << cfg.inversion.fourier_degree << "\n";
    out << "chi_degree = " << cfg.inversion.chi_degree << "\n";
    out << "grid_nodes = " << cfg.inversion.grid_nodes << "\n";
    out << "gamma0_end = " << fmt_double(cfg.inversion.gamma0_end) << "\n";
    out << "max_iter = " << cfg.inversion.max_iter << "\n";
    out << "stop_tol = " << fmt_double(cfg.inversion.stop_tol) << "\n";
    out << "damping_rel = " << fmt_double(cfg.inversion.damping_rel) << "\n";
    out << "moving_normal = " << (cfg.inversion.moving_normal ? "true" : "false") << "\n";
    out << "pointwise_chi = " << (cfg.inversion.pointwise_chi ? "true" : "false") << "\n";
    out << "clamp_chi = " << (cfg.inversion.clamp_chi ? "true" : "false") << "\n";
    out << "init_radius = " << fmt_double(cfg.inversion.init_radius) << "\n";
    out << "chi0 = " << fmt_double(cfg.inversion.chi0) << "\n\n";
    out << "[noise]\n";
    out << "delta = " << fmt_double(cfg.spec.delta) << "\n";
    out << "seed = " << cfg.spec.seed << "\n";
    return out.str();
}

} // namespace elcoinv

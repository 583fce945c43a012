#include "ncwave/config.hpp"

#include "ncwave/errors.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace ncwave {

std::string_view to_string(Profile profile) { return profile == Profile::quick ? "quick" : "full"; }

Profile parse_profile(std::string_view text) {
    if (text == "quick") return Profile::quick;
    if (text == "full") return Profile::full;
    throw ConfigError("unknown profile '" + std::string(text) + "'");
}

std::string_view to_string(InitialCondition ic) {
    switch (ic) {
        case InitialCondition::gaussian: return "gaussian";
        case InitialCondition::manufactured: return "manufactured";
        case InitialCondition::zero: return "zero";
    }
    return "?";
}

InitialCondition parse_initial_condition(std::string_view text) {
    if (text == "gaussian") return InitialCondition::gaussian;
    if (text == "manufactured") return InitialCondition::manufactured;
    if (text == "zero") return InitialCondition::zero;
    throw ConfigError("unknown initial condition '" + std::string(text) + "'");
}

std::vector<int> ExperimentConfig::active_m() const {
    std::vector<int> m;
    for (int v : m_list)
        if (profile == Profile::full || v <= 401) m.push_back(v);
    return m;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + s + "'");
    }
}

long long to_integer(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + s + "'");
    }
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

template <class T, class F>
std::vector<T> map_list(const std::string& s, F f) {
    std::vector<T> out;
    for (const auto& item : split_list(s)) out.push_back(f(item));
    return out;
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += f(v[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto num = [&t](const std::string& k, double ExperimentConfig::*field) {
            t[k] = [field](ExperimentConfig& c, const std::string& key, const std::string& v) {
                c.*field = to_double(key, v);
            };
        };
        auto integer = [&t](const std::string& k, int ExperimentConfig::*field) {
            t[k] = [field](ExperimentConfig& c, const std::string& key, const std::string& v) {
                c.*field = static_cast<int>(to_integer(key, v));
            };
        };
        auto ints = [&t](const std::string& k, std::vector<int> ExperimentConfig::*field) {
            t[k] = [field](ExperimentConfig& c, const std::string& key, const std::string& v) {
                c.*field = map_list<int>(v, [&](const std::string& s) { return static_cast<int>(to_integer(key, s)); });
            };
        };
        num("geometry.x_min", &ExperimentConfig::x_min);
        num("geometry.x_interface", &ExperimentConfig::x_interface);
        num("geometry.x_max", &ExperimentConfig::x_max);
        num("geometry.y_min", &ExperimentConfig::y_min);
        num("geometry.y_max", &ExperimentConfig::y_max);
        num("physics.c1", &ExperimentConfig::c1);
        num("physics.c2", &ExperimentConfig::c2);
        ints("sweep.m", &ExperimentConfig::m_list);
        ints("sweep.orders", &ExperimentConfig::orders);
        t["sweep.methods"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.methods = map_list<CouplingMethod>(v, [](const std::string& s) { return parse_coupling_method(s); });
        };
        t["sweep.interpolations"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.interpolations =
                map_list<InterpolationKind>(v, [](const std::string& s) { return parse_interpolation_kind(s); });
        };
        t["sweep.orientation"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.orientation = parse_orientation(v);
        };
        t["sweep.op_substitution"] = [](ExperimentConfig& c, const std::string& key, const std::string& v) {
            c.op_substitution = to_bool(key, v);
        };
        ints("spectrum.m", &ExperimentConfig::spectrum_m);
        num("spectrum.power_tol", &ExperimentConfig::power_tol);
        num("time.T", &ExperimentConfig::T);
        num("time.safety", &ExperimentConfig::safety);
        integer("time.calibration_m", &ExperimentConfig::calibration_m);
        t["simulate.initial"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.initial = parse_initial_condition(v);
        };
        integer("simulate.m", &ExperimentConfig::simulate_m);
        integer("simulate.order", &ExperimentConfig::simulate_order);
        t["simulate.method"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.simulate_method = parse_coupling_method(v);
        };
        t["simulate.interpolation"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.simulate_interpolation = parse_interpolation_kind(v);
        };
        num("simulate.safety", &ExperimentConfig::simulate_safety);
        t["simulate.snapshots"] = [](ExperimentConfig& c, const std::string& key, const std::string& v) {
            c.snapshot_times = map_list<double>(v, [&](const std::string& s) { return to_double(key, s); });
        };
        num("simulate.pulse_x", &ExperimentConfig::pulse_x);
        num("simulate.pulse_y", &ExperimentConfig::pulse_y);
        num("simulate.pulse_width", &ExperimentConfig::pulse_width);
        num("verify.perturb_interpolation", &ExperimentConfig::perturb_interpolation);
        t["run.out"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.out = v; };
        t["run.profile"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.profile = parse_profile(v);
        };
        t["run.seed"] = [](ExperimentConfig& c, const std::string& key, const std::string& v) {
            c.seed = static_cast<std::uint64_t>(to_integer(key, v));
        };
        t["run.timing"] = [](ExperimentConfig& c, const std::string& key, const std::string& v) {
            c.timing = to_bool(key, v);
        };
        return t;
    }();
    return table;
}

void validate(const ExperimentConfig& c) {
    if (!(c.x_min < c.x_interface && c.x_interface < c.x_max)) throw ConfigError("need x_min < x_interface < x_max");
    if (!(c.y_min < c.y_max)) throw ConfigError("need y_min < y_max");
    if (!(c.c1 > 0.0 && c.c2 > 0.0)) throw ConfigError("wave speeds must be positive");
    if (!(c.T >= 0.0)) throw ConfigError("T must be non-negative");
    if (!(c.safety > 0.0 && c.safety < 1.0)) throw ConfigError("time.safety must lie in (0, 1)");
    if (!(c.simulate_safety > 0.0 && c.simulate_safety < 1.0)) throw ConfigError("simulate.safety must lie in (0, 1)");
    if (!(c.power_tol > 0.0 && c.power_tol <= 1e-3)) throw ConfigError("spectrum.power_tol must lie in (0, 1e-3]");
    for (int o : c.orders)
        if (!is_supported_order(o)) throw ConfigError("unsupported order " + std::to_string(o));
    if (!std::is_sorted(c.m_list.begin(), c.m_list.end())) throw ConfigError("sweep.m must be ascending");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + key);
        it->second(c, key, value);
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
    const auto i2s = [](int v) { return std::to_string(v); };
    out << "[geometry]\n"
        << "x_min = " << fmt(c.x_min) << '\n'
        << "x_interface = " << fmt(c.x_interface) << '\n'
        << "x_max = " << fmt(c.x_max) << '\n'
        << "y_min = " << fmt(c.y_min) << '\n'
        << "y_max = " << fmt(c.y_max) << "\n\n"
        << "[physics]\n"
        << "c1 = " << fmt(c.c1) << '\n'
        << "c2 = " << fmt(c.c2) << "\n\n"
        << "[sweep]\n"
        << "m = " << join(c.m_list, i2s) << '\n'
        << "orders = " << join(c.orders, i2s) << '\n'
        << "methods = " << join(c.methods, [](CouplingMethod m) { return std::string(to_string(m)); }) << '\n'
        << "interpolations = "
        << join(c.interpolations, [](InterpolationKind k) { return std::string(to_string(k)); }) << '\n'
        << "orientation = " << to_string(c.orientation) << '\n'
        << "op_substitution = " << (c.op_substitution ? "true" : "false") << "\n\n"
        << "[spectrum]\n"
        << "m = " << join(c.spectrum_m, i2s) << '\n'
        << "power_tol = " << fmt(c.power_tol) << "\n\n"
        << "[time]\n"
        << "T = " << fmt(c.T) << '\n'
        << "safety = " << fmt(c.safety) << '\n'
        << "calibration_m = " << c.calibration_m << "\n\n"
        << "[simulate]\n"
        << "initial = " << to_string(c.initial) << '\n'
        << "m = " << c.simulate_m << '\n'
        << "order = " << c.simulate_order << '\n'
        << "method = " << to_string(c.simulate_method) << '\n'
        << "interpolation = " << to_string(c.simulate_interpolation) << '\n'
        << "safety = " << fmt(c.simulate_safety) << '\n'
        << "snapshots = " << join(c.snapshot_times, fmt) << '\n'
        << "pulse_x = " << fmt(c.pulse_x) << '\n'
        << "pulse_y = " << fmt(c.pulse_y) << '\n'
        << "pulse_width = " << fmt(c.pulse_width) << "\n\n"
        << "[verify]\n"
        << "perturb_interpolation = " << fmt(c.perturb_interpolation) << "\n\n"
        << "[run]\n"
        << "out = " << c.out << '\n'
        << "profile = " << to_string(c.profile) << '\n'
        << "seed = " << c.seed << '\n'
        << "timing = " << (c.timing ? "true" : "false") << '\n';
}

std::string to_text(const ExperimentConfig& config) {
    std::ostringstream s;
    write_config(s, config);
    return s.str();
}

}  // namespace ncwave

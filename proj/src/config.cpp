#include "mfpid/config.hpp"

#include "mfpid/greens.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace mfpid {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

json scalar_value(const std::string& raw) {
    std::string v = trim(raw);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (v == "true") return true;
    if (v == "false") return false;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (!v.empty() && end == v.c_str() + v.size()) {
        if (v.find_first_of(".eE") == std::string::npos && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
        return d;
    }
    return v;
}

// "1, 2 | 3, 4" -> [[1,2],[3,4]];  "a, b" -> ["a","b"];  "3" -> 3
json text_value(const std::string& raw) {
    if (raw.find('|') != std::string::npos) {
        json out = json::array();
        for (const auto& seg : split(raw, '|')) {
            json row = json::array();
            for (const auto& item : split(seg, ',')) row.push_back(scalar_value(item));
            out.push_back(row);
        }
        return out;
    }
    if (raw.find(',') != std::string::npos) {
        json out = json::array();
        for (const auto& item : split(raw, ',')) out.push_back(scalar_value(item));
        return out;
    }
    return scalar_value(raw);
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) flatten(*it, key, out);
        else out.emplace_back(key, *it);
    }
}

// ---- typed accessors -------------------------------------------------------

[[noreturn]] void bad(const std::string& what) { throw ValidationError(what); }

double to_double(const json& v) {
    if (!v.is_number()) bad("expected a number, got " + v.dump());
    return v.get<double>();
}

long long to_int(const json& v) {
    const double d = to_double(v);
    if (std::floor(d) != d) bad("expected an integer, got " + v.dump());
    return static_cast<long long>(d);
}

bool to_bool(const json& v) {
    if (!v.is_boolean()) bad("expected true or false, got " + v.dump());
    return v.get<bool>();
}

std::string to_str(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    bad("expected a string, got " + v.dump());
}

std::vector<double> to_doubles(const json& v) {
    if (!v.is_array()) return {to_double(v)};
    std::vector<double> out;
    for (const auto& x : v) out.push_back(to_double(x));
    return out;
}

std::vector<std::string> to_strings(const json& v) {
    if (!v.is_array()) return {to_str(v)};
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(to_str(x));
    return out;
}

std::vector<std::vector<double>> to_means(const json& v) {
    std::vector<std::vector<double>> out;
    if (!v.is_array()) return {{to_double(v)}};
    for (const auto& x : v) out.push_back(to_doubles(x));
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const json&)>;

void add_mixture_keys(std::map<std::string, Setter>& t, const std::string& side,
                      MixtureSpec ExperimentConfig::*member, bool with_offset) {
    t[side + ".weights"] = [member](auto& c, const json& v) { (c.*member).weights = to_doubles(v); };
    t[side + ".means"] = [member](auto& c, const json& v) { (c.*member).means = to_means(v); };
    t[side + ".sigmas"] = [member](auto& c, const json& v) { (c.*member).sigmas = to_doubles(v); };
    t[side + ".zone_shift"] = [member](auto& c, const json& v) { (c.*member).zone_shift = to_doubles(v); };
    t[side + ".ar_rho"] = [member](auto& c, const json& v) { (c.*member).ar_rho = to_double(v); };
    if (with_offset)
        t[side + ".offset"] = [member](auto& c, const json& v) { (c.*member).offset = to_doubles(v); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["name"] = [](auto& c, const json& v) { c.name = to_str(v); };
        t["family"] = [](auto& c, const json& v) {
            c.family = to_str(v);
            if (c.family != "explicit" && c.family != "k-sweep") bad("family must be explicit or k-sweep");
        };
        t["dimension"] = [](auto& c, const json& v) { c.dimension = static_cast<int>(to_int(v)); };
        t["start"] = [](auto& c, const json& v) {
            const std::string s = to_str(v);
            if (s != "delta" && s != "mixture") bad("start must be delta or mixture");
            c.delta_start = s == "delta";
        };
        add_mixture_keys(t, "initial", &ExperimentConfig::initial, true);
        add_mixture_keys(t, "target", &ExperimentConfig::target, false);
        t["ksweep.components"] = [](auto& c, const json& v) { c.components = static_cast<int>(to_int(v)); };
        t["ksweep.range"] = [](auto& c, const json& v) {
            const auto r = to_doubles(v);
            if (r.size() != 2) bad("ksweep.range needs two numbers");
            c.range_lo = r[0];
            c.range_hi = r[1];
        };
        t["ksweep.displacement"] = [](auto& c, const json& v) { c.displacement = to_double(v); };
        t["ksweep.sigma_in"] = [](auto& c, const json& v) { c.sigma_in = to_double(v); };
        t["ksweep.sigma_tar"] = [](auto& c, const json& v) { c.sigma_tar = to_double(v); };
        t["schedule.beta0"] = [](auto& c, const json& v) { c.beta0 = to_double(v); };
        t["schedule.gamma"] = [](auto& c, const json& v) { c.gamma = to_double(v); };
        t["schedule.intervals"] = [](auto& c, const json& v) { c.intervals = static_cast<int>(to_int(v)); };
        t["sim.batch"] = [](auto& c, const json& v) {
            const auto b = to_int(v);
            if (b < 1) bad("sim.batch must be positive");
            c.batch = static_cast<std::size_t>(b);
        };
        t["sim.steps"] = [](auto& c, const json& v) { c.steps = static_cast<int>(to_int(v)); };
        t["sim.seed"] = [](auto& c, const json& v) {
            const auto s = to_int(v);
            if (s < 0) bad("sim.seed must be nonnegative");
            c.seed = static_cast<std::uint64_t>(s);
        };
        t["sim.workers"] = [](auto& c, const json& v) { c.workers = static_cast<int>(to_int(v)); };
        t["sim.midpoint"] = [](auto& c, const json& v) { c.midpoint = to_bool(v); };
        t["sim.paths"] = [](auto& c, const json& v) { c.paths = static_cast<int>(to_int(v)); };
        t["run.modes"] = [](auto& c, const json& v) { c.modes = to_strings(v); };
        t["run.parallel"] = [](auto& c, const json& v) { c.parallel = to_bool(v); };
        t["sweep.axis"] = [](auto& c, const json& v) { c.sweep_axis = to_str(v); };
        t["sweep.values"] = [](auto& c, const json& v) { c.sweep_values = to_doubles(v); };
        t["lqg.kappa"] = [](auto& c, const json& v) { c.kappa = to_double(v); };
        t["lqg.q"] = [](auto& c, const json& v) { c.q = to_double(v); };
        t["lqg.m_tar"] = [](auto& c, const json& v) { c.lqg_m_tar = to_double(v); };
        t["lqg.sigma_tar"] = [](auto& c, const json& v) { c.lqg_sigma_tar = to_double(v); };
        t["lqg.m_bar_grid"] = [](auto& c, const json& v) { c.m_bar_grid = to_doubles(v); };
        t["fixed_point.tol"] = [](auto& c, const json& v) { c.fp_tol = to_double(v); };
        t["fixed_point.max_iter"] = [](auto& c, const json& v) { c.fp_max_iter = static_cast<int>(to_int(v)); };
        return t;
    }();
    return table;
}

struct Entry {
    std::string key;
    json value;
    std::string where;
};

ExperimentConfig apply(std::vector<Entry> entries, ExperimentConfig cfg) {
    // a preset key seeds everything else
    for (const auto& e : entries)
        if (e.key == "preset") {
            try {
                cfg = preset(to_str(e.value));
            } catch (const ValidationError& err) {
                throw ValidationError(e.where + ": " + err.what());
            }
        }
    std::vector<std::string> errs;
    for (const auto& e : entries) {
        if (e.key == "preset") continue;
        const auto it = setters().find(e.key);
        if (it == setters().end()) {
            errs.push_back(e.where + ": unknown key '" + e.key + "'");
            continue;
        }
        try {
            it->second(cfg, e.value);
        } catch (const std::exception& err) {
            errs.push_back(e.where + ": field " + e.key + ": " + err.what());
        }
    }
    if (!errs.empty()) {
        std::string msg;
        for (const auto& s : errs) msg += (msg.empty() ? "" : "\n") + s;
        throw ValidationError(msg);
    }
    return cfg;
}

std::vector<double> zone_vector(int d) {
    std::vector<double> z(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) z[static_cast<std::size_t>(j)] = std::sin(2.0 * std::numbers::pi * j / d);
    return z;
}

// Builds one mixture; problems go to errs.
std::optional<GaussianMixture> make_mixture(const std::string& side, std::vector<double> w, std::vector<Vec> means,
                                            const std::vector<double>& sigmas, double rho, int d,
                                            std::vector<std::string>& errs) {
    const std::size_t before = errs.size();
    if (w.empty()) errs.push_back(side + ": no components");
    if (means.size() != w.size()) errs.push_back(side + ": " + std::to_string(w.size()) + " weights but " +
                                                 std::to_string(means.size()) + " means");
    if (sigmas.size() != w.size()) errs.push_back(side + ": " + std::to_string(w.size()) + " weights but " +
                                                  std::to_string(sigmas.size()) + " sigmas");
    std::vector<Covariance> covs;
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        try {
            covs.push_back(Covariance::ar1(d, sigmas[k], rho));
        } catch (const ValidationError& e) {
            errs.push_back(side + " component " + std::to_string(k) + ": " + e.what());
        }
    }
    if (errs.size() != before) return std::nullopt;
    for (auto& s : GaussianMixture::check(w, means, covs)) errs.push_back(side + ": " + s);
    if (errs.size() != before) return std::nullopt;
    return GaussianMixture(std::move(w), std::move(means), std::move(covs));
}

std::vector<Vec> expand_means(const std::string& side, const MixtureSpec& m, int d, std::vector<std::string>& errs) {
    const auto z = zone_vector(d);
    std::vector<Vec> out;
    for (std::size_t k = 0; k < m.means.size(); ++k) {
        const auto& v = m.means[k];
        Vec mk(d);
        if (v.size() == 1) mk.setConstant(v[0]);
        else if (static_cast<int>(v.size()) == d) mk = Eigen::Map<const Vec>(v.data(), d);
        else {
            errs.push_back(side + ": mean " + std::to_string(k) + " has " + std::to_string(v.size()) +
                           " entries, expected 1 or " + std::to_string(d));
            continue;
        }
        if (!m.zone_shift.empty()) {
            if (m.zone_shift.size() != m.means.size()) {
                errs.push_back(side + ": zone_shift needs one entry per component");
                return out;
            }
            for (int j = 0; j < d; ++j) mk[j] += m.zone_shift[k] * z[static_cast<std::size_t>(j)];
        }
        out.push_back(mk);
    }
    return out;
}

std::optional<Endpoints> endpoints_checked(const ExperimentConfig& c, std::vector<std::string>& errs) {
    const int d = c.dimension;
    if (d < 1) {
        errs.emplace_back("dimension must be at least 1");
        return std::nullopt;
    }
    std::optional<GaussianMixture> tar, ini;
    if (c.family == "k-sweep") {
        const int K = c.components;
        if (K < 1) {
            errs.emplace_back("ksweep.components must be at least 1");
            return std::nullopt;
        }
        std::vector<double> w;
        std::vector<Vec> mt, mi;
        double norm = 0.5 * K * (K + 1);
        for (int k = 0; k < K; ++k) {
            const double pos = K == 1 ? c.range_lo : c.range_lo + (c.range_hi - c.range_lo) * k / (K - 1);
            w.push_back((K - k) / norm);
            mt.push_back(Vec::Constant(d, pos));
            mi.push_back(Vec::Constant(d, pos + c.displacement));
        }
        // renormalise away rounding so the simplex check is exact
        double s = 0.0;
        for (double x : w) s += x;
        for (double& x : w) x /= s;
        tar = make_mixture("target", w, mt, std::vector<double>(static_cast<std::size_t>(K), c.sigma_tar),
                           c.target.ar_rho, d, errs);
        if (!c.delta_start)
            ini = make_mixture("initial", w, mi, std::vector<double>(static_cast<std::size_t>(K), c.sigma_in),
                               c.initial.ar_rho, d, errs);
    } else {
        const auto mt = expand_means("target", c.target, d, errs);
        tar = make_mixture("target", c.target.weights, mt, c.target.sigmas, c.target.ar_rho, d, errs);
        if (!c.delta_start) {
            std::vector<Vec> mi;
            if (!c.initial.means.empty()) {
                mi = expand_means("initial", c.initial, d, errs);
            } else if (!c.initial.offset.empty()) {
                if (c.initial.offset.size() != mt.size())
                    errs.emplace_back("initial.offset needs one entry per target component");
                else
                    for (std::size_t k = 0; k < mt.size(); ++k) mi.push_back(mt[k].array() + c.initial.offset[k]);
            } else {
                errs.emplace_back("initial: give means or offset (or set start = delta)");
            }
            ini = make_mixture("initial", c.initial.weights, mi, c.initial.sigmas, c.initial.ar_rho, d, errs);
        }
    }
    if (!tar || (!c.delta_start && !ini)) return std::nullopt;
    return Endpoints{ini, *tar};
}

json mixture_json(const MixtureSpec& m, bool with_offset) {
    json j;
    j["weights"] = m.weights;
    j["means"] = m.means;
    j["sigmas"] = m.sigmas;
    j["ar_rho"] = m.ar_rho;
    if (!m.zone_shift.empty()) j["zone_shift"] = m.zone_shift;
    if (with_offset && !m.offset.empty()) j["offset"] = m.offset;
    return j;
}

} // namespace

// ===========================================================================
// Presets
// ===========================================================================

std::vector<std::string> preset_names() {
    return {"scenario-a", "scenario-b", "d-sweep", "k-sweep", "ar-sweep", "lqg-tcl"};
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.target = {{0.6, 0.4}, {{0.0}, {1.5}}, {0.2, 0.3}, {}, {}, 0.0};
    if (name == "scenario-a") {
        c.initial = {{0.6, 0.4}, {{1.0}, {6.0}}, {3.0, 3.0}, {}, {}, 0.0};
    } else if (name == "scenario-b") {
        c.initial = {{0.6, 0.4}, {{1.5}, {5.5}}, {0.5, 0.7}, {}, {}, 0.0};
    } else if (name == "d-sweep" || name == "ar-sweep") {
        c.target = {{0.6, 0.4}, {{0.1}, {1.5}}, {0.2, 0.3}, {0.15, -0.15}, {}, 0.0};
        c.initial = {{0.6, 0.4}, {}, {0.5, 0.7}, {}, {1.5, 4.0}, 0.0};
        c.batch = 4000;
        if (name == "d-sweep") {
            c.sweep_axis = "dimension";
            c.sweep_values = {1, 2, 4, 8, 16, 32};
        } else {
            c.dimension = 8;
            c.sweep_axis = "ar-rho";
            c.sweep_values = {0.0, 0.5, 0.8};
        }
    } else if (name == "k-sweep") {
        c.family = "k-sweep";
        c.dimension = 4;
        c.components = 4;
        c.batch = 4000;
        c.sweep_axis = "components";
        c.sweep_values = {2, 3, 4, 8};
    } else if (name == "lqg-tcl") {
        c.delta_start = true;
        c.m_bar_grid = {0.0, 0.375, 0.75, 1.125, 1.5};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ValidationError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return c;
}

// ===========================================================================
// Parsing
// ===========================================================================

ExperimentConfig parse_config(const std::string& text, const std::string& origin, ExperimentConfig base) {
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<Entry> entries;
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ValidationError(origin + ": invalid JSON: " + e.what());
        }
        std::vector<std::pair<std::string, json>> flat;
        flatten(j, "", flat);
        for (auto& [k, v] : flat) entries.push_back({k, v, origin + ": field " + k});
    } else {
        std::istringstream is(text);
        std::string line;
        int no = 0;
        std::vector<std::string> errs;
        while (std::getline(is, line)) {
            ++no;
            if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            const std::string where = origin + ":" + std::to_string(no);
            if (eq == std::string::npos) {
                errs.push_back(where + ": expected 'key = value'");
                continue;
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty() || val.empty()) {
                errs.push_back(where + ": empty key or value");
                continue;
            }
            entries.push_back({key, text_value(val), where});
        }
        if (!errs.empty()) {
            std::string msg;
            for (const auto& s : errs) msg += (msg.empty() ? "" : "\n") + s;
            throw ValidationError(msg);
        }
    }
    return apply(std::move(entries), std::move(base));
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path, std::move(base));
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["family"] = c.family;
    j["dimension"] = c.dimension;
    j["start"] = c.delta_start ? "delta" : "mixture";
    j["initial"] = mixture_json(c.initial, true);
    j["target"] = mixture_json(c.target, false);
    j["ksweep"] = {{"components", c.components},
                   {"range", {c.range_lo, c.range_hi}},
                   {"displacement", c.displacement},
                   {"sigma_in", c.sigma_in},
                   {"sigma_tar", c.sigma_tar}};
    j["schedule"] = {{"beta0", c.beta0}, {"gamma", c.gamma}, {"intervals", c.intervals}};
    j["sim"] = {{"batch", c.batch}, {"steps", c.steps},       {"seed", c.seed},
                {"workers", c.workers}, {"midpoint", c.midpoint}, {"paths", c.paths}};
    j["run"] = {{"modes", c.modes}, {"parallel", c.parallel}};
    j["sweep"] = {{"axis", c.sweep_axis}, {"values", c.sweep_values}};
    j["lqg"] = {{"kappa", c.kappa},
                {"q", c.q},
                {"m_tar", c.lqg_m_tar},
                {"sigma_tar", c.lqg_sigma_tar},
                {"m_bar_grid", c.m_bar_grid}};
    j["fixed_point"] = {{"tol", c.fp_tol}, {"max_iter", c.fp_max_iter}};
    return j;
}

// ===========================================================================
// Construction
// ===========================================================================

Endpoints build_endpoints(const ExperimentConfig& cfg) {
    std::vector<std::string> errs;
    auto ep = endpoints_checked(cfg, errs);
    if (!errs.empty() || !ep) throw ValidationError(errs.empty() ? "invalid endpoints" : errs.front());
    return *ep;
}

PwcSchedule build_schedule(const ExperimentConfig& cfg) {
    return geometric_schedule(cfg.beta0, cfg.gamma, cfg.intervals);
}

SimConfig sim_config(const ExperimentConfig& cfg, GuidanceMode mode) {
    Endpoints ep = build_endpoints(cfg);
    SimConfig s{.target = std::move(ep.target), .schedule = build_schedule(cfg), .initial = std::move(ep.initial)};
    s.mode = mode;
    s.batch = cfg.batch;
    s.n_steps = cfg.steps;
    s.seed = cfg.seed;
    s.workers = cfg.workers;
    s.midpoint = cfg.midpoint;
    s.trajectory_paths = static_cast<std::size_t>(std::max(0, cfg.paths));
    return s;
}

ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, double value) {
    ExperimentConfig c = cfg;
    std::ostringstream tag;
    tag << value;
    if (cfg.sweep_axis == "dimension") {
        c.dimension = static_cast<int>(value);
        c.name += "-d" + tag.str();
    } else if (cfg.sweep_axis == "components") {
        c.components = static_cast<int>(value);
        c.name += "-K" + tag.str();
    } else if (cfg.sweep_axis == "ar-rho") {
        c.initial.ar_rho = value;
        c.target.ar_rho = value;
        c.name += "-rho" + tag.str();
    } else if (cfg.sweep_axis != "none") {
        throw ValidationError("unknown sweep axis '" + cfg.sweep_axis + "'");
    }
    c.sweep_axis = "none";
    c.sweep_values.clear();
    return c;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.intervals < 1) errs.emplace_back("schedule.intervals must be at least 1");
    if (cfg.steps < 10) errs.emplace_back("sim.steps must be at least 10");
    if (cfg.batch < 1) errs.emplace_back("sim.batch must be positive");
    if (cfg.workers < 1) errs.emplace_back("sim.workers must be at least 1");
    if (cfg.paths < 0 || cfg.paths > 50) errs.emplace_back("sim.paths must lie in [0, 50]");
    for (const auto& m : cfg.modes) {
        try {
            const GuidanceMode gm = parse_mode(m);
            if (gm == GuidanceMode::Fixed || gm == GuidanceMode::Piecewise)
                errs.push_back("mode '" + m + "' needs explicit centres and cannot be run from a config");
        } catch (const ValidationError& e) {
            errs.emplace_back(e.what());
        }
    }
    const std::string& ax = cfg.sweep_axis;
    if (ax != "none" && ax != "dimension" && ax != "components" && ax != "ar-rho")
        errs.push_back("unknown sweep axis '" + ax + "'");
    if (ax != "none" && cfg.sweep_values.empty()) errs.emplace_back("sweep.values is empty");
    if (ax == "components" && cfg.family != "k-sweep") errs.emplace_back("the components axis needs family = k-sweep");
    if (!(cfg.lqg_sigma_tar > 0.0) || cfg.kappa < 0.0 || cfg.q < 0.0)
        errs.emplace_back("lqg: need kappa >= 0, q >= 0, sigma_tar > 0");

    std::optional<PwcSchedule> sched;
    try {
        sched = build_schedule(cfg);
    } catch (const ValidationError& e) {
        errs.emplace_back(e.what());
    }
    if (!errs.empty()) return errs;

    std::vector<ExperimentConfig> points;
    if (ax == "none") points.push_back(cfg);
    else
        for (double v : cfg.sweep_values) {
            if ((ax == "dimension" || ax == "components") && (v < 1 || std::floor(v) != v)) {
                errs.push_back("sweep value " + std::to_string(v) + " is not a positive integer");
                continue;
            }
            if (ax == "ar-rho" && !(std::abs(v) < 1.0)) {
                errs.push_back("ar-rho value " + std::to_string(v) + " outside (-1, 1)");
                continue;
            }
            points.push_back(at_sweep_point(cfg, v));
        }

    // dry run: coefficient tables and the K_t scan
    try {
        const auto grid = uniform_grid(cfg.steps);
        (void)forward_scalar(*sched, grid);
        const GreenCoefficients g(*sched);
        const double a1 = g.a_plus_terminal();
        for (std::size_t j = 1; j + 1 < grid.size(); ++j) {
            const double K = g.at(grid[j]).c_minus - a1;
            if (!(K > 0.0)) {
                errs.push_back("K_t = " + std::to_string(K) + " is not positive at t = " + std::to_string(grid[j]));
                break;
            }
        }
    } catch (const std::exception& e) {
        errs.emplace_back(e.what());
    }
    for (const auto& p : points) {
        std::vector<std::string> local;
        const auto ep = endpoints_checked(p, local);
        for (auto& s : local) errs.push_back((ax == "none" ? "" : p.name + ": ") + s);
        if (!ep) continue;
        try {
            const ScoreContext ctx(*sched, linear_guidance(ep->initial ? ep->initial->mean() : Vec::Zero(p.dimension),
                                                           ep->target.mean()),
                                   ep->target, ep->initial);
            (void)ctx.slice(0.5 / cfg.steps);
            (void)ctx.slice(1.0 - 0.5 / cfg.steps);
        } catch (const std::exception& e) {
            errs.push_back(p.name + ": " + e.what());
        }
    }
    return errs;
}

} // namespace mfpid

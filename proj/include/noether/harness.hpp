#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "noether/cms.hpp"
#include "noether/export.hpp"
#include "noether/oscillator.hpp"
#include "noether/spheroid.hpp"

namespace noether::harness {

using nlohmann::json;

// ---------------------------------------------------------------- config ---

struct ExperimentConfig {
    std::string system;
    std::string suite = "all";
    std::uint64_t seed = 20260810;
    double tol_scale = 1.0;
    std::string out_dir = ".";
    double t0 = 0.0, t1 = 0.0;
    json params;   // system parameters, schema per system
    json initial;  // initial state, schema per system
    std::map<std::string, double> tol_overrides;
};

namespace detail {

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

inline double jnum(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!j.at(key).is_number()) throw ConfigError("key '" + key + "' in " + where + " must be a number");
    return j.at(key).get<double>();
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    detail::require_keys(j, {"system", "suite", "seed", "tol_scale", "out", "t_span", "params",
                             "initial", "tolerances"},
                         "config");
    ExperimentConfig cfg;
    if (!j.contains("system")) throw ConfigError("config: missing 'system'");
    cfg.system = j.at("system").get<std::string>();
    if (cfg.system != "oscillator" && cfg.system != "spheroid" && cfg.system != "cms")
        throw ConfigError("config: unknown system id '" + cfg.system + "'");
    if (j.contains("suite")) cfg.suite = j.at("suite").get<std::string>();
    static const std::set<std::string> suites{"conservation", "brackets", "commutators",
                                              "groups", "action_angle", "all"};
    if (!suites.count(cfg.suite)) throw ConfigError("config: unknown suite '" + cfg.suite + "'");
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tol_scale")) cfg.tol_scale = j.at("tol_scale").get<double>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (!j.contains("t_span") || !j.at("t_span").is_array() || j.at("t_span").size() != 2)
        throw ConfigError("config: 't_span' must be [t0, t1]");
    cfg.t0 = j.at("t_span")[0].get<double>();
    cfg.t1 = j.at("t_span")[1].get<double>();
    if (cfg.t0 == cfg.t1) throw ConfigError("config: empty t_span");
    cfg.params = j.value("params", json::object());
    cfg.initial = j.value("initial", json::object());
    if (j.contains("tolerances")) {
        if (!j.at("tolerances").is_object()) throw ConfigError("config: 'tolerances' must be an object");
        for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
            cfg.tol_overrides[it.key()] = it.value().get<double>();
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------- report ---

struct CheckResult {
    std::string id;
    std::string anchor;  // short statement of the claim being checked
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    double wall_ms = 0.0;  // in-memory only; serializers omit it for determinism
};

struct VerificationReport {
    std::string system, suite;
    std::uint64_t seed = 0;
    double tol_scale = 1.0;
    std::vector<CheckResult> checks;

    int failures() const {
        int n = 0;
        for (const auto& c : checks)
            if (!c.pass) ++n;
        return n;
    }
};

inline json report_to_json(const VerificationReport& r) {
    json j;
    j["system"] = r.system;
    j["suite"] = r.suite;
    j["seed"] = r.seed;
    j["tol_scale"] = r.tol_scale;
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
        json cj;
        cj["id"] = c.id;
        cj["anchor"] = c.anchor;
        cj["residual"] = c.residual;
        cj["tol"] = c.tol;
        cj["pass"] = c.pass;
        j["checks"].push_back(cj);
    }
    j["failures"] = r.failures();
    return j;
}

inline std::string report_to_text(const VerificationReport& r) {
    std::ostringstream os;
    os << "system: " << r.system << "  suite: " << r.suite << "  seed: " << r.seed << "\n";
    char line[256];
    for (const auto& c : r.checks) {
        std::snprintf(line, sizeof line, "%-42s %-34s %11.3e %9.1e  %s\n", c.id.c_str(),
                      c.anchor.c_str(), c.residual, c.tol, c.pass ? "pass" : "FAIL");
        os << line;
    }
    os << (r.failures() == 0 ? "all checks passed" : std::to_string(r.failures()) + " check(s) FAILED")
       << " (" << r.checks.size() << " total)\n";
    return os.str();
}

// ----------------------------------------------------- check construction ---

struct Check {
    std::string id;
    std::string anchor;
    double tol;
    std::function<double()> run;  // returns the residual
};

namespace detail {

/// piecewise-cubic interpolation of a tabulated profile (for omega tables)
inline std::function<double(double)> tabulated(const std::vector<std::pair<double, double>>& tab) {
    if (tab.size() < 2) throw ConfigError("tabulated profile needs at least two samples");
    auto pts = std::make_shared<std::vector<std::pair<double, double>>>(tab);
    return [pts](double t) {
        const auto& p = *pts;
        std::size_t n = p.size();
        if (t <= p.front().first) return p.front().second;
        if (t >= p.back().first) return p.back().second;
        std::size_t i = 0;
        while (i + 2 < n && p[i + 1].first < t) ++i;
        double t0 = p[i].first, t1 = p[i + 1].first, y0 = p[i].second, y1 = p[i + 1].second;
        double m0 = (i > 0) ? (y1 - p[i - 1].second) / (t1 - p[i - 1].first)
                            : (y1 - y0) / (t1 - t0);
        double m1 = (i + 2 < n) ? (p[i + 2].second - y0) / (p[i + 2].first - t0)
                                : (y1 - y0) / (t1 - t0);
        double h = t1 - t0, u = (t - t0) / h;
        double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * m0 +
               (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * m1;
    };
}

inline double drift_residual(const std::vector<double>& values) {
    double ref = values.front(), lo = ref, hi = ref;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return (hi - lo) / std::max(1.0, std::fabs(ref));
}

}  // namespace detail

// Each system contributes its check table; the same table is the catalog
// (ids, anchors, tolerances) and the executable suite.
std::vector<Check> build_checks(const ExperimentConfig& cfg);

inline std::vector<std::pair<std::string, std::string>> list_checks(const std::string& system,
                                                                    const std::string& suite) {
    ExperimentConfig cfg;
    cfg.system = system;
    cfg.suite = suite;
    // defaults good enough to enumerate the catalog
    if (system == "oscillator") {
        cfg.t0 = 0.3;
        cfg.t1 = 3.0;
    } else {
        cfg.t0 = 0.0;
        cfg.t1 = 20.0;
    }
    auto checks = build_checks(cfg);
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& c : checks) out.push_back({c.id, c.anchor});
    return out;
}

inline VerificationReport run_suite(const ExperimentConfig& cfg) {
    VerificationReport rep;
    rep.system = cfg.system;
    rep.suite = cfg.suite;
    rep.seed = cfg.seed;
    rep.tol_scale = cfg.tol_scale;
    for (auto& c : build_checks(cfg)) {
        CheckResult res;
        res.id = c.id;
        res.anchor = c.anchor;
        res.tol = c.tol * cfg.tol_scale;
        if (auto it = cfg.tol_overrides.find(c.id); it != cfg.tol_overrides.end())
            res.tol = it->second;
        auto start = std::chrono::steady_clock::now();
        try {
            res.residual = c.run();
            res.pass = std::isfinite(res.residual) && std::fabs(res.residual) <= res.tol;
        } catch (const std::exception& e) {
            res.residual = std::numeric_limits<double>::quiet_NaN();
            res.pass = false;
            res.anchor += std::string(" [error: ") + e.what() + "]";
        }
        res.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        rep.checks.push_back(std::move(res));
    }
    return rep;
}

}  // namespace noether::harness

#include "noether/harness_checks.hpp"

#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"
#include "noether/ode.hpp"

namespace noether {

namespace detail {
inline std::string fmt_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace detail

/// CSV at the integrator's accepted nodes: t, q_1..q_N, qdot_1..qdot_N.
inline void export_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("export_trajectory_csv: cannot open " + path);
    const std::size_t n = traj.sys().n_dof;
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",q_" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",qdot_" << i;
    out << "\n";
    for (const auto& [t, y] : traj.flat().nodes()) {
        out << detail::fmt_g17(t);
        for (std::size_t i = 0; i < 2 * n; ++i) out << "," << detail::fmt_g17(y[i]);
        out << "\n";
    }
    if (!out) throw IoError("export_trajectory_csv: write failed");
}

/// Sidecar event log: list of {id, t, state}.
inline void export_event_json(const Trajectory& traj, const std::string& path) {
    nlohmann::json j;
    j["events"] = nlohmann::json::array();
    for (const auto& e : traj.events()) {
        nlohmann::json ev;
        ev["id"] = e.id;
        ev["t"] = e.t;
        ev["state"]["t"] = e.state.t;
        ev["state"]["q"] = e.state.q;
        ev["state"]["qdot"] = e.state.qdot;
        j["events"].push_back(ev);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("export_event_json: cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("export_event_json: write failed");
}

/// Long-format CSV (series, t, value) for plotting tools.
class PlotData {
public:
    void add(const std::string& series, double t, double value) {
        rows_.push_back({series, t, value});
    }
    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("emit_plot_data: cannot open " + path);
        out << "series,t,value\n";
        for (const auto& r : rows_)
            out << r.series << "," << detail::fmt_g17(r.t) << "," << detail::fmt_g17(r.value)
                << "\n";
        if (!out) throw IoError("emit_plot_data: write failed");
    }

private:
    struct Row {
        std::string series;
        double t, value;
    };
    std::vector<Row> rows_;
};

}  // namespace noether

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfc/config.hpp"
#include "dfc/log.hpp"

namespace dfc {

// 17 significant digits: doubles survive the text round trip exactly,
// which is what makes the determinism checks meaningful at the CSV level.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* trajectory_csv_header() {
    return "step,t,agent,status,x,y,phat_x,phat_y,chat_1,chat_2,chat_3,"
           "lam1_i,lam2_i,err_y,err_D";
}

inline const char* metrics_csv_header() {
    return "t,e_norm,min_dist,centroid_x,centroid_y,true_lam1,true_lam2,est_err_max";
}

inline void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out) {
    out << trajectory_csv_header() << "\n";
    for (const LogFrame& f : log.frames) {
        for (std::size_t i = 0; i < f.agents.size(); ++i) {
            const AgentRecord& a = f.agents[i];
            out << f.step << ',' << format_double(f.t) << ',' << i + 1 << ','
                << to_string(a.status) << ',' << format_double(a.pos.x) << ','
                << format_double(a.pos.y) << ',' << format_double(a.p_hat.x) << ','
                << format_double(a.p_hat.y) << ',' << format_double(a.c_hat.c1) << ','
                << format_double(a.c_hat.c2) << ',' << format_double(a.c_hat.c3) << ','
                << format_double(a.lam1) << ',' << format_double(a.lam2) << ','
                << format_double(a.err_y) << ',' << format_double(a.err_d) << "\n";
        }
    }
}

inline void write_metrics_csv(const TrajectoryLog& log, std::ostream& out) {
    out << metrics_csv_header() << "\n";
    for (const LogFrame& f : log.frames) {
        out << format_double(f.t) << ',' << format_double(f.e_norm) << ','
            << format_double(f.min_dist) << ',' << format_double(f.centroid.x) << ','
            << format_double(f.centroid.y) << ',' << format_double(f.true_lam1) << ','
            << format_double(f.true_lam2) << ',' << format_double(f.est_err_max) << "\n";
    }
}

struct MetricsRow {
    double t, e_norm, min_dist, centroid_x, centroid_y, true_lam1, true_lam2, est_err_max;
};

// Round-trip reader for metrics.csv; reconstructs the curves bit-exactly.
inline std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != metrics_csv_header())
        throw std::invalid_argument("metrics csv: unexpected header");
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        MetricsRow r{};
        double* fields[] = {&r.t, &r.e_norm, &r.min_dist, &r.centroid_x,
                            &r.centroid_y, &r.true_lam1, &r.true_lam2, &r.est_err_max};
        std::stringstream ss(line);
        std::string cell;
        for (double* field : fields) {
            if (!std::getline(ss, cell, ','))
                throw std::invalid_argument("metrics csv: short row");
            *field = std::strtod(cell.c_str(), nullptr);
        }
        rows.push_back(r);
    }
    return rows;
}

struct RunManifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version = kArtifactVersion;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
    std::vector<std::string> overrides;
};

namespace detail {

inline nlohmann::ordered_json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace detail

inline std::string summary_json(const RunManifest& manifest, const RunMetrics& m,
                               const TrajectoryLog& log) {
    nlohmann::ordered_json j;
    j["manifest"] = {{"config_hash", manifest.config_hash},
                     {"seed", manifest.seed},
                     {"version", manifest.version},
                     {"started_at", manifest.started_at},
                     {"finished_at", manifest.finished_at},
                     {"outputs", manifest.outputs},
                     {"overrides", manifest.overrides}};
    j["scenario"] = {{"mode", log.mode == RunMode::Centralized ? "centralized" : "distributed"},
                     {"target", {log.target.lambda1_star, log.target.lambda2_star}},
                     {"step_h", log.h},
                     {"duration", log.duration},
                     {"graph_lambda2", log.graph_lambda2},
                     {"graph_lambda_max", log.graph_lambda_max},
                     {"excluded_set_start", log.excluded_set_start}};
    nlohmann::ordered_json orbiters = nlohmann::ordered_json::array();
    for (const OrbiterInfo& o : log.orbiters)
        orbiters.push_back({{"agent", o.agent + 1}, {"omega", o.omega}, {"radius", o.radius}});
    j["scenario"]["orbiters"] = orbiters;
    j["scenario"]["warnings"] = log.warnings;
    const EigenBasis2& fb = log.frames.empty() ? log.basis0 : log.frames.back().true_basis;
    j["final_basis"] = {{"l1", fb.lambda1},
                        {"l2", fb.lambda2},
                        {"v1", {fb.v1.x, fb.v1.y}},
                        {"v2", {fb.v2.x, fb.v2.y}}};
    j["metrics"] = {{"decay_rate", m.decay_rate},
                    {"min_pairwise_distance", m.min_pairwise_distance},
                    {"max_centroid_drift", m.max_centroid_drift},
                    {"max_eigvec_angle_drift", m.max_eigvec_angle_drift},
                    {"scaling_residual", detail::number_or_null(m.scaling_residual)},
                    {"final_err_y_max", m.final_err_y_max},
                    {"final_err_d_max", m.final_err_d_max},
                    {"final_lam1", m.final_lam1},
                    {"final_lam2", m.final_lam2},
                    {"e_norm_final", m.enorm_final},
                    {"e_norm_max", m.enorm_max},
                    {"e_norm_avg_last_quarter", m.enorm_avg_last_quarter},
                    {"conservation_dev_max", m.conservation_dev_max}};
    return j.dump(2) + "\n";
}

}  // namespace dfc

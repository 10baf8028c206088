#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfc/control.hpp"
#include "dfc/dispersion.hpp"
#include "dfc/scenario.hpp"
#include "dfc/vec2.hpp"

namespace dfc {

enum class AgentStatus { Cooperative, NonCooperative, Dead };

inline const char* to_string(AgentStatus s) {
    switch (s) {
        case AgentStatus::Cooperative: return "cooperative";
        case AgentStatus::NonCooperative: return "non_cooperative";
        case AgentStatus::Dead: return "dead";
    }
    return "?";
}

struct AgentRecord {
    AgentStatus status = AgentStatus::Cooperative;
    Vec2 pos;
    Vec2 p_hat;
    Sym2 c_hat;
    double lam1 = 0.0, lam2 = 0.0;  // the agent's own spectrum estimate
    double err_y = 0.0, err_d = 0.0;
};

struct OrbiterInfo {
    std::uint32_t agent = 0;
    double omega = 0.0;
    double radius = 0.0;
};

struct LogFrame {
    long step = 0;
    double t = 0.0;
    std::vector<AgentRecord> agents;
    // global metrics over the alive swarm
    double e_norm = 0.0;
    double min_dist = std::numeric_limits<double>::infinity();
    Vec2 centroid;
    double true_lam1 = 0.0, true_lam2 = 0.0;
    EigenBasis2 true_basis;
    double est_err_max = 0.0;
    double conservation_dev = 0.0;  // drift of the estimator sums off their baseline
    int segment = 0;                // increments whenever the alive set changes
};

struct TrajectoryLog {
    RunMode mode = RunMode::Distributed;
    DispersionTarget target;
    double h = 0.0;
    long log_every = 1;
    double duration = 0.0;
    std::vector<Vec2> positions0;
    EigenBasis2 basis0;  // spectrum/basis of the true initial covariance
    double graph_lambda2 = 0.0, graph_lambda_max = 0.0;  // 0 when no graph
    std::vector<OrbiterInfo> orbiters;
    bool excluded_set_start = false;  // an initial eigenvalue is 0 with a positive target
    std::vector<std::string> warnings;
    std::vector<LogFrame> frames;
};

struct RunMetrics {
    double decay_rate = 0.0;  // LS slope of log ||e_lambda|| over the fit window
    double min_pairwise_distance = 0.0;
    double max_centroid_drift = 0.0;      // per alive-set segment
    double max_eigvec_angle_drift = 0.0;  // per segment, radians
    double scaling_residual = std::numeric_limits<double>::quiet_NaN();  // centralized
    double final_err_y_max = 0.0, final_err_d_max = 0.0;
    double final_lam1 = 0.0, final_lam2 = 0.0;
    double enorm_final = 0.0;
    double enorm_max = 0.0;
    double enorm_avg_last_quarter = 0.0;
    double conservation_dev_max = 0.0;
};

namespace detail {

// least-squares slope of log(values) against time over the positive samples;
// NaN when fewer than two of them exist
inline double log_slope(const std::vector<double>& t, const std::vector<double>& v) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(v[i] > 0.0)) continue;
        const double l = std::log(v[i]);
        st += t[i];
        sl += l;
        stt += t[i] * t[i];
        stl += t[i] * l;
        ++n;
    }
    const double d = static_cast<double>(n) * stt - st * st;
    if (n < 2 || d == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (static_cast<double>(n) * stl - st * sl) / d;
}

inline double line_angle(const Vec2& a, const Vec2& b) {
    const double c = std::min(1.0, std::abs(dot(a, b)) / (norm(a) * norm(b)));
    return std::acos(c);
}

}  // namespace detail

// Summary metrics over a finished run. The decay-rate fit window
// [fit_t0, fit_t1] defaults to the second half of the run.
inline RunMetrics metrics(const TrajectoryLog& log,
                          double fit_t0 = std::numeric_limits<double>::quiet_NaN(),
                          double fit_t1 = std::numeric_limits<double>::quiet_NaN()) {
    if (log.frames.empty()) throw std::invalid_argument("metrics: empty log");
    const double t_end = log.frames.back().t;
    const bool single_frame = log.frames.size() < 2;
    if (std::isnan(fit_t0)) fit_t0 = 0.5 * t_end;
    if (std::isnan(fit_t1)) fit_t1 = t_end;
    if (!single_frame &&
        (fit_t0 < 0.0 || fit_t1 > t_end + 1e-12 || !(fit_t0 < fit_t1)))
        throw std::invalid_argument("metrics: fit window outside the run");

    RunMetrics m;
    std::vector<double> wt, wv;
    double min_dist = std::numeric_limits<double>::infinity();
    double centroid_drift = 0.0, angle_drift = 0.0, cons_dev = 0.0, enorm_max = 0.0;
    int segment = -1;
    Vec2 centroid_base;
    EigenBasis2 basis_base;
    for (const LogFrame& f : log.frames) {
        if (f.segment != segment) {
            segment = f.segment;
            centroid_base = f.centroid;
            basis_base = f.true_basis;
        }
        centroid_drift = std::max(centroid_drift, norm(f.centroid - centroid_base));
        angle_drift = std::max(angle_drift,
                               std::max(detail::line_angle(f.true_basis.v1, basis_base.v1),
                                        detail::line_angle(f.true_basis.v2, basis_base.v2)));
        min_dist = std::min(min_dist, f.min_dist);
        cons_dev = std::max(cons_dev, f.conservation_dev);
        enorm_max = std::max(enorm_max, f.e_norm);
        if (f.t >= fit_t0 - 1e-12 && f.t <= fit_t1 + 1e-12) {
            wt.push_back(f.t);
            wv.push_back(f.e_norm);
        }
    }
    m.decay_rate = detail::log_slope(wt, wv);
    m.min_pairwise_distance = min_dist;
    m.max_centroid_drift = centroid_drift;
    m.max_eigvec_angle_drift = angle_drift;
    m.conservation_dev_max = cons_dev;
    m.enorm_max = enorm_max;

    if (log.mode == RunMode::Centralized) {
        // affine-scaling certificate against the initial cloud (first segment only)
        double worst = 0.0;
        for (const LogFrame& f : log.frames) {
            if (f.segment != 0) break;
            std::vector<Vec2> pos(f.agents.size());
            for (std::size_t i = 0; i < f.agents.size(); ++i) pos[i] = f.agents[i].pos;
            const ScalingCheck sc = scaling_certificate(log.positions0, pos, log.basis0);
            worst = std::max(worst, sc.max_rel_deviation);
        }
        m.scaling_residual = worst;
    }

    const LogFrame& last = log.frames.back();
    m.enorm_final = last.e_norm;
    m.final_lam1 = last.true_lam1;
    m.final_lam2 = last.true_lam2;
    for (const AgentRecord& a : last.agents) {
        if (a.status == AgentStatus::Dead) continue;
        m.final_err_y_max = std::max(m.final_err_y_max, a.err_y);
        m.final_err_d_max = std::max(m.final_err_d_max, a.err_d);
    }

    double acc = 0.0;
    std::size_t cnt = 0;
    for (const LogFrame& f : log.frames)
        if (f.t >= 0.75 * t_end) {
            acc += f.e_norm;
            ++cnt;
        }
    m.enorm_avg_last_quarter = cnt ? acc / static_cast<double>(cnt) : last.e_norm;
    return m;
}

}  // namespace dfc

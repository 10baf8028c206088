#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfc/control.hpp"
#include "dfc/dispersion.hpp"
#include "dfc/estimators.hpp"
#include "dfc/graph.hpp"
#include "dfc/log.hpp"
#include "dfc/rk4.hpp"
#include "dfc/scenario.hpp"
#include "dfc/vec2.hpp"

namespace dfc {

struct OrbitParams {
    double radius = 0.0;
    double omega = 0.0;  // rad/s
    double phase = 0.0;
};

inline Vec2 orbit_position(const OrbitParams& o, double t) {
    return {o.radius * std::cos(o.omega * t + o.phase),
            o.radius * std::sin(o.omega * t + o.phase)};
}

inline Vec2 orbit_velocity(const OrbitParams& o, double t) {
    return {-o.radius * o.omega * std::sin(o.omega * t + o.phase),
            o.radius * o.omega * std::cos(o.omega * t + o.phase)};
}

struct SwarmState {
    double t = 0.0;
    std::vector<Vec2> positions;
    EstimatorState estimator;
    std::vector<AgentStatus> status;
    std::vector<OrbitParams> orbit;        // valid for non-cooperative agents
    std::vector<EigenBasis2> agent_basis;  // per-agent eigenbasis continuity memory
};

// Synchronous fixed-step scenario engine. One instance owns the full swarm
// state; steps commit atomically, events fire on step boundaries.
class Simulator {
  public:
    explicit Simulator(ResolvedScenario scenario)
        : sc_(std::move(scenario)),
          n_(sc_.cfg.n_agents),
          rk4_(n_ * (sc_.cfg.mode == RunMode::Distributed ? 7 : 2)),
          y_(n_ * (sc_.cfg.mode == RunMode::Distributed ? 7 : 2)) {
        state_.positions = sc_.positions0;
        state_.estimator = EstimatorState::zeros(n_);
        state_.status.assign(n_, AgentStatus::Cooperative);
        state_.orbit.assign(n_, OrbitParams{});
        state_.agent_basis.assign(n_, EigenBasis2{});
        last_err_y_.assign(n_, 0.0);
        last_err_d_.assign(n_, 0.0);
        last_phat_.assign(n_, Vec2{});

        if (sc_.graph) adj_ = sc_.graph->adjacency();
        else adj_.assign(n_, {});

        const CloudStats s0 = covariance(state_.positions);
        basis0_ = eig_sym2(s0.covariance);
        true_basis_ = basis0_;
        frozen_basis_ = basis0_;

        p_buf_.resize(n_);
        phat_buf_.resize(n_);
        chat_buf_.resize(n_);
        src_buf_.resize(n_);
        dphat_buf_.resize(n_);
        dchat_buf_.resize(n_);
    }

    const SwarmState& state() const { return state_; }
    SwarmState& mutable_state() { return state_; }
    const ResolvedScenario& scenario() const { return sc_; }
    const AdjacencyList& adjacency() const { return adj_; }
    double time() const { return state_.t; }

    std::size_t alive_count() const {
        std::size_t c = 0;
        for (AgentStatus s : state_.status)
            if (s != AgentStatus::Dead) ++c;
        return c;
    }

    // One committed step of size h ending exactly at t_next.
    void advance_to(double t_next, double h) {
        pack();
        if (sc_.cfg.mode == RunMode::Distributed) {
            rk4_.step(state_.t, h, y_, [this](double t, std::vector<double>& y,
                                              std::vector<double>& dy) {
                deriv_distributed(t, y, dy);
            });
        } else {
            rk4_.step(state_.t, h, y_, [this](double t, std::vector<double>& y,
                                              std::vector<double>& dy) {
                deriv_centralized(t, y, dy);
            });
        }
        for (double v : y_)
            if (!std::isfinite(v))
                throw std::runtime_error(
                    "simulation state became non-finite at t=" + std::to_string(t_next) +
                    "; step_h=" + std::to_string(h) +
                    " likely violates the stability bound h <= 0.5*eps_f*eps_s/lambda_max(L)" +
                    (sc_.stability_bound > 0.0 ? " = " + std::to_string(sc_.stability_bound)
                                               : ""));
        unpack();
        state_.t = t_next;
        for (std::size_t i = 0; i < n_; ++i)
            if (state_.status[i] == AgentStatus::NonCooperative)
                state_.positions[i] = orbit_position(state_.orbit[i], t_next);
        commit_bases();
    }

    void apply_event(const Event& ev, TrajectoryLog* log) {
        if (ev.kind == Event::Kind::Kill) {
            apply_kill(ev.agents);
        } else {
            const std::uint32_t a = ev.agent;
            Vec2 p = state_.positions[a];
            const double r = ev.radius.value_or(norm(p));
            const double theta = (p.x == 0.0 && p.y == 0.0) ? 0.0 : std::atan2(p.y, p.x);
            state_.status[a] = AgentStatus::NonCooperative;
            state_.orbit[a] = {r, ev.omega, theta - ev.omega * state_.t};
            state_.positions[a] = orbit_position(state_.orbit[a], state_.t);
            if (log) log->orbiters.push_back({a, ev.omega, r});
        }
    }

    TrajectoryLog run() {
        TrajectoryLog log;
        log.mode = sc_.cfg.mode;
        log.target = sc_.cfg.target;
        log.h = sc_.h;
        log.log_every = sc_.cfg.log_every;
        log.duration = sc_.cfg.duration;
        log.positions0 = sc_.positions0;
        log.basis0 = basis0_;
        if (sc_.spectrum) {
            log.graph_lambda2 = sc_.spectrum->algebraic_connectivity;
            log.graph_lambda_max = sc_.spectrum->laplacian_eigenvalues.back();
        }
        log.excluded_set_start =
            (basis0_.lambda1 <= 1e-12 && sc_.cfg.target.lambda1_star > 0.0) ||
            (basis0_.lambda2 <= 1e-12 && sc_.cfg.target.lambda2_star > 0.0);

        std::size_t next_event = 0;
        const auto fire_events = [&](long step) {
            while (next_event < sc_.schedule.size() &&
                   sc_.schedule[next_event].step == step) {
                apply_event(sc_.schedule[next_event].event, &log);
                ++next_event;
            }
        };

        fire_events(0);
        reset_conservation_baseline();
        log.frames.push_back(make_frame(0));
        for (long k = 0; k < sc_.n_steps; ++k) {
            advance_to(static_cast<double>(k + 1) * sc_.h, sc_.h);
            fire_events(k + 1);
            if ((k + 1) % sc_.cfg.log_every == 0 || k + 1 == sc_.n_steps)
                log.frames.push_back(make_frame(k + 1));
        }
        for (const std::string& w : warnings_) log.warnings.push_back(w);
        return log;
    }

    // Snapshot of per-agent records plus alive-swarm metrics. Updates the
    // true-basis continuity memory, so call it in time order.
    LogFrame make_frame(long step) {
        LogFrame f;
        f.step = step;
        f.t = state_.t;
        f.segment = segment_;

        std::vector<std::uint32_t> alive;
        std::vector<Vec2> alive_pos;
        for (std::size_t i = 0; i < n_; ++i)
            if (state_.status[i] != AgentStatus::Dead) {
                alive.push_back(static_cast<std::uint32_t>(i));
                alive_pos.push_back(state_.positions[i]);
            }

        const CloudStats stats = covariance(alive_pos);
        true_basis_ = eig_sym2(stats.covariance, &true_basis_);
        f.true_basis = true_basis_;
        f.true_lam1 = true_basis_.lambda1;
        f.true_lam2 = true_basis_.lambda2;
        f.e_norm = std::hypot(true_basis_.lambda1 - sc_.cfg.target.lambda1_star,
                              true_basis_.lambda2 - sc_.cfg.target.lambda2_star);
        f.centroid = stats.centroid;

        f.min_dist = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < alive_pos.size(); ++a)
            for (std::size_t b = a + 1; b < alive_pos.size(); ++b)
                f.min_dist = std::min(f.min_dist, norm(alive_pos[a] - alive_pos[b]));

        f.agents.resize(n_);
        if (sc_.cfg.mode == RunMode::Distributed) {
            EstimatorState alive_est;
            for (std::uint32_t i : alive) {
                alive_est.p_hat.push_back(state_.estimator.p_hat[i]);
                alive_est.c_hat.push_back(state_.estimator.c_hat[i]);
            }
            const EstimationErrors err = estimation_errors(alive_pos, alive_est);
            for (std::size_t k = 0; k < alive.size(); ++k) {
                last_err_y_[alive[k]] = err.y_norm[k];
                last_err_d_[alive[k]] = err.d_norm[k];
            }
            Vec2 sum_p;
            Sym2 sum_c;
            for (std::uint32_t i : alive) {
                sum_p += state_.estimator.p_hat[i];
                sum_c += state_.estimator.c_hat[i];
            }
            f.conservation_dev = std::max(norm(sum_p - baseline_p_),
                                          frobenius_norm(sum_c - baseline_c_));
            for (std::size_t i = 0; i < n_; ++i) {
                AgentRecord& a = f.agents[i];
                a.status = state_.status[i];
                a.pos = state_.positions[i];
                a.p_hat = state_.estimator.p_hat[i];
                a.c_hat = state_.estimator.c_hat[i];
                a.lam1 = state_.agent_basis[i].lambda1;
                a.lam2 = state_.agent_basis[i].lambda2;
                a.err_y = last_err_y_[i];
                a.err_d = last_err_d_[i];
                if (a.status != AgentStatus::Dead)
                    f.est_err_max = std::max(f.est_err_max, std::max(a.err_y, a.err_d));
            }
        } else {
            for (std::size_t i = 0; i < n_; ++i) {
                AgentRecord& a = f.agents[i];
                a.status = state_.status[i];
                a.pos = state_.positions[i];
                if (a.status != AgentStatus::Dead) {
                    a.p_hat = state_.positions[i] - stats.centroid;
                    last_phat_[i] = a.p_hat;
                } else {
                    a.p_hat = last_phat_[i];
                }
                a.lam1 = f.true_lam1;
                a.lam2 = f.true_lam2;
            }
        }
        return f;
    }

  private:
    static constexpr std::size_t kStrideDistributed = 7;

    void pack() {
        if (sc_.cfg.mode == RunMode::Distributed) {
            for (std::size_t i = 0; i < n_; ++i) {
                double* a = &y_[i * kStrideDistributed];
                a[0] = state_.positions[i].x;
                a[1] = state_.positions[i].y;
                a[2] = state_.estimator.p_hat[i].x;
                a[3] = state_.estimator.p_hat[i].y;
                a[4] = state_.estimator.c_hat[i].c1;
                a[5] = state_.estimator.c_hat[i].c2;
                a[6] = state_.estimator.c_hat[i].c3;
            }
        } else {
            for (std::size_t i = 0; i < n_; ++i) {
                y_[2 * i] = state_.positions[i].x;
                y_[2 * i + 1] = state_.positions[i].y;
            }
        }
    }

    void unpack() {
        if (sc_.cfg.mode == RunMode::Distributed) {
            for (std::size_t i = 0; i < n_; ++i) {
                const double* a = &y_[i * kStrideDistributed];
                state_.positions[i] = {a[0], a[1]};
                state_.estimator.p_hat[i] = {a[2], a[3]};
                state_.estimator.c_hat[i] = {a[4], a[5], a[6]};
            }
        } else {
            for (std::size_t i = 0; i < n_; ++i)
                state_.positions[i] = {y_[2 * i], y_[2 * i + 1]};
        }
    }

    // Coupled slow-fast right-hand side: centroid consensus on the fastest
    // timescale 1/(eps_f*eps_s), covariance consensus on 1/eps_s, motion on
    // the slow timescale, each agent steering with its own recovered
    // covariance. Non-cooperative agents follow their orbit exactly.
    void deriv_distributed(double t, std::vector<double>& y, std::vector<double>& dy) {
        for (std::size_t i = 0; i < n_; ++i) {
            const double* a = &y[i * kStrideDistributed];
            p_buf_[i] = {a[0], a[1]};
            phat_buf_[i] = {a[2], a[3]};
            chat_buf_[i] = {a[4], a[5], a[6]};
        }
        for (std::size_t i = 0; i < n_; ++i)
            if (state_.status[i] == AgentStatus::NonCooperative)
                p_buf_[i] = orbit_position(state_.orbit[i], t);
        for (std::size_t i = 0; i < n_; ++i) src_buf_[i] = outer(phat_buf_[i]);

        centroid_estimator_derivative(phat_buf_, p_buf_, adj_, dphat_buf_);
        covariance_estimator_derivative(chat_buf_, src_buf_, adj_, dchat_buf_);

        const double inv_ff = 1.0 / (sc_.cfg.eps_f * sc_.cfg.eps_s);
        const double inv_s = 1.0 / sc_.cfg.eps_s;
        const DispersionTarget& target = sc_.cfg.target;
        for (std::size_t i = 0; i < n_; ++i) {
            double* d = &dy[i * kStrideDistributed];
            if (state_.status[i] == AgentStatus::Dead) {
                d[0] = d[1] = d[2] = d[3] = d[4] = d[5] = d[6] = 0.0;
                continue;
            }
            Vec2 v;
            if (state_.status[i] == AgentStatus::NonCooperative) {
                v = orbit_velocity(state_.orbit[i], t);
            } else {
                const Sym2 believed = src_buf_[i] - chat_buf_[i];
                const EigenBasis2 basis = eig_sym2(believed, &state_.agent_basis[i]);
                const double e1 = basis.lambda1 - target.lambda1_star;
                const double e2 = basis.lambda2 - target.lambda2_star;
                const Vec2& z = phat_buf_[i];
                v = -(e1 * dot(z, basis.v1) * basis.v1 + e2 * dot(z, basis.v2) * basis.v2);
            }
            d[0] = v.x;
            d[1] = v.y;
            d[2] = dphat_buf_[i].x * inv_ff;
            d[3] = dphat_buf_[i].y * inv_ff;
            d[4] = dchat_buf_[i].c1 * inv_s;
            d[5] = dchat_buf_[i].c2 * inv_s;
            d[6] = dchat_buf_[i].c3 * inv_s;
        }
    }

    // Complete-information law: exact covariance of the alive swarm, frozen
    // (or per-step) eigenbasis, spectral errors from quadratic forms.
    void deriv_centralized(double t, std::vector<double>& y, std::vector<double>& dy) {
        std::vector<std::uint32_t> alive;
        std::vector<Vec2> alive_pos;
        for (std::size_t i = 0; i < n_; ++i) {
            if (state_.status[i] == AgentStatus::NonCooperative)
                alive_pos.push_back(orbit_position(state_.orbit[i], t));
            else if (state_.status[i] == AgentStatus::Dead)
                continue;
            else
                alive_pos.push_back({y[2 * i], y[2 * i + 1]});
            if (state_.status[i] != AgentStatus::Dead)
                alive.push_back(static_cast<std::uint32_t>(i));
        }
        const CloudStats stats = covariance(alive_pos);

        CentralizedControlInput in;
        if (sc_.cfg.centralized_basis == BasisMode::Frozen) {
            in.basis = frozen_basis_;
            in.error.e1 = dot(in.basis.v1, stats.covariance.apply(in.basis.v1)) -
                          sc_.cfg.target.lambda1_star;
            in.error.e2 = dot(in.basis.v2, stats.covariance.apply(in.basis.v2)) -
                          sc_.cfg.target.lambda2_star;
        } else {
            auto [err, basis] = dispersion_error(stats.covariance, sc_.cfg.target, &true_basis_);
            in.basis = basis;
            in.error = err;
        }
        in.barycentric.resize(alive_pos.size());
        for (std::size_t k = 0; k < alive_pos.size(); ++k)
            in.barycentric[k] = alive_pos[k] - stats.centroid;
        const std::vector<Vec2> u = centralized_velocities(in);

        for (double& v : dy) v = 0.0;
        for (std::size_t k = 0; k < alive.size(); ++k) {
            const std::uint32_t i = alive[k];
            const Vec2 v = state_.status[i] == AgentStatus::NonCooperative
                               ? orbit_velocity(state_.orbit[i], t)
                               : u[k];
            dy[2 * i] = v.x;
            dy[2 * i + 1] = v.y;
        }
    }

    void commit_bases() {
        if (sc_.cfg.mode != RunMode::Distributed) return;
        for (std::size_t i = 0; i < n_; ++i) {
            if (state_.status[i] == AgentStatus::Dead) continue;
            const Sym2 believed = recovered_covariance(state_.estimator, i);
            state_.agent_basis[i] = eig_sym2(believed, &state_.agent_basis[i]);
        }
    }

    void apply_kill(const std::vector<std::uint32_t>& victims) {
        std::vector<char> dying(n_, 0);
        for (std::uint32_t v : victims) dying[v] = 1;

        if (sc_.cfg.on_death == DeathHandling::Absorb &&
            sc_.cfg.mode == RunMode::Distributed) {
            // hand each victim's estimator mass to its surviving neighbors,
            // so the alive-sum (and thus the recovered covariance) stays
            // unbiased after the death
            for (std::uint32_t v : victims) {
                std::vector<std::uint32_t> heirs;
                for (std::uint32_t j : adj_[v])
                    if (!dying[j] && state_.status[j] != AgentStatus::Dead)
                        heirs.push_back(j);
                if (heirs.empty()) {
                    warnings_.push_back("agent " + std::to_string(v + 1) +
                                        " died with no surviving neighbor; its estimator "
                                        "mass is lost");
                    continue;
                }
                const double share = 1.0 / static_cast<double>(heirs.size());
                for (std::uint32_t j : heirs) {
                    state_.estimator.p_hat[j] += state_.estimator.p_hat[v] * share;
                    state_.estimator.c_hat[j] += state_.estimator.c_hat[v] * share;
                }
            }
        }
        for (std::uint32_t v : victims) state_.status[v] = AgentStatus::Dead;
        for (std::size_t i = 0; i < n_; ++i) {
            auto& nb = adj_[i];
            if (state_.status[i] == AgentStatus::Dead) {
                nb.clear();
                continue;
            }
            std::erase_if(nb, [&](std::uint32_t j) {
                return state_.status[j] == AgentStatus::Dead;
            });
        }
        ++segment_;
        reset_conservation_baseline();
        if (sc_.cfg.mode == RunMode::Centralized) {
            // restart the frozen basis from the surviving cloud
            std::vector<Vec2> alive_pos;
            for (std::size_t i = 0; i < n_; ++i)
                if (state_.status[i] != AgentStatus::Dead)
                    alive_pos.push_back(state_.positions[i]);
            frozen_basis_ = eig_sym2(covariance(alive_pos).covariance, &true_basis_);
        }
    }

    void reset_conservation_baseline() {
        baseline_p_ = Vec2{};
        baseline_c_ = Sym2{};
        for (std::size_t i = 0; i < n_; ++i) {
            if (state_.status[i] == AgentStatus::Dead) continue;
            baseline_p_ += state_.estimator.p_hat[i];
            baseline_c_ += state_.estimator.c_hat[i];
        }
    }

    ResolvedScenario sc_;
    std::size_t n_;
    Rk4 rk4_;
    std::vector<double> y_;
    SwarmState state_;
    AdjacencyList adj_;
    EigenBasis2 basis0_, true_basis_, frozen_basis_;
    int segment_ = 0;
    Vec2 baseline_p_;
    Sym2 baseline_c_;
    std::vector<double> last_err_y_, last_err_d_;
    std::vector<Vec2> last_phat_;
    std::vector<std::string> warnings_;

    std::vector<Vec2> p_buf_, phat_buf_, dphat_buf_;
    std::vector<Sym2> chat_buf_, src_buf_, dchat_buf_;
};

inline TrajectoryLog run(const ScenarioConfig& cfg) {
    Simulator sim(resolve(cfg));
    return sim.run();
}

}  // namespace dfc

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfc/dispersion.hpp"
#include "dfc/graph.hpp"
#include "dfc/rng.hpp"
#include "dfc/vec2.hpp"

namespace dfc {

enum class RunMode { Centralized, Distributed };

// Centralized mode can run on the frozen initial eigenbasis (the default;
// the basis is invariant along the flow) or recompute it every step with
// sign continuity, for robustness experiments.
enum class BasisMode { Frozen, PerStep };

// What happens to the estimator mass of agents that die. Absorb moves a
// dead agent's estimator state onto its surviving neighbors, keeping the
// zero-sum condition intact; Keep freezes it in place, which leaves a
// permanent offset in the surviving sums.
enum class DeathHandling { Absorb, Keep };

struct InitialDistribution {
    bool use_explicit = false;
    std::vector<Vec2> positions;  // when use_explicit
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
};

struct GraphSpec {
    enum class Type { Geometric, Edges } type = Type::Geometric;
    double radius = 1.0;                  // geometric
    std::optional<std::uint64_t> seed;    // geometric: independent layout seed
    std::vector<Edge> edges;              // explicit, 0-based
};

struct Event {
    enum class Kind { Kill, SetNonCooperative } kind = Kind::Kill;
    double time = 0.0;
    std::vector<std::uint32_t> agents;  // kill victims, 0-based
    std::uint32_t agent = 0;            // orbiter, 0-based
    double omega = 0.0;                 // rad/s
    std::optional<double> radius;       // defaults to distance from origin
};

struct ScenarioConfig {
    std::size_t n_agents = 0;
    std::uint64_t seed = 1;
    InitialDistribution initial;
    std::optional<GraphSpec> graph;
    DispersionTarget target;
    double eps_f = 0.1;
    double eps_s = 0.25;
    std::optional<double> step_h;  // default: from the stability bound
    double duration = 10.0;
    RunMode mode = RunMode::Distributed;
    long log_every = 10;
    std::vector<Event> events;
    BasisMode centralized_basis = BasisMode::Frozen;
    DeathHandling on_death = DeathHandling::Absorb;
};

struct ScheduledEvent {
    long step = 0;
    Event event;
};

// Everything run() needs, derived deterministically from the config.
struct ResolvedScenario {
    ScenarioConfig cfg;  // with step_h filled in
    std::vector<Vec2> positions0;
    std::optional<Graph> graph;
    std::optional<SpectralSummary> spectrum;
    double geometric_radius = 0.0;  // radius that produced the graph, if geometric
    double h = 0.0;
    long n_steps = 0;
    double stability_bound = 0.0;  // distributed mode step-size bound
    std::vector<ScheduledEvent> schedule;
};

namespace detail {

inline std::vector<Vec2> draw_rectangle(std::size_t n, const InitialDistribution& d,
                                        std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec2> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i].x = rng.uniform(d.xmin, d.xmax);
        p[i].y = rng.uniform(d.ymin, d.ymax);
    }
    return p;
}

[[noreturn]] inline void config_error(const std::string& what) {
    throw std::invalid_argument("scenario config: " + what);
}

}  // namespace detail

inline ResolvedScenario resolve(const ScenarioConfig& cfg) {
    if (cfg.n_agents < 2) detail::config_error("n_agents must be at least 2");
    if (!(cfg.eps_f > 0.0)) detail::config_error("eps_f must be positive");
    if (!(cfg.eps_s > 0.0)) detail::config_error("eps_s must be positive");
    if (cfg.duration < 0.0) detail::config_error("duration must be nonnegative");
    if (cfg.log_every < 1) detail::config_error("log_every must be at least 1");
    if (cfg.target.lambda2_star < 0.0 ||
        cfg.target.lambda1_star < cfg.target.lambda2_star)
        detail::config_error("target must satisfy lambda1 >= lambda2 >= 0");
    if (cfg.step_h && !(*cfg.step_h > 0.0)) detail::config_error("step_h must be positive");

    ResolvedScenario r;
    r.cfg = cfg;

    // initial positions
    if (cfg.initial.use_explicit) {
        if (cfg.initial.positions.size() != cfg.n_agents)
            detail::config_error("explicit positions must list n_agents entries");
        r.positions0 = cfg.initial.positions;
    } else {
        if (!(cfg.initial.xmax > cfg.initial.xmin) || !(cfg.initial.ymax > cfg.initial.ymin))
            detail::config_error("initial rectangle is empty");
        r.positions0 = detail::draw_rectangle(cfg.n_agents, cfg.initial, cfg.seed);
    }

    // interaction graph
    if (cfg.mode == RunMode::Distributed && !cfg.graph)
        detail::config_error("distributed mode requires a graph");
    if (cfg.graph) {
        const GraphSpec& gs = *cfg.graph;
        if (gs.type == GraphSpec::Type::Edges) {
            r.graph.emplace(cfg.n_agents, gs.edges);
        } else {
            std::vector<Vec2> layout = r.positions0;
            if (gs.seed && *gs.seed != cfg.seed) {
                if (cfg.initial.use_explicit)
                    detail::config_error("graph seed needs a rectangle initial distribution");
                layout = detail::draw_rectangle(cfg.n_agents, cfg.initial, *gs.seed);
            }
            GeometricGraphResult gg = geometric_graph(layout, gs.radius);
            r.geometric_radius = gg.radius;
            r.graph.emplace(std::move(gg.graph));
        }
        if (!is_connected(*r.graph)) detail::config_error("graph must be connected");
        r.spectrum = spectral_summary(*r.graph);
    }

    // step size: the fastest dynamics is the centroid consensus scaled by
    // 1/(eps_f*eps_s), so an explicit scheme needs h within a multiple of
    // eps_f*eps_s/lambda_max(L)
    if (cfg.mode == RunMode::Distributed) {
        const double lambda_max = r.spectrum->laplacian_eigenvalues.back();
        r.stability_bound = 0.5 * cfg.eps_f * cfg.eps_s / std::max(lambda_max, 1e-12);
        r.h = cfg.step_h.value_or(r.stability_bound);
        if (r.h > r.stability_bound * (1.0 + 1e-12))
            detail::config_error("step_h violates the stability bound h <= 0.5*eps_f*eps_s/lambda_max(L) = " +
                                 std::to_string(r.stability_bound));
    } else {
        r.stability_bound = 0.0;
        r.h = cfg.step_h.value_or(1e-3);
    }
    r.cfg.step_h = r.h;
    r.n_steps = static_cast<long>(std::ceil(cfg.duration / r.h - 1e-9));
    if (r.n_steps < 0) r.n_steps = 0;

    // events: map times to step boundaries and validate
    std::vector<char> dead(cfg.n_agents, 0);
    std::vector<char> orbiting(cfg.n_agents, 0);
    std::vector<ScheduledEvent> schedule;
    std::vector<Event> events = cfg.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    std::vector<std::uint32_t> cumulative_victims;
    for (const Event& ev : events) {
        if (ev.time < 0.0) detail::config_error("event time must be nonnegative");
        if (ev.time > cfg.duration + 1e-12)
            detail::config_error("event at t=" + std::to_string(ev.time) +
                                 " is unreachable (after duration)");
        long step = static_cast<long>(std::ceil(ev.time / r.h - 1e-9));
        step = std::min(step, r.n_steps);
        if (ev.kind == Event::Kind::Kill) {
            if (ev.agents.empty()) detail::config_error("kill event lists no agents");
            for (std::uint32_t a : ev.agents) {
                if (a >= cfg.n_agents) detail::config_error("kill event agent out of range");
                if (dead[a]) detail::config_error("agent killed twice");
                dead[a] = 1;
                cumulative_victims.push_back(a);
            }
            if (cfg.n_agents - static_cast<std::size_t>(
                                    std::count(dead.begin(), dead.end(), 1)) < 2)
                detail::config_error("kill events must leave at least two agents alive");
            if (r.graph) {
                const VertexRemoval surv = remove_vertices(*r.graph, cumulative_victims);
                if (!is_connected(surv.graph))
                    detail::config_error("kill event at t=" + std::to_string(ev.time) +
                                         " disconnects the graph");
            }
        } else {
            if (ev.agent >= cfg.n_agents) detail::config_error("orbit event agent out of range");
            if (dead[ev.agent]) detail::config_error("orbit event targets a dead agent");
            if (orbiting[ev.agent]) detail::config_error("agent set non-cooperative twice");
            if (ev.radius && !(*ev.radius > 0.0))
                detail::config_error("orbit radius must be positive");
            orbiting[ev.agent] = 1;
        }
        schedule.push_back({step, ev});
    }
    std::stable_sort(schedule.begin(), schedule.end(),
                     [](const ScheduledEvent& a, const ScheduledEvent& b) {
                         return a.step < b.step;
                     });
    r.schedule = std::move(schedule);
    return r;
}

}  // namespace dfc

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfc/scenario.hpp"

namespace dfc {

inline constexpr const char* kArtifactVersion = "0.1.0";

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void key_error(const std::string& what) {
    throw std::invalid_argument("scenario config: " + what);
}

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (!ok) key_error("unknown key '" + item.key() + "' in " + where);
    }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) key_error("missing required key '" + std::string(key) + "' in " + where);
    return *it;
}

inline double as_number(const json& v, const std::string& what) {
    if (!v.is_number()) key_error(what + " must be a number");
    return v.get<double>();
}

inline std::uint64_t as_uint(const json& v, const std::string& what) {
    if (!v.is_number_integer() || v.get<double>() < 0)
        key_error(what + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

// 1-based in files, 0-based internally
inline std::uint32_t as_agent_index(const json& v, std::size_t n, const std::string& what) {
    const std::uint64_t raw = as_uint(v, what);
    if (raw < 1 || raw > n) key_error(what + " out of range [1, " + std::to_string(n) + "]");
    return static_cast<std::uint32_t>(raw - 1);
}

}  // namespace detail

// Parse and fully validate a scenario document (JSON object). Unknown keys
// are rejected; defaults are filled in; the step-size bound and kill-event
// connectivity are checked before this returns.
inline ScenarioConfig parse_config(const std::string& text) {
    using detail::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        detail::key_error(std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) detail::key_error("top level must be an object");
    detail::reject_unknown(root, "top level",
                           {"n_agents", "seed", "initial", "graph", "target", "eps_f",
                            "eps_s", "step_h", "duration", "mode", "log_every", "events",
                            "centralized_basis", "on_death"});

    ScenarioConfig cfg;
    cfg.n_agents = detail::as_uint(detail::require(root, "n_agents", "top level"), "n_agents");
    if (root.contains("seed")) cfg.seed = detail::as_uint(root["seed"], "seed");

    {
        const json& ini = detail::require(root, "initial", "top level");
        const std::string type =
            detail::require(ini, "type", "initial").get<std::string>();
        if (type == "uniform_rect") {
            detail::reject_unknown(ini, "initial", {"type", "xmin", "xmax", "ymin", "ymax"});
            cfg.initial.use_explicit = false;
            cfg.initial.xmin = detail::as_number(detail::require(ini, "xmin", "initial"), "xmin");
            cfg.initial.xmax = detail::as_number(detail::require(ini, "xmax", "initial"), "xmax");
            cfg.initial.ymin = detail::as_number(detail::require(ini, "ymin", "initial"), "ymin");
            cfg.initial.ymax = detail::as_number(detail::require(ini, "ymax", "initial"), "ymax");
        } else if (type == "explicit") {
            detail::reject_unknown(ini, "initial", {"type", "positions"});
            cfg.initial.use_explicit = true;
            const json& pos = detail::require(ini, "positions", "initial");
            if (!pos.is_array()) detail::key_error("initial.positions must be an array");
            for (const json& p : pos) {
                if (!p.is_array() || p.size() != 2)
                    detail::key_error("initial.positions entries must be [x, y]");
                cfg.initial.positions.push_back(
                    {detail::as_number(p[0], "position x"), detail::as_number(p[1], "position y")});
            }
        } else {
            detail::key_error("initial.type must be 'uniform_rect' or 'explicit'");
        }
    }

    if (root.contains("graph")) {
        const json& g = root["graph"];
        GraphSpec gs;
        const std::string type = detail::require(g, "type", "graph").get<std::string>();
        if (type == "geometric") {
            detail::reject_unknown(g, "graph", {"type", "radius", "seed"});
            gs.type = GraphSpec::Type::Geometric;
            gs.radius = detail::as_number(detail::require(g, "radius", "graph"), "graph.radius");
            if (g.contains("seed")) gs.seed = detail::as_uint(g["seed"], "graph.seed");
        } else if (type == "edges") {
            detail::reject_unknown(g, "graph", {"type", "edges"});
            gs.type = GraphSpec::Type::Edges;
            const json& edges = detail::require(g, "edges", "graph");
            if (!edges.is_array()) detail::key_error("graph.edges must be an array");
            for (const json& e : edges) {
                if (!e.is_array() || e.size() != 2)
                    detail::key_error("graph.edges entries must be [i, j]");
                gs.edges.push_back({detail::as_agent_index(e[0], cfg.n_agents, "graph edge endpoint"),
                                    detail::as_agent_index(e[1], cfg.n_agents, "graph edge endpoint")});
            }
        } else {
            detail::key_error("graph.type must be 'geometric' or 'edges'");
        }
        cfg.graph = std::move(gs);
    }

    {
        const json& tgt = detail::require(root, "target", "top level");
        detail::reject_unknown(tgt, "target", {"lambda1", "lambda2"});
        cfg.target.lambda1_star =
            detail::as_number(detail::require(tgt, "lambda1", "target"), "target.lambda1");
        cfg.target.lambda2_star =
            detail::as_number(detail::require(tgt, "lambda2", "target"), "target.lambda2");
    }

    if (root.contains("eps_f")) cfg.eps_f = detail::as_number(root["eps_f"], "eps_f");
    if (root.contains("eps_s")) cfg.eps_s = detail::as_number(root["eps_s"], "eps_s");
    if (root.contains("step_h")) cfg.step_h = detail::as_number(root["step_h"], "step_h");
    if (root.contains("duration")) cfg.duration = detail::as_number(root["duration"], "duration");
    if (root.contains("log_every")) {
        cfg.log_every = static_cast<long>(detail::as_uint(root["log_every"], "log_every"));
    }

    {
        const std::string mode = detail::require(root, "mode", "top level").get<std::string>();
        if (mode == "centralized") cfg.mode = RunMode::Centralized;
        else if (mode == "distributed") cfg.mode = RunMode::Distributed;
        else detail::key_error("mode must be 'centralized' or 'distributed'");
    }
    if (root.contains("centralized_basis")) {
        const std::string b = root["centralized_basis"].get<std::string>();
        if (b == "frozen") cfg.centralized_basis = BasisMode::Frozen;
        else if (b == "per_step") cfg.centralized_basis = BasisMode::PerStep;
        else detail::key_error("centralized_basis must be 'frozen' or 'per_step'");
    }
    if (root.contains("on_death")) {
        const std::string d = root["on_death"].get<std::string>();
        if (d == "absorb") cfg.on_death = DeathHandling::Absorb;
        else if (d == "keep") cfg.on_death = DeathHandling::Keep;
        else detail::key_error("on_death must be 'absorb' or 'keep'");
    }

    if (root.contains("events")) {
        const json& events = root["events"];
        if (!events.is_array()) detail::key_error("events must be an array");
        for (const json& e : events) {
            Event ev;
            ev.time = detail::as_number(detail::require(e, "time", "event"), "event.time");
            const std::string kind = detail::require(e, "kind", "event").get<std::string>();
            if (kind == "kill") {
                detail::reject_unknown(e, "kill event", {"time", "kind", "agents"});
                ev.kind = Event::Kind::Kill;
                const json& agents = detail::require(e, "agents", "kill event");
                if (!agents.is_array()) detail::key_error("kill event agents must be an array");
                for (const json& a : agents)
                    ev.agents.push_back(detail::as_agent_index(a, cfg.n_agents, "kill agent"));
            } else if (kind == "set_non_cooperative") {
                detail::reject_unknown(e, "orbit event", {"time", "kind", "agent", "omega", "radius"});
                ev.kind = Event::Kind::SetNonCooperative;
                ev.agent = detail::as_agent_index(detail::require(e, "agent", "orbit event"),
                                                  cfg.n_agents, "orbit agent");
                ev.omega = detail::as_number(detail::require(e, "omega", "orbit event"),
                                             "orbit omega");
                if (e.contains("radius"))
                    ev.radius = detail::as_number(e["radius"], "orbit radius");
            } else {
                detail::key_error("event.kind must be 'kill' or 'set_non_cooperative'");
            }
            cfg.events.push_back(std::move(ev));
        }
    }

    // resolve() performs the numeric validation (step bound, connectivity,
    // unreachable events) and pins the default step size
    const ResolvedScenario rs = resolve(cfg);
    cfg.step_h = rs.h;
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// FNV-1a over the canonical (sorted-key, whitespace-free) JSON text.
inline std::string canonical_config_hash(const std::string& text) {
    const std::string canon = detail::json::parse(text).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace dfc

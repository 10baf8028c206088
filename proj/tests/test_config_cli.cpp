#include "catch_amalgamated.hpp"

#include <fstream>
#include <sstream>

#include "dfc/config.hpp"
#include "dfc/csv.hpp"
#include "dfc/sim.hpp"
#include "dfc/verify.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

std::string scenario_path(const char* name) {
    return std::string(DFC_SCENARIO_DIR) + "/" + name;
}

const char* kMinimalCentralized = R"({
  "n_agents": 8,
  "initial": {"type": "uniform_rect", "xmin": -3, "xmax": 3, "ymin": -1, "ymax": 1},
  "target": {"lambda1": 10.0, "lambda2": 4.0},
  "mode": "centralized"
})";

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
    const dfc::ScenarioConfig cfg = dfc::parse_config(kMinimalCentralized);
    CHECK(cfg.n_agents == 8);
    CHECK(cfg.seed == 1);
    CHECK(cfg.eps_f == 0.1);
    CHECK(cfg.eps_s == 0.25);
    CHECK(cfg.duration == 10.0);
    CHECK(cfg.log_every == 10);
    REQUIRE(cfg.step_h.has_value());
    CHECK(*cfg.step_h == 1e-3);
    CHECK(cfg.mode == dfc::RunMode::Centralized);
}

TEST_CASE("validation errors name the offending key") {
    std::string bad = kMinimalCentralized;
    bad.insert(bad.rfind('}'), ", \"eps_s\": 0");
    CHECK_THROWS_WITH(dfc::parse_config(bad), ContainsSubstring("eps_s must be positive"));

    std::string unknown = kMinimalCentralized;
    unknown.insert(unknown.rfind('}'), ", \"step\": 0.1");
    CHECK_THROWS_WITH(dfc::parse_config(unknown), ContainsSubstring("unknown key 'step'"));

    CHECK_THROWS_WITH(dfc::parse_config(R"({"n_agents": 4})"),
                      ContainsSubstring("missing required key 'initial'"));

    std::string one_agent = kMinimalCentralized;
    one_agent.replace(one_agent.find("8"), 1, "1");
    CHECK_THROWS_WITH(dfc::parse_config(one_agent), ContainsSubstring("n_agents"));
}

TEST_CASE("distributed configs validate the graph and the step bound") {
    const char* text = R"({
      "n_agents": 4,
      "initial": {"type": "explicit", "positions": [[0,0],[1,0],[2,0],[3,0]]},
      "graph": {"type": "edges", "edges": [[1,2],[2,3],[3,4]]},
      "target": {"lambda1": 2.0, "lambda2": 0.5},
      "mode": "distributed",
      "step_h": 0.5
    })";
    CHECK_THROWS_WITH(dfc::parse_config(text), ContainsSubstring("stability bound"));

    const char* disconnect = R"({
      "n_agents": 4,
      "initial": {"type": "explicit", "positions": [[0,0],[1,0],[2,0],[3,0]]},
      "graph": {"type": "edges", "edges": [[1,2],[2,3],[3,4]]},
      "target": {"lambda1": 2.0, "lambda2": 0.5},
      "mode": "distributed",
      "events": [{"time": 0.5, "kind": "kill", "agents": [2]}]
    })";
    CHECK_THROWS_WITH(dfc::parse_config(disconnect), ContainsSubstring("disconnects"));

    const char* late = R"({
      "n_agents": 4,
      "initial": {"type": "explicit", "positions": [[0,0],[1,0],[2,0],[3,0]]},
      "graph": {"type": "edges", "edges": [[1,2],[2,3],[3,4]]},
      "target": {"lambda1": 2.0, "lambda2": 0.5},
      "mode": "distributed",
      "duration": 1.0,
      "events": [{"time": 5.0, "kind": "kill", "agents": [2]}]
    })";
    CHECK_THROWS_WITH(dfc::parse_config(late), ContainsSubstring("unreachable"));
}

TEST_CASE("bundled reference scenarios parse to the published constants") {
    const dfc::ScenarioConfig fig2 = dfc::load_config(scenario_path("fig2.cfg"));
    CHECK(fig2.n_agents == 70);
    CHECK(fig2.target.lambda1_star == 10.0);
    CHECK(fig2.target.lambda2_star == 4.0);
    CHECK(fig2.eps_f == 0.1);
    CHECK(fig2.eps_s == 0.25);
    CHECK(fig2.mode == dfc::RunMode::Distributed);
    CHECK(fig2.initial.xmin == -3.0);
    CHECK(fig2.initial.xmax == 3.0);
    CHECK(fig2.initial.ymin == -1.0);
    CHECK(fig2.initial.ymax == 1.0);

    const dfc::ScenarioConfig fig3 = dfc::load_config(scenario_path("fig3.cfg"));
    int orbiters = 0;
    std::vector<double> omegas;
    for (const dfc::Event& e : fig3.events)
        if (e.kind == dfc::Event::Kind::SetNonCooperative) {
            ++orbiters;
            omegas.push_back(e.omega);
        }
    REQUIRE(orbiters == 4);
    const double pi = 3.14159265358979323846;
    std::sort(omegas.begin(), omegas.end());
    CHECK_THAT(omegas[0], Catch::Matchers::WithinRel(pi, 1e-12));
    CHECK_THAT(omegas[1], Catch::Matchers::WithinRel(4.0 * pi / 3.0, 1e-12));
    CHECK_THAT(omegas[2], Catch::Matchers::WithinRel(2.0 * pi, 1e-12));
    CHECK_THAT(omegas[3], Catch::Matchers::WithinRel(4.0 * pi, 1e-12));

    const dfc::ScenarioConfig kills = dfc::load_config(scenario_path("fig2_kills.cfg"));
    int killed = 0;
    for (const dfc::Event& e : kills.events)
        if (e.kind == dfc::Event::Kind::Kill) killed += static_cast<int>(e.agents.size());
    CHECK(killed == 15);
}

TEST_CASE("metrics csv round-trips bit-exactly") {
    dfc::ScenarioConfig cfg = dfc::parse_config(kMinimalCentralized);
    cfg.duration = 0.5;
    const dfc::TrajectoryLog log = dfc::run(cfg);

    std::ostringstream out;
    dfc::write_metrics_csv(log, out);
    const std::string first = out.str();

    std::istringstream in(first);
    const std::vector<dfc::MetricsRow> rows = dfc::read_metrics_csv(in);
    REQUIRE(rows.size() == log.frames.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].t == log.frames[i].t);
        CHECK(rows[i].e_norm == log.frames[i].e_norm);
        CHECK(rows[i].true_lam1 == log.frames[i].true_lam1);
        CHECK(rows[i].centroid_x == log.frames[i].centroid.x);
    }

    // writing the parsed rows again reproduces the bytes
    dfc::TrajectoryLog echo = log;
    std::ostringstream out2;
    dfc::write_metrics_csv(echo, out2);
    CHECK(out2.str() == first);
}

TEST_CASE("identical runs produce identical csv bytes") {
    dfc::ScenarioConfig cfg = dfc::parse_config(kMinimalCentralized);
    cfg.duration = 0.5;
    std::ostringstream a, b, am, bm;
    {
        const dfc::TrajectoryLog log = dfc::run(cfg);
        dfc::write_trajectory_csv(log, a);
        dfc::write_metrics_csv(log, am);
    }
    {
        const dfc::TrajectoryLog log = dfc::run(cfg);
        dfc::write_trajectory_csv(log, b);
        dfc::write_metrics_csv(log, bm);
    }
    CHECK(a.str() == b.str());
    CHECK(am.str() == bm.str());
}

TEST_CASE("config hash is canonical") {
    const std::string spaced = R"({ "a": 1,    "b": [1, 2] })";
    const std::string tight = R"({"b":[1,2],"a":1})";
    CHECK(dfc::canonical_config_hash(spaced) == dfc::canonical_config_hash(tight));
    CHECK(dfc::canonical_config_hash(spaced) !=
          dfc::canonical_config_hash(R"({"a":2,"b":[1,2]})"));
}

TEST_CASE("verify flags an excluded-set start instead of failing") {
    // a perfectly collinear cloud has a zero eigenvalue; target expects 4
    const char* text = R"({
      "n_agents": 4,
      "initial": {"type": "explicit", "positions": [[0,0],[1,0],[2,0],[3,0]]},
      "target": {"lambda1": 10.0, "lambda2": 4.0},
      "mode": "centralized",
      "duration": 0.5
    })";
    const dfc::VerifyReport rep = dfc::verify_scenario(dfc::parse_config(text));
    bool flagged = false;
    for (const std::string& n : rep.notes)
        if (n.find("excluded set") != std::string::npos) flagged = true;
    CHECK(flagged);
}

TEST_CASE("verify runs the fixed-point checks on the static scenario") {
    const dfc::ScenarioConfig cfg =
        dfc::load_config(scenario_path("static_estimators.cfg"));
    // the cross cloud has covariance diag(2, 1), so the error starts at zero
    const dfc::VerifyReport rep = dfc::verify_scenario(cfg);
    bool saw_fixed_point = false;
    for (const dfc::CheckResult& c : rep.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
        if (c.name == "estimator fixed point") saw_fixed_point = true;
    }
    CHECK(saw_fixed_point);
}

TEST_CASE("geometric graph can be laid out from its own seed") {
    const char* with_seed = R"({
      "n_agents": 30,
      "seed": 3,
      "initial": {"type": "uniform_rect", "xmin": -3, "xmax": 3, "ymin": -1, "ymax": 1},
      "graph": {"type": "geometric", "radius": 1.3, "seed": 77},
      "target": {"lambda1": 4.0, "lambda2": 2.0},
      "mode": "distributed",
      "duration": 0.0
    })";
    const dfc::ScenarioConfig a = dfc::parse_config(with_seed);
    std::string without_seed = with_seed;
    const auto pos = without_seed.find(", \"seed\": 77");
    without_seed.erase(pos, std::string(", \"seed\": 77").size());
    const dfc::ScenarioConfig b = dfc::parse_config(without_seed);
    const dfc::ResolvedScenario ra = dfc::resolve(a), rb = dfc::resolve(b);
    // same agent cloud, different interaction topology
    CHECK(ra.positions0[0].x == rb.positions0[0].x);
    const auto& ea = ra.graph->edges();
    const auto& eb = rb.graph->edges();
    bool same = ea.size() == eb.size();
    for (std::size_t i = 0; same && i < ea.size(); ++i)
        same = ea[i].tail == eb[i].tail && ea[i].head == eb[i].head;
    CHECK_FALSE(same);

    const char* bad = R"({
      "n_agents": 3,
      "initial": {"type": "explicit", "positions": [[0,0],[1,0],[0,1]]},
      "graph": {"type": "geometric", "radius": 2.0, "seed": 9},
      "target": {"lambda1": 1.0, "lambda2": 0.5},
      "mode": "distributed",
      "duration": 0.0
    })";
    CHECK_THROWS_WITH(dfc::parse_config(bad),
                      ContainsSubstring("graph seed needs a rectangle"));
}

TEST_CASE("verify passes a healthy centralized scenario") {
    dfc::ScenarioConfig cfg = dfc::parse_config(kMinimalCentralized);
    cfg.duration = 4.0;
    const dfc::VerifyReport rep = dfc::verify_scenario(cfg);
    for (const dfc::CheckResult& c : rep.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}

#include <algorithm>
#include <sstream>
#include <string>

#include "doctest.h"
#include "zb/error.hpp"
#include "zb/scenario.hpp"

using namespace zb;

namespace {

std::string cfg_path(const std::string& name) { return std::string(ZB_SOURCE_DIR) + "/configs/" + name; }

Json hand_json() { return read_json_file(cfg_path("hand_1d.json")); }

// Expects parse_config to throw with a message containing `what`.
void rejects(const Json& j, const std::string& what)
{
    try {
        parse_config(j);
        FAIL("accepted: " << what);
    } catch (const InvalidInput& e) {
        CHECK_MESSAGE(std::string(e.what()).find(what) != std::string::npos, e.what());
    }
}

} // namespace

TEST_CASE("config validation names the offending field")
{
    Json j = hand_json();
    j["extra"] = 1;
    rejects(j, "config /extra: unknown field");

    j = hand_json();
    j.erase("system");
    rejects(j, "config /: missing field 'system'");

    j = hand_json();
    j["sets"]["X0"]["lower"][0] = -2;
    rejects(j, "/sets/X0: must lie inside /domains/Zx");

    j = hand_json();
    j["sets"]["Xu"]["upper"] = Json::array({1, 2});
    rejects(j, "/sets/Xu");

    j = hand_json();
    j["barrier"]["multiplier_degree"] = 3;
    rejects(j, "/barrier/multiplier_degree: must be even");

    j = hand_json();
    j["barrier"]["epsilon"] = 0;
    rejects(j, "/barrier/epsilon");

    j = hand_json();
    j["mode"] = "sideways";
    rejects(j, "/mode");

    j = hand_json();
    j["system"]["A"] = Json::array({Json::array({1, 0})});
    rejects(j, "/system/A");

    j = hand_json();
    j["data"]["length"] = 0;
    rejects(j, "/data/length");

    j = hand_json();
    j["solver"] = Json{{"max_iterations", 0}};
    rejects(j, "/solver");

    j = hand_json();
    j["checks"]["samples"] = "many";
    rejects(j, "/checks/samples");
}

TEST_CASE("config echo is complete and round-trips")
{
    const ScenarioConfig cfg = parse_config(hand_json());
    const Json echo = config_to_json(cfg);
    CHECK(echo["reach"]["max_generators"] == 5);
    CHECK(echo["checks"]["seed"] == 7);
    CHECK(echo["barrier"]["multiplier_degree"].is_null());
    CHECK(echo["solver"].contains("primal_tol"));
    CHECK(config_to_json(parse_config(echo)).dump() == echo.dump());

    for (const char* name : {"2d_nominal.json", "2d_robust.json", "5d_nominal.json", "5d_robust.json", "hand_2d.json"}) {
        const Json e = config_to_json(load_config(cfg_path(name)));
        CHECK_MESSAGE(config_to_json(parse_config(e)).dump() == e.dump(), name);
    }
}

TEST_CASE("noise-free identification is a singleton at the truth")
{
    const ScenarioConfig cfg = load_config(cfg_path("hand_2d.json"));
    const DataSet ds = generate_data(cfg);
    CHECK(ds.T() == cfg.data.length);
    const ModelSet ms = identify_model(cfg, ds);
    CHECK(ms.mz.num_generators() == 0);
    CHECK((ms.A_c - cfg.system.A).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((ms.B_c - cfg.system.B).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(generate_data(cfg).X_minus == ds.X_minus);
}

TEST_CASE("hand scenario runs end to end and reports deterministically")
{
    const ScenarioConfig cfg = load_config(cfg_path("hand_1d.json"));
    RunOptions ro;
    ro.deterministic = true;
    const RunResult a = run_scenario(cfg, ro);
    CHECK(a.exit_code == exit_ok);
    CHECK(a.report["certificate"]["sound"] == true);
    CHECK(a.report["checks"]["model_set"]["pass"] == true);
    CHECK(a.report["checks"]["true_dynamics"]["pass"] == true);
    CHECK(a.report["checks"]["safety_monte_carlo"]["safe"] == true);
    CHECK_FALSE(a.report.contains("timings"));
    CHECK(a.report["config"].dump() == config_to_json(cfg).dump());

    ro.threads = 3;
    CHECK(dump_report(run_scenario(cfg, ro).report) == dump_report(a.report));

    ro.deterministic = false;
    CHECK(run_scenario(cfg, ro).report.contains("timings"));
}

TEST_CASE("hand candidates through check_candidate")
{
    const ScenarioConfig cfg = load_config(cfg_path("hand_1d.json"));
    const ModelSet ms = identify_model(cfg, generate_data(cfg));
    auto load_b = [](const char* name) {
        return polynomial_from_json(read_json_file(cfg_path(name))["barrier"], 1, name);
    };
    CHECK_FALSE(check_candidate(cfg, ms, load_b("hand_1d_pass_certificate.json"), 0.01, 1).violation);
    const CheckSummary fail = check_candidate(cfg, ms, load_b("hand_1d_fail_certificate.json"), 0.01, 1);
    REQUIRE(fail.violation);
    const Json& v = fail.json["model_set"]["violation"];
    CHECK(v["condition"] == "decrease");
    CHECK(v["margin"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("robust mode beyond the cap is refused with a size diagnostic")
{
    const ScenarioConfig cfg = load_config(cfg_path("5d_robust.json"));
    RunOptions ro;
    ro.deterministic = true;
    const RunResult r = run_scenario(cfg, ro);
    CHECK(r.exit_code == exit_no_certificate);
    CHECK(r.report["synthesis"]["refused"] == true);
    CHECK(r.report["synthesis"]["largest_basis"].get<double>() > cfg.barrier.basis_cap);
    CHECK(r.report["synthesis"]["diagnostic"].get<std::string>().find("decrease: 41 variables") != std::string::npos);
    CHECK(r.report["solver"].is_null());
}

TEST_CASE("plot grid")
{
    const ScenarioConfig cfg = load_config(cfg_path("hand_2d.json"));
    RunOptions ro;
    ro.deterministic = true;
    const RunResult r = run_scenario(cfg, ro);
    REQUIRE(r.exit_code == exit_ok);
    const Polynomial B = polynomial_from_json(r.report["certificate"]["barrier"], 2, "B");

    const PlotGrid pg = plot_grid(r.report, 200, 1, 2);
    CHECK(pg.rows == 40000);
    CHECK(std::count(pg.grid_csv.begin(), pg.grid_csv.end(), '\n') == 40001);
    CHECK(pg.grid_csv.rfind("x1,x2,B\n", 0) == 0);
    CHECK(std::count(pg.sets_csv.begin(), pg.sets_csv.end(), '\n') == 9);
    CHECK(B.eval(cfg.sets.X0.center()) <= 0.0);

    // The zero level set crosses the segment from the X0 center to the Xu center.
    bool neg = false, pos = false;
    std::istringstream in(pg.grid_csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        double a = 0, b = 0, v = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        ls >> a >> c1 >> b >> c2 >> v;
        if (std::abs(a - b) > 1e-12) continue;  // diagonal of the grid
        if (cfg.sets.X0.contains(Eigen::Vector2d(a, b))) neg = neg || v <= 0;
        if (cfg.sets.Xu.contains(Eigen::Vector2d(a, b))) pos = pos || v > 0;
    }
    CHECK(neg);
    CHECK(pos);

    CHECK(plot_grid(r.report, 3, 2, 1).rows == 9);
    CHECK_THROWS_AS(plot_grid(r.report, 200, 1, 3), InvalidInput);
    CHECK_THROWS_AS(plot_grid(r.report, 200, 1, 1), InvalidInput);
    CHECK_THROWS_AS(plot_grid(r.report, 1, 1, 2), InvalidInput);
    Json no_cert = r.report;
    no_cert["certificate"] = nullptr;
    CHECK_THROWS_WITH_AS(plot_grid(no_cert, 200, 1, 2), "report has no certificate", InvalidInput);

    // A 5D report with a placeholder certificate: pair (1,7) is out of range.
    Json five;
    five["config"] = config_to_json(load_config(cfg_path("5d_nominal.json")));
    five["certificate"] = Json{{"barrier", to_json(Polynomial::constant(5, -1.0))}};
    CHECK(plot_grid(five, 2, 1, 5).rows == 4);
    CHECK_THROWS_WITH_AS(plot_grid(five, 200, 1, 7), "state pair (1,7) is invalid for a 5-state report", InvalidInput);
}

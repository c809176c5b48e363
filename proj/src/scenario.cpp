#include "zb/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include "zb/error.hpp"
#include "zb/random.hpp"

namespace zb {

namespace {

InvalidInput bad(const std::string& where, const std::string& what)
{
    return InvalidInput("config " + (where.empty() ? std::string("/") : where) + ": " + what);
}

// Rejects keys outside `allowed` so that typos do not silently fall back to defaults.
void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw bad(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) throw bad(where + "/" + key, "unknown field");
}

const Json& need(const Json& j, const char* key, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end()) throw bad(where, std::string("missing field '") + key + "'");
    return *it;
}

template <class T>
T integer(const Json& j, const char* key, const std::string& where, T fallback, T min_value)
{
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    const std::string w = where + "/" + key;
    if (!it->is_number_integer()) throw bad(w, "expected an integer");
    if (it->is_number_unsigned()) {
        const auto v = it->get<std::uint64_t>();
        if (static_cast<long double>(v) < static_cast<long double>(min_value)) throw bad(w, "must be >= " + std::to_string(min_value));
        return static_cast<T>(v);
    }
    const auto v = it->get<long long>();
    if (v < static_cast<long long>(min_value)) throw bad(w, "must be >= " + std::to_string(min_value));
    return static_cast<T>(v);
}

double real(const Json& j, const char* key, const std::string& where, double fallback)
{
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw bad(where + "/" + key, "expected a number");
    return it->get<double>();
}

// JSON readers from json_io report their own path; prefix it with "config".
template <class F>
auto read(F f) -> decltype(f())
{
    try {
        return f();
    } catch (const DimensionError& e) {
        throw InvalidInput(std::string("config ") + e.what());
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        if (msg.rfind("config ", 0) == 0) throw;
        throw InvalidInput("config " + msg);
    }
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* asymmetry_note =
    "synthesis imposes the decrease condition on all of Zx (box encoding); the checkers test it on Zx minus Xu";

} // namespace

ScenarioConfig parse_config(const Json& j)
{
    only_keys(j, "", {"name", "system", "domains", "sets", "data", "mode", "barrier", "solver", "reach", "checks"});
    ScenarioConfig cfg;
    if (auto it = j.find("name"); it != j.end()) {
        if (!it->is_string()) throw bad("/name", "expected a string");
        cfg.name = it->get<std::string>();
    }

    const Json& sys = need(j, "system", "");
    only_keys(sys, "/system", {"A", "B", "noise"});
    cfg.system.A = read([&] { return matrix_from_json(need(sys, "A", "/system"), "/system/A"); });
    cfg.system.B = read([&] { return matrix_from_json(need(sys, "B", "/system"), "/system/B"); });
    const Json& noise = need(sys, "noise", "/system");
    if (noise.is_object() && noise.contains("center"))
        cfg.system.noise = read([&] { return zonotope_from_json(noise, "/system/noise"); });
    else
        cfg.system.noise = read([&] { return box_from_json(noise, "/system/noise"); }).to_zonotope();
    const Eigen::Index nx = cfg.system.A.rows();
    if (nx == 0 || cfg.system.A.cols() != nx) throw bad("/system/A", "must be a nonempty square matrix");
    if (cfg.system.B.rows() != nx || cfg.system.B.cols() == 0) throw bad("/system/B", "must have n_x rows and >= 1 column");
    if (cfg.system.noise.dim() != nx) throw bad("/system/noise", "dimension differs from n_x");
    try {
        cfg.system.validate();
    } catch (const std::exception& e) {
        throw bad("/system/noise", e.what());
    }
    const Eigen::Index nu = cfg.system.B.cols();

    const Json& dom = need(j, "domains", "");
    only_keys(dom, "/domains", {"Zx", "Zu"});
    cfg.sets.Zx = read([&] { return box_from_json(need(dom, "Zx", "/domains"), "/domains/Zx"); });
    cfg.sets.Zu = read([&] { return box_from_json(need(dom, "Zu", "/domains"), "/domains/Zu"); });
    const Json& sets = need(j, "sets", "");
    only_keys(sets, "/sets", {"X0", "Xu"});
    cfg.sets.X0 = read([&] { return box_from_json(need(sets, "X0", "/sets"), "/sets/X0"); });
    cfg.sets.Xu = read([&] { return box_from_json(need(sets, "Xu", "/sets"), "/sets/Xu"); });
    if (cfg.sets.Zx.dim() != nx) throw bad("/domains/Zx", "dimension differs from n_x");
    if (cfg.sets.Zu.dim() != nu) throw bad("/domains/Zu", "dimension differs from n_u");
    if (cfg.sets.X0.dim() != nx) throw bad("/sets/X0", "dimension differs from n_x");
    if (cfg.sets.Xu.dim() != nx) throw bad("/sets/Xu", "dimension differs from n_x");
    if (!cfg.sets.Zx.contains(cfg.sets.X0)) throw bad("/sets/X0", "must lie inside /domains/Zx");
    if (!cfg.sets.Zx.contains(cfg.sets.Xu)) throw bad("/sets/Xu", "must lie inside /domains/Zx");

    if (auto it = j.find("data"); it != j.end()) {
        only_keys(*it, "/data", {"trajectories", "length", "seed"});
        cfg.data.trajectories = integer(*it, "trajectories", "/data", cfg.data.trajectories, 1);
        cfg.data.length = integer(*it, "length", "/data", cfg.data.length, 1);
        cfg.data.seed = integer<std::uint64_t>(*it, "seed", "/data", cfg.data.seed, 0);
    }
    if (auto it = j.find("mode"); it != j.end()) {
        const std::string m = it->is_string() ? it->get<std::string>() : "";
        if (m == "nominal") cfg.mode = SynthesisMode::nominal;
        else if (m == "robust") cfg.mode = SynthesisMode::robust;
        else throw bad("/mode", "expected \"nominal\" or \"robust\"");
    }
    if (auto it = j.find("barrier"); it != j.end()) {
        only_keys(*it, "/barrier", {"degree", "epsilon", "multiplier_degree", "basis_cap", "trim_basis"});
        cfg.barrier.degree = integer(*it, "degree", "/barrier", cfg.barrier.degree, 1);
        cfg.barrier.epsilon = real(*it, "epsilon", "/barrier", cfg.barrier.epsilon);
        if (!(cfg.barrier.epsilon > 0)) throw bad("/barrier/epsilon", "must be positive");
        if (auto md = it->find("multiplier_degree"); md != it->end() && !md->is_null()) {
            const int k = integer(*it, "multiplier_degree", "/barrier", 0, 0);
            if (k % 2) throw bad("/barrier/multiplier_degree", "must be even");
            cfg.barrier.multiplier_degree = k;
        }
        cfg.barrier.basis_cap = integer<std::size_t>(*it, "basis_cap", "/barrier", cfg.barrier.basis_cap, 1);
        if (auto tb = it->find("trim_basis"); tb != it->end()) {
            if (!tb->is_boolean()) throw bad("/barrier/trim_basis", "expected true or false");
            cfg.barrier.trim_basis = tb->get<bool>();
        }
    }
    if (auto it = j.find("solver"); it != j.end()) {
        if (!it->is_object()) throw bad("/solver", "expected an object");
        std::map<std::string, std::string> kv;
        for (const auto& [key, value] : it->items()) {
            if (value.is_string()) kv[key] = value.get<std::string>();
            else if (value.is_boolean()) kv[key] = value.get<bool>() ? "true" : "false";
            else if (value.is_number_integer()) kv[key] = std::to_string(value.get<long long>());
            else if (value.is_number()) kv[key] = fmt(value.get<double>());
            else throw bad("/solver/" + key, "expected a number, boolean or string");
        }
        try {
            cfg.solver = SolverOptions::from_key_values(kv);
        } catch (const InvalidInput& e) {
            throw bad("/solver", e.what());
        }
    }
    if (auto it = j.find("reach"); it != j.end()) {
        only_keys(*it, "/reach", {"horizon", "max_generators"});
        cfg.reach.horizon = integer(*it, "horizon", "/reach", cfg.reach.horizon, 0);
        cfg.reach.max_generators = integer(*it, "max_generators", "/reach", cfg.reach.max_generators, 0);
    }
    if (cfg.reach.max_generators == 0) cfg.reach.max_generators = static_cast<int>(5 * nx);
    if (cfg.reach.max_generators < nx) throw bad("/reach/max_generators", "must be >= n_x");
    if (auto it = j.find("checks"); it != j.end()) {
        only_keys(*it, "/checks",
                  {"samples", "seed", "interval_depth", "max_interval_cells", "safety_horizon", "safety_trials", "safety_seed"});
        auto& c = cfg.checks;
        c.samples = integer(*it, "samples", "/checks", c.samples, 0L);
        c.seed = integer<std::uint64_t>(*it, "seed", "/checks", c.seed, 0);
        c.interval_depth = integer(*it, "interval_depth", "/checks", c.interval_depth, 0);
        c.max_interval_cells = integer(*it, "max_interval_cells", "/checks", c.max_interval_cells, 1L);
        c.safety_horizon = integer(*it, "safety_horizon", "/checks", c.safety_horizon, 0);
        c.safety_trials = integer(*it, "safety_trials", "/checks", c.safety_trials, 0L);
        c.safety_seed = integer<std::uint64_t>(*it, "safety_seed", "/checks", c.safety_seed, 0);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

Json config_to_json(const ScenarioConfig& cfg)
{
    Json solver = Json::object();
    for (const auto& [k, v] : cfg.solver.to_key_values()) solver[k] = v;
    return Json{
        {"name", cfg.name},
        {"system", {{"A", to_json(cfg.system.A)}, {"B", to_json(cfg.system.B)}, {"noise", to_json(cfg.system.noise)}}},
        {"domains", {{"Zx", to_json(cfg.sets.Zx)}, {"Zu", to_json(cfg.sets.Zu)}}},
        {"sets", {{"X0", to_json(cfg.sets.X0)}, {"Xu", to_json(cfg.sets.Xu)}}},
        {"data", {{"trajectories", cfg.data.trajectories}, {"length", cfg.data.length}, {"seed", cfg.data.seed}}},
        {"mode", to_string(cfg.mode)},
        {"barrier",
         {{"degree", cfg.barrier.degree},
          {"epsilon", cfg.barrier.epsilon},
          {"multiplier_degree", cfg.barrier.multiplier_degree ? Json(*cfg.barrier.multiplier_degree) : Json(nullptr)},
          {"basis_cap", cfg.barrier.basis_cap},
          {"trim_basis", cfg.barrier.trim_basis}}},
        {"solver", solver},
        {"reach", {{"horizon", cfg.reach.horizon}, {"max_generators", cfg.reach.max_generators}}},
        {"checks",
         {{"samples", cfg.checks.samples},
          {"seed", cfg.checks.seed},
          {"interval_depth", cfg.checks.interval_depth},
          {"max_interval_cells", cfg.checks.max_interval_cells},
          {"safety_horizon", cfg.checks.safety_horizon},
          {"safety_trials", cfg.checks.safety_trials},
          {"safety_seed", cfg.checks.safety_seed}}},
    };
}

DataSet generate_data(const ScenarioConfig& cfg)
{
    std::vector<Trajectory> trajs;
    for (int i = 0; i < cfg.data.trajectories; ++i) {
        Rng rng = substream(cfg.data.seed, static_cast<std::uint64_t>(i));
        const Eigen::VectorXd x0 = uniform_vector(rng, cfg.sets.X0.lower(), cfg.sets.X0.upper());
        Eigen::MatrixXd u(cfg.sets.Zu.dim(), cfg.data.length);
        for (int k = 0; k < cfg.data.length; ++k) u.col(k) = uniform_vector(rng, cfg.sets.Zu.lower(), cfg.sets.Zu.upper());
        const std::uint64_t noise_seed = rng();
        trajs.push_back(simulate(cfg.system, x0, u, noise_seed));
    }
    return assemble(trajs, cfg.data.seed);
}

ModelSet identify_model(const ScenarioConfig& cfg, const DataSet& ds)
{
    return identify(ds, cfg.system.noise, cfg.sets.Zx, cfg.sets.Zu);
}

SynthesisProblem assemble_problem(const ScenarioConfig& cfg, const ModelSet& ms)
{
    if (cfg.mode == SynthesisMode::nominal) return assemble_nominal(ms, cfg.sets, cfg.barrier);
    return assemble_robust(ms.interval, cfg.sets, interval_hull(cfg.system.noise), cfg.barrier);
}

Json violation_json(const Violation& v)
{
    Json j{{"condition", to_string(v.condition)}, {"margin", v.margin}, {"x", to_json_vector(v.x)}};
    if (v.u.size()) j["u"] = to_json_vector(v.u);
    if (v.d.size()) j["d"] = to_json_vector(v.d);
    if (v.AB.size()) j["AB"] = to_json(v.AB);
    return j;
}

namespace {

Json check_json(const CheckResult& r)
{
    return Json{{"pass", r.pass},
                {"evaluated", r.evaluated},
                {"violation", r.violation ? violation_json(*r.violation) : Json(nullptr)}};
}

} // namespace

CheckSummary check_candidate(const ScenarioConfig& cfg, const ModelSet& ms, const Polynomial& B, double epsilon,
                             int threads)
{
    CheckSummary out;
    CheckOptions co;
    co.samples = cfg.checks.samples;
    co.seed = cfg.checks.seed;
    co.threads = threads;

    CheckResult model;
    if (cfg.mode == SynthesisMode::nominal) {
        model = check_sampling(B, epsilon, ms, cfg.sets, co);
        out.json["model_set"] = check_json(model);
        out.json["model_set"]["condition_form"] = "A_c x + B_c u + d, d in Z_d";
    } else {
        model = check_interval_model(B, epsilon, ms.interval, cfg.system.noise, cfg.sets, co);
        out.json["model_set"] = check_json(model);
        out.json["model_set"]["condition_form"] = "A x + B u + w, [A B] in the interval matrix, w in Z_w";
    }
    co.seed = cfg.checks.seed + 1;
    const CheckResult truth = check_true_dynamics(B, epsilon, cfg.system, cfg.sets, co);
    out.json["true_dynamics"] = check_json(truth);
    out.violation = !model.pass || !truth.pass;

    const double cells = std::pow(2.0, static_cast<double>(cfg.checks.interval_depth) * static_cast<double>(ms.n_x()));
    if (cfg.mode != SynthesisMode::nominal) {
        out.json["interval_bound"] = Json{{"skipped", "the interval bound covers the nominal condition form only"}};
    } else if (cells > static_cast<double>(cfg.checks.max_interval_cells)) {
        out.json["interval_bound"] = Json{{"skipped", "grid of " + fmt(cells) + " cells exceeds max_interval_cells"}};
    } else {
        const auto iv = check_interval_bound(B, epsilon, ms, cfg.sets, cfg.checks.interval_depth);
        Json conds = Json::array();
        for (const auto& c : iv.conditions)
            conds.push_back(Json{{"condition", to_string(c.condition)},
                                 {"cells", c.cells},
                                 {"proven", c.proven},
                                 {"unknown", c.unknown},
                                 {"unknown_volume_fraction", c.unknown_volume_fraction}});
        out.json["interval_bound"] = Json{{"depth", cfg.checks.interval_depth},
                                          {"verdict", to_string(iv.verdict)},
                                          {"conditions", conds},
                                          {"violation", iv.violation ? violation_json(*iv.violation) : Json(nullptr)}};
        if (iv.verdict == IntervalVerdict::violation) out.violation = true;
    }

    const auto safety = safety_monte_carlo(cfg.system, cfg.sets.X0, cfg.sets.Xu, uniform_policy(cfg.sets.Zu),
                                           cfg.checks.safety_horizon, cfg.checks.safety_trials, cfg.checks.safety_seed,
                                           cfg.sets.Zx);
    Json prefix = Json::array();
    for (Eigen::Index k = 0; k < safety.prefix.cols(); ++k) prefix.push_back(to_json_vector(safety.prefix.col(k)));
    out.json["safety_monte_carlo"] = Json{{"safe", safety.safe},
                                          {"trials", safety.trials},
                                          {"horizon", cfg.checks.safety_horizon},
                                          {"unsafe_trials", safety.unsafe_trials},
                                          {"first_unsafe_trial", safety.first_unsafe_trial},
                                          {"prefix", prefix},
                                          {"left_domain", safety.left_domain}};
    if (!safety.safe) out.violation = true;
    return out;
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt)
{
    using clock = std::chrono::steady_clock;
    RunResult rr;
    Json& rep = rr.report;
    Json timings = Json::object();
    rep["tool"] = tool_version;
    rep["config"] = config_to_json(cfg);
    rep["notes"] = Json::array({asymmetry_note});

    auto t0 = clock::now();
    const DataSet ds = generate_data(cfg);
    const RankReport rank = check_rank(ds);
    rep["data"] = Json{{"T", ds.T()},
                       {"trajectories", cfg.data.trajectories},
                       {"rank", rank.rank},
                       {"full_row_rank", rank.full_row_rank},
                       {"singular_values", to_json_vector(rank.singular_values)}};
    const ModelSet ms = identify_model(cfg, ds);
    Eigen::MatrixXd truth(ms.n_x(), ms.n_x() + ms.n_u());
    truth << cfg.system.A, cfg.system.B;
    const MembershipResult contains = contains_matrix(ms.mz, truth);
    const Box dhull = interval_hull(ms.disturbance);
    rep["model_set"] = Json{{"generators", ms.mz.num_generators()},
                            {"A_c", to_json(ms.A_c)},
                            {"B_c", to_json(ms.B_c)},
                            {"interval_A", to_json(ms.interval_A())},
                            {"interval_B", to_json(ms.interval_B())},
                            {"interval_width_max", ms.interval.width().maxCoeff()},
                            {"disturbance_hull", to_json(dhull)},
                            {"disturbance_generators", ms.disturbance.num_generators()},
                            {"contains_truth", contains.verdict == Membership::inside ? "inside"
                                               : contains.verdict == Membership::outside ? "outside" : "indeterminate"}};
    timings["identify"] = seconds_since(t0);

    if (cfg.reach.horizon > 0) {
        t0 = clock::now();
        const auto seq = reach_horizon(ms, cfg.sets.X0.to_zonotope(), cfg.sets.Zu.to_zonotope(), cfg.system.noise,
                                       cfg.reach.horizon, cfg.reach.max_generators);
        Json steps = Json::array();
        bool hits = false;
        for (std::size_t k = 0; k < seq.sets.size(); ++k) {
            const Box h = interval_hull(seq.sets[k]);
            const bool meets = h.intersects(cfg.sets.Xu);
            hits = hits || meets;
            steps.push_back(Json{{"step", k},
                                 {"lower", to_json_vector(h.lower())},
                                 {"upper", to_json_vector(h.upper())},
                                 {"generators", seq.generator_counts[k]},
                                 {"hull_meets_unsafe", meets}});
        }
        rep["reach"] = Json{{"horizon", cfg.reach.horizon},
                            {"max_generators", cfg.reach.max_generators},
                            {"reductions", seq.reductions.size()},
                            {"any_hull_meets_unsafe", hits},
                            {"steps", steps}};
        timings["reach"] = seconds_since(t0);
    }

    t0 = clock::now();
    const SynthesisProblem sp = assemble_problem(cfg, ms);
    Json sizes = Json::array();
    for (const auto& c : sp.size.constraints)
        sizes.push_back(Json{{"name", c.name},
                             {"variables", c.num_vars},
                             {"target_degree", c.target_degree},
                             {"multiplier_degree", c.multiplier_degree},
                             {"gram_half_degree", c.gram_degree},
                             {"basis_size", c.basis_size},
                             {"rows", c.rows},
                             {"multipliers", c.num_multipliers},
                             {"multiplier_basis_size", c.multiplier_basis_size}});
    rep["synthesis"] = Json{{"mode", to_string(sp.mode)},
                            {"epsilon", sp.epsilon},
                            {"barrier_degree", sp.barrier.degree},
                            {"barrier_coefficients", sp.barrier.basis.size()},
                            {"quantified_variables", sp.quantified_variables},
                            {"variable_names", sp.variable_names},
                            {"constraints", sizes},
                            {"total_rows", sp.size.total_rows},
                            {"largest_basis", sp.size.largest_basis},
                            {"refused", sp.refused},
                            {"diagnostic", sp.diagnostic}};
    timings["assemble"] = seconds_since(t0);

    auto finish = [&](int code, const std::string& summary) {
        rr.exit_code = code;
        rep["outcome"] = Json{{"exit_code", code}, {"summary", summary}};
        if (!opt.deterministic) rep["timings"] = timings;
        return rr;
    };

    rep["certificate"] = nullptr;
    rep["checks"] = nullptr;
    if (sp.refused) {
        rep["solver"] = nullptr;
        return finish(exit_no_certificate, "refused: " + sp.diagnostic);
    }
    if (!opt.export_sdpa.empty()) export_sdpa(sp.lowered.sdp, opt.export_sdpa);

    t0 = clock::now();
    const SdpSolution sol = solve(sp.lowered.sdp, cfg.solver);
    timings["solve"] = seconds_since(t0);
    Json blocks = Json::array();
    for (const auto& b : sp.lowered.sdp.blocks)
        blocks.push_back(Json{{"size", b.size}, {"kind", b.kind == ConeKind::psd ? "psd" : "nonneg"}});
    rep["solver"] = solver_stats_json(sol);
    rep["solver"]["constraints"] = sp.lowered.sdp.num_constraints();
    rep["solver"]["blocks"] = blocks;
    if (sol.status != SdpStatus::feasible && sol.status != SdpStatus::optimal)
        return finish(exit_no_certificate, "no certificate: solver status " + to_string(sol.status));

    const Certificate cert = extract_certificate(sp, sol);
    Json res = Json::array();
    for (const auto& r : cert.residuals)
        res.push_back(Json{{"name", r.name}, {"residual", r.residual}, {"min_eigenvalue", r.min_eigenvalue}});
    rep["certificate"] = Json{{"barrier", to_json(cert.barrier)},
                              {"num_vars", cert.barrier.num_vars()},
                              {"epsilon", cert.epsilon},
                              {"max_residual", cert.max_residual},
                              {"min_eigenvalue", cert.min_eigenvalue},
                              {"residuals", res},
                              {"sound", cert.sound},
                              {"message", cert.message}};
    if (!cert.sound) return finish(exit_no_certificate, cert.message);

    t0 = clock::now();
    const CheckSummary checks = check_candidate(cfg, ms, cert.barrier, cert.epsilon, opt.threads);
    rep["checks"] = checks.json;
    timings["check"] = seconds_since(t0);
    if (checks.violation) return finish(exit_violation, "certificate found but a checker reported a violation");
    return finish(exit_ok, "certificate found and all checks pass");
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

PlotGrid plot_grid(const Json& report, int resolution, int i, int j)
{
    if (!report.contains("config")) throw InvalidInput("report has no config section");
    const ScenarioConfig cfg = parse_config(report["config"]);
    const auto it = report.find("certificate");
    if (it == report.end() || it->is_null()) throw InvalidInput("report has no certificate");
    const int nx = static_cast<int>(cfg.sets.Zx.dim());
    if (i < 1 || j < 1 || i > nx || j > nx || i == j)
        throw InvalidInput("state pair (" + std::to_string(i) + "," + std::to_string(j) + ") is invalid for a " +
                           std::to_string(nx) + "-state report");
    if (resolution < 2) throw InvalidInput("resolution must be >= 2");
    const Polynomial B = polynomial_from_json((*it)["barrier"], static_cast<std::size_t>(nx), "/certificate/barrier");
    const int a = i - 1, b = j - 1;

    PlotGrid pg;
    std::ostringstream g;
    g << 'x' << i << ",x" << j << ",B\n";
    Eigen::VectorXd x = cfg.sets.X0.center();
    const auto& lo = cfg.sets.Zx.lower();
    const auto& hi = cfg.sets.Zx.upper();
    for (int r = 0; r < resolution; ++r) {
        x[a] = lo[a] + (hi[a] - lo[a]) * r / (resolution - 1);
        for (int c = 0; c < resolution; ++c) {
            x[b] = lo[b] + (hi[b] - lo[b]) * c / (resolution - 1);
            g << fmt(x[a]) << ',' << fmt(x[b]) << ',' << fmt(B.eval(x)) << '\n';
            ++pg.rows;
        }
    }
    pg.grid_csv = g.str();

    std::ostringstream s;
    s << "set,x" << i << ",x" << j << '\n';
    for (const auto& [name, box] : {std::pair<const char*, const Box*>{"X0", &cfg.sets.X0}, {"Xu", &cfg.sets.Xu}})
        for (int k = 0; k < 4; ++k)
            s << name << ',' << fmt(k & 1 ? box->upper()[a] : box->lower()[a]) << ','
              << fmt(k & 2 ? box->upper()[b] : box->lower()[b]) << '\n';
    pg.sets_csv = s.str();
    return pg;
}

} // namespace zb

// zbarrier: data-driven barrier certificate pipeline.
//
//   zbarrier run      --config cfg.json [--mode M] [--degree K] [--epsilon V] [--seed N]
//                     [--export-sdpa PATH] [--deterministic] [--out report.json]
//   zbarrier identify --config cfg.json [--seed N] [--data DIR] [--save-data DIR] [--out model.json]
//   zbarrier reach    --config cfg.json [--model model.json] [--horizon N] [--out hulls.csv]
//   zbarrier check    --config cfg.json --certificate cert.json [--model model.json] [--mode M] [--out verdicts.json]
//   zbarrier plotgrid --report report.json [--resolution R] [--pair i,j] [--out grid.csv]
//
// ZBARRIER_THREADS sets the number of sampling threads (default 1).

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "zb/error.hpp"
#include "zb/scenario.hpp"

using namespace zb;

namespace {

int env_threads()
{
    const char* s = std::getenv("ZBARRIER_THREADS");
    if (!s || !*s) return 1;
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (*end != '\0' || v < 1 || v > 256) throw InvalidInput("ZBARRIER_THREADS must be an integer in [1, 256]");
    return static_cast<int>(v);
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") std::cout << text;
    else write_text_file(path, text);
}

struct Overrides {
    std::string mode;
    int degree = 0;
    double epsilon = 0.0;
    std::optional<std::uint64_t> seed;
};

ScenarioConfig load_with(const std::string& path, const Overrides& o)
{
    Json j = read_json_file(path);
    if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
    if (!o.mode.empty()) j["mode"] = o.mode;
    if (o.degree > 0) j["barrier"]["degree"] = o.degree;
    if (o.epsilon > 0) j["barrier"]["epsilon"] = o.epsilon;
    if (o.seed) j["data"]["seed"] = *o.seed;
    return parse_config(j);
}

ModelSet model_for(const ScenarioConfig& cfg, const std::string& model_path)
{
    if (!model_path.empty()) return model_set_from_json(read_json_file(model_path), model_path);
    return identify_model(cfg, generate_data(cfg));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Data-driven safety verification with zonotopes and barrier certificates"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    Overrides ov;
    std::string config, out, export_sdpa, model_path, cert_path, report_path, data_dir, save_data, pair = "1,2";
    bool deterministic = false;
    int horizon = -1, resolution = 200;
    std::uint64_t seed_value = 0;

    auto add_common = [&](CLI::App* sub, bool synthesis) {
        sub->add_option("--config", config, "scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output path (default stdout)");
        if (synthesis) {
            sub->add_option("--mode", ov.mode, "nominal or robust")->check(CLI::IsMember({"nominal", "robust"}));
            sub->add_option("--degree", ov.degree, "barrier degree")->check(CLI::PositiveNumber);
            sub->add_option("--epsilon", ov.epsilon, "unsafe-set margin")->check(CLI::PositiveNumber);
        }
        sub->add_option("--seed", seed_value, "data generation seed");
    };

    auto* run = app.add_subcommand("run", "identify, synthesize and check a certificate");
    add_common(run, true);
    run->add_option("--export-sdpa", export_sdpa, "write the SDP in SDPA sparse format");
    run->add_flag("--deterministic", deterministic, "omit timings so reports are byte-identical");

    auto* ident = app.add_subcommand("identify", "identify the model set from simulated or stored data");
    add_common(ident, false);
    ident->add_option("--data", data_dir, "read the data set from this directory instead of simulating");
    ident->add_option("--save-data", save_data, "write the simulated data set to this directory");

    auto* reach = app.add_subcommand("reach", "reachable-set hulls as CSV");
    add_common(reach, false);
    reach->add_option("--model", model_path, "model set JSON (default: identify from the config)");
    reach->add_option("--horizon", horizon, "steps (default: config reach.horizon)")->check(CLI::NonNegativeNumber);

    auto* check = app.add_subcommand("check", "check a given certificate");
    add_common(check, false);
    check->add_option("--certificate", cert_path, "JSON with barrier terms, num_vars and epsilon")->required();
    check->add_option("--model", model_path, "model set JSON (default: identify from the config)");
    check->add_option("--mode", ov.mode, "nominal or robust")->check(CLI::IsMember({"nominal", "robust"}));

    auto* plot = app.add_subcommand("plotgrid", "grid of B values over a state pair");
    plot->add_option("--report", report_path, "report written by run")->required()->check(CLI::ExistingFile);
    plot->add_option("--resolution", resolution, "points per axis");
    plot->add_option("--pair", pair, "1-based state pair i,j");
    plot->add_option("--out", out, "grid CSV path; set corners go to <out>.sets.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;  // --help and --version exit 0
    }

    try {
        const int threads = env_threads();
        if (run->count("--seed") + ident->count("--seed") + reach->count("--seed") + check->count("--seed"))
            ov.seed = seed_value;

        if (*run) {
            const ScenarioConfig cfg = load_with(config, ov);
            RunOptions ro;
            ro.deterministic = deterministic;
            ro.export_sdpa = export_sdpa;
            ro.threads = threads;
            const RunResult rr = run_scenario(cfg, ro);
            emit(out, dump_report(rr.report));
            const std::string summary = rr.report["outcome"]["summary"].get<std::string>();
            if (rr.exit_code == exit_violation)
                std::cerr << "zbarrier: CHECKER VIOLATION on a solver-certified barrier: " << summary << '\n';
            else
                std::cerr << "zbarrier: " << summary << '\n';
            return rr.exit_code;
        }
        if (*ident) {
            const ScenarioConfig cfg = load_with(config, ov);
            const DataSet ds = data_dir.empty() ? generate_data(cfg) : read_dataset(data_dir);
            if (!save_data.empty()) write_dataset(ds, save_data);
            const ModelSet ms = identify_model(cfg, ds);
            emit(out, to_json(ms).dump(2) + "\n");
            return exit_ok;
        }
        if (*reach) {
            const ScenarioConfig cfg = load_with(config, ov);
            const ModelSet ms = model_for(cfg, model_path);
            const int n = horizon >= 0 ? horizon : cfg.reach.horizon;
            const auto seq = reach_horizon(ms, cfg.sets.X0.to_zonotope(), cfg.sets.Zu.to_zonotope(), cfg.system.noise,
                                           n, cfg.reach.max_generators);
            emit(out, seq.hulls_csv());
            return exit_ok;
        }
        if (*check) {
            const ScenarioConfig cfg = load_with(config, ov);
            const Json cj = read_json_file(cert_path);
            if (!cj.is_object() || !cj.contains("barrier") || !cj.contains("epsilon"))
                throw InvalidInput(cert_path + ": expected an object with barrier and epsilon");
            const std::size_t nv = static_cast<std::size_t>(cfg.sets.Zx.dim());
            const Polynomial B = polynomial_from_json(cj["barrier"], nv, cert_path + "/barrier");
            if (!cj["epsilon"].is_number()) throw InvalidInput(cert_path + "/epsilon: expected a number");
            const ModelSet ms = model_for(cfg, model_path);
            const CheckSummary cs = check_candidate(cfg, ms, B, cj["epsilon"].get<double>(), threads);
            Json rep{{"tool", tool_version}, {"config", config_to_json(cfg)}, {"checks", cs.json},
                     {"exit_code", cs.violation ? exit_violation : exit_ok}};
            emit(out, dump_report(rep));
            std::cerr << "zbarrier: " << (cs.violation ? "violation found" : "all checks pass") << '\n';
            return cs.violation ? exit_violation : exit_ok;
        }
        if (*plot) {
            const auto comma = pair.find(',');
            if (comma == std::string::npos) throw InvalidInput("--pair expects i,j");
            int i = 0, j = 0;
            try {
                i = std::stoi(pair.substr(0, comma));
                j = std::stoi(pair.substr(comma + 1));
            } catch (const std::exception&) {
                throw InvalidInput("--pair expects two integers i,j");
            }
            const PlotGrid pg = plot_grid(read_json_file(report_path), resolution, i, j);
            emit(out, pg.grid_csv);
            if (!out.empty() && out != "-") write_text_file(out + ".sets.csv", pg.sets_csv);
            return exit_ok;
        }
    } catch (const std::exception& e) {
        std::cerr << "zbarrier: error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

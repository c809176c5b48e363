#ifndef ZB_SCENARIO_HPP
#define ZB_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "zb/certify.hpp"
#include "zb/conic.hpp"
#include "zb/json_io.hpp"
#include "zb/reach.hpp"
#include "zb/sos.hpp"
#include "zb/sysid.hpp"

namespace zb {

inline constexpr const char* tool_version = "zbarrier 1.0.0";

struct DataConfig {
    int trajectories = 1;
    int length = 100;  ///< steps per trajectory
    std::uint64_t seed = 1;
};

struct ReachConfig {
    int horizon = 10;          ///< 0 skips reachability
    int max_generators = 0;    ///< 0 selects 5 n_x
};

struct CheckConfig {
    long samples = 100000;
    std::uint64_t seed = 7;
    /// Subdivisions 2^depth per state axis; skipped when the grid would
    /// exceed max_interval_cells.
    int interval_depth = 6;
    long max_interval_cells = 1000000;
    int safety_horizon = 100;
    long safety_trials = 10000;
    std::uint64_t safety_seed = 11;
};

struct ScenarioConfig {
    std::string name;
    TrueSystem system;  ///< used only to simulate data and for the truth checks
    ScenarioSets sets;
    DataConfig data;
    SynthesisMode mode = SynthesisMode::nominal;
    BarrierOptions barrier;
    SolverOptions solver;
    ReachConfig reach;
    CheckConfig checks;
};

/// Validates shapes, X0 and Xu inside Zx, and value ranges; errors name the
/// offending field.
ScenarioConfig parse_config(const Json& j);
ScenarioConfig load_config(const std::string& path);
/// Every field, defaults included.
Json config_to_json(const ScenarioConfig& cfg);

/// Trajectory i starts uniformly in X0 and is excited uniformly over Zu.
DataSet generate_data(const ScenarioConfig& cfg);
ModelSet identify_model(const ScenarioConfig& cfg, const DataSet& ds);
SynthesisProblem assemble_problem(const ScenarioConfig& cfg, const ModelSet& ms);

/// Exit codes of the pipeline.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_no_certificate = 2, exit_violation = 3 };

struct CheckSummary {
    Json json;
    bool violation = false;
};

/// All checkers on one candidate: the model-set (nominal) or interval-model
/// (robust) sampler, the true dynamics, the interval bound (nominal only)
/// and the Monte-Carlo safety run.
CheckSummary check_candidate(const ScenarioConfig& cfg, const ModelSet& ms, const Polynomial& B, double epsilon,
                             int threads);

struct RunOptions {
    bool deterministic = false;  ///< omit timings
    std::string export_sdpa;
    int threads = 1;
};

struct RunResult {
    Json report;
    int exit_code = exit_no_certificate;
};

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

/// Text form written by the CLI (two-space indent, trailing newline).
std::string dump_report(const Json& report);

Json violation_json(const Violation& v);

/// Grid of B over Zx for the state pair (i, j), other states at the X0
/// center. Returns the grid CSV (x_i,x_j,B) and the set-corner CSV.
struct PlotGrid {
    std::string grid_csv;
    std::string sets_csv;
    long rows = 0;
};
PlotGrid plot_grid(const Json& report, int resolution, int i, int j);

} // namespace zb

#endif

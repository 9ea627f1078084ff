#pragma once

// Experiment configuration, the budget x forecast x policy sweep, and the
// files it writes.

#include "prepaid/afg.hpp"
#include "prepaid/forecast.hpp"
#include "prepaid/milp.hpp"
#include "prepaid/model.hpp"
#include "prepaid/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prepaid {

enum class Policy
{
    AFG,
    DFM,
    OBM,
    BSL,
};

const char* to_string(Policy policy) noexcept;
std::optional<Policy> parse_policy(const std::string& text);

struct SyntheticSource
{
    std::uint64_t seed = 0;
    std::size_t days = 30;
    std::vector<LoadProfile> profiles;
};

struct DataSource
{
    std::filesystem::path csv;  ///< used when synthetic is empty
    std::optional<SyntheticSource> synthetic;
    /// Days in the CSV; counted from the file when absent.
    std::optional<std::size_t> csv_days;
};

enum class DfmBackend
{
    Grid,
    External,
};

struct DfmSettings
{
    DfmBackend backend = DfmBackend::Grid;
    std::string solver_cmd;
    std::size_t grid_resolution = 1;
    double candidate_cap = 1e7;
    std::optional<double> eps;
    std::optional<double> m;
    std::optional<double> M;
    double timeout_s = 600.0;
    std::optional<double> recharge_per_day;
};

struct ExperimentConfig
{
    DataSource data;
    std::size_t data_offset_days = 0;
    LoadSet loads;
    Tariff tariff;
    int step_minutes = 15;
    std::size_t horizon_days = 30;
    std::vector<double> budget_fractions;
    std::vector<std::string> regimes;  ///< labels, e.g. "imperfect-limited"
    std::uint64_t shuffle_seed = 0;
    std::vector<Policy> policies;
    DfmSettings dfm;
    std::size_t obm_node_limit = 5'000'000;
    std::filesystem::path output_dir = "results";
    /// Concurrent sweep cells (0 = hardware concurrency).
    std::size_t threads = 0;
    /// Concurrent external solver processes.
    std::size_t max_parallel_solvers = 1;
    bool write_traces = true;
};

/// Parses and validates a JSON config. Relative paths resolve against
/// `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Label -> spec; the shuffle seed is attached to imperfect regimes.
ForecastSpec regime_spec(const std::string& label, std::uint64_t shuffle_seed);

/// The experiment's true demand: the configured data window.
DemandSeries load_truth(const ExperimentConfig& config);

struct CellResult
{
    double fraction = 0.0;
    std::string regime;
    Policy policy = Policy::BSL;
    bool solved = true;
    std::string backend;  ///< "greedy", "grid", "external", "knapsack", "none"
    std::string note;
    Budget budget;
    SimResult sim;
    /// Policy's own objective on its forecast (DFM/OBM solvers, AFG plan).
    std::optional<double> model_objective;
    /// psf - BSL psf of the same fraction and regime, in percentage points.
    double improvement_pp = 0.0;
    double baseline_psf = 0.0;
    std::size_t baseline_disconnection_days = 0;
    std::optional<ThresholdPlan> plan;
    std::optional<BinaryMatrix> schedule;
};

struct ExperimentResults
{
    ExperimentConfig config;
    TimeGrid grid;
    std::vector<CellResult> cells;  ///< fraction-major, then regime, then policy
    std::vector<std::string> warnings;
    std::vector<std::string> excluded_loads;  ///< never demanded in the truth
};

ExperimentResults run_experiment(const ExperimentConfig& config);
ExperimentResults run_experiment(const ExperimentConfig& config, const DemandSeries& truth);

/// summary.csv, table2.csv, table3.csv, plotdata_*.csv and, if enabled,
/// traces/ and setpoints/. Throws Error on I/O failure.
void emit_outputs(const ExperimentResults& results, const std::filesystem::path& output_dir);

}  // namespace prepaid

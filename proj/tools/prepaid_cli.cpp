// prepaid: run rationing experiments, generate synthetic household data,
// and validate experiment configs.

#include "prepaid/errors.hpp"
#include "prepaid/experiment.hpp"
#include "prepaid/forecast.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

int run_command(const std::string& config_path,
                const std::string& out_dir,
                const std::string& solver_cmd,
                const std::optional<std::uint64_t>& seed,
                const std::optional<std::size_t>& threads)
{
    auto config = prepaid::load_config(config_path);
    if (!out_dir.empty())
        config.output_dir = out_dir;
    if (!solver_cmd.empty())
    {
        if (solver_cmd.find("{lp}") == std::string::npos || solver_cmd.find("{sol}") == std::string::npos)
            throw prepaid::ConfigError("--solver-cmd must contain {lp} and {sol}");
        config.dfm.backend = prepaid::DfmBackend::External;
        config.dfm.solver_cmd = solver_cmd;
    }
    if (seed)
        config.shuffle_seed = *seed;
    if (threads)
        config.threads = *threads;

    const auto results = prepaid::run_experiment(config);
    for (const auto& w : results.warnings)
        std::cerr << "warning: " << w << '\n';
    for (const auto& name : results.excluded_loads)
        std::cerr << "note: load '" << name << "' has no demand in the horizon and is left out of the PSF\n";
    prepaid::emit_outputs(results, config.output_dir);

    std::size_t unsolved = 0;
    for (const auto& c : results.cells)
        unsolved += c.solved ? 0 : 1;
    std::cout << results.cells.size() << " cells written to " << config.output_dir.string();
    if (unsolved)
        std::cout << " (" << unsolved << " unsolved)";
    std::cout << '\n';
    return 0;
}

int synth_command(std::uint64_t seed, std::size_t days, int step_minutes, const std::string& out)
{
    const auto loads = prepaid::default_household_loads();
    prepaid::TimeGrid grid;
    try
    {
        grid = prepaid::TimeGrid::from_step_minutes(step_minutes, days);
    }
    catch (const prepaid::InvalidArgument& e)
    {
        throw prepaid::ConfigError(e.what());
    }
    const auto demand = prepaid::synth_household(seed, loads, grid, prepaid::default_household_profiles());
    prepaid::write_demand_csv(out, demand, loads);
    std::cout << "wrote " << grid.total_steps() << " rows for " << loads.size() << " loads to " << out << '\n';
    return 0;
}

int validate_command(const std::string& config_path)
{
    const auto config = prepaid::load_config(config_path);
    const auto truth = prepaid::load_truth(config);
    std::cout << "config ok: " << config.loads.size() << " loads, " << truth.grid().num_days() << " days of "
              << truth.grid().steps_per_day() << " steps, "
              << config.budget_fractions.size() * config.regimes.size() * config.policies.size() << " cells\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Energy rationing policies for prepaid electricity customers"};
    app.require_subcommand(1);

    std::string config_path, out_dir, solver_cmd;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    auto* run = app.add_subcommand("run", "Run the budget x forecast x policy sweep of a config");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--solver-cmd", solver_cmd,
                    "External MILP solver command with {lp} and {sol} placeholders; selects the external DFM backend");
    run->add_option("--seed", seed, "Shuffle seed for imperfect forecasts (overrides shuffle_seed)");
    run->add_option("--threads", threads, "Concurrent sweep cells (0 = all cores)");

    std::uint64_t synth_seed = 0;
    std::size_t synth_days = 30;
    int synth_step = 15;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic four-load household CSV");
    synth->add_option("--seed", synth_seed, "Generator seed")->required();
    synth->add_option("--days", synth_days, "Number of days")->required()->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out, "Output CSV path")->required();
    synth->add_option("--step-minutes", synth_step, "Step length in minutes (must divide 1440)")
        ->capture_default_str();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config and its data without running");
    validate->add_option("--config", validate_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (*run)
            return run_command(config_path, out_dir, solver_cmd, seed, threads);
        if (*synth)
            return synth_command(synth_seed, synth_days, synth_step, synth_out);
        return validate_command(validate_path);
    }
    catch (const prepaid::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const prepaid::DataError& e)
    {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
}

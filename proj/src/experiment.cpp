#include "prepaid/errors.hpp"
#include "prepaid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

namespace prepaid {

const char* to_string(Policy policy) noexcept
{
    switch (policy)
    {
    case Policy::AFG:
        return "AFG";
    case Policy::DFM:
        return "DFM";
    case Policy::OBM:
        return "OBM";
    case Policy::BSL:
        break;
    }
    return "BSL";
}

std::optional<Policy> parse_policy(const std::string& text)
{
    for (auto p : {Policy::AFG, Policy::DFM, Policy::OBM, Policy::BSL})
        if (text == to_string(p))
            return p;
    return std::nullopt;
}

namespace {

std::size_t count_data_rows(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError(DataErrorKind::Io, 0, "cannot open " + path.string());
    std::string line;
    std::size_t rows = 0;
    bool header = true;
    while (std::getline(in, line))
    {
        if (header)
        {
            header = false;
            continue;
        }
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            ++rows;
    }
    return rows;
}

class Slots
{
public:
    explicit Slots(std::size_t n) : free_(n) {}

    void acquire()
    {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return free_ > 0; });
        --free_;
    }
    void release()
    {
        {
            std::lock_guard lock(mutex_);
            ++free_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t free_;
};

struct Unit
{
    double fraction;
    std::string regime;
};

class CellRunner
{
public:
    CellRunner(const ExperimentConfig& cfg, const DemandSeries& truth, Slots& slots)
        : cfg_(cfg), truth_(truth), slots_(slots)
    {}

    // One (fraction, regime) pair: every configured policy plus the baseline.
    std::vector<CellResult> run(const Unit& unit, std::vector<std::string>& warnings) const
    {
        const auto budget = compute_budget(truth_, cfg_.tariff, unit.fraction);
        const auto forecast = forecast_view(truth_, regime_spec(unit.regime, cfg_.shuffle_seed));
        const auto baseline = simulate_baseline(truth_, cfg_.loads, cfg_.tariff, budget);

        std::vector<CellResult> cells;
        for (auto policy : cfg_.policies)
        {
            CellResult cell;
            cell.fraction = unit.fraction;
            cell.regime = unit.regime;
            cell.policy = policy;
            cell.budget = budget;
            cell.baseline_psf = baseline.psf();
            cell.baseline_disconnection_days = baseline.disconnection_days;
            switch (policy)
            {
            case Policy::AFG:
                run_afg(cell, forecast);
                break;
            case Policy::DFM:
                run_dfm(cell, forecast, warnings);
                break;
            case Policy::OBM:
                run_obm(cell, forecast);
                break;
            case Policy::BSL:
                cell.backend = "none";
                cell.sim = baseline;
                break;
            }
            if (cell.solved)
                cell.improvement_pp = 100.0 * (cell.sim.psf() - baseline.psf());
            cells.push_back(std::move(cell));
        }
        return cells;
    }

private:
    void run_afg(CellResult& cell, const DemandSeries& forecast) const
    {
        const auto avg = daily_average(forecast);
        const auto enable = solve_greedy(avg, cfg_.loads, cfg_.tariff, cell.budget);
        auto plan = compute_thresholds(enable, compute_recharges(enable, avg, cfg_.tariff), avg, cfg_.tariff);
        cell.backend = "greedy";
        cell.model_objective = planned_psf(enable, cfg_.loads);
        cell.sim = simulate_thresholds(plan, truth_, cfg_.loads, cfg_.tariff, cell.budget);
        cell.plan = std::move(plan);
    }

    MilpConstants constants(const DemandSeries& forecast, const Budget& budget) const
    {
        auto c = MilpConstants::defaults(forecast, cfg_.tariff, budget);
        if (cfg_.dfm.eps)
            c.eps = *cfg_.dfm.eps;
        if (cfg_.dfm.m)
            c.m = *cfg_.dfm.m;
        if (cfg_.dfm.M)
            c.M = *cfg_.dfm.M;
        return c;
    }

    bool run_dfm_grid(CellResult& cell, const DemandSeries& forecast) const
    {
        DfmGridOptions options;
        options.grid_resolution = cfg_.dfm.grid_resolution;
        options.candidate_cap = cfg_.dfm.candidate_cap;
        options.recharge_per_day = cfg_.dfm.recharge_per_day;
        try
        {
            auto result = solve_dfm_grid(forecast, cfg_.loads, cfg_.tariff, cell.budget,
                                         constants(forecast, cell.budget), options);
            cell.backend = "grid";
            cell.model_objective = result.solution.objective;
            cell.sim = simulate_thresholds(result.plan, truth_, cfg_.loads, cfg_.tariff, cell.budget);
            cell.plan = std::move(result.plan);
            return true;
        }
        catch (const MilpError& e)
        {
            if (e.kind() != MilpErrorKind::InstanceTooLarge)
                throw;
            cell.solved = false;
            cell.backend = "grid";
            cell.note = e.what();
            return false;
        }
    }

    void run_dfm(CellResult& cell, const DemandSeries& forecast, std::vector<std::string>& warnings) const
    {
        if (cfg_.dfm.backend == DfmBackend::Grid)
        {
            run_dfm_grid(cell, forecast);
            return;
        }
        const std::size_t D = truth_.grid().num_days();
        const double X = cfg_.dfm.recharge_per_day.value_or(cell.budget.initial_balance / static_cast<double>(D));
        const auto model = build_dfm(forecast, cfg_.loads, cfg_.tariff, cell.budget,
                                     constants(forecast, cell.budget), X);
        ExternalOptions options;
        options.timeout = std::chrono::duration<double>(cfg_.dfm.timeout_s);
        cell.backend = "external";
        Solution solution;
        slots_.acquire();
        try
        {
            solution = solve_external(model, cfg_.dfm.solver_cmd, options);
            slots_.release();
        }
        catch (const MilpError& e)
        {
            slots_.release();
            if (e.kind() == MilpErrorKind::SolverNotFound)
            {
                warnings.push_back("DFM solver not found, using the grid backend: " + std::string(e.what()));
                run_dfm_grid(cell, forecast);
                return;
            }
            cell.solved = false;
            cell.note = e.what();
            return;
        }
        catch (...)
        {
            slots_.release();
            throw;
        }
        if (solution.status != SolveStatus::Optimal && solution.status != SolveStatus::Feasible)
        {
            cell.solved = false;
            cell.note = std::string("external solver status ") + to_string(solution.status);
            return;
        }
        auto plan = dfm_plan(solution, cfg_.loads, D, X);
        cell.model_objective = solution.objective;
        cell.sim = simulate_thresholds(plan, truth_, cfg_.loads, cfg_.tariff, cell.budget);
        cell.plan = std::move(plan);
    }

    void run_obm(CellResult& cell, const DemandSeries& forecast) const
    {
        const auto model = build_obm(forecast, cfg_.loads, cfg_.tariff, cell.budget);
        KnapsackOptions options;
        options.node_limit = cfg_.obm_node_limit;
        const auto solution = solve_knapsack_bb(model, options);
        cell.backend = "knapsack";
        if (solution.status == SolveStatus::Feasible)
            cell.note = "node limit reached; best schedule found";
        cell.model_objective = solution.objective;
        auto schedule = extract_schedule(solution, cfg_.loads.size(), truth_.grid().total_steps());
        cell.sim = simulate_schedule(schedule, truth_, cfg_.loads, cfg_.tariff, cell.budget);
        cell.schedule = std::move(schedule);
    }

    const ExperimentConfig& cfg_;
    const DemandSeries& truth_;
    Slots& slots_;
};

}  // namespace

DemandSeries load_truth(const ExperimentConfig& config)
{
    const auto& loads = config.loads;
    DemandSeries all;
    if (config.data.synthetic)
    {
        const auto& syn = *config.data.synthetic;
        auto profiles = syn.profiles;
        if (profiles.empty())
        {
            if (loads.size() != 4)
                throw ConfigError("synthetic data without profiles needs exactly four loads");
            profiles = default_household_profiles();
        }
        if (profiles.size() != loads.size())
            throw ConfigError("synthetic data needs one profile per load");
        if (syn.days == 0)
            throw ConfigError("synthetic data needs at least one day");
        all = synth_household(syn.seed, loads, TimeGrid::from_step_minutes(config.step_minutes, syn.days), profiles);
    }
    else
    {
        const auto spd = static_cast<std::size_t>(1440 / config.step_minutes);
        std::size_t days = 0;
        if (config.data.csv_days)
            days = *config.data.csv_days;
        else
        {
            const std::size_t rows = count_data_rows(config.data.csv);
            if (rows == 0 || rows % spd != 0)
                throw DataError(DataErrorKind::RowCountMismatch, 0,
                                config.data.csv.string() + " has " + std::to_string(rows)
                                    + " data rows, not a whole number of days");
            days = rows / spd;
        }
        all = ingest_csv(config.data.csv, loads, TimeGrid::from_step_minutes(config.step_minutes, days));
    }
    const std::size_t available = all.grid().num_days();
    if (config.data_offset_days + config.horizon_days > available)
        throw ConfigError("data window [" + std::to_string(config.data_offset_days) + ", "
                          + std::to_string(config.data_offset_days + config.horizon_days) + ") exceeds the "
                          + std::to_string(available) + " days of data");
    return all.slice_days(config.data_offset_days, config.horizon_days);
}

ExperimentResults run_experiment(const ExperimentConfig& config)
{
    return run_experiment(config, load_truth(config));
}

ExperimentResults run_experiment(const ExperimentConfig& config, const DemandSeries& truth)
{
    truth.require_loads(config.loads);
    ExperimentResults results;
    results.config = config;
    results.grid = truth.grid();

    const auto indicator = demand_indicator(truth);
    for (std::size_t k = 0; k < config.loads.size(); ++k)
    {
        const auto row = indicator.row(k);
        if (std::none_of(row.begin(), row.end(), [](auto v) { return v != 0; }))
            results.excluded_loads.push_back(config.loads[k].name);
    }

    std::vector<Unit> units;
    for (double f : config.budget_fractions)
        for (const auto& r : config.regimes)
            units.push_back({f, r});

    std::vector<std::vector<CellResult>> done(units.size());
    std::vector<std::vector<std::string>> warnings(units.size());
    std::vector<std::exception_ptr> errors(units.size());
    Slots slots(config.max_parallel_solvers);
    const CellRunner runner(config, truth, slots);

    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, units.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < units.size();)
        {
            try
            {
                done[i] = runner.run(units[i], warnings[i]);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1)
        work();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }

    for (std::size_t i = 0; i < units.size(); ++i)
    {
        if (errors[i])
            std::rethrow_exception(errors[i]);
        for (auto& w : warnings[i])
            results.warnings.push_back(std::move(w));
        for (auto& c : done[i])
            results.cells.push_back(std::move(c));
    }
    return results;
}

}  // namespace prepaid

#pragma once

// Solver-agnostic MILP models for the two benchmark policies, the desk-scale
// backends that solve them, LP export and an external-solver bridge.
//
// Variable names (1-based indices): z_t, x_t (real and virtual wallet),
// x_k_d (threshold of load k on day d), uz_k_t, ux_k_t (enable signals),
// a_k_t (actuation).

#include "prepaid/afg.hpp"
#include "prepaid/model.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace prepaid {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType
{
    Continuous,
    Binary,
};

struct Variable
{
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    VarType type = VarType::Continuous;
    std::string symbol;  ///< e.g. "a_{k,t}"
};

enum class Sense
{
    LessEqual,
    GreaterEqual,
    Equal,
};

struct Term
{
    std::size_t var;
    double coef;
};

struct Constraint
{
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

/// Maximisation model. Variables and constraints keep insertion order.
class MilpModel
{
public:
    /// Throws InvalidArgument on a duplicate name or a binary with bounds
    /// other than [0, 1].
    std::size_t add_variable(Variable v);
    /// Throws InvalidArgument if a term refers to an undeclared variable.
    void add_constraint(Constraint c);
    void add_objective(std::size_t var, double coef);

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    const std::vector<Term>& objective() const noexcept { return objective_; }

    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t num_binaries() const;

    /// Objective at `values` (indexed like variables()).
    double evaluate(const std::vector<double>& values) const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<Term> objective_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class SolveStatus
{
    Optimal,
    Feasible,
    Infeasible,
    Error,
};

const char* to_string(SolveStatus status) noexcept;

struct Solution
{
    std::map<std::string, double> values;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Error;
    /// Solver output or parse warnings.
    std::vector<std::string> messages;

    /// Value of `name`, or `fallback` when the solution does not mention it.
    double value_or(const std::string& name, double fallback) const;
};

struct MilpConstants
{
    double eps = 1e-6;
    double m = 0.0;  ///< <= -Z
    double M = 0.0;  ///< >= Z
    double budget_delta = kBudgetDelta;

    /// eps = 1e-6, M = -m = Z + alpha dT sum_k max_t P_{k,t}.
    static MilpConstants defaults(const DemandSeries& demand, const Tariff& tariff, const Budget& budget);
};

std::string var_name(const char* prefix, std::size_t i);
std::string var_name(const char* prefix, std::size_t i, std::size_t j);

// ---- OBM -----------------------------------------------------------------

/// Binary a_k_t for every demanded (k, t) and a single budget row
/// sum a alpha dT P <= Z (1 - delta). Undemanded steps have no variable.
MilpModel build_obm(const DemandSeries& demand, const LoadSet& loads, const Tariff& tariff, const Budget& budget);

/// a_k_t read back from a solution; missing names count as 0.
BinaryMatrix extract_schedule(const Solution& solution, std::size_t num_loads, std::size_t num_steps);

struct KnapsackOptions
{
    /// Search nodes before giving up on proving optimality (status Feasible).
    std::size_t node_limit = 5'000'000;
};

struct KnapsackResult
{
    std::vector<std::uint8_t> picked;
    double value = 0.0;
    double weight = 0.0;
    bool proven_optimal = true;
    std::size_t nodes = 0;
};

/// Exact 0/1 knapsack by depth-first branch and bound with the fractional
/// bound. Items with equal (value, weight) are branched on as one class;
/// within a class the earliest items are picked first.
KnapsackResult solve_knapsack(const std::vector<double>& values,
                              const std::vector<double>& weights,
                              double capacity,
                              const KnapsackOptions& options = {});

/// Solves a knapsack-shaped model (binary variables, one <= row, nonnegative
/// coefficients). Throws MilpError(StructureMismatch) otherwise.
Solution solve_knapsack_bb(const MilpModel& model, const KnapsackOptions& options = {});

// ---- DFM -----------------------------------------------------------------

/// Threshold MILP over the forecast. Adds z_{T+1} and uz_k_{T+1} so the
/// last step is gated like every other. recharge_per_day defaults to Z / days.
MilpModel build_dfm(const DemandSeries& demand,
                    const LoadSet& loads,
                    const Tariff& tariff,
                    const Budget& budget,
                    const MilpConstants& constants,
                    std::optional<double> recharge_per_day = std::nullopt);

/// Threshold plan from a DFM solution: x_k_d plus the constant recharge.
/// Not latching; the virtual wallet carries over between days.
ThresholdPlan dfm_plan(const Solution& solution, const LoadSet& loads, std::size_t num_days, double recharge_per_day);

struct DfmGridOptions
{
    std::size_t grid_resolution = 1;
    /// Upper limit on (grid_resolution + 2)^(loads x days).
    double candidate_cap = 1e7;
    std::optional<double> recharge_per_day;
};

struct DfmGridResult
{
    ThresholdPlan plan;
    /// x_k_d values; objective is the PSF simulated on the forecast.
    Solution solution;
    std::size_t states_explored = 0;
};

/// Exhaustive threshold search. Per (k, d) the candidates are 0, the grid
/// X_d i / G for i = 1..G, and M (never enabled). Every candidate vector is
/// scored by the threshold simulator on `demand`, organised as a day-by-day
/// recursion memoised on the end-of-day wallet state.
DfmGridResult solve_dfm_grid(const DemandSeries& demand,
                             const LoadSet& loads,
                             const Tariff& tariff,
                             const Budget& budget,
                             const MilpConstants& constants,
                             const DfmGridOptions& options = {});

// ---- export, external solvers, verification --------------------------------

/// CPLEX LP text: Maximize, Subject To, Bounds, Binary, End.
void write_lp(const MilpModel& model, std::ostream& out);
void write_lp(const MilpModel& model, const std::filesystem::path& path);

struct ExternalOptions
{
    std::chrono::duration<double> timeout{600.0};
    /// Directory for the LP, solution and log files (system temp if empty).
    std::filesystem::path work_dir;
    bool keep_files = false;
};

/// Runs `command_template` through /bin/sh with `{lp}` and `{sol}`
/// replaced by file paths. The solver writes `name value` lines and an
/// optional `status <optimal|feasible|infeasible>` line. Errors:
/// SolverNotFound (shell exit 126/127), Timeout, SolutionParseError. A
/// nonzero exit otherwise yields status Error with the captured output.
Solution solve_external(const MilpModel& model, const std::string& command_template, const ExternalOptions& options = {});

struct Violation
{
    std::string id;  ///< constraint name, or bound:/integrality: + variable
    double residual = 0.0;
};

/// Every constraint, bound and integrality requirement checked at `tol`.
/// Throws MilpError(MissingVariable) if the solution lacks a variable.
std::vector<Violation> check_feasibility(const MilpModel& model, const Solution& solution, double tol = 1e-6);

}  // namespace prepaid

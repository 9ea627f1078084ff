#include "prepaid/errors.hpp"
#include "prepaid/milp.hpp"

#include <algorithm>

namespace prepaid {

std::size_t MilpModel::add_variable(Variable v)
{
    if (v.type == VarType::Binary && (v.lower != 0.0 || v.upper != 1.0))
        throw InvalidArgument("binary variable '" + v.name + "' must have bounds [0, 1]");
    if (v.lower > v.upper)
        throw InvalidArgument("variable '" + v.name + "' has lower bound above upper bound");
    const std::size_t id = variables_.size();
    if (!index_.emplace(v.name, id).second)
        throw InvalidArgument("duplicate variable '" + v.name + "'");
    variables_.push_back(std::move(v));
    return id;
}

void MilpModel::add_constraint(Constraint c)
{
    for (const auto& term : c.terms)
        if (term.var >= variables_.size())
            throw InvalidArgument("constraint '" + c.name + "' refers to an undeclared variable");
    constraints_.push_back(std::move(c));
}

void MilpModel::add_objective(std::size_t var, double coef)
{
    if (var >= variables_.size())
        throw InvalidArgument("objective refers to an undeclared variable");
    objective_.push_back({var, coef});
}

std::optional<std::size_t> MilpModel::find(const std::string& name) const
{
    const auto it = index_.find(name);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t MilpModel::num_binaries() const
{
    return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(),
                                                  [](const Variable& v) { return v.type == VarType::Binary; }));
}

double MilpModel::evaluate(const std::vector<double>& values) const
{
    double sum = 0.0;
    for (const auto& term : objective_)
        sum += term.coef * values.at(term.var);
    return sum;
}

const char* to_string(SolveStatus status) noexcept
{
    switch (status)
    {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Feasible:
        return "feasible";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::Error:
        break;
    }
    return "error";
}

double Solution::value_or(const std::string& name, double fallback) const
{
    const auto it = values.find(name);
    return it == values.end() ? fallback : it->second;
}

MilpConstants MilpConstants::defaults(const DemandSeries& demand, const Tariff& tariff, const Budget& budget)
{
    double peak_cost = 0.0;
    for (std::size_t k = 0; k < demand.num_loads(); ++k)
    {
        const auto row = demand.power().row(k);
        const double peak = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
        peak_cost += tariff.alpha * demand.grid().step_hours() * peak;
    }
    MilpConstants c;
    c.M = budget.initial_balance + peak_cost;
    c.m = -c.M;
    return c;
}

std::string var_name(const char* prefix, std::size_t i)
{
    return std::string(prefix) + '_' + std::to_string(i);
}

std::string var_name(const char* prefix, std::size_t i, std::size_t j)
{
    return std::string(prefix) + '_' + std::to_string(i) + '_' + std::to_string(j);
}

}  // namespace prepaid

#include "prepaid/errors.hpp"
#include "prepaid/milp.hpp"

namespace prepaid {

MilpModel build_obm(const DemandSeries& demand, const LoadSet& loads, const Tariff& tariff, const Budget& budget)
{
    demand.require_loads(loads);
    const auto indicator = demand_indicator(demand);
    const std::size_t T = demand.grid().total_steps();
    const double per_step = tariff.alpha * demand.grid().step_hours();

    MilpModel model;
    Constraint budget_row{"budget", {}, Sense::LessEqual, budget.spend_cap()};
    for (std::size_t k = 0; k < loads.size(); ++k)
    {
        std::size_t demanded = 0;
        for (std::size_t t = 0; t < T; ++t)
            demanded += indicator(k, t);
        if (demanded == 0)
            continue;
        const double value = loads.gamma(k) / static_cast<double>(demanded);
        for (std::size_t t = 0; t < T; ++t)
        {
            if (!indicator(k, t))
                continue;
            const auto a = model.add_variable({var_name("a", k + 1, t + 1), 0.0, 1.0, VarType::Binary, "a_{k,t}"});
            model.add_objective(a, value);
            budget_row.terms.push_back({a, per_step * demand(k, t)});
        }
    }
    if (!budget_row.terms.empty())
        model.add_constraint(std::move(budget_row));
    return model;
}

BinaryMatrix extract_schedule(const Solution& solution, std::size_t num_loads, std::size_t num_steps)
{
    BinaryMatrix schedule(num_loads, num_steps, 0);
    for (std::size_t k = 0; k < num_loads; ++k)
        for (std::size_t t = 0; t < num_steps; ++t)
            schedule(k, t) = solution.value_or(var_name("a", k + 1, t + 1), 0.0) > 0.5 ? 1 : 0;
    return schedule;
}

}  // namespace prepaid

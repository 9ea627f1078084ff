#include "prepaid/errors.hpp"
#include "prepaid/milp.hpp"

namespace prepaid {

namespace {

void require_feasible_constants(const MilpConstants& c, const Budget& budget)
{
    const double Z = budget.initial_balance;
    if (!(c.eps > 0.0))
        throw MilpError(MilpErrorKind::InfeasibleConstants, "eps must be positive");
    if (c.m > -Z)
        throw MilpError(MilpErrorKind::InfeasibleConstants, "m must not exceed -Z");
    if (c.M < Z)
        throw MilpError(MilpErrorKind::InfeasibleConstants, "M must be at least Z");
}

}  // namespace

MilpModel build_dfm(const DemandSeries& demand,
                    const LoadSet& loads,
                    const Tariff& tariff,
                    const Budget& budget,
                    const MilpConstants& constants,
                    std::optional<double> recharge_per_day)
{
    demand.require_loads(loads);
    require_feasible_constants(constants, budget);

    const auto& grid = demand.grid();
    const std::size_t K = loads.size();
    const std::size_t T = grid.total_steps();
    const std::size_t D = grid.num_days();
    const double Z = budget.initial_balance;
    const double X = recharge_per_day.value_or(Z / static_cast<double>(D));
    const double eps = constants.eps;
    const double m = constants.m;
    const double M = constants.M;
    const double per_step = tariff.alpha * grid.step_hours();
    const auto d = demand_indicator(demand);

    MilpModel model;
    // Step t (0-based) maps to name index t + 1; index T + 1 is the boundary.
    std::vector<std::size_t> z(T + 1), x(T), uz(K * (T + 1)), ux(K * T), a(K * T), thr(K * D);
    for (std::size_t t = 0; t <= T; ++t)
        z[t] = model.add_variable({var_name("z", t + 1), -kInf, kInf, VarType::Continuous, "z_t"});
    for (std::size_t t = 0; t < T; ++t)
        x[t] = model.add_variable({var_name("x", t + 1), -kInf, kInf, VarType::Continuous, "x_t"});
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t day = 0; day < D; ++day)
            thr[k * D + day] = model.add_variable({var_name("x", k + 1, day + 1), 0.0, M, VarType::Continuous, "x_{k,d}"});
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t t = 0; t <= T; ++t)
            uz[k * (T + 1) + t] = model.add_variable({var_name("uz", k + 1, t + 1), 0.0, 1.0, VarType::Binary, "u^z_{k,t}"});
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t t = 0; t < T; ++t)
            ux[k * T + t] = model.add_variable({var_name("ux", k + 1, t + 1), 0.0, 1.0, VarType::Binary, "u^x_{k,t}"});
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t t = 0; t < T; ++t)
            a[k * T + t] = model.add_variable({var_name("a", k + 1, t + 1), 0.0, 1.0, VarType::Binary, "a_{k,t}"});

    for (std::size_t k = 0; k < K; ++k)
    {
        std::size_t demanded = 0;
        for (std::size_t t = 0; t < T; ++t)
            demanded += d(k, t);
        if (demanded == 0)
            continue;
        for (std::size_t t = 0; t < T; ++t)
            if (d(k, t))
                model.add_objective(a[k * T + t], loads.gamma(k) / static_cast<double>(demanded));
    }

    auto spend_terms = [&](std::size_t t, std::vector<Term>& terms) {
        for (std::size_t k = 0; k < K; ++k)
            if (demand(k, t) > 0.0)
                terms.push_back({a[k * T + t], per_step * demand(k, t)});
    };

    // Wallet balances.
    for (std::size_t t = 0; t <= T; ++t)
    {
        Constraint real{var_name("real_balance", t + 1), {{z[t], 1.0}}, Sense::Equal, 0.0};
        if (t == 0)
            real.rhs = Z;
        else
        {
            real.terms.push_back({z[t - 1], -1.0});
            spend_terms(t - 1, real.terms);
        }
        model.add_constraint(std::move(real));
    }
    for (std::size_t t = 0; t < T; ++t)
    {
        Constraint virt{var_name("virtual_balance", t + 1), {{x[t], 1.0}}, Sense::Equal, 0.0};
        if (t > 0)
        {
            virt.terms.push_back({x[t - 1], -1.0});
            spend_terms(t - 1, virt.terms);
        }
        if (t % grid.steps_per_day() == 0)
            virt.rhs = X;
        model.add_constraint(std::move(virt));
    }

    // Real enable signal: uz = 1 iff z >= eps, uz = 0 iff z <= 0.
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t t = 0; t <= T; ++t)
        {
            const auto u = uz[k * (T + 1) + t];
            model.add_constraint({var_name("real_enable", k + 1, t + 1), {{u, m}, {z[t], 1.0}}, Sense::LessEqual, 0.0});
            model.add_constraint(
                {var_name("real_disable", k + 1, t + 1), {{z[t], 1.0}, {u, -(M + eps)}}, Sense::GreaterEqual, -M});
        }

    // Virtual enable signal and actuation.
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t t = 0; t < T; ++t)
        {
            const auto u = ux[k * T + t];
            const auto th = thr[k * D + grid.day_of(t)];
            const auto act = a[k * T + t];
            const auto now = uz[k * (T + 1) + t];
            const auto next = uz[k * (T + 1) + t + 1];
            const double dk = d(k, t);
            model.add_constraint({var_name("virtual_enable", k + 1, t + 1),
                                  {{x[t], 1.0}, {th, -1.0}, {u, -(M + eps)}},
                                  Sense::LessEqual,
                                  -eps});
            model.add_constraint({var_name("virtual_disable", k + 1, t + 1),
                                  {{x[t], 1.0}, {th, -1.0}, {u, m}},
                                  Sense::GreaterEqual,
                                  m});
            Constraint demand_gate{var_name("act_demand", k + 1, t + 1), {{act, 1.0}}, Sense::LessEqual, 0.0};
            if (dk != 0.0)
                demand_gate.terms.push_back({u, -dk});
            model.add_constraint(std::move(demand_gate));
            model.add_constraint(
                {var_name("act_real_now", k + 1, t + 1), {{act, 1.0}, {now, -1.0}}, Sense::LessEqual, 0.0});
            model.add_constraint(
                {var_name("act_real_next", k + 1, t + 1), {{act, 1.0}, {next, -1.0}}, Sense::LessEqual, 0.0});
            Constraint on{var_name("act_on", k + 1, t + 1), {}, Sense::LessEqual, 2.0};
            if (dk != 0.0)
                on.terms.push_back({u, dk});
            on.terms.push_back({now, 1.0});
            on.terms.push_back({next, 1.0});
            on.terms.push_back({act, -1.0});
            model.add_constraint(std::move(on));
        }
    return model;
}

ThresholdPlan dfm_plan(const Solution& solution, const LoadSet& loads, std::size_t num_days, double recharge_per_day)
{
    ThresholdPlan plan;
    plan.thresholds = Matrix<double>(loads.size(), num_days, 0.0);
    plan.recharges.assign(num_days, recharge_per_day);
    plan.latching = false;
    plan.carry_over = true;
    for (std::size_t k = 0; k < loads.size(); ++k)
        for (std::size_t day = 0; day < num_days; ++day)
        {
            const auto name = var_name("x", k + 1, day + 1);
            const auto it = solution.values.find(name);
            if (it == solution.values.end())
                throw MilpError(MilpErrorKind::MissingVariable, "solution has no value for " + name);
            plan.thresholds(k, day) = it->second;
        }
    return plan;
}

}  // namespace prepaid

#pragma once

// Exhaustive check of the threshold MILP's indicator logic on tiny
// instances. For every actuation pattern and threshold assignment the
// wallets are stepped by hand, the enable signals are decoded from their
// intended meaning, and check_feasibility is asked two questions:
//  * is the decoded point feasible exactly when the actuation equals the
//    conjunction of demand, virtual enable and real enable now and next?
//  * does flipping any single enable signal against its meaning make the
//    point infeasible?

#include "prepaid/milp.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace truth_table {

struct Report
{
    std::size_t points = 0;     ///< (actuation, thresholds) pairs visited
    std::size_t skipped = 0;    ///< points with a balance inside an eps gap
    std::size_t feasible = 0;   ///< decoded points check_feasibility accepts
    std::size_t unsound = 0;    ///< accepted although the actuation breaks the conjunction
    std::size_t incomplete = 0; ///< rejected although every signal is decodable and consistent
    std::size_t loose = 0;      ///< a flipped signal that is still accepted
    std::vector<std::string> examples;
};

inline Report run(const prepaid::DemandSeries& demand,
                  const prepaid::LoadSet& loads,
                  const prepaid::Tariff& tariff,
                  const prepaid::Budget& budget,
                  const prepaid::MilpConstants& c,
                  const std::vector<double>& threshold_values,
                  double tol = 1e-6,
                  bool flip_checks = true,
                  double rounding = 1e-9)
{
    using prepaid::var_name;
    const auto model = prepaid::build_dfm(demand, loads, tariff, budget, c);
    const auto& grid = demand.grid();
    const std::size_t K = loads.size(), T = grid.total_steps(), D = grid.num_days();
    const double Z = budget.initial_balance;
    const double X = Z / static_cast<double>(D);
    const double unit = tariff.alpha * grid.step_hours();

    Report rep;
    const std::size_t nthr = K * D;
    std::vector<std::size_t> pick(nthr, 0);
    for (;;)
    {
        std::vector<double> thr(nthr);
        for (std::size_t i = 0; i < nthr; ++i)
            thr[i] = threshold_values[pick[i]];

        for (std::uint32_t mask = 0; mask < (1u << (K * T)); ++mask)
        {
            ++rep.points;
            auto act = [&](std::size_t k, std::size_t t) { return int((mask >> (k * T + t)) & 1u); };

            std::vector<double> z(T + 1), x(T);
            z[0] = Z;
            for (std::size_t t = 0; t < T; ++t)
            {
                double spend = 0.0;
                for (std::size_t k = 0; k < K; ++k)
                    spend += act(k, t) * unit * demand(k, t);
                z[t + 1] = z[t] - spend;
                const double before = t == 0 ? 0.0 : x[t - 1];
                double spend_prev = 0.0;
                if (t > 0)
                    for (std::size_t k = 0; k < K; ++k)
                        spend_prev += act(k, t - 1) * unit * demand(k, t - 1);
                x[t] = before - spend_prev + (t % grid.steps_per_day() == 0 ? X : 0.0);
            }

            // Allowed values of each signal under its meaning, up to
            // floating-point rounding. Points inside an eps gap have no
            // meaning and are skipped.
            auto real_options = [&](double zt) {
                std::vector<int> o;
                if (zt <= rounding)
                    o.push_back(0);
                if (zt >= c.eps - rounding)
                    o.push_back(1);
                return o;
            };
            auto virtual_options = [&](double gap) {
                std::vector<int> o;
                if (gap <= -c.eps + rounding)
                    o.push_back(0);
                if (gap >= -rounding)
                    o.push_back(1);
                return o;
            };

            bool decodable = true;
            std::vector<std::vector<int>> uz(K, std::vector<int>(T + 1)), ux(K, std::vector<int>(T));
            std::vector<std::vector<std::vector<int>>> uz_opt(K), ux_opt(K);
            for (std::size_t k = 0; k < K; ++k)
            {
                for (std::size_t t = 0; t <= T; ++t)
                {
                    uz_opt[k].push_back(real_options(z[t]));
                    decodable = decodable && !uz_opt[k].back().empty();
                }
                for (std::size_t t = 0; t < T; ++t)
                {
                    ux_opt[k].push_back(virtual_options(x[t] - thr[k * D + grid.day_of(t)]));
                    decodable = decodable && !ux_opt[k].back().empty();
                }
            }
            if (!decodable)
            {
                ++rep.skipped;
                continue;
            }

            // Choose the decoded signals; prefer a choice consistent with
            // the actuation when a signal is ambiguous at tolerance.
            bool consistent = true;
            for (std::size_t k = 0; k < K; ++k)
            {
                for (std::size_t t = 0; t <= T; ++t)
                    uz[k][t] = uz_opt[k][t].back();
                for (std::size_t t = 0; t < T; ++t)
                    ux[k][t] = ux_opt[k][t].back();
            }
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t t = 0; t < T; ++t)
                {
                    const int d = demand(k, t) > 0.0 ? 1 : 0;
                    if (act(k, t) != (d & ux[k][t] & uz[k][t] & uz[k][t + 1]))
                    {
                        // An ambiguous signal may be lowered to switch a load off.
                        if (act(k, t) == 0 && ux_opt[k][t].front() == 0)
                            ux[k][t] = 0;
                        else
                            consistent = false;
                    }
                }

            prepaid::Solution sol;
            sol.status = prepaid::SolveStatus::Feasible;
            for (std::size_t t = 0; t <= T; ++t)
                sol.values[var_name("z", t + 1)] = z[t];
            for (std::size_t t = 0; t < T; ++t)
                sol.values[var_name("x", t + 1)] = x[t];
            for (std::size_t k = 0; k < K; ++k)
            {
                for (std::size_t d = 0; d < D; ++d)
                    sol.values[var_name("x", k + 1, d + 1)] = thr[k * D + d];
                for (std::size_t t = 0; t <= T; ++t)
                    sol.values[var_name("uz", k + 1, t + 1)] = uz[k][t];
                for (std::size_t t = 0; t < T; ++t)
                {
                    sol.values[var_name("ux", k + 1, t + 1)] = ux[k][t];
                    sol.values[var_name("a", k + 1, t + 1)] = act(k, t);
                }
            }

            const bool ok = prepaid::check_feasibility(model, sol, tol).empty();
            rep.feasible += ok ? 1 : 0;
            if (ok && !consistent)
            {
                ++rep.unsound;
                if (rep.examples.size() < 5)
                    rep.examples.push_back("unsound actuation mask " + std::to_string(mask));
            }
            if (!ok && consistent)
            {
                ++rep.incomplete;
                if (rep.examples.size() < 5)
                    rep.examples.push_back("rejected consistent mask " + std::to_string(mask));
            }
            if (!ok || !flip_checks)
                continue;

            auto try_flip = [&](const std::string& name, const std::vector<int>& options) {
                const int now = static_cast<int>(sol.values[name]);
                const int other = 1 - now;
                if (std::find(options.begin(), options.end(), other) != options.end())
                    return;
                sol.values[name] = other;
                if (prepaid::check_feasibility(model, sol, tol).empty())
                {
                    ++rep.loose;
                    if (rep.examples.size() < 5)
                        rep.examples.push_back("flipping " + name + " stays feasible");
                }
                sol.values[name] = now;
            };
            for (std::size_t k = 0; k < K; ++k)
            {
                for (std::size_t t = 0; t <= T; ++t)
                    try_flip(var_name("uz", k + 1, t + 1), uz_opt[k][t]);
                for (std::size_t t = 0; t < T; ++t)
                    try_flip(var_name("ux", k + 1, t + 1), ux_opt[k][t]);
            }
        }

        std::size_t i = 0;
        while (i < nthr && ++pick[i] == threshold_values.size())
            pick[i++] = 0;
        if (i == nthr)
            break;
    }
    return rep;
}

}  // namespace truth_table

#pragma once

#include "prepaid/model.hpp"
#include "prepaid/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

namespace testing {

inline prepaid::DemandSeries series(double step_hours, std::size_t days, const std::vector<std::vector<double>>& rows)
{
    const std::size_t spd = static_cast<std::size_t>(std::lround(24.0 / step_hours));
    prepaid::Matrix<double> p(rows.size(), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t t = 0; t < rows[k].size(); ++t)
            p(k, t) = rows[k][t];
    return {prepaid::TimeGrid(step_hours, spd, days), p};
}

inline prepaid::LoadSet loads(const std::vector<double>& gammas)
{
    std::vector<prepaid::Load> out;
    for (std::size_t k = 0; k < gammas.size(); ++k)
        out.push_back({"load" + std::to_string(k + 1), gammas[k]});
    return prepaid::LoadSet(out);
}

// Final balance equals Z minus the served cost, and nothing runs once the
// wallet is empty.
inline void check_money(const prepaid::SimResult& r,
                        const prepaid::DemandSeries& truth,
                        const prepaid::Tariff& tariff,
                        const prepaid::Budget& budget)
{
    const double served = prepaid::served_cost(truth, r.actuation, tariff);
    CHECK(std::abs(r.final_balance() - (budget.initial_balance - served)) <= 1e-9);
    for (std::size_t t = 0; t < truth.grid().total_steps(); ++t)
        if (r.real_balance[t] <= 0.0)
            for (std::size_t k = 0; k < truth.num_loads(); ++k)
                CHECK(r.actuation(k, t) == 0);
}

}  // namespace testing

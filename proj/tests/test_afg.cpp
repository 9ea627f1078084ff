#include "helpers.hpp"
#include "oracles.hpp"

#include "prepaid/afg.hpp"
#include "prepaid/errors.hpp"
#include "prepaid/sim.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace prepaid;

namespace {

DailyAverageDemand averages(const std::vector<std::vector<double>>& rows)
{
    Matrix<double> p(rows.size(), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t d = 0; d < rows[k].size(); ++d)
            p(k, d) = rows[k][d];
    return {p};
}

const auto kTariff = Tariff::per_wh(0.001);

}  // namespace

TEST_CASE("maximum durations")
{
    const auto m = max_durations(averages({{0.0, 50.0}, {1.0, 2.0}}));
    CHECK(m(0, 0) == 0.0);
    CHECK(m(0, 1) == 24.0);
    CHECK(m(1, 0) == 24.0);
    CHECK(m(1, 1) == 24.0);
}

TEST_CASE("two-load worked example")
{
    const auto avg = averages({{100.0}, {200.0}});
    const auto loads = testing::loads({0.7, 0.3});
    const auto plan = solve_greedy(avg, loads, kTariff, Budget::of(3.0));
    CHECK(plan.durations(0, 0) == doctest::Approx(24.0).epsilon(1e-9));
    CHECK(plan.durations(1, 0) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(plan.marginal.has_value());
    CHECK(plan.marginal->first == 1);
    CHECK(planned_psf(plan, loads) == doctest::Approx(0.7375).epsilon(1e-8));

    const auto recharges = compute_recharges(plan, avg, kTariff);
    REQUIRE(recharges.size() == 1);
    CHECK(recharges[0] == doctest::Approx(3.0).epsilon(1e-8));

    const auto thr = compute_thresholds(plan, recharges, avg, kTariff);
    CHECK(thr.thresholds(0, 0) == 0.0);
    CHECK(thr.thresholds(1, 0) == doctest::Approx(2.1).epsilon(1e-8));
    CHECK(thr.latching);
    CHECK_FALSE(thr.carry_over);
}

TEST_CASE("worked example against a dense grid and the LP dual")
{
    const auto avg = averages({{100.0}, {200.0}});
    const double cap = Budget::of(3.0).spend_cap();
    double best = 0.0;
    for (int i = 0; i <= 2400; ++i)
        for (int j = 0; j <= 2400; j += 10)
        {
            const double s1 = i * 0.01, s2 = j * 0.01;
            if (0.001 * (100.0 * s1 + 200.0 * s2) <= cap)
                best = std::max(best, 0.7 * s1 / 24.0 + 0.3 * s2 / 24.0);
        }
    const double lp = oracle::duration_lp_optimum(avg.power, {0.7, 0.3}, 0.001, cap);
    const double greedy = planned_psf(solve_greedy(avg, testing::loads({0.7, 0.3}), kTariff, Budget::of(3.0)),
                                      testing::loads({0.7, 0.3}));
    CHECK(lp == doctest::Approx(0.7375).epsilon(1e-8));
    CHECK(greedy == doctest::Approx(lp).epsilon(1e-12));
    CHECK(greedy >= best - 1e-12);
    CHECK(greedy - best <= 0.3 * 0.1 / 24.0 + 1e-12);
}

TEST_CASE("worked example closed loop at quarter-hour steps")
{
    const auto truth = testing::series(0.25, 1, {std::vector<double>(96, 100.0), std::vector<double>(96, 200.0)});
    const auto loads = testing::loads({0.7, 0.3});
    const auto budget = Budget::of(3.0);
    const auto plan = plan_afg(daily_average(truth), loads, kTariff, budget);
    const auto r = simulate_thresholds(plan, truth, loads, kTariff, budget);
    std::size_t served[2] = {0, 0};
    for (std::size_t t = 0; t < 96; ++t)
        for (std::size_t k = 0; k < 2; ++k)
            served[k] += r.actuation(k, t);
    CHECK(served[0] == 96);
    CHECK(served[1] == 12);
    for (std::size_t t = 0; t < 12; ++t)
        CHECK(r.actuation(1, t) == 1);
    CHECK(r.virtual_balance[12] == doctest::Approx(2.1).epsilon(1e-8));
    CHECK(r.final_balance() >= 0.0);
    CHECK(r.total_spend == doctest::Approx(3.0).epsilon(1e-8));
    testing::check_money(r, truth, kTariff, budget);
}

TEST_CASE("budget extremes")
{
    const auto avg = averages({{100.0, 0.0, 300.0}, {50.0, 60.0, 0.0}});
    const auto loads = testing::loads({0.5, 0.5});
    const auto rich = solve_greedy(avg, loads, kTariff, Budget::of(100.0));
    CHECK(rich.durations == rich.max_durations);
    CHECK_FALSE(rich.marginal.has_value());
    const auto thr = compute_thresholds(rich, compute_recharges(rich, avg, kTariff), avg, kTariff);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t d = 0; d < 3; ++d)
            CHECK(thr.thresholds(k, d) == (avg.power(k, d) > 0.0 ? 0.0 : thr.recharges[d] + kDisabledThresholdOffset));

    const auto broke = solve_greedy(avg, loads, kTariff, Budget::of(0.0));
    for (double v : broke.durations.values())
        CHECK(v == 0.0);
    for (double x : compute_recharges(broke, avg, kTariff))
        CHECK(x == 0.0);
}

TEST_CASE("disabled loads sit just above the recharge")
{
    const auto avg = averages({{100.0, 100.0}, {5000.0, 5000.0}});
    const auto loads = testing::loads({0.9, 0.1});
    const auto plan = solve_greedy(avg, loads, kTariff, Budget::of(4.8 + 1.0));
    const auto x = compute_recharges(plan, avg, kTariff);
    CHECK(x[0] == doctest::Approx(3.4));
    CHECK(x[1] == doctest::Approx(2.4));
    const auto thr = compute_thresholds(plan, x, avg, kTariff);
    const std::size_t marginal_day = plan.marginal->second;
    const std::size_t other_day = 1 - marginal_day;
    CHECK(plan.durations(1, other_day) == 0.0);
    CHECK(thr.thresholds(1, other_day) == doctest::Approx(x[other_day] + kDisabledThresholdOffset));
    const auto truth = testing::series(1.0, 2, {std::vector<double>(48, 100.0), std::vector<double>(48, 5000.0)});
    const auto r = simulate_thresholds(thr, truth, loads, kTariff, Budget::of(5.8));
    for (std::size_t t = 0; t < 24; ++t)
        CHECK(r.actuation(1, other_day * 24 + t) == 0);
    testing::check_money(r, truth, kTariff, Budget::of(5.8));
}

TEST_CASE("identical days get identical recharges")
{
    const auto avg = averages({{100.0, 100.0}, {300.0, 300.0}});
    const auto plan = solve_greedy(avg, testing::loads({0.5, 0.5}), kTariff, Budget::of(100.0));
    const auto x = compute_recharges(plan, avg, kTariff);
    CHECK(x[0] == x[1]);
}

TEST_CASE("equal ratios go to the higher priority load")
{
    const auto avg = averages({{100.0}, {200.0}});
    const auto loads = testing::loads({0.2, 0.4});
    const auto plan = solve_greedy(avg, loads, kTariff, Budget::of(2.4));
    CHECK(plan.durations(1, 0) == doctest::Approx(12.0).epsilon(1e-6));
    CHECK(plan.durations(0, 0) == 0.0);
}

TEST_CASE("greedy matches the LP dual on random instances")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial)
    {
        const std::size_t K = 1 + rng() % 5, D = 1 + rng() % 5;
        std::vector<double> gamma(K);
        std::vector<std::vector<double>> rows(K, std::vector<double>(D));
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k)
        {
            gamma[k] = 0.05 + unit(rng);
            for (auto& v : rows[k])
            {
                v = unit(rng) < 0.2 ? 0.0 : 2000.0 * unit(rng);
                total += 0.001 * 24.0 * v;
            }
        }
        const auto avg = averages(rows);
        const auto budget = Budget::of(1.2 * unit(rng) * total);
        const auto plan = solve_greedy(avg, testing::loads(gamma), kTariff, budget);
        const double lp = oracle::duration_lp_optimum(avg.power, gamma, 0.001, budget.spend_cap());
        CHECK(planned_psf(plan, testing::loads(gamma)) == doctest::Approx(lp).epsilon(1e-9));

        double spend = 0.0;
        for (double x : compute_recharges(plan, avg, kTariff))
            spend += x;
        CHECK(spend <= budget.spend_cap() + 1e-12);
        std::size_t fractional = 0;
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t d = 0; d < D; ++d)
            {
                const double s = plan.durations(k, d);
                CHECK(s >= 0.0);
                CHECK(s <= plan.max_durations(k, d));
                fractional += (s > 0.0 && s < plan.max_durations(k, d)) ? 1 : 0;
            }
        CHECK(fractional <= 1);
    }
}

TEST_CASE("threshold setpoint CSV round trip")
{
    const auto avg = averages({{100.0, 20.0}, {200.0, 0.0}});
    const auto loads = testing::loads({0.6, 0.4});
    const auto plan = plan_afg(avg, loads, kTariff, Budget::of(3.1));
    std::stringstream csv;
    write_threshold_csv(csv, plan, loads);
    const auto back = read_threshold_csv(csv, loads, 2);
    CHECK(back.thresholds == plan.thresholds);
    CHECK(back.recharges == plan.recharges);
    std::istringstream bad("day,load,threshold_dollars\n1,nobody,1\n");
    CHECK_THROWS(read_threshold_csv(bad, loads, 2));
}

TEST_CASE("input validation")
{
    const auto avg = averages({{100.0}});
    CHECK_THROWS_AS(solve_greedy(avg, testing::loads({0.5, 0.5}), kTariff, Budget::of(1.0)), ShapeMismatch);
}

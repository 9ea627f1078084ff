#include "helpers.hpp"

#include "prepaid/errors.hpp"
#include "prepaid/model.hpp"
#include "prepaid/sim.hpp"

#include <doctest.h>

#include <random>

using namespace prepaid;
using testing::series;

TEST_CASE("budget is the fraction of the full cost")
{
    const auto d = series(1.0, 1, {std::vector<double>(24, 100.0)});
    const auto tariff = Tariff::per_wh(0.001);
    CHECK(compute_budget(d, tariff, 0.7).initial_balance == doctest::Approx(1.68).epsilon(1e-12));
    CHECK(compute_budget(d, tariff, 0.0).initial_balance == 0.0);
    CHECK_THROWS_AS(compute_budget(d, tariff, -0.1), InvalidArgument);
}

TEST_CASE("full budget lets the baseline serve everything")
{
    const auto d = series(1.0, 2, {std::vector<double>(48, 250.0), std::vector<double>(48, 40.0)});
    const auto tariff = Tariff::per_kwh(0.2);
    const auto budget = compute_budget(d, tariff, 1.0);
    const auto r = simulate_baseline(d, testing::loads({0.5, 0.5}), tariff, budget);
    CHECK(r.total_spend == doctest::Approx(budget.initial_balance).epsilon(1e-12));
    CHECK(r.psf() == doctest::Approx(1.0));
    CHECK(r.disconnection_days == 0);
    testing::check_money(r, d, tariff, budget);
}

TEST_CASE("demand indicator is strictly positive power")
{
    const auto d = series(8.0, 1, {{0.0, 5.0, 0.0}, {1e-9, 0.0, 0.0}});
    const auto ind = demand_indicator(d);
    CHECK(ind(0, 0) == 0);
    CHECK(ind(0, 1) == 1);
    CHECK(ind(0, 2) == 0);
    CHECK(ind(1, 0) == 1);
    const auto zero = demand_indicator(series(8.0, 1, {{0.0, 0.0, 0.0}}));
    for (auto v : zero.values())
        CHECK(v == 0);
}

TEST_CASE("daily average")
{
    CHECK(daily_average(series(12.0, 1, {{0.0, 400.0}})).power(0, 0) == doctest::Approx(200.0));
    CHECK(daily_average(series(1.0, 1, {std::vector<double>(24, 100.0)})).power(0, 0) == doctest::Approx(100.0));
}

TEST_CASE("daily average preserves cost on random series")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> power(0.0, 2000.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        const std::size_t days = 1 + trial % 4;
        std::vector<std::vector<double>> rows(3, std::vector<double>(days * 96));
        for (auto& r : rows)
            for (auto& v : r)
                v = rng() % 3 == 0 ? 0.0 : power(rng);
        const auto d = series(0.25, days, rows);
        const auto avg = daily_average(d);
        for (std::size_t k = 0; k < 3; ++k)
        {
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t day = 0; day < days; ++day)
                lhs += 0.001 * 24.0 * avg.power(k, day);
            for (double v : rows[k])
                rhs += 0.001 * 0.25 * v;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("service factors")
{
    BinaryMatrix d(1, 4, 1), a(1, 4, 1);
    a(0, 3) = 0;
    const auto one = psf(a, d, testing::loads({1.0}));
    CHECK(*one.sf[0] == doctest::Approx(0.75));
    CHECK(one.psf == doctest::Approx(0.75));

    BinaryMatrix d2(2, 24, 1), a2(2, 24, 0);
    for (std::size_t t = 0; t < 24; ++t)
        a2(0, t) = 1;
    for (std::size_t t = 0; t < 3; ++t)
        a2(1, t) = 1;
    CHECK(psf(a2, d2, testing::loads({0.7, 0.3})).psf == doctest::Approx(0.7375).epsilon(1e-12));
    CHECK(psf(d2, d2, testing::loads({0.7, 0.2})).psf == doctest::Approx(0.9));
}

TEST_CASE("never-demanded loads are excluded from the PSF")
{
    BinaryMatrix d(2, 2, 0);
    d(0, 0) = d(0, 1) = 1;
    const auto r = psf(d, d, testing::loads({0.6, 0.4}));
    CHECK(r.sf[0].has_value());
    CHECK_FALSE(r.sf[1].has_value());
    CHECK(r.psf == doctest::Approx(0.6));
    CHECK(r.excluded() == std::vector<std::size_t>{1});
}

TEST_CASE("actuating without demand is rejected")
{
    BinaryMatrix d(1, 2, 0), a(1, 2, 0);
    d(0, 0) = 1;
    a(0, 1) = 1;
    CHECK_THROWS_AS(psf(a, d, testing::loads({1.0})), InvalidArgument);
}

TEST_CASE("domain validation")
{
    CHECK_THROWS_AS(LoadSet({{"a", 1.0}, {"a", 0.5}}), InvalidArgument);
    CHECK_THROWS_AS(LoadSet({{"a", 0.0}}), InvalidArgument);
    CHECK_THROWS_AS(TimeGrid::from_step_minutes(7, 1), InvalidArgument);
    CHECK(TimeGrid::from_step_minutes(15, 30).total_steps() == 2880);
    CHECK_THROWS_AS(Tariff::per_wh(-1.0), InvalidArgument);
    CHECK_THROWS_AS(Budget::of(-1.0), InvalidArgument);
    CHECK_THROWS_AS(DemandSeries(TimeGrid(1.0, 24, 1), Matrix<double>(1, 23)), ShapeMismatch);
    CHECK_THROWS_AS(DemandSeries(TimeGrid(1.0, 24, 1), Matrix<double>(1, 24, -1.0)), InvalidArgument);
    CHECK_THROWS_AS(series(1.0, 1, {std::vector<double>(24, 1.0)}).require_loads(testing::loads({0.5, 0.5})),
                    ShapeMismatch);
}

TEST_CASE("slicing days")
{
    std::vector<double> row(72);
    for (std::size_t t = 0; t < row.size(); ++t)
        row[t] = static_cast<double>(t);
    const auto s = series(1.0, 3, {row}).slice_days(1, 2);
    CHECK(s.grid().num_days() == 2);
    CHECK(s(0, 0) == 24.0);
    CHECK(s(0, 47) == 71.0);
    CHECK_THROWS(series(1.0, 3, {row}).slice_days(2, 2));
}

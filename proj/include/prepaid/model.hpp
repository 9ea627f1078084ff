#pragma once

// Domain types shared by every rationing policy, plus budget and
// service-factor metrics.

#include "prepaid/matrix.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace prepaid {

/// Absolute tolerance for money conservation checks ($).
inline constexpr double kMoneyTolerance = 1e-9;

/// Relative margin turning the strict budget inequality `spend < Z` into
/// `spend <= Z (1 - kBudgetDelta)`.
inline constexpr double kBudgetDelta = 1e-9;

struct Load
{
    std::string name;
    double gamma = 1.0;  ///< priority factor, > 0
};

/// Ordered set of loads with unique names and positive priority factors.
class LoadSet
{
public:
    LoadSet() = default;
    explicit LoadSet(std::vector<Load> loads);

    std::size_t size() const noexcept { return loads_.size(); }
    bool empty() const noexcept { return loads_.empty(); }
    const Load& operator[](std::size_t k) const { return loads_[k]; }
    auto begin() const noexcept { return loads_.begin(); }
    auto end() const noexcept { return loads_.end(); }

    double gamma(std::size_t k) const { return loads_[k].gamma; }
    double gamma_sum() const noexcept;
    std::optional<std::size_t> index_of(const std::string& name) const;

private:
    std::vector<Load> loads_;
};

/// Uniform time grid. step_hours * steps_per_day == 24.
class TimeGrid
{
public:
    TimeGrid() = default;
    TimeGrid(double step_hours, std::size_t steps_per_day, std::size_t num_days);

    /// Grid with `step_minutes`-long steps; the step must divide a day.
    static TimeGrid from_step_minutes(int step_minutes, std::size_t num_days);

    double step_hours() const noexcept { return step_hours_; }
    std::size_t steps_per_day() const noexcept { return steps_per_day_; }
    std::size_t num_days() const noexcept { return num_days_; }
    std::size_t total_steps() const noexcept { return steps_per_day_ * num_days_; }

    std::size_t day_of(std::size_t step) const noexcept { return step / steps_per_day_; }
    std::size_t day_begin(std::size_t day) const noexcept { return day * steps_per_day_; }

    TimeGrid with_days(std::size_t num_days) const { return {step_hours_, steps_per_day_, num_days}; }

    bool operator==(const TimeGrid&) const = default;

private:
    double step_hours_ = 1.0;
    std::size_t steps_per_day_ = 24;
    std::size_t num_days_ = 1;
};

struct Tariff
{
    double alpha = 0.0;  ///< $/Wh

    static Tariff per_wh(double alpha);
    static Tariff per_kwh(double dollars_per_kwh) { return per_wh(dollars_per_kwh / 1000.0); }
};

struct Budget
{
    double initial_balance = 0.0;  ///< Z in $

    static Budget of(double dollars);
    /// Spend ceiling standing in for the strict `< Z` constraint.
    double spend_cap() const noexcept { return initial_balance * (1.0 - kBudgetDelta); }
};

/// Per-load power demand (W) on a uniform grid: rows = loads, cols = steps.
class DemandSeries
{
public:
    DemandSeries() = default;
    DemandSeries(TimeGrid grid, Matrix<double> power);

    const TimeGrid& grid() const noexcept { return grid_; }
    const Matrix<double>& power() const noexcept { return power_; }
    double operator()(std::size_t load, std::size_t step) const { return power_(load, step); }

    std::size_t num_loads() const noexcept { return power_.rows(); }

    /// Days [first_day, first_day + num_days) as a new series.
    DemandSeries slice_days(std::size_t first_day, std::size_t num_days) const;

    /// Throws ShapeMismatch unless the series has one row per load.
    void require_loads(const LoadSet& loads) const;

    bool operator==(const DemandSeries&) const = default;

private:
    TimeGrid grid_;
    Matrix<double> power_;
};

/// Daily average power per load (W): rows = loads, cols = days.
struct DailyAverageDemand
{
    Matrix<double> power;

    std::size_t num_loads() const noexcept { return power.rows(); }
    std::size_t num_days() const noexcept { return power.cols(); }
};

/// Z = fraction * alpha * dT * sum of all demand.
Budget compute_budget(const DemandSeries& demand, const Tariff& tariff, double fraction);

/// d_{k,t} = 1 exactly when P_{k,t} > 0.
BinaryMatrix demand_indicator(const DemandSeries& demand);

/// Daily energy divided by 24 h.
DailyAverageDemand daily_average(const DemandSeries& demand);

/// Energy cost of the served steps: alpha * dT * sum P a.
double served_cost(const DemandSeries& demand, const BinaryMatrix& actuation, const Tariff& tariff);

struct ServiceFactors
{
    /// SF per load; empty for loads never demanded (excluded from the PSF).
    std::vector<std::optional<double>> sf;
    double psf = 0.0;

    std::vector<std::size_t> excluded() const;
};

/// Service factors and their priority-weighted sum.
/// Throws InvalidArgument if a load is actuated where it has no demand.
ServiceFactors psf(const BinaryMatrix& actuation, const BinaryMatrix& indicator, const LoadSet& loads);

}  // namespace prepaid

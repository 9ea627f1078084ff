#include "prepaid/model.hpp"

#include "prepaid/errors.hpp"

#include <cmath>
#include <numeric>
#include <unordered_set>

namespace prepaid {

LoadSet::LoadSet(std::vector<Load> loads) : loads_(std::move(loads))
{
    std::unordered_set<std::string> seen;
    for (const auto& load : loads_)
    {
        if (!(load.gamma > 0.0) || !std::isfinite(load.gamma))
            throw InvalidArgument("load '" + load.name + "' has non-positive priority factor");
        if (!seen.insert(load.name).second)
            throw InvalidArgument("duplicate load name '" + load.name + "'");
    }
}

double LoadSet::gamma_sum() const noexcept
{
    double sum = 0.0;
    for (const auto& load : loads_)
        sum += load.gamma;
    return sum;
}

std::optional<std::size_t> LoadSet::index_of(const std::string& name) const
{
    for (std::size_t k = 0; k < loads_.size(); ++k)
        if (loads_[k].name == name)
            return k;
    return std::nullopt;
}

TimeGrid::TimeGrid(double step_hours, std::size_t steps_per_day, std::size_t num_days)
    : step_hours_(step_hours), steps_per_day_(steps_per_day), num_days_(num_days)
{
    if (!(step_hours > 0.0) || steps_per_day == 0 || num_days == 0)
        throw InvalidArgument("time grid needs a positive step, steps per day and day count");
    if (std::abs(step_hours * static_cast<double>(steps_per_day) - 24.0) > 1e-12)
        throw InvalidArgument("time grid steps must tile exactly 24 hours");
}

TimeGrid TimeGrid::from_step_minutes(int step_minutes, std::size_t num_days)
{
    if (step_minutes <= 0 || 1440 % step_minutes != 0)
        throw InvalidArgument("step minutes must divide 1440, got " + std::to_string(step_minutes));
    return {step_minutes / 60.0, static_cast<std::size_t>(1440 / step_minutes), num_days};
}

Tariff Tariff::per_wh(double alpha)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InvalidArgument("electricity rate must be positive");
    return Tariff{alpha};
}

Budget Budget::of(double dollars)
{
    if (!(dollars >= 0.0) || !std::isfinite(dollars))
        throw InvalidArgument("initial balance must be non-negative");
    return Budget{dollars};
}

DemandSeries::DemandSeries(TimeGrid grid, Matrix<double> power) : grid_(grid), power_(std::move(power))
{
    if (power_.cols() != grid_.total_steps())
        throw ShapeMismatch("demand has " + std::to_string(power_.cols()) + " steps, grid expects "
                            + std::to_string(grid_.total_steps()));
    for (double p : power_.values())
        if (!(p >= 0.0) || !std::isfinite(p))
            throw InvalidArgument("demand must be finite and non-negative");
}

DemandSeries DemandSeries::slice_days(std::size_t first_day, std::size_t num_days) const
{
    if (num_days == 0 || first_day + num_days > grid_.num_days())
        throw InvalidArgument("day slice out of range");
    const std::size_t spd = grid_.steps_per_day();
    Matrix<double> out(num_loads(), spd * num_days);
    for (std::size_t k = 0; k < num_loads(); ++k)
        for (std::size_t t = 0; t < spd * num_days; ++t)
            out(k, t) = power_(k, first_day * spd + t);
    return {grid_.with_days(num_days), std::move(out)};
}

void DemandSeries::require_loads(const LoadSet& loads) const
{
    if (num_loads() != loads.size())
        throw ShapeMismatch("demand has " + std::to_string(num_loads()) + " loads, load set has "
                            + std::to_string(loads.size()));
}

Budget compute_budget(const DemandSeries& demand, const Tariff& tariff, double fraction)
{
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw InvalidArgument("budget fraction must lie in [0, 1]");
    const auto values = demand.power().values();
    const double energy_wh = std::accumulate(values.begin(), values.end(), 0.0) * demand.grid().step_hours();
    return Budget::of(fraction * tariff.alpha * energy_wh);
}

BinaryMatrix demand_indicator(const DemandSeries& demand)
{
    const auto& p = demand.power();
    BinaryMatrix d(p.rows(), p.cols(), 0);
    for (std::size_t k = 0; k < p.rows(); ++k)
        for (std::size_t t = 0; t < p.cols(); ++t)
            d(k, t) = p(k, t) > 0.0 ? 1 : 0;
    return d;
}

DailyAverageDemand daily_average(const DemandSeries& demand)
{
    const auto& grid = demand.grid();
    Matrix<double> avg(demand.num_loads(), grid.num_days());
    for (std::size_t k = 0; k < demand.num_loads(); ++k)
    {
        for (std::size_t day = 0; day < grid.num_days(); ++day)
        {
            double energy = 0.0;
            for (std::size_t j = 0; j < grid.steps_per_day(); ++j)
                energy += demand(k, grid.day_begin(day) + j);
            avg(k, day) = energy * grid.step_hours() / 24.0;
        }
    }
    return {std::move(avg)};
}

double served_cost(const DemandSeries& demand, const BinaryMatrix& actuation, const Tariff& tariff)
{
    if (actuation.rows() != demand.num_loads() || actuation.cols() != demand.grid().total_steps())
        throw ShapeMismatch("actuation matrix does not match demand");
    double energy = 0.0;
    for (std::size_t k = 0; k < actuation.rows(); ++k)
        for (std::size_t t = 0; t < actuation.cols(); ++t)
            if (actuation(k, t))
                energy += demand(k, t);
    return tariff.alpha * demand.grid().step_hours() * energy;
}

std::vector<std::size_t> ServiceFactors::excluded() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < sf.size(); ++k)
        if (!sf[k])
            out.push_back(k);
    return out;
}

ServiceFactors psf(const BinaryMatrix& actuation, const BinaryMatrix& indicator, const LoadSet& loads)
{
    if (actuation.rows() != indicator.rows() || actuation.cols() != indicator.cols()
        || indicator.rows() != loads.size())
        throw ShapeMismatch("actuation, indicator and load set disagree in shape");

    ServiceFactors result;
    result.sf.resize(loads.size());
    for (std::size_t k = 0; k < loads.size(); ++k)
    {
        std::size_t demanded = 0;
        std::size_t served = 0;
        for (std::size_t t = 0; t < indicator.cols(); ++t)
        {
            if (actuation(k, t) > indicator(k, t))
                throw InvalidArgument("load '" + loads[k].name + "' actuated without demand at step "
                                      + std::to_string(t));
            demanded += indicator(k, t);
            served += actuation(k, t);
        }
        if (demanded == 0)
            continue;
        const double sf = static_cast<double>(served) / static_cast<double>(demanded);
        result.sf[k] = sf;
        result.psf += loads.gamma(k) * sf;
    }
    return result;
}

}  // namespace prepaid

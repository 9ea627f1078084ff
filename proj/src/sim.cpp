#include "prepaid/sim.hpp"

#include "prepaid/errors.hpp"
#include "prepaid/format.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace prepaid {

namespace {

SimResult empty_result(const DemandSeries& truth, bool with_virtual)
{
    const std::size_t T = truth.grid().total_steps();
    SimResult r;
    r.actuation = BinaryMatrix(truth.num_loads(), T, 0);
    r.real_balance.assign(T + 1, 0.0);
    if (with_virtual)
        r.virtual_balance.assign(T + 1, 0.0);
    r.connected.assign(T, 0);
    return r;
}

void finish(SimResult& r, const DemandSeries& truth, const LoadSet& loads)
{
    r.service = psf(r.actuation, demand_indicator(truth), loads);
    r.disconnection_days = count_disconnection_days(std::span<const std::uint8_t>(r.connected), truth.grid());
}

}  // namespace

ThresholdSimulator::ThresholdSimulator(const DemandSeries& truth, const Tariff& tariff)
    : truth_(truth), step_cost_(truth.num_loads(), truth.grid().total_steps(), 0.0)
{
    const double per_step = tariff.alpha * truth.grid().step_hours();
    for (std::size_t k = 0; k < truth.num_loads(); ++k)
        for (std::size_t t = 0; t < truth.grid().total_steps(); ++t)
            step_cost_(k, t) = per_step * truth(k, t);
}

void ThresholdSimulator::run_day(State& state,
                                 std::size_t day,
                                 std::span<const double> thresholds,
                                 double recharge,
                                 bool latching,
                                 bool carry_over,
                                 std::span<std::size_t> served,
                                 SimResult* trace) const
{
    const std::size_t K = truth_.num_loads();
    const std::size_t spd = truth_.grid().steps_per_day();
    const std::size_t begin = truth_.grid().day_begin(day);

    state.virtual_balance = carry_over ? state.virtual_balance + recharge : recharge;

    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return thresholds[a] < thresholds[b]; });

    std::vector<std::uint8_t> latched(K, 0);
    std::vector<std::uint8_t> selected(K, 0);
    for (std::size_t j = 0; j < spd; ++j)
    {
        const std::size_t t = begin + j;
        if (trace)
        {
            trace->real_balance[t] = state.real_balance;
            trace->virtual_balance[t] = state.virtual_balance;
        }

        double cost = 0.0;
        std::fill(selected.begin(), selected.end(), 0);
        if (state.connected)
        {
            for (std::size_t k : order)
            {
                if (latched[k] || truth_(k, t) <= 0.0)
                    continue;
                const double c = step_cost_(k, t);
                if (state.virtual_balance - (cost + c) >= thresholds[k] - kThresholdTolerance)
                {
                    selected[k] = 1;
                    cost += c;
                }
                else if (latching)
                {
                    latched[k] = 1;
                }
            }
            if (latching)
                for (std::size_t k = 0; k < K; ++k)
                    if (!selected[k] && state.virtual_balance - cost < thresholds[k] - kThresholdTolerance)
                        latched[k] = 1;

            if (state.real_balance <= 0.0 || state.real_balance - cost < -kMoneyTolerance)
            {
                state.connected = false;
                state.disconnect_step = t;
            }
        }

        if (state.connected)
        {
            for (std::size_t k = 0; k < K; ++k)
            {
                if (!selected[k])
                    continue;
                ++served[k];
                if (trace)
                    trace->actuation(k, t) = 1;
            }
            state.real_balance -= cost;
            state.virtual_balance -= cost;
            if (trace)
                trace->total_spend += cost;
        }
        if (trace)
            trace->connected[t] = state.connected ? 1 : 0;
    }
}

SimResult simulate_thresholds(const ThresholdPlan& plan,
                              const DemandSeries& truth,
                              const LoadSet& loads,
                              const Tariff& tariff,
                              const Budget& budget)
{
    truth.require_loads(loads);
    const std::size_t D = truth.grid().num_days();
    if (plan.num_loads() != loads.size() || plan.num_days() != D || plan.recharges.size() != D)
        throw ShapeMismatch("threshold plan does not cover every load and day of the demand series");

    const ThresholdSimulator sim(truth, tariff);
    SimResult r = empty_result(truth, true);
    auto state = sim.initial_state(budget);
    std::vector<std::size_t> served(loads.size(), 0);
    std::vector<double> column(loads.size());
    for (std::size_t d = 0; d < D; ++d)
    {
        for (std::size_t k = 0; k < loads.size(); ++k)
            column[k] = plan.thresholds(k, d);
        sim.run_day(state, d, column, plan.recharges[d], plan.latching, plan.carry_over, served, &r);
    }
    const std::size_t T = truth.grid().total_steps();
    r.real_balance[T] = state.real_balance;
    r.virtual_balance[T] = state.virtual_balance;
    r.first_disconnect_step = state.disconnect_step;
    finish(r, truth, loads);
    return r;
}

namespace {

// Serves every requested step that has demand, while the real wallet lasts.
template <typename Requested>
SimResult run_fixed(const DemandSeries& truth,
                    const LoadSet& loads,
                    const Tariff& tariff,
                    const Budget& budget,
                    Requested requested)
{
    truth.require_loads(loads);
    const std::size_t K = loads.size();
    const std::size_t T = truth.grid().total_steps();
    const double per_step = tariff.alpha * truth.grid().step_hours();

    SimResult r = empty_result(truth, false);
    double balance = budget.initial_balance;
    bool connected = true;
    for (std::size_t t = 0; t < T; ++t)
    {
        r.real_balance[t] = balance;
        double cost = 0.0;
        if (connected)
        {
            for (std::size_t k = 0; k < K; ++k)
                if (truth(k, t) > 0.0 && requested(k, t))
                    cost += per_step * truth(k, t);
            if (balance <= 0.0 || balance - cost < -kMoneyTolerance)
            {
                connected = false;
                r.first_disconnect_step = t;
            }
        }
        if (connected)
        {
            for (std::size_t k = 0; k < K; ++k)
                if (truth(k, t) > 0.0 && requested(k, t))
                    r.actuation(k, t) = 1;
            balance -= cost;
            r.total_spend += cost;
        }
        r.connected[t] = connected ? 1 : 0;
    }
    r.real_balance[T] = balance;
    finish(r, truth, loads);
    return r;
}

}  // namespace

SimResult simulate_schedule(const BinaryMatrix& schedule,
                            const DemandSeries& truth,
                            const LoadSet& loads,
                            const Tariff& tariff,
                            const Budget& budget)
{
    if (schedule.rows() != truth.num_loads() || schedule.cols() != truth.grid().total_steps())
        throw ShapeMismatch("schedule shape differs from the demand series");
    return run_fixed(truth, loads, tariff, budget,
                     [&](std::size_t k, std::size_t t) { return schedule(k, t) != 0; });
}

SimResult simulate_baseline(const DemandSeries& truth, const LoadSet& loads, const Tariff& tariff, const Budget& budget)
{
    return run_fixed(truth, loads, tariff, budget, [](std::size_t, std::size_t) { return true; });
}

std::size_t count_disconnection_days(std::span<const double> real_balance_trace, const TimeGrid& grid)
{
    if (real_balance_trace.size() < grid.total_steps())
        throw ShapeMismatch("balance trace shorter than the horizon");
    std::size_t days = 0;
    for (std::size_t d = 0; d < grid.num_days(); ++d)
    {
        const auto first = real_balance_trace.begin() + static_cast<std::ptrdiff_t>(grid.day_begin(d));
        if (std::all_of(first, first + static_cast<std::ptrdiff_t>(grid.steps_per_day()),
                        [](double z) { return z <= 0.0; }))
            ++days;
    }
    return days;
}

std::size_t count_disconnection_days(std::span<const std::uint8_t> connected, const TimeGrid& grid)
{
    if (connected.size() < grid.total_steps())
        throw ShapeMismatch("supply trace shorter than the horizon");
    std::size_t days = 0;
    for (std::size_t d = 0; d < grid.num_days(); ++d)
    {
        const auto first = connected.begin() + static_cast<std::ptrdiff_t>(grid.day_begin(d));
        if (std::none_of(first, first + static_cast<std::ptrdiff_t>(grid.steps_per_day()),
                         [](std::uint8_t on) { return on != 0; }))
            ++days;
    }
    return days;
}

void write_trace_csv(std::ostream& out, const SimResult& result, const LoadSet& loads)
{
    const std::size_t T = result.connected.size();
    if (result.actuation.rows() != loads.size())
        throw ShapeMismatch("trace does not match the load set");
    out << "t,real_balance,virtual_balance,connected";
    for (const auto& load : loads)
        out << ",a_" << load.name;
    out << '\n';
    for (std::size_t t = 0; t <= T; ++t)
    {
        out << t << ',' << format_number(result.real_balance[t]) << ',';
        if (!result.virtual_balance.empty())
            out << format_number(result.virtual_balance[t]);
        out << ',';
        if (t < T)
            out << int(result.connected[t]);
        for (std::size_t k = 0; k < loads.size(); ++k)
        {
            out << ',';
            if (t < T)
                out << int(result.actuation(k, t));
        }
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const SimResult& result, const LoadSet& loads)
{
    out << "metric,value\n";
    out << "psf," << format_number(result.psf()) << '\n';
    out << "total_spend," << format_number(result.total_spend) << '\n';
    out << "final_balance," << format_number(result.final_balance()) << '\n';
    out << "disconnection_days," << result.disconnection_days << '\n';
    out << "first_disconnect_step,";
    if (result.first_disconnect_step)
        out << *result.first_disconnect_step;
    out << '\n';
    for (std::size_t k = 0; k < loads.size(); ++k)
    {
        out << "sf_" << loads[k].name << ',';
        const auto& sf = result.service.sf[k];
        out << (sf ? format_number(*sf) : std::string("NA")) << '\n';
    }
}

}  // namespace prepaid

#include "prepaid/afg.hpp"

#include "prepaid/errors.hpp"
#include "prepaid/format.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace prepaid {

Matrix<double> max_durations(const DailyAverageDemand& avg)
{
    Matrix<double> smax(avg.num_loads(), avg.num_days(), 0.0);
    for (std::size_t k = 0; k < avg.num_loads(); ++k)
        for (std::size_t d = 0; d < avg.num_days(); ++d)
            smax(k, d) = avg.power(k, d) > 0.0 ? 24.0 : 0.0;
    return smax;
}

EnablePlan solve_greedy(const DailyAverageDemand& avg, const LoadSet& loads, const Tariff& tariff, const Budget& budget)
{
    if (avg.num_loads() != loads.size())
        throw ShapeMismatch("daily averages and load set disagree on the number of loads");

    EnablePlan plan;
    plan.max_durations = max_durations(avg);
    plan.durations = Matrix<double>(avg.num_loads(), avg.num_days(), 0.0);

    struct Item
    {
        std::size_t load;
        std::size_t day;
        double ratio;
        double weight;  // $ per enabled hour
    };

    std::vector<Item> items;
    for (std::size_t k = 0; k < loads.size(); ++k)
    {
        double horizon_hours = 0.0;
        for (std::size_t d = 0; d < avg.num_days(); ++d)
            horizon_hours += plan.max_durations(k, d);
        if (horizon_hours == 0.0)
            continue;
        const double benefit = loads.gamma(k) / horizon_hours;
        for (std::size_t d = 0; d < avg.num_days(); ++d)
        {
            const double weight = tariff.alpha * avg.power(k, d);
            assert((weight > 0.0) == (plan.max_durations(k, d) > 0.0));
            if (weight > 0.0)
                items.push_back({k, d, benefit / weight, weight});
        }
    }

    std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
        if (a.ratio != b.ratio)
            return a.ratio > b.ratio;
        if (loads.gamma(a.load) != loads.gamma(b.load))
            return loads.gamma(a.load) > loads.gamma(b.load);
        if (a.day != b.day)
            return a.day < b.day;
        return a.load < b.load;
    });

    const double cap = budget.spend_cap();
    double spent = 0.0;
    for (const auto& item : items)
    {
        const double smax = plan.max_durations(item.load, item.day);
        const double cost = item.weight * smax;
        if (spent + cost <= cap)
        {
            plan.durations(item.load, item.day) = smax;
            spent += cost;
            continue;
        }
        // First item that does not fit whole takes the leftover; everything
        // ranked below it stays disabled.
        const double s = std::clamp((cap - spent) / item.weight, 0.0, smax);
        plan.durations(item.load, item.day) = s;
        if (s > 0.0 && s < smax)
            plan.marginal = std::pair{item.load, item.day};
        break;
    }
    return plan;
}

double planned_psf(const EnablePlan& plan, const LoadSet& loads)
{
    double psf = 0.0;
    for (std::size_t k = 0; k < plan.durations.rows(); ++k)
    {
        double enabled = 0.0;
        double horizon = 0.0;
        for (std::size_t d = 0; d < plan.durations.cols(); ++d)
        {
            enabled += plan.durations(k, d);
            horizon += plan.max_durations(k, d);
        }
        if (horizon > 0.0)
            psf += loads.gamma(k) * enabled / horizon;
    }
    return psf;
}

std::vector<double> compute_recharges(const EnablePlan& plan, const DailyAverageDemand& avg, const Tariff& tariff)
{
    std::vector<double> recharges(avg.num_days(), 0.0);
    for (std::size_t d = 0; d < avg.num_days(); ++d)
        for (std::size_t k = 0; k < avg.num_loads(); ++k)
            recharges[d] += tariff.alpha * plan.durations(k, d) * avg.power(k, d);
    return recharges;
}

ThresholdPlan compute_thresholds(const EnablePlan& plan,
                                 const std::vector<double>& recharges,
                                 const DailyAverageDemand& avg,
                                 const Tariff& tariff)
{
    if (recharges.size() != avg.num_days() || plan.durations.cols() != avg.num_days()
        || plan.durations.rows() != avg.num_loads())
        throw ShapeMismatch("plan, recharges and averages disagree in shape");

    ThresholdPlan out;
    out.thresholds = Matrix<double>(avg.num_loads(), avg.num_days(), 0.0);
    out.recharges = recharges;
    out.latching = true;
    out.carry_over = false;

    for (std::size_t d = 0; d < avg.num_days(); ++d)
    {
        double enabled_power = 0.0;
        for (std::size_t n = 0; n < avg.num_loads(); ++n)
            if (plan.durations(n, d) > 0.0)
                enabled_power += avg.power(n, d);

        const double recharge = recharges[d];
        for (std::size_t k = 0; k < avg.num_loads(); ++k)
        {
            const double s = plan.durations(k, d);
            double& threshold = out.thresholds(k, d);
            if (s == 0.0)
                threshold = recharge + kDisabledThresholdOffset;
            else if (s == plan.max_durations(k, d))
                threshold = 0.0;
            else
                threshold = std::clamp(recharge - tariff.alpha * s * enabled_power, 0.0, recharge);
        }
    }
    return out;
}

ThresholdPlan plan_afg(const DailyAverageDemand& avg, const LoadSet& loads, const Tariff& tariff, const Budget& budget)
{
    const auto plan = solve_greedy(avg, loads, tariff, budget);
    return compute_thresholds(plan, compute_recharges(plan, avg, tariff), avg, tariff);
}

namespace {

constexpr std::string_view kRechargeTag = "__recharge__";

}  // namespace

void write_threshold_csv(std::ostream& out, const ThresholdPlan& plan, const LoadSet& loads)
{
    if (plan.num_loads() != loads.size() || plan.recharges.size() != plan.num_days())
        throw ShapeMismatch("threshold plan does not match the load set");
    out << "day,load,threshold_dollars\n";
    for (std::size_t d = 0; d < plan.num_days(); ++d)
    {
        for (std::size_t k = 0; k < loads.size(); ++k)
            out << d + 1 << ',' << loads[k].name << ',' << format_number(plan.thresholds(k, d)) << '\n';
        out << d + 1 << ',' << kRechargeTag << ',' << format_number(plan.recharges[d]) << '\n';
    }
}

void write_threshold_csv(const std::filesystem::path& path, const ThresholdPlan& plan, const LoadSet& loads)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    write_threshold_csv(out, plan, loads);
}

ThresholdPlan read_threshold_csv(std::istream& in, const LoadSet& loads, std::size_t num_days)
{
    ThresholdPlan plan;
    plan.thresholds = Matrix<double>(loads.size(), num_days, 0.0);
    plan.recharges.assign(num_days, 0.0);
    Matrix<std::uint8_t> seen(loads.size() + 1, num_days, 0);

    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line))
    {
        if (line.empty() || line == "\r")
            continue;
        std::istringstream fields(line);
        std::string day_text, name, value_text;
        std::getline(fields, day_text, ',');
        std::getline(fields, name, ',');
        std::getline(fields, value_text);
        if (!value_text.empty() && value_text.back() == '\r')
            value_text.pop_back();
        const std::size_t day = std::stoul(day_text);
        const double value = std::stod(value_text);
        if (day == 0 || day > num_days)
            throw InvalidArgument("setpoint day out of range: " + day_text);
        if (name == kRechargeTag)
        {
            plan.recharges[day - 1] = value;
            seen(loads.size(), day - 1) = 1;
            continue;
        }
        const auto k = loads.index_of(name);
        if (!k)
            throw InvalidArgument("unknown load in setpoints: " + name);
        plan.thresholds(*k, day - 1) = value;
        seen(*k, day - 1) = 1;
    }
    for (auto flag : seen.values())
        if (!flag)
            throw InvalidArgument("setpoint file is missing entries");
    return plan;
}

}  // namespace prepaid

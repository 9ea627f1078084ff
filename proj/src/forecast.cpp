#include "prepaid/forecast.hpp"

#include "prepaid/errors.hpp"
#include "prepaid/format.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace prepaid {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return fields;
}

bool parse_double(std::string_view text, double& out)
{
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end && !text.empty();
}

std::string iso_timestamp(std::size_t step, double step_hours)
{
    using namespace std::chrono;
    const auto minutes_total = static_cast<long long>(std::llround(static_cast<double>(step) * step_hours * 60.0));
    const sys_days base = year{2020} / January / 1;
    const sys_days date = base + days{minutes_total / 1440};
    const year_month_day ymd{date};
    const long long minute_of_day = minutes_total % 1440;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:00", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), minute_of_day / 60,
                  minute_of_day % 60);
    return buf;
}

}  // namespace

std::string ForecastSpec::label() const
{
    std::string out = is_perfect() ? "perfect" : "imperfect";
    out += granularity == Granularity::Detailed ? "-detailed" : "-limited";
    return out;
}

DemandSeries ingest_csv(std::istream& in, const LoadSet& loads, const TimeGrid& grid)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw DataError(DataErrorKind::MissingColumn, 1, "empty file, expected a header row");
    ++line_no;

    const auto header = split_commas(line);
    if (header.empty() || header.front() != "timestamp")
        throw DataError(DataErrorKind::MissingColumn, line_no, "first column must be 'timestamp'");

    std::vector<std::size_t> column_of(loads.size());
    for (std::size_t k = 0; k < loads.size(); ++k)
    {
        const auto it = std::find(header.begin() + 1, header.end(), loads[k].name);
        if (it == header.end())
            throw DataError(DataErrorKind::MissingColumn, line_no, "missing column '" + loads[k].name + "'");
        column_of[k] = static_cast<std::size_t>(it - header.begin());
    }

    const std::size_t expected = grid.total_steps();
    Matrix<double> power(loads.size(), expected);
    std::size_t row = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (trim(line).empty())
            continue;
        if (row == expected)
            throw DataError(DataErrorKind::RowCountMismatch, line_no,
                            "more data rows than the " + std::to_string(expected) + " grid steps");
        const auto fields = split_commas(line);
        for (std::size_t k = 0; k < loads.size(); ++k)
        {
            const std::size_t col = column_of[k];
            if (col >= fields.size())
                throw DataError(DataErrorKind::MissingColumn, line_no,
                                "row has no value for '" + loads[k].name + "'");
            double value = 0.0;
            if (!parse_double(fields[col], value) || !std::isfinite(value))
                throw DataError(DataErrorKind::UnparseableNumber, line_no,
                                "cannot parse '" + std::string(fields[col]) + "' for '" + loads[k].name + "'");
            if (value < 0.0)
                throw DataError(DataErrorKind::NegativePower, line_no,
                                "negative power " + std::string(fields[col]) + " for '" + loads[k].name + "'");
            power(k, row) = value;
        }
        ++row;
    }
    if (row != expected)
        throw DataError(DataErrorKind::RowCountMismatch, line_no,
                        "found " + std::to_string(row) + " data rows, grid expects " + std::to_string(expected));
    return {grid, std::move(power)};
}

DemandSeries ingest_csv(const std::filesystem::path& path, const LoadSet& loads, const TimeGrid& grid)
{
    std::ifstream in(path);
    if (!in)
        throw DataError(DataErrorKind::Io, 0, "cannot open " + path.string());
    return ingest_csv(in, loads, grid);
}

void write_demand_csv(std::ostream& out, const DemandSeries& demand, const LoadSet& loads)
{
    demand.require_loads(loads);
    out << "timestamp";
    for (const auto& load : loads)
        out << ',' << load.name;
    out << '\n';
    for (std::size_t t = 0; t < demand.grid().total_steps(); ++t)
    {
        out << iso_timestamp(t, demand.grid().step_hours());
        for (std::size_t k = 0; k < loads.size(); ++k)
            out << ',' << format_number(demand(k, t));
        out << '\n';
    }
}

void write_demand_csv(const std::filesystem::path& path, const DemandSeries& demand, const LoadSet& loads)
{
    std::ofstream out(path);
    if (!out)
        throw DataError(DataErrorKind::Io, 0, "cannot write " + path.string());
    write_demand_csv(out, demand, loads);
    if (!out)
        throw DataError(DataErrorKind::Io, 0, "write failed for " + path.string());
}

std::vector<std::size_t> day_permutation(std::size_t num_days, std::uint64_t seed)
{
    std::vector<std::size_t> order(num_days);
    for (std::size_t i = 0; i < num_days; ++i)
        order[i] = i;
    SplitMix64 rng(seed);
    for (std::size_t i = num_days; i > 1; --i)
    {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

DemandSeries permute_days(const DemandSeries& demand, const std::vector<std::size_t>& order)
{
    const auto& grid = demand.grid();
    if (order.size() != grid.num_days())
        throw ShapeMismatch("day permutation length differs from the number of days");
    const std::size_t spd = grid.steps_per_day();
    Matrix<double> out(demand.num_loads(), grid.total_steps());
    for (std::size_t day = 0; day < order.size(); ++day)
    {
        if (order[day] >= grid.num_days())
            throw InvalidArgument("day permutation entry out of range");
        for (std::size_t k = 0; k < demand.num_loads(); ++k)
            for (std::size_t j = 0; j < spd; ++j)
                out(k, day * spd + j) = demand(k, order[day] * spd + j);
    }
    return {grid, std::move(out)};
}

DemandSeries shuffle_days(const DemandSeries& demand, std::uint64_t seed)
{
    return permute_days(demand, day_permutation(demand.grid().num_days(), seed));
}

DemandSeries to_limited(const DemandSeries& demand)
{
    const auto avg = daily_average(demand);
    const auto& grid = demand.grid();
    Matrix<double> out(demand.num_loads(), grid.total_steps());
    for (std::size_t k = 0; k < demand.num_loads(); ++k)
        for (std::size_t t = 0; t < grid.total_steps(); ++t)
            out(k, t) = avg.power(k, grid.day_of(t));
    return {grid, std::move(out)};
}

DemandSeries forecast_view(const DemandSeries& truth, const ForecastSpec& spec)
{
    DemandSeries view = truth;
    if (const auto* shuffled = std::get_if<ImperfectShuffled>(&spec.fidelity))
        view = shuffle_days(view, shuffled->seed);
    if (spec.granularity == Granularity::Limited)
        view = to_limited(view);
    return view;
}

DemandSeries synth_household(std::uint64_t seed,
                             const LoadSet& loads,
                             const TimeGrid& grid,
                             const std::vector<LoadProfile>& profiles)
{
    if (profiles.size() != loads.size())
        throw InvalidArgument("need one load profile per load");
    for (const auto& p : profiles)
        if (p.rated_power_w < 0.0 || p.on_probability < 0.0 || p.on_probability > 1.0 || p.mean_on_hours < 0.0
            || p.cycles_per_day < 1)
            throw InvalidArgument("invalid load profile");

    const std::size_t spd = grid.steps_per_day();
    Matrix<double> power(loads.size(), grid.total_steps(), 0.0);
    SplitMix64 rng(seed);
    for (std::size_t day = 0; day < grid.num_days(); ++day)
    {
        for (std::size_t k = 0; k < loads.size(); ++k)
        {
            const auto& profile = profiles[k];
            const auto cycles = static_cast<std::size_t>(std::min<int>(profile.cycles_per_day, static_cast<int>(spd)));
            // Fixed draw count per (day, load) keeps other loads' draws stable
            // when one profile changes.
            const double u_on = rng.uniform();
            const double u_len = rng.uniform();
            std::vector<double> u_pos(cycles);
            for (auto& u : u_pos)
                u = rng.uniform();

            if (!(u_on < profile.on_probability))
                continue;
            const double hours = std::clamp(profile.mean_on_hours * (0.5 + u_len), 0.0, 24.0);
            const auto on_steps = static_cast<std::size_t>(std::llround(hours / grid.step_hours()));
            const std::size_t slice = spd / cycles;
            for (std::size_t c = 0; c < cycles; ++c)
            {
                const std::size_t slice_begin = c * slice;
                const std::size_t slice_len = c + 1 == cycles ? spd - slice_begin : slice;
                std::size_t pulse = on_steps / cycles + (c < on_steps % cycles ? 1 : 0);
                pulse = std::min(pulse, slice_len);
                if (pulse == 0)
                    continue;
                const auto offset = static_cast<std::size_t>(u_pos[c] * static_cast<double>(slice_len - pulse + 1));
                for (std::size_t j = 0; j < pulse; ++j)
                    power(k, day * spd + slice_begin + offset + j) = profile.rated_power_w;
            }
        }
    }
    return {grid, std::move(power)};
}

LoadSet default_household_loads()
{
    return LoadSet({{"refrigerator", 0.48}, {"air_compressor", 0.24}, {"microwave", 0.16}, {"washing_machine", 0.12}});
}

std::vector<LoadProfile> default_household_profiles()
{
    return {
        {150.0, 1.0, 9.0, 12},
        {900.0, 0.6, 3.0, 3},
        {1100.0, 0.8, 0.5, 2},
        {500.0, 0.35, 1.5, 1},
    };
}

}  // namespace prepaid

#pragma once

// Load-data ingestion, synthetic households, and the forecast views handed
// to each policy (perfect/shuffled x detailed/daily-average).

#include "prepaid/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace prepaid {

/// splitmix64 generator. Shuffles and synthetic data are bit-reproducible
/// across platforms because nothing here goes through <random> distributions.
class SplitMix64
{
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by modulo reduction (bound > 0).
    std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

private:
    std::uint64_t state_;
};

struct Perfect
{
    bool operator==(const Perfect&) const = default;
};

struct ImperfectShuffled
{
    std::uint64_t seed = 0;
    bool operator==(const ImperfectShuffled&) const = default;
};

using Fidelity = std::variant<Perfect, ImperfectShuffled>;

enum class Granularity
{
    Detailed,
    Limited,
};

struct ForecastSpec
{
    Fidelity fidelity = Perfect{};
    Granularity granularity = Granularity::Detailed;

    bool is_perfect() const noexcept { return std::holds_alternative<Perfect>(fidelity); }
    /// "perfect-detailed", "imperfect-limited", ...
    std::string label() const;

    bool operator==(const ForecastSpec&) const = default;
};

/// Reads `timestamp,<load1>,...,<loadK>` CSV with exactly grid.total_steps() rows.
DemandSeries ingest_csv(const std::filesystem::path& path, const LoadSet& loads, const TimeGrid& grid);
DemandSeries ingest_csv(std::istream& in, const LoadSet& loads, const TimeGrid& grid);

/// Writes the same schema `ingest_csv` reads, timestamps starting 2020-01-01T00:00:00.
void write_demand_csv(const std::filesystem::path& path, const DemandSeries& demand, const LoadSet& loads);
void write_demand_csv(std::ostream& out, const DemandSeries& demand, const LoadSet& loads);

/// Fisher-Yates permutation of [0, num_days) driven by splitmix64(seed).
/// Element i of the result is the source day placed at position i.
std::vector<std::size_t> day_permutation(std::size_t num_days, std::uint64_t seed);

/// Output day i is input day order[i].
DemandSeries permute_days(const DemandSeries& demand, const std::vector<std::size_t>& order);

DemandSeries shuffle_days(const DemandSeries& demand, std::uint64_t seed);

/// Every step of day d for load k becomes that day's average power.
DemandSeries to_limited(const DemandSeries& demand);

/// The series a policy sees as its forecast of `truth`.
DemandSeries forecast_view(const DemandSeries& truth, const ForecastSpec& spec);

struct LoadProfile
{
    double rated_power_w = 0.0;
    double on_probability = 0.0;  ///< chance the load is used on a given day
    double mean_on_hours = 0.0;   ///< mean daily on-time on days it is used
    int cycles_per_day = 1;       ///< on-time is split into this many pulses
};

/// Rectangular-pulse household: on days a load is used its on-time is drawn
/// uniformly from [0.5, 1.5] x mean_on_hours (clipped to the day) and split
/// into `cycles_per_day` equal pulses, one placed at random in each equal
/// slice of the day.
DemandSeries synth_household(std::uint64_t seed,
                             const LoadSet& loads,
                             const TimeGrid& grid,
                             const std::vector<LoadProfile>& profiles);

/// Refrigerator / air compressor / microwave / washing machine with the
/// case-study priorities 0.48, 0.24, 0.16, 0.12.
LoadSet default_household_loads();
std::vector<LoadProfile> default_household_profiles();

}  // namespace prepaid

#pragma once

// Average-forecast greedy policy: enable durations from a fractional
// knapsack over (load, day) items, then the daily virtual recharge and the
// per-load thresholds that realise those durations.

#include "prepaid/model.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace prepaid {

/// Threshold offset ($) that keeps a disabled load above the day's recharge.
inline constexpr double kDisabledThresholdOffset = 1e-4;

struct EnablePlan
{
    Matrix<double> durations;      ///< s_{k,d}, hours
    Matrix<double> max_durations;  ///< s^max_{k,d}, hours
    /// The single (load, day) item with a fractional duration, if any.
    std::optional<std::pair<std::size_t, std::size_t>> marginal;
};

/// Control setpoints of a threshold policy: x_{k,d} plus per-day recharges.
struct ThresholdPlan
{
    Matrix<double> thresholds;   ///< $, rows = loads, cols = days
    std::vector<double> recharges;  ///< X_d, $
    /// Once a load is disabled within a day it stays disabled that day.
    bool latching = false;
    /// Unspent virtual balance is carried into the next day. When false the
    /// virtual wallet starts every day at exactly X_d.
    bool carry_over = true;

    std::size_t num_loads() const noexcept { return thresholds.rows(); }
    std::size_t num_days() const noexcept { return thresholds.cols(); }
};

/// 0 h where the daily average is zero, 24 h otherwise.
Matrix<double> max_durations(const DailyAverageDemand& avg);

/// Optimal enable durations by the ratio greedy. Spend is capped at
/// Z (1 - kBudgetDelta); ties in benefit/cost ratio go to the higher
/// priority load, then the earlier day, then input order.
EnablePlan solve_greedy(const DailyAverageDemand& avg, const LoadSet& loads, const Tariff& tariff, const Budget& budget);

/// PSF the plan promises under its own objective: sum_k gamma_k sum_d s / sum_d s^max.
double planned_psf(const EnablePlan& plan, const LoadSet& loads);

/// X_d = sum_k alpha s_{k,d} Pbar_{k,d}.
std::vector<double> compute_recharges(const EnablePlan& plan, const DailyAverageDemand& avg, const Tariff& tariff);

/// Disabled loads sit at X_d + 1e-4, fully enabled loads at 0, and the
/// marginal load at the balance left after it has run for its duration
/// alongside every other enabled load.
ThresholdPlan compute_thresholds(const EnablePlan& plan,
                                 const std::vector<double>& recharges,
                                 const DailyAverageDemand& avg,
                                 const Tariff& tariff);

/// solve_greedy + compute_recharges + compute_thresholds.
ThresholdPlan plan_afg(const DailyAverageDemand& avg, const LoadSet& loads, const Tariff& tariff, const Budget& budget);

/// Setpoint CSV: `day,load,threshold_dollars` rows plus one
/// `day,__recharge__,X_d` row per day (days are 1-based).
void write_threshold_csv(std::ostream& out, const ThresholdPlan& plan, const LoadSet& loads);
void write_threshold_csv(const std::filesystem::path& path, const ThresholdPlan& plan, const LoadSet& loads);
ThresholdPlan read_threshold_csv(std::istream& in, const LoadSet& loads, std::size_t num_days);

}  // namespace prepaid

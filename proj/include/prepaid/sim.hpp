#pragma once

// Discrete-time ground truth: wallet dynamics under threshold plans, fixed
// schedules, and unrationed use.
//
// Wallet rules shared by every simulator:
//  * the real wallet starts at Z and pays for every served step;
//  * a step is served only if the real balance is positive at its start and
//    still covers the step's cost (to within kMoneyTolerance). Otherwise the
//    customer is disconnected, nothing is served, and supply stays off for
//    the rest of the horizon.
// Threshold plans add a virtual wallet recharged at each day start. A load
// runs at a step only if, after paying for it together with every
// lower-threshold load running that step, the virtual balance stays at or
// above its threshold (to within kThresholdTolerance).

#include "prepaid/afg.hpp"
#include "prepaid/model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace prepaid {

/// Virtual balances within this many dollars of a threshold count as reaching it.
inline constexpr double kThresholdTolerance = 1e-6;

struct SimResult
{
    BinaryMatrix actuation;
    /// Balance at the start of every step, followed by the final balance.
    std::vector<double> real_balance;
    /// Same layout as real_balance; empty for schedule and baseline runs.
    std::vector<double> virtual_balance;
    /// 1 while supply is on during the step.
    std::vector<std::uint8_t> connected;
    ServiceFactors service;
    double total_spend = 0.0;
    std::size_t disconnection_days = 0;
    std::optional<std::size_t> first_disconnect_step;

    double psf() const noexcept { return service.psf; }
    double final_balance() const { return real_balance.back(); }
};

/// Day-by-day threshold stepping. simulate_thresholds and the DFM grid
/// search both run through this class so they cannot disagree.
class ThresholdSimulator
{
public:
    struct State
    {
        double real_balance = 0.0;
        double virtual_balance = 0.0;
        bool connected = true;
        std::optional<std::size_t> disconnect_step;
    };

    ThresholdSimulator(const DemandSeries& truth, const Tariff& tariff);

    State initial_state(const Budget& budget) const { return {budget.initial_balance, 0.0, true, std::nullopt}; }

    /// Runs one day. `thresholds` holds one value per load. Served step
    /// counts are added to `served`. When `trace` is given, its actuation,
    /// balances and supply flags are written for that day's steps.
    void run_day(State& state,
                 std::size_t day,
                 std::span<const double> thresholds,
                 double recharge,
                 bool latching,
                 bool carry_over,
                 std::span<std::size_t> served,
                 SimResult* trace = nullptr) const;

    const DemandSeries& truth() const noexcept { return truth_; }

private:
    const DemandSeries& truth_;
    Matrix<double> step_cost_;  // alpha * dT * P, per load and step
};

SimResult simulate_thresholds(const ThresholdPlan& plan,
                              const DemandSeries& truth,
                              const LoadSet& loads,
                              const Tariff& tariff,
                              const Budget& budget);

/// Serves schedule AND true demand, subject to the real wallet.
SimResult simulate_schedule(const BinaryMatrix& schedule,
                            const DemandSeries& truth,
                            const LoadSet& loads,
                            const Tariff& tariff,
                            const Budget& budget);

/// Unrationed use: all demand is served until the wallet runs dry.
SimResult simulate_baseline(const DemandSeries& truth, const LoadSet& loads, const Tariff& tariff, const Budget& budget);

/// Calendar days whose real balance is <= 0 at every step. Only the first
/// grid.total_steps() entries are read.
std::size_t count_disconnection_days(std::span<const double> real_balance_trace, const TimeGrid& grid);

/// Calendar days with supply off at every step.
std::size_t count_disconnection_days(std::span<const std::uint8_t> connected, const TimeGrid& grid);

/// Per-step trace: t,real_balance,virtual_balance,connected,a_<load>...
/// The last row holds the final balances only.
void write_trace_csv(std::ostream& out, const SimResult& result, const LoadSet& loads);
/// metric,value rows plus sf_<load> rows ("NA" for never-demanded loads).
void write_summary_csv(std::ostream& out, const SimResult& result, const LoadSet& loads);

}  // namespace prepaid

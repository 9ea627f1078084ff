#include "prepaid/errors.hpp"
#include "prepaid/format.hpp"
#include "prepaid/milp.hpp"
#include "prepaid/sim.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

namespace prepaid {

namespace {

struct StateKey
{
    std::size_t day;
    std::uint64_t virtual_bits;
    std::uint64_t real_bits;
    bool connected;

    bool operator==(const StateKey&) const = default;
};

struct StateKeyHash
{
    std::size_t operator()(const StateKey& k) const noexcept
    {
        std::uint64_t h = k.virtual_bits * 0x9e3779b97f4a7c15ULL;
        h ^= (k.real_bits + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2));
        h ^= (k.day << 1) | (k.connected ? 1u : 0u);
        return static_cast<std::size_t>(h * 0xbf58476d1ce4e5b9ULL);
    }
};

struct Memo
{
    double value;
    std::size_t choice;
};

class GridSearch
{
public:
    GridSearch(const ThresholdSimulator& sim,
               std::vector<double> weights,
               std::vector<std::vector<double>> candidates,
               std::vector<double> recharges)
        : sim_(sim),
          weights_(std::move(weights)),
          candidates_(std::move(candidates)),
          recharges_(std::move(recharges)),
          num_loads_(weights_.size())
    {
        const std::size_t per_load = candidates_.front().size();
        num_vectors_ = 1;
        for (std::size_t k = 0; k < num_loads_; ++k)
            num_vectors_ *= per_load;
    }

    double solve(const ThresholdSimulator::State& start) { return best(0, start); }

    // Thresholds of candidate vector `v` on `day`; load 0 varies slowest.
    void thresholds(std::size_t day, std::size_t v, std::vector<double>& out) const
    {
        const std::size_t per_load = candidates_[day].size();
        for (std::size_t k = num_loads_; k-- > 0;)
        {
            out[k] = candidates_[day][v % per_load];
            v /= per_load;
        }
    }

    double step(ThresholdSimulator::State& state, std::size_t day, std::size_t v) const
    {
        std::vector<double> thr(num_loads_);
        std::vector<std::size_t> served(num_loads_, 0);
        thresholds(day, v, thr);
        sim_.run_day(state, day, thr, recharges_[day], false, true, served);
        double gain = 0.0;
        for (std::size_t k = 0; k < num_loads_; ++k)
            gain += weights_[k] * static_cast<double>(served[k]);
        return gain;
    }

    std::size_t choice(std::size_t day, const ThresholdSimulator::State& state) const
    {
        const auto it = memo_.find(key(day, state));
        return it == memo_.end() ? 0 : it->second.choice;
    }

    std::size_t states() const noexcept { return memo_.size(); }

private:
    static StateKey key(std::size_t day, const ThresholdSimulator::State& s)
    {
        return {day, std::bit_cast<std::uint64_t>(s.virtual_balance), std::bit_cast<std::uint64_t>(s.real_balance),
                s.connected};
    }

    double best(std::size_t day, const ThresholdSimulator::State& state)
    {
        if (day == recharges_.size() || !state.connected)
            return 0.0;
        const auto k = key(day, state);
        if (const auto it = memo_.find(k); it != memo_.end())
            return it->second.value;

        Memo m{-1.0, 0};
        for (std::size_t v = 0; v < num_vectors_; ++v)
        {
            auto next = state;
            const double gain = step(next, day, v);
            const double total = gain + best(day + 1, next);
            if (total > m.value)
                m = {total, v};
        }
        memo_.emplace(k, m);
        return m.value;
    }

    const ThresholdSimulator& sim_;
    std::vector<double> weights_;
    std::vector<std::vector<double>> candidates_;
    std::vector<double> recharges_;
    std::size_t num_loads_;
    std::size_t num_vectors_ = 1;
    std::unordered_map<StateKey, Memo, StateKeyHash> memo_;
};

}  // namespace

DfmGridResult solve_dfm_grid(const DemandSeries& demand,
                             const LoadSet& loads,
                             const Tariff& tariff,
                             const Budget& budget,
                             const MilpConstants& constants,
                             const DfmGridOptions& options)
{
    demand.require_loads(loads);
    const std::size_t K = loads.size();
    const std::size_t D = demand.grid().num_days();
    const std::size_t G = options.grid_resolution;
    if (G == 0)
        throw InvalidArgument("grid resolution must be at least 1");
    const double count = std::pow(static_cast<double>(G + 2), static_cast<double>(K * D));
    if (count > options.candidate_cap)
        throw MilpError(MilpErrorKind::InstanceTooLarge,
                        "threshold grid has " + format_significant(count, 3) + " candidate vectors, cap is "
                            + format_significant(options.candidate_cap, 3));

    const double X = options.recharge_per_day.value_or(budget.initial_balance / static_cast<double>(D));
    std::vector<double> recharges(D, X);
    std::vector<std::vector<double>> candidates(D);
    for (std::size_t d = 0; d < D; ++d)
    {
        candidates[d].push_back(0.0);
        for (std::size_t i = 1; i <= G; ++i)
            candidates[d].push_back(recharges[d] * static_cast<double>(i) / static_cast<double>(G));
        candidates[d].push_back(constants.M);
    }

    const auto indicator = demand_indicator(demand);
    std::vector<double> weights(K, 0.0);
    for (std::size_t k = 0; k < K; ++k)
    {
        std::size_t demanded = 0;
        for (auto v : indicator.row(k))
            demanded += v;
        if (demanded > 0)
            weights[k] = loads.gamma(k) / static_cast<double>(demanded);
    }

    const ThresholdSimulator sim(demand, tariff);
    GridSearch search(sim, weights, candidates, recharges);
    auto state = sim.initial_state(budget);

    DfmGridResult result;
    result.solution.objective = search.solve(state);

    result.plan.thresholds = Matrix<double>(K, D, 0.0);
    result.plan.recharges = recharges;
    result.plan.latching = false;
    result.plan.carry_over = true;
    std::vector<double> thr(K);
    for (std::size_t d = 0; d < D; ++d)
    {
        const std::size_t v = search.choice(d, state);
        search.thresholds(d, v, thr);
        for (std::size_t k = 0; k < K; ++k)
            result.plan.thresholds(k, d) = thr[k];
        if (state.connected)
            search.step(state, d, v);
    }
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t d = 0; d < D; ++d)
            result.solution.values[var_name("x", k + 1, d + 1)] = result.plan.thresholds(k, d);
    result.solution.status = SolveStatus::Feasible;
    result.solution.messages.push_back("exhaustive threshold grid, resolution " + std::to_string(G));
    result.states_explored = search.states();
    return result;
}

}  // namespace prepaid

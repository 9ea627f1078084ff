#include "prepaid/errors.hpp"
#include "prepaid/milp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace prepaid {

namespace {

struct ItemClass
{
    double value;
    double weight;
    std::vector<std::size_t> items;  // ascending index
};

class BranchAndBound
{
public:
    BranchAndBound(std::vector<ItemClass> classes, std::size_t node_limit)
        : classes_(std::move(classes)), node_limit_(node_limit), take_(classes_.size(), 0), best_take_(take_)
    {}

    void run(double capacity, double base_value)
    {
        best_ = base_value;
        dfs(0, capacity, base_value);
    }

    double best() const noexcept { return best_; }
    const std::vector<std::size_t>& best_take() const noexcept { return best_take_; }
    bool aborted() const noexcept { return aborted_; }
    std::size_t nodes() const noexcept { return nodes_; }
    const std::vector<ItemClass>& classes() const noexcept { return classes_; }

private:
    // Fractional-knapsack value of classes[i..] within `capacity`.
    double bound(std::size_t i, double capacity) const
    {
        double value = 0.0;
        for (; i < classes_.size() && capacity > 0.0; ++i)
        {
            const auto& c = classes_[i];
            const double count = static_cast<double>(c.items.size());
            const double whole = std::min(count, std::floor(capacity / c.weight));
            value += whole * c.value;
            capacity -= whole * c.weight;
            if (whole < count)
            {
                value += c.value * std::max(capacity, 0.0) / c.weight;
                break;
            }
        }
        return value;
    }

    bool hopeless(double bound_value) const
    {
        return bound_value <= best_ + 1e-12 * std::max(1.0, std::abs(best_));
    }

    void dfs(std::size_t i, double capacity, double value)
    {
        if (++nodes_ > node_limit_)
        {
            aborted_ = true;
            return;
        }
        if (value > best_)
        {
            best_ = value;
            best_take_ = take_;
        }
        if (i == classes_.size() || hopeless(value + bound(i, capacity)))
            return;

        const auto& c = classes_[i];
        auto most = static_cast<std::size_t>(std::min<double>(static_cast<double>(c.items.size()),
                                                              std::floor(capacity / c.weight)));
        while (most > 0 && static_cast<double>(most) * c.weight > capacity)
            --most;
        for (std::size_t n = most + 1; n-- > 0;)
        {
            const double rest = capacity - static_cast<double>(n) * c.weight;
            const double gained = value + static_cast<double>(n) * c.value;
            // Fewer items of the best remaining ratio can only lower the bound.
            if (n < most && hopeless(gained + bound(i + 1, rest)))
                break;
            take_[i] = n;
            dfs(i + 1, rest, gained);
            if (aborted_)
                break;
        }
        take_[i] = 0;
    }

    std::vector<ItemClass> classes_;
    std::size_t node_limit_;
    std::vector<std::size_t> take_;
    std::vector<std::size_t> best_take_;
    double best_ = 0.0;
    std::size_t nodes_ = 0;
    bool aborted_ = false;
};

}  // namespace

KnapsackResult solve_knapsack(const std::vector<double>& values,
                              const std::vector<double>& weights,
                              double capacity,
                              const KnapsackOptions& options)
{
    if (values.size() != weights.size())
        throw ShapeMismatch("knapsack values and weights differ in length");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!(values[i] >= 0.0) || !(weights[i] >= 0.0) || !std::isfinite(values[i]) || !std::isfinite(weights[i]))
            throw InvalidArgument("knapsack values and weights must be finite and non-negative");

    KnapsackResult result;
    result.picked.assign(values.size(), 0);

    // Free items are always taken; worthless ones never.
    std::map<std::pair<double, double>, std::size_t> class_of;
    std::vector<ItemClass> classes;
    double base_value = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (values[i] == 0.0)
            continue;
        if (weights[i] == 0.0)
        {
            result.picked[i] = 1;
            base_value += values[i];
            continue;
        }
        const auto [it, fresh] = class_of.try_emplace({values[i], weights[i]}, classes.size());
        if (fresh)
            classes.push_back({values[i], weights[i], {}});
        classes[it->second].items.push_back(i);
    }
    std::stable_sort(classes.begin(), classes.end(), [](const ItemClass& a, const ItemClass& b) {
        const double ra = a.value / a.weight;
        const double rb = b.value / b.weight;
        if (ra != rb)
            return ra > rb;
        return a.weight < b.weight;
    });

    BranchAndBound bb(std::move(classes), options.node_limit);
    bb.run(std::max(capacity, 0.0), base_value);

    const auto& taken = bb.best_take();
    for (std::size_t c = 0; c < taken.size(); ++c)
        for (std::size_t j = 0; j < taken[c]; ++j)
            result.picked[bb.classes()[c].items[j]] = 1;

    for (std::size_t i = 0; i < values.size(); ++i)
        if (result.picked[i])
        {
            result.value += values[i];
            result.weight += weights[i];
        }
    result.proven_optimal = !bb.aborted();
    result.nodes = bb.nodes();
    return result;
}

Solution solve_knapsack_bb(const MilpModel& model, const KnapsackOptions& options)
{
    const auto& vars = model.variables();
    for (const auto& v : vars)
        if (v.type != VarType::Binary)
            throw MilpError(MilpErrorKind::StructureMismatch, "variable '" + v.name + "' is not binary");
    if (model.constraints().size() > 1)
        throw MilpError(MilpErrorKind::StructureMismatch, "knapsack models have at most one constraint");

    std::vector<double> values(vars.size(), 0.0);
    std::vector<double> weights(vars.size(), 0.0);
    double capacity = kInf;
    for (const auto& term : model.objective())
        values[term.var] += term.coef;
    if (!model.constraints().empty())
    {
        const auto& row = model.constraints().front();
        if (row.sense != Sense::LessEqual)
            throw MilpError(MilpErrorKind::StructureMismatch, "knapsack constraint must be <=");
        for (const auto& term : row.terms)
            weights[term.var] += term.coef;
        capacity = row.rhs;
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (values[i] < 0.0 || weights[i] < 0.0)
            throw MilpError(MilpErrorKind::StructureMismatch, "knapsack coefficients must be non-negative");
    if (capacity < 0.0)
        return {{}, 0.0, SolveStatus::Infeasible, {"negative capacity"}};

    if (std::isinf(capacity))
    {
        capacity = 0.0;
        for (double w : weights)
            capacity += w;
    }
    const auto result = solve_knapsack(values, weights, capacity, options);
    Solution solution;
    for (std::size_t i = 0; i < vars.size(); ++i)
        solution.values[vars[i].name] = result.picked[i];
    solution.objective = model.evaluate(std::vector<double>(result.picked.begin(), result.picked.end()));
    solution.status = result.proven_optimal ? SolveStatus::Optimal : SolveStatus::Feasible;
    if (!result.proven_optimal)
        solution.messages.push_back("node limit reached after " + std::to_string(result.nodes) + " nodes");
    return solution;
}

}  // namespace prepaid

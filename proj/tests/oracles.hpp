#pragma once

// Reference computations that share no code with the library. Each one
// takes a different route to the same quantity.

#include "prepaid/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

// max sum v s  s.t.  sum w s <= cap, 0 <= s <= u, by LP duality: the dual
// g(l) = l cap + sum u max(0, v - l w) is convex piecewise linear in l >= 0,
// so its minimum sits at l = 0 or at a ratio v / w.
inline double fractional_knapsack_dual(const std::vector<double>& v,
                                       const std::vector<double>& w,
                                       const std::vector<double>& u,
                                       double cap)
{
    std::vector<double> breakpoints{0.0};
    for (std::size_t i = 0; i < v.size(); ++i)
        if (w[i] > 0.0)
            breakpoints.push_back(v[i] / w[i]);
    double best = std::numeric_limits<double>::infinity();
    for (double l : breakpoints)
    {
        double g = l * cap;
        for (std::size_t i = 0; i < v.size(); ++i)
            g += u[i] * std::max(0.0, v[i] - l * w[i]);
        best = std::min(best, g);
    }
    return best;
}

// Optimum of the average-demand duration LP.
inline double duration_lp_optimum(const prepaid::Matrix<double>& avg,
                                  const std::vector<double>& gamma,
                                  double alpha,
                                  double cap)
{
    std::vector<double> v, w, u;
    for (std::size_t k = 0; k < avg.rows(); ++k)
    {
        std::size_t active_days = 0;
        for (std::size_t d = 0; d < avg.cols(); ++d)
            active_days += avg(k, d) > 0.0 ? 1 : 0;
        for (std::size_t d = 0; d < avg.cols(); ++d)
        {
            if (avg(k, d) <= 0.0)
                continue;
            v.push_back(gamma[k] / (24.0 * static_cast<double>(active_days)));
            w.push_back(alpha * avg(k, d));
            u.push_back(24.0);
        }
    }
    return fractional_knapsack_dual(v, w, u, cap);
}

struct SubsetBest
{
    double value = 0.0;
    std::uint32_t mask = 0;
};

// Every subset, visited in Gray-code order with running sums.
inline SubsetBest knapsack_exhaustive(const std::vector<double>& v, const std::vector<double>& w, double cap)
{
    const std::size_t n = v.size();
    SubsetBest best;
    double value = 0.0, weight = 0.0;
    std::uint32_t mask = 0;
    for (std::uint32_t i = 1; i < (1u << n); ++i)
    {
        const int bit = __builtin_ctz(i);
        mask ^= 1u << bit;
        const double sign = (mask >> bit) & 1u ? 1.0 : -1.0;
        value += sign * v[bit];
        weight += sign * w[bit];
        if (weight <= cap && value > best.value)
            best = {value, mask};
    }
    return best;
}

// Value and weight of a mask, summed in index order.
inline std::pair<double, double> subset_totals(const std::vector<double>& v, const std::vector<double>& w,
                                               std::uint32_t mask)
{
    double value = 0.0, weight = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if ((mask >> i) & 1u)
        {
            value += v[i];
            weight += w[i];
        }
    return {value, weight};
}

// Unrationed use by hand: serve everything until a step cannot be paid.
struct BaselineByHand
{
    std::vector<std::vector<int>> served;
    double spend = 0.0;
    long first_dark_step = -1;
};

inline BaselineByHand baseline_by_hand(const std::vector<std::vector<double>>& power, double alpha, double dt,
                                       double Z)
{
    BaselineByHand out;
    out.served.assign(power.size(), std::vector<int>(power.front().size(), 0));
    double wallet = Z;
    for (std::size_t t = 0; t < power.front().size(); ++t)
    {
        double cost = 0.0;
        for (const auto& row : power)
            cost += alpha * dt * row[t];
        if (wallet <= 0.0 || wallet - cost < -1e-9)
        {
            out.first_dark_step = static_cast<long>(t);
            break;
        }
        for (std::size_t k = 0; k < power.size(); ++k)
            out.served[k][t] = power[k][t] > 0.0 ? 1 : 0;
        wallet -= cost;
        out.spend += cost;
    }
    return out;
}

// Minimal reader for the LP files the library writes.
struct LpSummary
{
    int maximize_sections = 0;
    int end_sections = 0;
    std::size_t constraints = 0;
    std::set<std::string> bounded;
    std::set<std::string> binaries;
};

inline LpSummary read_lp(std::istream& in)
{
    LpSummary s;
    std::string line, section;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '\\')
            continue;
        if (line[0] != ' ')
        {
            section = line;
            s.maximize_sections += line == "Maximize";
            s.end_sections += line == "End";
            continue;
        }
        std::istringstream words(line);
        std::vector<std::string> tok;
        for (std::string w; words >> w;)
            tok.push_back(w);
        if (section == "Subject To" && !tok.empty() && tok[0].back() == ':')
            ++s.constraints;
        else if (section == "Bounds" && tok.size() == 2)
            s.bounded.insert(tok[0]);
        else if (section == "Bounds" && tok.size() == 5)
            s.bounded.insert(tok[2]);
        else if (section == "Binary" && tok.size() == 1)
            s.binaries.insert(tok[0]);
    }
    return s;
}

inline bool python_scipy_available()
{
    return std::system("python3 -c 'from scipy.optimize import milp' >/dev/null 2>&1") == 0;
}

}  // namespace oracle

#include "prepaid/errors.hpp"
#include "prepaid/milp.hpp"

#include <cmath>

namespace prepaid {

std::vector<Violation> check_feasibility(const MilpModel& model, const Solution& solution, double tol)
{
    const auto& vars = model.variables();
    std::vector<double> x(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i)
    {
        const auto it = solution.values.find(vars[i].name);
        if (it == solution.values.end())
            throw MilpError(MilpErrorKind::MissingVariable, "solution has no value for " + vars[i].name);
        x[i] = it->second;
    }

    std::vector<Violation> out;
    for (std::size_t i = 0; i < vars.size(); ++i)
    {
        const auto& v = vars[i];
        if (x[i] < v.lower - tol)
            out.push_back({"bound:" + v.name, v.lower - x[i]});
        else if (x[i] > v.upper + tol)
            out.push_back({"bound:" + v.name, x[i] - v.upper});
        if (v.type == VarType::Binary)
        {
            const double gap = std::abs(x[i] - std::round(x[i]));
            if (gap > tol)
                out.push_back({"integrality:" + v.name, gap});
        }
    }
    for (const auto& c : model.constraints())
    {
        double lhs = 0.0;
        for (const auto& term : c.terms)
            lhs += term.coef * x[term.var];
        double residual = 0.0;
        switch (c.sense)
        {
        case Sense::LessEqual:
            residual = lhs - c.rhs;
            break;
        case Sense::GreaterEqual:
            residual = c.rhs - lhs;
            break;
        case Sense::Equal:
            residual = std::abs(lhs - c.rhs);
            break;
        }
        if (residual > tol)
            out.push_back({c.name, residual});
    }
    return out;
}

}  // namespace prepaid

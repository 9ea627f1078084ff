#include "prepaid/errors.hpp"
#include "prepaid/format.hpp"
#include "prepaid/milp.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace prepaid {

namespace {

constexpr std::size_t kTermsPerLine = 8;

void write_terms(std::ostream& out, const MilpModel& model, const std::vector<Term>& terms)
{
    for (std::size_t i = 0; i < terms.size(); ++i)
    {
        if (i > 0 && i % kTermsPerLine == 0)
            out << "\n   ";
        const double c = terms[i].coef;
        out << (c < 0.0 ? " - " : " + ") << format_number(std::abs(c)) << ' ' << model.variables()[terms[i].var].name;
    }
}

std::string bound_text(double value)
{
    if (std::isinf(value))
        return value < 0.0 ? "-inf" : "+inf";
    return format_number(value);
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out)
{
    const auto& vars = model.variables();
    out << "\\ prepaid rationing model\n";
    out << "Maximize\n obj:";
    if (!model.objective().empty())
        write_terms(out, model, model.objective());
    else if (!vars.empty())
        out << " 0 " << vars.front().name;
    out << "\nSubject To\n";
    for (const auto& c : model.constraints())
    {
        out << ' ' << c.name << ':';
        if (c.terms.empty())
            out << " 0 " << vars.front().name;
        write_terms(out, model, c.terms);
        switch (c.sense)
        {
        case Sense::LessEqual:
            out << " <= ";
            break;
        case Sense::GreaterEqual:
            out << " >= ";
            break;
        case Sense::Equal:
            out << " = ";
            break;
        }
        out << format_number(c.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : vars)
    {
        if (v.type == VarType::Binary)
            continue;
        if (std::isinf(v.lower) && std::isinf(v.upper))
            out << ' ' << v.name << " free\n";
        else
            out << ' ' << bound_text(v.lower) << " <= " << v.name << " <= " << bound_text(v.upper) << '\n';
    }
    if (model.num_binaries() > 0)
    {
        out << "Binary\n";
        for (const auto& v : vars)
            if (v.type == VarType::Binary)
                out << ' ' << v.name << '\n';
    }
    out << "End\n";
}

void write_lp(const MilpModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw MilpError(MilpErrorKind::Io, "cannot write " + path.string());
    write_lp(model, out);
    if (!out)
        throw MilpError(MilpErrorKind::Io, "write failed for " + path.string());
}

}  // namespace prepaid

#include "prepaid/errors.hpp"
#include "prepaid/experiment.hpp"
#include "prepaid/format.hpp"

#include <fstream>
#include <map>

namespace prepaid {

namespace {

constexpr Policy kModelPolicies[] = {Policy::AFG, Policy::DFM, Policy::OBM};

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string percent_label(double fraction)
{
    return format_significant(100.0 * fraction, 6) + "%";
}

std::string pp(double value)
{
    return format_significant(value, 3);
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

std::string cell_stem(const CellResult& c)
{
    return "f" + format_significant(100.0 * c.fraction, 6) + "_" + c.regime + "_" + to_string(c.policy);
}

class CellIndex
{
public:
    explicit CellIndex(const std::vector<CellResult>& cells)
    {
        for (const auto& c : cells)
            index_[{c.fraction, c.regime, c.policy}] = &c;
    }

    const CellResult* find(double fraction, const std::string& regime, Policy policy) const
    {
        const auto it = index_.find({fraction, regime, policy});
        return it == index_.end() ? nullptr : it->second;
    }

    // Any cell of this fraction and regime (they share a baseline).
    const CellResult* any(double fraction, const std::string& regime) const
    {
        for (auto p : {Policy::AFG, Policy::DFM, Policy::OBM, Policy::BSL})
            if (const auto* c = find(fraction, regime, p))
                return c;
        return nullptr;
    }

private:
    std::map<std::tuple<double, std::string, Policy>, const CellResult*> index_;
};

std::string improvement_text(const CellResult* c)
{
    if (!c)
        return "NA";
    if (!c->solved)
        return "unsolved";
    return pp(c->improvement_pp);
}

std::string psf_text(const CellResult* c)
{
    if (!c)
        return "NA";
    if (!c->solved)
        return "unsolved";
    return pp(100.0 * c->sim.psf());
}

void write_summary(const ExperimentResults& r, const std::filesystem::path& dir)
{
    auto out = open_out(dir / "summary.csv");
    const auto& loads = r.config.loads;
    out << "fraction,regime,policy,status,backend,budget,psf,improvement_pp,total_spend,final_balance,"
           "disconnection_days,first_disconnect_step,model_objective";
    for (const auto& load : loads)
        out << ",sf_" << load.name;
    out << ",note\n";
    for (const auto& c : r.cells)
    {
        out << format_number(c.fraction) << ',' << c.regime << ',' << to_string(c.policy) << ','
            << (c.solved ? "solved" : "unsolved") << ',' << c.backend << ',' << format_number(c.budget.initial_balance)
            << ',';
        if (c.solved)
        {
            out << format_number(c.sim.psf()) << ',' << format_number(c.improvement_pp) << ','
                << format_number(c.sim.total_spend) << ',' << format_number(c.sim.final_balance()) << ','
                << c.sim.disconnection_days << ',';
            if (c.sim.first_disconnect_step)
                out << *c.sim.first_disconnect_step;
        }
        else
            out << ",,,,,";
        out << ',';
        if (c.model_objective)
            out << format_number(*c.model_objective);
        for (std::size_t k = 0; k < loads.size(); ++k)
        {
            out << ',';
            if (c.solved && c.sim.service.sf[k])
                out << format_number(*c.sim.service.sf[k]);
            else if (c.solved)
                out << "NA";
        }
        out << ',' << csv_field(c.note) << '\n';
    }
}

void write_table2(const ExperimentResults& r, const CellIndex& index, const std::filesystem::path& dir)
{
    auto out = open_out(dir / "table2.csv");
    out << "balance";
    for (const char* g : {"detailed", "limited"})
        for (auto p : kModelPolicies)
            out << ',' << g << '_' << to_string(p);
    out << '\n';
    for (double f : r.config.budget_fractions)
    {
        out << percent_label(f);
        for (const char* regime : {"perfect-detailed", "perfect-limited"})
            for (auto p : kModelPolicies)
                out << ',' << improvement_text(index.find(f, regime, p));
        out << '\n';
    }
}

void write_table3(const ExperimentResults& r, const CellIndex& index, const std::filesystem::path& dir)
{
    auto out = open_out(dir / "table3.csv");
    out << "balance";
    for (const char* g : {"detailed", "limited"})
        for (auto p : kModelPolicies)
            out << ',' << g << '_' << to_string(p) << "_psf," << g << '_' << to_string(p) << "_pp";
    out << ",BSL_psf,BSL_days\n";
    for (double f : r.config.budget_fractions)
    {
        out << percent_label(f);
        for (const char* regime : {"imperfect-detailed", "imperfect-limited"})
            for (auto p : kModelPolicies)
            {
                const auto* c = index.find(f, regime, p);
                out << ',' << psf_text(c) << ',' << improvement_text(c);
            }
        const CellResult* base = index.any(f, "imperfect-detailed");
        if (!base)
            base = index.any(f, "imperfect-limited");
        if (base)
            out << ',' << pp(100.0 * base->baseline_psf) << ',' << base->baseline_disconnection_days << '\n';
        else
            out << ",NA,NA\n";
    }
}

void write_plotdata(const ExperimentResults& r, const std::filesystem::path& dir)
{
    auto perfect = open_out(dir / "plotdata_perfect.csv");
    auto imperfect = open_out(dir / "plotdata_imperfect.csv");
    perfect << "regime,balance,policy,improvement_pp\n";
    imperfect << "regime,balance,policy,psf_percent,improvement_pp\n";
    for (const auto& c : r.cells)
    {
        const bool is_perfect = c.regime.rfind("perfect-", 0) == 0;
        if (is_perfect && c.policy != Policy::BSL)
            perfect << c.regime << ',' << percent_label(c.fraction) << ',' << to_string(c.policy) << ','
                    << improvement_text(&c) << '\n';
        if (!is_perfect)
            imperfect << c.regime << ',' << percent_label(c.fraction) << ',' << to_string(c.policy) << ','
                      << psf_text(&c) << ',' << improvement_text(&c) << '\n';
    }
}

void write_schedule_csv(std::ostream& out, const BinaryMatrix& schedule, const LoadSet& loads)
{
    out << 't';
    for (const auto& load : loads)
        out << ',' << load.name;
    out << '\n';
    for (std::size_t t = 0; t < schedule.cols(); ++t)
    {
        out << t;
        for (std::size_t k = 0; k < schedule.rows(); ++k)
            out << ',' << int(schedule(k, t));
        out << '\n';
    }
}

void write_runs(const ExperimentResults& r, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir / "traces");
    std::filesystem::create_directories(dir / "setpoints");
    for (const auto& c : r.cells)
    {
        if (!c.solved)
            continue;
        const auto stem = cell_stem(c);
        {
            auto out = open_out(dir / "traces" / (stem + ".csv"));
            write_trace_csv(out, c.sim, r.config.loads);
        }
        if (c.plan)
        {
            auto out = open_out(dir / "setpoints" / (stem + ".csv"));
            write_threshold_csv(out, *c.plan, r.config.loads);
        }
        if (c.schedule)
        {
            auto out = open_out(dir / "setpoints" / (stem + ".csv"));
            write_schedule_csv(out, *c.schedule, r.config.loads);
        }
    }
}

}  // namespace

void emit_outputs(const ExperimentResults& results, const std::filesystem::path& output_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec)
        throw Error("cannot create " + output_dir.string() + ": " + ec.message());
    const CellIndex index(results.cells);
    write_summary(results, output_dir);
    write_table2(results, index, output_dir);
    write_table3(results, index, output_dir);
    write_plotdata(results, output_dir);
    if (results.config.write_traces)
        write_runs(results, output_dir);
}

}  // namespace prepaid

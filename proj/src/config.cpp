#include "prepaid/errors.hpp"
#include "prepaid/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace prepaid {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown field '" + key + "' in " + where);
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key))
        throw ConfigError("missing field '" + std::string(key) + "' in " + where);
    try
    {
        return obj.at(key).get<T>();
    }
    catch (const json::exception&)
    {
        throw ConfigError("field '" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

template <typename T>
std::optional<T> get_opt(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return std::nullopt;
    return get<T>(obj, key, where);
}

LoadProfile parse_profile(const json& j)
{
    if (!j.is_object())
        throw ConfigError("each profile must be an object");
    reject_unknown(j, {"rated_power_w", "on_probability", "mean_on_hours", "cycles_per_day"}, "profile");
    LoadProfile p;
    p.rated_power_w = get<double>(j, "rated_power_w", "profile");
    p.on_probability = get<double>(j, "on_probability", "profile");
    p.mean_on_hours = get<double>(j, "mean_on_hours", "profile");
    p.cycles_per_day = get_opt<int>(j, "cycles_per_day", "profile").value_or(1);
    return p;
}

}  // namespace

ForecastSpec regime_spec(const std::string& label, std::uint64_t shuffle_seed)
{
    ForecastSpec spec;
    std::string granularity;
    if (label.rfind("perfect-", 0) == 0)
    {
        spec.fidelity = Perfect{};
        granularity = label.substr(8);
    }
    else if (label.rfind("imperfect-", 0) == 0)
    {
        spec.fidelity = ImperfectShuffled{shuffle_seed};
        granularity = label.substr(10);
    }
    else
        throw ConfigError("unknown forecast regime '" + label + "'");
    if (granularity == "detailed")
        spec.granularity = Granularity::Detailed;
    else if (granularity == "limited")
        spec.granularity = Granularity::Limited;
    else
        throw ConfigError("unknown forecast regime '" + label + "'");
    return spec;
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
    json root;
    try
    {
        root = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object())
        throw ConfigError("config must be a JSON object");
    reject_unknown(root,
                   {"data", "data_offset_days", "data_days", "loads", "alpha", "alpha_per_kwh", "step_minutes",
                    "horizon_days", "budget_fractions", "forecast_regimes", "shuffle_seed", "policies", "dfm", "obm",
                    "output_dir", "threads", "max_parallel_solvers", "write_traces"},
                   "config");

    ExperimentConfig cfg;
    const std::string top = "config";

    const auto data = get<json>(root, "data", top);
    if (!data.is_object())
        throw ConfigError("'data' must be an object");
    reject_unknown(data, {"csv", "synthetic"}, "data");
    if (data.contains("csv") == data.contains("synthetic"))
        throw ConfigError("'data' needs exactly one of 'csv' or 'synthetic'");
    if (data.contains("csv"))
    {
        std::filesystem::path csv = get<std::string>(data, "csv", "data");
        cfg.data.csv = csv.is_relative() && !base_dir.empty() ? base_dir / csv : csv;
    }
    else
    {
        const auto syn = data.at("synthetic");
        if (!syn.is_object())
            throw ConfigError("'data.synthetic' must be an object");
        reject_unknown(syn, {"seed", "days", "profiles"}, "data.synthetic");
        SyntheticSource s;
        s.seed = get<std::uint64_t>(syn, "seed", "data.synthetic");
        s.days = get<std::size_t>(syn, "days", "data.synthetic");
        if (syn.contains("profiles"))
        {
            if (!syn.at("profiles").is_array())
                throw ConfigError("'data.synthetic.profiles' must be an array");
            for (const auto& p : syn.at("profiles"))
                s.profiles.push_back(parse_profile(p));
        }
        cfg.data.synthetic = s;
    }
    cfg.data.csv_days = get_opt<std::size_t>(root, "data_days", top);
    cfg.data_offset_days = get_opt<std::size_t>(root, "data_offset_days", top).value_or(0);

    const auto loads = get<json>(root, "loads", top);
    if (!loads.is_array() || loads.empty())
        throw ConfigError("'loads' must be a non-empty array");
    std::vector<Load> load_list;
    for (const auto& l : loads)
    {
        if (!l.is_object())
            throw ConfigError("each load must be an object");
        reject_unknown(l, {"name", "gamma"}, "load");
        load_list.push_back({get<std::string>(l, "name", "load"), get<double>(l, "gamma", "load")});
    }
    try
    {
        cfg.loads = LoadSet(std::move(load_list));
    }
    catch (const InvalidArgument& e)
    {
        throw ConfigError(e.what());
    }

    const auto alpha = get_opt<double>(root, "alpha", top);
    const auto alpha_kwh = get_opt<double>(root, "alpha_per_kwh", top);
    if (alpha.has_value() == alpha_kwh.has_value())
        throw ConfigError("give exactly one of 'alpha' ($/Wh) or 'alpha_per_kwh'");
    try
    {
        cfg.tariff = alpha ? Tariff::per_wh(*alpha) : Tariff::per_kwh(*alpha_kwh);
    }
    catch (const InvalidArgument& e)
    {
        throw ConfigError(e.what());
    }

    cfg.step_minutes = get_opt<int>(root, "step_minutes", top).value_or(15);
    if (cfg.step_minutes <= 0 || 1440 % cfg.step_minutes != 0)
        throw ConfigError("'step_minutes' must divide 1440");
    cfg.horizon_days = get_opt<std::size_t>(root, "horizon_days", top).value_or(30);
    if (cfg.horizon_days == 0)
        throw ConfigError("'horizon_days' must be positive");

    cfg.budget_fractions = get<std::vector<double>>(root, "budget_fractions", top);
    if (cfg.budget_fractions.empty())
        throw ConfigError("'budget_fractions' must not be empty");
    for (double f : cfg.budget_fractions)
        if (!(f >= 0.0 && f <= 1.0))
            throw ConfigError("budget fractions must lie in [0, 1]");

    cfg.regimes = get_opt<std::vector<std::string>>(root, "forecast_regimes", top)
                      .value_or(std::vector<std::string>{"perfect-detailed", "perfect-limited", "imperfect-detailed",
                                                         "imperfect-limited"});
    if (cfg.regimes.empty())
        throw ConfigError("'forecast_regimes' must not be empty");
    for (const auto& r : cfg.regimes)
        regime_spec(r, 0);
    cfg.shuffle_seed = get_opt<std::uint64_t>(root, "shuffle_seed", top).value_or(0);

    for (const auto& p : get<std::vector<std::string>>(root, "policies", top))
    {
        const auto policy = parse_policy(p);
        if (!policy)
            throw ConfigError("unknown policy '" + p + "'");
        if (std::find(cfg.policies.begin(), cfg.policies.end(), *policy) != cfg.policies.end())
            throw ConfigError("policy '" + p + "' listed twice");
        cfg.policies.push_back(*policy);
    }
    if (cfg.policies.empty())
        throw ConfigError("at least one policy is required");

    if (root.contains("dfm"))
    {
        const auto dfm = root.at("dfm");
        if (!dfm.is_object())
            throw ConfigError("'dfm' must be an object");
        reject_unknown(dfm,
                       {"backend", "solver_cmd", "grid_resolution", "candidate_cap", "eps", "m", "M", "timeout_s",
                        "recharge_per_day"},
                       "dfm");
        const auto backend = get_opt<std::string>(dfm, "backend", "dfm").value_or("grid");
        if (backend == "grid")
            cfg.dfm.backend = DfmBackend::Grid;
        else if (backend == "external")
            cfg.dfm.backend = DfmBackend::External;
        else
            throw ConfigError("dfm.backend must be 'grid' or 'external'");
        cfg.dfm.solver_cmd = get_opt<std::string>(dfm, "solver_cmd", "dfm").value_or("");
        cfg.dfm.grid_resolution = get_opt<std::size_t>(dfm, "grid_resolution", "dfm").value_or(1);
        cfg.dfm.candidate_cap = get_opt<double>(dfm, "candidate_cap", "dfm").value_or(1e7);
        cfg.dfm.eps = get_opt<double>(dfm, "eps", "dfm");
        cfg.dfm.m = get_opt<double>(dfm, "m", "dfm");
        cfg.dfm.M = get_opt<double>(dfm, "M", "dfm");
        cfg.dfm.timeout_s = get_opt<double>(dfm, "timeout_s", "dfm").value_or(600.0);
        cfg.dfm.recharge_per_day = get_opt<double>(dfm, "recharge_per_day", "dfm");
        if (cfg.dfm.grid_resolution == 0)
            throw ConfigError("dfm.grid_resolution must be at least 1");
        if (cfg.dfm.eps && !(*cfg.dfm.eps > 0.0))
            throw ConfigError("dfm.eps must be positive");
        if (!(cfg.dfm.timeout_s > 0.0))
            throw ConfigError("dfm.timeout_s must be positive");
    }
    if (cfg.dfm.backend == DfmBackend::External
        && (cfg.dfm.solver_cmd.find("{lp}") == std::string::npos
            || cfg.dfm.solver_cmd.find("{sol}") == std::string::npos))
        throw ConfigError("dfm.solver_cmd must contain {lp} and {sol} for the external backend");

    if (root.contains("obm"))
    {
        const auto obm = root.at("obm");
        if (!obm.is_object())
            throw ConfigError("'obm' must be an object");
        reject_unknown(obm, {"node_limit"}, "obm");
        cfg.obm_node_limit = get_opt<std::size_t>(obm, "node_limit", "obm").value_or(cfg.obm_node_limit);
    }

    const std::filesystem::path out = get_opt<std::string>(root, "output_dir", top).value_or("results");
    cfg.output_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
    cfg.threads = get_opt<std::size_t>(root, "threads", top).value_or(0);
    cfg.max_parallel_solvers = get_opt<std::size_t>(root, "max_parallel_solvers", top).value_or(1);
    if (cfg.max_parallel_solvers == 0)
        throw ConfigError("'max_parallel_solvers' must be at least 1");
    cfg.write_traces = get_opt<bool>(root, "write_traces", top).value_or(true);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

}  // namespace prepaid

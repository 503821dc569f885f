#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "ergo/agents.hpp"
#include "ergo/cli.hpp"
#include "ergo/csv.hpp"
#include "ergo/diagnostics.hpp"
#include "ergo/digest.hpp"
#include "ergo/error.hpp"
#include "ergo/processes.hpp"
#include "ergo/spde.hpp"
#include "ergo/svg.hpp"

namespace ergo::cli {
namespace {

// Thrown for bad flag values that CLI11 cannot catch on its own.
class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// Process family subcommands shared by simulate, diagnose and evolve
//---------------------------------------------------------------------------//

struct FamilyFlags
{
    std::string chosen;
    std::map<std::string, std::map<std::string, double>> params;
};

struct ParamDef
{
    const char* name;
    double fallback;
    const char* help;
};

const std::vector<std::pair<std::string, std::vector<ParamDef>>>& family_table()
{
    static const std::vector<std::pair<std::string, std::vector<ParamDef>>> table{
        {"brownian", {{"drift", 0.0, "drift per unit time"}, {"scale", 1.0, "scale per sqrt(time)"}, {"x0", 0.0, "initial value"}}},
        {"gbm", {{"mu", 0.05, "drift"}, {"sigma", 0.2, "volatility"}, {"x0", 1.0, "initial value (> 0)"}}},
        {"levy", {{"alpha", 1.55, "stability index in (0, 2]"}, {"beta", 0.2, "skew in [-1, 1]"}, {"scale", 0.35, "scale"}, {"loc", 0.02, "drift"}, {"x0", 0.0, "initial value"}}},
        {"glevy", {{"alpha", 1.55, "stability index in (0, 2]"}, {"beta", 0.2, "skew in [-1, 1]"}, {"scale", 0.35, "scale"}, {"loc", 0.02, "log drift"}, {"x0", 1.0, "initial value (> 0)"}}},
        {"ou", {{"theta", 1.0, "reversion rate"}, {"mean", 0.0, "long-run level"}, {"scale", 1.0, "noise scale"}, {"x0", 0.0, "initial value"}}},
        {"aou", {{"theta0", 1.0, "initial reversion rate"}, {"mean", 0.0, "long-run level"}, {"scale", 1.0, "noise scale"}, {"x0", 0.0, "initial value"}, {"eta", 0.0, "adaptation gain"}, {"band", 0.0, "deviation band"}, {"theta-min", 0.01, "lower rate bound"}, {"theta-max", 50.0, "upper rate bound"}}},
        {"poisson", {{"rate", 1.0, "events per unit time"}, {"jump", 1.0, "jump size"}, {"x0", 0.0, "initial value"}}},
    };
    return table;
}

void add_family_commands(CLI::App& parent, FamilyFlags& flags, bool multiplicative_only)
{
    for (const auto& [family, defs] : family_table())
    {
        if (multiplicative_only && family != "gbm" && family != "glevy")
            continue;
        auto* sub = parent.add_subcommand(family, family + " process");
        sub->fallthrough();
        auto& store = flags.params[family];
        for (const auto& def : defs)
        {
            store[def.name] = def.fallback;
            sub->add_option(std::string("--") + def.name, store[def.name], def.help)
                ->capture_default_str();
        }
        sub->callback([&flags, name = family] { flags.chosen = name; });
    }
}

ProcessSpec build_spec(const FamilyFlags& flags)
{
    const auto& p = flags.params.at(flags.chosen);
    const auto& f = flags.chosen;
    if (f == "brownian")
        return Brownian(p.at("drift"), p.at("scale"), p.at("x0"));
    if (f == "gbm")
        return GeometricBrownian(p.at("mu"), p.at("sigma"), p.at("x0"));
    if (f == "levy")
        return LevyStable(p.at("alpha"), p.at("beta"), p.at("scale"), p.at("loc"), p.at("x0"));
    if (f == "glevy")
        return GeometricLevy(p.at("alpha"), p.at("beta"), p.at("scale"), p.at("loc"), p.at("x0"));
    if (f == "ou")
        return OrnsteinUhlenbeck(p.at("theta"), p.at("mean"), p.at("scale"), p.at("x0"));
    if (f == "aou")
        return AdaptiveOU(p.at("theta0"), p.at("mean"), p.at("scale"), p.at("x0"), p.at("eta"),
                          p.at("band"), p.at("theta-min"), p.at("theta-max"));
    return Poisson(p.at("rate"), p.at("jump"), p.at("x0"));
}

//---------------------------------------------------------------------------//
// Output helpers
//---------------------------------------------------------------------------//

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::string columns_to_string(const std::vector<csv::Column>& columns)
{
    std::ostringstream os;
    csv::write_columns(os, columns);
    return os.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-")
        out << text;
    else
        write_text(path, text);
}

std::string level_name(double level)
{
    const double pct = level * 100.0;
    char buf[32];
    if (std::abs(pct - std::round(pct)) < 1e-9)
        std::snprintf(buf, sizeof buf, "q%02d", static_cast<int>(std::lround(pct)));
    else
        std::snprintf(buf, sizeof buf, "q%g", pct);
    return buf;
}

std::vector<double> parse_levels(const std::string& text)
{
    std::vector<double> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        try
        {
            std::size_t used = 0;
            levels.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        }
        catch (const std::logic_error&)
        {
            throw UsageError("--fan-levels: '" + item + "' is not a number");
        }
    }
    try
    {
        // Validates ordering and range without needing an ensemble.
        Matrix probe(2, 2);
        quantile_fan(Ensemble(TimeGrid(1.0, 1), probe), levels);
    }
    catch (const DomainError& e)
    {
        throw UsageError(std::string("--fan-levels: ") + e.what());
    }
    return levels;
}

std::vector<double> slice(const std::vector<double>& v, std::size_t from)
{
    return {v.begin() + static_cast<std::ptrdiff_t>(from), v.end()};
}

svg::Panel fan_panel(const QuantileFan& fan, const TimeGrid& grid, std::string title)
{
    svg::Panel panel{std::move(title), "time", "value", {}, std::nullopt, false};
    const auto times = grid.times();
    for (std::size_t j = 0; j < fan.levels.size(); ++j)
        panel.curves.push_back({level_name(fan.levels[j]), times, fan.curves[j]});
    return panel;
}

//---------------------------------------------------------------------------//
// Commands
//---------------------------------------------------------------------------//

struct SimulateArgs
{
    double t = 1.0;
    double dt = 0.01;
    std::size_t n = 100;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
};

void add_simulate_flags(CLI::App& app, SimulateArgs& args)
{
    app.add_option("--t", args.t, "horizon")->capture_default_str();
    app.add_option("--dt", args.dt, "time step")->capture_default_str();
    app.add_option("--n", args.n, "number of instances")->capture_default_str();
    app.add_option("--seed", args.seed, "random seed")->capture_default_str();
    app.add_option("--threads", args.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
}

Ensemble run_simulation(const FamilyFlags& flags, const SimulateArgs& args)
{
    ProcessSpec spec = build_spec(flags);
    if (args.n == 0)
        throw UsageError("--n must be at least 1");
    if (!(args.dt > 0.0) || !(args.t >= args.dt))
        throw UsageError("--t must be >= --dt > 0");
    return simulate(spec, args.t, args.dt, args.n, args.seed, {args.threads});
}

struct DiagnoseArgs
{
    std::string input;
    std::string fan_levels;
    bool fan = false;
    bool summary = false;
    bool growth = false;
    bool preasym = false;
    bool svg = false;
    std::string prefix = "diagnose";
    double tail_fraction = 0.5;
    std::size_t window = 50;
    std::size_t preasym_instance = 0;
    bool preasym_log = false;
};

int cmd_diagnose(const DiagnoseArgs& args, const FamilyFlags& flags, const SimulateArgs& sim)
{
    std::vector<double> levels = kDefaultFanLevels;
    if (!args.fan_levels.empty())
        levels = parse_levels(args.fan_levels);
    if (!args.input.empty() && !flags.chosen.empty())
        throw UsageError("give either --in or a process family, not both");
    if (args.input.empty() && flags.chosen.empty())
        throw UsageError("diagnose needs --in FILE or a process family subcommand");

    const Ensemble ensemble = [&] {
        if (!flags.chosen.empty())
            return run_simulation(flags, sim);
        std::ifstream in(args.input);
        if (!in)
            throw std::runtime_error("cannot read " + args.input);
        return csv::read_ensemble(in);
    }();
    const auto& grid = ensemble.grid();
    const auto times = grid.times();
    const bool any = args.fan || args.summary || args.growth || args.preasym;
    const bool do_fan = args.fan || !args.fan_levels.empty() || !any;

    if (do_fan)
    {
        const auto fan = quantile_fan(ensemble, levels);
        std::vector<csv::Column> cols{{"time", times}};
        for (std::size_t j = 0; j < levels.size(); ++j)
            cols.push_back({level_name(levels[j]), fan.curves[j]});
        write_text(args.prefix + "_fan.csv", columns_to_string(cols));
        if (args.svg)
            write_text(args.prefix + "_fan.svg", svg::render(fan_panel(fan, grid, "Quantile fan")));
    }
    if (args.summary)
    {
        const auto curves = summary_curves(ensemble, true);
        write_text(args.prefix + "_summary.csv",
                   columns_to_string({{"time", times},
                                      {"amean", curves.arithmetic_mean},
                                      {"median", curves.median},
                                      {"gmean", curves.geometric_mean}}));
        if (args.svg)
            write_text(args.prefix + "_summary.svg",
                       svg::render(svg::Panel{"Ensemble summaries", "time", "value",
                                              {{"arithmetic mean", times, curves.arithmetic_mean},
                                               {"median", times, curves.median},
                                               {"geometric mean", times, curves.geometric_mean}},
                                              std::nullopt, false}));
    }
    if (args.growth)
    {
        const auto rates = growth_rates(ensemble);
        write_text(args.prefix + "_growth.csv",
                   "metric,value\ntime_average," + csv::format_number(rates.time_average)
                       + "\nensemble_average," + csv::format_number(rates.ensemble_average)
                       + "\n");
    }
    if (args.preasym)
    {
        if (args.preasym_instance >= ensemble.num_instances())
            throw UsageError("--preasym-instance out of range");
        const auto row = ensemble.values().row(args.preasym_instance);
        std::vector<double> series(row.begin(), row.end());
        if (args.preasym_log)
        {
            for (auto& v : series)
            {
                if (!(v > 0.0))
                    throw PositivityError("--preasym-log requires strictly positive values");
                v = std::log(v);
            }
        }
        const auto report = preasymptotic_report(series, grid, args.tail_fraction, args.window);
        std::vector<double> padded(series.size(), std::nan(""));
        std::copy(report.fluctuation_curve.begin(), report.fluctuation_curve.end(),
                  padded.begin() + static_cast<std::ptrdiff_t>(report.window));
        write_text(args.prefix + "_preasym.csv",
                   columns_to_string({{"time", times},
                                      {"distance", report.distance_curve},
                                      {"fluctuation", padded}}));
        if (args.svg)
            write_text(args.prefix + "_preasym.svg",
                       svg::render(svg::Figure{
                           "Preasymptotic diagnostics",
                           {{"Distance to asymptote", "time", "distance",
                             {{"", times, report.distance_curve}}, std::nullopt, false},
                            {"Rolling fluctuation", "time", "sd of increments",
                             {{"", slice(times, report.window), report.fluctuation_curve}},
                             std::nullopt, false}},
                           2}));
    }
    return ok;
}

struct SpdeArgs
{
    double kappa = 0.1;
    double sigma = 0.0;
    double length = 1.0;
    double dx = 1.0 / 64.0;
    double dt = 1e-3;
    double t = 1.0;
    std::string boundary = "dirichlet";
    double left = 0.0;
    double right = 0.0;
    std::string init = "sine";
    std::uint64_t seed = kDefaultSeed;
    std::string prefix = "spde";
    std::size_t save_every = 1;
    bool svg = false;
};

std::function<double(double)> initial_function(const std::string& name, double length)
{
    if (name == "sine")
        return [length](double x) { return std::sin(std::numbers::pi * x / length); };
    if (name == "zero")
        return [](double) { return 0.0; };
    if (name == "bump")
        return [length](double x) {
            const double s = (x - 0.5 * length) / (0.1 * length);
            return std::exp(-s * s);
        };
    throw UsageError("--init must be sine, zero or bump");
}

svg::Figure spde_figure(const FieldSolution& field, std::string title)
{
    const auto [initial, final_profile] = extract_profiles(field);
    return svg::Figure{
        std::move(title),
        {{"Space-time field", "x", "time", {}, svg::Heatmap{field.x_grid, field.t_grid, field.u},
          false},
         {"Spatial profiles", "x", "u",
          {{"initial", field.x_grid, initial}, {"final", field.x_grid, final_profile}},
          std::nullopt, false}},
        2};
}

int cmd_spde(const SpdeArgs& args)
{
    Boundary boundary = Neumann{};
    if (args.boundary == "dirichlet")
        boundary = Dirichlet{args.left, args.right};
    else if (args.boundary != "neumann")
        throw UsageError("--boundary must be dirichlet or neumann");
    const SpdeSpec spec(args.kappa, args.sigma, args.length, boundary,
                        initial_function(args.init, args.length));
    const auto field =
        simulate_heat_spde(spec, args.dx, args.dt, args.t, args.seed, {args.save_every});

    std::ostringstream os;
    os << "time";
    for (std::size_t j = 0; j < field.x_grid.size(); ++j)
        os << ",x_" << j;
    os << '\n';
    for (std::size_t r = 0; r < field.u.rows(); ++r)
    {
        os << csv::format_number(field.t_grid[r]);
        for (double v : field.u.row(r))
            os << ',' << csv::format_number(v);
        os << '\n';
    }
    write_text(args.prefix + "_field.csv", os.str());

    const auto [initial, final_profile] = extract_profiles(field);
    write_text(args.prefix + "_profiles.csv",
               columns_to_string({{"x", field.x_grid}, {"initial", initial}, {"final", final_profile}}));
    if (args.svg)
        write_text(args.prefix + ".svg", svg::render(spde_figure(field, "Stochastic heat equation")));
    return ok;
}

struct EvolveArgs
{
    PoolConfig config;
    double init_fraction = std::nan("");
    std::string out;
};

int cmd_evolve(EvolveArgs args, const FamilyFlags& flags, std::ostream& out)
{
    FamilyFlags chosen = flags;
    if (chosen.chosen.empty())
        chosen.chosen = "gbm";
    const auto process = build_spec(chosen);
    if (!std::isnan(args.init_fraction))
        args.config.initial_fraction = args.init_fraction;
    args.config.validate();

    const auto result = evolutionary_optimize(args.config, process);
    std::vector<double> gen, best, fit;
    for (const auto& rec : result.history)
    {
        gen.push_back(static_cast<double>(rec.generation));
        best.push_back(rec.best_fraction);
        fit.push_back(rec.best_fitness);
    }
    emit(args.out,
         columns_to_string({{"generation", gen}, {"best_fraction", best}, {"best_fitness", fit}}),
         out);
    out << "best_fraction=" << csv::format_number(result.best_fraction) << '\n';
    return ok;
}

std::string join_args(const std::vector<std::string>& args)
{
    std::string text = "ergosim";
    for (const auto& a : args)
        text += " " + a;
    return text;
}

} // namespace

//---------------------------------------------------------------------------//
// Replication bundle
//---------------------------------------------------------------------------//

ReplicateResult replicate(const std::filesystem::path& outdir, std::uint64_t seed,
                          unsigned threads, const std::string& command_line)
{
    std::filesystem::create_directories(outdir);
    ReplicateResult result;
    std::vector<std::string> notes;
    auto save = [&](const std::string& name, const std::string& text) {
        write_text(outdir / name, text);
        result.files.push_back({name, sha256_hex(text)});
    };
    const SimulateOptions opts{threads};

    // fig1: quantile fans, Brownian vs heavy-tailed
    {
        const Brownian bm(0.0, 1.0);
        const GeometricLevy glp(1.55, 0.2, 0.35, 0.02);
        const auto bm_run = simulate(bm, 3.0, 0.01, 240, seed, opts);
        const auto glp_run = simulate(glp, 4.0, 0.01, 360, seed + 1, opts);
        const auto bm_fan = quantile_fan(bm_run);
        const auto glp_fan = quantile_fan(glp_run);

        std::ostringstream os;
        os << "series,time";
        for (double level : kDefaultFanLevels)
            os << ',' << level_name(level);
        os << '\n';
        auto rows = [&](const char* name, const QuantileFan& fan, const TimeGrid& grid) {
            for (std::size_t k = 0; k < grid.size(); ++k)
            {
                os << name << ',' << csv::format_number(grid.time(k));
                for (const auto& curve : fan.curves)
                    os << ',' << csv::format_number(curve[k]);
                os << '\n';
            }
        };
        rows("brownian", bm_fan, bm_run.grid());
        rows("geometric_levy", glp_fan, glp_run.grid());
        save("fig1_quantile_fans.csv", os.str());
        save("fig1_quantile_fans.svg",
             svg::render(svg::Figure{"Quantile fans: Brownian vs Levy-stable",
                                     {fan_panel(bm_fan, bm_run.grid(), "Brownian motion"),
                                      fan_panel(glp_fan, glp_run.grid(), "Geometric Levy")},
                                     2}));
        notes.push_back("fig1: brownian(drift=0, scale=1) t=3 dt=0.01 n=240 seed=" + std::to_string(seed)
                        + "; glevy(alpha=1.55, beta=0.2, scale=0.35, loc=0.02) t=4 dt=0.01 n=360 seed="
                        + std::to_string(seed + 1));
    }

    // fig2: multiplicative intermittency and summary divergence
    {
        const GeometricLevy glp(1.55, 0.2, 0.35, 0.02);
        const auto run = simulate(glp, 4.0, 0.01, 360, seed + 2, opts);
        const auto curves = summary_curves(run);
        const auto times = run.grid().times();
        constexpr std::size_t kShown = 20;

        std::vector<csv::Column> cols{{"time", times},
                                      {"amean", curves.arithmetic_mean},
                                      {"median", curves.median},
                                      {"gmean", curves.geometric_mean}};
        svg::Panel paths{"Trajectories", "time", "x", {}, std::nullopt, true};
        for (std::size_t i = 0; i < kShown; ++i)
        {
            const auto row = run.values().row(i);
            std::vector<double> v(row.begin(), row.end());
            cols.push_back({"path_" + std::to_string(i), v});
            paths.curves.push_back({"", times, v});
        }
        save("fig2_geometric_levy.csv", columns_to_string(cols));
        save("fig2_geometric_levy.svg",
             svg::render(svg::Figure{
                 "Geometric Levy: intermittency and summary divergence",
                 {paths,
                  {"Ensemble summaries", "time", "value",
                   {{"arithmetic mean", times, curves.arithmetic_mean},
                    {"median", times, curves.median},
                    {"geometric mean", times, curves.geometric_mean}},
                   std::nullopt, false}},
                 2}));
        notes.push_back("fig2: glevy(alpha=1.55, beta=0.2, scale=0.35, loc=0.02) t=4 dt=0.01 n=360 seed="
                        + std::to_string(seed + 2) + "; first 20 paths shown");
    }

    // fig3: adaptive vs fixed mean reversion on the same noise
    {
        const AdaptiveOU adaptive(1.0, 0.0, 0.5, 1.5, 2.0, 0.5, 0.1, 10.0);
        const OrnsteinUhlenbeck fixed(1.0, 0.0, 0.5, 1.5);
        const auto adaptive_run = simulate_adaptive(adaptive, 10.0, 0.01, 1, seed + 3, opts);
        const auto fixed_run = simulate(fixed, 10.0, 0.01, 1, seed + 3, opts);
        const auto times = adaptive_run.states.grid().times();
        auto row = [](const Matrix& m) {
            const auto r = m.row(0);
            return std::vector<double>(r.begin(), r.end());
        };
        const auto ax = row(adaptive_run.states.values());
        const auto fx = row(fixed_run.values());
        const auto th = row(adaptive_run.theta);
        save("fig3_adaptive_ou.csv",
             columns_to_string({{"time", times}, {"adaptive_x", ax}, {"fixed_x", fx}, {"theta", th}}));
        save("fig3_adaptive_ou.svg",
             svg::render(svg::Figure{
                 "Adaptive-rate vs fixed-rate Ornstein-Uhlenbeck",
                 {{"States", "time", "x", {{"adaptive", times, ax}, {"fixed", times, fx}},
                   std::nullopt, false},
                  {"Mean-reversion rate", "time", "theta", {{"adaptive theta", times, th}},
                   std::nullopt, false}},
                 1}));
        notes.push_back("fig3: aou(theta0=1, mean=0, scale=0.5, x0=1.5, eta=2, band=0.5, "
                        "theta in [0.1, 10]) vs ou(theta=1) t=10 dt=0.01 seed="
                        + std::to_string(seed + 3));
    }

    // fig4: preasymptotics of log-wealth
    {
        const GeometricLevy glp(1.55, 0.2, 0.35, 0.02);
        const auto run = simulate(glp, 50.0, 0.01, 1, seed + 4, opts);
        const auto& grid = run.grid();
        const auto times = grid.times();
        std::vector<double> log_wealth(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
            log_wealth[k] = std::log(run.values()(0, k));
        constexpr std::size_t kWindow = 100;
        const auto report = preasymptotic_report(log_wealth, grid, 0.5, kWindow);
        std::vector<double> line(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
            line[k] = report.asymptote.intercept + report.asymptote.slope * times[k];
        std::vector<double> padded(grid.size(), std::nan(""));
        std::copy(report.fluctuation_curve.begin(), report.fluctuation_curve.end(),
                  padded.begin() + kWindow);
        save("fig4_preasymptotics.csv",
             columns_to_string({{"time", times},
                                {"log_wealth", log_wealth},
                                {"asymptote", line},
                                {"distance", report.distance_curve},
                                {"fluctuation", padded}}));
        save("fig4_preasymptotics.svg",
             svg::render(svg::Figure{
                 "Preasymptotic diagnostics of log-wealth",
                 {{"Distance to estimated asymptote", "time", "|log x - fit|",
                   {{"", times, report.distance_curve}}, std::nullopt, false},
                  {"Rolling fluctuation", "time", "sd of increments",
                   {{"", slice(times, kWindow), report.fluctuation_curve}}, std::nullopt, false}},
                 2}));
        notes.push_back("fig4: log of one glevy(alpha=1.55, beta=0.2, scale=0.35, loc=0.02) path, "
                        "t=50 dt=0.01 seed=" + std::to_string(seed + 4)
                        + "; OLS on final 50%; window=100 steps");
    }

    // fig5: stochastic heat equation
    {
        const SpdeSpec spec(0.1, 0.05, 1.0, Dirichlet{0.0, 0.0},
                            [](double x) { return std::sin(std::numbers::pi * x); });
        const auto field = simulate_heat_spde(spec, 1.0 / 64.0, 1e-3, 1.0, seed + 5, {10});
        std::ostringstream os;
        os << "time";
        for (std::size_t j = 0; j < field.x_grid.size(); ++j)
            os << ",x_" << j;
        os << '\n';
        for (std::size_t r = 0; r < field.u.rows(); ++r)
        {
            os << csv::format_number(field.t_grid[r]);
            for (double v : field.u.row(r))
                os << ',' << csv::format_number(v);
            os << '\n';
        }
        save("fig5_spde.csv", os.str());
        save("fig5_spde.svg", svg::render(spde_figure(field, "Stochastic heat equation")));
        notes.push_back("fig5: kappa=0.1 sigma=0.05 L=1 dirichlet(0,0) u0=sin(pi x) dx=1/64 "
                        "dt=0.001 t=1 every 10th step seed=" + std::to_string(seed + 5));
    }

    std::ostringstream manifest;
    manifest << "# ergosim " << kVersion << '\n';
    manifest << "# command: " << command_line << '\n';
    manifest << "# seed: " << seed << '\n';
    for (const auto& note : notes)
        manifest << "# " << note << '\n';
    for (const auto& entry : result.files)
        manifest << entry.path << '\t' << entry.sha256 << '\n';
    result.manifest = outdir / "MANIFEST.txt";
    write_text(result.manifest, manifest.str());
    return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Ergodicity-oriented stochastic simulation toolkit", "ergosim"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "simulate an ensemble and write it as CSV");
    FamilyFlags sim_family;
    SimulateArgs sim_args;
    std::string sim_out;
    add_simulate_flags(*simulate_cmd, sim_args);
    simulate_cmd->add_option("--out", sim_out, "output CSV (default stdout)");
    add_family_commands(*simulate_cmd, sim_family, false);
    simulate_cmd->require_subcommand(1);

    // diagnose
    auto* diagnose_cmd = app.add_subcommand("diagnose", "ensemble diagnostics from CSV or a fresh simulation");
    FamilyFlags diag_family;
    SimulateArgs diag_sim;
    DiagnoseArgs diag;
    diagnose_cmd->add_option("--in", diag.input, "ensemble CSV written by simulate");
    diagnose_cmd->add_option("--fan-levels", diag.fan_levels, "comma-separated quantile levels");
    diagnose_cmd->add_flag("--fan", diag.fan, "quantile fan");
    diagnose_cmd->add_flag("--summary", diag.summary, "arithmetic mean, median, geometric mean");
    diagnose_cmd->add_flag("--growth", diag.growth, "time- and ensemble-average growth rates");
    diagnose_cmd->add_flag("--preasym", diag.preasym, "distance to asymptote and rolling fluctuation");
    diagnose_cmd->add_flag("--svg", diag.svg, "also write SVG plots");
    diagnose_cmd->add_option("--out-prefix", diag.prefix, "output path prefix")->capture_default_str();
    diagnose_cmd->add_option("--tail-fraction", diag.tail_fraction, "share of the series used for the asymptote fit")
        ->capture_default_str();
    diagnose_cmd->add_option("--window", diag.window, "fluctuation window in steps")->capture_default_str();
    diagnose_cmd->add_option("--preasym-instance", diag.preasym_instance, "instance used for --preasym")
        ->capture_default_str();
    diagnose_cmd->add_flag("--preasym-log", diag.preasym_log, "analyse log values");
    add_simulate_flags(*diagnose_cmd, diag_sim);
    add_family_commands(*diagnose_cmd, diag_family, false);
    diagnose_cmd->require_subcommand(0, 1);

    // spde
    auto* spde_cmd = app.add_subcommand("spde", "solve the 1-D stochastic heat equation");
    SpdeArgs spde;
    spde_cmd->add_option("--kappa", spde.kappa, "diffusivity")->capture_default_str();
    spde_cmd->add_option("--sigma", spde.sigma, "noise amplitude")->capture_default_str();
    spde_cmd->add_option("--L", spde.length, "domain length")->capture_default_str();
    spde_cmd->add_option("--dx", spde.dx, "grid spacing")->capture_default_str();
    spde_cmd->add_option("--dt", spde.dt, "time step")->capture_default_str();
    spde_cmd->add_option("--t", spde.t, "horizon")->capture_default_str();
    spde_cmd->add_option("--boundary", spde.boundary, "dirichlet or neumann")->capture_default_str();
    spde_cmd->add_option("--left", spde.left, "left Dirichlet value")->capture_default_str();
    spde_cmd->add_option("--right", spde.right, "right Dirichlet value")->capture_default_str();
    spde_cmd->add_option("--init", spde.init, "sine, zero or bump")->capture_default_str();
    spde_cmd->add_option("--seed", spde.seed, "random seed")->capture_default_str();
    spde_cmd->add_option("--out-prefix", spde.prefix, "output path prefix")->capture_default_str();
    spde_cmd->add_option("--save-every", spde.save_every, "keep every k-th time step")->capture_default_str();
    spde_cmd->add_flag("--svg", spde.svg, "also write an SVG figure");

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "evolve leverage fractions on a multiplicative process");
    FamilyFlags evo_family;
    EvolveArgs evo;
    auto& cfg = evo.config;
    evolve_cmd->add_option("--agents", cfg.n_agents, "population size")->capture_default_str();
    evolve_cmd->add_option("--generations", cfg.generations, "number of generations")->capture_default_str();
    evolve_cmd->add_option("--mutation-sd", cfg.mutation_sd, "mutation standard deviation")->capture_default_str();
    evolve_cmd->add_option("--survivor-share", cfg.survivor_share, "share kept each generation")->capture_default_str();
    evolve_cmd->add_option("--t", cfg.horizon, "evaluation horizon")->capture_default_str();
    evolve_cmd->add_option("--dt", cfg.dt, "time step")->capture_default_str();
    evolve_cmd->add_option("--paths", cfg.paths_per_eval, "paths per evaluation")->capture_default_str();
    evolve_cmd->add_option("--f-min", cfg.f_min, "lower leverage bound")->capture_default_str();
    evolve_cmd->add_option("--f-max", cfg.f_max, "upper leverage bound")->capture_default_str();
    evolve_cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    evolve_cmd->add_option("--init-fraction", evo.init_fraction, "start every agent at this fraction");
    evolve_cmd->add_flag("--fixed-draws", cfg.fixed_draws, "reuse the first generation's draws");
    evolve_cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
    evolve_cmd->add_option("--out", evo.out, "output CSV (default stdout)");
    add_family_commands(*evolve_cmd, evo_family, true);
    evolve_cmd->require_subcommand(0, 1);

    // replicate
    auto* replicate_cmd = app.add_subcommand("replicate", "regenerate all five figures with a manifest");
    std::string outdir = "figures";
    std::uint64_t rep_seed = kDefaultSeed;
    unsigned rep_threads = 0;
    replicate_cmd->add_option("--outdir", outdir, "output directory")->capture_default_str();
    replicate_cmd->add_option("--seed", rep_seed, "random seed")->capture_default_str();
    replicate_cmd->add_option("--threads", rep_threads, "worker threads (0 = all cores)")->capture_default_str();

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return ok;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    }
    catch (const CLI::CallForVersion&)
    {
        out << kVersion << '\n';
        return ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }

    try
    {
        if (simulate_cmd->parsed())
        {
            std::ostringstream os;
            csv::write_ensemble(os, run_simulation(sim_family, sim_args));
            emit(sim_out, os.str(), out);
            return ok;
        }
        if (diagnose_cmd->parsed())
            return cmd_diagnose(diag, diag_family, diag_sim);
        if (spde_cmd->parsed())
            return cmd_spde(spde);
        if (evolve_cmd->parsed())
            return cmd_evolve(evo, evo_family, out);
        if (replicate_cmd->parsed())
        {
            const auto result = replicate(outdir, rep_seed, rep_threads, join_args(args));
            out << "wrote " << result.files.size() << " files and " << result.manifest.string()
                << '\n';
            return ok;
        }
    }
    catch (const UsageError& e)
    {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    catch (const DomainError& e)
    {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    catch (const StabilityError& e)
    {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    catch (const GridError& e)
    {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    catch (const SizeError& e)
    {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return runtime_failure;
    }
    return usage_error;
}

} // namespace ergo::cli

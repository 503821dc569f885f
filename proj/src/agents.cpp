#include "ergo/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ergo/error.hpp"
#include "ergo/parallel.hpp"
#include "ergo/rand_core.hpp"

namespace ergo {
namespace {

// Stream-id layout: evaluation draws use (generation << 32 | path); the
// population streams live in the top half so they never collide.
constexpr std::uint64_t kPopulationStreams = 0x8000'0000'0000'0000ULL;

std::uint64_t evaluation_base(std::size_t generation)
{
    return static_cast<std::uint64_t>(generation) << 32;
}

} // namespace

CrraUtility::CrraUtility(double gamma_) : gamma(gamma_)
{
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw DomainError("CRRA gamma must be >= 0");
    if (gamma == 1.0)
        throw DomainError("CRRA gamma = 1 is log utility; use LogUtility");
}

double utility(double wealth, const UtilityKind& kind)
{
    if (!(wealth > 0.0))
        throw DomainError("utility needs wealth > 0");
    if (std::holds_alternative<LogUtility>(kind))
        return std::log(wealth);
    if (const auto* crra = std::get_if<CrraUtility>(&kind))
    {
        if (crra->gamma == 1.0)
            throw DomainError("CRRA gamma = 1 is log utility; use LogUtility");
        return (std::pow(wealth, 1.0 - crra->gamma) - 1.0) / (1.0 - crra->gamma);
    }
    return wealth;
}

double wealth_update(double wealth, double fraction, double gross_return)
{
    if (!(wealth > 0.0))
        throw DomainError("wealth must be > 0");
    if (!(gross_return > 0.0))
        throw DomainError("gross return must be > 0");
    const double next = wealth * (1.0 - fraction + fraction * gross_return);
    return next > kWealthFloor ? next : kWealthFloor;
}

Agent::Agent(double wealth, double fraction, UtilityKind utility_kind)
    : wealth_(wealth), fraction_(fraction), utility_kind_(utility_kind)
{
    if (!(wealth > 0.0))
        throw DomainError("agent wealth must be > 0");
    if (!std::isfinite(fraction))
        throw DomainError("agent fraction must be finite");
}

bool Agent::step(double gross_return)
{
    wealth_ = wealth_update(wealth_, fraction_, gross_return);
    return wealth_ == kWealthFloor;
}

Matrix gross_return_paths(const ProcessSpec& process, const TimeGrid& grid, std::size_t paths,
                          std::uint64_t seed, std::uint64_t stream_base)
{
    validate(process);
    if (!is_multiplicative(process))
        throw DomainError("growth evaluation needs a multiplicative process, got "
                          + family_name(process));
    if (paths == 0)
        throw SizeError("need at least one path");

    const double dt = grid.dt();
    Matrix returns(paths, grid.n_steps());
    for (std::size_t p = 0; p < paths; ++p)
    {
        auto stream = substream(seed, stream_base + p);
        auto row = returns.row(p);
        if (const auto* gbm = std::get_if<GeometricBrownian>(&process))
        {
            for (auto& r : row)
                r = gbm_step(1.0, gbm->mu, gbm->sigma, dt, standard_normal(stream));
        }
        else
        {
            const auto& glp = std::get<GeometricLevy>(process);
            const StableParams sp(glp.alpha, glp.beta);
            for (auto& r : row)
                r = multiplicative_log_step(1.0, glp.loc, glp.scale, glp.alpha, dt,
                                            standard_stable(stream, sp));
        }
    }
    return returns;
}

GrowthEvaluation evaluate_growth(double fraction, const Matrix& gross_returns,
                                 const TimeGrid& grid, double initial_wealth)
{
    if (!(initial_wealth > 0.0))
        throw DomainError("initial wealth must be > 0");
    if (gross_returns.cols() != grid.n_steps())
        throw SizeError("return matrix does not match the grid");

    // Log-space twin of wealth_update: log w' = max(log w + log factor, log floor).
    const double log_floor = std::log(kWealthFloor);
    const double log_w0 = std::log(initial_wealth);
    double total = 0.0;
    std::size_t ruined = 0;
    for (std::size_t p = 0; p < gross_returns.rows(); ++p)
    {
        double log_w = log_w0;
        bool hit_floor = false;
        for (double r : gross_returns.row(p))
        {
            const double factor = 1.0 - fraction + fraction * r;
            const double next = factor > 0.0 ? log_w + std::log(factor) : log_floor;
            if (next <= log_floor)
            {
                log_w = log_floor;
                hit_floor = true;
            }
            else
            {
                log_w = next;
            }
        }
        total += log_w - log_w0;
        ruined += hit_floor ? 1 : 0;
    }
    return {total / static_cast<double>(gross_returns.rows()) / grid.horizon(), ruined};
}

GrowthEvaluation evaluate_growth(double fraction, const ProcessSpec& process, double horizon,
                                 double dt, std::size_t paths_per_eval, std::uint64_t seed)
{
    const auto grid = TimeGrid::from_horizon(horizon, dt);
    return evaluate_growth(fraction, gross_return_paths(process, grid, paths_per_eval, seed), grid);
}

void PoolConfig::validate() const
{
    if (n_agents < 2)
        throw DomainError("pool needs at least 2 agents");
    if (generations < 1)
        throw DomainError("pool needs at least 1 generation");
    if (!(survivor_share > 0.0 && survivor_share < 1.0))
        throw DomainError("survivor_share must lie in (0, 1)");
    if (!(f_min < f_max))
        throw DomainError("f_min must be < f_max");
    if (!(mutation_sd >= 0.0) || !std::isfinite(mutation_sd))
        throw DomainError("mutation_sd must be >= 0");
    if (paths_per_eval < 1)
        throw DomainError("paths_per_eval must be >= 1");
    if (!(initial_wealth > 0.0))
        throw DomainError("initial_wealth must be > 0");
    if (initial_fraction && !(*initial_fraction >= f_min && *initial_fraction <= f_max))
        throw DomainError("initial_fraction must lie in [f_min, f_max]");
    if (generations >= (std::size_t{1} << 31) || paths_per_eval >= (std::size_t{1} << 32))
        throw DomainError("generations or paths_per_eval too large for the stream layout");
}

EvolutionResult evolutionary_optimize(const PoolConfig& config, const ProcessSpec& process)
{
    config.validate();
    const auto grid = TimeGrid::from_horizon(config.horizon, config.dt);

    std::vector<double> fractions(config.n_agents);
    {
        auto init = substream(config.seed, kPopulationStreams);
        for (auto& f : fractions)
        {
            const double u = init.next_uniform();
            f = config.initial_fraction.value_or(config.f_min + u * (config.f_max - config.f_min));
        }
    }

    const auto keep = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(config.survivor_share
                                             * static_cast<double>(config.n_agents))),
        1, config.n_agents);

    EvolutionResult result{};
    std::vector<double> fitness(config.n_agents);
    std::vector<std::size_t> order(config.n_agents);
    Matrix returns;
    for (std::size_t g = 0; g < config.generations; ++g)
    {
        if (g == 0 || !config.fixed_draws)
            returns = gross_return_paths(process, grid, config.paths_per_eval, config.seed,
                                         evaluation_base(g));
        parallel_for(config.n_agents, config.threads, [&](std::size_t a) {
            fitness[a] = evaluate_growth(fractions[a], returns, grid, config.initial_wealth).growth;
        });

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
        result.history.push_back({g, fractions[order[0]], fitness[order[0]]});
        if (g + 1 == config.generations)
            break;

        std::vector<double> next(config.n_agents);
        for (std::size_t s = 0; s < keep; ++s)
            next[s] = fractions[order[s]];
        auto mutation = substream(config.seed, kPopulationStreams + 1 + g);
        for (std::size_t a = keep; a < config.n_agents; ++a)
        {
            const double parent = next[(a - keep) % keep];
            const double z = standard_normal(mutation);
            next[a] = std::clamp(parent + config.mutation_sd * z, config.f_min, config.f_max);
        }
        fractions = std::move(next);
    }

    result.best_fraction = result.history.back().best_fraction;
    result.final_fractions = fractions;
    return result;
}

} // namespace ergo

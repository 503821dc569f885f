#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ergo/processes.hpp"

namespace ergo {

inline constexpr double kWealthFloor = 1e-12;

struct LogUtility
{
};

struct LinearUtility
{
};

/// (w^(1-gamma) - 1)/(1 - gamma); gamma = 1 is LogUtility.
struct CrraUtility
{
    double gamma;

    explicit CrraUtility(double gamma);
};

using UtilityKind = std::variant<LogUtility, CrraUtility, LinearUtility>;

double utility(double wealth, const UtilityKind& kind);

/// w*(1 - f + f*R), floored at kWealthFloor.
double wealth_update(double wealth, double fraction, double gross_return);

/// Constant-fraction investor in one risky asset and riskless cash at zero rate.
class Agent
{
  public:
    Agent(double wealth, double fraction, UtilityKind utility_kind = LogUtility{});

    double wealth() const { return wealth_; }
    double fraction() const { return fraction_; }
    const UtilityKind& utility_kind() const { return utility_kind_; }
    double current_utility() const { return utility(wealth_, utility_kind_); }

    //! Applies one period; returns true if the wealth floor was hit
    bool step(double gross_return);

  private:
    double wealth_;
    double fraction_;
    UtilityKind utility_kind_;
};

struct GrowthEvaluation
{
    //! Mean over paths of (log w_T - log w_0) / T
    double growth;
    //! Paths that touched the wealth floor
    std::size_t ruined_paths;
};

/// Per-step gross returns of a multiplicative process; one row per path.
///
/// Path p uses substream(seed, stream_base + p).
Matrix gross_return_paths(const ProcessSpec& process, const TimeGrid& grid, std::size_t paths,
                          std::uint64_t seed, std::uint64_t stream_base = 0);

/// Time-average log growth of a constant fraction over precomputed returns.
GrowthEvaluation evaluate_growth(double fraction, const Matrix& gross_returns,
                                 const TimeGrid& grid, double initial_wealth = 1.0);

GrowthEvaluation evaluate_growth(double fraction, const ProcessSpec& process, double horizon,
                                 double dt, std::size_t paths_per_eval, std::uint64_t seed);

struct PoolConfig
{
    std::size_t n_agents = 40;
    std::size_t generations = 30;
    double mutation_sd = 0.1;
    double survivor_share = 0.25;
    double horizon = 200.0;
    double dt = 0.01;
    std::size_t paths_per_eval = 50;
    double f_min = 0.0;
    double f_max = 3.0;
    std::uint64_t seed = 12345;
    //! Every agent starts here when set; otherwise uniform on [f_min, f_max]
    std::optional<double> initial_fraction;
    double initial_wealth = 1.0;
    //! Reuse generation 0's return draws in every generation
    bool fixed_draws = false;
    unsigned threads = 0;

    void validate() const;
};

struct GenerationRecord
{
    std::size_t generation;
    double best_fraction;
    double best_fitness;
};

struct EvolutionResult
{
    double best_fraction;
    std::vector<GenerationRecord> history;
    //! Fractions of the final generation, in agent order
    std::vector<double> final_fractions;
};

/// Truncation selection on time-average log growth.
///
/// Each generation every agent is scored on the same return draws (streams
/// indexed by generation and path, never by agent). The top survivor_share
/// are kept unchanged and the rest are refilled with Gaussian mutations of
/// the survivors, clipped to [f_min, f_max].
EvolutionResult evolutionary_optimize(const PoolConfig& config, const ProcessSpec& process);

} // namespace ergo

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergo/matrix.hpp"

namespace ergo {

/// Uniform grid 0, dt, ..., n_steps*dt.
class TimeGrid
{
  public:
    TimeGrid(double dt, std::size_t n_steps);

    /// n_steps = round(horizon / dt); the effective horizon is n_steps * dt.
    static TimeGrid from_horizon(double horizon, double dt);

    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t size() const { return n_steps_ + 1; }
    double horizon() const { return static_cast<double>(n_steps_) * dt_; }
    double time(std::size_t k) const { return static_cast<double>(k) * dt_; }
    std::vector<double> times() const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

  private:
    double dt_;
    std::size_t n_steps_;
};

//---------------------------------------------------------------------------//
// Process families. Constructors reject parameters outside their domain with
// DomainError.
//---------------------------------------------------------------------------//

struct Brownian
{
    double drift;
    double scale;
    double x0;

    Brownian(double drift, double scale, double x0 = 0.0);
    friend bool operator==(const Brownian&, const Brownian&) = default;
};

/// Exact log-normal update with (mu - sigma^2/2) log drift.
struct GeometricBrownian
{
    double mu;
    double sigma;
    double x0;

    GeometricBrownian(double mu, double sigma, double x0 = 1.0);
    friend bool operator==(const GeometricBrownian&, const GeometricBrownian&) = default;
};

struct LevyStable
{
    double alpha;
    double beta;
    double scale;
    double loc;
    double x0;

    LevyStable(double alpha, double beta, double scale, double loc, double x0 = 0.0);
    friend bool operator==(const LevyStable&, const LevyStable&) = default;
};

/// Log increments are loc*dt + scale*dt^(1/alpha)*Z with Z stable.
///
/// No convexity correction is applied to loc: for alpha < 2 the second moment
/// of Z does not exist, so unlike GeometricBrownian, loc is the median log
/// drift (beta = 0) rather than a mean-growth parameter.
struct GeometricLevy
{
    double alpha;
    double beta;
    double scale;
    double loc;
    double x0;

    GeometricLevy(double alpha, double beta, double scale, double loc, double x0 = 1.0);
    friend bool operator==(const GeometricLevy&, const GeometricLevy&) = default;
};

struct OrnsteinUhlenbeck
{
    double theta;
    double mean;
    double scale;
    double x0;

    OrnsteinUhlenbeck(double theta, double mean, double scale, double x0 = 0.0);
    friend bool operator==(const OrnsteinUhlenbeck&, const OrnsteinUhlenbeck&) = default;
};

/// Ornstein–Uhlenbeck whose reversion rate follows the path.
///
/// After each step the rate moves by eta*(|x - mean| - band)*dt and is
/// clipped to [theta_min, theta_max].
struct AdaptiveOU
{
    double theta0;
    double mean;
    double scale;
    double x0;
    double eta;
    double band = 0.0;
    double theta_min = 0.01;
    double theta_max = 50.0;

    AdaptiveOU(double theta0, double mean, double scale, double x0, double eta,
               double band = 0.0, double theta_min = 0.01, double theta_max = 50.0);
    friend bool operator==(const AdaptiveOU&, const AdaptiveOU&) = default;
};

/// Counting process: x jumps by `jump` at each event, flat in between.
struct Poisson
{
    double rate;
    double jump;
    double x0;

    Poisson(double rate, double jump = 1.0, double x0 = 0.0);
    friend bool operator==(const Poisson&, const Poisson&) = default;
};

using ProcessSpec = std::variant<Brownian, GeometricBrownian, LevyStable, GeometricLevy,
                                 OrnsteinUhlenbeck, AdaptiveOU, Poisson>;

std::string family_name(const ProcessSpec& spec);
double initial_value(const ProcessSpec& spec);
bool is_multiplicative(const ProcessSpec& spec);

/// Re-checks the constructor invariants (fields are public).
void validate(const ProcessSpec& spec);

/// Simulated paths: one row per instance, one column per grid point.
class Ensemble
{
  public:
    Ensemble(TimeGrid grid, Matrix values, std::optional<ProcessSpec> spec = std::nullopt,
             std::uint64_t seed = 0);

    const TimeGrid& grid() const { return grid_; }
    const Matrix& values() const { return values_; }
    std::size_t num_instances() const { return values_.rows(); }
    const std::optional<ProcessSpec>& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }

    friend bool operator==(const Ensemble&, const Ensemble&) = default;

  private:
    TimeGrid grid_;
    Matrix values_;
    std::optional<ProcessSpec> spec_;
    std::uint64_t seed_;
};

struct SimulateOptions
{
    //! Worker threads; 0 picks the hardware count. Results never depend on it.
    unsigned threads = 0;
};

/// Simulates num_instances paths; instance i draws only from substream(seed, i).
Ensemble simulate(const ProcessSpec& spec, double horizon, double dt, std::size_t num_instances,
                  std::uint64_t seed, SimulateOptions options = {});

/// Adaptive OU paths together with the reversion rate along each path.
struct AdaptiveRun
{
    Ensemble states;
    Matrix theta;
};

AdaptiveRun simulate_adaptive(const AdaptiveOU& spec, double horizon, double dt,
                              std::size_t num_instances, std::uint64_t seed,
                              SimulateOptions options = {});

//---------------------------------------------------------------------------//
// Single-step kernels
//---------------------------------------------------------------------------//

/// Noise scale of a driver over dt: sqrt(dt) for alpha = 2, dt^(1/alpha) otherwise.
double driver_time_scale(double dt, double alpha = 2.0);

/// x + drift*dt + scale*driver_time_scale(dt, alpha)*z
double additive_step(double x, double drift, double scale, double dt, double z,
                     double alpha = 2.0);

/// x*exp(loc*dt + scale*driver_time_scale(dt, alpha)*z), kept strictly positive.
double multiplicative_log_step(double x, double loc, double scale, double alpha, double dt,
                               double z);

/// Exact geometric Brownian factor exp((mu - sigma^2/2) dt + sigma sqrt(dt) z).
double gbm_step(double x, double mu, double sigma, double dt, double z);

/// Euler–Maruyama step; throws StabilityError unless theta*dt < 1.
double ou_step(double x, double theta, double mean, double scale, double dt, double z);

double adaptive_theta_update(double theta, double x, double mean, double eta, double band,
                             double theta_min, double theta_max, double dt);

} // namespace ergo

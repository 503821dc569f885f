#include "ergo/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "ergo/error.hpp"
#include "ergo/parallel.hpp"
#include "ergo/rand_core.hpp"

namespace ergo {
namespace {

void require(bool ok, const char* what)
{
    if (!ok)
        throw DomainError(what);
}

bool finite(double v) { return std::isfinite(v); }

template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_ou_stability(double theta, double dt)
{
    if (!(theta * dt < 1.0))
        throw StabilityError("explicit OU step needs theta*dt < 1, got theta*dt = "
                             + std::to_string(theta * dt));
}

void fill_path(const ProcessSpec& spec, const TimeGrid& grid, RngStream stream,
               std::span<double> path, std::span<double> theta_path)
{
    const double dt = grid.dt();
    const std::size_t n = grid.n_steps();
    path[0] = initial_value(spec);

    std::visit(
        overloaded{
            [&](const Brownian& p) {
                for (std::size_t k = 0; k < n; ++k)
                    path[k + 1] = additive_step(path[k], p.drift, p.scale, dt,
                                                standard_normal(stream));
            },
            [&](const GeometricBrownian& p) {
                for (std::size_t k = 0; k < n; ++k)
                    path[k + 1] = gbm_step(path[k], p.mu, p.sigma, dt, standard_normal(stream));
            },
            [&](const LevyStable& p) {
                const StableParams sp(p.alpha, p.beta);
                for (std::size_t k = 0; k < n; ++k)
                    path[k + 1] = additive_step(path[k], p.loc, p.scale, dt,
                                                standard_stable(stream, sp), p.alpha);
            },
            [&](const GeometricLevy& p) {
                const StableParams sp(p.alpha, p.beta);
                for (std::size_t k = 0; k < n; ++k)
                    path[k + 1] = multiplicative_log_step(path[k], p.loc, p.scale, p.alpha, dt,
                                                          standard_stable(stream, sp));
            },
            [&](const OrnsteinUhlenbeck& p) {
                for (std::size_t k = 0; k < n; ++k)
                    path[k + 1] = ou_step(path[k], p.theta, p.mean, p.scale, dt,
                                          standard_normal(stream));
            },
            [&](const AdaptiveOU& p) {
                double theta = p.theta0;
                if (!theta_path.empty())
                    theta_path[0] = theta;
                for (std::size_t k = 0; k < n; ++k)
                {
                    path[k + 1] = ou_step(path[k], theta, p.mean, p.scale, dt,
                                          standard_normal(stream));
                    theta = adaptive_theta_update(theta, path[k + 1], p.mean, p.eta, p.band,
                                                  p.theta_min, p.theta_max, dt);
                    if (!theta_path.empty())
                        theta_path[k + 1] = theta;
                }
            },
            [&](const Poisson& p) {
                const auto events = sample_poisson_events(stream, p.rate, grid.horizon());
                std::size_t seen = 0;
                for (std::size_t k = 1; k <= n; ++k)
                {
                    const double t = grid.time(k);
                    while (seen < events.size() && events[seen] <= t)
                        ++seen;
                    path[k] = p.x0 + p.jump * static_cast<double>(seen);
                }
            },
        },
        spec);
}

void check_sizes(double horizon, double dt, std::size_t num_instances)
{
    if (num_instances == 0)
        throw SizeError("num_instances must be at least 1");
    if (!(dt > 0.0) || !finite(dt))
        throw DomainError("dt must be finite and > 0");
    if (!(horizon >= dt) || !finite(horizon))
        throw SizeError("horizon must be >= dt");
}

void check_stability(const ProcessSpec& spec, double dt)
{
    if (const auto* ou = std::get_if<OrnsteinUhlenbeck>(&spec))
        check_ou_stability(ou->theta, dt);
    if (const auto* aou = std::get_if<AdaptiveOU>(&spec))
        check_ou_stability(aou->theta_max, dt);
}

} // namespace

TimeGrid::TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps)
{
    if (!(dt > 0.0) || !finite(dt))
        throw DomainError("time step must be finite and > 0");
    if (n_steps == 0)
        throw SizeError("time grid needs at least one step");
}

TimeGrid TimeGrid::from_horizon(double horizon, double dt)
{
    if (!(dt > 0.0) || !finite(dt))
        throw DomainError("time step must be finite and > 0");
    if (!(horizon >= dt) || !finite(horizon))
        throw SizeError("horizon must be >= dt");
    const double steps = std::round(horizon / dt);
    return TimeGrid(dt, static_cast<std::size_t>(steps));
}

std::vector<double> TimeGrid::times() const
{
    std::vector<double> out(size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = time(k);
    return out;
}

Brownian::Brownian(double drift_, double scale_, double x0_)
    : drift(drift_), scale(scale_), x0(x0_)
{
    validate(*this);
}

GeometricBrownian::GeometricBrownian(double mu_, double sigma_, double x0_)
    : mu(mu_), sigma(sigma_), x0(x0_)
{
    validate(*this);
}

LevyStable::LevyStable(double alpha_, double beta_, double scale_, double loc_, double x0_)
    : alpha(alpha_), beta(beta_), scale(scale_), loc(loc_), x0(x0_)
{
    validate(*this);
}

GeometricLevy::GeometricLevy(double alpha_, double beta_, double scale_, double loc_, double x0_)
    : alpha(alpha_), beta(beta_), scale(scale_), loc(loc_), x0(x0_)
{
    validate(*this);
}

OrnsteinUhlenbeck::OrnsteinUhlenbeck(double theta_, double mean_, double scale_, double x0_)
    : theta(theta_), mean(mean_), scale(scale_), x0(x0_)
{
    validate(*this);
}

AdaptiveOU::AdaptiveOU(double theta0_, double mean_, double scale_, double x0_, double eta_,
                       double band_, double theta_min_, double theta_max_)
    : theta0(theta0_), mean(mean_), scale(scale_), x0(x0_), eta(eta_), band(band_),
      theta_min(theta_min_), theta_max(theta_max_)
{
    validate(*this);
}

Poisson::Poisson(double rate_, double jump_, double x0_) : rate(rate_), jump(jump_), x0(x0_)
{
    validate(*this);
}

void validate(const ProcessSpec& spec)
{
    std::visit(
        overloaded{
            [](const Brownian& p) {
                require(finite(p.drift) && finite(p.x0), "Brownian: drift and x0 must be finite");
                require(p.scale >= 0.0 && finite(p.scale), "Brownian: scale must be >= 0");
            },
            [](const GeometricBrownian& p) {
                require(finite(p.mu), "GeometricBrownian: mu must be finite");
                require(p.sigma >= 0.0 && finite(p.sigma), "GeometricBrownian: sigma must be >= 0");
                require(p.x0 > 0.0 && finite(p.x0), "GeometricBrownian: x0 must be > 0");
            },
            [](const LevyStable& p) {
                require(p.alpha > 0.0 && p.alpha <= 2.0, "LevyStable: alpha must lie in (0, 2]");
                require(p.beta >= -1.0 && p.beta <= 1.0, "LevyStable: beta must lie in [-1, 1]");
                require(p.scale > 0.0 && finite(p.scale), "LevyStable: scale must be > 0");
                require(finite(p.loc) && finite(p.x0), "LevyStable: loc and x0 must be finite");
            },
            [](const GeometricLevy& p) {
                require(p.alpha > 0.0 && p.alpha <= 2.0, "GeometricLevy: alpha must lie in (0, 2]");
                require(p.beta >= -1.0 && p.beta <= 1.0, "GeometricLevy: beta must lie in [-1, 1]");
                require(p.scale > 0.0 && finite(p.scale), "GeometricLevy: scale must be > 0");
                require(finite(p.loc), "GeometricLevy: loc must be finite");
                require(p.x0 > 0.0 && finite(p.x0), "GeometricLevy: x0 must be > 0");
            },
            [](const OrnsteinUhlenbeck& p) {
                require(p.theta > 0.0 && finite(p.theta), "OrnsteinUhlenbeck: theta must be > 0");
                require(p.scale >= 0.0 && finite(p.scale), "OrnsteinUhlenbeck: scale must be >= 0");
                require(finite(p.mean) && finite(p.x0), "OrnsteinUhlenbeck: mean and x0 must be finite");
            },
            [](const AdaptiveOU& p) {
                require(p.theta_min > 0.0 && finite(p.theta_min), "AdaptiveOU: theta_min must be > 0");
                require(p.theta_max >= p.theta_min && finite(p.theta_max),
                        "AdaptiveOU: theta_max must be >= theta_min");
                require(p.theta0 >= p.theta_min && p.theta0 <= p.theta_max,
                        "AdaptiveOU: theta0 must lie in [theta_min, theta_max]");
                require(p.scale >= 0.0 && finite(p.scale), "AdaptiveOU: scale must be >= 0");
                require(p.eta >= 0.0 && finite(p.eta), "AdaptiveOU: eta must be >= 0");
                require(p.band >= 0.0 && finite(p.band), "AdaptiveOU: band must be >= 0");
                require(finite(p.mean) && finite(p.x0), "AdaptiveOU: mean and x0 must be finite");
            },
            [](const Poisson& p) {
                require(p.rate >= 0.0 && finite(p.rate), "Poisson: rate must be >= 0");
                require(finite(p.jump) && finite(p.x0), "Poisson: jump and x0 must be finite");
            },
        },
        spec);
}

std::string family_name(const ProcessSpec& spec)
{
    static constexpr const char* names[] = {"brownian", "gbm", "levy", "glevy", "ou", "aou", "poisson"};
    return names[spec.index()];
}

double initial_value(const ProcessSpec& spec)
{
    return std::visit([](const auto& p) { return p.x0; }, spec);
}

bool is_multiplicative(const ProcessSpec& spec)
{
    return std::holds_alternative<GeometricBrownian>(spec)
           || std::holds_alternative<GeometricLevy>(spec);
}

Ensemble::Ensemble(TimeGrid grid, Matrix values, std::optional<ProcessSpec> spec,
                   std::uint64_t seed)
    : grid_(grid), values_(std::move(values)), spec_(std::move(spec)), seed_(seed)
{
    if (values_.rows() == 0)
        throw SizeError("ensemble needs at least one instance");
    if (values_.cols() != grid_.size())
        throw SizeError("ensemble has " + std::to_string(values_.cols())
                        + " columns but the grid has " + std::to_string(grid_.size())
                        + " points");
}

Ensemble simulate(const ProcessSpec& spec, double horizon, double dt, std::size_t num_instances,
                  std::uint64_t seed, SimulateOptions options)
{
    validate(spec);
    check_sizes(horizon, dt, num_instances);
    check_stability(spec, dt);
    const auto grid = TimeGrid::from_horizon(horizon, dt);

    Matrix values(num_instances, grid.size());
    parallel_for(num_instances, options.threads, [&](std::size_t i) {
        fill_path(spec, grid, substream(seed, i), values.row(i), {});
    });
    return Ensemble(grid, std::move(values), spec, seed);
}

AdaptiveRun simulate_adaptive(const AdaptiveOU& spec, double horizon, double dt,
                              std::size_t num_instances, std::uint64_t seed,
                              SimulateOptions options)
{
    const ProcessSpec wrapped = spec;
    validate(wrapped);
    check_sizes(horizon, dt, num_instances);
    check_stability(wrapped, dt);
    const auto grid = TimeGrid::from_horizon(horizon, dt);

    Matrix values(num_instances, grid.size());
    Matrix theta(num_instances, grid.size());
    parallel_for(num_instances, options.threads, [&](std::size_t i) {
        fill_path(wrapped, grid, substream(seed, i), values.row(i), theta.row(i));
    });
    return {Ensemble(grid, std::move(values), wrapped, seed), std::move(theta)};
}

double driver_time_scale(double dt, double alpha)
{
    return alpha == 2.0 ? std::sqrt(dt) : std::pow(dt, 1.0 / alpha);
}

double additive_step(double x, double drift, double scale, double dt, double z, double alpha)
{
    return x + drift * dt + scale * driver_time_scale(dt, alpha) * z;
}

namespace {
double keep_positive(double x)
{
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = std::numeric_limits<double>::max();
    return x < lo ? lo : (x > hi ? hi : x);
}
} // namespace

double multiplicative_log_step(double x, double loc, double scale, double alpha, double dt,
                               double z)
{
    if (!(x > 0.0))
        throw DomainError("multiplicative step needs x > 0");
    return keep_positive(x * std::exp(loc * dt + scale * driver_time_scale(dt, alpha) * z));
}

double gbm_step(double x, double mu, double sigma, double dt, double z)
{
    if (!(x > 0.0))
        throw DomainError("multiplicative step needs x > 0");
    return keep_positive(x * std::exp((mu - 0.5 * sigma * sigma) * dt + sigma * std::sqrt(dt) * z));
}

double ou_step(double x, double theta, double mean, double scale, double dt, double z)
{
    check_ou_stability(theta, dt);
    return x + theta * (mean - x) * dt + scale * std::sqrt(dt) * z;
}

double adaptive_theta_update(double theta, double x, double mean, double eta, double band,
                             double theta_min, double theta_max, double dt)
{
    if (theta_min > theta_max)
        throw DomainError("theta_min must not exceed theta_max");
    if (eta == 0.0)
        return theta;
    const double next = theta + eta * (std::abs(x - mean) - band) * dt;
    return std::clamp(next, theta_min, theta_max);
}

} // namespace ergo

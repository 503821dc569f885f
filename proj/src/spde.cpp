#include "ergo/spde.hpp"

#include <cmath>
#include <string>

#include "ergo/error.hpp"
#include "ergo/rand_core.hpp"

namespace ergo {

SpdeSpec::SpdeSpec(double kappa_, double sigma_, double length_, Boundary boundary_,
                   InitialProfile initial_)
    : kappa(kappa_), sigma(sigma_), length(length_), boundary(boundary_),
      initial(std::move(initial_))
{
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw DomainError("SPDE kappa must be > 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw DomainError("SPDE sigma must be >= 0");
    if (!(length > 0.0) || !std::isfinite(length))
        throw DomainError("SPDE domain length must be > 0");
}

double diffusion_number(double kappa, double dx, double dt)
{
    return kappa * dt / (dx * dx);
}

FieldSolution simulate_heat_spde(const SpdeSpec& spec, double dx, double dt, double horizon,
                                 std::uint64_t seed, SpdeOptions options)
{
    if (!(dx > 0.0) || !(dt > 0.0) || !(horizon > 0.0))
        throw DomainError("dx, dt and horizon must be > 0");
    if (!(horizon >= dt))
        throw SizeError("horizon must be >= dt");
    if (options.save_every == 0)
        throw DomainError("save_every must be >= 1");

    const double ratio = diffusion_number(spec.kappa, dx, dt);
    if (ratio > 0.5 * (1.0 + 1e-12))
        throw StabilityError("kappa*dt/dx^2 = " + std::to_string(ratio)
                             + " exceeds the explicit-scheme bound 0.5");

    const double cells = std::round(spec.length / dx);
    if (cells < 1.0 || std::abs(cells * dx - spec.length) > 1e-9)
        throw GridError("domain length " + std::to_string(spec.length)
                        + " is not an integer multiple of dx = " + std::to_string(dx));
    const auto n_x = static_cast<std::size_t>(cells);
    const auto n_t = static_cast<std::size_t>(std::round(horizon / dt));

    std::vector<double> x_grid(n_x + 1);
    for (std::size_t j = 0; j <= n_x; ++j)
        x_grid[j] = static_cast<double>(j) * dx;

    std::vector<double> u(n_x + 1);
    if (const auto* fn = std::get_if<std::function<double(double)>>(&spec.initial))
    {
        for (std::size_t j = 0; j <= n_x; ++j)
            u[j] = (*fn)(x_grid[j]);
    }
    else
    {
        const auto& values = std::get<std::vector<double>>(spec.initial);
        if (values.size() != n_x + 1)
            throw SizeError("initial profile has " + std::to_string(values.size())
                            + " values, grid has " + std::to_string(n_x + 1) + " nodes");
        u = values;
    }

    const auto* dirichlet = std::get_if<Dirichlet>(&spec.boundary);
    if (dirichlet)
    {
        u.front() = dirichlet->left;
        u.back() = dirichlet->right;
    }

    const std::size_t stored = (n_t + options.save_every - 1) / options.save_every + 1;
    Matrix field(stored, n_x + 1);
    std::vector<double> t_grid;
    t_grid.reserve(stored);
    std::size_t row = 0;
    auto store = [&](std::size_t k) {
        std::copy(u.begin(), u.end(), field.row(row).begin());
        t_grid.push_back(static_cast<double>(k) * dt);
        ++row;
    };
    store(0);

    const double noise = spec.sigma * std::sqrt(dt / dx);
    const std::size_t first = dirichlet ? 1 : 0;
    const std::size_t last = dirichlet ? n_x - 1 : n_x;
    std::vector<double> next(n_x + 1);
    for (std::size_t k = 0; k < n_t; ++k)
    {
        auto stream = substream(seed, k);
        for (std::size_t j = first; j <= last && j <= n_x; ++j)
        {
            // Mirrored ghosts u[-1] = u[1], u[n+1] = u[n-1] at zero-flux ends.
            const double left = j == 0 ? u[1] : u[j - 1];
            const double right = j == n_x ? u[n_x - 1] : u[j + 1];
            double value = u[j] + ratio * (left - 2.0 * u[j] + right);
            if (noise != 0.0)
                value += noise * standard_normal(stream);
            next[j] = value;
        }
        if (dirichlet)
        {
            next.front() = dirichlet->left;
            next.back() = dirichlet->right;
        }
        u.swap(next);
        if ((k + 1) % options.save_every == 0 || k + 1 == n_t)
            store(k + 1);
    }

    return {std::move(x_grid), std::move(t_grid), std::move(field), spec, seed};
}

std::pair<std::vector<double>, std::vector<double>> extract_profiles(const FieldSolution& field)
{
    const auto first = field.u.row(0);
    const auto last = field.u.row(field.u.rows() - 1);
    return {{first.begin(), first.end()}, {last.begin(), last.end()}};
}

double trapezoid_mean(std::span<const double> profile)
{
    if (profile.size() < 2)
        throw SizeError("trapezoid mean needs at least 2 nodes");
    double sum = 0.5 * (profile.front() + profile.back());
    for (std::size_t j = 1; j + 1 < profile.size(); ++j)
        sum += profile[j];
    return sum / static_cast<double>(profile.size() - 1);
}

} // namespace ergo

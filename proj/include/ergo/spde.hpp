#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "ergo/matrix.hpp"

namespace ergo {

struct Dirichlet
{
    double left = 0.0;
    double right = 0.0;
};

/// Zero-flux ends via mirrored ghost nodes.
struct Neumann
{
};

using Boundary = std::variant<Dirichlet, Neumann>;
using InitialProfile = std::variant<std::function<double(double)>, std::vector<double>>;

/// du = kappa u_xx dt + sigma dW(x, t) on [0, length].
struct SpdeSpec
{
    double kappa;
    double sigma;
    double length;
    Boundary boundary;
    //! Either a function of x or n_x+1 node values
    InitialProfile initial;

    SpdeSpec(double kappa, double sigma, double length, Boundary boundary, InitialProfile initial);
};

struct FieldSolution
{
    std::vector<double> x_grid;
    //! Times of the stored rows
    std::vector<double> t_grid;
    //! One row per stored time, one column per node
    Matrix u;
    SpdeSpec spec;
    std::uint64_t seed;
};

struct SpdeOptions
{
    //! Keep every save_every-th step (the final step is always kept)
    std::size_t save_every = 1;
};

/// kappa*dt/dx^2
double diffusion_number(double kappa, double dx, double dt);

/// Explicit Euler with the central Laplacian and sigma*sqrt(dt/dx) node noise.
///
/// Noise for the step from time index k to k+1 comes from substream(seed, k)
/// in node order. Throws StabilityError when kappa*dt/dx^2 > 1/2 and GridError
/// when length is not a whole number of dx.
FieldSolution simulate_heat_spde(const SpdeSpec& spec, double dx, double dt, double horizon,
                                 std::uint64_t seed, SpdeOptions options = {});

std::pair<std::vector<double>, std::vector<double>> extract_profiles(const FieldSolution& field);

/// Trapezoid-weighted mean; the quantity a zero-flux run conserves.
double trapezoid_mean(std::span<const double> profile);

} // namespace ergo

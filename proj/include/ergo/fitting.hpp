#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ergo {

enum class Family
{
    normal,
    lognormal,
    stable_tail,
};

std::string to_string(Family family);

struct FitResult
{
    Family family;
    //! normal: mu, sigma; lognormal: mu_log, sigma_log; stable_tail: alpha_hat, k
    std::map<std::string, double> params;
    //! Not defined for stable_tail
    std::optional<double> log_likelihood;
    std::size_t n;
};

/// Maximum likelihood with the 1/n variance. Zero spread is a DegenerateError.
FitResult fit_normal(std::span<const double> samples);

/// fit_normal on log(samples); the likelihood carries the -sum(log x) Jacobian.
FitResult fit_lognormal(std::span<const double> samples);

/// Hill estimator over the k largest absolute values.
double tail_index_hill(std::span<const double> samples, std::size_t k);

FitResult fit_stable_tail(std::span<const double> samples, std::size_t k);

struct ModelScore
{
    Family family;
    double aic;
    FitResult fit;
};

/// Ranks candidates by AIC ascending; lognormal is skipped unless all data are
/// positive. Ties keep normal ahead of lognormal, then input order.
std::vector<ModelScore> compare_models(std::span<const double> samples,
                                       std::span<const Family> candidates);

} // namespace ergo

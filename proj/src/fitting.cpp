#include "ergo/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ergo/error.hpp"

namespace ergo {

std::string to_string(Family family)
{
    switch (family)
    {
        case Family::normal: return "normal";
        case Family::lognormal: return "lognormal";
        case Family::stable_tail: return "stable_tail";
    }
    return "unknown";
}

FitResult fit_normal(std::span<const double> samples)
{
    const std::size_t n = samples.size();
    if (n < 2)
        throw SizeError("normal fit needs at least 2 samples");

    double mu = 0.0;
    for (double x : samples)
        mu += x;
    mu /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples)
        ss += (x - mu) * (x - mu);
    const double var = ss / static_cast<double>(n);
    if (!(var > 0.0))
        throw DegenerateError("normal fit: zero sample spread, likelihood is unbounded");

    const double ll =
        -0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi * var) + 1.0);
    return {Family::normal, {{"mu", mu}, {"sigma", std::sqrt(var)}}, ll, n};
}

FitResult fit_lognormal(std::span<const double> samples)
{
    if (samples.size() < 2)
        throw SizeError("lognormal fit needs at least 2 samples");
    std::vector<double> logs(samples.size());
    double log_sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        if (!(samples[i] > 0.0))
            throw PositivityError("lognormal fit requires strictly positive samples");
        logs[i] = std::log(samples[i]);
        log_sum += logs[i];
    }
    const auto on_logs = fit_normal(logs);
    return {Family::lognormal,
            {{"mu_log", on_logs.params.at("mu")}, {"sigma_log", on_logs.params.at("sigma")}},
            *on_logs.log_likelihood - log_sum,
            on_logs.n};
}

double tail_index_hill(std::span<const double> samples, std::size_t k)
{
    const std::size_t n = samples.size();
    if (k < 2 || k >= n)
        throw DomainError("Hill estimator needs 2 <= k < n (k = " + std::to_string(k)
                          + ", n = " + std::to_string(n) + ")");

    std::vector<double> mags(n);
    std::transform(samples.begin(), samples.end(), mags.begin(),
                   [](double x) { return std::abs(x); });
    // Only the top k+1 order statistics matter.
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(n - k - 1),
                     mags.end());
    const double threshold = mags[n - k - 1];
    if (!(threshold > 0.0))
        throw DegenerateError("Hill estimator: threshold order statistic is zero");

    double sum = 0.0;
    for (std::size_t i = n - k; i < n; ++i)
        sum += std::log(mags[i] / threshold);
    if (!(sum > 0.0))
        throw DegenerateError("Hill estimator: top order statistics are all tied");
    return static_cast<double>(k) / sum;
}

FitResult fit_stable_tail(std::span<const double> samples, std::size_t k)
{
    const double alpha_hat = tail_index_hill(samples, k);
    return {Family::stable_tail,
            {{"alpha_hat", alpha_hat}, {"k", static_cast<double>(k)}},
            std::nullopt,
            samples.size()};
}

std::vector<ModelScore> compare_models(std::span<const double> samples,
                                       std::span<const Family> candidates)
{
    if (candidates.empty())
        throw DomainError("compare_models needs at least one candidate");
    const bool positive =
        std::all_of(samples.begin(), samples.end(), [](double x) { return x > 0.0; });

    std::vector<ModelScore> scores;
    for (Family family : candidates)
    {
        FitResult fit = [&] {
            switch (family)
            {
                case Family::normal: return fit_normal(samples);
                case Family::lognormal:
                    if (!positive)
                        return FitResult{family, {}, std::nullopt, 0};
                    return fit_lognormal(samples);
                case Family::stable_tail: break;
            }
            throw DomainError("compare_models supports normal and lognormal only");
        }();
        if (!fit.log_likelihood)
            continue;
        constexpr double kParams = 2.0;
        scores.push_back({family, 2.0 * kParams - 2.0 * *fit.log_likelihood, std::move(fit)});
    }
    if (scores.empty())
        throw PositivityError("no admissible candidate: lognormal needs strictly positive data");

    std::stable_sort(scores.begin(), scores.end(), [](const ModelScore& a, const ModelScore& b) {
        if (a.aic != b.aic)
            return a.aic < b.aic;
        return a.family < b.family;
    });
    return scores;
}

} // namespace ergo

#include "ergo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergo/error.hpp"

namespace ergo {
namespace {

void check_levels(std::span<const double> levels)
{
    if (levels.empty())
        throw DomainError("quantile levels must be nonempty");
    for (std::size_t j = 0; j < levels.size(); ++j)
    {
        if (!(levels[j] > 0.0 && levels[j] < 1.0))
            throw DomainError("quantile level " + std::to_string(levels[j]) + " outside (0, 1)");
        if (j > 0 && !(levels[j] > levels[j - 1]))
            throw DomainError("quantile levels must be strictly increasing");
    }
}

double sample_sd(std::span<const double> x)
{
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

} // namespace

double interpolated_quantile(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw SizeError("quantile of empty data");
    const double pos = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0)
        return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

QuantileFan quantile_fan(const Ensemble& ensemble, std::span<const double> levels)
{
    check_levels(levels);
    if (ensemble.num_instances() < 2)
        throw SizeError("quantile fan needs at least 2 instances");

    const auto& values = ensemble.values();
    QuantileFan fan{{levels.begin(), levels.end()},
                    std::vector<std::vector<double>>(levels.size(),
                                                     std::vector<double>(values.cols()))};
    for (std::size_t k = 0; k < values.cols(); ++k)
    {
        auto column = values.column(k);
        std::sort(column.begin(), column.end());
        for (std::size_t j = 0; j < levels.size(); ++j)
            fan.curves[j][k] = interpolated_quantile(column, levels[j]);
    }
    return fan;
}

SummaryCurves summary_curves(const Ensemble& ensemble, bool with_geometric)
{
    const auto& values = ensemble.values();
    if (with_geometric)
    {
        for (double v : values.data())
            if (!(v > 0.0))
                throw PositivityError("geometric mean requires strictly positive values");
    }

    const auto n = static_cast<double>(values.rows());
    SummaryCurves out;
    out.arithmetic_mean.resize(values.cols());
    out.median.resize(values.cols());
    if (with_geometric)
        out.geometric_mean.resize(values.cols());

    for (std::size_t k = 0; k < values.cols(); ++k)
    {
        auto column = values.column(k);
        double sum = 0.0;
        for (double v : column)
            sum += v;
        out.arithmetic_mean[k] = sum / n;
        std::sort(column.begin(), column.end());
        out.median[k] = interpolated_quantile(column, 0.5);
        if (with_geometric)
        {
            // Logs relative to the column max keep constant columns exact.
            const double top = column.back();
            double log_sum = 0.0;
            for (double v : column)
                log_sum += std::log(v / top);
            // exp(mean log) can land an ulp above the mean on near-constant columns.
            out.geometric_mean[k] = std::min(top * std::exp(log_sum / n), out.arithmetic_mean[k]);
        }
    }
    return out;
}

GrowthRates growth_rates(const Ensemble& ensemble)
{
    const double horizon = ensemble.grid().horizon();
    if (!(horizon > 0.0))
        throw DegenerateError("growth rates need a positive horizon");
    const auto& values = ensemble.values();
    const std::size_t last = values.cols() - 1;

    double log_growth = 0.0;
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < values.rows(); ++i)
    {
        const double x0 = values(i, 0);
        const double xt = values(i, last);
        if (!(x0 > 0.0 && xt > 0.0))
            throw PositivityError("growth rates require strictly positive values");
        log_growth += std::log(xt) - std::log(x0);
        ratio_sum += xt / x0;
    }
    const auto n = static_cast<double>(values.rows());
    if (values.rows() == 1)
    {
        const double rate = log_growth / horizon;
        return {rate, rate};
    }
    return {log_growth / n / horizon, std::log(ratio_sum / n) / horizon};
}

Asymptote estimate_asymptote(std::span<const double> series, const TimeGrid& grid,
                             double tail_fraction)
{
    if (series.size() != grid.size())
        throw SizeError("series length does not match the grid");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw DomainError("tail_fraction must lie in (0, 1]");

    const std::size_t n = series.size();
    const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
    if (tail < 2)
        throw SizeError("asymptote fit needs at least 2 tail points");
    const std::size_t start = n - tail;

    double t_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t k = start; k < n; ++k)
    {
        t_mean += grid.time(k);
        y_mean += series[k];
    }
    t_mean /= static_cast<double>(tail);
    y_mean /= static_cast<double>(tail);

    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = start; k < n; ++k)
    {
        const double dt = grid.time(k) - t_mean;
        sxy += dt * (series[k] - y_mean);
        sxx += dt * dt;
    }
    const double slope = sxy / sxx;
    return {slope, y_mean - slope * t_mean};
}

std::vector<double> distance_to_asymptote(std::span<const double> series, const TimeGrid& grid,
                                          const Asymptote& line)
{
    if (series.size() != grid.size())
        throw SizeError("series length does not match the grid");
    std::vector<double> out(series.size());
    for (std::size_t k = 0; k < series.size(); ++k)
        out[k] = std::abs(series[k] - (line.intercept + line.slope * grid.time(k)));
    return out;
}

std::vector<double> rolling_fluctuation(std::span<const double> series, std::size_t window)
{
    if (window < 2)
        throw DomainError("fluctuation window must be at least 2");
    if (series.size() < window + 1)
        throw SizeError("series of length " + std::to_string(series.size())
                        + " is too short for window " + std::to_string(window));

    std::vector<double> increments(series.size() - 1);
    for (std::size_t k = 0; k + 1 < series.size(); ++k)
        increments[k] = series[k + 1] - series[k];

    std::vector<double> out(increments.size() - window + 1);
    for (std::size_t m = 0; m < out.size(); ++m)
        out[m] = sample_sd(std::span(increments).subspan(m, window));
    return out;
}

PreasymptoticReport preasymptotic_report(std::span<const double> series, const TimeGrid& grid,
                                         double tail_fraction, std::size_t window)
{
    const auto line = estimate_asymptote(series, grid, tail_fraction);
    return {line, distance_to_asymptote(series, grid, line), rolling_fluctuation(series, window),
            window};
}

} // namespace ergo

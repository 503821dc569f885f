#pragma once

#include <span>
#include <vector>

#include "ergo/processes.hpp"

namespace ergo {

/// Cross-sectional quantiles; curves[j][k] is level j at grid index k.
struct QuantileFan
{
    std::vector<double> levels;
    std::vector<std::vector<double>> curves;
};

struct SummaryCurves
{
    std::vector<double> arithmetic_mean;
    std::vector<double> median;
    //! Empty when the geometric mean was not requested
    std::vector<double> geometric_mean;
};

/// Time-average vs ensemble-average exponential growth over the whole grid.
struct GrowthRates
{
    double time_average;
    double ensemble_average;
};

struct Asymptote
{
    double slope;
    double intercept;
};

struct PreasymptoticReport
{
    Asymptote asymptote;
    std::vector<double> distance_curve;
    //! Entry m covers increments m .. m+window-1, i.e. ends at grid index m+window
    std::vector<double> fluctuation_curve;
    std::size_t window;
};

inline const std::vector<double> kDefaultFanLevels{0.05, 0.25, 0.50, 0.75, 0.95};

/// Empirical quantile of sorted data at position (n-1)*p, linearly interpolated.
double interpolated_quantile(std::span<const double> sorted, double p);

QuantileFan quantile_fan(const Ensemble& ensemble,
                         std::span<const double> levels = kDefaultFanLevels);

/// Throws PositivityError if with_geometric is set and any value is <= 0.
SummaryCurves summary_curves(const Ensemble& ensemble, bool with_geometric = true);

GrowthRates growth_rates(const Ensemble& ensemble);

/// OLS line through the final tail_fraction of the series.
Asymptote estimate_asymptote(std::span<const double> series, const TimeGrid& grid,
                             double tail_fraction = 0.5);

std::vector<double> distance_to_asymptote(std::span<const double> series, const TimeGrid& grid,
                                          const Asymptote& line);

/// Rolling sample standard deviation of first differences.
std::vector<double> rolling_fluctuation(std::span<const double> series, std::size_t window);

PreasymptoticReport preasymptotic_report(std::span<const double> series, const TimeGrid& grid,
                                         double tail_fraction, std::size_t window);

} // namespace ergo

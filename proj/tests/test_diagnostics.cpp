#include <doctest.h>

#include <cmath>

#include "ergo/diagnostics.hpp"
#include "ergo/error.hpp"
#include "ergo/rand_core.hpp"
#include "oracles.hpp"

using namespace ergo;

namespace {

Ensemble from_rows(const std::vector<std::vector<double>>& rows, double dt = 1.0)
{
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            m(i, k) = rows[i][k];
    return Ensemble(TimeGrid(dt, rows.front().size() - 1), m);
}

/// Random ensemble with a mix of scales and occasional ties.
Ensemble random_ensemble(std::uint64_t seed, bool positive)
{
    auto s = substream(seed, 999);
    const std::size_t n = 2 + static_cast<std::size_t>(s.next_uniform() * 40);
    const std::size_t cols = 2 + static_cast<std::size_t>(s.next_uniform() * 20);
    Matrix m(n, cols);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < cols; ++k)
        {
            double v = standard_normal(s) * (1.0 + 10.0 * s.next_uniform());
            if (s.next_uniform() < 0.1)
                v = 1.0;
            m(i, k) = positive ? std::exp(v) : v;
        }
    return Ensemble(TimeGrid(0.1, cols - 1), m);
}

} // namespace

TEST_CASE("interpolated quantile")
{
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(interpolated_quantile(x, 0.5) == 2.5);
    CHECK(interpolated_quantile(x, 0.0 + 1e-300) == doctest::Approx(1.0));
    CHECK(interpolated_quantile(std::vector<double>{7.0}, 0.3) == 7.0);
}

TEST_CASE("quantile fan on constant and hand-built ensembles")
{
    const auto constant = from_rows({{3, 3, 3}, {3, 3, 3}, {3, 3, 3}});
    for (const auto& curve : quantile_fan(constant).curves)
        for (double v : curve)
            CHECK(v == 3.0);

    const auto four = from_rows({{1, 0}, {2, 0}, {3, 0}, {4, 0}});
    const std::vector<double> median{0.5};
    CHECK(quantile_fan(four, median).curves[0][0] == 2.5);
}

TEST_CASE("quantile fan validation")
{
    const auto e = from_rows({{1, 2}, {3, 4}});
    CHECK_THROWS_AS(quantile_fan(e, std::vector<double>{0.9, 0.1}), DomainError);
    CHECK_THROWS_AS(quantile_fan(e, std::vector<double>{0.0, 0.5}), DomainError);
    CHECK_THROWS_AS(quantile_fan(e, std::vector<double>{0.5, 1.0}), DomainError);
    CHECK_THROWS_AS(quantile_fan(e, std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(quantile_fan(from_rows({{1, 2}})), SizeError);
}

TEST_CASE("quantile fan is monotone across levels and translation equivariant")
{
    const std::vector<double> levels{0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        const auto e = random_ensemble(seed, false);
        const auto fan = quantile_fan(e, levels);
        for (std::size_t j = 1; j < levels.size(); ++j)
            for (std::size_t k = 0; k < fan.curves[j].size(); ++k)
                REQUIRE(fan.curves[j - 1][k] <= fan.curves[j][k]);

        Matrix shifted = e.values();
        for (std::size_t i = 0; i < shifted.rows(); ++i)
            for (double& v : shifted.row(i))
                v += 2.5;
        const auto moved = quantile_fan(Ensemble(e.grid(), shifted), levels);
        for (std::size_t j = 0; j < levels.size(); ++j)
            for (std::size_t k = 0; k < fan.curves[j].size(); ++k)
                REQUIRE(moved.curves[j][k] == doctest::Approx(fan.curves[j][k] + 2.5).epsilon(1e-12));
    }
}

TEST_CASE("Brownian fan matches normal quantiles and is symmetric")
{
    const auto e = simulate(Brownian(0.0, 1.0), 1.0, 0.01, 10000, 31);
    const std::vector<double> levels{0.05, 0.5, 0.95};
    const auto fan = quantile_fan(e, levels);
    const std::size_t last = e.grid().n_steps();
    CHECK(std::abs(fan.curves[2][last] - 1.6448536269514722) < 0.05);
    const double asym = (fan.curves[0][last] + fan.curves[2][last]) / 2.0 - fan.curves[1][last];
    CHECK(std::abs(asym) < 0.05);
}

TEST_CASE("summary curves")
{
    const auto constant = from_rows({{2, 2}, {2, 2}, {2, 2}});
    const auto c = summary_curves(constant);
    for (std::size_t k = 0; k < 2; ++k)
    {
        CHECK(c.arithmetic_mean[k] == 2.0);
        CHECK(c.median[k] == 2.0);
        CHECK(c.geometric_mean[k] == doctest::Approx(2.0).epsilon(1e-12));
    }

    const auto pair = summary_curves(from_rows({{1, 1}, {4, 4}}));
    CHECK(pair.arithmetic_mean[0] == 2.5);
    CHECK(pair.median[0] == 2.5);
    CHECK(pair.geometric_mean[0] == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(summary_curves(from_rows({{1, -1}, {4, 4}})), PositivityError);
    CHECK(summary_curves(from_rows({{1, -1}, {4, 4}}), false).geometric_mean.empty());
}

TEST_CASE("AM-GM ordering on random positive ensembles")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        const auto c = summary_curves(random_ensemble(seed, true));
        for (std::size_t k = 0; k < c.arithmetic_mean.size(); ++k)
            REQUIRE(c.arithmetic_mean[k] >= c.geometric_mean[k]);
    }
}

TEST_CASE("GBM summaries follow mu and mu - sigma^2/2")
{
    const auto e = simulate(GeometricBrownian(0.05, 0.2), 5.0, 0.01, 10000, 12);
    const auto c = summary_curves(e);
    CHECK(std::abs(std::log(c.arithmetic_mean.back()) / 5.0 - 0.05) < 0.01);
    CHECK(std::abs(std::log(c.geometric_mean.back()) / 5.0 - 0.03) < 0.01);
}

TEST_CASE("growth rates")
{
    Matrix m(3, 11);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k <= 10; ++k)
            m(i, k) = std::exp(0.07 * 0.5 * static_cast<double>(k));
    const auto det = growth_rates(Ensemble(TimeGrid(0.5, 10), m));
    CHECK(std::abs(det.time_average - 0.07) < 1e-12);
    CHECK(std::abs(det.ensemble_average - 0.07) < 1e-12);

    const auto single = from_rows({{2.0, 3.0, 5.0}}, 0.5);
    const auto r = growth_rates(single);
    CHECK(r.time_average == (std::log(5.0) - std::log(2.0)) / 1.0);
    CHECK(r.ensemble_average == r.time_average);

    CHECK_THROWS_AS(growth_rates(from_rows({{1.0, 0.0}, {1.0, 2.0}})), PositivityError);
}

TEST_CASE("GBM growth-rate gap equals sigma^2/2")
{
    const auto e = simulate(GeometricBrownian(0.05, 0.2), 10.0, 0.01, 10000, 1);
    const auto r = growth_rates(e);
    CHECK(std::abs(r.time_average - 0.03) < 0.006);
    CHECK(std::abs(r.ensemble_average - 0.05) < 0.01);
    CHECK(std::abs((r.ensemble_average - r.time_average) - 0.02) < 0.01);
}

TEST_CASE("asymptote estimation")
{
    const TimeGrid grid(0.1, 50);
    std::vector<double> line(grid.size()), flat(grid.size(), 5.0);
    for (std::size_t k = 0; k < grid.size(); ++k)
        line[k] = 2.0 + 3.0 * grid.time(k);
    const auto fit = estimate_asymptote(line, grid);
    CHECK(std::abs(fit.slope - 3.0) < 1e-9);
    CHECK(std::abs(fit.intercept - 2.0) < 1e-9);
    const auto f2 = estimate_asymptote(flat, grid, 1.0);
    CHECK(f2.slope == doctest::Approx(0.0));
    CHECK(f2.intercept == doctest::Approx(5.0));

    for (double d : distance_to_asymptote(line, grid, fit))
        CHECK(d < 1e-9);

    CHECK_THROWS_AS(estimate_asymptote(line, grid, 0.01), SizeError);
    CHECK_THROWS_AS(estimate_asymptote(line, grid, 0.0), DomainError);
    CHECK_THROWS_AS(estimate_asymptote(std::vector<double>{1.0, 2.0}, grid), SizeError);
}

TEST_CASE("asymptote slope under noise")
{
    const auto grid = TimeGrid::from_horizon(100.0, 0.01);
    auto s = substream(55, 0);
    std::vector<double> series(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        series[k] = 0.03 * grid.time(k) + 0.1 * standard_normal(s);
    CHECK(std::abs(estimate_asymptote(series, grid, 0.5).slope - 0.03) < 0.005);
}

TEST_CASE("distance to asymptote")
{
    const TimeGrid grid(1.0, 1);
    const auto d = distance_to_asymptote(std::vector<double>{0.0, 1.0}, grid, {0.0, 0.0});
    CHECK(d == std::vector<double>{0.0, 1.0});
    CHECK(distance_to_asymptote(std::vector<double>{0.0, -4.0}, grid, {1.0, 0.0})[1] == 5.0);
    CHECK_THROWS_AS(distance_to_asymptote(std::vector<double>{0.0}, grid, {0.0, 0.0}), SizeError);
}

TEST_CASE("rolling fluctuation")
{
    const auto alt = rolling_fluctuation(std::vector<double>{0, 1, 0, 1, 0}, 2);
    REQUIRE(alt.size() == 3);
    for (double v : alt)
        CHECK(v == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    std::vector<double> linear(30);
    for (std::size_t k = 0; k < linear.size(); ++k)
        linear[k] = 4.0 * static_cast<double>(k) - 1.0;
    for (double v : rolling_fluctuation(linear, 5))
        CHECK(v == 0.0);

    auto s = substream(8, 0);
    const auto noise = sample_gaussian(s, 40);
    std::vector<double> doubled(noise);
    for (double& v : doubled)
        v *= 2.0;
    const auto a = rolling_fluctuation(noise, 6);
    const auto b = rolling_fluctuation(doubled, 6);
    for (std::size_t m = 0; m < a.size(); ++m)
    {
        CHECK(a[m] >= 0.0);
        CHECK(b[m] == doctest::Approx(2.0 * a[m]).epsilon(1e-12));
    }

    CHECK_THROWS_AS(rolling_fluctuation(std::vector<double>{0, 1}, 2), SizeError);
    CHECK_THROWS_AS(rolling_fluctuation(std::vector<double>{0, 1, 2}, 1), DomainError);
}

TEST_CASE("preasymptotic report bundles the pieces")
{
    const auto e = simulate(GeometricLevy(1.55, 0.2, 0.35, 0.02), 5.0, 0.01, 1, 3);
    std::vector<double> logw;
    for (double v : e.values().row(0))
        logw.push_back(std::log(v));
    const auto report = preasymptotic_report(logw, e.grid(), 0.5, 20);
    CHECK(report.distance_curve.size() == e.grid().size());
    CHECK(report.fluctuation_curve.size() == e.grid().size() - 20);
    for (double d : report.distance_curve)
        CHECK(d >= 0.0);
}

TEST_CASE("geometric mean is exact on constant columns")
{
    for (double c : {1e-300, 1e-3, 7.25, 3e4, 1e300})
    {
        Matrix values(13, 4);
        for (std::size_t i = 0; i < 13; ++i)
            for (std::size_t k = 0; k < 4; ++k)
                values(i, k) = c;
        const auto s = summary_curves(Ensemble(TimeGrid(0.5, 3), std::move(values)));
        for (std::size_t k = 0; k < 4; ++k)
        {
            CHECK(s.geometric_mean[k] == c);
            CHECK(std::abs(s.arithmetic_mean[k] - c) <= 1e-15 * c);
        }
    }
}

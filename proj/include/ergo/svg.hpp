#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergo/matrix.hpp"

namespace ergo::svg {

struct Curve
{
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// values(r, c) sits at (x[c], y[r]); drawn as a grid of filled cells.
struct Heatmap
{
    std::vector<double> x;
    std::vector<double> y;
    Matrix values;
};

struct Panel
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Curve> curves;
    std::optional<Heatmap> heatmap;
    bool log_y = false;
};

struct Figure
{
    std::string title;
    std::vector<Panel> panels;
    //! Panels per row
    int columns = 1;
};

/// Fill color for t in [0, 1]; monotone in t along a viridis-like ramp.
std::string ramp_color(double t);

/// Standalone SVG 1.1 document. Throws DomainError on empty panels or
/// non-finite data, and on nonpositive data in log-y panels.
std::string render(const Figure& figure);
std::string render(const Panel& panel);

} // namespace ergo::svg

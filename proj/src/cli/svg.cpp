#include "ergo/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ergo/error.hpp"

namespace ergo::svg {
namespace {

constexpr double kPanelWidth = 480.0;
constexpr double kPanelHeight = 320.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 44.0;
constexpr double kTitleHeight = 32.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text)
    {
        switch (c)
        {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void widen()
    {
        if (hi == lo)
        {
            const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
            lo -= pad;
            hi += pad;
        }
    }
};

void require_finite(double v, const std::string& where)
{
    if (!std::isfinite(v))
        throw DomainError("non-finite value in " + where);
}

struct Frame
{
    double left, top, width, height;
    Range x, y;
    bool log_y;

    double px(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * width; }
    double py(double v) const
    {
        const double t = log_y ? std::log10(v) : v;
        return top + height - (t - y.lo) / (y.hi - y.lo) * height;
    }
};

void draw_axes(std::string& out, const Frame& f, const Panel& panel)
{
    out += "<rect x=\"" + fmt(f.left) + "\" y=\"" + fmt(f.top) + "\" width=\"" + fmt(f.width)
           + "\" height=\"" + fmt(f.height) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i)
    {
        const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
        const double x = f.px(xv);
        out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(f.top + f.height) + "\" x2=\"" + fmt(x)
               + "\" y2=\"" + fmt(f.top + f.height + 4) + "\" stroke=\"#333\"/>\n";
        out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(f.top + f.height + 16)
               + "\" font-size=\"10\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";

        const double yt = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
        const double y = f.top + f.height - (yt - f.y.lo) / (f.y.hi - f.y.lo) * f.height;
        const double yv = f.log_y ? std::pow(10.0, yt) : yt;
        out += "<line x1=\"" + fmt(f.left - 4) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(f.left)
               + "\" y2=\"" + fmt(y) + "\" stroke=\"#333\"/>\n";
        out += "<text x=\"" + fmt(f.left - 6) + "\" y=\"" + fmt(y + 3)
               + "\" font-size=\"10\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
    }
    out += "<text x=\"" + fmt(f.left + f.width / 2) + "\" y=\"" + fmt(f.top - 10)
           + "\" font-size=\"12\" text-anchor=\"middle\">" + escape(panel.title) + "</text>\n";
    out += "<text x=\"" + fmt(f.left + f.width / 2) + "\" y=\"" + fmt(f.top + f.height + 34)
           + "\" font-size=\"11\" text-anchor=\"middle\">" + escape(panel.x_label) + "</text>\n";
    const double ly = f.top + f.height / 2;
    out += "<text x=\"" + fmt(f.left - 48) + "\" y=\"" + fmt(ly)
           + "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 "
           + fmt(f.left - 48) + " " + fmt(ly) + ")\">"
           + escape(panel.y_label + (panel.log_y ? " (log)" : "")) + "</text>\n";
}

void draw_heatmap(std::string& out, const Frame& f, const Heatmap& map, const Range& values)
{
    const double cell_w = f.width / static_cast<double>(map.values.cols());
    const double cell_h = f.height / static_cast<double>(map.values.rows());
    for (std::size_t r = 0; r < map.values.rows(); ++r)
    {
        // First row at the bottom.
        const double y = f.top + f.height - static_cast<double>(r + 1) * cell_h;
        for (std::size_t c = 0; c < map.values.cols(); ++c)
        {
            const double t = (map.values(r, c) - values.lo) / (values.hi - values.lo);
            out += "<rect x=\"" + fmt(f.left + static_cast<double>(c) * cell_w) + "\" y=\""
                   + fmt(y) + "\" width=\"" + fmt(cell_w) + "\" height=\"" + fmt(cell_h)
                   + "\" fill=\"" + ramp_color(t) + "\"/>\n";
        }
    }
}

void draw_panel(std::string& out, const Panel& panel, double origin_x, double origin_y)
{
    if (panel.curves.empty() && !panel.heatmap)
        throw DomainError("panel '" + panel.title + "' has nothing to draw");

    Frame f{origin_x + kMarginLeft, origin_y + kMarginTop,
            kPanelWidth - kMarginLeft - kMarginRight, kPanelHeight - kMarginTop - kMarginBottom,
            {}, {}, panel.log_y};
    Range heat_values;

    for (const auto& curve : panel.curves)
    {
        if (curve.x.empty() || curve.x.size() != curve.y.size())
            throw DomainError("curve '" + curve.name + "' is empty or has mismatched x/y");
        for (std::size_t i = 0; i < curve.x.size(); ++i)
        {
            require_finite(curve.x[i], "curve '" + curve.name + "'");
            require_finite(curve.y[i], "curve '" + curve.name + "'");
            if (panel.log_y && !(curve.y[i] > 0.0))
                throw DomainError("log-scale panel needs positive values in '" + curve.name + "'");
            f.x.add(curve.x[i]);
            f.y.add(panel.log_y ? std::log10(curve.y[i]) : curve.y[i]);
        }
    }
    if (panel.heatmap)
    {
        const auto& map = *panel.heatmap;
        if (map.values.rows() == 0 || map.values.cols() == 0 || map.x.size() != map.values.cols()
            || map.y.size() != map.values.rows())
            throw DomainError("heatmap axes do not match its value grid");
        for (double v : map.x)
        {
            require_finite(v, "heatmap x");
            f.x.add(v);
        }
        for (double v : map.y)
        {
            require_finite(v, "heatmap y");
            f.y.add(v);
        }
        for (double v : map.values.data())
        {
            require_finite(v, "heatmap values");
            heat_values.add(v);
        }
        heat_values.widen();
    }
    f.x.widen();
    f.y.widen();

    if (panel.heatmap)
        draw_heatmap(out, f, *panel.heatmap, heat_values);

    for (std::size_t c = 0; c < panel.curves.size(); ++c)
    {
        const auto& curve = panel.curves[c];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[c % kPalette.size()])
               + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < curve.x.size(); ++i)
            out += (i ? " " : "") + fmt(f.px(curve.x[i])) + "," + fmt(f.py(curve.y[i]));
        out += "\"/>\n";
    }
    draw_axes(out, f, panel);

    // Legend only for a handful of named curves.
    std::size_t named = 0;
    for (const auto& curve : panel.curves)
        named += curve.name.empty() ? 0 : 1;
    if (named > 0 && panel.curves.size() <= kPalette.size())
    {
        double y = f.top + 12;
        for (std::size_t c = 0; c < panel.curves.size(); ++c)
        {
            if (panel.curves[c].name.empty())
                continue;
            out += "<line x1=\"" + fmt(f.left + 8) + "\" y1=\"" + fmt(y - 4) + "\" x2=\""
                   + fmt(f.left + 24) + "\" y2=\"" + fmt(y - 4) + "\" stroke=\""
                   + kPalette[c % kPalette.size()] + "\" stroke-width=\"2\"/>\n";
            out += "<text x=\"" + fmt(f.left + 28) + "\" y=\"" + fmt(y)
                   + "\" font-size=\"10\">" + escape(panel.curves[c].name) + "</text>\n";
            y += 13;
        }
    }
}

} // namespace

std::string ramp_color(double t)
{
    static constexpr std::array<std::array<double, 3>, 5> anchors{{{68, 1, 84},
                                                                   {59, 82, 139},
                                                                   {33, 145, 140},
                                                                   {94, 201, 98},
                                                                   {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * static_cast<double>(anchors.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), anchors.size() - 2);
    const double frac = pos - static_cast<double>(i);
    char buf[8];
    int rgb[3];
    for (int k = 0; k < 3; ++k)
        rgb[k] = static_cast<int>(std::lround(anchors[i][k] + frac * (anchors[i + 1][k] - anchors[i][k])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string render(const Figure& figure)
{
    if (figure.panels.empty())
        throw DomainError("figure has no panels");
    const int cols = std::max(1, figure.columns);
    const auto rows = (static_cast<int>(figure.panels.size()) + cols - 1) / cols;
    const double width = kPanelWidth * cols;
    const double height = kTitleHeight + kPanelHeight * rows;

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
                      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
                      + fmt(width) + "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 "
                      + fmt(width) + " " + fmt(height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height)
           + "\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"" + fmt(width / 2) + "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
           + escape(figure.title) + "</text>\n";
    for (std::size_t p = 0; p < figure.panels.size(); ++p)
    {
        const auto col = static_cast<double>(static_cast<int>(p) % cols);
        const auto row = static_cast<double>(static_cast<int>(p) / cols);
        out += "<g>\n";
        draw_panel(out, figure.panels[p], col * kPanelWidth, kTitleHeight + row * kPanelHeight);
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string render(const Panel& panel)
{
    return render(Figure{"", {panel}, 1});
}

} // namespace ergo::svg

#include "docmap/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "docmap/error.hpp"
#include "docmap/io.hpp"
#include "docmap/xml.hpp"

namespace docmap {
namespace {

constexpr std::string_view kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    return format_fixed(v, 2);
}

std::string header(double w, double h) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(w) + "\" height=\"" +
           num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
           "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"#ffffff\"/>\n";
}

// Uniform scale + offset mapping data coordinates into the canvas interior.
struct Affine {
    double scale = 1;
    double ox = 0;
    double oy = 0;
    double cx = 0;
    double cy = 0;

    double x(double v) const { return ox + (v - cx) * scale; }
    double y(double v) const { return oy - (v - cy) * scale; }  // SVG y grows downward
};

Affine fit(const MapScene& scene) {
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    auto take = [&](double x, double y) {
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    };
    for (const auto& p : scene.points) take(p.x, p.y);
    for (const auto& l : scene.labels) take(l.x, l.y);
    const auto& c = scene.canvas;
    Affine a;
    a.ox = c.width / 2;
    a.oy = c.height / 2;
    if (!std::isfinite(lo_x)) return a;
    a.cx = 0.5 * (lo_x + hi_x);
    a.cy = 0.5 * (lo_y + hi_y);
    const double span_x = hi_x - lo_x;
    const double span_y = hi_y - lo_y;
    const double avail_x = c.width - 2 * c.margin;
    const double avail_y = c.height - 2 * c.margin;
    double s = std::numeric_limits<double>::infinity();
    if (span_x > 0) s = std::min(s, avail_x / span_x);
    if (span_y > 0) s = std::min(s, avail_y / span_y);
    a.scale = std::isfinite(s) ? s : 1.0;
    return a;
}

}  // namespace

std::string_view cluster_color(int cluster) {
    if (cluster < 0) return kUnassignedColor;
    return kPalette[static_cast<std::size_t>(cluster) % std::size(kPalette)];
}

std::string render_map_svg(const MapScene& scene) {
    const auto& c = scene.canvas;
    const auto a = fit(scene);
    std::string out = header(c.width, c.height);

    out += "<g class=\"points\">\n";
    for (const auto& p : scene.points) {
        out += "<circle cx=\"" + num(a.x(p.x)) + "\" cy=\"" + num(a.y(p.y)) + "\" r=\"3\" fill=\"" +
               std::string(cluster_color(p.cluster)) + "\" fill-opacity=\"0.75\" data-cluster=\"" +
               (p.cluster < 0 ? std::string("-") : std::to_string(p.cluster)) + "\"/>\n";
    }
    out += "</g>\n";

    constexpr double line_h = 15;
    constexpr double box_w = 190;
    constexpr double offset = 14;
    out += "<g class=\"labels\">\n";
    for (const auto& l : scene.labels) {
        const auto count = std::min<std::size_t>(l.labels.size(), 5);
        const double box_h = line_h * static_cast<double>(count + 1) + 8;
        const double ax = a.x(l.x);
        const double ay = a.y(l.y);
        // Box sits up and to the right of the anchor, flipped when that
        // would leave the canvas, so the cluster centre stays visible.
        double bx = ax + offset;
        double by = ay - offset - box_h;
        if (bx + box_w > c.width) bx = ax - offset - box_w;
        if (by < 0) by = ay + offset;
        bx = std::clamp(bx, 0.0, std::max(0.0, c.width - box_w));
        by = std::clamp(by, 0.0, std::max(0.0, c.height - box_h));

        const auto color = std::string(cluster_color(l.cluster));
        out += "<g class=\"cluster-label\" data-cluster=\"" + std::to_string(l.cluster) + "\">\n";
        out += "<line x1=\"" + num(ax) + "\" y1=\"" + num(ay) + "\" x2=\"" + num(bx) + "\" y2=\"" +
               num(by + box_h / 2) + "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
        out += "<rect x=\"" + num(bx) + "\" y=\"" + num(by) + "\" width=\"" + num(box_w) + "\" height=\"" +
               num(box_h) + "\" rx=\"4\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"" + color + "\"/>\n";
        out += "<text x=\"" + num(bx + 6) + "\" y=\"" + num(by + line_h) + "\" font-size=\"13\" font-weight=\"bold\" fill=\"" +
               color + "\">" + std::to_string(l.cluster) + "</text>\n";
        for (std::size_t i = 0; i < count; ++i) {
            out += "<text x=\"" + num(bx + 6) + "\" y=\"" + num(by + line_h * static_cast<double>(i + 2)) +
                   "\" font-size=\"12\" fill=\"#222222\">" + xml::escape(l.labels[i]) + "</text>\n";
        }
        out += "</g>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

void render_map(const MapScene& scene, const std::filesystem::path& out) {
    write_file(out, render_map_svg(scene));
}

std::string render_curves_svg(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw ContractError("render_curves: need at least one report");
    constexpr double width = 1000;
    constexpr double height = 820;
    constexpr double panel_w = 420;
    constexpr double panel_h = 300;
    constexpr double pad_l = 60;
    constexpr double pad_t = 40;
    constexpr double gap_x = 80;
    constexpr double gap_y = 80;

    std::size_t max_n = 1;
    for (const auto& r : reports) {
        for (const auto& row : r.rows) max_n = std::max(max_n, row.n);
    }

    struct Panel {
        const char* id;
        const char* title;
        const char* x_label;
        const char* y_label;
        bool n_axis;
        double (*x)(const EvalRow&);
        double (*y)(const EvalRow&);
    };
    const Panel panels[] = {
        {"a", "(a) precision", "n", "precision", true, [](const EvalRow& r) { return static_cast<double>(r.n); },
         [](const EvalRow& r) { return r.precision; }},
        {"b", "(b) recall", "n", "recall", true, [](const EvalRow& r) { return static_cast<double>(r.n); },
         [](const EvalRow& r) { return r.recall; }},
        {"c", "(c) F1", "n", "F1", true, [](const EvalRow& r) { return static_cast<double>(r.n); },
         [](const EvalRow& r) { return r.f1; }},
        {"d", "(d) precision vs recall", "recall", "precision", false, [](const EvalRow& r) { return r.recall; },
         [](const EvalRow& r) { return r.precision; }},
    };

    std::string out = header(width, height);
    for (std::size_t p = 0; p < 4; ++p) {
        const auto& panel = panels[p];
        const double x0 = pad_l + static_cast<double>(p % 2) * (panel_w + gap_x);
        const double y0 = pad_t + static_cast<double>(p / 2) * (panel_h + gap_y);
        const double x_lo = panel.n_axis ? 1.0 : 0.0;
        const double x_hi = panel.n_axis ? std::max(2.0, static_cast<double>(max_n)) : 1.0;
        auto px = [&](double v) { return x0 + (v - x_lo) / (x_hi - x_lo) * panel_w; };
        auto py = [&](double v) { return y0 + panel_h - std::clamp(v, 0.0, 1.0) * panel_h; };

        out += "<g class=\"panel\" id=\"panel-" + std::string(panel.id) + "\">\n";
        out += "<text x=\"" + num(x0) + "\" y=\"" + num(y0 - 12) + "\" font-size=\"14\" font-weight=\"bold\">" +
               panel.title + "</text>\n";
        out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(panel_w) + "\" height=\"" +
               num(panel_h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
        for (int t = 0; t <= 5; ++t) {
            const double v = t / 5.0;
            out += "<line x1=\"" + num(x0 - 4) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(x0) + "\" y2=\"" +
                   num(py(v)) + "\" stroke=\"#333333\"/>\n";
            out += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(py(v) + 4) + "\" font-size=\"10\" text-anchor=\"end\">" +
                   format_fixed(v, 1) + "</text>\n";
            const double xv = x_lo + (x_hi - x_lo) * v;
            out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(y0 + panel_h + 16) +
                   "\" font-size=\"10\" text-anchor=\"middle\">" +
                   (panel.n_axis ? format_fixed(xv, 0) : format_fixed(xv, 1)) + "</text>\n";
        }
        out += "<text x=\"" + num(x0 + panel_w / 2) + "\" y=\"" + num(y0 + panel_h + 34) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + panel.x_label + "</text>\n";
        out += "<text x=\"" + num(x0 - 42) + "\" y=\"" + num(y0 + panel_h / 2) +
               "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " + num(x0 - 42) + " " +
               num(y0 + panel_h / 2) + ")\">" + panel.y_label + "</text>\n";
        for (std::size_t m = 0; m < reports.size(); ++m) {
            std::string pts;
            for (const auto& row : reports[m].rows) {
                if (!pts.empty()) pts += ' ';
                pts += num(px(panel.x(row))) + "," + num(py(panel.y(row)));
            }
            out += "<polyline class=\"curve\" data-method=\"" + xml::escape(reports[m].method) + "\" points=\"" + pts +
                   "\" fill=\"none\" stroke=\"" + std::string(cluster_color(static_cast<int>(m))) +
                   "\" stroke-width=\"2\"/>\n";
        }
        out += "</g>\n";
    }

    out += "<g class=\"legend\">\n";
    for (std::size_t m = 0; m < reports.size(); ++m) {
        const double lx = pad_l + static_cast<double>(m) * 150;
        const double ly = height - 20;
        out += "<g class=\"legend-entry\"><line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 24) +
               "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + std::string(cluster_color(static_cast<int>(m))) +
               "\" stroke-width=\"3\"/><text x=\"" + num(lx + 30) + "\" y=\"" + num(ly) + "\" font-size=\"12\">" +
               xml::escape(reports[m].method) + "</text></g>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

void render_curves(const std::vector<EvalReport>& reports, const std::filesystem::path& out) {
    write_file(out, render_curves_svg(reports));
}

}  // namespace docmap

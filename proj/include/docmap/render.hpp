#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "docmap/evaluation.hpp"

namespace docmap {

struct MapPoint {
    double x = 0;
    double y = 0;
    int cluster = -1;  // kUnassigned
};

struct MapLabel {
    int cluster = 0;
    double x = 0;  // anchor (cluster mean) in map coordinates
    double y = 0;
    std::vector<std::string> labels;  // at most five are drawn
};

struct Canvas {
    double width = 1200;
    double height = 900;
    double margin = 40;
};

struct MapScene {
    std::vector<MapPoint> points;
    std::vector<MapLabel> labels;
    Canvas canvas;
};

inline constexpr std::string_view kUnassignedColor = "#b0b0b0";
// Ten-colour qualitative palette, cycled beyond ten clusters.
std::string_view cluster_color(int cluster);

std::string render_map_svg(const MapScene& scene);
void render_map(const MapScene& scene, const std::filesystem::path& out);

// Four panels: precision, recall and F1 against n, and precision against recall.
std::string render_curves_svg(const std::vector<EvalReport>& reports);
void render_curves(const std::vector<EvalReport>& reports, const std::filesystem::path& out);

}  // namespace docmap

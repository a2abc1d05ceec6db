#pragma once

#include <string>
#include <vector>

#include "kresling/geometry.hpp"
#include "kresling/sizing.hpp"

namespace kresling {

// Laser-cutting features, all in mm.
struct PatternStyle {
    double dash_on = 2.0;
    double dash_off = 2.0;
    double fillet_radius = 1.5;
    double eyelet_diameter = 4.0;
    double tab_width = 8.0;
};

// Throws StyleInfeasible for negative values or a zero dash length.
void validate(const PatternStyle& style);

struct PathCommand {
    enum class Op { Move, Line, Arc };
    Op op = Op::Move;
    Vec2 to = Vec2::Zero();
    double radius = 0.0;  // arcs only
    bool sweep = false;   // arcs only: true turns toward +angle in drawing coordinates
};

struct DrawingPath {
    std::string css_class;
    int strip = 0;  // section number
    bool closed = false;
    std::vector<PathCommand> commands;
};

struct DrawingCircle {
    int strip = 0;
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};

struct DrawingLayer {
    std::string name;
    std::vector<DrawingPath> paths;
    std::vector<DrawingCircle> circles;
};

// Drawing coordinates have y pointing down (SVG convention). Layers: cut, crease,
// eyelet, tab.
struct ExportedDrawing {
    double width = 0.0;
    double height = 0.0;
    std::vector<DrawingLayer> layers;

    const DrawingLayer& layer(const std::string& name) const;
};

inline constexpr double kSheetMargin = 10.0;

// One strip per section, stacked top to bottom from section 1. Throws StyleInfeasible
// when a fillet, eyelet or tab does not fit the cells.
ExportedDrawing export_pattern(const OrthosisDesign& design, const PatternStyle& style = {});

std::string to_svg(const ExportedDrawing& drawing);
// AutoCAD R12 ASCII with one layer per drawing layer; arcs become polyline bulges.
std::string to_dxf(const ExportedDrawing& drawing);

}  // namespace kresling

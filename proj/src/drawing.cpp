#include "kresling/drawing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kresling/error.hpp"
#include "kresling/io.hpp"

namespace kresling {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Vertices closer to straight than this are left sharp.
constexpr double kStraightTurn = 1e-9;

struct Fillet {
    Vec2 enter;  // tangent point on the incoming edge
    Vec2 leave;  // tangent point on the outgoing edge
    double radius = 0.0;
    bool sweep = false;
};

std::vector<Fillet> fillet_polygon(const std::vector<Vec2>& poly, double radius, int section) {
    const std::size_t n = poly.size();
    std::vector<Fillet> out(n);
    std::vector<double> setback(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2& prev = poly[(j + n - 1) % n];
        const Vec2& v = poly[j];
        const Vec2& next = poly[(j + 1) % n];
        const Vec2 u = (v - prev).normalized();
        const Vec2 w = (next - v).normalized();
        const double turn = cross2(u, w);
        out[j].enter = v;
        out[j].leave = v;
        if (radius == 0.0 || std::abs(turn) < kStraightTurn) continue;
        const double inner = std::acos(std::clamp(-u.dot(w), -1.0, 1.0));
        setback[j] = radius / std::tan(0.5 * inner);
        out[j].enter = v - u * setback[j];
        out[j].leave = v + w * setback[j];
        out[j].radius = radius;
        out[j].sweep = turn > 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + 1) % n;
        if (setback[j] + setback[k] > (poly[k] - poly[j]).norm() + 1e-12) {
            throw Error(ErrorCode::StyleInfeasible,
                        "fillet radius too large for section " + std::to_string(section) + " outline");
        }
    }
    return out;
}

DrawingPath outline_path(const std::vector<Vec2>& poly, double radius, int section, const std::string& css) {
    const auto fillets = fillet_polygon(poly, radius, section);
    DrawingPath path;
    path.css_class = css;
    path.strip = section;
    path.closed = true;
    path.commands.push_back({PathCommand::Op::Move, fillets[0].leave});
    const std::size_t n = poly.size();
    for (std::size_t step = 1; step <= n; ++step) {
        const Fillet& f = fillets[step % n];
        if (f.radius == 0.0) {
            if (step < n) path.commands.push_back({PathCommand::Op::Line, f.enter});
            continue;
        }
        path.commands.push_back({PathCommand::Op::Line, f.enter});
        path.commands.push_back({PathCommand::Op::Arc, f.leave, f.radius, f.sweep});
    }
    return path;
}

DrawingPath dashed_path(const Vec2& from, const Vec2& to, double trim, const PatternStyle& style, int section,
                        const std::string& css) {
    const double full = (to - from).norm();
    const double length = full - 2.0 * trim;
    if (!(length > 0.0)) {
        throw Error(ErrorCode::StyleInfeasible, "fillet radius leaves no crease in section " + std::to_string(section));
    }
    const Vec2 dir = (to - from) / full;
    const Vec2 start = from + dir * trim;
    const double period = style.dash_on + style.dash_off;
    const int count = std::max(1, static_cast<int>(std::floor((length + style.dash_off) / period + 0.5)));
    // Stretch the pattern so the first and last dash meet the crease ends.
    const double scale = length / (count * style.dash_on + (count - 1) * style.dash_off);
    DrawingPath path;
    path.css_class = css;
    path.strip = section;
    for (int i = 0; i < count; ++i) {
        const double a = i * period * scale;
        const double b = i == count - 1 ? length : a + style.dash_on * scale;
        path.commands.push_back({PathCommand::Op::Move, start + dir * a});
        path.commands.push_back({PathCommand::Op::Line, start + dir * b});
    }
    return path;
}

std::vector<Vec2> tab_polygon(const Vec2& from, const Vec2& to, const Vec2& inside, double width) {
    const Vec2 t = (to - from).normalized();
    Vec2 n(-t.y(), t.x());
    if (n.dot(inside - from) > 0.0) n = -n;
    const double chamfer = std::min(width, 0.25 * (to - from).norm());
    return {from, from + n * width + t * chamfer, to + n * width - t * chamfer, to};
}

Vec2 centroid(const Cell& cell) {
    Vec2 c = Vec2::Zero();
    for (const auto& p : cell.corners) c += p;
    return c / 4.0;
}

struct Bounds {
    Vec2 lo{1e300, 1e300};
    Vec2 hi{-1e300, -1e300};
    void add(const Vec2& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
};

std::string fmt(double v) { return format_number(v); }

}  // namespace

void validate(const PatternStyle& style) {
    const double values[] = {style.dash_on, style.dash_off, style.fillet_radius, style.eyelet_diameter,
                             style.tab_width};
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::StyleInfeasible, "style values must be >= 0");
    }
    if (!(style.dash_on > 0.0)) throw Error(ErrorCode::StyleInfeasible, "dash length must be positive");
}

const DrawingLayer& ExportedDrawing::layer(const std::string& name) const {
    for (const auto& l : layers) {
        if (l.name == name) return l;
    }
    throw Error(ErrorCode::InvalidArgument, "no layer named " + name);
}

ExportedDrawing export_pattern(const OrthosisDesign& design, const PatternStyle& style) {
    validate(design);
    validate(style);
    ExportedDrawing drawing;
    drawing.layers = {{"cut", {}, {}}, {"crease", {}, {}}, {"eyelet", {}, {}}, {"tab", {}, {}}};
    DrawingLayer& cut = drawing.layers[0];
    DrawingLayer& crease = drawing.layers[1];
    DrawingLayer& eyelet = drawing.layers[2];
    DrawingLayer& tab = drawing.layers[3];

    double cursor = kSheetMargin;
    double width = 0.0;
    for (int i = 0; i < kSections; ++i) {
        const int section = i + 1;
        const UnitSpec& spec = design.units[i];
        const CreasePattern pattern = unroll_strip(spec);
        const double diagonal = cell_tendon_diagonal(spec);
        if (!(style.eyelet_diameter < std::min(spec.a1, spec.b)) || 1.5 * style.eyelet_diameter >= diagonal) {
            throw Error(ErrorCode::StyleInfeasible, "eyelet too large for section " + std::to_string(section));
        }

        std::vector<std::vector<Vec2>> tabs;
        std::vector<Crease> tab_edges;
        for (const Crease& e : pattern.tab_edges) {
            // Top-side tabs join the next strip toward the palm; section 1 has none.
            if (e.role == EdgeRole::TopSide && section == 1) continue;
            tab_edges.push_back(e);
        }
        if (style.tab_width > 0.0) {
            for (const Crease& e : tab_edges) {
                tabs.push_back(tab_polygon(e.from, e.to, centroid(pattern.cells[e.left_cell]), style.tab_width));
            }
        }

        Bounds box;
        for (const auto& p : pattern.bottom) box.add(p);
        for (const auto& p : pattern.top) box.add(p);
        for (const auto& t : tabs) {
            for (const auto& p : t) box.add(p);
        }
        // Flip to y-down and place the strip below the previous one.
        const auto place = [&](const Vec2& p) {
            return Vec2(p.x() - box.lo.x() + kSheetMargin, box.hi.y() - p.y() + cursor);
        };

        std::vector<Vec2> outline;
        for (int k = 0; k <= kCellsPerUnit; ++k) outline.push_back(place(pattern.bottom[k]));
        for (int k = kCellsPerUnit; k >= 0; --k) outline.push_back(place(pattern.top[k]));
        cut.paths.push_back(outline_path(outline, style.fillet_radius, section, "outline"));

        for (const Crease& c : pattern.creases) {
            const bool interior_leg = c.role == EdgeRole::Leg && c.kind == CreaseKind::Mountain;
            if (c.role != EdgeRole::Diagonal && !interior_leg) continue;
            DrawingPath p = dashed_path(place(c.from), place(c.to), style.fillet_radius, style, section,
                                        c.kind == CreaseKind::Valley ? "valley" : "mountain");
            crease.paths.push_back(std::move(p));
        }

        for (int k = 0; k < kCellsPerUnit; ++k) {
            const Vec2 anchor = pattern.eyelet_anchors[k];
            const Vec2 along = (pattern.top[k + 1] - anchor).normalized();
            eyelet.circles.push_back({section, place(anchor + along * style.eyelet_diameter),
                                      0.5 * style.eyelet_diameter});
        }

        for (const auto& t : tabs) {
            std::vector<Vec2> placed;
            for (const auto& p : t) placed.push_back(place(p));
            DrawingPath path;
            path.css_class = "tab";
            path.strip = section;
            path.closed = true;
            path.commands.push_back({PathCommand::Op::Move, placed[0]});
            for (std::size_t j = 1; j < placed.size(); ++j) path.commands.push_back({PathCommand::Op::Line, placed[j]});
            tab.paths.push_back(std::move(path));
        }

        width = std::max(width, box.hi.x() - box.lo.x());
        cursor += (box.hi.y() - box.lo.y()) + kSheetMargin;
    }
    drawing.width = width + 2.0 * kSheetMargin;
    drawing.height = cursor;
    return drawing;
}

std::string to_svg(const ExportedDrawing& drawing) {
    static const std::pair<const char*, const char*> kColors[] = {
        {"cut", "#ff0000"}, {"crease", "#0000ff"}, {"eyelet", "#00a000"}, {"tab", "#000000"}};
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(drawing.width)
        << "mm\" height=\"" << fmt(drawing.height) << "mm\" viewBox=\"0 0 " << fmt(drawing.width) << ' '
        << fmt(drawing.height) << "\">\n";
    for (const auto& layer : drawing.layers) {
        const char* color = "#000000";
        for (const auto& [name, c] : kColors) {
            if (layer.name == name) color = c;
        }
        out << "  <g id=\"" << layer.name << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"0.1\">\n";
        for (const auto& path : layer.paths) {
            out << "    <path class=\"" << path.css_class << "\" data-strip=\"" << path.strip << "\" d=\"";
            bool first = true;
            for (const auto& c : path.commands) {
                if (!first) out << ' ';
                first = false;
                switch (c.op) {
                    case PathCommand::Op::Move: out << 'M'; break;
                    case PathCommand::Op::Line: out << 'L'; break;
                    case PathCommand::Op::Arc:
                        out << "A " << fmt(c.radius) << ' ' << fmt(c.radius) << " 0 0 " << (c.sweep ? 1 : 0);
                        break;
                }
                out << ' ' << fmt(c.to.x()) << ' ' << fmt(c.to.y());
            }
            if (path.closed) out << " Z";
            out << "\"/>\n";
        }
        for (const auto& c : layer.circles) {
            out << "    <circle data-strip=\"" << c.strip << "\" cx=\"" << fmt(c.center.x()) << "\" cy=\""
                << fmt(c.center.y()) << "\" r=\"" << fmt(c.radius) << "\"/>\n";
        }
        out << "  </g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string to_dxf(const ExportedDrawing& drawing) {
    std::ostringstream out;
    const auto group = [&](int code, const std::string& value) { out << code << '\n' << value << '\n'; };
    const auto number = [&](int code, double value) { group(code, fmt(value)); };

    group(0, "SECTION");
    group(2, "HEADER");
    group(9, "$ACADVER");
    group(1, "AC1009");
    group(9, "$INSUNITS");
    group(70, "4");
    group(0, "ENDSEC");

    group(0, "SECTION");
    group(2, "TABLES");
    group(0, "TABLE");
    group(2, "LAYER");
    group(70, std::to_string(drawing.layers.size()));
    int color = 1;
    for (const auto& layer : drawing.layers) {
        group(0, "LAYER");
        group(2, layer.name);
        group(70, "0");
        group(62, std::to_string(color++));
        group(6, "CONTINUOUS");
    }
    group(0, "ENDTAB");
    group(0, "ENDSEC");

    group(0, "SECTION");
    group(2, "ENTITIES");
    for (const auto& layer : drawing.layers) {
        for (const auto& path : layer.paths) {
            // Split at moves; each run becomes one polyline. DXF y points up.
            std::size_t i = 0;
            while (i < path.commands.size()) {
                std::size_t j = i + 1;
                while (j < path.commands.size() && path.commands[j].op != PathCommand::Op::Move) ++j;
                group(0, "POLYLINE");
                group(8, layer.name);
                group(66, "1");
                group(70, path.closed ? "1" : "0");
                for (std::size_t k = i; k < j; ++k) {
                    double bulge = 0.0;
                    const std::size_t next = k + 1 < j ? k + 1 : (path.closed ? i : j);
                    if (next != j && path.commands[next].op == PathCommand::Op::Arc) {
                        const auto& arc = path.commands[next];
                        const double chord = (arc.to - path.commands[k].to).norm();
                        const double angle = 2.0 * std::asin(std::min(1.0, chord / (2.0 * arc.radius)));
                        bulge = (arc.sweep ? -1.0 : 1.0) * std::tan(0.25 * angle);
                    }
                    group(0, "VERTEX");
                    group(8, layer.name);
                    number(10, path.commands[k].to.x());
                    number(20, -path.commands[k].to.y());
                    if (bulge != 0.0) number(42, bulge);
                }
                group(0, "SEQEND");
                group(8, layer.name);
                i = j;
            }
        }
        for (const auto& c : layer.circles) {
            group(0, "CIRCLE");
            group(8, layer.name);
            number(10, c.center.x());
            number(20, -c.center.y());
            number(40, c.radius);
        }
    }
    group(0, "ENDSEC");
    group(0, "EOF");
    return out.str();
}

}  // namespace kresling

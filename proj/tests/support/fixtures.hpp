#pragma once

#include <cmath>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "kresling/equilibrium.hpp"
#include "kresling/io.hpp"
#include "kresling/sizing.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(KRESLING_DATA_DIR) + "/" + name; }

inline kresling::OrthosisDesign model2_design() {
    return kresling::design_orthosis(kresling::load_measurements(data_path("model2.measurements.json")));
}

// Five identical TKO units with alternating chirality: the stack is symmetric under
// a 60 degree turn about its axis.
inline kresling::OrthosisDesign uniform_tko_design(double a = 32.0, double b = 32.0, double h = 24.0) {
    kresling::OrthosisDesign d;
    for (int i = 0; i < kresling::kSections; ++i) {
        d.units[i] = kresling::make_unit_spec(kresling::UnitKind::TKO, a, a, b, 60.0,
                                              i % 2 == 0 ? kresling::Chirality::CW : kresling::Chirality::CCW);
        d.heights[i] = h;
    }
    return d;
}

inline kresling::Vec3 rotate_z(const kresling::Vec3& p, double deg) {
    const double c = std::cos(deg * kresling::kDeg);
    const double s = std::sin(deg * kresling::kDeg);
    return {c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z()};
}

// Sector k (1..6) spans [60k - 180, 60k - 120) degrees.
inline int sector_of(double phi_deg) {
    const int k = static_cast<int>(std::floor((phi_deg + 120.0) / 60.0));
    return ((k % 6) + 6) % 6 + 1;
}

// Minimal SVG reader: paths (M/L/A/Z commands) and circles per group.
struct SvgPath {
    std::string group;
    std::string css_class;
    int strip = 0;
    std::vector<std::vector<kresling::Vec2>> runs;  // one run per M
};

struct SvgCircle {
    std::string group;
    int strip = 0;
    kresling::Vec2 center;
    double r = 0.0;
};

struct SvgDocument {
    std::vector<SvgPath> paths;
    std::vector<SvgCircle> circles;
};

inline SvgDocument parse_svg(const std::string& text) {
    SvgDocument doc;
    std::string group;
    const std::regex group_re(R"re(<g id="([a-z]+)")re");
    const std::regex path_re(R"re(<path class="([a-z]+)" data-strip="(\d+)" d="([^"]*)"/>)re");
    const std::regex circle_re(R"re(<circle data-strip="(\d+)" cx="([^"]+)" cy="([^"]+)" r="([^"]+)"/>)re");
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        std::smatch m;
        if (std::regex_search(line, m, group_re)) {
            group = m[1];
        } else if (std::regex_search(line, m, path_re)) {
            SvgPath p;
            p.group = group;
            p.css_class = m[1];
            p.strip = std::stoi(m[2]);
            std::istringstream d(m[3].str());
            std::string tok;
            while (d >> tok) {
                if (tok == "M" || tok == "L") {
                    double x = 0.0, y = 0.0;
                    d >> x >> y;
                    if (tok == "M") p.runs.emplace_back();
                    p.runs.back().emplace_back(x, y);
                } else if (tok == "A") {
                    double rx, ry, rot, large, sweep, x, y;
                    d >> rx >> ry >> rot >> large >> sweep >> x >> y;
                    p.runs.back().emplace_back(x, y);
                }
            }
            doc.paths.push_back(std::move(p));
        } else if (std::regex_search(line, m, circle_re)) {
            doc.circles.push_back({group, std::stoi(m[1]), {std::stod(m[2]), std::stod(m[3])}, std::stod(m[4])});
        }
    }
    return doc;
}

}  // namespace fixtures

#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "kresling/cli.hpp"
#include "kresling/drawing.hpp"
#include "kresling/error.hpp"
#include "kresling/io.hpp"
#include "support/fixtures.hpp"

using namespace kresling;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoError;
}

std::string measurement_json(int sections, const std::string& extra = "") {
    std::string s = "{" + extra + "\"sections\": [";
    for (int i = 0; i < sections; ++i) {
        s += std::string(i ? "," : "") + R"({"c_top_mm": 180, "c_bottom_mm": 180, "h_mm": 20})";
    }
    return s + "]}";
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("kresling_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = cli_dispatch(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Measurements, LoadTableFile) {
    const MeasurementSet m = load_measurements(fixtures::data_path("model2.measurements.json"));
    EXPECT_DOUBLE_EQ(m.sections[0].c_top, 258.2);
    EXPECT_DOUBLE_EQ(m.tolerance, 15.0);
    EXPECT_DOUBLE_EQ(m.alpha_deg, 60.0);
}

TEST(Measurements, DefaultsAndOverrides) {
    const MeasurementSet d = parse_measurements(measurement_json(5));
    EXPECT_DOUBLE_EQ(d.tolerance, 15.0);
    EXPECT_DOUBLE_EQ(d.alpha_deg, 60.0);
    const MeasurementSet o = parse_measurements(measurement_json(5, "\"tolerance_mm\": 10, "));
    EXPECT_DOUBLE_EQ(o.tolerance, 10.0);
}

TEST(Measurements, Errors) {
    EXPECT_EQ(code_of([] { parse_measurements(measurement_json(4)); }), ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of([] { parse_measurements("{ not json"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { parse_measurements(R"({"sections": 3})"); }), ErrorCode::SchemaViolation);
    std::string negative = measurement_json(5);
    negative.replace(negative.find("\"h_mm\": 20"), 10, "\"h_mm\": -2");
    EXPECT_EQ(code_of([&] { parse_measurements(negative); }), ErrorCode::NonPositiveValue);
    std::string mismatch = measurement_json(5);
    mismatch.replace(mismatch.rfind("\"c_top_mm\": 180"), 15, "\"c_top_mm\": 170");
    EXPECT_EQ(code_of([&] { parse_measurements(mismatch); }), ErrorCode::SchemaViolation);
}

TEST(Measurements, RoundTrip) {
    const MeasurementSet m = load_measurements(fixtures::data_path("model1.measurements.json"));
    const std::string text = serialize_measurements(m);
    EXPECT_EQ(serialize_measurements(parse_measurements(text)), text);
}

TEST(DesignDocument, RoundTripIsByteIdentical) {
    DesignDocument doc;
    doc.measurements = load_measurements(fixtures::data_path("model2.measurements.json"));
    doc.design = design_orthosis(*doc.measurements);
    doc.provenance.parameters = {{"tolerance_mm", "15"}};
    const std::string a = serialize_design(doc);
    const std::string b = serialize_design(parse_design(a));
    EXPECT_EQ(a, b);
    const DesignDocument back = parse_design(a);
    for (int i = 0; i < kSections; ++i) {
        EXPECT_EQ(back.design.units[i].a1, doc.design.units[i].a1);
        EXPECT_EQ(back.design.units[i].b, doc.design.units[i].b);
        EXPECT_EQ(back.design.units[i].chirality, doc.design.units[i].chirality);
    }
}

TEST(DesignDocument, TableDesignWithoutMeasurements) {
    const DesignDocument doc = load_design(fixtures::data_path("orthosis2_table.design.json"));
    EXPECT_FALSE(doc.measurements.has_value());
    EXPECT_DOUBLE_EQ(doc.design.units[1].a1, 37.7);
    EXPECT_DOUBLE_EQ(doc.design.units[1].a2, 45.7);
}

TEST(DesignDocument, RejectsDesignThatDisagreesWithMeasurements) {
    DesignDocument doc;
    doc.measurements = load_measurements(fixtures::data_path("model2.measurements.json"));
    doc.design = design_orthosis(*doc.measurements);
    std::string text = serialize_design(doc);
    doc.measurements->tolerance = 10.0;
    const std::string tampered = serialize_design(doc);
    EXPECT_NO_THROW(parse_design(text));
    EXPECT_EQ(code_of([&] { parse_design(tampered); }), ErrorCode::SchemaViolation);
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(40.05), "40.05");
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    for (int i = 0; i < 200; ++i) {
        const double v = u(rng);
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
}

TEST(TrajectoryCsv, EmptyAndRoundTrip) {
    const std::string empty = export_trajectory(Trajectory{});
    EXPECT_EQ(empty, "t,x,y,z,beta,phi,l1,l2,l3,l4,l5,l6\n");
    Trajectory tr;
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    for (int i = 0; i < 9; ++i) {
        TrajectorySample s;
        s.t = 0.5 * i;
        s.marker = Vec3(u(rng), u(rng), u(rng));
        s.beta_deg = std::abs(u(rng)) / 10.0;
        s.phi_deg = u(rng) / 2.0;
        for (double& l : s.tendon_lengths) l = 150.0 + u(rng) / 10.0;
        tr.samples.push_back(s);
    }
    const std::string csv = export_trajectory(tr);
    EXPECT_EQ(count_lines(csv), 10u);
    const Trajectory back = parse_trajectory(csv);
    ASSERT_EQ(back.samples.size(), tr.samples.size());
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        EXPECT_NEAR(back.samples[i].t, tr.samples[i].t, 1e-12 * (1 + std::abs(tr.samples[i].t)));
        EXPECT_LT((back.samples[i].marker - tr.samples[i].marker).norm(), 1e-12 * tr.samples[i].marker.norm());
        EXPECT_NEAR(back.samples[i].phi_deg, tr.samples[i].phi_deg, 1e-12 * std::abs(tr.samples[i].phi_deg));
        for (int k = 0; k < kTendons; ++k) {
            EXPECT_NEAR(back.samples[i].tendon_lengths[k], tr.samples[i].tendon_lengths[k], 1e-9);
        }
    }
    EXPECT_EQ(export_trajectory(back), csv);
    EXPECT_EQ(code_of([] { parse_trajectory("t,x\n1,2\n"); }), ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of([] { parse_trajectory("t,x,y,z,beta,phi,l1,l2,l3,l4,l5,l6\n0,a,0,0,0,0,1,1,1,1,1,1\n"); }),
              ErrorCode::ParseError);
}

TEST(ScheduleCsv, WorkspaceRowsAndBounds) {
    const std::string csv = export_schedule(make_workspace_schedule(0.1), 2.0);
    EXPECT_EQ(count_lines(csv), 170u);  // header + 169 samples
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,c1,c2,c3,c4,c5,c6");
    const Schedule back = parse_schedule(csv);
    EXPECT_DOUBLE_EQ(back.duration, 84.0);
    for (const auto& ch : back.channels) {
        for (const auto& b : ch) {
            EXPECT_GE(b.value, 0.0);
            EXPECT_LE(b.value, 1.0);
        }
    }
}

TEST(ScheduleCsv, CircumductionPeaks) {
    const Schedule back = parse_schedule(export_schedule(make_circumduction_schedule(), 2.0));
    const double expected[6] = {7.0, 10.5, 14.0, 17.5, 21.0, 24.5};
    for (int c = 0; c < 6; ++c) {
        const auto& ch = back.channels[c];
        const auto peak = std::max_element(ch.begin(), ch.end(), [](auto& a, auto& b) { return a.value < b.value; });
        EXPECT_DOUBLE_EQ(peak->t, expected[c]);
        EXPECT_DOUBLE_EQ(peak->value, kDefaultMaxContraction);
    }
}

TEST(PatternExport, CountsAndLayers) {
    const OrthosisDesign d = design_orthosis(load_measurements(fixtures::data_path("model1.measurements.json")));
    const ExportedDrawing drawing = export_pattern(d);
    EXPECT_EQ(drawing.layer("eyelet").circles.size(), 30u);
    int cut_strips = 0;
    for (const auto& p : drawing.layer("cut").paths) {
        EXPECT_TRUE(p.closed);
        ++cut_strips;
    }
    EXPECT_EQ(cut_strips, 5);
    EXPECT_FALSE(drawing.layer("crease").paths.empty());
    EXPECT_FALSE(drawing.layer("tab").paths.empty());
    for (const auto& c : drawing.layer("eyelet").circles) {
        EXPECT_DOUBLE_EQ(c.radius, 2.0);
        EXPECT_GT(c.center.x(), 0.0);
        EXPECT_LT(c.center.x(), drawing.width);
        EXPECT_GT(c.center.y(), 0.0);
        EXPECT_LT(c.center.y(), drawing.height);
    }
    EXPECT_THROW(drawing.layer("engrave"), Error);
}

TEST(PatternExport, StyleGuards) {
    const OrthosisDesign d = fixtures::model2_design();
    PatternStyle big_eyelet;
    big_eyelet.eyelet_diameter = d.units[0].b;
    EXPECT_EQ(code_of([&] { export_pattern(d, big_eyelet); }), ErrorCode::StyleInfeasible);
    PatternStyle big_fillet;
    big_fillet.fillet_radius = 40.0;
    EXPECT_EQ(code_of([&] { export_pattern(d, big_fillet); }), ErrorCode::StyleInfeasible);
    PatternStyle no_dash;
    no_dash.dash_on = 0.0;
    EXPECT_EQ(code_of([&] { validate(no_dash); }), ErrorCode::StyleInfeasible);
}

TEST(PatternExport, SvgParseBackWithSharpCorners) {
    const OrthosisDesign d = fixtures::model2_design();
    PatternStyle sharp;
    sharp.fillet_radius = 0.0;
    const fixtures::SvgDocument svg = fixtures::parse_svg(to_svg(export_pattern(d, sharp)));
    int outlines = 0;
    for (const auto& p : svg.paths) {
        if (p.group != "cut") continue;
        ++outlines;
        ASSERT_EQ(p.runs.size(), 1u);
        const auto& v = p.runs.front();
        ASSERT_EQ(v.size(), 14u);
        const UnitSpec& u = d.units[p.strip - 1];
        // Outline order: bottom vertices B0..B6 then top vertices T6..T0.
        for (int k = 0; k < 6; ++k) {
            EXPECT_NEAR((v[k + 1] - v[k]).norm(), u.a1, 1e-6);
            EXPECT_NEAR((v[8 + k] - v[7 + k]).norm(), u.a2, 1e-6);
        }
        EXPECT_NEAR((v[7] - v[6]).norm(), u.b, 1e-6);
        EXPECT_NEAR((v[0] - v[13]).norm(), u.b, 1e-6);
    }
    EXPECT_EQ(outlines, 5);
    EXPECT_EQ(svg.circles.size(), 30u);
}

TEST(PatternExport, DeterministicSvgAndDxf) {
    const OrthosisDesign d = fixtures::model2_design();
    EXPECT_EQ(to_svg(export_pattern(d)), to_svg(export_pattern(d)));
    const std::string dxf = to_dxf(export_pattern(d));
    EXPECT_EQ(dxf, to_dxf(export_pattern(d)));
    for (const char* layer : {"cut", "crease", "eyelet", "tab"}) EXPECT_NE(dxf.find(layer), std::string::npos);
    EXPECT_NE(dxf.find("CIRCLE"), std::string::npos);
    EXPECT_EQ(dxf.substr(dxf.size() - 4), "EOF\n");
}

TEST(Files, AtomicWriteAndErrors) {
    TempDir dir;
    const std::string path = dir.file("a.txt");
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    EXPECT_EQ(read_file(path), "second");
    EXPECT_FALSE(fs::exists(path + ".tmp"));
    EXPECT_EQ(code_of([&] { read_file(dir.file("missing.json")); }), ErrorCode::IoError);
    EXPECT_EQ(code_of([&] { write_file_atomic(dir.file("no/such/dir/x"), "x"); }), ErrorCode::IoError);
}

TEST(Cli, DesignMatchesTable) {
    TempDir dir;
    const std::string out = dir.file("orthosis2.design.json");
    const CliRun r = run({"design", "--in", fixtures::data_path("model2.measurements.json"), "--out", out});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const DesignDocument doc = load_design(out);
    const std::array<double, 5> table{45.7, 45.7, 37.7, 32.0, 32.0};
    const std::array<double, 5> got{doc.design.units[0].a2, doc.design.units[0].a1, doc.design.units[1].a1,
                                    doc.design.units[2].a1, doc.design.units[3].a1};
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(got[i], table[i], 0.7);
    const CliRun v = run({"validate", out});
    EXPECT_EQ(v.code, kExitOk) << v.err;
    EXPECT_NE(v.out.find("result pass"), std::string::npos);
}

TEST(Cli, DesignOverridesTolerance) {
    TempDir dir;
    const std::string out = dir.file("d.json");
    ASSERT_EQ(run({"design", fixtures::data_path("model2.measurements.json"), "--tolerance-mm", "0", "--out", out}).code,
              kExitOk);
    const DesignDocument doc = load_design(out);
    EXPECT_NEAR(doc.design.units[3].a1, 175.6 / 6.0, 1e-9);
}

TEST(Cli, ReportShowsSectionLimits) {
    const CliRun r = run({"report", fixtures::data_path("orthosis2_table.design.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char* s : {"17.09", "24.73", "25.56", "57.24", "74.52"}) EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST(Cli, ScheduleCircumduction) {
    TempDir dir;
    const std::string out = dir.file("circ.csv");
    const CliRun r = run({"schedule", "--mode", "circumduction", "--out", out});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(parse_schedule(read_file(out)), parse_schedule(export_schedule(make_circumduction_schedule(), 10.0)));
}

TEST(Cli, PatternWritesSvgAndDxf) {
    TempDir dir;
    for (const char* ext : {".svg", ".dxf"}) {
        const std::string out = dir.file(std::string("p") + ext);
        const CliRun r = run({"pattern", fixtures::data_path("orthosis2_table.design.json"), "--out", out});
        ASSERT_EQ(r.code, kExitOk) << r.err;
        EXPECT_GT(read_file(out).size(), 1000u);
    }
    EXPECT_EQ(run({"pattern", fixtures::data_path("orthosis2_table.design.json"), "--out", dir.file("p.png")}).code,
              kExitUsage);
}

TEST(Cli, SimulateExtension) {
    TempDir dir;
    const std::string out = dir.file("ext.csv");
    const CliRun r = run({"simulate", fixtures::data_path("orthosis2_table.design.json"), "--mode", "extension", "--rate",
                          "1", "--out", out});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Trajectory tr = parse_trajectory(read_file(out));
    EXPECT_EQ(tr.samples.size(), 15u);
}

TEST(Cli, ExitCodes) {
    const CliRun none = run({});
    EXPECT_EQ(none.code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"schedule"}).code, kExitUsage);
    EXPECT_EQ(run({"schedule", "--mode", "pronation"}).code, kExitUsage);
    EXPECT_EQ(run({"schedule", "--mode", "extension", "--max-contraction", "2"}).code, kExitUsage);
    const CliRun missing = run({"report", "/nonexistent/design.json"});
    EXPECT_EQ(missing.code, kExitDomainError);
    EXPECT_NE(missing.err.find("IoError"), std::string::npos);
    TempDir dir;
    const std::string bad = dir.file("bad.json");
    write_file_atomic(bad, measurement_json(4));
    const CliRun schema = run({"design", bad});
    EXPECT_EQ(schema.code, kExitDomainError);
    EXPECT_NE(schema.err.find("SchemaViolation"), std::string::npos);
}

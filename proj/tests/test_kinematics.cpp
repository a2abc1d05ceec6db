#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "kresling/error.hpp"
#include "kresling/io.hpp"
#include "kresling/kinematics.hpp"
#include "support/fixtures.hpp"

using namespace kresling;

namespace {

UnitSpec tko(double a, double b, Chirality c = Chirality::CW) { return make_unit_spec(UnitKind::TKO, a, a, b, 60.0, c); }
UnitSpec cko(double a1, double a2, double b, Chirality c = Chirality::CW) {
    return make_unit_spec(UnitKind::CKO, a1, a2, b, 60.0, c);
}

// Closed-form bend limit evaluated in long double.
double closed_form(double a1, double a2, double b, bool sagittal) {
    const long double s = std::sin(60.0L * kDeg);
    const long double A1 = a1, A2 = a2, B = b;
    const long double num = sagittal ? 4 * A1 * A1 + 3 * A2 * A2 - B * B * s * s : 3 * A1 * A1 + 4 * A2 * A2 - B * B * s * s;
    return static_cast<double>(std::acos(num / (4 * std::sqrt(3.0L) * A1 * A2)) * 180.0L / 3.14159265358979323846L);
}

OrthosisDesign table_design() { return load_design(fixtures::data_path("orthosis2_table.design.json")).design; }

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoError;
}

}  // namespace

TEST(BendLimits, ReferenceSections) {
    EXPECT_NEAR(max_bend_angle_lateral(cko(32.0, 37.7, 32.0)), 17.06, 0.05);
    EXPECT_NEAR(max_bend_angle_sagittal(cko(32.0, 37.7, 32.0)), 24.72, 0.05);
    EXPECT_NEAR(max_bend_angle_lateral(tko(32.0, 32.0)), 25.56, 0.005);
    EXPECT_NEAR(max_bend_angle_sagittal(tko(32.0, 32.0)), 25.56, 0.005);
    EXPECT_NEAR(max_bend_angle_lateral(tko(64.0, 64.0)), 25.56, 0.005);
}

TEST(BendLimits, MatchesLongDoubleOracle) {
    EXPECT_NEAR(max_bend_angle_sagittal(cko(37.7, 45.7, 37.7)), 24.23, 0.005);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> a(25.0, 45.0), r(1.0, 1.25), bb(0.9, 1.4);
    for (int i = 0; i < 100; ++i) {
        const double a1 = a(rng), a2 = a1 * r(rng), b = a1 * bb(rng);
        const UnitSpec s = cko(a1, a2, b);
        EXPECT_NEAR(max_bend_angle_lateral(s), closed_form(a1, a2, b, false), 1e-9);
        EXPECT_NEAR(max_bend_angle_sagittal(s), closed_form(a1, a2, b, true), 1e-9);
        // a2 > a1 puts the sagittal limit above the lateral one.
        EXPECT_GT(max_bend_angle_sagittal(s), max_bend_angle_lateral(s));
        const UnitSpec scaled = cko(3.5 * a1, 3.5 * a2, 3.5 * b);
        EXPECT_NEAR(max_bend_angle_lateral(scaled), max_bend_angle_lateral(s), 1e-10);
        EXPECT_NEAR(max_bend_angle_sagittal(scaled), max_bend_angle_sagittal(s), 1e-10);
    }
}

TEST(BendLimits, Errors) {
    EXPECT_EQ(code_of([] { max_bend_angle_lateral(tko(32.0, 6.0)); }), ErrorCode::NotFoldable);
    EXPECT_EQ(code_of([] { max_bend_angle_sagittal(tko(10.0, 60.0)); }), ErrorCode::InvalidGeometry);
}

TEST(NeutralTwist, ClosedFormAndEdgeLength) {
    const UnitSpec s = tko(32.0, 32.0);
    EXPECT_NEAR(neutral_twist(s, 26.0), 33.89, 0.005);
    EXPECT_NEAR(neutral_twist(s, 0.0), 60.0, 1e-9);
    EXPECT_EQ(code_of([&] { neutral_twist(s, 40.0); }), ErrorCode::NoSolution);
    for (const UnitSpec& u : {s, tko(32.0, 32.0, Chirality::CCW), cko(32.0, 37.7, 32.0), cko(37.7, 45.7, 37.7, Chirality::CCW)}) {
        const UnitConfiguration c = neutral_configuration(u, 24.0);
        const EdgeLengths e = edge_lengths(u, c);
        for (int k = 0; k < kCellsPerUnit; ++k) {
            EXPECT_NEAR(e.mountain[k], u.b, 1e-9);
            EXPECT_NEAR(e.valley[k], e.valley[0], 1e-9);
            EXPECT_NEAR(e.bottom_sides[k], u.a1, 1e-9);
            EXPECT_NEAR(e.top_sides[k], u.a2, 1e-9);
        }
        // The tendon diagonal is the shorter one.
        EXPECT_LT(e.valley[0], (unit_vertex_positions(u, c, SpatialFrame{}).top[(chirality_shift(u.chirality) + 5) % 6] -
                                unit_vertex_positions(u, c, SpatialFrame{}).bottom[0])
                                   .norm());
    }
    EXPECT_LT(neutral_configuration(s, 24.0).twist_deg, 0.0);
    EXPECT_GT(neutral_configuration(tko(32.0, 32.0, Chirality::CCW), 24.0).twist_deg, 0.0);
}

TEST(UnitVertexPositions, Basics) {
    const UnitSpec s = cko(32.0, 37.7, 32.0);
    UnitConfiguration c;
    c.height = 20.0;
    const UnitVertices v = unit_vertex_positions(s, c, SpatialFrame{});
    for (int k = 0; k < kCellsPerUnit; ++k) {
        const Vec3 expected = v.bottom[k] * (37.7 / 32.0) + Vec3(0, 0, 20.0);
        EXPECT_NEAR((v.top[k] - expected).norm(), 0.0, 1e-9);
    }
    c.bend_angle_deg = 12.0;
    c.bend_azimuth_deg = 40.0;
    c.twist_deg = -20.0;
    const UnitVertices a = unit_vertex_positions(s, c, SpatialFrame{});
    c.bend_azimuth_deg += 360.0;
    const UnitVertices b = unit_vertex_positions(s, c, SpatialFrame{});
    for (int k = 0; k < kCellsPerUnit; ++k) EXPECT_NEAR((a.top[k] - b.top[k]).norm(), 0.0, 1e-9);
    // Tilt between frames equals the bend angle.
    EXPECT_NEAR(std::acos(a.top_frame.normal.dot(Vec3::UnitZ())) / kDeg, 12.0, 1e-9);
}

TEST(EdgeLengths, MirrorSymmetricAboutBendAxis) {
    // Untwisted unit bent towards a vertex column: the valley diagonals on either
    // side of the bend direction pair up.
    const UnitSpec s = tko(32.0, 32.0);
    UnitConfiguration c;
    c.height = 24.0;
    c.bend_angle_deg = 10.0;
    c.bend_azimuth_deg = 0.0;
    const EdgeLengths e = edge_lengths(s, c);
    const auto v = unit_vertex_positions(s, c, SpatialFrame{});
    // Reflection y -> -y maps column k to -k; check it maps the top vertex set onto itself.
    for (int k = 0; k < kCellsPerUnit; ++k) {
        const Vec3 m(v.top[k].x(), -v.top[k].y(), v.top[k].z());
        EXPECT_NEAR((m - v.top[(6 - k) % 6]).norm(), 0.0, 1e-9);
        EXPECT_NEAR(e.mountain[k], e.mountain[(6 - k) % 6], 1e-9);
    }
}

TEST(TendonLength, BruteForceSum) {
    const OrthosisDesign d = fixtures::model2_design();
    StackConfiguration st = neutral_stack(d);
    st.units[2].bend_angle_deg = 7.0;
    st.units[2].bend_azimuth_deg = 33.0;
    st.units[1].bend_angle_deg = 4.0;
    st.units[1].bend_azimuth_deg = -120.0;
    // Walk the stack from the forearm frame with unit_vertex_positions only.
    std::array<UnitVertices, kSections> units;
    SpatialFrame frame = st.base;
    const double off = st.column_offset_deg * kDeg;
    frame.reference = std::cos(off) * frame.reference + std::sin(off) * frame.normal.cross(frame.reference);
    for (int i = kSections - 1; i >= 0; --i) {
        units[i] = unit_vertex_positions(d.units[i], st.units[i], frame);
        frame = units[i].top_frame;
    }
    for (int t = 1; t <= kTendons; ++t) {
        double sum = 0.0;
        int col = t - 1;
        for (int i = kSections - 1; i >= 0; --i) {
            const int next = (col + chirality_shift(d.units[i].chirality) + 6) % 6;
            sum += (units[i].top[next] - units[i].bottom[col]).norm();
            col = next;
        }
        EXPECT_NEAR(tendon_length(d, st, TendonId(t)), sum, 1e-9) << "T" << t;
    }
}

TEST(TendonLength, EqualAtNeutralAndEquivariant) {
    const OrthosisDesign d = fixtures::model2_design();
    const StackConfiguration st = neutral_stack(d);
    const auto l = tendon_lengths(d, st);
    for (double v : l) EXPECT_NEAR(v, l[0], 1e-9);

    // Turning every bend azimuth by 60 degrees relabels the tendons by one column.
    StackConfiguration bent = st;
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ang(-180.0, 180.0), beta(0.0, 8.0);
    for (int i = 1; i <= 3; ++i) {
        bent.units[i].bend_angle_deg = beta(rng);
        bent.units[i].bend_azimuth_deg = ang(rng);
    }
    StackConfiguration turned = bent;
    for (auto& u : turned.units) u.bend_azimuth_deg += 60.0;
    const auto a = tendon_lengths(d, bent);
    const auto b = tendon_lengths(d, turned);
    for (int t = 0; t < kTendons; ++t) EXPECT_NEAR(b[(t + 1) % 6], a[t], 1e-9) << "T" << t + 1;
}

TEST(TendonLength, BendingTowardsSectorShortensTendon) {
    const OrthosisDesign d = fixtures::model2_design();
    const StackConfiguration st = neutral_stack(d);
    const auto neutral = tendon_lengths(d, st);
    for (int t = 1; t <= kTendons; ++t) {
        const double target = tendon_sector_center(TendonId(t));
        for (int unit = 1; unit <= 3; ++unit) {
            // Find the unit azimuth whose stack bend points at the tendon's sector.
            StackConfiguration best = st;
            double best_err = 1e9;
            for (int az = -180; az < 180; ++az) {
                StackConfiguration trial = st;
                trial.units[unit].bend_angle_deg = 4.0;
                trial.units[unit].bend_azimuth_deg = az;
                const double err = std::abs(wrap_degrees(stack_bend_angle(trial).phi_deg - target));
                if (err < best_err) {
                    best_err = err;
                    best = trial;
                }
            }
            ASSERT_LT(best_err, 1.0);
            EXPECT_LT(tendon_length(d, best, TendonId(t)), neutral[t - 1]) << "T" << t << " unit " << unit + 1;
        }
    }
}

TEST(SectorCenters, Layout) {
    EXPECT_DOUBLE_EQ(tendon_sector_center(TendonId(1)), -90.0);
    EXPECT_DOUBLE_EQ(tendon_sector_center(TendonId(2)), -30.0);
    EXPECT_DOUBLE_EQ(tendon_sector_center(TendonId(3)), 30.0);
    EXPECT_DOUBLE_EQ(tendon_sector_center(TendonId(4)), 90.0);
    EXPECT_DOUBLE_EQ(tendon_sector_center(TendonId(6)), -150.0);
    EXPECT_THROW(TendonId(0), Error);
    EXPECT_THROW(TendonId(7), Error);
}

TEST(StackBendAngle, Composition) {
    const OrthosisDesign d = fixtures::uniform_tko_design();
    StackConfiguration st;
    for (int i = 0; i < kSections; ++i) st.units[i].height = d.heights[i];
    EXPECT_NEAR(stack_bend_angle(st).beta_deg, 0.0, 1e-12);
    st.units[2].bend_angle_deg = 13.0;
    st.units[2].bend_azimuth_deg = 70.0;
    EXPECT_NEAR(stack_bend_angle(st).beta_deg, 13.0, 1e-9);
    st.units[2].bend_angle_deg = 10.0;
    st.units[3].bend_angle_deg = 10.0;
    st.units[3].bend_azimuth_deg = 70.0;
    EXPECT_NEAR(stack_bend_angle(st).beta_deg, 20.0, 1e-9);
    EXPECT_NEAR(stack_bend_angle(neutral_stack(fixtures::model2_design())).beta_deg, 0.0, 1e-9);
}

TEST(StackBendAngle, BetaInvariantUnderRigidMotion) {
    StackConfiguration st = neutral_stack(fixtures::model2_design());
    st.units[1].bend_angle_deg = 6.0;
    st.units[1].bend_azimuth_deg = 25.0;
    st.units[3].bend_angle_deg = 9.0;
    st.units[3].bend_azimuth_deg = -95.0;
    const double beta = stack_bend_angle(st).beta_deg;
    const Vec3 n = Vec3(0.2, -0.5, 1.0).normalized();
    st.base = make_frame(Vec3(10, -4, 7), n, n.cross(Vec3::UnitX()), st.base.radius);
    EXPECT_NEAR(stack_bend_angle(st).beta_deg, beta, 1e-9);
}

TEST(BendReport, TableDesign) {
    const BendReport r = theoretical_bend_report(table_design());
    ASSERT_EQ(r.per_section.size(), 3u);
    EXPECT_EQ(r.per_section[0].section, 2);
    EXPECT_NEAR(r.per_section[0].sagittal_deg, 24.23, 0.005);
    EXPECT_NEAR(r.per_section[1].lateral_deg, 17.06, 0.05);
    EXPECT_NEAR(r.per_section[1].sagittal_deg, 24.72, 0.01);
    EXPECT_NEAR(r.per_section[2].sagittal_deg, 25.56, 0.005);
    EXPECT_NEAR(r.summed_lateral_deg, 57.21, 0.1);
    double lateral = 0.0, sagittal = 0.0;
    for (const auto& s : r.per_section) lateral += s.lateral_deg, sagittal += s.sagittal_deg;
    EXPECT_NEAR(r.summed_lateral_deg, lateral, 1e-12);
    EXPECT_NEAR(r.summed_sagittal_deg, sagittal, 1e-12);
    EXPECT_NEAR(r.summed_sagittal_deg, 74.51, 0.05);
    EXPECT_NEAR(r.mixed_sum_deg, 66.87, 0.05);
    EXPECT_FALSE(r.note.empty());
}

TEST(BendReport, UniformStackHasEqualLimits) {
    for (const auto& s : theoretical_bend_report(fixtures::uniform_tko_design()).per_section) {
        EXPECT_NEAR(s.lateral_deg, s.sagittal_deg, 1e-12);
    }
}

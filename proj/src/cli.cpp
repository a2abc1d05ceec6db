#include "kresling/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "kresling/drawing.hpp"
#include "kresling/equilibrium.hpp"
#include "kresling/error.hpp"
#include "kresling/io.hpp"
#include "kresling/kinematics.hpp"
#include "kresling/parallel.hpp"
#include "kresling/schedules.hpp"
#include "kresling/sizing.hpp"

namespace kresling {

namespace {

constexpr double kDefaultRate = 10.0;
constexpr double kDefaultCreaseStiffness = 1.0;

struct Options {
    std::string in;
    std::string positional;
    std::string out;
    std::string mode;
    std::string schedule;
    std::optional<double> tolerance_mm;
    std::optional<double> alpha_deg;
    double max_contraction = kDefaultMaxContraction;
    double rate = kDefaultRate;
    PatternStyle style;
    bool pin_section2 = false;
};

std::string fixed(double v, int digits = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

const std::string& input_path(const Options& o) {
    if (!o.in.empty()) return o.in;
    if (!o.positional.empty()) return o.positional;
    throw CLI::ValidationError("--in", "an input file is required");
}

MotionMode require_mode(const std::string& name) {
    const auto mode = parse_motion_mode(name);
    if (!mode) throw CLI::ValidationError("--mode", "unknown mode '" + name + "'");
    return *mode;
}

ElasticModel model_for(const DesignDocument& doc, const Options& o) {
    ModelOptions mo;
    mo.pin_section2 = o.pin_section2;
    return build_elastic_model(doc.design, kDefaultCreaseStiffness, kDefaultFacetToCrease * kDefaultCreaseStiffness,
                               mo);
}

int run_design(const Options& o, std::ostream& out) {
    MeasurementSet m = load_measurements(input_path(o));
    if (o.tolerance_mm) m.tolerance = *o.tolerance_mm;
    if (o.alpha_deg) m.alpha_deg = *o.alpha_deg;
    validate(m);
    DesignDocument doc;
    doc.design = design_orthosis(m);
    doc.measurements = m;
    doc.provenance.parameters = {{"tolerance_mm", format_number(m.tolerance)},
                                 {"alpha_deg", format_number(m.alpha_deg)}};
    const std::string text = serialize_design(doc);
    if (!o.out.empty()) write_file_atomic(o.out, text);

    out << "section kind chirality a1_mm a2_mm b_mm h_mm\n";
    for (int i = 0; i < kSections; ++i) {
        const UnitSpec& u = doc.design.units[i];
        out << (i + 1) << ' ' << (u.kind == UnitKind::TKO ? "TKO" : "CKO") << ' '
            << (u.chirality == Chirality::CW ? "CW" : "CCW") << ' ' << fixed(u.a1) << ' ' << fixed(u.a2) << ' '
            << fixed(u.b) << ' ' << fixed(doc.design.heights[i]) << '\n';
    }
    if (o.out.empty()) out << text;
    return kExitOk;
}

int run_validate(const Options& o, std::ostream& out) {
    const DesignDocument doc = load_design(input_path(o));
    const auto& units = doc.design.units;
    bool ok = true;
    std::ostringstream r;
    r << "lower upper lower_a2_mm upper_a1_mm compatible\n";
    for (int i = kSections - 1; i > 0; --i) {
        const bool pass = check_compatibility(units[i], units[i - 1]);
        ok = ok && pass;
        r << (i + 1) << ' ' << i << ' ' << fixed(units[i].a2) << ' '
          << fixed(units[i - 1].a1) << ' ' << (pass ? "yes" : "no") << '\n';
    }
    r << "section b_sin_alpha_mm h_mm semi_fold\n";
    for (int i = 0; i < kSections; ++i) {
        const double reach = units[i].b * std::sin(units[i].alpha_deg * kDeg);
        const bool pass = i == 0 || check_semifold(units[i].b, units[i].alpha_deg, doc.design.heights[i]);
        ok = ok && pass;
        r << (i + 1) << ' ' << fixed(reach) << ' ' << fixed(doc.design.heights[i]) << ' '
          << (i == 0 ? "n/a" : (pass ? "yes" : "no")) << '\n';
    }
    if (doc.measurements) {
        r << "section bottom_clearance_mm top_clearance_mm\n";
        const auto fit = fit_report(doc.design, *doc.measurements);
        for (int i = 0; i < kSections; ++i) {
            r << (i + 1) << ' ' << fixed(fit[i].bottom) << ' ' << fixed(fit[i].top) << '\n';
        }
    }
    r << "result " << (ok ? "pass" : "fail") << '\n';
    if (!o.out.empty()) write_file_atomic(o.out, r.str());
    out << r.str();
    if (!ok) throw Error(ErrorCode::InfeasibleSection, "design failed validation");
    return kExitOk;
}

int run_pattern(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw CLI::ValidationError("--out", "an output file is required");
    const DesignDocument doc = load_design(input_path(o));
    const ExportedDrawing drawing = export_pattern(doc.design, o.style);
    const std::string ext = std::filesystem::path(o.out).extension().string();
    std::string text;
    if (ext == ".svg") {
        text = to_svg(drawing);
    } else if (ext == ".dxf") {
        text = to_dxf(drawing);
    } else {
        throw CLI::ValidationError("--out", "output must end in .svg or .dxf");
    }
    write_file_atomic(o.out, text);
    out << "strips " << kSections << ", sheet " << fixed(drawing.width, 1) << " x " << fixed(drawing.height, 1)
        << " mm\n";
    return kExitOk;
}

int run_schedule_cmd(const Options& o, std::ostream& out) {
    if (o.mode.empty()) throw CLI::ValidationError("--mode", "a mode is required");
    const Schedule s = make_schedule(require_mode(o.mode), o.max_contraction);
    const std::string text = export_schedule(s, o.rate);
    if (o.out.empty()) {
        out << text;
    } else {
        write_file_atomic(o.out, text);
        out << "mode " << o.mode << ", duration " << format_number(s.duration) << " s\n";
    }
    return kExitOk;
}

int run_simulate(const Options& o, std::ostream& out) {
    const DesignDocument doc = load_design(input_path(o));
    Schedule s;
    if (!o.schedule.empty()) {
        s = parse_schedule(read_file(o.schedule));
    } else if (!o.mode.empty()) {
        s = make_schedule(require_mode(o.mode), o.max_contraction);
    } else {
        throw CLI::ValidationError("--schedule", "a schedule file or --mode is required");
    }
    const ElasticModel model = model_for(doc, o);
    const Trajectory t = run_schedule(model, s, o.rate);
    if (!o.out.empty()) write_file_atomic(o.out, export_trajectory(t));
    const auto peak = std::max_element(t.samples.begin(), t.samples.end(),
                                       [](const auto& a, const auto& b) { return a.beta_deg < b.beta_deg; });
    out << "samples " << t.samples.size() << '\n';
    out << "max_beta_deg " << fixed(peak->beta_deg) << " at t " << format_number(peak->t) << " s, phi_deg "
        << fixed(peak->phi_deg) << '\n';
    if (o.out.empty()) out << export_trajectory(t);
    return kExitOk;
}

int run_workspace(const Options& o, std::ostream& out) {
    const DesignDocument doc = load_design(input_path(o));
    const ElasticModel model = model_for(doc, o);
    const int steps = static_cast<int>(std::lround((kDefaultPullSeconds + kDefaultLoosenSeconds) * o.rate)) + 1;
    const auto sweeps = workspace_sweeps_parallel(model, std::max(steps, 2), o.max_contraction);
    const WorkspaceSummary summary = summarize_workspace(sweeps);
    std::ostringstream table;
    table << "tendon,max_beta_deg,phi_deg,sector_center_deg\n";
    for (int t = 0; t < kTendons; ++t) {
        table << (t + 1) << ',' << format_number(summary.max_beta_deg[t]) << ','
              << format_number(summary.phi_at_max_deg[t]) << ',' << format_number(tendon_sector_center(TendonId(t + 1)))
              << '\n';
    }
    if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        for (int t = 0; t < kTendons; ++t) {
            write_file_atomic((std::filesystem::path(o.out) / ("sweep_T" + std::to_string(t + 1) + ".csv")).string(),
                              export_trajectory(sweeps[t]));
        }
        write_file_atomic((std::filesystem::path(o.out) / "workspace.csv").string(), table.str());
    }
    out << "tendon max_beta_deg phi_deg\n";
    for (int t = 0; t < kTendons; ++t) {
        out << 'T' << (t + 1) << ' ' << fixed(summary.max_beta_deg[t]) << ' ' << fixed(summary.phi_at_max_deg[t])
            << '\n';
    }
    return kExitOk;
}

int run_report(const Options& o, std::ostream& out) {
    const DesignDocument doc = load_design(input_path(o));
    const BendReport report = theoretical_bend_report(doc.design);
    std::ostringstream r;
    r << "section lateral_deg sagittal_deg\n";
    for (const auto& s : report.per_section) {
        r << s.section << ' ' << fixed(s.lateral_deg, 2) << ' ' << fixed(s.sagittal_deg, 2) << '\n';
    }
    r << "sum_lateral_deg " << fixed(report.summed_lateral_deg, 2) << '\n';
    r << "sum_sagittal_deg " << fixed(report.summed_sagittal_deg, 2) << '\n';
    r << "sum_mixed_deg " << fixed(report.mixed_sum_deg, 2) << '\n';
    r << "note " << report.note << '\n';
    if (!o.out.empty()) write_file_atomic(o.out, r.str());
    out << r.str();
    return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kresling wrist orthosis design and simulation", "kresling"};
    app.require_subcommand(1);
    Options o;

    const auto add_in = [&](CLI::App* sub, const std::string& what) {
        sub->add_option("--in", o.in, what);
        sub->add_option("input", o.positional, what);
    };
    const auto add_out = [&](CLI::App* sub, const std::string& what) { sub->add_option("--out", o.out, what); };
    const auto add_model = [&](CLI::App* sub) {
        sub->add_option("--max-contraction", o.max_contraction, "peak tendon contraction in (0, 1]")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--rate", o.rate, "samples per second")->check(CLI::PositiveNumber);
    };

    CLI::App* design = app.add_subcommand("design", "measurements -> design document");
    add_in(design, "measurement file (JSON)");
    add_out(design, "design file (JSON)");
    design->add_option("--tolerance-mm", o.tolerance_mm, "circumference allowance");
    design->add_option("--alpha-deg", o.alpha_deg, "cell base angle");

    CLI::App* validate_cmd = app.add_subcommand("validate", "interface, semi-fold and fit checks");
    add_in(validate_cmd, "design file");
    add_out(validate_cmd, "report file");

    CLI::App* pattern = app.add_subcommand("pattern", "design -> SVG or DXF cutting pattern");
    add_in(pattern, "design file");
    add_out(pattern, "drawing file (.svg or .dxf)");
    pattern->add_option("--dash-on-mm", o.style.dash_on, "perforation dash length");
    pattern->add_option("--dash-off-mm", o.style.dash_off, "perforation gap length");
    pattern->add_option("--fillet-mm", o.style.fillet_radius, "outline corner radius");
    pattern->add_option("--eyelet-mm", o.style.eyelet_diameter, "eyelet hole diameter");
    pattern->add_option("--tab-mm", o.style.tab_width, "connection tab width");

    CLI::App* schedule = app.add_subcommand("schedule", "mode -> tendon contraction schedule (CSV)");
    schedule->add_option("--mode", o.mode, "motion mode")->required();
    add_out(schedule, "schedule file (CSV)");
    add_model(schedule);

    CLI::App* simulate = app.add_subcommand("simulate", "design + schedule -> trajectory (CSV)");
    add_in(simulate, "design file");
    add_out(simulate, "trajectory file (CSV)");
    simulate->add_option("--schedule", o.schedule, "schedule file (CSV)");
    simulate->add_option("--mode", o.mode, "motion mode when no schedule file is given");
    simulate->add_flag("--pin-section2", o.pin_section2, "hold section 2 at its neutral pose");
    add_model(simulate);

    CLI::App* workspace = app.add_subcommand("workspace", "six single-tendon sweeps and their peak angles");
    add_in(workspace, "design file");
    add_out(workspace, "output directory");
    workspace->add_flag("--pin-section2", o.pin_section2, "hold section 2 at its neutral pose");
    add_model(workspace);

    CLI::App* report = app.add_subcommand("report", "closed-form bend limits of the movable sections");
    add_in(report, "design file");
    add_out(report, "report file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*design) return run_design(o, out);
        if (*validate_cmd) return run_validate(o, out);
        if (*pattern) return run_pattern(o, out);
        if (*schedule) return run_schedule_cmd(o, out);
        if (*simulate) return run_simulate(o, out);
        if (*workspace) return run_workspace(o, out);
        if (*report) return run_report(o, out);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomainError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << error_name(ErrorCode::IoError) << ": " << e.what() << '\n';
        return kExitDomainError;
    }
    return kExitUsage;
}

}  // namespace kresling

#include "kresling/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kresling/error.hpp"

namespace kresling {

namespace {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

const Json& member(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw Error(ErrorCode::SchemaViolation, where + " is missing \"" + key + "\"");
    }
    return obj.at(key);
}

double number(const Json& obj, const char* key, const std::string& where) {
    const Json& v = member(obj, key, where);
    if (!v.is_number()) throw Error(ErrorCode::SchemaViolation, where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::SchemaViolation, where + "." + key + " must be finite");
    return x;
}

double positive(const Json& obj, const char* key, const std::string& where) {
    const double x = number(obj, key, where);
    if (!(x > 0.0)) throw Error(ErrorCode::NonPositiveValue, where + "." + key + " must be positive");
    return x;
}

std::string text_field(const Json& obj, const char* key, const std::string& where) {
    const Json& v = member(obj, key, where);
    if (!v.is_string()) throw Error(ErrorCode::SchemaViolation, where + "." + key + " must be a string");
    return v.get<std::string>();
}

Json measurements_json(const MeasurementSet& m) {
    Json j;
    j["alpha_deg"] = m.alpha_deg;
    j["tolerance_mm"] = m.tolerance;
    Json sections = Json::array();
    for (const auto& s : m.sections) {
        Json e;
        e["c_top_mm"] = s.c_top;
        e["c_bottom_mm"] = s.c_bottom;
        e["h_mm"] = s.height;
        sections.push_back(e);
    }
    j["sections"] = sections;
    return j;
}

MeasurementSet measurements_from(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "measurements must be an object");
    MeasurementSet m;
    if (j.contains("alpha_deg")) m.alpha_deg = positive(j, "alpha_deg", "measurements");
    if (j.contains("tolerance_mm")) {
        m.tolerance = number(j, "tolerance_mm", "measurements");
        if (m.tolerance < 0.0) throw Error(ErrorCode::NonPositiveValue, "tolerance_mm must be non-negative");
    }
    const Json& sections = member(j, "sections", "measurements");
    if (!sections.is_array() || sections.size() != kSections) {
        throw Error(ErrorCode::SchemaViolation, "measurements need exactly 5 sections");
    }
    for (int i = 0; i < kSections; ++i) {
        const std::string where = "sections[" + std::to_string(i) + "]";
        const Json& s = sections[i];
        m.sections[i] = SectionMeasurement{positive(s, "c_top_mm", where), positive(s, "c_bottom_mm", where),
                                           positive(s, "h_mm", where)};
    }
    validate(m);
    return m;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

const char* kind_name(UnitKind k) { return k == UnitKind::TKO ? "TKO" : "CKO"; }
const char* chirality_name(Chirality c) { return c == Chirality::CW ? "CW" : "CCW"; }

UnitKind parse_kind(const std::string& s) {
    if (s == "TKO") return UnitKind::TKO;
    if (s == "CKO") return UnitKind::CKO;
    throw Error(ErrorCode::SchemaViolation, "unit kind must be TKO or CKO");
}

Chirality parse_chirality(const std::string& s) {
    if (s == "CW") return Chirality::CW;
    if (s == "CCW") return Chirality::CCW;
    throw Error(ErrorCode::SchemaViolation, "chirality must be CW or CCW");
}

bool same_design(const OrthosisDesign& a, const OrthosisDesign& b) {
    constexpr double tol = 1e-9;
    for (int i = 0; i < kSections; ++i) {
        const UnitSpec& u = a.units[i];
        const UnitSpec& v = b.units[i];
        if (u.kind != v.kind || u.chirality != v.chirality) return false;
        if (std::abs(u.a1 - v.a1) > tol || std::abs(u.a2 - v.a2) > tol || std::abs(u.b - v.b) > tol) return false;
        if (std::abs(u.alpha_deg - v.alpha_deg) > tol || std::abs(a.heights[i] - b.heights[i]) > tol) return false;
        if (a.locked[i] != b.locked[i]) return false;
    }
    return true;
}

void append_row(std::string& out, std::initializer_list<double> first, const std::array<double, 6>& rest) {
    bool lead = true;
    for (double v : first) {
        if (!lead) out += ',';
        out += format_number(v);
        lead = false;
    }
    for (double v : rest) {
        out += ',';
        out += format_number(v);
    }
    out += '\n';
}

std::vector<std::vector<double>> parse_table(const std::string& csv, const std::string& header) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw Error(ErrorCode::SchemaViolation, "unexpected header: " + line);
    const std::size_t columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
    std::vector<std::vector<double>> rows;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> values;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (true) {
            double v = 0.0;
            const auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{}) throw Error(ErrorCode::ParseError, "bad number on row " + std::to_string(row));
            values.push_back(v);
            if (next == end) break;
            if (*next != ',') throw Error(ErrorCode::ParseError, "bad separator on row " + std::to_string(row));
            p = next + 1;
        }
        if (values.size() != columns) {
            throw Error(ErrorCode::SchemaViolation, "row " + std::to_string(row) + " has the wrong column count");
        }
        rows.push_back(std::move(values));
    }
    return rows;
}

constexpr const char* kTrajectoryHeader = "t,x,y,z,beta,phi,l1,l2,l3,l4,l5,l6";
constexpr const char* kScheduleHeader = "t,c1,c2,c3,c4,c5,c6";

}  // namespace

MeasurementSet parse_measurements(const std::string& text) { return measurements_from(parse_json(text)); }

std::string serialize_measurements(const MeasurementSet& m) { return dump(measurements_json(m)); }

DesignDocument parse_design(const std::string& text) {
    const Json j = parse_json(text);
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "design document must be an object");
    DesignDocument doc;
    const Json& units = member(j, "units", "design");
    if (!units.is_array() || units.size() != kSections) {
        throw Error(ErrorCode::SchemaViolation, "design needs exactly 5 units");
    }
    for (int i = 0; i < kSections; ++i) {
        const std::string where = "units[" + std::to_string(i) + "]";
        const Json& u = units[i];
        doc.design.units[i] =
            make_unit_spec(parse_kind(text_field(u, "kind", where)), positive(u, "a1_mm", where),
                           positive(u, "a2_mm", where), positive(u, "b_mm", where), positive(u, "alpha_deg", where),
                           parse_chirality(text_field(u, "chirality", where)));
        doc.design.heights[i] = positive(u, "h_mm", where);
        if (u.contains("locked")) {
            if (!u.at("locked").is_boolean()) throw Error(ErrorCode::SchemaViolation, where + ".locked must be a boolean");
            doc.design.locked[i] = u.at("locked").get<bool>();
        }
    }
    validate(doc.design);
    if (j.contains("measurements")) {
        doc.measurements = measurements_from(j.at("measurements"));
        if (!same_design(design_orthosis(*doc.measurements), doc.design)) {
            throw Error(ErrorCode::SchemaViolation, "units do not follow from the embedded measurements");
        }
    }
    if (j.contains("provenance")) {
        const Json& p = j.at("provenance");
        doc.provenance.tool = text_field(p, "tool", "provenance");
        doc.provenance.version = text_field(p, "version", "provenance");
        doc.provenance.parameters.clear();
        if (p.contains("parameters")) {
            const Json& params = p.at("parameters");
            if (!params.is_object()) throw Error(ErrorCode::SchemaViolation, "provenance.parameters must be an object");
            for (const auto& [key, value] : params.items()) {
                if (!value.is_string()) throw Error(ErrorCode::SchemaViolation, "provenance parameters are strings");
                doc.provenance.parameters.emplace_back(key, value.get<std::string>());
            }
        }
    }
    return doc;
}

std::string serialize_design(const DesignDocument& doc) {
    Json j;
    j["format"] = "kresling-orthosis-design";
    Json units = Json::array();
    for (int i = 0; i < kSections; ++i) {
        const UnitSpec& u = doc.design.units[i];
        Json e;
        e["section"] = i + 1;
        e["kind"] = kind_name(u.kind);
        e["a1_mm"] = u.a1;
        e["a2_mm"] = u.a2;
        e["b_mm"] = u.b;
        e["alpha_deg"] = u.alpha_deg;
        e["chirality"] = chirality_name(u.chirality);
        e["h_mm"] = doc.design.heights[i];
        e["locked"] = static_cast<bool>(doc.design.locked[i]);
        units.push_back(e);
    }
    j["units"] = units;
    if (doc.measurements) j["measurements"] = measurements_json(*doc.measurements);
    Json p;
    p["tool"] = doc.provenance.tool;
    p["version"] = doc.provenance.version;
    Json params = Json::object();
    for (const auto& [key, value] : doc.provenance.parameters) params[key] = value;
    p["parameters"] = params;
    j["provenance"] = p;
    return dump(j);
}

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error(ErrorCode::IoError, "number formatting failed");
    return std::string(buf, end);
}

std::string export_trajectory(const Trajectory& trajectory) {
    std::string out = kTrajectoryHeader;
    out += '\n';
    for (const auto& s : trajectory.samples) {
        append_row(out, {s.t, s.marker.x(), s.marker.y(), s.marker.z(), s.beta_deg, s.phi_deg}, s.tendon_lengths);
    }
    return out;
}

Trajectory parse_trajectory(const std::string& csv) {
    Trajectory t;
    for (const auto& r : parse_table(csv, kTrajectoryHeader)) {
        TrajectorySample s;
        s.t = r[0];
        s.marker = Vec3(r[1], r[2], r[3]);
        s.beta_deg = r[4];
        s.phi_deg = r[5];
        for (int k = 0; k < kTendons; ++k) s.tendon_lengths[k] = r[6 + k];
        t.samples.push_back(s);
    }
    return t;
}

std::string export_schedule(const Schedule& schedule, double samples_per_second) {
    std::string out = kScheduleHeader;
    out += '\n';
    for (double t : sample_times(schedule.duration, samples_per_second)) {
        std::array<double, 6> c = schedule.at(t);
        for (double& v : c) v = std::clamp(v, 0.0, 1.0);
        append_row(out, {t}, c);
    }
    return out;
}

Schedule parse_schedule(const std::string& csv) {
    const auto rows = parse_table(csv, kScheduleHeader);
    if (rows.empty()) throw Error(ErrorCode::SchemaViolation, "schedule has no rows");
    Schedule s;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 ? rows[i][0] != 0.0 : rows[i][0] <= rows[i - 1][0]) {
            throw Error(ErrorCode::SchemaViolation, "schedule times must start at 0 and increase");
        }
        for (int c = 0; c < 6; ++c) s.channels[c].push_back(Breakpoint{rows[i][0], rows[i][1 + c]});
    }
    s.duration = rows.back()[0];
    validate(s);
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path temp = target;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot create " + temp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + temp.string());
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp, ec);
        throw Error(ErrorCode::IoError, "cannot replace " + path);
    }
}

MeasurementSet load_measurements(const std::string& path) { return parse_measurements(read_file(path)); }

DesignDocument load_design(const std::string& path) { return parse_design(read_file(path)); }

}  // namespace kresling

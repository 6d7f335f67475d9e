#include "powerloc/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace powerloc::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view field, std::size_t line_no) {
    field = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw FormatError("trace csv line " + std::to_string(line_no) + ": bad number '" +
                          std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? line.npos : next - pos));
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double failed");
    }
    return {buf, ptr};
}

void write_trace_csv(std::ostream& out, const PowerTrace& trace) {
    out << "# sample_period_s=" << format_double(trace.sample_period) << '\n';
    for (const auto& [key, value] : trace.meta) {
        out << "# " << key << '=' << value << '\n';
    }
    const bool gt = trace.has_ground_truth();
    out << (gt ? "t_s,power_mw,lat,lon\n" : "t_s,power_mw\n");
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        out << format_double(static_cast<double>(i) * trace.sample_period) << ','
            << format_double(trace.samples[i]);
        if (gt) {
            const auto& p = (*trace.ground_truth)[i];
            out << ',' << format_double(p.lat) << ',' << format_double(p.lon);
        }
        out << '\n';
    }
}

PowerTrace read_trace_csv(std::istream& in) {
    PowerTrace trace;
    std::optional<double> declared_period;
    std::vector<double> times;
    std::vector<LatLon> coords;
    bool header_seen = false;
    bool with_coords = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (view.front() == '#') {
            if (header_seen) {
                continue;
            }
            view = trim(view.substr(1));
            auto eq = view.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            std::string key(trim(view.substr(0, eq)));
            std::string value(trim(view.substr(eq + 1)));
            if (key == "sample_period_s") {
                declared_period = parse_double(value, line_no);
            } else {
                trace.meta[key] = value;
            }
            continue;
        }
        if (!header_seen) {
            if (view == "t_s,power_mw") {
                with_coords = false;
            } else if (view == "t_s,power_mw,lat,lon") {
                with_coords = true;
            } else {
                throw FormatError("trace csv: expected header 't_s,power_mw[,lat,lon]', got '" +
                                  std::string(view) + "'");
            }
            header_seen = true;
            continue;
        }
        auto fields = split(view, ',');
        if (fields.size() != (with_coords ? 4u : 2u)) {
            throw FormatError("trace csv line " + std::to_string(line_no) +
                              ": wrong number of fields");
        }
        times.push_back(parse_double(fields[0], line_no));
        trace.samples.push_back(parse_double(fields[1], line_no));
        if (with_coords) {
            coords.push_back({parse_double(fields[2], line_no), parse_double(fields[3], line_no)});
        }
    }
    if (!header_seen) {
        throw FormatError("trace csv: missing header");
    }
    if (trace.samples.empty()) {
        throw FormatError("trace csv: no samples");
    }
    if (times.size() >= 2) {
        std::vector<double> deltas;
        deltas.reserve(times.size() - 1);
        for (std::size_t i = 1; i < times.size(); ++i) {
            deltas.push_back(times[i] - times[i - 1]);
        }
        std::vector<double> sorted = deltas;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                         sorted.end());
        const double median = sorted[sorted.size() / 2];
        if (!(median > 0.0)) {
            throw FormatError("trace csv: timestamps not increasing");
        }
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            if (std::abs(deltas[i] - median) > 0.01 * median) {
                throw FormatError("trace csv: non-uniform sampling at row " + std::to_string(i + 2));
            }
        }
        if (declared_period) {
            if (std::abs(*declared_period - median) > 0.01 * median) {
                throw FormatError("trace csv: declared sample period disagrees with timestamps");
            }
            trace.sample_period = *declared_period;
        } else {
            trace.sample_period = median;
        }
    } else {
        trace.sample_period = declared_period.value_or(1.0);
    }
    if (with_coords) {
        trace.ground_truth = std::move(coords);
    }
    trace.validate(true);
    return trace;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFileError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void save_trace(const fs::path& path, const PowerTrace& trace) {
    std::ostringstream ss;
    write_trace_csv(ss, trace);
    write_text_file(path, ss.str());
}

PowerTrace load_trace(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFileError("cannot open " + path.string());
    }
    try {
        return read_trace_csv(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::string graph_to_json(const RoadGraph& graph) {
    json doc;
    doc["intersections"] = json::object();
    for (const auto& [id, p] : graph.intersections()) {
        doc["intersections"][std::to_string(id)] = json::array({p.lat, p.lon});
    }
    doc["segments"] = json::array();
    for (const auto& [key, seg] : graph.segments()) {
        json poly = json::array();
        for (const auto& p : seg.polyline) {
            poly.push_back(json::array({p.lat, p.lon}));
        }
        doc["segments"].push_back(json::array({seg.from, seg.to, seg.length_m, poly}));
    }
    return doc.dump(1) + "\n";
}

RoadGraph graph_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("graph json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("intersections") || !doc.contains("segments")) {
        throw FormatError("graph json: needs 'intersections' and 'segments'");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "intersections" && key != "segments") {
            throw FormatError("graph json: unknown key '" + key + "'");
        }
    }
    RoadGraph graph;
    try {
        for (const auto& [key, value] : doc.at("intersections").items()) {
            IntersectionId id = 0;
            auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
            if (ec != std::errc{} || ptr != key.data() + key.size()) {
                throw FormatError("graph json: bad intersection id '" + key + "'");
            }
            if (!value.is_array() || value.size() != 2) {
                throw FormatError("graph json: intersection " + key + " needs [lat, lon]");
            }
            graph.add_intersection(id, {value[0].get<double>(), value[1].get<double>()});
        }
        for (const auto& s : doc.at("segments")) {
            if (!s.is_array() || s.size() < 2 || s.size() > 4) {
                throw FormatError("graph json: segment must be [x, y, length_m, polyline]");
            }
            Segment seg;
            seg.from = s[0].get<IntersectionId>();
            seg.to = s[1].get<IntersectionId>();
            if (s.size() >= 3) {
                seg.length_m = s[2].get<double>();
            }
            if (s.size() == 4) {
                for (const auto& p : s[3]) {
                    seg.polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
                }
            }
            graph.add_segment(std::move(seg));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("graph json: ") + e.what());
    }
    graph.validate();
    return graph;
}

void save_graph(const fs::path& path, const RoadGraph& graph) {
    write_text_file(path, graph_to_json(graph));
}

RoadGraph load_graph(const fs::path& path) { return graph_from_json(read_text_file(path)); }

namespace {

std::string file_name(std::size_t index) {
    std::string s = std::to_string(index);
    while (s.size() < 3) {
        s.insert(s.begin(), '0');
    }
    return s + ".csv";
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (directories ? entry.is_directory()
                        : (entry.is_regular_file() && entry.path().extension() == ".csv")) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Triple parse_triple(const std::string& name) {
    auto parts = split(name, '_');
    if (parts.size() != 3) {
        throw FormatError("library: bad segment directory '" + name + "'");
    }
    auto parse_id = [&](std::string_view s) {
        IntersectionId id = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
        if (ec != std::errc{} || ptr != s.data() + s.size() || id < 0) {
            throw FormatError("library: bad segment directory '" + name + "'");
        }
        return id;
    };
    Triple t;
    t.prev = parts[0] == "s" ? kNoIntersection : parse_id(parts[0]);
    t.from = parse_id(parts[1]);
    t.to = parse_id(parts[2]);
    return t;
}

}  // namespace

void save_library(const fs::path& dir, const ReferenceLibrary& library) {
    for (const auto& [label, traces] : library.routes) {
        for (std::size_t i = 0; i < traces.size(); ++i) {
            save_trace(dir / "routes" / label / file_name(i), traces[i]);
        }
    }
    for (const auto& [key, traces] : library.segments) {
        for (std::size_t i = 0; i < traces.size(); ++i) {
            save_trace(dir / "segments" / key.to_string() / file_name(i), traces[i]);
        }
    }
}

ReferenceLibrary load_library(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw MissingFileError("library directory not found: " + dir.string());
    }
    ReferenceLibrary library;
    for (const auto& route_dir : sorted_entries(dir / "routes", true)) {
        auto& list = library.routes[route_dir.filename().string()];
        for (const auto& file : sorted_entries(route_dir, false)) {
            list.push_back(load_trace(file));
        }
    }
    for (const auto& seg_dir : sorted_entries(dir / "segments", true)) {
        auto& list = library.segments[parse_triple(seg_dir.filename().string())];
        for (const auto& file : sorted_entries(seg_dir, false)) {
            list.push_back(load_trace(file));
        }
    }
    library.validate();
    return library;
}

}  // namespace powerloc::io

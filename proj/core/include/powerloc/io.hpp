#pragma once

#include "powerloc/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace powerloc::io {

// Trace CSV
//
//   # sample_period_s=0.1        (optional; otherwise the median delta)
//   # <meta key>=<value>         (zero or more)
//   t_s,power_mw[,lat,lon]
//   0,812.5[,32.8,35.0]
//
// Timestamps must be uniform within 1% of the sample period. Numbers are
// written in shortest round-trip form, so save/load/save is byte-identical.

void write_trace_csv(std::ostream& out, const PowerTrace& trace);
[[nodiscard]] PowerTrace read_trace_csv(std::istream& in);
void save_trace(const std::filesystem::path& path, const PowerTrace& trace);
[[nodiscard]] PowerTrace load_trace(const std::filesystem::path& path);

// Graph JSON
//
//   {"intersections": {"1": [lat, lon], ...},
//    "segments": [[x, y, length_m, [[lat, lon], ...]], ...]}

[[nodiscard]] std::string graph_to_json(const RoadGraph& graph);
[[nodiscard]] RoadGraph graph_from_json(const std::string& text);
void save_graph(const std::filesystem::path& path, const RoadGraph& graph);
[[nodiscard]] RoadGraph load_graph(const std::filesystem::path& path);

// Library directory
//
//   <dir>/routes/<label>/000.csv ...
//   <dir>/segments/<prev>_<from>_<to>/000.csv ...   (prev "s" = standstill)

void save_library(const std::filesystem::path& dir, const ReferenceLibrary& library);
[[nodiscard]] ReferenceLibrary load_library(const std::filesystem::path& dir);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace powerloc::io

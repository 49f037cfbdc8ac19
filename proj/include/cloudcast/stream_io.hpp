#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cloudcast/frame.hpp"

namespace cloudcast {

// Dataset text format:
//
//   #cloudcast,v=1,N=<points>,H=<values>,L=<coords>,U=<channels>,T=<frames>,dt=<seconds>
//   t,channel,point_id,c_1..c_L,v_1..v_H
//
// Rows are sorted by (t, channel, point_id) and reals carry 17 significant digits so doubles
// survive a round trip unchanged.

namespace detail {

inline void append_real(std::string& out, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(len));
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

inline std::size_t parse_count(std::string_view s, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(s) + "'");
  return v;
}

inline double parse_real(std::string_view s, std::size_t line, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(s) + "'");
  if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

}  // namespace detail

inline void write_stream(const StreamSequence& stream, std::ostream& os) {
  stream.validate();
  if (stream.empty()) throw ArgumentError("write_stream: empty stream");
  const auto& s = stream.shape();
  std::string out = detail::concat("#cloudcast,v=1,N=", s.points, ",H=", s.value_dim, ",L=", s.coord_dim,
                                   ",U=", s.channels, ",T=", stream.size(), ",dt=");
  detail::append_real(out, stream.timestep_seconds);
  out += '\n';
  os << out;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const auto& f = stream.frames[t];
    for (std::size_t u = 0; u < s.channels; ++u)
      for (std::size_t n = 0; n < s.points; ++n) {
        out = detail::concat(t, ",", u, ",", n);
        for (std::size_t l = 0; l < s.coord_dim; ++l) {
          out += ',';
          detail::append_real(out, f.coord(u, n, l));
        }
        for (std::size_t h = 0; h < s.value_dim; ++h) {
          out += ',';
          detail::append_real(out, f.value(u, n, h));
        }
        out += '\n';
        os << out;
      }
  }
}

inline void write_stream(const StreamSequence& stream, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_stream(stream, os);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline StreamSequence read_stream(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || line.empty()) throw ParseError(1, "missing #cloudcast header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto head = detail::split_commas(line);
  if (head.empty() || head[0] != "#cloudcast") throw ParseError(1, "missing #cloudcast header");
  std::map<std::string, std::string, std::less<>> kv;
  for (std::size_t i = 1; i < head.size(); ++i) {
    const auto eq = head[i].find('=');
    if (eq == std::string_view::npos) throw ParseError(1, "malformed header field '" + std::string(head[i]) + "'");
    kv[std::string(head[i].substr(0, eq))] = std::string(head[i].substr(eq + 1));
  }
  auto field = [&](const char* key) -> std::string_view {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(1, std::string("header lacks '") + key + "'");
    return it->second;
  };
  if (detail::parse_count(field("v"), 1, "version") != 1) throw ParseError(1, "unsupported format version");

  FrameShape shape;
  shape.points = detail::parse_count(field("N"), 1, "N");
  shape.value_dim = detail::parse_count(field("H"), 1, "H");
  shape.coord_dim = detail::parse_count(field("L"), 1, "L");
  shape.channels = detail::parse_count(field("U"), 1, "U");
  const std::size_t frames = detail::parse_count(field("T"), 1, "T");
  const double dt = detail::parse_real(field("dt"), 1, "dt");
  if (shape.points == 0 || shape.channels == 0 || shape.coord_dim == 0 || frames == 0)
    throw ParseError(1, "N, U, L and T must be positive");
  if (!(dt > 0.0)) throw ParseError(1, "dt must be positive");

  StreamSequence stream{std::vector<PointCloudFrame>(frames, PointCloudFrame(shape)), dt};
  const std::size_t expected_fields = 3 + shape.coord_dim + shape.value_dim;
  const std::size_t total_rows = frames * shape.channels * shape.points;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != expected_fields)
      throw ParseError(line_no, detail::concat("row has ", fields.size(), " fields, header implies ", expected_fields,
                                               " (3 + L + H)"));
    const std::size_t t = detail::parse_count(fields[0], line_no, "t");
    const std::size_t u = detail::parse_count(fields[1], line_no, "channel");
    const std::size_t n = detail::parse_count(fields[2], line_no, "point_id");
    if (t >= frames) throw ParseError(line_no, detail::concat("t=", t, " out of range (T=", frames, ")"));
    if (u >= shape.channels)
      throw ParseError(line_no, detail::concat("channel=", u, " out of range (U=", shape.channels, ")"));
    if (n >= shape.points)
      throw ParseError(line_no, detail::concat("point_id=", n, " out of range (N=", shape.points, ")"));
    if (row >= total_rows) throw ParseError(line_no, "more rows than T*U*N");
    const std::size_t want_t = row / (shape.channels * shape.points);
    const std::size_t want_u = (row / shape.points) % shape.channels;
    const std::size_t want_n = row % shape.points;
    if (t != want_t || u != want_u || n != want_n)
      throw ParseError(line_no, detail::concat("row (", t, ",", u, ",", n, ") out of order, expected (", want_t, ",",
                                               want_u, ",", want_n, ")"));
    auto& f = stream.frames[t];
    for (std::size_t l = 0; l < shape.coord_dim; ++l) f.coord(u, n, l) = detail::parse_real(fields[3 + l], line_no, "coordinate");
    for (std::size_t h = 0; h < shape.value_dim; ++h)
      f.value(u, n, h) = detail::parse_real(fields[3 + shape.coord_dim + h], line_no, "value");
    ++row;
  }
  if (row != total_rows)
    throw ParseError(line_no, detail::concat("file has ", row, " rows, header implies T*U*N=", total_rows));
  return stream;
}

inline StreamSequence read_stream(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_stream(is);
}

}  // namespace cloudcast

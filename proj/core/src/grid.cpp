#include "hda/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hda {

double Dem::sample(double x, double y) const {
  double fc = col_of(x);
  double fr = row_of(y);
  fc = std::clamp(fc, 0.0, static_cast<double>(cols() - 1));
  fr = std::clamp(fr, 0.0, static_cast<double>(rows() - 1));
  const int c0 = std::min(static_cast<int>(fc), cols() - 2 >= 0 ? cols() - 2 : 0);
  const int r0 = std::min(static_cast<int>(fr), rows() - 2 >= 0 ? rows() - 2 : 0);
  const int c1 = std::min(c0 + 1, cols() - 1);
  const int r1 = std::min(r0 + 1, rows() - 1);
  const double tx = fc - c0;
  const double ty = fr - r0;
  const double h00 = heights(r0, c0), h01 = heights(r0, c1);
  const double h10 = heights(r1, c0), h11 = heights(r1, c1);
  return (1 - ty) * ((1 - tx) * h00 + tx * h01) + ty * ((1 - tx) * h10 + tx * h11);
}

double Dem::min_height() const {
  return *std::min_element(heights.data().begin(), heights.data().end());
}
double Dem::max_height() const {
  return *std::max_element(heights.data().begin(), heights.data().end());
}

namespace {

void put_f32_le(std::string& out, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  out.push_back(static_cast<char>(u & 0xff));
  out.push_back(static_cast<char>((u >> 8) & 0xff));
  out.push_back(static_cast<char>((u >> 16) & 0xff));
  out.push_back(static_cast<char>((u >> 24) & 0xff));
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

}  // namespace

void write_hdagrid(const std::string& path, const Grid<float>& g, double resolution) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_hdagrid: cannot open " + path);
  char header[128];
  std::snprintf(header, sizeof(header), "HDAGRID 1 %d %d %.17g\n", g.rows(), g.cols(), resolution);
  os << header;
  std::string payload;
  payload.reserve(g.data().size() * 4);
  for (float v : g.data()) put_f32_le(payload, v);
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!os) throw std::runtime_error("write_hdagrid: write failed for " + path);
}

Grid<float> read_hdagrid(const std::string& path, double* resolution_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_hdagrid: cannot open " + path);
  std::string line;
  std::getline(is, line);
  std::istringstream hdr(line);
  std::string magic;
  int version = 0, rows = 0, cols = 0;
  double resolution = 0.0;
  hdr >> magic >> version >> rows >> cols >> resolution;
  if (magic != "HDAGRID" || version != 1 || rows <= 0 || cols <= 0)
    throw std::runtime_error("read_hdagrid: bad header in " + path);
  Grid<float> g(rows, cols);
  std::vector<unsigned char> buf(static_cast<size_t>(rows) * cols * 4);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (is.gcount() != static_cast<std::streamsize>(buf.size()))
    throw std::runtime_error("read_hdagrid: truncated payload in " + path);
  for (size_t i = 0; i < g.data().size(); ++i) g.data()[i] = get_f32_le(&buf[i * 4]);
  if (resolution_out) *resolution_out = resolution;
  return g;
}

Grid<float> to_float_grid(const Grid<double>& g) {
  Grid<float> out(g.rows(), g.cols());
  for (size_t i = 0; i < g.data().size(); ++i) out.data()[i] = static_cast<float>(g.data()[i]);
  return out;
}

Grid<double> to_double_grid(const Grid<float>& g) {
  Grid<double> out(g.rows(), g.cols());
  for (size_t i = 0; i < g.data().size(); ++i) out.data()[i] = g.data()[i];
  return out;
}

void write_pgm16(const std::string& path, const Grid<float>& g, double lo, double hi) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_pgm16: cannot open " + path);
  os << "P5\n" << g.cols() << ' ' << g.rows() << "\n65535\n";
  const double span = hi > lo ? hi - lo : 1.0;
  std::string payload;
  payload.reserve(g.data().size() * 2);
  for (float v : g.data()) {
    double t = (v - lo) / span;
    t = std::clamp(t, 0.0, 1.0);
    const auto u = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    payload.push_back(static_cast<char>(u >> 8));  // PGM is big-endian
    payload.push_back(static_cast<char>(u & 0xff));
  }
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

void write_pgm8(const std::string& path, const Grid<std::uint8_t>& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_pgm8: cannot open " + path);
  os << "P5\n" << g.cols() << ' ' << g.rows() << "\n255\n";
  os.write(reinterpret_cast<const char*>(g.data().data()), static_cast<std::streamsize>(g.data().size()));
}

}  // namespace hda

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hda {

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Grid: non-positive shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool contains(int r, int c) const { return r >= 0 && r < rows_ && c >= 0 && c < cols_; }

  T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  T& at(int r, int c) {
    if (!contains(r, c)) throw std::out_of_range("Grid::at");
    return (*this)(r, c);
  }
  const T& at(int r, int c) const {
    if (!contains(r, c)) throw std::out_of_range("Grid::at");
    return (*this)(r, c);
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

// Ground-truth elevation grid. World frame: origin at grid center, x along
// +columns, y along +rows, z up. Heights are meters above the datum.
struct Dem {
  Grid<float> heights;
  double resolution = 1.0;  // meters/pixel
  double datum = 0.0;       // world z of height 0

  int rows() const { return heights.rows(); }
  int cols() const { return heights.cols(); }

  double world_x(double col) const { return (col - (cols() - 1) / 2.0) * resolution; }
  double world_y(double row) const { return (row - (rows() - 1) / 2.0) * resolution; }
  double col_of(double x) const { return x / resolution + (cols() - 1) / 2.0; }
  double row_of(double y) const { return y / resolution + (rows() - 1) / 2.0; }

  // Bilinear height sample at world (x, y); clamps to the grid edge.
  double sample(double x, double y) const;

  double min_height() const;
  double max_height() const;
};

// HDAGRID file format: one ASCII header line
//   HDAGRID 1 <rows> <cols> <resolution_m>\n
// followed by rows*cols little-endian 32-bit floats, row-major.
void write_hdagrid(const std::string& path, const Grid<float>& g, double resolution);
Grid<float> read_hdagrid(const std::string& path, double* resolution_out = nullptr);

Grid<float> to_float_grid(const Grid<double>& g);
Grid<double> to_double_grid(const Grid<float>& g);

// PGM (P5) export; maxval 65535 scales [lo, hi] to the full range.
void write_pgm16(const std::string& path, const Grid<float>& g, double lo, double hi);
void write_pgm8(const std::string& path, const Grid<std::uint8_t>& g);

}  // namespace hda

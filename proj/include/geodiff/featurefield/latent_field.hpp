#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace geodiff::ff {

// Continuous position on a grid. x runs along columns, y along rows.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// Integer grid cell (column, row).
struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(Cell a, Cell b) = default;
};

inline Cell round_to_cell(Point2 p) {
  return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
}
inline Point2 to_point(Cell c) { return {double(c.x), double(c.y)}; }

// H x W x C grid of doubles stored row-major, channel-last.
class LatentField {
 public:
  LatentField() = default;
  LatentField(int height, int width, int channels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return values_.size(); }
  bool same_shape(const LatentField& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  double& at(int y, int x, int c) { return values_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return values_[index(y, x, c)]; }

  std::span<double> cell(int y, int x) { return {values_.data() + index(y, x, 0), std::size_t(channels_)}; }
  std::span<const double> cell(int y, int x) const {
    return {values_.data() + index(y, x, 0), std::size_t(channels_)};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  friend bool operator==(const LatentField&, const LatentField&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

}  // namespace geodiff::ff

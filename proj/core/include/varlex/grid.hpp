#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace varlex {

// Point in R^n with n <= 2; the unused slot stays zero in 1d.
struct Vec {
  double v[2]{0.0, 0.0};

  Vec() = default;
  Vec(double x) { v[0] = x; }
  Vec(double x, double y) {
    v[0] = x;
    v[1] = y;
  }

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double c, const Vec& a) { return {c * a[0], c * a[1]}; }

double norm(const Vec& a, int dim);
double dist(const Vec& a, const Vec& b, int dim);

// Axis-aligned box with a uniform midpoint grid. `res` counts cells per axis.
struct DomainBox {
  int dim = 1;
  Vec lo{0.0, 0.0};
  Vec hi{1.0, 0.0};
  std::array<long, 2> res{2, 1};

  DomainBox() = default;
  DomainBox(int dim, Vec lo, Vec hi, std::array<long, 2> res);

  double width(int axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(res[axis]); }
  double maxWidth() const;
  double volume() const;
  double cellVolume() const;
  long cellCount() const { return dim == 1 ? res[0] : res[0] * res[1]; }

  // row-major flattening: flat = ix * res[1] + iy in 2d, flat = ix in 1d
  long flatIndex(long ix, long iy = 0) const { return dim == 1 ? ix : ix * res[1] + iy; }
  Vec midpoint(long flat) const;
  bool contains(const Vec& x) const;
  bool strictlyInside(const Vec& x, double margin) const;

  DomainBox refined(long factor = 2) const;
  bool sameShape(const DomainBox& o) const;
};

struct Ball {
  Vec center;
  double radius = 0.0;
};

struct BoxRegion {
  Vec lo;
  Vec hi;
};

using Region = std::variant<Ball, BoxRegion>;

bool region_contains(const Region& r, const Vec& x, int dim);

// Samples live at cell midpoints, stored row-major. All values stay finite;
// constructors and maps enforce this.
struct GridFunction {
  DomainBox domain;
  std::vector<double> values;

  double operator[](long flat) const { return values[static_cast<std::size_t>(flat)]; }
  double& operator[](long flat) { return values[static_cast<std::size_t>(flat)]; }
};

GridFunction make_grid(const DomainBox& box, double fill = 0.0);

// midpoint sampling of a closed form; throws if any sample is non-finite
GridFunction sample(const DomainBox& box, const std::function<double(const Vec&)>& fn);

// sum of values times cell volume, accumulated in row-major index order
double integrate(const GridFunction& f);

// 0/1 function of the region, sampled at midpoints; throws when no midpoint
// falls inside the region (the region misses the grid entirely)
GridFunction indicator(const DomainBox& box, const Region& region);

// applies fn to every value; throws naming the midpoint if a result is non-finite
GridFunction pointwise_map(const GridFunction& f, const std::function<double(double)>& fn);

// multilinear interpolation between midpoints; constant extension inside the
// boundary half-cell, zero outside the box
double interp(const GridFunction& f, const Vec& x);

// each cell split into 2^dim children carrying the parent value; represents
// the same piecewise-constant function on the refined grid
GridFunction subdivide(const GridFunction& f);

// serialization
void write_csv(const GridFunction& f, const std::string& path);
GridFunction read_csv(const std::string& path);
// binary layout: i64 dim, i64 res[dim], f64 lo[dim], f64 hi[dim], f64 values
// (little-endian, row-major); round-trips bitwise
void write_binary(const GridFunction& f, const std::string& path);
GridFunction read_binary(const std::string& path);

}  // namespace varlex

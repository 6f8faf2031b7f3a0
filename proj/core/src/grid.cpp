#include "varlex/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace varlex {

static_assert(std::endian::native == std::endian::little,
              "binary grid serialization assumes a little-endian host");

double norm(const Vec& a, int dim) {
  return dim == 1 ? std::abs(a[0]) : std::hypot(a[0], a[1]);
}

double dist(const Vec& a, const Vec& b, int dim) { return norm(a - b, dim); }

DomainBox::DomainBox(int dim_, Vec lo_, Vec hi_, std::array<long, 2> res_)
    : dim(dim_), lo(lo_), hi(hi_), res(res_) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("DomainBox: dim must be 1 or 2");
  if (dim == 1) {
    res[1] = 1;
    lo[1] = 0.0;
    hi[1] = 0.0;
  }
  for (int d = 0; d < dim; ++d) {
    if (!(hi[d] > lo[d]))
      throw std::invalid_argument("DomainBox: hi must exceed lo on every axis");
    if (res[d] < 2)
      throw std::invalid_argument("DomainBox: at least 2 cells per axis required");
  }
}

double DomainBox::maxWidth() const {
  double w = width(0);
  if (dim == 2) w = std::max(w, width(1));
  return w;
}

double DomainBox::volume() const {
  double v = hi[0] - lo[0];
  if (dim == 2) v *= hi[1] - lo[1];
  return v;
}

double DomainBox::cellVolume() const {
  double v = width(0);
  if (dim == 2) v *= width(1);
  return v;
}

Vec DomainBox::midpoint(long flat) const {
  Vec x;
  if (dim == 1) {
    x[0] = lo[0] + (static_cast<double>(flat) + 0.5) * width(0);
  } else {
    long ix = flat / res[1];
    long iy = flat % res[1];
    x[0] = lo[0] + (static_cast<double>(ix) + 0.5) * width(0);
    x[1] = lo[1] + (static_cast<double>(iy) + 0.5) * width(1);
  }
  return x;
}

bool DomainBox::contains(const Vec& x) const {
  for (int d = 0; d < dim; ++d)
    if (x[d] < lo[d] || x[d] > hi[d]) return false;
  return true;
}

bool DomainBox::strictlyInside(const Vec& x, double margin) const {
  for (int d = 0; d < dim; ++d)
    if (x[d] < lo[d] + margin || x[d] > hi[d] - margin) return false;
  return true;
}

DomainBox DomainBox::refined(long factor) const {
  if (factor < 1) throw std::invalid_argument("DomainBox::refined: factor must be >= 1");
  std::array<long, 2> r = res;
  r[0] *= factor;
  if (dim == 2) r[1] *= factor;
  return DomainBox(dim, lo, hi, r);
}

bool DomainBox::sameShape(const DomainBox& o) const {
  if (dim != o.dim) return false;
  for (int d = 0; d < dim; ++d)
    if (lo[d] != o.lo[d] || hi[d] != o.hi[d] || res[d] != o.res[d]) return false;
  return true;
}

bool region_contains(const Region& r, const Vec& x, int dim) {
  if (std::holds_alternative<Ball>(r)) {
    const Ball& b = std::get<Ball>(r);
    return dist(x, b.center, dim) <= b.radius;
  }
  const BoxRegion& b = std::get<BoxRegion>(r);
  for (int d = 0; d < dim; ++d)
    if (x[d] < b.lo[d] || x[d] > b.hi[d]) return false;
  return true;
}

GridFunction make_grid(const DomainBox& box, double fill) {
  if (!std::isfinite(fill)) throw std::invalid_argument("make_grid: fill value must be finite");
  GridFunction f;
  f.domain = box;
  f.values.assign(static_cast<std::size_t>(box.cellCount()), fill);
  return f;
}

GridFunction sample(const DomainBox& box, const std::function<double(const Vec&)>& fn) {
  GridFunction f = make_grid(box);
  long n = box.cellCount();
  for (long i = 0; i < n; ++i) {
    Vec x = box.midpoint(i);
    double v = fn(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "sample: non-finite value at midpoint (" << x[0];
      if (box.dim == 2) os << ", " << x[1];
      os << ")";
      throw std::runtime_error(os.str());
    }
    f[i] = v;
  }
  return f;
}

double integrate(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.domain.cellVolume();
}

GridFunction indicator(const DomainBox& box, const Region& region) {
  GridFunction f = make_grid(box);
  long n = box.cellCount();
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    if (region_contains(region, box.midpoint(i), box.dim)) {
      f[i] = 1.0;
      ++hits;
    }
  }
  if (hits == 0)
    throw std::invalid_argument("indicator: region does not intersect the domain grid");
  return f;
}

GridFunction pointwise_map(const GridFunction& f, const std::function<double(double)>& fn) {
  GridFunction g = f;
  long n = f.domain.cellCount();
  for (long i = 0; i < n; ++i) {
    double v = fn(f[i]);
    if (!std::isfinite(v)) {
      Vec x = f.domain.midpoint(i);
      std::ostringstream os;
      os << "pointwise_map: non-finite value at midpoint (" << x[0];
      if (f.domain.dim == 2) os << ", " << x[1];
      os << ")";
      throw std::runtime_error(os.str());
    }
    g[i] = v;
  }
  return g;
}

double interp(const GridFunction& f, const Vec& x) {
  const DomainBox& b = f.domain;
  if (!b.contains(x)) return 0.0;
  // cell-space coordinate; midpoint i sits at coordinate i
  double t0 = (x[0] - b.lo[0]) / b.width(0) - 0.5;
  long i0 = static_cast<long>(std::floor(t0));
  i0 = std::clamp(i0, 0L, b.res[0] - 2);
  double f0 = std::clamp(t0 - static_cast<double>(i0), 0.0, 1.0);
  if (b.dim == 1) {
    return (1.0 - f0) * f[i0] + f0 * f[i0 + 1];
  }
  double t1 = (x[1] - b.lo[1]) / b.width(1) - 0.5;
  long i1 = static_cast<long>(std::floor(t1));
  i1 = std::clamp(i1, 0L, b.res[1] - 2);
  double f1 = std::clamp(t1 - static_cast<double>(i1), 0.0, 1.0);
  double a00 = f[b.flatIndex(i0, i1)];
  double a01 = f[b.flatIndex(i0, i1 + 1)];
  double a10 = f[b.flatIndex(i0 + 1, i1)];
  double a11 = f[b.flatIndex(i0 + 1, i1 + 1)];
  double a0 = (1.0 - f1) * a00 + f1 * a01;
  double a1 = (1.0 - f1) * a10 + f1 * a11;
  return (1.0 - f0) * a0 + f0 * a1;
}

GridFunction subdivide(const GridFunction& f) {
  const DomainBox& b = f.domain;
  GridFunction g = make_grid(b.refined(2));
  if (b.dim == 1) {
    for (long i = 0; i < b.res[0]; ++i) {
      g[2 * i] = f[i];
      g[2 * i + 1] = f[i];
    }
    return g;
  }
  for (long ix = 0; ix < b.res[0]; ++ix)
    for (long iy = 0; iy < b.res[1]; ++iy) {
      double v = f[b.flatIndex(ix, iy)];
      for (long dx = 0; dx < 2; ++dx)
        for (long dy = 0; dy < 2; ++dy)
          g[g.domain.flatIndex(2 * ix + dx, 2 * iy + dy)] = v;
    }
  return g;
}

void write_csv(const GridFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << (f.domain.dim == 1 ? "x,value\n" : "x,y,value\n");
  char buf[96];
  long n = f.domain.cellCount();
  for (long i = 0; i < n; ++i) {
    Vec x = f.domain.midpoint(i);
    if (f.domain.dim == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x[0], f[i]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x[0], x[1], f[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

GridFunction read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string header;
  std::getline(in, header);
  int dim = header.find("x,y,") == 0 ? 2 : 1;
  std::vector<std::array<double, 3>> rows;
  std::string line;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 3> row{0, 0, 0};
    int got = dim == 1 ? std::sscanf(line.c_str(), "%lf,%lf", &row[0], &row[2])
                       : std::sscanf(line.c_str(), "%lf,%lf,%lf", &row[0], &row[1], &row[2]);
    if (got != dim + 1)
      throw std::runtime_error("read_csv: malformed row at " + path + ":" +
                               std::to_string(lineno));
    rows.push_back(row);
  }
  if (rows.size() < 2) throw std::runtime_error("read_csv: too few rows in " + path);

  auto axis_coords = [&](int axis) {
    std::set<double> s;
    for (auto& r : rows) s.insert(r[axis]);
    return std::vector<double>(s.begin(), s.end());
  };
  std::vector<double> xs = axis_coords(0);
  std::vector<double> ys = dim == 2 ? axis_coords(1) : std::vector<double>{};
  auto spacing = [&](const std::vector<double>& c, const char* name) {
    if (c.size() < 2) throw std::runtime_error(std::string("read_csv: degenerate ") + name + " axis");
    return c[1] - c[0];
  };
  double hx = spacing(xs, "x");
  DomainBox box;
  if (dim == 1) {
    box = DomainBox(1, Vec(xs.front() - hx / 2), Vec(xs.back() + hx / 2),
                    {static_cast<long>(xs.size()), 1});
  } else {
    double hy = spacing(ys, "y");
    box = DomainBox(2, Vec(xs.front() - hx / 2, ys.front() - hy / 2),
                    Vec(xs.back() + hx / 2, ys.back() + hy / 2),
                    {static_cast<long>(xs.size()), static_cast<long>(ys.size())});
  }
  if (static_cast<long>(rows.size()) != box.cellCount())
    throw std::runtime_error("read_csv: rows do not fill a regular grid in " + path);
  GridFunction f = make_grid(box);
  auto index_of = [](const std::vector<double>& c, double v) {
    auto it = std::lower_bound(c.begin(), c.end(), v);
    return static_cast<long>(it - c.begin());
  };
  for (auto& r : rows) {
    long ix = index_of(xs, r[0]);
    long iy = dim == 2 ? index_of(ys, r[1]) : 0;
    if (!std::isfinite(r[2]))
      throw std::runtime_error("read_csv: non-finite value in " + path);
    f[box.flatIndex(ix, iy)] = r[2];
  }
  return f;
}

void write_binary(const GridFunction& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_binary: cannot open " + path);
  auto put_i64 = [&](std::int64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_i64(f.domain.dim);
  for (int d = 0; d < f.domain.dim; ++d) put_i64(f.domain.res[d]);
  for (int d = 0; d < f.domain.dim; ++d) put_f64(f.domain.lo[d]);
  for (int d = 0; d < f.domain.dim; ++d) put_f64(f.domain.hi[d]);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_binary: write failed for " + path);
}

GridFunction read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_binary: cannot open " + path);
  auto get_i64 = [&] {
    std::int64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto get_f64 = [&] {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  std::int64_t dim = get_i64();
  if (!in || (dim != 1 && dim != 2))
    throw std::runtime_error("read_binary: bad header in " + path);
  std::array<long, 2> res{1, 1};
  Vec lo, hi;
  for (int d = 0; d < dim; ++d) res[static_cast<std::size_t>(d)] = static_cast<long>(get_i64());
  for (int d = 0; d < dim; ++d) lo[d] = get_f64();
  for (int d = 0; d < dim; ++d) hi[d] = get_f64();
  DomainBox box(static_cast<int>(dim), lo, hi, res);
  GridFunction f = make_grid(box);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_binary: truncated values in " + path);
  for (double v : f.values)
    if (!std::isfinite(v)) throw std::runtime_error("read_binary: non-finite value in " + path);
  return f;
}

}  // namespace varlex

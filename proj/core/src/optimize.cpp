#include "rssdloc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rssdloc/error.hpp"

namespace rssdloc {

namespace {

// Lattice lo + k*step inside [lo, hi]; hi is appended when the lattice
// stops short of it.
std::vector<double> lattice(double lo, double hi, double step) {
  const std::size_t n = lattice_count(lo, hi, step);
  std::vector<double> v;
  v.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) v.push_back(lo + static_cast<double>(k) * step);
  if (hi - v.back() > 1e-9 * step) v.push_back(hi);
  return v;
}

}  // namespace

std::size_t lattice_count(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw Error(Errc::EmptyRegion, "lattice needs lo <= hi and a positive step");
  }
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol) {
  constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return {mid, f(mid)};
}

ScalarMinimum scan_minimize(const std::function<double(double)>& f, double lo, double hi,
                            double step) {
  ScalarMinimum best{lo, std::numeric_limits<double>::infinity()};
  bool first = true;
  for (double t : lattice(lo, hi, step)) {
    const double v = f(t);
    if (first || v < best.value) {
      best = {t, v};
      first = false;
    }
  }
  return best;
}

ScalarMinimum scan_then_golden(const std::function<double(double)>& f, double lo, double hi,
                               double step, double tol, int candidates) {
  const auto ts = lattice(lo, hi, step);
  std::vector<double> vs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) vs[i] = f(ts[i]);

  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if ((i == 0 || vs[i] <= vs[i - 1]) && (i + 1 == ts.size() || vs[i] <= vs[i + 1])) {
      minima.push_back(i);
    }
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [&](std::size_t a, std::size_t b) { return vs[a] < vs[b]; });
  if (minima.empty()) minima.push_back(0);
  minima.resize(std::min(minima.size(), static_cast<std::size_t>(std::max(1, candidates))));

  ScalarMinimum best{ts[minima.front()], vs[minima.front()]};
  for (const std::size_t i : minima) {
    const double a = std::max(lo, ts[i] - step);
    const double b = std::min(hi, ts[i] + step);
    ScalarMinimum fine = golden_section_minimize(f, a, b, tol);
    if (!(fine.value < vs[i])) fine = {ts[i], vs[i]};
    if (fine.value < best.value || (fine.value == best.value && fine.argmin < best.argmin)) best = fine;
  }
  return best;
}

PlanarMinimum grid_minimize(const std::function<double(Point2D)>& f, const Box& box, double step) {
  const auto xs = lattice(box.x_min, box.x_max, step);
  const auto ys = lattice(box.y_min, box.y_max, step);
  PlanarMinimum best{{xs.front(), ys.front()}, std::numeric_limits<double>::infinity()};
  bool first = true;
  for (double y : ys) {
    for (double x : xs) {
      const double v = f({x, y});
      if (first || v < best.value) {
        best = {{x, y}, v};
        first = false;
      }
    }
  }
  return best;
}

namespace {

bool better(const PlanarMinimum& a, const PlanarMinimum& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.argmin.y != b.argmin.y) return a.argmin.y < b.argmin.y;
  return a.argmin.x < b.argmin.x;
}

PlanarMinimum refine_around(const std::function<double(Point2D)>& f, const Box& box,
                            PlanarMinimum best, double step, int refine_iterations) {
  double h = step;
  for (int it = 0; it < refine_iterations; ++it) {
    h *= 0.5;
    const Point2D centre = best.argmin;
    for (int j = -2; j <= 2; ++j) {
      const double y = centre.y + j * h;
      if (y < box.y_min || y > box.y_max) continue;
      for (int i = -2; i <= 2; ++i) {
        const double x = centre.x + i * h;
        if (x < box.x_min || x > box.x_max) continue;
        const PlanarMinimum c{{x, y}, f({x, y})};
        if (better(c, best)) best = c;
      }
    }
  }
  return best;
}

}  // namespace

PlanarMinimum grid_refine_minimize(const std::function<double(Point2D)>& f, const Box& box,
                                   double step, int refine_iterations, int candidates) {
  const auto xs = lattice(box.x_min, box.x_max, step);
  const auto ys = lattice(box.y_min, box.y_max, step);
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  std::vector<double> vs(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) vs[j * nx + i] = f({xs[i], ys[j]});
  }

  // Lattice points no larger than any of their eight neighbours, best first.
  std::vector<std::size_t> minima;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = vs[j * nx + i];
      bool local = std::isfinite(v);
      for (std::size_t jj = j == 0 ? 0 : j - 1; local && jj <= std::min(ny - 1, j + 1); ++jj) {
        for (std::size_t ii = i == 0 ? 0 : i - 1; ii <= std::min(nx - 1, i + 1); ++ii) {
          if (vs[jj * nx + ii] < v) {
            local = false;
            break;
          }
        }
      }
      if (local) minima.push_back(j * nx + i);
    }
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [&](std::size_t a, std::size_t b) { return vs[a] < vs[b]; });
  if (minima.empty()) {
    minima.push_back(static_cast<std::size_t>(std::min_element(vs.begin(), vs.end()) - vs.begin()));
  }
  minima.resize(std::min(minima.size(), static_cast<std::size_t>(std::max(1, candidates))));

  std::optional<PlanarMinimum> best;
  for (const std::size_t k : minima) {
    const PlanarMinimum start{{xs[k % nx], ys[k / nx]}, vs[k]};
    const PlanarMinimum r = refine_around(f, box, start, step, refine_iterations);
    if (!best || better(r, *best)) best = r;
  }
  return *best;
}

}  // namespace rssdloc

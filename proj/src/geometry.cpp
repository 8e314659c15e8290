#include "aniso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void check_dim(const Domain& d, std::span<const double> x, const char* what) {
  if (x.size() != d.dim()) {
    throw ArgumentError(std::string(what) + ": point has dimension " + std::to_string(x.size()) +
                        ", domain has dimension " + std::to_string(d.dim()));
  }
}

// Chart of a sphere of radius s seen from outside (domain inside the sphere) or from
// inside (domain outside the sphere): height of the boundary above the tangent plane.
double sphere_chart(double s, double tangential, bool domain_inside) {
  if (!(tangential < s)) throw RangeError("point outside the boundary chart of the sphere");
  const double sag = s - std::sqrt(s * s - tangential * tangential);
  return domain_inside ? sag : -sag;
}

// Signed distance from x to the inner box of a rounded box (negative inside it).
double inner_box_sd(const RoundedBox& b, std::span<const double> x) {
  double outside2 = 0.0;
  double max_excess = -kInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double excess = std::abs(x[i] - b.center[i]) - (b.half_widths[i] - b.corner_radius);
    max_excess = std::max(max_excess, excess);
    if (excess > 0.0) outside2 += excess * excess;
  }
  if (max_excess > 0.0) return std::sqrt(outside2);
  return max_excess;
}

Point inner_box_projection(const RoundedBox& b, std::span<const double> x) {
  Point p(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = b.half_widths[i] - b.corner_radius;
    p[i] = std::clamp(x[i], b.center[i] - h, b.center[i] + h);
  }
  return p;
}

}  // namespace

Domain Domain::full_space(std::size_t dim) {
  if (dim < 1) throw ArgumentError("dimension must be at least 1");
  return Domain(FullSpace{dim}, dim);
}

Domain Domain::half_space(std::size_t dim, std::size_t axis, double offset) {
  if (dim < 1) throw ArgumentError("dimension must be at least 1");
  if (axis >= dim) throw ArgumentError("half-space normal axis out of range");
  return Domain(HalfSpace{dim, axis, offset}, dim);
}

Domain Domain::ball(Point center, double radius) {
  if (center.empty()) throw ArgumentError("ball centre must have dimension >= 1");
  if (!(radius > 0.0)) throw ArgumentError("ball radius must be positive");
  const std::size_t d = center.size();
  return Domain(Ball{std::move(center), radius}, d);
}

Domain Domain::annulus(Point center, double r_in, double r_out) {
  if (center.size() < 2) throw ArgumentError("annulus requires dimension >= 2");
  if (!(r_in > 0.0 && r_out > r_in)) throw ArgumentError("annulus requires 0 < r_in < r_out");
  const std::size_t d = center.size();
  return Domain(Annulus{std::move(center), r_in, r_out}, d);
}

Domain Domain::rounded_box(Point center, Point half_widths, double corner_radius) {
  if (center.empty() || center.size() != half_widths.size()) {
    throw ArgumentError("rounded box centre and half-widths must have equal dimension");
  }
  if (!(corner_radius > 0.0)) throw ArgumentError("corner radius must be positive");
  for (double h : half_widths) {
    if (!(h >= corner_radius)) throw ArgumentError("half-widths must be >= corner radius");
  }
  const std::size_t d = center.size();
  return Domain(RoundedBox{std::move(center), std::move(half_widths), corner_radius}, d);
}

std::string Domain::shape_name() const {
  struct Namer {
    std::string operator()(const FullSpace&) const { return "full_space"; }
    std::string operator()(const HalfSpace&) const { return "half_space"; }
    std::string operator()(const Ball&) const { return "ball"; }
    std::string operator()(const Annulus&) const { return "annulus"; }
    std::string operator()(const RoundedBox&) const { return "axis_box_rounded"; }
  };
  return std::visit(Namer{}, shape_);
}

bool Domain::bounded() const {
  return !std::holds_alternative<FullSpace>(shape_) && !std::holds_alternative<HalfSpace>(shape_);
}

double Domain::depth(std::span<const double> x) const {
  struct Depth {
    std::span<const double> x;
    double operator()(const FullSpace&) const { return kInf; }
    double operator()(const HalfSpace& h) const { return x[h.axis] - h.offset; }
    double operator()(const Ball& b) const { return b.radius - dist(x, b.center); }
    double operator()(const Annulus& a) const {
      const double r = dist(x, a.center);
      return std::min(r - a.r_in, a.r_out - r);
    }
    double operator()(const RoundedBox& b) const {
      return b.corner_radius - inner_box_sd(b, x);
    }
  };
  return std::visit(Depth{x}, shape_);
}

BoundaryDistance Domain::dist_to_boundary(std::span<const double> x) const {
  check_dim(*this, x, "dist_to_boundary");
  const double v = depth(x);
  if (v > 0.0) return {v, true};
  return {0.0, false};
}

C11Chars Domain::c11_chars() const {
  struct Chars {
    std::size_t d;
    C11Chars operator()(const FullSpace&) const {
      throw NoBoundaryError("full space has no boundary and no C^{1,1} characteristics");
    }
    C11Chars operator()(const HalfSpace&) const { return {kInf, 0.0, kInf, kInf, kInf}; }
    // On B(Q, s) the boundary graph of a sphere of radius s only involves tangential
    // offsets below (sqrt 3 / 2) s, where its gradient is <= sqrt 3 and its Hessian is
    // <= 8 / s.
    static double sphere_lambda(double s) { return std::max(std::sqrt(3.0), 8.0 / s); }
    C11Chars operator()(const Ball& b) const {
      const double lambda = d == 1 ? 0.0 : sphere_lambda(b.radius);
      return {b.radius, lambda, 2.0 * b.radius, b.radius, b.radius};
    }
    C11Chars operator()(const Annulus& a) const {
      const double ball = std::min(a.r_in, 0.5 * (a.r_out - a.r_in));
      return {ball, sphere_lambda(a.r_in), 2.0 * a.r_out, ball, ball};
    }
    C11Chars operator()(const RoundedBox& b) const {
      double min_half = kInf;
      double diag2 = 0.0;
      for (double h : b.half_widths) {
        min_half = std::min(min_half, h);
        diag2 += h * h;
      }
      const double ball = std::min(b.corner_radius, min_half);
      const double lambda = d == 1 ? 0.0 : sphere_lambda(b.corner_radius);
      return {ball, lambda, 2.0 * std::sqrt(diag2), ball, ball};
    }
  };
  return std::visit(Chars{dim_}, shape_);
}

Point Domain::project_to_boundary(std::span<const double> x) const {
  check_dim(*this, x, "project_to_boundary");
  struct Project {
    std::span<const double> x;
    Point operator()(const FullSpace&) const { throw NoBoundaryError("full space has no boundary"); }
    Point operator()(const HalfSpace& h) const {
      Point p(x.begin(), x.end());
      p[h.axis] = h.offset;
      return p;
    }
    static Point radial(std::span<const double> x, const Point& c, double s) {
      Point u(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] - c[i];
      const double n = norm(u);
      if (n == 0.0) throw ArgumentError("projection from the centre is not unique");
      for (std::size_t i = 0; i < x.size(); ++i) u[i] = c[i] + s * u[i] / n;
      return u;
    }
    Point operator()(const Ball& b) const { return radial(x, b.center, b.radius); }
    Point operator()(const Annulus& a) const {
      const double r = dist(x, a.center);
      return radial(x, a.center, (r - a.r_in < a.r_out - r) ? a.r_in : a.r_out);
    }
    Point operator()(const RoundedBox& b) const {
      const double sd = inner_box_sd(b, x);
      if (sd > 0.0) {
        const Point p = inner_box_projection(b, x);
        Point q(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) q[i] = p[i] + b.corner_radius * (x[i] - p[i]) / sd;
        return q;
      }
      // Inside the inner box: push along the axis with the least slack.
      std::size_t best = 0;
      double slack = kInf;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = b.half_widths[i] - std::abs(x[i] - b.center[i]);
        if (s < slack) {
          slack = s;
          best = i;
        }
      }
      Point q(x.begin(), x.end());
      q[best] = b.center[best] + (x[best] >= b.center[best] ? 1.0 : -1.0) * b.half_widths[best];
      return q;
    }
  };
  return std::visit(Project{x}, shape_);
}

Point Domain::inward_normal(std::span<const double> q) const {
  check_dim(*this, q, "inward_normal");
  struct Normal {
    std::span<const double> q;
    Point operator()(const FullSpace&) const { throw NoBoundaryError("full space has no boundary"); }
    Point operator()(const HalfSpace& h) const {
      Point n(q.size(), 0.0);
      n[h.axis] = 1.0;
      return n;
    }
    static Point towards(std::span<const double> from, std::span<const double> to, double sign) {
      Point n(from.size());
      for (std::size_t i = 0; i < from.size(); ++i) n[i] = sign * (to[i] - from[i]);
      const double len = norm(n);
      if (len == 0.0) throw ArgumentError("normal undefined at the centre");
      for (double& c : n) c /= len;
      return n;
    }
    Point operator()(const Ball& b) const { return towards(q, b.center, 1.0); }
    Point operator()(const Annulus& a) const {
      const double r = dist(q, a.center);
      const bool inner = std::abs(r - a.r_in) < std::abs(r - a.r_out);
      return towards(q, a.center, inner ? -1.0 : 1.0);
    }
    Point operator()(const RoundedBox& b) const {
      const Point p = inner_box_projection(b, q);
      return towards(q, p, 1.0);
    }
  };
  return std::visit(Normal{q}, shape_);
}

CornerPath corner_path(std::span<const double> x, std::span<const double> y,
                       std::span<const std::size_t> order) {
  const std::size_t d = x.size();
  if (y.size() != d) throw ArgumentError("corner_path: x and y differ in dimension");
  if (order.size() != d) throw ArgumentError("corner_path: order must list every axis once");
  std::vector<bool> seen(d, false);
  for (std::size_t i : order) {
    if (i >= d || seen[i]) throw ArgumentError("corner_path: order is not a permutation");
    seen[i] = true;
  }
  CornerPath path;
  path.order.assign(order.begin(), order.end());
  path.points.reserve(d + 1);
  Point cur(x.begin(), x.end());
  path.points.push_back(cur);
  for (std::size_t k = 0; k < d; ++k) {
    cur[order[k]] = y[order[k]];
    path.points.push_back(cur);
  }
  return path;
}

DGammaReport check_d_gamma(const Domain& d, double gamma, std::span<const PointPair> pairs) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ArgumentError("gamma must lie in (0, 1]");
  const std::size_t dim = d.dim();
  if (dim > 6) {
    throw CombinatorialLimitError("check_d_gamma enumerates d! orders; d = " + std::to_string(dim) +
                                  " > 6, sample orders instead");
  }
  DGammaReport report;
  report.witnesses.resize(pairs.size());
  report.margins.resize(pairs.size(), 0.0);

  std::vector<std::size_t> order(dim);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [x, y] = pairs[p];
    check_dim(d, x, "check_d_gamma");
    check_dim(d, y, "check_d_gamma");
    const double dx = d.depth(x);
    const double dy = d.depth(y);
    if (!(dx > 0.0 && dy > 0.0)) throw DomainError("check_d_gamma: pair " + std::to_string(p) + " is not inside D");
    const double r = std::min(dx, dy);
    ++report.pairs_checked;

    double best = -kInf;
    std::iota(order.begin(), order.end(), std::size_t{0});
    do {
      const CornerPath path = corner_path(x, y, order);
      double margin = kInf;
      for (std::size_t k = 1; k <= dim; ++k) {
        const double depth = d.depth(path.points[k]);
        margin = std::min(margin, std::isinf(r) ? (depth > 0.0 ? kInf : -kInf) : depth / (gamma * r));
      }
      if (margin > best) {
        best = margin;
        if (margin >= 1.0) report.witnesses[p] = order;
      }
    } while (std::next_permutation(order.begin(), order.end()));

    report.margins[p] = best;
    if (!(best >= 1.0)) {
      report.witnesses[p].clear();
      if (report.passed) {
        report.passed = false;
        report.failing_pair = p;
      }
    }
  }
  return report;
}

ChartCoords chart_coords(const Domain& d, std::span<const double> q, std::span<const double> y) {
  check_dim(d, q, "chart");
  check_dim(d, y, "chart");
  const C11Chars chars = d.c11_chars();
  if (std::abs(d.depth(q)) > 1e-9 * std::max(1.0, chars.diam == kInf ? 1.0 : chars.diam)) {
    throw ArgumentError("chart base point is not on the boundary");
  }
  if (!(dist(q, y) < chars.R)) throw RangeError("point lies outside the boundary chart at Q");

  const Point n = d.inward_normal(q);
  ChartCoords c;
  c.tangential.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) c.height += (y[i] - q[i]) * n[i];
  for (std::size_t i = 0; i < y.size(); ++i) c.tangential[i] = (y[i] - q[i]) - c.height * n[i];
  c.tangential_norm = norm(c.tangential);

  struct GraphHeight {
    std::span<const double> q;
    const Point& n;
    const ChartCoords& c;
    double R;
    const Domain& dom;
    double operator()(const FullSpace&) const { return 0.0; }
    double operator()(const HalfSpace&) const { return 0.0; }
    double operator()(const Ball& b) const { return sphere_chart(b.radius, c.tangential_norm, true); }
    double operator()(const Annulus& a) const {
      const bool inner = std::abs(dist(q, a.center) - a.r_in) < std::abs(dist(q, a.center) - a.r_out);
      return inner ? sphere_chart(a.r_in, c.tangential_norm, false)
                   : sphere_chart(a.r_out, c.tangential_norm, true);
    }
    double operator()(const RoundedBox&) const {
      // Convex: the tangent plane supports D, so the vertical line over the tangential
      // offset enters D between heights 0 and R.
      Point p(q.size());
      auto at = [&](double s) {
        for (std::size_t i = 0; i < q.size(); ++i) p[i] = q[i] + c.tangential[i] + s * n[i];
        return dom.depth(p);
      };
      double lo = 0.0;
      double hi = R;
      if (!(at(hi) > 0.0)) throw RangeError("point outside the boundary chart of the rounded box");
      for (int it = 0; it < 200 && hi - lo > 1e-15 * R; ++it) {
        const double mid = 0.5 * (lo + hi);
        (at(mid) > 0.0 ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
  };
  c.rho = c.height - std::visit(GraphHeight{q, n, c, chars.R, d}, d.shape());
  return c;
}

double rho_q(const Domain& d, std::span<const double> q, std::span<const double> y) {
  return chart_coords(d, q, y).rho;
}

bool in_boundary_box(const Domain& d, std::span<const double> q, double r1, double r2,
                     std::span<const double> y) {
  const ChartCoords c = chart_coords(d, q, y);
  return c.tangential_norm < r1 && c.rho > 0.0 && c.rho < r2;
}

BoundaryBoxRegion::BoundaryBoxRegion(const Domain& d, Point q, double r1, double r2)
    : domain_(&d), q_(std::move(q)), r1_(r1), r2_(r2) {
  const C11Chars chars = d.c11_chars();
  if (!(r1 > 0.0 && r2 > 0.0)) throw ArgumentError("boundary box needs r1, r2 > 0");
  if (!(std::hypot(r1, 2.0 * r2) < chars.R)) {
    throw ArgumentError("boundary box D_Q(r1, r2) does not fit in the chart radius");
  }
  slope_ = std::sqrt(1.0 + chars.lambda * chars.lambda);
  (void)chart_coords(d, q_, q_);
}

double BoundaryBoxRegion::depth(std::span<const double> y) const {
  if (!(dist(q_, y) < std::hypot(r1_, 2.0 * r2_))) return -1.0;
  const ChartCoords c = chart_coords(*domain_, q_, y);
  return std::min({r1_ - c.tangential_norm, c.rho / slope_, (r2_ - c.rho) / slope_});
}

}  // namespace aniso

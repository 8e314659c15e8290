#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace aniso {

using Point = std::vector<double>;

struct FullSpace {
  std::size_t dim = 1;
  bool operator==(const FullSpace&) const = default;
};

// {x : x[axis] > offset}
struct HalfSpace {
  std::size_t dim = 1;
  std::size_t axis = 0;
  double offset = 0.0;
  bool operator==(const HalfSpace&) const = default;
};

struct Ball {
  Point center;
  double radius = 1.0;
  bool operator==(const Ball&) const = default;
};

struct Annulus {
  Point center;
  double r_in = 1.0;
  double r_out = 2.0;
  bool operator==(const Annulus&) const = default;
};

// Axis-aligned box with half-widths `half_widths` whose edges and corners are rounded
// with radius `corner_radius`: the corner_radius-neighbourhood of the inner box with
// half-widths (half_widths - corner_radius).
struct RoundedBox {
  Point center;
  Point half_widths;
  double corner_radius = 0.1;
  bool operator==(const RoundedBox&) const = default;
};

struct BoundaryDistance {
  double value = 0.0;
  bool inside = false;
};

// C^{1,1} characteristics. `ball_radius` is the interior/exterior ball radius, and
// `chart_radius` the radius on which the boundary is the graph of a function with
// gradient and gradient-Lipschitz bound `lambda`. R = min of the two.
struct C11Chars {
  double R = 0.0;
  double lambda = 0.0;
  double diam = 0.0;
  double ball_radius = 0.0;
  double chart_radius = 0.0;
};

class Domain {
 public:
  using Shape = std::variant<FullSpace, HalfSpace, Ball, Annulus, RoundedBox>;

  static Domain full_space(std::size_t dim);
  static Domain half_space(std::size_t dim, std::size_t axis, double offset = 0.0);
  static Domain ball(Point center, double radius);
  static Domain annulus(Point center, double r_in, double r_out);
  static Domain rounded_box(Point center, Point half_widths, double corner_radius);

  const Shape& shape() const { return shape_; }
  std::string shape_name() const;
  std::size_t dim() const { return dim_; }
  bool bounded() const;

  // Signed distance to the boundary, positive inside; +inf for the full space.
  double depth(std::span<const double> x) const;
  bool contains(std::span<const double> x) const { return depth(x) > 0.0; }

  BoundaryDistance dist_to_boundary(std::span<const double> x) const;
  C11Chars c11_chars() const;

  // Inward unit normal at a boundary point.
  Point inward_normal(std::span<const double> q) const;
  // Nearest boundary point to x (x must not be the centre of a ball or annulus).
  Point project_to_boundary(std::span<const double> x) const;

  bool operator==(const Domain& other) const = default;

 private:
  Domain(Shape s, std::size_t dim) : shape_(std::move(s)), dim_(dim) {}
  Shape shape_;
  std::size_t dim_ = 1;
};

// Points xi_(0..d) tracing from x to y one coordinate at a time, in the order given by
// `order` (a permutation of 0..d-1): xi_(k) equals y on order[0..k-1] and x elsewhere.
struct CornerPath {
  std::vector<Point> points;
  std::vector<std::size_t> order;
};

CornerPath corner_path(std::span<const double> x, std::span<const double> y,
                       std::span<const std::size_t> order);

struct PointPair {
  Point x;
  Point y;
};

struct DGammaReport {
  bool passed = true;
  std::size_t pairs_checked = 0;
  std::optional<std::size_t> failing_pair;
  // Witness order per pair (empty for a pair without witness).
  std::vector<std::vector<std::size_t>> witnesses;
  // Best margin per pair: max over orders of min_k depth(xi_(k)) / (gamma r).
  std::vector<double> margins;
  // The check samples pairs; it certifies nothing beyond them.
  static constexpr const char* label = "empirical";
};

// Searches every coordinate order for each pair (d <= 6) for one whose corners keep
// the ball of radius gamma * min(depth(x), depth(y)) inside D.
DGammaReport check_d_gamma(const Domain& d, double gamma, std::span<const PointPair> pairs);

// Boundary chart at a boundary point q: tangential offset and height along the
// inward normal. rho_q(y) = height - chart(|tangential|).
struct ChartCoords {
  Point tangential;
  double tangential_norm = 0.0;
  double height = 0.0;
  double rho = 0.0;
};

ChartCoords chart_coords(const Domain& d, std::span<const double> q, std::span<const double> y);
double rho_q(const Domain& d, std::span<const double> q, std::span<const double> y);

// y in D_Q(r1, r2) = {y in D : |y~| < r1, 0 < rho_Q(y) < r2}.
bool in_boundary_box(const Domain& d, std::span<const double> q, double r1, double r2,
                     std::span<const double> y);

// D_Q(r1, r2) as a region for killed simulation: depth() is a lower bound on the
// distance to its boundary and is positive exactly on the region.
class BoundaryBoxRegion {
 public:
  BoundaryBoxRegion(const Domain& d, Point q, double r1, double r2);
  std::size_t dim() const { return domain_->dim(); }
  double depth(std::span<const double> y) const;
  bool contains(std::span<const double> y) const { return depth(y) > 0.0; }

 private:
  const Domain* domain_;
  Point q_;
  double r1_;
  double r2_;
  double slope_;
};

}  // namespace aniso

#include "foldsim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace foldsim {

namespace {

// Angle difference wrapped to (-pi, pi]; selects the minor arc sweep.
double wrap_minor(double a) {
  double d = std::remainder(a, 2.0 * M_PI);
  if (d <= -M_PI) d += 2.0 * M_PI;
  return d;
}

}  // namespace

FoldCurve make_parabolic_arc(const Vec2& p0, const Vec2& p1,
                             const Vec2& apex) {
  const Vec2 u = p1 - p0, v = apex - p0;
  const double scale = std::max(u.norm(), v.norm());
  const double cross = u.x() * v.y() - u.y() * v.x();
  if (scale <= 0.0 || std::abs(cross) <= 1e-12 * scale * scale)
    throw DegenerateCurve("parabolic arc: endpoints and apex are collinear");
  FoldCurve c;
  c.kind_ = CurveKind::Parabolic;
  c.pts_ = {p0, apex, p1};
  c.p0_ = p0;
  c.p1_ = p1;
  return c;
}

FoldCurve make_circular_arc(const Vec2& p0, const Vec2& p1,
                            const Vec2& center) {
  const double r0 = (p0 - center).norm(), r1 = (p1 - center).norm();
  const double rmax = std::max(r0, r1);
  if (rmax <= 0.0)
    throw DegenerateCurve("circular arc: endpoint coincides with center");
  if (std::abs(r0 - r1) > 1e-9 * rmax)
    throw DegenerateCurve("circular arc: endpoint radii differ");
  FoldCurve c;
  c.kind_ = CurveKind::CircularArc;
  c.pts_ = {p0, p1, center};
  c.p0_ = p0;
  c.p1_ = p1;
  c.center_ = center;
  c.radius_ = 0.5 * (r0 + r1);
  c.theta0_ = std::atan2(p0.y() - center.y(), p0.x() - center.x());
  const double theta1 = std::atan2(p1.y() - center.y(), p1.x() - center.x());
  c.dtheta_ = wrap_minor(theta1 - c.theta0_);
  if (c.dtheta_ == 0.0)
    throw DegenerateCurve("circular arc: coincident endpoints");
  return c;
}

FoldCurve make_cubic_bezier(const Vec2& p0, const Vec2& c1, const Vec2& c2,
                            const Vec2& p3) {
  if ((p3 - p0).norm() == 0.0)
    throw DegenerateCurve("cubic arc: coincident endpoints");
  FoldCurve c;
  c.kind_ = CurveKind::CubicBezier;
  c.pts_ = {p0, c1, c2, p3};
  c.p0_ = p0;
  c.p1_ = p3;
  return c;
}

FoldCurve make_polyline(const std::vector<Vec2>& points) {
  if (points.size() < 2)
    throw DegenerateCurve("polyline: needs at least two points");
  FoldCurve c;
  c.kind_ = CurveKind::Polyline;
  c.pts_ = points;
  c.cum_.resize(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double seg = (points[i] - points[i - 1]).norm();
    if (seg == 0.0)
      throw DegenerateCurve("polyline: repeated consecutive point");
    c.cum_[i] = c.cum_[i - 1] + seg;
  }
  c.length_ = c.cum_.back();
  c.p0_ = points.front();
  c.p1_ = points.back();
  return c;
}

Vec2 FoldCurve::eval(double t) const {
  if (t == 0.0) return p0_;
  if (t == 1.0) return p1_;
  switch (kind_) {
    case CurveKind::Parabolic: {
      // Quadratic Bezier whose middle control point puts eval(1/2) on the apex.
      const Vec2 b1 = 2.0 * pts_[1] - 0.5 * (pts_[0] + pts_[2]);
      const double s = 1.0 - t;
      return s * s * pts_[0] + 2.0 * s * t * b1 + t * t * pts_[2];
    }
    case CurveKind::CircularArc: {
      const double th = theta0_ + t * dtheta_;
      return center_ + radius_ * Vec2(std::cos(th), std::sin(th));
    }
    case CurveKind::CubicBezier: {
      const double s = 1.0 - t;
      return s * s * s * pts_[0] + 3.0 * s * s * t * pts_[1] +
             3.0 * s * t * t * pts_[2] + t * t * t * pts_[3];
    }
    case CurveKind::Polyline: {
      const double s = std::clamp(t, 0.0, 1.0) * length_;
      auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
      std::size_t i = std::min<std::size_t>(it - cum_.begin(), cum_.size() - 1);
      if (i == 0) i = 1;
      const double seg = cum_[i] - cum_[i - 1];
      const double u = (s - cum_[i - 1]) / seg;
      return (1.0 - u) * pts_[i - 1] + u * pts_[i];
    }
  }
  return Vec2::Zero();
}

Vec2 FoldCurve::derivative(double t) const {
  switch (kind_) {
    case CurveKind::Parabolic: {
      const Vec2 b1 = 2.0 * pts_[1] - 0.5 * (pts_[0] + pts_[2]);
      return 2.0 * (1.0 - t) * (b1 - pts_[0]) + 2.0 * t * (pts_[2] - b1);
    }
    case CurveKind::CircularArc: {
      const double th = theta0_ + t * dtheta_;
      return radius_ * dtheta_ * Vec2(-std::sin(th), std::cos(th));
    }
    case CurveKind::CubicBezier: {
      const double s = 1.0 - t;
      return 3.0 * s * s * (pts_[1] - pts_[0]) +
             6.0 * s * t * (pts_[2] - pts_[1]) +
             3.0 * t * t * (pts_[3] - pts_[2]);
    }
    case CurveKind::Polyline: {
      const double s = std::clamp(t, 0.0, 1.0) * length_;
      auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
      std::size_t i = std::min<std::size_t>(it - cum_.begin(), cum_.size() - 1);
      if (i == 0) i = 1;
      const double seg = cum_[i] - cum_[i - 1];
      // Chord-length parametrization: constant speed equal to total length.
      return (pts_[i] - pts_[i - 1]) * (length_ / seg);
    }
  }
  return Vec2::Zero();
}

Vec2 FoldCurve::second_derivative(double t) const {
  switch (kind_) {
    case CurveKind::Parabolic: {
      const Vec2 b1 = 2.0 * pts_[1] - 0.5 * (pts_[0] + pts_[2]);
      return 2.0 * (pts_[2] - 2.0 * b1 + pts_[0]);
    }
    case CurveKind::CircularArc: {
      const double th = theta0_ + t * dtheta_;
      return -radius_ * dtheta_ * dtheta_ * Vec2(std::cos(th), std::sin(th));
    }
    case CurveKind::CubicBezier: {
      const double s = 1.0 - t;
      return 6.0 * s * (pts_[2] - 2.0 * pts_[1] + pts_[0]) +
             6.0 * t * (pts_[3] - 2.0 * pts_[2] + pts_[1]);
    }
    case CurveKind::Polyline:
      return Vec2::Zero();
  }
  return Vec2::Zero();
}

CurveProjection FoldCurve::closest_point_in_range(const Vec2& p, double tmin,
                                                  double tmax) const {
  tmin = std::clamp(tmin, 0.0, 1.0);
  tmax = std::clamp(tmax, 0.0, 1.0);
  if (tmax < tmin) std::swap(tmin, tmax);

  double bt = tmin;
  Vec2 bq = eval(tmin);
  double bd2 = (bq - p).squaredNorm();
  const auto consider = [&](double t) {
    const Vec2 q = eval(t);
    const double d2 = (q - p).squaredNorm();
    if (d2 < bd2) {  // strict: distance ties keep the smaller parameter
      bd2 = d2;
      bt = t;
      bq = q;
    }
  };

  if (kind_ == CurveKind::Polyline) {
    // Exact projection segment by segment; t is the arclength fraction.
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      const double t0 = cum_[i - 1] / length_, t1 = cum_[i] / length_;
      if (t1 < tmin || t0 > tmax) continue;
      const Vec2 a = pts_[i - 1], d = pts_[i] - a;
      const double u = (p - a).dot(d) / d.squaredNorm();
      const double t = std::clamp(t0 + u * (t1 - t0), std::max(t0, tmin),
                                  std::min(t1, tmax));
      consider(t);
    }
    return {bt, bq, std::sqrt(bd2)};
  }

  // Scan, then refine the bracket around the best sample: golden-section
  // for robustness, a short guarded Newton pass for the last digits.
  constexpr int kScan = 128;
  const double step = (tmax - tmin) / kScan;
  for (int i = 1; i <= kScan; ++i) consider(tmin + step * i);
  if (step > 0.0) {
    double lo = std::max(tmin, bt - step), hi = std::min(tmax, bt + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = (eval(c) - p).squaredNorm(), fd = (eval(d) - p).squaredNorm();
    for (int it = 0; it < 90 && hi - lo > 1e-16; ++it) {
      if (fc < fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = (eval(c) - p).squaredNorm();
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = (eval(d) - p).squaredNorm();
      }
    }
    consider(0.5 * (lo + hi));
    // Newton on the stationarity residual resolves the minimizer far below
    // the rounding floor of squared-distance comparisons; accept its fixed
    // point unless it measurably worsens the distance.
    double t = bt;
    for (int it = 0; it < 8; ++it) {
      const Vec2 q = eval(t);
      const Vec2 dq = derivative(t);
      const double g = (q - p).dot(dq);
      const double gp = dq.squaredNorm() + (q - p).dot(second_derivative(t));
      if (std::abs(gp) < 1e-30) break;
      const double tn = std::clamp(t - g / gp, tmin, tmax);
      const bool done = std::abs(tn - t) < 1e-17;
      t = tn;
      if (done) break;
    }
    const Vec2 qn = eval(t);
    const double d2n = (qn - p).squaredNorm();
    if (d2n <= bd2 * (1.0 + 1e-12)) {
      bt = t;
      bq = qn;
      bd2 = d2n;
    }
  }
  return {bt, bq, std::sqrt(bd2)};
}

CurveProjection FoldCurve::closest_point(const Vec2& p) const {
  return closest_point_in_range(p, 0.0, 1.0);
}

}  // namespace foldsim

#include <cmath>
#include <numbers>
#include <vector>

#include "pfz/errors.hpp"
#include "pfz/zeros.hpp"

namespace pfz
{
  Contour Contour::circle(Complex center, double radius)
  {
    if (!(radius > 0) || !is_finite(center))
      throw ArgumentError("circle contour needs a finite center and positive radius");
    Contour c;
    c.is_circle_ = true;
    c.center_ = center;
    c.radius_ = radius;
    return c;
  }

  Contour Contour::polygon(std::vector<Complex> vertices)
  {
    if (vertices.size() < 3)
      throw ArgumentError("polygon contour needs at least 3 vertices");
    Contour c;
    c.vertices_ = std::move(vertices);
    return c;
  }

  Contour Contour::rectangle(const Rect& r)
  {
    if (!r.valid())
      throw ArgumentError("rectangle contour needs lo < hi on both axes");
    return polygon({{r.re_lo, r.im_lo}, {r.re_hi, r.im_lo}, {r.re_hi, r.im_hi}, {r.re_lo, r.im_hi}});
  }

  std::size_t Contour::pieces() const { return is_circle_ ? 4 : vertices_.size(); }

  Complex Contour::point(std::size_t piece, double s) const
  {
    if (is_circle_)
    {
      const double ang = 0.5 * std::numbers::pi * (static_cast<double>(piece) + s);
      return center_ + radius_ * Complex(std::cos(ang), std::sin(ang));
    }
    const Complex a = vertices_[piece];
    const Complex b = vertices_[(piece + 1) % vertices_.size()];
    // endpoints exactly, so neighbouring pieces share samples
    if (s == 1.0)
      return b;
    return a + s * (b - a);
  }

  double Contour::piece_length(std::size_t piece) const
  {
    if (is_circle_)
      return 0.5 * std::numbers::pi * radius_;
    return std::abs(vertices_[(piece + 1) % vertices_.size()] - vertices_[piece]);
  }

  Rect Contour::bounding_box() const
  {
    if (is_circle_)
      return Rect::around(center_, radius_);
    Rect r{vertices_[0].real(), vertices_[0].real(), vertices_[0].imag(), vertices_[0].imag()};
    for (const auto& v : vertices_)
    {
      r.re_lo = std::min(r.re_lo, v.real());
      r.re_hi = std::max(r.re_hi, v.real());
      r.im_lo = std::min(r.im_lo, v.imag());
      r.im_hi = std::max(r.im_hi, v.imag());
    }
    return r;
  }

  namespace
  {
    struct Node
    {
      double s;
      Complex z;
      ScaledValue v;
    };

    ScaledValue checked(const AnalyticFn& f, Complex z)
    {
      ScaledValue v = f(z);
      if (!is_finite(v.f) || v.f == Complex(0))
        throw ContourDegeneracy("function vanishes or is not finite on the contour");
      return v;
    }

    // phase change over [a,b] with recursive refinement
    double piece_arg(const AnalyticFn& f, const Contour& c, std::size_t piece, const Node& a,
                     const Node& b, int depth, int max_depth)
    {
      const double step = std::arg(b.v.f / a.v.f);
      const Complex dz = b.z - a.z;
      bool ok = std::abs(step) < 0.5 * std::numbers::pi;
      if (ok && is_finite(a.v.df) && is_finite(b.v.df))
      {
        // trapezoid prediction of the phase increment from the log-derivative
        const double pred = (0.5 * (a.v.df / a.v.f + b.v.df / b.v.f) * dz).imag();
        ok = std::isfinite(pred) && std::abs(pred - step) < 0.25 * std::numbers::pi;
      }
      if (ok)
        return step;
      if (depth >= max_depth)
        throw ContourDegeneracy("winding refinement exhausted: a zero lies on or near the contour");
      const double sm = 0.5 * (a.s + b.s);
      const Complex zm = c.point(piece, sm);
      const Node m{sm, zm, checked(f, zm)};
      return piece_arg(f, c, piece, a, m, depth + 1, max_depth) +
             piece_arg(f, c, piece, m, b, depth + 1, max_depth);
    }
  }

  int winding_number(const AnalyticFn& f, const Contour& contour, const WindingOptions& opts)
  {
    double total = 0;
    for (std::size_t p = 0; p < contour.pieces(); p++)
    {
      const double len = contour.piece_length(p);
      const double want = len * std::max(opts.rate_hint, 0.0) / (0.25 * std::numbers::pi);
      const std::size_t n = static_cast<std::size_t>(std::clamp(std::ceil(want), 4.0, 1e6));
      Node prev{0.0, contour.point(p, 0.0), checked(f, contour.point(p, 0.0))};
      for (std::size_t k = 1; k <= n; k++)
      {
        const double s = static_cast<double>(k) / static_cast<double>(n);
        const Complex z = contour.point(p, s);
        Node cur{s, z, checked(f, z)};
        total += piece_arg(f, contour, p, prev, cur, 0, opts.max_depth);
        prev = cur;
      }
    }
    const double turns = total / (2 * std::numbers::pi);
    const double r = std::round(turns);
    if (std::abs(turns - r) > 0.1)
      throw ContourDegeneracy("accumulated phase is not a multiple of 2 pi");
    return static_cast<int>(r);
  }
}

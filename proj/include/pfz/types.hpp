#ifndef PFZ_TYPES_HPP
#define PFZ_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace pfz
{
  using Complex = std::complex<double>;

  //! sorted list of phase indices (0-based)
  using PhaseSet = std::vector<std::size_t>;

  //! execution policy for the data-parallel kernels; serial is the reference path
  enum class Exec { serial, parallel };

  //! axis-aligned rectangle in the complex plane
  struct Rect
  {
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    double diameter() const { return std::hypot(width(), height()); }
    Complex center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
    bool valid() const
    {
      return std::isfinite(re_lo) && std::isfinite(re_hi) && std::isfinite(im_lo) &&
             std::isfinite(im_hi) && re_hi > re_lo && im_hi > im_lo;
    }
    bool contains(Complex z, double slack = 0.0) const
    {
      return z.real() >= re_lo - slack && z.real() <= re_hi + slack && z.imag() >= im_lo - slack &&
             z.imag() <= im_hi + slack;
    }
    //! true if the closed disc of radius r around c lies inside
    bool contains_disc(Complex c, double r) const
    {
      return c.real() - r >= re_lo && c.real() + r <= re_hi && c.imag() - r >= im_lo &&
             c.imag() + r <= im_hi;
    }
    static Rect around(Complex c, double half)
    {
      return {c.real() - half, c.real() + half, c.imag() - half, c.imag() + half};
    }
  };

  inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

  inline bool set_contains(const PhaseSet& s, std::size_t m)
  {
    return std::binary_search(s.begin(), s.end(), m);
  }

  inline bool is_subset(const PhaseSet& a, const PhaseSet& b)
  {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  }
}

#endif // PFZ_TYPES_HPP

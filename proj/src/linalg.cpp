#include "pfz/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "pfz/errors.hpp"

namespace pfz::linalg
{
  CMatrix CMatrix::adjoint() const
  {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; i++)
      for (std::size_t j = 0; j < cols_; j++)
        out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  CMatrix CMatrix::operator*(const CMatrix& b) const
  {
    if (cols_ != b.rows_)
      throw ArgumentError("matrix dimensions do not agree");
    CMatrix out(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; i++)
      for (std::size_t k = 0; k < cols_; k++)
      {
        const Complex aik = (*this)(i, k);
        for (std::size_t j = 0; j < b.cols_; j++)
          out(i, j) += aik * b(k, j);
      }
    return out;
  }

  Complex determinant(CMatrix a)
  {
    const std::size_t n = a.rows();
    if (n != a.cols())
      throw ArgumentError("determinant of a non-square matrix");
    Complex det = 1;
    for (std::size_t k = 0; k < n; k++)
    {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; i++)
        if (std::abs(a(i, k)) > std::abs(a(p, k)))
          p = i;
      if (a(p, k) == Complex(0))
        return 0;
      if (p != k)
      {
        for (std::size_t j = 0; j < n; j++)
          std::swap(a(k, j), a(p, j));
        det = -det;
      }
      det *= a(k, k);
      for (std::size_t i = k + 1; i < n; i++)
      {
        const Complex f = a(i, k) / a(k, k);
        for (std::size_t j = k; j < n; j++)
          a(i, j) -= f * a(k, j);
      }
    }
    return det;
  }

  CMatrix inverse(CMatrix a)
  {
    const std::size_t n = a.rows();
    if (n != a.cols())
      throw ArgumentError("inverse of a non-square matrix");
    CMatrix inv(n, n);
    for (std::size_t i = 0; i < n; i++)
      inv(i, i) = 1;
    for (std::size_t k = 0; k < n; k++)
    {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; i++)
        if (std::abs(a(i, k)) > std::abs(a(p, k)))
          p = i;
      if (a(p, k) == Complex(0))
        throw SingularityError("matrix is singular");
      for (std::size_t j = 0; j < n; j++)
      {
        std::swap(a(k, j), a(p, j));
        std::swap(inv(k, j), inv(p, j));
      }
      const Complex piv = a(k, k);
      for (std::size_t j = 0; j < n; j++)
      {
        a(k, j) /= piv;
        inv(k, j) /= piv;
      }
      for (std::size_t i = 0; i < n; i++)
      {
        if (i == k)
          continue;
        const Complex f = a(i, k);
        if (f == Complex(0))
          continue;
        for (std::size_t j = 0; j < n; j++)
        {
          a(i, j) -= f * a(k, j);
          inv(i, j) -= f * inv(k, j);
        }
      }
    }
    return inv;
  }

  std::vector<double> hermitian_eigenvalues(CMatrix h, double tol, int max_sweeps)
  {
    const std::size_t n = h.rows();
    if (n != h.cols())
      throw ArgumentError("eigenvalues of a non-square matrix");
    auto off = [&] {
      double s = 0;
      for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = 0; j < n; j++)
          if (i != j)
            s += std::norm(h(i, j));
      return std::sqrt(s);
    };
    double scale = 0;
    for (std::size_t i = 0; i < n; i++)
      for (std::size_t j = 0; j < n; j++)
        scale += std::norm(h(i, j));
    scale = std::sqrt(scale);

    for (int sweep = 0; sweep < max_sweeps && off() > tol * scale; sweep++)
      for (std::size_t p = 0; p + 1 < n; p++)
        for (std::size_t q = p + 1; q < n; q++)
        {
          const Complex hpq = h(p, q);
          const double mag = std::abs(hpq);
          if (mag == 0)
            continue;
          // unitary rotation in the (p,q) plane that zeroes h(p,q)
          const Complex phase = hpq / mag;
          const double app = h(p, p).real(), aqq = h(q, q).real();
          const double theta = 0.5 * std::atan2(2 * mag, aqq - app);
          const double c = std::cos(theta), s = std::sin(theta);
          // columns: new_p = c*col_p - s*conj(phase)*col_q, new_q = s*phase*col_p + c*col_q
          for (std::size_t k = 0; k < n; k++)
          {
            const Complex hkp = h(k, p), hkq = h(k, q);
            h(k, p) = c * hkp - s * std::conj(phase) * hkq;
            h(k, q) = s * phase * hkp + c * hkq;
          }
          for (std::size_t k = 0; k < n; k++)
          {
            const Complex hpk = h(p, k), hqk = h(q, k);
            h(p, k) = c * hpk - s * phase * hqk;
            h(q, k) = s * std::conj(phase) * hpk + c * hqk;
          }
        }

    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; i++)
      ev[i] = h(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
  }

  std::vector<double> singular_values(const CMatrix& a)
  {
    std::vector<double> ev = hermitian_eigenvalues(a * a.adjoint());
    std::vector<double> sv;
    for (auto it = ev.rbegin(); it != ev.rend(); ++it)
      sv.push_back(std::sqrt(std::max(0.0, *it)));
    return sv;
  }

  double spectral_norm(const CMatrix& a)
  {
    const auto sv = singular_values(a);
    return sv.empty() ? 0.0 : sv.front();
  }
}

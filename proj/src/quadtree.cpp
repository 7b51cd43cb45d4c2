#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <omp.h>

#include "pfz/errors.hpp"
#include "pfz/zeros.hpp"

namespace pfz
{
  const char* to_string(ZeroMethod m)
  {
    switch (m)
    {
    case ZeroMethod::brute_force:
      return "brute_force";
    case ZeroMethod::two_phase_eq:
      return "two_phase_eq";
    case ZeroMethod::multipoint_eq:
      return "multipoint_eq";
    }
    return "?";
  }

  void ZeroSet::canonicalize()
  {
    std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) {
      return a.z.real() < b.z.real() || (a.z.real() == b.z.real() && a.z.imag() < b.z.imag());
    });
    std::vector<Zero> out;
    for (const auto& z : zeros)
    {
      // lexicographic order does not put near-equal points next to each other when the real
      // parts differ by less than the merge radius, so compare against all recent entries
      bool merged = false;
      for (auto it = out.rbegin(); it != out.rend() && z.z.real() - it->z.real() <= 1e-12; ++it)
        if (std::abs(it->z - z.z) <= 1e-12)
        {
          it->multiplicity = std::max(it->multiplicity, z.multiplicity);
          it->residual = std::min(it->residual, z.residual);
          merged = true;
          break;
        }
      if (!merged)
        out.push_back(z);
    }
    zeros = std::move(out);
  }

  int ZeroSet::total_multiplicity() const
  {
    int t = 0;
    for (const auto& z : zeros)
      t += z.multiplicity;
    return t;
  }

  ZeroSet ZeroSet::restricted(const Rect& rect) const
  {
    ZeroSet out = *this;
    out.region = rect;
    out.zeros.clear();
    for (const auto& z : zeros)
      if (rect.contains(z.z))
        out.zeros.push_back(z);
    return out;
  }

  namespace
  {
    // split fractions tried in turn; off-centre so that symmetric zero lines never fall on a
    // cell edge
    constexpr std::array<double, 8> split_offsets = {0.01234567, -0.0271828, 0.0314159, -0.0423607,
                                                     0.0577216,  -0.0693147, 0.0161803, -0.0141421};

    struct Cell
    {
      Rect rect;
      int winding = 0;
      int depth = 0;
    };

    struct CellResult
    {
      std::vector<Cell> children;
      std::optional<Zero> zero;
      std::optional<Rect> unresolved;
      std::string warning;
    };

    class Engine
    {
    public:
      Engine(const AnalyticFn& f, const QuadtreeOptions& opts) : f_(f), opts_(opts) {}

      int winding(const Rect& r) const
      {
        return winding_number(f_, Contour::rectangle(r), {opts_.rate_hint, 52});
      }

      std::optional<std::array<Cell, 4>> split(const Cell& c) const
      {
        for (std::size_t k = 0; k < split_offsets.size(); k++)
        {
          const double fx = 0.5 + split_offsets[k];
          const double fy = 0.5 + split_offsets[(k + 3) % split_offsets.size()];
          const double xm = c.rect.re_lo + fx * c.rect.width();
          const double ym = c.rect.im_lo + fy * c.rect.height();
          const std::array<Rect, 4> rects = {Rect{c.rect.re_lo, xm, c.rect.im_lo, ym},
                                             Rect{xm, c.rect.re_hi, c.rect.im_lo, ym},
                                             Rect{c.rect.re_lo, xm, ym, c.rect.im_hi},
                                             Rect{xm, c.rect.re_hi, ym, c.rect.im_hi}};
          std::array<Cell, 4> out;
          int sum = 0;
          bool ok = true;
          for (std::size_t q = 0; q < 4 && ok; q++)
          {
            try
            {
              out[q] = {rects[q], winding(rects[q]), c.depth + 1};
              ok = out[q].winding >= 0;
              sum += out[q].winding;
            }
            catch (const ContourDegeneracy&)
            {
              ok = false;
            }
          }
          if (ok && sum == c.winding)
            return out;
        }
        return std::nullopt;
      }

      Complex newton(Complex z, int mult) const
      {
        for (int it = 0; it < 60; it++)
        {
          const ScaledValue v = f_(z);
          if (v.f == Complex(0) || !is_finite(v.df) || v.df == Complex(0))
            break;
          const Complex step = static_cast<double>(mult) * v.f / v.df;
          if (!is_finite(step))
            break;
          z -= step;
          if (std::abs(step) <= 1e-15 * (1 + std::abs(z)))
            break;
        }
        return z;
      }

      int multiplicity(Complex z) const
      {
        double r = opts_.multiplicity_radius;
        for (int attempt = 0; attempt < 4; attempt++, r *= 0.7)
        {
          try
          {
            return winding_number(f_, Contour::circle(z, r), {opts_.rate_hint, 52});
          }
          catch (const ContourDegeneracy&)
          {
          }
        }
        return -1;
      }

      CellResult leaf(const Cell& c) const
      {
        CellResult res;
        const Complex z = newton(c.rect.center(), c.winding);
        const double slack = c.rect.diameter();
        const int mult = multiplicity(z);
        if (!is_finite(z) || !c.rect.contains(z, slack) || mult != c.winding)
        {
          res.unresolved = c.rect;
          res.warning = "cell with winding " + std::to_string(c.winding) +
                        " did not polish to a single zero of matching multiplicity";
          return res;
        }
        Zero zero;
        zero.z = z;
        zero.multiplicity = mult;
        zero.residual = std::abs(f_(z).f);
        zero.method = opts_.method;
        if (!(zero.residual <= opts_.residual_tol))
          res.warning = "zero polished to residual above tolerance";
        res.zero = zero;
        return res;
      }

      CellResult process(const Cell& c) const
      {
        if (c.winding == 0)
          return {};
        if (c.rect.diameter() < opts_.min_cell_diameter)
          return leaf(c);
        if (c.depth >= opts_.max_depth)
        {
          CellResult res;
          res.unresolved = c.rect;
          res.warning = "depth limit reached with winding " + std::to_string(c.winding);
          return res;
        }
        auto kids = split(c);
        if (!kids)
        {
          // no split gave a consistent partition; polish if the cell is already small
          if (c.rect.diameter() < 1e3 * opts_.min_cell_diameter)
            return leaf(c);
          CellResult res;
          res.unresolved = c.rect;
          res.warning = "no consistent subdivision (zero on every trial split line)";
          return res;
        }
        CellResult res;
        for (const auto& k : *kids)
          if (k.winding > 0)
            res.children.push_back(k);
        return res;
      }

    private:
      const AnalyticFn& f_;
      QuadtreeOptions opts_;
    };

    void collect(ZeroSet& out, CellResult& r)
    {
      if (r.zero)
        out.zeros.push_back(*r.zero);
      if (r.unresolved)
        out.unresolved.push_back(*r.unresolved);
      if (!r.warning.empty())
        out.warnings.push_back(r.warning);
    }

    void depth_first(const Engine& eng, const Cell& c, ZeroSet& out)
    {
      CellResult r = eng.process(c);
      collect(out, r);
      for (const auto& k : r.children)
        depth_first(eng, k, out);
    }
  }

  ZeroSet find_zeros_analytic(const AnalyticFn& f, const Rect& box, const QuadtreeOptions& opts, Exec exec)
  {
    if (!box.valid())
      throw ArgumentError("search box needs finite bounds with lo < hi");
    if (!(opts.min_cell_diameter > 0) || !(opts.multiplicity_radius > 0))
      throw ArgumentError("quadtree scales must be positive");

    Engine eng(f, opts);
    ZeroSet out;
    out.region = box;
    const Cell root{box, eng.winding(box), 0};
    if (root.winding < 0)
      throw ContourDegeneracy("negative winding around the search box (function has poles?)");

    if (exec == Exec::serial)
      depth_first(eng, root, out);
    else
    {
      std::vector<Cell> level{root};
      while (!level.empty())
      {
        std::vector<CellResult> results(level.size());
        const std::int64_t n = static_cast<std::int64_t>(level.size());
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; i++)
          results[i] = eng.process(level[i]);
        std::vector<Cell> next;
        for (auto& r : results)
        {
          collect(out, r);
          next.insert(next.end(), r.children.begin(), r.children.end());
        }
        level = std::move(next);
      }
    }

    out.canonicalize();
    std::sort(out.unresolved.begin(), out.unresolved.end(), [](const Rect& a, const Rect& b) {
      return std::tie(a.re_lo, a.im_lo, a.re_hi, a.im_hi) < std::tie(b.re_lo, b.im_lo, b.re_hi, b.im_hi);
    });
    std::sort(out.warnings.begin(), out.warnings.end());
    out.warnings.erase(std::unique(out.warnings.begin(), out.warnings.end()), out.warnings.end());
    if (out.total_multiplicity() != root.winding)
      out.warnings.push_back("located multiplicity " + std::to_string(out.total_multiplicity()) +
                             " differs from box winding " + std::to_string(root.winding));
    return out;
  }
}

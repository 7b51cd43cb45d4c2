#include "pfz/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <omp.h>

#include "pfz/diagram.hpp"
#include "pfz/errors.hpp"

namespace pfz
{
  ModelSpec::ModelSpec(std::vector<PhaseSpec> phases, Rect domain, CoordinateMap map,
                       double alpha_ref)
      : phases_(std::move(phases)), domain_(domain), map_(map), alpha_ref_(alpha_ref)
  {
    if (phases_.size() < 2)
      throw ArgumentError("model needs at least two phases, got " + std::to_string(phases_.size()));
    if (!domain_.valid())
      throw ArgumentError("model domain must be a finite rectangle with positive area");
    if (!(alpha_ref_ > 0) || !std::isfinite(alpha_ref_))
      throw ArgumentError("alpha_ref must be positive");
    std::set<std::string> names;
    for (const auto& p : phases_)
    {
      if (p.name.empty())
        throw ArgumentError("phase name must not be empty");
      if (!names.insert(p.name).second)
        throw ArgumentError("duplicate phase name '" + p.name + "'");
      if (p.degeneracy < 1)
        throw ArgumentError("phase '" + p.name + "': degeneracy must be >= 1");
      if (p.exponent.empty())
        throw ArgumentError("phase '" + p.name + "': exponent coefficient list is empty");
      for (const auto& c : p.exponent)
        if (!is_finite(c))
          throw ArgumentError("phase '" + p.name + "': non-finite exponent coefficient");
      poly_.emplace_back(p.exponent);
    }
  }

  const PhaseSpec& ModelSpec::phase(std::size_t m) const
  {
    if (m >= phases_.size())
      throw ArgumentError("phase index " + std::to_string(m) + " out of range");
    return phases_[m];
  }

  double ModelSpec::log_max(Complex z) const
  {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : poly_)
      best = std::max(best, p(z).real());
    return best;
  }

  double ModelSpec::total_degeneracy() const
  {
    double s = 0;
    for (const auto& p : phases_)
      s += p.degeneracy;
    return s;
  }

  ModelSpec ModelSpec::with_domain(Rect domain) const
  {
    return ModelSpec(phases_, domain, map_, alpha_ref_);
  }

  namespace
  {
    void check_point(const ModelSpec& model, std::size_t m, Complex z)
    {
      if (m >= model.size())
        throw ArgumentError("phase index " + std::to_string(m) + " out of range");
      if (!is_finite(z))
        throw ArgumentError("evaluation point must be finite");
    }

    double abs_tol(double tol, double log_max) { return tol * std::max(1.0, std::abs(log_max)); }
  }

  Complex eval_log_zeta(const ModelSpec& model, std::size_t m, Complex z)
  {
    check_point(model, m, z);
    return model.log_zeta(m, z);
  }

  Complex eval_v(const ModelSpec& model, std::size_t m, Complex z)
  {
    check_point(model, m, z);
    return model.v(m, z);
  }

  PhaseSet stable_phases(const ModelSpec& model, Complex z, double tol)
  {
    std::vector<double> re(model.size());
    for (std::size_t m = 0; m < model.size(); m++)
      re[m] = model.log_zeta(m, z).real();
    const double top = *std::max_element(re.begin(), re.end());
    const double t = abs_tol(tol, top);
    PhaseSet out;
    for (std::size_t m = 0; m < re.size(); m++)
      if (re[m] >= top - t)
        out.push_back(m);
    return out;
  }

  EpsilonMembership eps_membership(const ModelSpec& model, Complex z, double eps, double tol_stab)
  {
    if (!(eps >= 0))
      throw ArgumentError("epsilon must be non-negative");
    const double top = model.log_max(z);
    const double t = abs_tol(tol_stab, top);
    EpsilonMembership out;
    out.eps = eps;
    for (std::size_t m = 0; m < model.size(); m++)
    {
      const double re = model.log_zeta(m, z).real();
      if (re > top - eps - t)
        out.almost_stable.push_back(m);
      if (re >= top - 0.5 * eps - t)
        out.core.push_back(m);
    }
    return out;
  }

  StabilityReport stability(const ModelSpec& model, Complex z, std::span<const double> eps_list,
                            double tol_stab)
  {
    if (!is_finite(z))
      throw ArgumentError("stability: point must be finite");
    const Rect& dom = model.domain();
    if (!dom.contains(z, 1e-12 * std::max(1.0, dom.diameter())))
      throw DomainError("stability: point outside the model domain");
    StabilityReport rep;
    rep.z = z;
    rep.log_max = model.log_max(z);
    rep.stable_set = stable_phases(model, z, tol_stab);
    for (double eps : eps_list)
      rep.eps_sets.push_back(eps_membership(model, z, eps, tol_stab));
    return rep;
  }

  PolygonCheck convex_polygon_check(std::span<const Complex> points)
  {
    PolygonCheck out;
    const std::size_t k = points.size();
    out.ccw_order.resize(k);
    std::iota(out.ccw_order.begin(), out.ccw_order.end(), std::size_t{0});
    if (k < 3)
      return out;

    Complex centroid = 0;
    for (auto p : points)
      centroid += p;
    centroid /= static_cast<double>(k);
    std::vector<double> angle(k);
    for (std::size_t i = 0; i < k; i++)
      angle[i] = std::arg(points[i] - centroid);
    std::stable_sort(out.ccw_order.begin(), out.ccw_order.end(),
                     [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });

    auto cross = [](Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); };
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; i++)
    {
      const Complex p0 = points[out.ccw_order[i]];
      const Complex p1 = points[out.ccw_order[(i + 1) % k]];
      const Complex p2 = points[out.ccw_order[(i + 2) % k]];
      margin = std::min(margin, cross(p1 - p0, p2 - p1));
    }

    // every point must also be a strict vertex of the hull (monotone chain, strict turns)
    std::vector<Complex> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<Complex> hull;
    for (int pass = 0; pass < 2; pass++)
    {
      const std::size_t base = hull.size();
      for (auto p : pts)
      {
        while (hull.size() >= base + 2 &&
               cross(hull[hull.size() - 1] - hull[hull.size() - 2], p - hull[hull.size() - 1]) <= 0)
          hull.pop_back();
        hull.push_back(p);
      }
      hull.pop_back();
      std::reverse(pts.begin(), pts.end());
    }
    const bool all_vertices = hull.size() == k;
    if (!all_vertices)
      margin = std::min(margin, 0.0);
    out.margin = margin;
    out.strictly_convex = all_vertices && margin > 0;
    return out;
  }

  AssumptionReport check_assumption_A(const ModelSpec& model, GridSpec grid, Exec exec)
  {
    if (grid.nx < 4 || grid.ny < 4)
      throw ArgumentError("assumption grid needs at least 4 points per axis");
    const Rect& dom = model.domain();
    const std::size_t r = model.size();
    const std::size_t nx = grid.nx, ny = grid.ny;
    AssumptionReport rep;

    // node values Re P_m
    std::vector<double> re(nx * ny * r);
    const auto fill = [&](std::size_t idx) {
      const std::size_t i = idx % nx, j = idx / nx;
      const Complex z = grid.node(dom, i, j);
      for (std::size_t m = 0; m < r; m++)
        re[idx * r + m] = model.log_zeta(m, z).real();
    };
    const std::int64_t total = static_cast<std::int64_t>(nx * ny);
    if (exec == Exec::parallel)
    {
#pragma omp parallel for schedule(static)
      for (std::int64_t idx = 0; idx < total; idx++)
        fill(static_cast<std::size_t>(idx));
    }
    else
    {
      for (std::int64_t idx = 0; idx < total; idx++)
        fill(static_cast<std::size_t>(idx));
    }

    double min_log = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < nx * ny; idx++)
      min_log = std::min(min_log, *std::max_element(&re[idx * r], &re[idx * r] + r));
    rep.min_log_zeta = min_log;
    rep.positivity_ok = std::isfinite(min_log);
    if (!rep.positivity_ok)
      rep.violations.push_back({dom.center(), "positivity", min_log});

    // coexistence samples seeded from sign changes of Re(P_m - P_n) on grid edges
    for (std::size_t m = 0; m < r; m++)
      for (std::size_t n = m + 1; n < r; n++)
      {
        auto phi = [&](std::size_t i, std::size_t j) {
          const std::size_t idx = j * nx + i;
          return re[idx * r + m] - re[idx * r + n];
        };
        auto try_edge = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
          const double a = phi(i0, j0), b = phi(i1, j1);
          if (!(a * b < 0))
            return;
          const Complex za = grid.node(dom, i0, j0), zb = grid.node(dom, i1, j1);
          const Complex seed = 0.5 * (za + zb);
          const double len = std::abs(zb - za);
          Complex z;
          try
          {
            z = find_coexistence_point(model, m, n, seed, len);
          }
          catch (const NoConvergence&)
          {
            const Complex dir = (zb - za) / len;
            auto fn = [&](Complex w) -> std::array<double, 2> {
              const Complex g = model.log_zeta(m, w) - model.log_zeta(n, w);
              const Complex gp = model.v(m, w) - model.v(n, w);
              return {g.real(), (gp * dir).real()};
            };
            try
            {
              z = solve_on_line(fn, seed, dir, 0.5 * len, 1e-12);
            }
            catch (const NoConvergence&)
            {
              return;
            }
          }
          const PhaseSet q = stable_phases(model, z, default_tol_mp);
          if (!set_contains(q, m) || !set_contains(q, n))
            return;
          rep.samples.push_back({m, n, z, std::abs(model.v(m, z) - model.v(n, z))});
        };
        for (std::size_t j = 0; j < ny; j++)
          for (std::size_t i = 0; i + 1 < nx; i++)
            try_edge(i, j, i + 1, j);
        for (std::size_t j = 0; j + 1 < ny; j++)
          for (std::size_t i = 0; i < nx; i++)
            try_edge(i, j, i, j + 1);
      }

    // multiple points: Newton-refined ones plus grid nodes where >= 3 phases tie exactly
    std::vector<MultiplePoint> mps = find_multiple_points(model, dom, grid);
    std::vector<std::pair<Complex, PhaseSet>> candidates;
    for (const auto& mp : mps)
      candidates.emplace_back(mp.z, mp.stable_set);
    for (std::size_t j = 0; j < ny; j++)
      for (std::size_t i = 0; i < nx; i++)
      {
        const Complex z = grid.node(dom, i, j);
        PhaseSet q = stable_phases(model, z, default_tol_mp);
        if (q.size() < 3)
          continue;
        const bool known = std::any_of(candidates.begin(), candidates.end(),
                                       [&](const auto& c) { return std::abs(c.first - z) < 1e-8; });
        if (!known)
          candidates.emplace_back(z, std::move(q));
      }

    for (const auto& [z, q] : candidates)
    {
      std::vector<Complex> v;
      for (auto m : q)
        v.push_back(model.v(m, z));
      const PolygonCheck pc = convex_polygon_check(v);
      rep.convexity.push_back({z, q, pc.strictly_convex, pc.margin});
      if (!pc.strictly_convex)
        rep.violations.push_back({z, "convexity", pc.margin});
      for (std::size_t a = 0; a < q.size(); a++)
        for (std::size_t b = a + 1; b < q.size(); b++)
          rep.samples.push_back({q[a], q[b], z, std::abs(v[a] - v[b])});
    }

    if (!rep.samples.empty())
    {
      double alpha = std::numeric_limits<double>::infinity();
      for (const auto& s : rep.samples)
      {
        alpha = std::min(alpha, s.v_gap);
        if (s.v_gap < model.alpha_ref())
          rep.violations.push_back({s.z, "nondegeneracy", s.v_gap - model.alpha_ref()});
      }
      rep.alpha_estimate = alpha;
    }
    return rep;
  }

  // ---------------------------------------------------------------------------------------

  double grid_sup(const Poly& p, const Rect& rect, std::size_t n)
  {
    double sup = 0;
    GridSpec g{n, n};
    for (std::size_t j = 0; j < n; j++)
      for (std::size_t i = 0; i < n; i++)
        sup = std::max(sup, std::abs(p(g.node(rect, i, j))));
    return sup;
  }

  Complex FiniteVolumeModel::log_zeta(std::size_t m, Complex z) const
  {
    Complex p = base_.log_zeta(m, z);
    if (!pert_.empty() && !pert_[m].empty())
      p += corr_ * pert_[m](z);
    return p;
  }

  Complex FiniteVolumeModel::v(std::size_t m, Complex z) const
  {
    Complex p = base_.v(m, z);
    if (!pert_.empty() && !pert_[m].empty())
      p += corr_ * pert_[m].derivative(z);
    return p;
  }

  Complex FiniteVolumeModel::xi_normalized(Complex z) const
  {
    if (theta_ == 0)
      return 0;
    const double top = base_.log_max(z);
    Complex s = 0;
    for (std::size_t m = 0; m < base_.size(); m++)
      s += base_.degeneracy(m) * std::exp(N() * (log_zeta(m, z) - top));
    return theta_ * corr_ * N() * s;
  }

  FiniteVolumeModel finite_volume(const ModelSpec& model, int L, int d, double tau, double kappa,
                                  std::vector<Poly> perturbation, double xi_strength)
  {
    if (L < 1)
      throw ArgumentError("L must be >= 1");
    if (d < 1)
      throw ArgumentError("d must be >= 1");
    if (!(tau > 0) || !std::isfinite(tau))
      throw ArgumentError("tau must be positive");
    if (!(kappa > 0) || !std::isfinite(kappa))
      throw ArgumentError("kappa must be positive");
    if (!(xi_strength >= 0) || !std::isfinite(xi_strength))
      throw ArgumentError("xi strength must be a non-negative number");
    if (!perturbation.empty() && perturbation.size() != model.size())
      throw ArgumentError("perturbation needs one polynomial per phase");

    double vol = 1;
    std::int64_t volume = 1;
    for (int k = 0; k < d; k++)
    {
      vol *= L;
      volume *= L;
      if (vol > 9.0e15)
        throw ArgumentError("volume L^d too large");
    }

    FiniteVolumeModel fvm(model);
    fvm.L_ = L;
    fvm.d_ = d;
    fvm.volume_ = volume;
    fvm.tau_ = tau;
    fvm.kappa_ = kappa;
    fvm.theta_ = xi_strength;
    fvm.corr_ = std::exp(-tau * L);

    bool any = false;
    for (auto& u : perturbation)
    {
      for (const auto& c : u.coeffs())
        if (!is_finite(c))
          throw ArgumentError("non-finite perturbation coefficient");
      const double sup = u.empty() ? 0.0 : grid_sup(u, model.domain());
      if (sup == 0)
      {
        u = Poly{};
        continue;
      }
      any = true;
      if (sup > 1)
      {
        std::vector<Complex> c = u.coeffs();
        for (auto& x : c)
          x /= sup;
        u = Poly(std::move(c));
      }
    }
    if (any)
      fvm.pert_ = std::move(perturbation);
    return fvm;
  }
}

namespace pfz
{
  namespace
  {
    // raw engine output mapped to [-1, 1); the standard distributions are not portable
    double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; }
  }

  std::vector<Poly> random_perturbation(const ModelSpec& model, std::uint64_t seed, int degree)
  {
    if (degree < 0)
      throw ArgumentError("perturbation degree must be >= 0");
    std::mt19937_64 rng(seed);
    std::vector<Poly> out;
    for (std::size_t m = 0; m < model.size(); m++)
    {
      std::vector<Complex> c;
      for (int j = 0; j <= degree; j++)
      {
        const double re = unit(rng);
        c.emplace_back(re, unit(rng));
      }
      out.emplace_back(std::move(c));
    }
    return out;
  }

  std::vector<Poly> symmetric_perturbation(const ModelSpec& model, std::size_t plus, std::size_t minus,
                                           std::uint64_t seed, int degree)
  {
    if (plus >= model.size() || minus >= model.size() || plus == minus)
      throw ArgumentError("plus and minus must be distinct valid phases");
    std::vector<Poly> out = random_perturbation(model, seed, degree);
    std::vector<Complex> c = out[plus].coeffs();
    for (std::size_t j = 0; j < c.size(); j++)
      c[j] = (j % 2 ? -1.0 : 1.0) * std::conj(c[j]);
    out[minus] = Poly(std::move(c));
    return out;
  }
}

#include "pfz/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <omp.h>

#include "pfz/errors.hpp"

namespace pfz
{
  Complex solve_on_line(const std::function<std::array<double, 2>(Complex)>& fn, Complex base,
                        Complex dir, double max_shift, double tol, int max_iter)
  {
    auto at = [&](double s) { return fn(base + s * dir); };
    const auto f0 = at(0.0);
    if (std::abs(f0[0]) <= tol)
      return base;

    // bracket: expand from 0 along the Newton direction first, then the other way
    double a = 0, fa = f0[0], b = 0, fb = 0;
    bool found = false;
    double last = 0;
    const double newton = f0[1] != 0 ? -f0[0] / f0[1] : max_shift;
    const double h0 = std::min(max_shift, std::max(1.1 * std::abs(newton), 1e-6 * max_shift));
    for (int side = 0; side < 2 && !found; side++)
    {
      const double sgn = (newton >= 0) == (side == 0) ? 1.0 : -1.0;
      double h = h0;
      while (true)
      {
        const double s = sgn * h;
        const double fs = at(s)[0];
        last = s;
        if (fs == 0)
          return base + s * dir;
        if (fs * f0[0] < 0)
        {
          b = s;
          fb = fs;
          found = true;
          break;
        }
        if (h >= max_shift)
          break;
        h = std::min(2 * h, max_shift);
      }
    }
    if (!found)
      throw NoConvergence("no sign change within the search window", base + last * dir);

    // safeguarded Newton on [a,b] (a and b may be in either order)
    double s = std::abs(fa) < std::abs(fb) ? a : b;
    for (int it = 0; it < max_iter; it++)
    {
      const auto fs = at(s);
      if (std::abs(fs[0]) <= tol)
        return base + s * dir;
      if (fs[0] * fa < 0)
      {
        b = s;
        fb = fs[0];
      }
      else
      {
        a = s;
        fa = fs[0];
      }
      const double lo = std::min(a, b), hi = std::max(a, b);
      double next = fs[1] != 0 ? s - fs[0] / fs[1] : 0.5 * (lo + hi);
      if (!(next > lo && next < hi))
        next = 0.5 * (lo + hi);
      if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * (std::abs(base) + std::abs(s) + 1))
        return base + next * dir;
      s = next;
    }
    throw NoConvergence("line search did not converge", base + s * dir);
  }

  namespace
  {
    void check_pair(const ModelSpec& model, std::size_t m, std::size_t n)
    {
      if (m >= model.size() || n >= model.size())
        throw ArgumentError("phase index out of range");
      if (m == n)
        throw ArgumentError("coexistence needs two distinct phases");
    }

    double level_tol(const ModelSpec& model, std::size_t m, std::size_t n, Complex z)
    {
      const double scale =
          std::max(std::abs(model.log_zeta(m, z).real()), std::abs(model.log_zeta(n, z).real()));
      return 1e-12 * std::max(1.0, scale);
    }

    // Re(P_m - P_n) and its derivative along dir
    auto level_fn(const ModelSpec& model, std::size_t m, std::size_t n, Complex dir)
    {
      return [&model, m, n, dir](Complex w) -> std::array<double, 2> {
        const Complex g = model.log_zeta(m, w) - model.log_zeta(n, w);
        const Complex gp = model.v(m, w) - model.v(n, w);
        return {g.real(), (gp * dir).real()};
      };
    }

    // gradient of Re g as a complex number is conj(g')
    Complex normal_dir(const ModelSpec& model, std::size_t m, std::size_t n, Complex z)
    {
      const Complex gp = model.v(m, z) - model.v(n, z);
      const double a = std::abs(gp);
      return a > 0 ? std::conj(gp) / a : Complex(1, 0);
    }

    double point_segment_distance(Complex p, Complex a, Complex b)
    {
      const Complex ab = b - a;
      const double len2 = std::norm(ab);
      if (len2 == 0)
        return std::abs(p - a);
      const double lam = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
      return std::abs(p - (a + lam * ab));
    }
  }

  Complex find_coexistence_point(const ModelSpec& model, std::size_t m, std::size_t n, Complex seed,
                                 double max_shift)
  {
    check_pair(model, m, n);
    if (!is_finite(seed))
      throw ArgumentError("seed must be finite");
    if (!model.domain().contains(seed, 1e-12 * model.domain().diameter()))
      throw DomainError("coexistence seed outside the model domain");
    const Complex gp = model.v(m, seed) - model.v(n, seed);
    // d/dx Re g = Re g', d/dy Re g = -Im g'
    const Complex axis = std::abs(gp.real()) >= std::abs(gp.imag()) ? Complex(1, 0) : Complex(0, 1);
    return solve_on_line(level_fn(model, m, n, axis), seed, axis, max_shift,
                         level_tol(model, m, n, seed));
  }

  Complex curve_tangent(const ModelSpec& model, std::size_t m, std::size_t n, Complex z)
  {
    return Complex(0, 1) * normal_dir(model, m, n, z);
  }

  const char* to_string(Termination t)
  {
    switch (t)
    {
    case Termination::domain_boundary:
      return "domain_boundary";
    case Termination::multiple_point:
      return "multiple_point";
    case Termination::closed_loop:
      return "closed_loop";
    case Termination::truncated:
      return "truncated";
    }
    return "?";
  }

  namespace
  {
    struct Walk
    {
      std::vector<CurveSample> samples;
      CurveEnd end;
    };

    class Tracer
    {
    public:
      Tracer(const ModelSpec& model, std::size_t m, std::size_t n, const TraceOptions& opts)
          : model_(model), m_(m), n_(n), opts_(opts)
      {
      }

      CurveSample sample(double t, Complex z) const { return {t, z, model_.v(m_, z), model_.v(n_, z)}; }

      Complex project(Complex z) const
      {
        const Complex dir = normal_dir(model_, m_, n_, z);
        return solve_on_line(level_fn(model_, m_, n_, dir), z, dir, opts_.step,
                             level_tol(model_, m_, n_, z));
      }

      // RK4 step of dz/dt = sign * tangent followed by projection back onto the level set
      Complex advance(Complex z, double h, double sign) const
      {
        auto T = [&](Complex w) {
          const Complex gp = model_.v(m_, w) - model_.v(n_, w);
          if (!(std::abs(gp) > 1e-14))
            throw SingularityError("vanishing gradient of Re(P_m - P_n) on the curve");
          return sign * curve_tangent(model_, m_, n_, w);
        };
        const Complex k1 = T(z);
        const Complex k2 = T(z + 0.5 * h * k1);
        const Complex k3 = T(z + 0.5 * h * k2);
        const Complex k4 = T(z + h * k3);
        return project(z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
      }

      // gap between the pair level and the strongest other phase, plus that phase
      std::pair<double, std::size_t> third_gap(Complex z) const
      {
        const double lvl = std::max(model_.log_zeta(m_, z).real(), model_.log_zeta(n_, z).real());
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = m_;
        for (std::size_t k = 0; k < model_.size(); k++)
        {
          if (k == m_ || k == n_)
            continue;
          const double re = model_.log_zeta(k, z).real();
          if (re > best)
          {
            best = re;
            arg = k;
          }
        }
        return {lvl - best, arg};
      }

      Walk walk(Complex z0, double sign, bool detect_loop) const
      {
        Walk w;
        const Rect& dom = model_.domain();
        const double h = opts_.step;
        Complex z = z0;
        double t = 0;
        auto [prev_gap, unused] = third_gap(z0);
        (void)unused;
        for (std::size_t step = 0;; step++)
        {
          if (step >= opts_.max_steps)
          {
            w.end = {Termination::truncated, {}, "max_steps reached"};
            return w;
          }
          Complex zn;
          try
          {
            zn = advance(z, h, sign);
          }
          catch (const NumericalError& e)
          {
            w.end = {Termination::truncated, {}, std::string("projection failure: ") + e.what()};
            return w;
          }

          if (!dom.contains(zn))
          {
            // bisect the step length so that the last point sits on the boundary
            double lo = 0, hi = h;
            Complex zin = z;
            try
            {
              for (int it = 0; it < 60; it++)
              {
                const double mid = 0.5 * (lo + hi);
                const Complex zm = advance(z, mid, sign);
                if (dom.contains(zm))
                {
                  lo = mid;
                  zin = zm;
                }
                else
                  hi = mid;
              }
            }
            catch (const NumericalError&)
            {
            }
            if (lo > 0)
              w.samples.push_back(sample(t + lo, zin));
            w.end = {Termination::domain_boundary, {}, ""};
            return w;
          }

          if (model_.size() > 2)
          {
            const auto [gap, k] = third_gap(zn);
            if (gap <= opts_.eps_mp)
            {
              Complex seed = zn;
              if (gap < 0 && prev_gap > 0)
                seed = z + (zn - z) * (prev_gap / (prev_gap - gap));
              try
              {
                MultiplePoint mp = find_multiple_point(model_, {m_, n_, k}, seed);
                w.samples.push_back(sample(t + std::abs(mp.z - z), mp.z));
                w.end = {Termination::multiple_point, mp.stable_set, ""};
              }
              catch (const NumericalError& e)
              {
                w.end = {Termination::truncated, {}, std::string("multiple point handoff: ") + e.what()};
              }
              return w;
            }
            prev_gap = gap;
          }

          if (detect_loop && t > 3 * h && point_segment_distance(z0, z, zn) < 0.1 * h)
          {
            w.samples.push_back(sample(t + std::abs(z0 - z), z0));
            w.end = {Termination::closed_loop, {}, ""};
            return w;
          }

          t += h;
          z = zn;
          w.samples.push_back(sample(t, z));
        }
      }

    private:
      const ModelSpec& model_;
      std::size_t m_, n_;
      TraceOptions opts_;
    };
  }

  CoexistenceCurve trace_curve(const ModelSpec& model, std::size_t m, std::size_t n, Complex z0,
                               const TraceOptions& opts)
  {
    check_pair(model, m, n);
    if (!(opts.step > 0))
      throw ArgumentError("trace step must be positive");
    if (!is_finite(z0) || !model.domain().contains(z0))
      throw DomainError("trace start point outside the model domain");

    Tracer tracer(model, m, n, opts);
    Complex start;
    try
    {
      start = tracer.project(z0);
    }
    catch (const NoConvergence&)
    {
      throw ArgumentError("trace start point is not near a coexistence point of the pair");
    }

    CoexistenceCurve curve;
    curve.m = m;
    curve.n = n;
    Walk fwd = tracer.walk(start, +1.0, true);
    Walk bwd;
    if (fwd.end.kind == Termination::closed_loop)
      bwd.end = fwd.end;
    else
      bwd = tracer.walk(start, -1.0, false);

    for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it)
    {
      CurveSample s = *it;
      s.t = -s.t;
      curve.samples.push_back(s);
    }
    curve.samples.push_back(tracer.sample(0.0, start));
    curve.samples.insert(curve.samples.end(), fwd.samples.begin(), fwd.samples.end());
    const double t0 = curve.samples.front().t;
    for (auto& s : curve.samples)
      s.t -= t0;
    curve.start = bwd.end;
    curve.end = fwd.end;
    return curve;
  }

  MultiplePoint find_multiple_point(const ModelSpec& model, std::array<std::size_t, 3> triple,
                                    Complex seed)
  {
    const auto [a, b, c] = triple;
    if (a >= model.size() || b >= model.size() || c >= model.size())
      throw ArgumentError("phase index out of range");
    if (a == b || a == c || b == c)
      throw ArgumentError("multiple point needs three distinct phases");
    if (!is_finite(seed))
      throw ArgumentError("seed must be finite");

    Complex z = seed;
    bool converged = false;
    for (int it = 0; it < 50; it++)
    {
      const Complex pa = model.log_zeta(a, z);
      const double f1 = (pa - model.log_zeta(b, z)).real();
      const double f2 = (pa - model.log_zeta(c, z)).real();
      const double tol = 1e-12 * std::max(1.0, std::abs(pa.real()));
      if (std::abs(f1) <= tol && std::abs(f2) <= tol)
      {
        converged = true;
        break;
      }
      const Complex g1 = model.v(a, z) - model.v(b, z);
      const Complex g2 = model.v(a, z) - model.v(c, z);
      // grad Re g = (Re g', -Im g')
      const double j11 = g1.real(), j12 = -g1.imag(), j21 = g2.real(), j22 = -g2.imag();
      const double det = j11 * j22 - j12 * j21;
      if (!(std::abs(det) > 1e-12 * std::abs(g1) * std::abs(g2)))
        throw SingularityError("multiple-point Jacobian is singular (coexistence lines parallel)");
      const double dx = (-f1 * j22 + f2 * j12) / det;
      const double dy = (-f2 * j11 + f1 * j21) / det;
      z += Complex(dx, dy);
      if (!is_finite(z))
        break;
    }
    if (!converged)
      throw NoConvergence("multiple-point Newton did not converge", z);

    MultiplePoint mp;
    mp.z = z;
    mp.stable_set = stable_phases(model, z, default_tol_mp);
    for (auto k : triple)
      if (!set_contains(mp.stable_set, k))
        throw SpuriousRootError("converged point is not a multiple point of the requested phases");
    for (auto k : mp.stable_set)
      mp.v_values.push_back(model.v(k, z));
    return mp;
  }

  std::vector<MultiplePoint> find_multiple_points(const ModelSpec& model, const Rect& region,
                                                  GridSpec grid, std::vector<DegenerateSeed>* degenerate)
  {
    const std::size_t nx = grid.nx, ny = grid.ny;
    std::vector<PhaseSet> top(nx * ny);
    for (std::size_t j = 0; j < ny; j++)
      for (std::size_t i = 0; i < nx; i++)
        top[j * nx + i] = stable_phases(model, grid.node(region, i, j), default_tol_mp);

    std::vector<MultiplePoint> out;
    const double cell = std::hypot(region.width() / static_cast<double>(nx - 1),
                                   region.height() / static_cast<double>(ny - 1));
    for (std::size_t j = 0; j + 1 < ny; j++)
      for (std::size_t i = 0; i + 1 < nx; i++)
      {
        PhaseSet u;
        for (auto idx : {j * nx + i, j * nx + i + 1, (j + 1) * nx + i, (j + 1) * nx + i + 1})
          u.insert(u.end(), top[idx].begin(), top[idx].end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        if (u.size() < 3)
          continue;
        const Complex seed = 0.5 * (grid.node(region, i, j) + grid.node(region, i + 1, j + 1));
        for (std::size_t x = 0; x < u.size(); x++)
          for (std::size_t y = x + 1; y < u.size(); y++)
            for (std::size_t w = y + 1; w < u.size(); w++)
            {
              try
              {
                MultiplePoint mp = find_multiple_point(model, {u[x], u[y], u[w]}, seed);
                if (!region.contains(mp.z, 1e-12 * region.diameter()) || std::abs(mp.z - seed) > 2 * cell)
                  continue;
                const bool dup = std::any_of(out.begin(), out.end(),
                                             [&](const MultiplePoint& o) { return std::abs(o.z - mp.z) < 1e-8; });
                if (!dup)
                  out.push_back(std::move(mp));
              }
              catch (const SingularityError&)
              {
                if (degenerate)
                  degenerate->push_back({seed, {u[x], u[y], u[w]}});
              }
              catch (const NumericalError&)
              {
              }
            }
      }
    std::sort(out.begin(), out.end(), [](const MultiplePoint& a, const MultiplePoint& b) {
      return a.z.real() < b.z.real() || (a.z.real() == b.z.real() && a.z.imag() < b.z.imag());
    });
    return out;
  }

  double hausdorff_distance(const CoexistenceCurve& a, const CoexistenceCurve& b)
  {
    auto directed = [](const CoexistenceCurve& p, const CoexistenceCurve& q) {
      double worst = 0;
      for (const auto& s : p.samples)
      {
        double best = std::numeric_limits<double>::infinity();
        if (q.samples.size() == 1)
          best = std::abs(s.z - q.samples[0].z);
        for (std::size_t k = 0; k + 1 < q.samples.size(); k++)
          best = std::min(best, point_segment_distance(s.z, q.samples[k].z, q.samples[k + 1].z));
        worst = std::max(worst, best);
      }
      return worst;
    };
    if (a.samples.empty() || b.samples.empty())
      return std::numeric_limits<double>::infinity();
    return std::max(directed(a, b), directed(b, a));
  }

  namespace
  {
    struct Seed
    {
      std::size_t m, n;
      Complex z;
    };

    bool segments_cross(Complex a, Complex b, Complex c, Complex d)
    {
      auto cross = [](Complex u, Complex v) { return u.real() * v.imag() - u.imag() * v.real(); };
      const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
      const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
      return d1 * d2 < 0 && d3 * d4 < 0;
    }
  }

  PhaseDiagram build_phase_diagram(const ModelSpec& model, const DiagramOptions& opts)
  {
    const Rect& dom = model.domain();
    const GridSpec grid = opts.grid;
    if (grid.nx < 2 || grid.ny < 2)
      throw ArgumentError("diagram grid needs at least 2 points per axis");
    TraceOptions topts;
    topts.step = opts.step > 0 ? opts.step : 1e-2 * std::min(dom.width(), dom.height());
    topts.max_steps = opts.max_steps > 0
                          ? opts.max_steps
                          : static_cast<std::size_t>(std::ceil(8 * (dom.width() + dom.height()) / topts.step));

    PhaseDiagram diagram;
    diagram.multiple_points = find_multiple_points(model, dom, grid);

    // seeds: grid nodes on, and grid edges across, each pair's zero level
    const std::size_t nx = grid.nx, ny = grid.ny, r = model.size();
    std::vector<Seed> seeds;
    for (std::size_t m = 0; m < r; m++)
      for (std::size_t n = m + 1; n < r; n++)
      {
        std::vector<double> phi(nx * ny);
        for (std::size_t j = 0; j < ny; j++)
          for (std::size_t i = 0; i < nx; i++)
          {
            const Complex z = grid.node(dom, i, j);
            phi[j * nx + i] = (model.log_zeta(m, z) - model.log_zeta(n, z)).real();
          }
        auto accept = [&](Complex z) {
          const PhaseSet q = stable_phases(model, z, default_tol_mp);
          if (set_contains(q, m) && set_contains(q, n))
            seeds.push_back({m, n, z});
        };
        for (std::size_t j = 0; j < ny; j++)
          for (std::size_t i = 0; i < nx; i++)
          {
            const Complex z = grid.node(dom, i, j);
            if (std::abs(phi[j * nx + i]) <= level_tol(model, m, n, z))
              accept(z);
          }
        auto edge = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
          const double a = phi[j0 * nx + i0], b = phi[j1 * nx + i1];
          if (!(a * b < 0))
            return;
          const Complex za = grid.node(dom, i0, j0), zb = grid.node(dom, i1, j1);
          const double len = std::abs(zb - za);
          const Complex dir = (zb - za) / len;
          try
          {
            accept(solve_on_line(level_fn(model, m, n, dir), 0.5 * (za + zb), dir, 0.5 * len,
                                 level_tol(model, m, n, za)));
          }
          catch (const NumericalError&)
          {
          }
        };
        for (std::size_t j = 0; j < ny; j++)
          for (std::size_t i = 0; i + 1 < nx; i++)
            edge(i, j, i + 1, j);
        for (std::size_t j = 0; j + 1 < ny; j++)
          for (std::size_t i = 0; i < nx; i++)
            edge(i, j, i, j + 1);
      }

    // trace every seed (independent work items), then reduce in seed order
    std::vector<CoexistenceCurve> traced(seeds.size());
    std::vector<std::string> errors(seeds.size());
    const auto run = [&](std::size_t k) {
      try
      {
        traced[k] = trace_curve(model, seeds[k].m, seeds[k].n, seeds[k].z, topts);
      }
      catch (const Error& e)
      {
        errors[k] = e.what();
      }
    };
    const std::int64_t ns = static_cast<std::int64_t>(seeds.size());
    if (opts.exec == Exec::parallel)
    {
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t k = 0; k < ns; k++)
        run(static_cast<std::size_t>(k));
    }
    else
    {
      for (std::int64_t k = 0; k < ns; k++)
        run(static_cast<std::size_t>(k));
    }

    for (std::size_t k = 0; k < traced.size(); k++)
    {
      if (!errors[k].empty())
      {
        diagram.diagnostics.push_back("trace from seed failed: " + errors[k]);
        continue;
      }
      const CoexistenceCurve& c = traced[k];
      // a pair that coexists only at an isolated point traces to nothing
      if (c.samples.size() < 2 || c.length() < 0.5 * topts.step)
        continue;
      const bool dup = std::any_of(diagram.curves.begin(), diagram.curves.end(), [&](const CoexistenceCurve& o) {
        return o.m == c.m && o.n == c.n && hausdorff_distance(o, c) < topts.step;
      });
      if (!dup)
        diagram.curves.push_back(c);
    }

    // attach curve ends to multiple points
    auto mp_index = [&](Complex z, const PhaseSet& q) {
      for (std::size_t i = 0; i < diagram.multiple_points.size(); i++)
        if (std::abs(diagram.multiple_points[i].z - z) < 1e-7)
          return i;
      MultiplePoint mp;
      mp.z = z;
      mp.stable_set = q;
      for (auto k : q)
        mp.v_values.push_back(model.v(k, z));
      diagram.multiple_points.push_back(mp);
      return diagram.multiple_points.size() - 1;
    };
    for (std::size_t ci = 0; ci < diagram.curves.size(); ci++)
    {
      const CoexistenceCurve& c = diagram.curves[ci];
      for (bool at_end : {false, true})
      {
        const CurveEnd& e = at_end ? c.end : c.start;
        if (e.kind != Termination::multiple_point)
          continue;
        const auto& s = c.samples;
        const Complex zm = at_end ? s.back().z : s.front().z;
        const Complex next = at_end ? s[s.size() - 2].z : s[1].z;
        Complex tan = curve_tangent(model, c.m, c.n, zm);
        if ((tan * std::conj(next - zm)).real() < 0)
          tan = -tan;
        diagram.multiple_points[mp_index(zm, e.multiple_point_phases)].incident_arcs.push_back({ci, at_end, tan});
      }
    }

    for (const auto& mp : diagram.multiple_points)
    {
      if (mp.incident_arcs.size() != mp.stable_set.size())
        diagram.diagnostics.push_back("topology: multiple point at (" + std::to_string(mp.z.real()) + ", " +
                                      std::to_string(mp.z.imag()) + ") has " +
                                      std::to_string(mp.incident_arcs.size()) + " incident arcs, expected " +
                                      std::to_string(mp.stable_set.size()));
      for (std::size_t a = 0; a < mp.incident_arcs.size(); a++)
        for (std::size_t b = a + 1; b < mp.incident_arcs.size(); b++)
        {
          const double ang =
              std::abs(std::arg(mp.incident_arcs[a].tangent * std::conj(mp.incident_arcs[b].tangent)));
          diagram.min_angle = diagram.min_angle ? std::min(*diagram.min_angle, ang) : ang;
        }
    }

    // curves may only meet at multiple points
    auto near_mp = [&](Complex z) {
      return std::any_of(diagram.multiple_points.begin(), diagram.multiple_points.end(),
                         [&](const MultiplePoint& mp) { return std::abs(mp.z - z) < 2 * topts.step; });
    };
    for (std::size_t a = 0; a < diagram.curves.size(); a++)
      for (std::size_t b = a + 1; b < diagram.curves.size(); b++)
      {
        const auto& sa = diagram.curves[a].samples;
        const auto& sb = diagram.curves[b].samples;
        bool reported = false;
        for (std::size_t i = 0; i + 1 < sa.size() && !reported; i++)
          for (std::size_t j = 0; j + 1 < sb.size() && !reported; j++)
            if (segments_cross(sa[i].z, sa[i + 1].z, sb[j].z, sb[j + 1].z) && !near_mp(sa[i].z))
            {
              diagram.diagnostics.push_back("topology: curves " + std::to_string(a) + " and " +
                                            std::to_string(b) + " cross away from multiple points");
              reported = true;
            }
      }
    return diagram;
  }
}

#include "pfz/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pfz/errors.hpp"

namespace pfz
{
  namespace
  {
    // both W and its derivative carry the factor zeta(z)^{-N}; Xi adds the constant (1 + theta e^{-tau L} N)
    ScaledValue eval_W(const FiniteVolumeModel& fvm, Complex z, bool with_derivative)
    {
      const ModelSpec& base = fvm.base();
      const double N = fvm.N();
      const double top = base.log_max(z);
      Complex f = 0, df = 0;
      for (std::size_t m = 0; m < base.size(); m++)
      {
        const Complex term = base.degeneracy(m) * std::exp(N * (fvm.log_zeta(m, z) - top));
        f += term;
        if (with_derivative)
          df += term * N * fvm.v(m, z);
      }
      const double xi = 1 + fvm.xi_strength() * fvm.correction_scale() * N;
      if (xi != 1)
      {
        f *= xi;
        df *= xi;
      }
      return {f, df};
    }

    void require_in_domain(const FiniteVolumeModel& fvm, Complex z)
    {
      if (!is_finite(z))
        throw ArgumentError("point must be finite");
      const Rect& d = fvm.base().domain();
      if (!d.contains(z, 1e-12 * d.diameter()))
        throw DomainError("point outside the model domain");
    }
  }

  Complex eval_logZ_normalized(const FiniteVolumeModel& fvm, Complex z)
  {
    require_in_domain(fvm, z);
    return eval_W(fvm, z, false).f;
  }

  AnalyticFn normalized_partition_function(const FiniteVolumeModel& fvm)
  {
    return [&fvm](Complex z) { return eval_W(fvm, z, true); };
  }

  double phase_rate(const FiniteVolumeModel& fvm, const Rect& rect)
  {
    double vmax = 0;
    for (Complex z : {Complex(rect.re_lo, rect.im_lo), Complex(rect.re_hi, rect.im_lo),
                      Complex(rect.re_lo, rect.im_hi), Complex(rect.re_hi, rect.im_hi), rect.center()})
      for (std::size_t m = 0; m < fvm.base().size(); m++)
        vmax = std::max(vmax, std::abs(fvm.v(m, z)));
    return fvm.N() * vmax;
  }

  int winding_number(const FiniteVolumeModel& fvm, const Contour& contour)
  {
    return winding_number(normalized_partition_function(fvm), contour,
                          {phase_rate(fvm, contour.bounding_box()), 52});
  }

  ZeroSet find_zeros_region(const FiniteVolumeModel& fvm, const Rect& box, int max_depth, Exec exec)
  {
    if (!box.valid())
      throw ArgumentError("box needs finite bounds with lo < hi on both axes");
    const Rect& d = fvm.base().domain();
    const double slack = 1e-12 * d.diameter();
    if (!d.contains({box.re_lo, box.im_lo}, slack) || !d.contains({box.re_hi, box.im_hi}, slack))
      throw DomainError("box is not contained in the model domain");
    if (max_depth < 1)
      throw ArgumentError("max_depth must be >= 1");

    QuadtreeOptions opts;
    opts.max_depth = max_depth;
    opts.min_cell_diameter = 1e-3 / fvm.N();
    opts.multiplicity_radius = 1e-2 / fvm.N();
    opts.rate_hint = phase_rate(fvm, box);
    opts.method = ZeroMethod::brute_force;
    ZeroSet zs = find_zeros_analytic(normalized_partition_function(fvm), box, opts, exec);
    zs.L = fvm.L();
    zs.N = fvm.volume();
    return zs;
  }

  // ---------------------------------------------------------------------------------------

  namespace
  {
    struct PairFn
    {
      const FiniteVolumeModel& fvm;
      std::size_t m, n;
      double level; // log(q_n/q_m) / N

      Complex g(Complex z) const { return fvm.log_zeta(m, z) - fvm.log_zeta(n, z); }
      Complex dg(Complex z) const { return fvm.v(m, z) - fvm.v(n, z); }
      double theta(Complex z) const { return fvm.N() * g(z).imag(); }

      // move z along the gradient of Re g onto Re g = level
      Complex project(Complex z, double max_shift) const
      {
        const Complex gp = dg(z);
        const double a = std::abs(gp);
        if (!(a > 0))
          throw SingularityError("vanishing |v_m - v_n| on the coexistence curve");
        const Complex dir = std::conj(gp) / a;
        const double tol = 1e-13 * std::max(1.0, std::abs(fvm.log_zeta(m, z).real()));
        return solve_on_line(
            [&](Complex w) -> std::array<double, 2> {
              return {g(w).real() - level, (dg(w) * dir).real()};
            },
            z, dir, max_shift, tol);
      }
    };

    struct Pt
    {
      Complex z;
      double theta;
    };
  }

  ZeroSet predict_two_phase(const FiniteVolumeModel& fvm, const CoexistenceCurve& curve)
  {
    const ModelSpec& base = fvm.base();
    if (curve.m >= base.size() || curve.n >= base.size() || curve.m == curve.n)
      throw ArgumentError("curve carries an invalid phase pair");
    if (curve.samples.size() < 2)
      throw ArgumentError("curve needs at least two samples");

    const double N = fvm.N();
    const PairFn pf{fvm, curve.m, curve.n, std::log(base.degeneracy(curve.n) / base.degeneracy(curve.m)) / N};

    double max_seg = 0;
    for (std::size_t k = 0; k + 1 < curve.samples.size(); k++)
      max_seg = std::max(max_seg, std::abs(curve.samples[k + 1].z - curve.samples[k].z));

    auto shift_margin = [&](Complex z) {
      return 4 * std::abs(pf.level) / std::max(std::abs(pf.dg(z)), 1e-300) + max_seg + 1e-9;
    };
    auto project = [&](Complex z) {
      const Complex p = pf.project(z, shift_margin(z));
      return Pt{p, pf.theta(p)};
    };

    ZeroSet out;
    out.L = fvm.L();
    out.N = fvm.volume();
    Rect box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    std::vector<Pt> pts;
    for (const auto& s : curve.samples)
    {
      pts.push_back(project(s.z));
      box.re_lo = std::min(box.re_lo, s.z.real());
      box.re_hi = std::max(box.re_hi, s.z.real());
      box.im_lo = std::min(box.im_lo, s.z.imag());
      box.im_hi = std::max(box.im_hi, s.z.imag());
    }
    out.region = box;

    const double two_pi = 2 * std::numbers::pi;
    auto emit = [&](Complex za, Complex zb, double target) {
      // bisection on the segment parameter, then complex Newton on the full equation
      double lo = 0, hi = 1;
      Pt a = project(za);
      const double sa = a.theta - target;
      Pt mid = a;
      for (int it = 0; it < 200; it++)
      {
        const double lam = 0.5 * (lo + hi);
        mid = project(za + lam * (zb - za));
        const double r = mid.theta - target;
        if (std::abs(r) <= 1e-10)
          break;
        if ((r < 0) == (sa < 0))
          lo = lam;
        else
          hi = lam;
      }
      Complex z = mid.z;
      const Complex rhs(N * pf.level, target);
      for (int it = 0; it < 20; it++)
      {
        const Complex h = N * pf.g(z) - rhs;
        const Complex step = h / (N * pf.dg(z));
        z -= step;
        if (std::abs(step) <= 1e-16 * (1 + std::abs(z)))
          break;
      }
      Zero zero;
      zero.z = z;
      zero.residual = std::abs(N * pf.g(z) - rhs);
      zero.method = ZeroMethod::two_phase_eq;
      out.zeros.push_back(zero);
    };

    // targets pi + 2 pi k in [theta_a, theta_b) or (theta_b, theta_a]
    auto scan = [&](const Pt& a, const Pt& b) {
      const double lo = std::min(a.theta, b.theta), hi = std::max(a.theta, b.theta);
      double k = std::ceil((lo - std::numbers::pi) / two_pi);
      for (double t = std::numbers::pi + k * two_pi; t <= hi; k += 1, t = std::numbers::pi + k * two_pi)
      {
        const bool take = a.theta < b.theta ? (t >= a.theta && t < b.theta) : (t > b.theta && t <= a.theta);
        if (take)
          emit(a.z, b.z, t);
      }
    };

    std::function<void(const Pt&, const Pt&, int, std::size_t)> segment = [&](const Pt& a, const Pt& b,
                                                                             int depth, std::size_t k) {
      if (std::abs(b.theta - a.theta) < 0.5 * std::numbers::pi)
      {
        scan(a, b);
        return;
      }
      if (depth >= 30)
        throw ResolutionError("curve too sparse to follow the phase between samples " + std::to_string(k) +
                              " and " + std::to_string(k + 1) + " (|delta theta| = " +
                              std::to_string(std::abs(b.theta - a.theta)) + ")");
      const Pt m = project(0.5 * (a.z + b.z));
      segment(a, m, depth + 1, k);
      segment(m, b, depth + 1, k);
    };
    for (std::size_t k = 0; k + 1 < pts.size(); k++)
      segment(pts[k], pts[k + 1], 0, k);

    out.canonicalize();
    return out;
  }

  // ---------------------------------------------------------------------------------------

  ZeroSet predict_two_phase_region(const FiniteVolumeModel& fvm, const Rect& box, const DiagramOptions& opts)
  {
    const PhaseDiagram dia = build_phase_diagram(fvm.base().with_domain(box), opts);
    ZeroSet all;
    all.region = box;
    all.L = fvm.L();
    all.N = fvm.volume();
    for (const auto& c : dia.curves)
    {
      try
      {
        for (const auto& z : predict_two_phase(fvm, c).zeros)
          if (box.contains(z.z))
            all.zeros.push_back(z);
      }
      catch (const ResolutionError& e)
      {
        all.warnings.push_back(e.what());
      }
    }
    all.canonicalize();
    return all;
  }

  MultipointPrediction predict_multipoint(const FiniteVolumeModel& fvm, const MultiplePoint& mp, double rho_L,
                                          Exec exec)
  {
    const ModelSpec& base = fvm.base();
    if (mp.stable_set.size() < 3)
      throw ArgumentError("multiple point needs at least three stable phases");
    if (!(rho_L > 0) || !std::isfinite(rho_L))
      throw ArgumentError("rho_L must be positive");
    for (auto m : mp.stable_set)
      if (m >= base.size())
        throw ArgumentError("stable set references an unknown phase");

    const double N = fvm.N();
    MultipointPrediction res;
    res.radius = rho_L;
    std::vector<Complex> v;
    std::vector<double> q;
    for (auto m : mp.stable_set)
    {
      res.phases.push_back(std::fmod(N * base.log_zeta(m, mp.z).imag(), 2 * std::numbers::pi));
      v.push_back(base.v(m, mp.z));
      q.push_back(base.degeneracy(m));
    }
    const double R = N * rho_L;
    if (R < 10)
      res.zeros.warnings.push_back("N * rho_L = " + std::to_string(R) + " is below 10");

    const std::vector<double> phases = res.phases;
    // G and G' scaled by exp(-max_m Re(v_m s))
    const AnalyticFn G = [v, q, phases](Complex s) {
      double top = -std::numeric_limits<double>::infinity();
      for (const auto& vm : v)
        top = std::max(top, (vm * s).real());
      Complex f = 0, df = 0;
      for (std::size_t k = 0; k < v.size(); k++)
      {
        const Complex t = q[k] * std::exp(Complex(-top, phases[k]) + v[k] * s);
        f += t;
        df += t * v[k];
      }
      return ScaledValue{f, df};
    };

    double vmax = 0;
    for (const auto& vm : v)
      vmax = std::max(vmax, std::abs(vm));
    QuadtreeOptions opts;
    opts.min_cell_diameter = 1e-3;
    opts.multiplicity_radius = 1e-2;
    opts.rate_hint = vmax;
    opts.method = ZeroMethod::multipoint_eq;
    const double half = 1.05 * R;
    ZeroSet scaled = find_zeros_analytic(G, Rect::around(0, half), opts, exec);

    try
    {
      res.disc_winding = winding_number(G, Contour::circle(0, R), {vmax, 52});
    }
    catch (const ContourDegeneracy&)
    {
      res.disc_winding = -1;
      res.zeros.warnings.push_back("a solution lies on the disc boundary; disc winding unavailable");
    }

    res.zeros.L = fvm.L();
    res.zeros.N = fvm.volume();
    res.zeros.region = Rect::around(mp.z, rho_L);
    res.zeros.unresolved = scaled.unresolved;
    for (auto& u : res.zeros.unresolved)
      u = {mp.z.real() + u.re_lo / N, mp.z.real() + u.re_hi / N, mp.z.imag() + u.im_lo / N,
           mp.z.imag() + u.im_hi / N};
    res.zeros.warnings.insert(res.zeros.warnings.end(), scaled.warnings.begin(), scaled.warnings.end());
    for (const auto& z : scaled.zeros)
    {
      if (std::abs(z.z) > R * (1 + 1e-9))
        continue;
      Zero mapped = z;
      mapped.z = mp.z + z.z / N;
      res.zeros.zeros.push_back(mapped);
      res.scaled.push_back(z.z);
    }
    // the map s -> z_M + s/N is monotone in both coordinates, so the order stays canonical
    return res;
  }

  double AsymptoteLine::distance(Complex s) const
  {
    const Complex rel = (s - origin_offset) * std::conj(direction);
    if (rel.real() < 0)
      return std::abs(s - origin_offset);
    return std::abs(rel.imag());
  }

  std::vector<AsymptoteLine> asymptote_lines(const ModelSpec& model, const MultiplePoint& mp)
  {
    if (mp.stable_set.size() < 3)
      throw ArgumentError("asymptotes need a multiple point with at least three stable phases");
    std::vector<Complex> vstar;
    for (auto m : mp.stable_set)
    {
      if (m >= model.size())
        throw ArgumentError("stable set references an unknown phase");
      // Re(v s) = v* . s with v* = conj(v) read as a plane vector
      vstar.push_back(std::conj(model.v(m, mp.z)));
    }
    const PolygonCheck poly = convex_polygon_check(vstar);
    if (!poly.strictly_convex)
      throw ConvexityError("the v-values at the multiple point are not a strictly convex polygon");

    std::vector<AsymptoteLine> out;
    const std::size_t q = poly.ccw_order.size();
    for (std::size_t k = 0; k < q; k++)
    {
      const std::size_t a = poly.ccw_order[k], b = poly.ccw_order[(k + 1) % q];
      const Complex diff = vstar[a] - vstar[b];
      const double gap = std::abs(diff);
      const double lq = std::log(model.degeneracy(mp.stable_set[b]) / model.degeneracy(mp.stable_set[a]));
      AsymptoteLine line;
      line.from = mp.stable_set[a];
      line.to = mp.stable_set[b];
      line.origin_offset = diff / (gap * gap) * lq;
      line.direction = Complex(0, 1) * diff / gap;
      line.shift_magnitude = lq / gap;
      out.push_back(line);
    }
    return out;
  }

  DeltaL delta_L(const ModelSpec& model, Complex z, int L, int d, double gamma_L, double tau, double kappa,
                 const PhaseSet& pair)
  {
    if (L < 1 || d < 1)
      throw ArgumentError("L and d must be >= 1");
    if (!(gamma_L > 0) || !(tau > 0) || !(kappa > 0))
      throw ArgumentError("gamma_L, tau and kappa must be positive");
    if (pair.size() != 2 || pair[0] >= pair[1] || pair[1] >= model.size())
      throw ArgumentError("delta_L needs a sorted pair of distinct phase indices");
    if (!is_finite(z))
      throw ArgumentError("point must be finite");

    const double N = std::pow(static_cast<double>(L), d);
    DeltaL out;
    if (!eps_membership(model, z, gamma_L).in_U(pair))
      throw DomainError("point is not in U_gamma of the requested pair");
    if (L > 1 && !(N * gamma_L / std::log(static_cast<double>(L)) > 4.0 * d))
      out.warnings.push_back("gamma_L too small: N gamma_L / log L <= 4 d");
    if (!(std::pow(static_cast<double>(L), d - 1) * gamma_L < 2 * tau))
      out.warnings.push_back("gamma_L too large: L^(d-1) gamma_L >= 2 tau");

    out.inner = eps_membership(model, z, 2 * kappa / L).in_U(pair);
    out.value = out.inner ? std::exp(-tau * L) : N * std::exp(-0.5 * gamma_L * N);
    return out;
  }

  // ---------------------------------------------------------------------------------------

  double MatchReport::max_distance() const
  {
    double m = 0;
    for (const auto& p : pairs)
      m = std::max(m, p.distance);
    return m;
  }

  MatchReport match_zeros(const ZeroSet& predicted, const ZeroSet& located, const std::vector<double>& tolerances,
                          double c_match)
  {
    const std::size_t np = predicted.zeros.size(), nl = located.zeros.size();
    if (!(tolerances.size() == 1 || tolerances.size() == np))
      throw ArgumentError("need one tolerance per predicted zero, or a single shared tolerance");
    if (!(c_match > 0))
      throw ArgumentError("c_match must be positive");

    MatchReport rep;
    rep.c_match = c_match;
    struct Cand
    {
      double d;
      std::size_t i, j;
    };
    std::vector<Cand> cand;
    cand.reserve(np * nl);
    for (std::size_t i = 0; i < np; i++)
      for (std::size_t j = 0; j < nl; j++)
        cand.push_back({std::abs(predicted.zeros[i].z - located.zeros[j].z), i, j});
    std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) {
      return a.d < b.d || (a.d == b.d && (a.i < b.i || (a.i == b.i && a.j < b.j)));
    });

    std::vector<double> near_p(np, std::numeric_limits<double>::infinity());
    std::vector<double> near_l(nl, std::numeric_limits<double>::infinity());
    for (const auto& c : cand)
    {
      near_p[c.i] = std::min(near_p[c.i], c.d);
      near_l[c.j] = std::min(near_l[c.j], c.d);
    }

    std::vector<bool> used_p(np, false), used_l(nl, false);
    for (const auto& c : cand)
    {
      if (used_p[c.i] || used_l[c.j])
        continue;
      used_p[c.i] = used_l[c.j] = true;
      MatchPair p;
      p.predicted = c.i;
      p.located = c.j;
      p.distance = c.d;
      p.delta = tolerances.size() == 1 ? tolerances[0] : tolerances[c.i];
      p.mutual_nearest = c.d <= near_p[c.i] && c.d <= near_l[c.j];
      rep.stable = rep.stable && p.mutual_nearest;
      rep.pairs.push_back(p);
    }
    std::sort(rep.pairs.begin(), rep.pairs.end(),
              [](const MatchPair& a, const MatchPair& b) { return a.predicted < b.predicted; });
    for (std::size_t k = 0; k < rep.pairs.size(); k++)
      if (rep.pairs[k].distance > c_match * rep.pairs[k].delta)
        rep.violations.push_back(k);
    for (std::size_t i = 0; i < np; i++)
      if (!used_p[i])
        rep.unmatched_predicted.push_back(i);
    for (std::size_t j = 0; j < nl; j++)
      if (!used_l[j])
        rep.unmatched_located.push_back(j);

    rep.min_located_spacing = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nl; a++)
      for (std::size_t b = a + 1; b < nl; b++)
        rep.min_located_spacing = std::min(rep.min_located_spacing, std::abs(located.zeros[a].z - located.zeros[b].z));
    return rep;
  }

  DegeneracyReport degeneracy_audit(const FiniteVolumeModel& fvm, const ZeroSet& located)
  {
    const ModelSpec& base = fvm.base();
    const double eps = fvm.kappa() / fvm.L();
    const double omega_eps = std::log(std::max(fvm.N(), 2.0)) / fvm.N();
    DegeneracyReport rep;
    for (std::size_t k = 0; k < located.zeros.size(); k++)
    {
      const Zero& z = located.zeros[k];
      DegeneracyEntry e;
      e.zero = k;
      e.eps_stable = eps_membership(base, z.z, eps).almost_stable;
      e.multiplicity = z.multiplicity;
      e.multiplicity_ok = z.multiplicity <= static_cast<int>(e.eps_stable.size()) - 1;
      const EpsilonMembership wide = eps_membership(base, z.z, omega_eps);
      for (std::size_t m = 0; m < base.size(); m++)
        if (wide.in_U({m}))
          e.outside_single_phase = false;
      if (!e.multiplicity_ok || !e.outside_single_phase)
        rep.violations++;
      rep.max_multiplicity = std::max(rep.max_multiplicity, z.multiplicity);
      rep.entries.push_back(e);
    }
    return rep;
  }
}

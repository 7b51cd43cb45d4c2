#include "pfz/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <omp.h>

#include "pfz/errors.hpp"
#include "pfz/linalg.hpp"

namespace pfz
{
  VandermondeReport vandermonde_report(const FiniteVolumeModel& fvm, const PhaseSet& Q, Complex z)
  {
    const ModelSpec& base = fvm.base();
    if (Q.size() < 2)
      throw ArgumentError("Vandermonde report needs at least two phases");
    if (!std::is_sorted(Q.begin(), Q.end()) || std::adjacent_find(Q.begin(), Q.end()) != Q.end() ||
        Q.back() >= base.size())
      throw ArgumentError("phase set must be sorted, distinct and valid");
    if (!is_finite(z))
      throw ArgumentError("point must be finite");
    const EpsilonMembership em = eps_membership(base, z, fvm.kappa() / fvm.L());
    if (!is_subset(Q, em.almost_stable))
      throw DomainError("point is not in S_{kappa/L} of every requested phase");

    VandermondeReport rep;
    rep.Q = Q;
    rep.z = z;
    for (auto m : Q)
      rep.b_values.push_back(fvm.v(m, z));

    const std::size_t q = Q.size();
    linalg::CMatrix M(q, q);
    for (std::size_t j = 0; j < q; j++)
    {
      Complex p = 1;
      for (std::size_t l = 0; l < q; l++, p *= rep.b_values[j])
        M(l, j) = p;
    }

    rep.det_abs = std::abs(linalg::determinant(M));
    rep.det_product = 1;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q; a++)
      for (std::size_t b = a + 1; b < q; b++)
      {
        const double gap = std::abs(rep.b_values[b] - rep.b_values[a]);
        rep.det_product *= gap;
        min_gap = std::min(min_gap, gap);
      }
    rep.norm = linalg::spectral_norm(M);
    rep.inverse_bound = rep.det_abs > 0 ? std::pow(rep.norm, static_cast<double>(q - 1)) / rep.det_abs
                                        : std::numeric_limits<double>::infinity();
    if (min_gap < 1e-12)
    {
      rep.near_singular = true;
      rep.inverse_norm = std::numeric_limits<double>::infinity();
      rep.diagnostic = "two b-values closer than 1e-12: distinct log-derivatives fail at this point";
      return rep;
    }
    try
    {
      rep.inverse_norm = linalg::spectral_norm(linalg::inverse(M));
    }
    catch (const SingularityError&)
    {
      rep.near_singular = true;
      rep.inverse_norm = std::numeric_limits<double>::infinity();
      rep.diagnostic = "Vandermonde matrix is numerically singular";
    }
    return rep;
  }

  LeeYangReport lee_yang_audit(const FiniteVolumeModel& fvm, const ZeroSet& zeros, std::size_t plus,
                               std::size_t minus, double segment_lo, double segment_hi, GridSpec grid)
  {
    const ModelSpec& base = fvm.base();
    if (plus >= base.size() || minus >= base.size() || plus == minus)
      throw ArgumentError("plus and minus must be distinct valid phases");
    if (!(segment_hi > segment_lo))
      throw ArgumentError("segment needs lo < hi");
    if (grid.nx < 2 || grid.ny < 2)
      throw ArgumentError("audit grid needs at least 2 points per axis");

    const Rect& dom = base.domain();
    const double scale = std::max({std::abs(dom.re_lo), std::abs(dom.re_hi), 1.0});
    if (std::abs(dom.re_lo + dom.re_hi) > 1e-12 * scale)
      throw HypothesisViolation("domain is not symmetric under w -> -conj(w)");
    if (base.degeneracy(plus) != base.degeneracy(minus))
      throw HypothesisViolation("degeneracies of the + and - phases differ");

    const auto& pert = fvm.perturbation();
    auto pert_at = [&](std::size_t m, Complex w) {
      return (pert.empty() || pert[m].empty()) ? Complex(0) : pert[m](w);
    };

    LeeYangReport rep;
    rep.segment_lo = segment_lo;
    rep.segment_hi = segment_hi;
    const AnalyticFn W = normalized_partition_function(fvm);
    for (std::size_t j = 0; j < grid.ny; j++)
      for (std::size_t i = 0; i < grid.nx; i++)
      {
        const Complex w = grid.node(dom, i, j);
        const Complex wr = -std::conj(w);
        const double top = base.log_max(w);
        const double d = std::abs(std::exp(base.log_zeta(plus, w) - top) -
                                  std::exp(std::conj(base.log_zeta(minus, wr)) - top));
        rep.symmetry_defect = std::max(rep.symmetry_defect, d);
        rep.perturbation_defect =
            std::max(rep.perturbation_defect, std::abs(pert_at(plus, w) - std::conj(pert_at(minus, wr))));

        const PhaseSet q = stable_phases(base, w);
        for (auto m : q)
          if (m != plus && m != minus)
            throw HypothesisViolation("a phase other than + and - is stable inside the domain");

        // the full normalized partition function must carry the same symmetry
        const Complex a = W(w).f, b = W(wr).f;
        if (std::abs(a - std::conj(b)) > 1e-10 * std::max({std::abs(a), std::abs(b), 1.0}))
          throw HypothesisViolation("partition function is not symmetric under w -> -conj(w)");
      }
    if (rep.symmetry_defect > 1e-10)
      throw HypothesisViolation("zeta_+(w) differs from conj(zeta_-(-conj w)) on the audit grid");
    if (rep.perturbation_defect > 1e-10)
      throw HypothesisViolation("perturbations do not respect the +/- symmetry");

    for (const auto& z : zeros.zeros)
    {
      rep.max_abs_re = std::max(rep.max_abs_re, std::abs(z.z.real()));
      if (z.z.imag() > segment_lo && z.z.imag() <= segment_hi)
        rep.count += z.multiplicity;
    }
    rep.count_per_length = rep.count / (segment_hi - segment_lo);
    return rep;
  }

  CoveringReport covering_check(const ModelSpec& model, const Rect& region, int L, int d, double omega_L,
                                double gamma_L, double rho_L, GridSpec grid, Exec exec)
  {
    if (!region.valid())
      throw ArgumentError("covering region needs lo < hi on both axes");
    if (L < 1 || d < 1)
      throw ArgumentError("L and d must be >= 1");
    if (!(omega_L > 0) || !(gamma_L > 0) || !(rho_L >= 0))
      throw ArgumentError("omega_L and gamma_L must be positive, rho_L non-negative");
    if (grid.nx < 2 || grid.ny < 2)
      throw ArgumentError("covering grid needs at least 2 points per axis");
    const double N = std::pow(static_cast<double>(L), d);
    if (omega_L > gamma_L * N)
      throw ArgumentError("need omega_L <= gamma_L * N");

    CoveringReport rep;
    rep.multiple_points = find_multiple_points(model, region, GridSpec{41, 41});
    rep.grid_points = grid.nx * grid.ny;

    // 0 outside G, 1 two-phase covered, 2 disc covered, 3 uncovered
    std::vector<int> status(rep.grid_points, 0);
    std::vector<double> nearest(rep.grid_points, std::numeric_limits<double>::infinity());
    const double g_eps = omega_L / N;
    auto classify = [&](std::size_t k) {
      const Complex z = grid.node(region, k % grid.nx, k / grid.nx);
      if (eps_membership(model, z, g_eps).core.size() < 2)
        return;
      for (const auto& mp : rep.multiple_points)
        nearest[k] = std::min(nearest[k], std::abs(z - mp.z));
      const EpsilonMembership u = eps_membership(model, z, gamma_L);
      // some pair Q with core <= Q <= almost_stable exists
      if (u.core.size() <= 2 && u.almost_stable.size() >= 2)
        status[k] = 1;
      else if (nearest[k] < rho_L)
        status[k] = 2;
      else
        status[k] = 3;
    };
    const std::int64_t n = static_cast<std::int64_t>(rep.grid_points);
    if (exec == Exec::parallel)
    {
#pragma omp parallel for schedule(static)
      for (std::int64_t k = 0; k < n; k++)
        classify(static_cast<std::size_t>(k));
    }
    else
    {
      for (std::int64_t k = 0; k < n; k++)
        classify(static_cast<std::size_t>(k));
    }

    for (std::size_t k = 0; k < rep.grid_points; k++)
    {
      if (status[k] == 0)
        continue;
      rep.in_G++;
      if (status[k] == 1)
      {
        rep.covered_two_phase++;
        continue;
      }
      rep.chi = std::max(rep.chi, nearest[k] / gamma_L);
      if (status[k] == 2)
        rep.covered_disc++;
      else
        rep.uncovered.push_back({grid.node(region, k % grid.nx, k / grid.nx), nearest[k]});
    }
    return rep;
  }
}

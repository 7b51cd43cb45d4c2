#include "pfz/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pfz/errors.hpp"

namespace pfz
{
  double theoretical_density(const ModelSpec& model, std::size_t m, std::size_t n, Complex z)
  {
    if (m >= model.size() || n >= model.size())
      throw ArgumentError("phase index out of range");
    return std::abs(model.v(m, z) - model.v(n, z)) / (2 * std::numbers::pi);
  }

  DensitySample empirical_density(const ZeroSet& zeros, Complex z, double epsilon, int L, int d,
                                  double theoretical)
  {
    if (!(epsilon > 0) || !std::isfinite(epsilon))
      throw ArgumentError("epsilon must be positive");
    if (L < 1 || d < 1)
      throw ArgumentError("L and d must be >= 1");
    if (!zeros.region.contains_disc(z, epsilon))
      throw CoverageError("disc of radius epsilon is not inside the region searched for zeros");

    DensitySample s;
    s.z = z;
    s.epsilon = epsilon;
    s.L = L;
    s.d = d;
    s.N = std::pow(static_cast<double>(L), d);
    s.theoretical = theoretical;
    for (const auto& zero : zeros.zeros)
      if (std::abs(zero.z - z) < epsilon)
        s.count += zero.multiplicity;
    s.empirical = s.count / (2 * epsilon * s.N);
    if (theoretical > 0)
    {
      if (2 * epsilon < 1.0 / (s.N * theoretical))
        s.warnings.push_back("disc diameter " + std::to_string(2 * epsilon) +
                             " is below the expected zero spacing");
    }
    else if (s.count <= 1)
      s.warnings.push_back("disc holds at most one zero; density estimate is meaningless");
    return s;
  }

  std::vector<DensityRow> density_convergence(const ModelSpec& model, std::size_t m, std::size_t n,
                                              Complex z, const std::vector<double>& eps_list,
                                              const std::vector<int>& L_list, int d, Exec exec)
  {
    if (eps_list.empty() || L_list.empty())
      throw ArgumentError("epsilon and L lists must be non-empty");
    if (m >= model.size() || n >= model.size() || m == n)
      throw ArgumentError("density needs two distinct phase indices");
    const PhaseSet q = stable_phases(model, z, default_tol_mp);
    if (!set_contains(q, m) || !set_contains(q, n))
      throw DomainError("density point is not a coexistence point of the pair");

    const double theo = theoretical_density(model, m, n, z);
    std::vector<DensityRow> rows;
    for (double eps : eps_list)
    {
      const Rect box = Rect::around(z, eps * (1 + 1e-6));
      if (!model.domain().contains({box.re_lo, box.im_lo}) || !model.domain().contains({box.re_hi, box.im_hi}))
        throw CoverageError("disc of radius epsilon leaves the model domain");

      // the coexistence curve through the disc, clipped to the box
      TraceOptions topts;
      topts.step = eps / 200;
      topts.max_steps = 100000;
      const CoexistenceCurve full = trace_curve(model.with_domain(box), m, n, z, topts);

      for (int L : L_list)
      {
        const FiniteVolumeModel fvm = finite_volume(model, L, d, 1.0, 1.0);
        DensityRow row;
        const ZeroSet located = find_zeros_region(fvm, box, 40, exec);
        row.sample = empirical_density(located, z, eps, L, d, theo);
        ZeroSet predicted = predict_two_phase(fvm, full);
        predicted.region = box;
        row.predicted_count = empirical_density(predicted, z, eps, L, d, theo).count;
        row.abs_error = std::abs(row.sample.empirical - theo);
        row.envelope = eps + 1.0 / (eps * row.sample.N);
        rows.push_back(std::move(row));
      }
    }
    return rows;
  }
}

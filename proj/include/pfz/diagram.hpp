#ifndef PFZ_DIAGRAM_HPP
#define PFZ_DIAGRAM_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pfz/model.hpp"

namespace pfz
{
  //! root of a real function along the line base + s*dir, |s| <= max_shift
  //!
  //! Safeguarded Newton: brackets the root by expanding from s = 0, then mixes Newton steps
  //! with bisection. `fn` returns (value, directional derivative along dir).
  //! Throws NoConvergence (carrying the last iterate) when no bracket exists or when the
  //! iteration budget runs out.
  Complex solve_on_line(const std::function<std::array<double, 2>(Complex)>& fn, Complex base,
                        Complex dir, double max_shift, double tol, int max_iter = 50);

  //! point with Re(P_m - P_n) = 0 near the seed, moving only along the coordinate axis on
  //! which the gradient is larger; the search is confined to a box of half-width max_shift
  Complex find_coexistence_point(const ModelSpec& model, std::size_t m, std::size_t n,
                                 Complex seed, double max_shift = 1.0);

  struct CurveSample
  {
    double t = 0; //!< arc length, 0 at the start point
    Complex z;
    Complex v_m, v_n;
  };

  enum class Termination { domain_boundary, multiple_point, closed_loop, truncated };

  const char* to_string(Termination t);

  struct CurveEnd
  {
    Termination kind = Termination::truncated;
    PhaseSet multiple_point_phases; //!< stable set at the end when kind == multiple_point
    std::string diagnostic;
  };

  //! polyline sampling of one two-phase coexistence arc, ordered by arc length
  struct CoexistenceCurve
  {
    std::size_t m = 0, n = 0;
    std::vector<CurveSample> samples;
    CurveEnd start, end;

    bool closed() const { return end.kind == Termination::closed_loop; }
    double length() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
  };

  struct TraceOptions
  {
    double step = 0.01;
    std::size_t max_steps = 100000; //!< per direction
    double eps_mp = 1e-6;           //!< third-phase handoff threshold
  };

  CoexistenceCurve trace_curve(const ModelSpec& model, std::size_t m, std::size_t n, Complex z0,
                               const TraceOptions& opts);

  //! unit tangent of the (m,n) level curve at z, i * conj(g')/|g'| with g = P_m - P_n
  Complex curve_tangent(const ModelSpec& model, std::size_t m, std::size_t n, Complex z);

  struct ArcRef
  {
    std::size_t curve = 0;
    bool at_end = false; //!< which end of the curve touches the multiple point
    Complex tangent;     //!< unit direction leaving the multiple point
  };

  struct MultiplePoint
  {
    Complex z;
    PhaseSet stable_set;
    std::vector<Complex> v_values; //!< aligned with stable_set
    std::vector<ArcRef> incident_arcs;
  };

  constexpr double default_tol_mp = 1e-9;

  //! 2D Newton for Re(P_a - P_b) = Re(P_a - P_c) = 0
  MultiplePoint find_multiple_point(const ModelSpec& model, std::array<std::size_t, 3> triple,
                                    Complex seed);

  //! seed triple whose Newton system was singular (parallel gradients or collinear rates)
  struct DegenerateSeed
  {
    Complex z;
    std::array<std::size_t, 3> triple;
  };

  //! multiple points seeded from grid cells where three or more phases are maximal, sorted
  //! by (re, im)
  std::vector<MultiplePoint> find_multiple_points(const ModelSpec& model, const Rect& region,
                                                  GridSpec grid,
                                                  std::vector<DegenerateSeed>* degenerate = nullptr);

  struct PhaseDiagram
  {
    std::vector<CoexistenceCurve> curves;
    std::vector<MultiplePoint> multiple_points;
    std::optional<double> min_angle; //!< smallest pairwise tangent angle at multiple points
    std::vector<std::string> diagnostics;
  };

  struct DiagramOptions
  {
    GridSpec grid;
    double step = 0;   //!< 0 selects 1e-2 * min(domain side)
    std::size_t max_steps = 0; //!< 0 selects enough steps to walk the domain perimeter 4 times
    Exec exec = Exec::parallel;
  };

  PhaseDiagram build_phase_diagram(const ModelSpec& model, const DiagramOptions& opts);

  //! symmetric Hausdorff distance between the sample polylines of two curves
  double hausdorff_distance(const CoexistenceCurve& a, const CoexistenceCurve& b);
}

#endif // PFZ_DIAGRAM_HPP

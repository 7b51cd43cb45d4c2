#ifndef PFZ_ANALYSIS_HPP
#define PFZ_ANALYSIS_HPP

#include <string>
#include <vector>

#include "pfz/zeros.hpp"

namespace pfz
{
  struct VandermondeReport
  {
    PhaseSet Q;
    Complex z;
    std::vector<Complex> b_values; //!< aligned with Q
    double det_abs = 0;            //!< |det M| by LU
    double det_product = 0;        //!< prod_{m<n} |b_n - b_m|
    double norm = 0;               //!< ||M||
    double inverse_norm = 0;       //!< ||M^{-1}||, infinity when near-singular
    double inverse_bound = 0;      //!< ||M||^{q-1} / |det M|
    bool near_singular = false;
    std::string diagnostic;
  };

  //! Vandermonde matrix M_{l,m} = b_m(z)^l of the finite-volume log-derivatives
  VandermondeReport vandermonde_report(const FiniteVolumeModel& fvm, const PhaseSet& Q, Complex z);

  struct LeeYangReport
  {
    double max_abs_re = 0;        //!< max |Re w| over all zeros
    int count = 0;                //!< zeros (with multiplicity) with Im w in the segment
    double segment_lo = 0, segment_hi = 0;
    double count_per_length = 0;
    double symmetry_defect = 0;   //!< max relative weight mismatch seen on the grid
    double perturbation_defect = 0;
  };

  //! local Lee-Yang audit in the field coordinate; refuses (HypothesisViolation) unless the
  //! +/- phases and perturbations are exchanged by w -> -conj(w) and q_+ = q_-
  LeeYangReport lee_yang_audit(const FiniteVolumeModel& fvm, const ZeroSet& zeros,
                               std::size_t plus, std::size_t minus, double segment_lo,
                               double segment_hi, GridSpec grid = {41, 41});

  struct CoveringPoint
  {
    Complex z;
    double nearest_mp = 0; //!< distance to the closest multiple point (infinity if none)
  };

  struct CoveringReport
  {
    std::size_t grid_points = 0;
    std::size_t in_G = 0;         //!< points of G_{omega/N}
    std::size_t covered_two_phase = 0;
    std::size_t covered_disc = 0;
    std::vector<CoveringPoint> uncovered;
    double chi = 0;               //!< smallest rho/gamma that would cover every G point
    std::vector<MultiplePoint> multiple_points;
  };

  CoveringReport covering_check(const ModelSpec& model, const Rect& region, int L, int d,
                                double omega_L, double gamma_L, double rho_L, GridSpec grid,
                                Exec exec = Exec::parallel);
}

#endif // PFZ_ANALYSIS_HPP

#ifndef PFZ_ZEROS_HPP
#define PFZ_ZEROS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pfz/diagram.hpp"
#include "pfz/model.hpp"

namespace pfz
{
  // ---------------------------------------------------------------------------------------
  // argument-principle machinery
  // ---------------------------------------------------------------------------------------

  //! value and derivative of an analytic function, both multiplied by the same positive
  //! factor (so arg f and f/f' are exact even when f itself would overflow)
  struct ScaledValue
  {
    Complex f;
    Complex df;
  };

  using AnalyticFn = std::function<ScaledValue(Complex)>;

  //! closed, positively oriented contour made of pieces parametrized over [0,1]
  class Contour
  {
  public:
    static Contour circle(Complex center, double radius);
    static Contour polygon(std::vector<Complex> vertices);
    static Contour rectangle(const Rect& r);

    std::size_t pieces() const;
    Complex point(std::size_t piece, double s) const;
    double piece_length(std::size_t piece) const;
    Rect bounding_box() const;

  private:
    bool is_circle_ = false;
    Complex center_;
    double radius_ = 0;
    std::vector<Complex> vertices_;
  };

  struct WindingOptions
  {
    double rate_hint = 1.0; //!< expected |d arg f / ds|, sets the initial sampling density
    int max_depth = 52;     //!< bisection levels per initial interval
  };

  //! winding number of f around the contour; throws ContourDegeneracy when a zero sits on it
  int winding_number(const AnalyticFn& f, const Contour& contour, const WindingOptions& opts);

  // ---------------------------------------------------------------------------------------
  // zero sets
  // ---------------------------------------------------------------------------------------

  enum class ZeroMethod { brute_force, two_phase_eq, multipoint_eq };

  const char* to_string(ZeroMethod m);

  struct Zero
  {
    Complex z;
    int multiplicity = 1;
    double residual = 0;
    ZeroMethod method = ZeroMethod::brute_force;
  };

  struct ZeroSet
  {
    std::vector<Zero> zeros; //!< sorted lexicographically by (re, im)
    Rect region;
    int L = 0;
    std::int64_t N = 0;
    std::vector<Rect> unresolved; //!< cells left with positive winding at max depth
    std::vector<std::string> warnings;

    //! sorts and merges entries closer than 1e-12
    void canonicalize();
    int total_multiplicity() const;
    //! zeros inside rect (closed)
    ZeroSet restricted(const Rect& rect) const;
  };

  struct QuadtreeOptions
  {
    int max_depth = 40;
    double min_cell_diameter = 1e-3;
    double multiplicity_radius = 1e-2;
    double residual_tol = 1e-10;
    double rate_hint = 1.0;
    ZeroMethod method = ZeroMethod::brute_force;
  };

  //! all zeros of f in box by quadtree subdivision on cell windings plus Newton polishing
  //!
  //! Exec::serial is the depth-first reference; Exec::parallel processes each tree level with
  //! OpenMP. Both return identical canonical sets.
  ZeroSet find_zeros_analytic(const AnalyticFn& f, const Rect& box, const QuadtreeOptions& opts,
                              Exec exec = Exec::parallel);

  // ---------------------------------------------------------------------------------------
  // finite-volume partition function
  // ---------------------------------------------------------------------------------------

  //! W(z) = Z_L^per(z) zeta(z)^{-N}, evaluated in log space
  Complex eval_logZ_normalized(const FiniteVolumeModel& fvm, Complex z);

  //! W and W' scaled by the same factor zeta(z)^{-N}
  AnalyticFn normalized_partition_function(const FiniteVolumeModel& fvm);

  //! N * max |v_m| over the corners and center of rect
  double phase_rate(const FiniteVolumeModel& fvm, const Rect& rect);

  int winding_number(const FiniteVolumeModel& fvm, const Contour& contour);

  //! brute-force zeros of Z_L^per in box (min cell 1e-3/N, multiplicity radius 1e-2/N)
  ZeroSet find_zeros_region(const FiniteVolumeModel& fvm, const Rect& box, int max_depth = 40,
                            Exec exec = Exec::parallel);

  // ---------------------------------------------------------------------------------------
  // predicted zeros
  // ---------------------------------------------------------------------------------------

  //! solutions of the two-phase modulus/phase equations along a traced (m,n) curve
  ZeroSet predict_two_phase(const FiniteVolumeModel& fvm, const CoexistenceCurve& curve);

  //! predict_two_phase over every curve of the phase diagram of box, restricted to box
  ZeroSet predict_two_phase_region(const FiniteVolumeModel& fvm, const Rect& box,
                                   const DiagramOptions& opts = {});

  struct MultipointPrediction
  {
    ZeroSet zeros;                   //!< in the original coordinate z
    std::vector<Complex> scaled;     //!< same zeros in N (z - z_M), aligned with zeros.zeros
    std::vector<double> phases;      //!< phi_m(L) aligned with the stable set
    int disc_winding = 0;            //!< winding of G on |scaled| = N rho_L
    double radius = 0;               //!< rho_L
  };

  //! zeros of G(s) = sum_{m in Q} q_m exp(i phi_m + v_m s) with |s| <= N rho_L, mapped back
  MultipointPrediction predict_multipoint(const FiniteVolumeModel& fvm, const MultiplePoint& mp,
                                          double rho_L, Exec exec = Exec::parallel);

  struct AsymptoteLine
  {
    std::size_t from = 0, to = 0; //!< consecutive phases (n, n+1) on the hull of the v*
    Complex origin_offset;         //!< in scaled units N (z - z_M)
    Complex direction;             //!< unit
    double shift_magnitude = 0;    //!< log(q_{n+1}/q_n) / |v_n - v_{n+1}|

    //! distance from a scaled point to the half-line
    double distance(Complex s) const;
  };

  std::vector<AsymptoteLine> asymptote_lines(const ModelSpec& model, const MultiplePoint& mp);

  struct DeltaL
  {
    double value = 0;
    bool inner = false; //!< e^{-tau L} branch
    std::vector<std::string> warnings;
  };

  //! per-zero tolerance for the two-phase correspondence; throws DomainError outside
  //! U_gamma(Q)
  DeltaL delta_L(const ModelSpec& model, Complex z, int L, int d, double gamma_L, double tau,
                 double kappa, const PhaseSet& pair);

  // ---------------------------------------------------------------------------------------
  // comparison and audits
  // ---------------------------------------------------------------------------------------

  struct MatchPair
  {
    std::size_t predicted = 0, located = 0;
    double distance = 0;
    double delta = 0;
    bool mutual_nearest = true;
  };

  struct MatchReport
  {
    std::vector<MatchPair> pairs;
    std::vector<std::size_t> unmatched_predicted, unmatched_located;
    double min_located_spacing = 0; //!< infinity when fewer than two zeros
    double c_match = 10;
    std::vector<std::size_t> violations; //!< indices into pairs with distance > c_match*delta
    bool stable = true;                  //!< every pair mutually nearest

    double max_distance() const;
  };

  //! greedy nearest-neighbour one-to-one matching; tolerances are per predicted zero (a
  //! single entry is broadcast)
  MatchReport match_zeros(const ZeroSet& predicted, const ZeroSet& located,
                          const std::vector<double>& tolerances, double c_match = 10.0);

  struct DegeneracyEntry
  {
    std::size_t zero = 0;
    PhaseSet eps_stable;
    int multiplicity = 0;
    bool multiplicity_ok = true;
    bool outside_single_phase = true;
  };

  struct DegeneracyReport
  {
    std::vector<DegeneracyEntry> entries;
    std::size_t violations = 0;
    int max_multiplicity = 0;
  };

  //! multiplicity <= |Q|-1 with Q the kappa/L-stable set, and no zero in U_{log N/N}({m})
  DegeneracyReport degeneracy_audit(const FiniteVolumeModel& fvm, const ZeroSet& located);

  //! defaults: gamma_L = 5 log N / N, omega_L = log N, rho_L = log N / N
  struct ScaleParams
  {
    double gamma_scale = 5.0;
    double rho_scale = 1.0;
    double gamma(double N) const { return gamma_scale * std::log(N) / N; }
    double rho(double N) const { return rho_scale * std::log(N) / N; }
    static double omega(double N) { return std::log(N); }
  };
}

#endif // PFZ_ZEROS_HPP

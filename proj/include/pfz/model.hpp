#ifndef PFZ_MODEL_HPP
#define PFZ_MODEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfz/types.hpp"

namespace pfz
{
  //! complex polynomial sum_j c_j z^j
  class Poly
  {
  public:
    Poly() = default;
    explicit Poly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {}

    Complex operator()(Complex z) const
    {
      Complex acc = 0;
      for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        acc = acc * z + *it;
      return acc;
    }

    Complex derivative(Complex z) const
    {
      Complex acc = 0;
      for (std::size_t j = c_.size(); j-- > 1;)
        acc = acc * z + static_cast<double>(j) * c_[j];
      return acc;
    }

    const std::vector<Complex>& coeffs() const { return c_; }
    bool empty() const { return c_.empty(); }

  private:
    std::vector<Complex> c_;
  };

  //! one metastable phase with weight zeta_m(z) = exp(P_m(z)) and degeneracy q_m
  struct PhaseSpec
  {
    std::string name;
    int degeneracy = 1;
    std::vector<Complex> exponent;
  };

  //! field coordinate w to presentation coordinate (z = e^w for Lee-Yang pictures)
  enum class CoordinateMap { identity, exponential };

  inline Complex to_presentation(CoordinateMap map, Complex w)
  {
    return map == CoordinateMap::exponential ? std::exp(w) : w;
  }

  //! immutable description of r >= 2 phase weights on a rectangular domain
  class ModelSpec
  {
  public:
    ModelSpec(std::vector<PhaseSpec> phases, Rect domain,
              CoordinateMap map = CoordinateMap::identity, double alpha_ref = 1.0);

    std::size_t size() const { return phases_.size(); }
    const PhaseSpec& phase(std::size_t m) const;
    const Rect& domain() const { return domain_; }
    CoordinateMap coordinate_map() const { return map_; }
    double alpha_ref() const { return alpha_ref_; }

    Complex log_zeta(std::size_t m, Complex z) const { return poly_.at(m)(z); }
    Complex v(std::size_t m, Complex z) const { return poly_.at(m).derivative(z); }
    double degeneracy(std::size_t m) const { return phases_.at(m).degeneracy; }

    //! log zeta(z) = max_m Re P_m(z)
    double log_max(Complex z) const;
    //! sum of all degeneracies
    double total_degeneracy() const;
    //! same model with a different domain
    ModelSpec with_domain(Rect domain) const;

  private:
    std::vector<PhaseSpec> phases_;
    std::vector<Poly> poly_;
    Rect domain_;
    CoordinateMap map_;
    double alpha_ref_;
  };

  //! P_m(z); throws ArgumentError on a bad phase index or non-finite z
  Complex eval_log_zeta(const ModelSpec& model, std::size_t m, Complex z);
  //! v_m(z) = zeta_m'(z) / zeta_m(z) = P_m'(z)
  Complex eval_v(const ModelSpec& model, std::size_t m, Complex z);

  constexpr double default_tol_stab = 1e-12;

  //! membership of z in the epsilon-neighbourhood sets for a single epsilon
  struct EpsilonMembership
  {
    double eps = 0;
    PhaseSet almost_stable; //!< {m : z in S_eps(m)}
    PhaseSet core;          //!< {m : z in closure of S_{eps/2}(m)}

    //! z in U_eps(Q) iff core <= Q <= almost_stable
    bool in_U(const PhaseSet& Q) const
    {
      return !Q.empty() && is_subset(core, Q) && is_subset(Q, almost_stable);
    }
  };

  struct StabilityReport
  {
    Complex z;
    double log_max = 0;
    PhaseSet stable_set;
    std::vector<EpsilonMembership> eps_sets;
  };

  StabilityReport stability(const ModelSpec& model, Complex z, std::span<const double> eps_list,
                            double tol_stab = default_tol_stab);

  //! membership sets for one epsilon, without the domain check
  EpsilonMembership eps_membership(const ModelSpec& model, Complex z, double eps,
                                   double tol_stab = default_tol_stab);

  //! stable set Q(z) with absolute-or-relative tolerance; no domain check
  PhaseSet stable_phases(const ModelSpec& model, Complex z, double tol = default_tol_stab);

  //! result of the strict-convexity test for a point configuration
  struct PolygonCheck
  {
    bool strictly_convex = false;
    double margin = 0;                   //!< minimal consecutive cross product (<= 0 fails)
    std::vector<std::size_t> ccw_order; //!< indices sorted counterclockwise about the centroid
  };

  PolygonCheck convex_polygon_check(std::span<const Complex> points);

  //! sampling grid over a rectangle (nx x ny nodes, corners included)
  struct GridSpec
  {
    std::size_t nx = 41;
    std::size_t ny = 41;
    Complex node(const Rect& r, std::size_t i, std::size_t j) const
    {
      return {r.re_lo + r.width() * static_cast<double>(i) / static_cast<double>(nx - 1),
              r.im_lo + r.height() * static_cast<double>(j) / static_cast<double>(ny - 1)};
    }
  };

  struct CoexistenceSample
  {
    std::size_t m = 0, n = 0;
    Complex z;
    double v_gap = 0; //!< |v_m - v_n|
  };

  struct ConvexityResult
  {
    Complex z;
    PhaseSet phases;
    bool strictly_convex = false;
    double margin = 0;
  };

  struct AssumptionViolation
  {
    Complex z;
    std::string assumption; //!< "positivity", "nondegeneracy" or "convexity"
    double margin = 0;
  };

  struct AssumptionReport
  {
    std::optional<double> alpha_estimate; //!< empty if no coexistence point was sampled
    bool positivity_ok = false;
    double min_log_zeta = 0; //!< min over the grid of log zeta(z)
    std::vector<CoexistenceSample> samples;
    std::vector<ConvexityResult> convexity;
    std::vector<AssumptionViolation> violations;
  };

  AssumptionReport check_assumption_A(const ModelSpec& model, GridSpec grid,
                                      Exec exec = Exec::parallel);

  //! a ModelSpec at finite volume N = L^d with synthetic exponentially small corrections
  class FiniteVolumeModel
  {
  public:
    const ModelSpec& base() const { return base_; }
    int L() const { return L_; }
    int d() const { return d_; }
    std::int64_t volume() const { return volume_; }
    double N() const { return static_cast<double>(volume_); }
    double tau() const { return tau_; }
    double kappa() const { return kappa_; }
    double xi_strength() const { return theta_; }
    //! e^{-tau L}
    double correction_scale() const { return corr_; }
    //! normalized perturbation polynomials (empty when unperturbed)
    const std::vector<Poly>& perturbation() const { return pert_; }

    //! log zeta_m^{(L)}(z) = P_m(z) + e^{-tau L} u_m(z)
    Complex log_zeta(std::size_t m, Complex z) const;
    //! b_m(z) = d/dz log zeta_m^{(L)}(z)
    Complex v(std::size_t m, Complex z) const;
    //! Xi(z) zeta(z)^{-N}; Xi = theta e^{-tau L} N sum_m q_m zeta_m^{(L)}(z)^N
    Complex xi_normalized(Complex z) const;

  private:
    friend FiniteVolumeModel finite_volume(const ModelSpec&, int, int, double, double,
                                           std::vector<Poly>, double);
    FiniteVolumeModel(ModelSpec base) : base_(std::move(base)) {}

    ModelSpec base_;
    int L_ = 1, d_ = 1;
    std::int64_t volume_ = 1;
    double tau_ = 1, kappa_ = 1, theta_ = 0, corr_ = 0;
    std::vector<Poly> pert_;
  };

  //! builds the finite-volume model; perturbation polys are shrunk so that their sup on
  //! a 101 x 101 domain grid is at most 1
  FiniteVolumeModel finite_volume(const ModelSpec& model, int L, int d, double tau, double kappa,
                                  std::vector<Poly> perturbation = {}, double xi_strength = 0.0);

  //! sup of |p| over an n x n grid on rect
  double grid_sup(const Poly& p, const Rect& rect, std::size_t n = 101);

  //! one random polynomial of the given degree per phase, coefficients uniform in the unit
  //! square, reproducible from the seed on every platform
  std::vector<Poly> random_perturbation(const ModelSpec& model, std::uint64_t seed, int degree);

  //! like random_perturbation, but u_minus(w) = conj(u_plus(-conj w)) so that the +/- symmetry
  //! w -> -conj(w) survives; other phases get independent polynomials
  std::vector<Poly> symmetric_perturbation(const ModelSpec& model, std::size_t plus, std::size_t minus,
                                           std::uint64_t seed, int degree);
}

#endif // PFZ_MODEL_HPP

#ifndef PFZ_DENSITY_HPP
#define PFZ_DENSITY_HPP

#include <string>
#include <vector>

#include "pfz/zeros.hpp"

namespace pfz
{
  struct DensitySample
  {
    Complex z;
    double epsilon = 0;
    int L = 0, d = 1;
    double N = 0;
    int count = 0;
    double empirical = 0;   //!< count / (2 eps N)
    double theoretical = 0; //!< |v_m - v_n| / (2 pi); 0 when not supplied
    std::vector<std::string> warnings;
  };

  //! limiting line density |v_m - v_n| / (2 pi)
  double theoretical_density(const ModelSpec& model, std::size_t m, std::size_t n, Complex z);

  //! disc count of zeros (with multiplicity) in the open disc D_eps(z); a positive
  //! `theoretical` enables the spacing warning
  DensitySample empirical_density(const ZeroSet& zeros, Complex z, double epsilon, int L, int d,
                                  double theoretical = 0.0);

  struct DensityRow
  {
    DensitySample sample;
    int predicted_count = 0;
    double abs_error = 0;
    double envelope = 0; //!< eps + 1/(eps N)
  };

  //! epsilon-blocks of L-rows: predicted and brute-force zeros counted in D_eps(z)
  std::vector<DensityRow> density_convergence(const ModelSpec& model, std::size_t m, std::size_t n,
                                              Complex z, const std::vector<double>& eps_list,
                                              const std::vector<int>& L_list, int d,
                                              Exec exec = Exec::parallel);
}

#endif // PFZ_DENSITY_HPP

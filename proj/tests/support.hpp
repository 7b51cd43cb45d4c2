#ifndef PFZ_TEST_SUPPORT_HPP
#define PFZ_TEST_SUPPORT_HPP

#include <cmath>
#include <vector>

#include "pfz/model.hpp"

namespace pfz::test
{
  inline const Complex omega = std::polar(1.0, 2 * M_PI / 3);

  //! P_1 = z, P_2 = -z
  inline ModelSpec m2(int q1 = 1, int q2 = 1, Rect domain = {-0.1, 0.1, 0.0, 0.2})
  {
    return ModelSpec({{"plus", q1, {0.0, 1.0}}, {"minus", q2, {0.0, -1.0}}}, domain);
  }

  //! P_m = omega^(m-1) (z - shift)
  inline ModelSpec m3(std::vector<int> q = {1, 1, 1}, Rect domain = {-0.5, 0.5, -0.5, 0.5}, Complex shift = 0.0)
  {
    std::vector<PhaseSpec> ph;
    const char* names[] = {"a", "b", "c"};
    for (int m = 0; m < 3; m++)
    {
      const Complex w = std::pow(omega, m);
      ph.push_back({names[m], q[m], {-w * shift, w}});
    }
    return ModelSpec(ph, domain);
  }

  //! linear phases P_m = v_m z
  inline ModelSpec linear(const std::vector<Complex>& v, Rect domain = {-0.5, 0.5, -0.5, 0.5})
  {
    std::vector<PhaseSpec> ph;
    for (std::size_t m = 0; m < v.size(); m++)
      ph.push_back({"p" + std::to_string(m), 1, {0.0, v[m]}});
    return ModelSpec(ph, domain);
  }

  //! field-coordinate model P_+ = w, P_- = -w
  inline ModelSpec mly(int q_minus = 1, Rect domain = {-0.1, 0.1, -0.1, 1.1})
  {
    return ModelSpec({{"plus", 1, {0.0, 1.0}}, {"minus", q_minus, {0.0, -1.0}}}, domain,
                     CoordinateMap::exponential);
  }

  //! the zeros i pi (2k+1) / (2N) of cosh(Nz) with lo < Im <= hi
  inline std::vector<double> cosh_zero_heights(double N, double lo, double hi)
  {
    std::vector<double> out;
    for (int k = -1000000; k < 1000000; k++)
    {
      const double y = M_PI * (2 * k + 1) / (2 * N);
      if (y > lo && y <= hi)
        out.push_back(y);
      if (y > hi)
        break;
    }
    return out;
  }
}

#endif // PFZ_TEST_SUPPORT_HPP

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "pfz/analysis.hpp"
#include "pfz/zeros.hpp"

using namespace pfz;

namespace
{
  double seconds(const std::function<void()>& fn)
  {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  ModelSpec three_phase()
  {
    const Complex w = std::polar(1.0, 2 * M_PI / 3);
    return ModelSpec({{"a", 1, {0.0, 1.0}}, {"b", 1, {0.0, w}}, {"c", 1, {0.0, w * w}}},
                     Rect{-0.5, 0.5, -0.5, 0.5});
  }
}

int main()
{
  std::printf("threads %d\n", omp_get_max_threads());

  const ModelSpec m3 = three_phase();
  const FiniteVolumeModel f = finite_volume(m3, 1000, 1, 0.02, 1.0, random_perturbation(m3, 1, 3), 0.5);
  const Rect box{-0.2, 0.2, -0.2, 0.2};
  std::size_t ns = 0, np = 0;
  const double ts = seconds([&] { ns = find_zeros_region(f, box, 40, Exec::serial).zeros.size(); });
  const double tp = seconds([&] { np = find_zeros_region(f, box, 40, Exec::parallel).zeros.size(); });
  std::printf("find_zeros  serial %.3fs (%zu)  parallel %.3fs (%zu)\n", ts, ns, tp, np);

  const double N = 1000;
  const ScaleParams s;
  const double cs = seconds([&] {
    covering_check(m3, m3.domain(), 1000, 1, ScaleParams::omega(N), s.gamma(N), s.rho(N), {401, 401}, Exec::serial);
  });
  const double cp = seconds([&] {
    covering_check(m3, m3.domain(), 1000, 1, ScaleParams::omega(N), s.gamma(N), s.rho(N), {401, 401}, Exec::parallel);
  });
  std::printf("covering    serial %.3fs  parallel %.3fs\n", cs, cp);
  return 0;
}

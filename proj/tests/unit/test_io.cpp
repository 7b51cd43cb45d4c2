#include <doctest.h>

#include <random>
#include <sstream>

#include "pfz/errors.hpp"
#include "pfz/io.hpp"
#include "support.hpp"

using namespace pfz;
using test::m2;
using test::m3;

namespace
{
  std::size_t count(const std::string& hay, const std::string& needle)
  {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1))
      n++;
    return n;
  }

  std::string error_of(const std::string& text)
  {
    try
    {
      io::parse_model(text, "m.json");
    }
    catch (const ValidationError& e)
    {
      return e.what();
    }
    return "";
  }
}

TEST_CASE("model files")
{
  const std::string text = R"({
  "phases": [
    {"name": "plus", "q": 1, "coeffs": [[0, 0], [1, 0]]},
    {"name": "minus", "q": 3, "coeffs": [[0.5, -1], [-1, 0], [0, 2]]}
  ],
  "domain": {"re": [-0.1, 0.1], "im": [0, 0.2]},
  "coordinate_map": "exponential",
  "alpha_ref": 1.5
})";
  const ModelSpec m = io::parse_model(text);
  CHECK(m.size() == 2);
  CHECK(m.degeneracy(1) == 3);
  CHECK(m.phase(1).exponent[2] == Complex(0, 2));
  CHECK(m.coordinate_map() == CoordinateMap::exponential);
  CHECK(m.alpha_ref() == 1.5);
  CHECK(m.domain().im_hi == 0.2);

  const ModelSpec back = io::parse_model(io::model_to_json(m).dump());
  CHECK(back.phase(1).exponent == m.phase(1).exponent);
  CHECK(back.phase(0).name == "plus");

  CHECK(error_of("{\n  \"phases\": [,\n}").rfind("m.json:2:", 0) == 0);
  CHECK(error_of(R"({"domain": {"re": [0, 1], "im": [0, 1]}})").find("phases") != std::string::npos);
  CHECK(error_of(R"({"phases": [{"name": "a", "q": 1.5, "coeffs": [[0, 0]]}, {"name": "b", "coeffs": [[1, 0]]}],
                     "domain": {"re": [0, 1], "im": [0, 1]}})")
            .find("phases[0].q") != std::string::npos);
  CHECK(error_of(R"({"phases": [{"name": "a", "coeffs": [[0, 0]]}, {"name": "b", "coeffs": [1]}],
                     "domain": {"re": [0, 1], "im": [0, 1]}})")
            .find("[re, im]") != std::string::npos);
  CHECK(error_of(R"({"phases": [{"name": "a", "coeffs": [[0, 0]]}, {"name": "b", "coeffs": [[1, 0]]}],
                     "domain": {"re": [1, 0], "im": [0, 1]}})") != "");
  CHECK(error_of(R"({"phases": [{"name": "a", "coeffs": [[0, 0]]}, {"name": "b", "coeffs": [[1, 0]]}],
                     "domain": {"re": [0, 1], "im": [0, 1]}, "coordinate_map": "log"})")
            .find("coordinate_map") != std::string::npos);
  CHECK_THROWS_AS(io::load_model("/nonexistent/model.json"), ValidationError);
}

TEST_CASE("property: zero CSVs round-trip to the last bit")
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  ZeroSet zs;
  for (int k = 0; k < 200; k++)
    zs.zeros.push_back({{u(rng) * std::pow(10.0, 20 * u(rng)), u(rng)}, 1 + k % 3, std::abs(u(rng)) * 1e-12,
                        static_cast<ZeroMethod>(k % 3)});
  zs.zeros.push_back({{5e-320, -0.0}, 1, 0, ZeroMethod::brute_force});
  std::stringstream ss;
  io::write_zeros_csv(ss, zs);
  CHECK(ss.str().rfind("re_z,im_z,multiplicity,residual,method\n", 0) == 0);
  const auto back = io::read_zeros_csv(ss);
  REQUIRE(back.size() == zs.zeros.size());
  for (std::size_t k = 0; k < back.size(); k++)
  {
    CHECK(back[k].z == zs.zeros[k].z);
    CHECK(back[k].multiplicity == zs.zeros[k].multiplicity);
    CHECK(back[k].residual == zs.zeros[k].residual);
    CHECK(back[k].method == zs.zeros[k].method);
  }

  std::stringstream bad("re_z,im_z,multiplicity,residual,method\n1,2,3\n");
  CHECK_THROWS_AS(io::read_zeros_csv(bad), ValidationError);
}

TEST_CASE("property: curve CSVs round-trip to the last bit")
{
  const PhaseDiagram d = build_phase_diagram(m3(), {});
  REQUIRE(!d.curves.empty());
  for (const auto& c : d.curves)
  {
    std::stringstream ss;
    io::write_curve_csv(ss, c);
    CHECK(ss.str().rfind("t,re_z,im_z,re_vm,im_vm,re_vn,im_vn\n", 0) == 0);
    const auto back = io::read_curve_csv(ss);
    REQUIRE(back.size() == c.samples.size());
    for (std::size_t k = 0; k < back.size(); k++)
    {
      CHECK(back[k].t == c.samples[k].t);
      CHECK(back[k].z == c.samples[k].z);
      CHECK(back[k].v_m == c.samples[k].v_m);
      CHECK(back[k].v_n == c.samples[k].v_n);
    }
  }
}

TEST_CASE("SVG output")
{
  const ModelSpec a = m2();
  const PhaseDiagram d2 = build_phase_diagram(a, {});
  const ZeroSet zs = find_zeros_region(finite_volume(a, 100, 1, 1.0, 1.0), a.domain());
  std::stringstream s2;
  io::emit_svg(s2, {&d2, {&zs}, {}, a.domain()});
  CHECK(count(s2.str(), "<path class=\"curve\"") == 1);
  CHECK(count(s2.str(), "<circle class=\"zero\"") == 6);
  CHECK(s2.str().find("<svg xmlns=") != std::string::npos);
  CHECK(s2.str().find("</svg>") != std::string::npos);

  const ModelSpec b = m3();
  const PhaseDiagram d3 = build_phase_diagram(b, {});
  std::stringstream s3;
  io::emit_svg(s3, {&d3, {}, {{0.0, {0.1, 0.1}}}, b.domain()});
  CHECK(count(s3.str(), "<path class=\"curve\"") == 3);
  CHECK(count(s3.str(), "<rect class=\"multiple-point\"") == 1);
  CHECK(count(s3.str(), "<line class=\"asymptote\"") == 1);
  CHECK(s3.str().find("stroke-dasharray") != std::string::npos);

  std::stringstream s0;
  io::emit_svg(s0, {nullptr, {}, {}, b.domain()});
  CHECK(count(s0.str(), "class=\"axis\"") == 2);
  CHECK(count(s0.str(), "<path") == 0);
  CHECK(count(s0.str(), "<circle") == 0);
}

TEST_CASE("JSON reports keep non-finite numbers readable")
{
  MatchReport r;
  r.min_located_spacing = std::numeric_limits<double>::infinity();
  ZeroSet empty;
  const std::string text = io::to_json(r, empty, empty).dump();
  CHECK(text.find("null") == std::string::npos);
  CHECK(text.find("inf") != std::string::npos);
  CHECK(nlohmann::json::accept(text));
}

#ifndef PFZ_IO_HPP
#define PFZ_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pfz/analysis.hpp"
#include "pfz/density.hpp"
#include "pfz/diagram.hpp"
#include "pfz/zeros.hpp"

#include <json.hpp>

namespace pfz::io
{
  //! shortest lossless text for a double (17 significant digits)
  std::string fmt(double x);

  //! parses a model document; errors are ValidationError with "origin:line:col:" prefixes
  ModelSpec parse_model(const std::string& text, const std::string& origin = "<model>");
  ModelSpec load_model(const std::string& path);
  nlohmann::json model_to_json(const ModelSpec& model);

  void write_zeros_csv(std::ostream& os, const ZeroSet& zs);
  std::vector<Zero> read_zeros_csv(std::istream& is);

  void write_curve_csv(std::ostream& os, const CoexistenceCurve& c);
  std::vector<CurveSample> read_curve_csv(std::istream& is);

  void write_density_csv(std::ostream& os, const std::vector<DensityRow>& rows);
  void write_uncovered_csv(std::ostream& os, const CoveringReport& rep);

  nlohmann::json to_json(const ZeroSet& zs);
  nlohmann::json to_json(const PhaseDiagram& d);
  nlohmann::json to_json(const MatchReport& m, const ZeroSet& predicted, const ZeroSet& located);
  nlohmann::json to_json(const AssumptionReport& r);
  nlohmann::json to_json(const VandermondeReport& r);
  nlohmann::json to_json(const LeeYangReport& r);
  nlohmann::json to_json(const CoveringReport& r);
  nlohmann::json to_json(const DegeneracyReport& r);
  nlohmann::json to_json(const MultipointPrediction& p);
  nlohmann::json to_json(const std::vector<AsymptoteLine>& lines);

  //! line segment drawn dashed in the SVG, in model coordinates
  struct Segment
  {
    Complex a, b;
  };

  struct SvgScene
  {
    const PhaseDiagram* diagram = nullptr;
    std::vector<const ZeroSet*> zeros;
    std::vector<Segment> asymptotes;
    Rect viewport;
  };

  //! standalone SVG: curves as paths, zeros and multiple points as markers, asymptotes dashed
  void emit_svg(std::ostream& os, const SvgScene& scene);
}

#endif // PFZ_IO_HPP

#include "pfz/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "pfz/errors.hpp"

namespace pfz::io
{
  using nlohmann::json;

  std::string fmt(double x)
  {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  // ---------------------------------------------------------------------------------------
  // model files

  namespace
  {
    [[noreturn]] void schema_error(const std::string& origin, const std::string& where, const std::string& what)
    {
      throw ValidationError(origin + ": " + where + ": " + what);
    }

    Complex parse_complex(const json& j, const std::string& origin, const std::string& where)
    {
      if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        schema_error(origin, where, "complex numbers are written as [re, im]");
      return {j[0].get<double>(), j[1].get<double>()};
    }

    std::pair<double, double> parse_interval(const json& j, const std::string& origin, const std::string& where)
    {
      if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        schema_error(origin, where, "expected [lo, hi]");
      return {j[0].get<double>(), j[1].get<double>()};
    }

    json cplx(Complex z) { return json::array({z.real(), z.imag()}); }
  }

  ModelSpec parse_model(const std::string& text, const std::string& origin)
  {
    json doc;
    try
    {
      doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
      // byte is 1-based and points just past the offending character
      std::size_t line = 1, col = 1;
      const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
      for (std::size_t k = 0; k < stop; k++)
      {
        if (text[k] == '\n')
        {
          line++;
          col = 1;
        }
        else
          col++;
      }
      throw ValidationError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                            ": malformed model file: " + e.what());
    }

    if (!doc.is_object())
      schema_error(origin, "<root>", "model must be an object");
    if (!doc.contains("phases") || !doc["phases"].is_array())
      schema_error(origin, "phases", "missing array of phases");
    std::vector<PhaseSpec> phases;
    for (std::size_t k = 0; k < doc["phases"].size(); k++)
    {
      const json& p = doc["phases"][k];
      const std::string where = "phases[" + std::to_string(k) + "]";
      if (!p.is_object())
        schema_error(origin, where, "phase must be an object");
      PhaseSpec ph;
      if (!p.contains("name") || !p["name"].is_string())
        schema_error(origin, where + ".name", "missing string");
      ph.name = p["name"].get<std::string>();
      if (p.contains("q"))
      {
        if (!p["q"].is_number_integer() || p["q"].get<long long>() < 1 ||
            p["q"].get<long long>() > std::numeric_limits<int>::max())
          schema_error(origin, where + ".q", "degeneracy must be a positive integer");
        ph.degeneracy = p["q"].get<int>();
      }
      if (!p.contains("coeffs") || !p["coeffs"].is_array() || p["coeffs"].empty())
        schema_error(origin, where + ".coeffs", "missing non-empty coefficient list");
      for (std::size_t j = 0; j < p["coeffs"].size(); j++)
        ph.exponent.push_back(parse_complex(p["coeffs"][j], origin, where + ".coeffs[" + std::to_string(j) + "]"));
      phases.push_back(std::move(ph));
    }

    if (!doc.contains("domain") || !doc["domain"].is_object())
      schema_error(origin, "domain", "missing domain object");
    const auto re = parse_interval(doc["domain"].value("re", json()), origin, "domain.re");
    const auto im = parse_interval(doc["domain"].value("im", json()), origin, "domain.im");
    const Rect dom{re.first, re.second, im.first, im.second};

    CoordinateMap map = CoordinateMap::identity;
    if (doc.contains("coordinate_map"))
    {
      const json& c = doc["coordinate_map"];
      if (c == "identity")
        map = CoordinateMap::identity;
      else if (c == "exponential")
        map = CoordinateMap::exponential;
      else
        schema_error(origin, "coordinate_map", "expected \"identity\" or \"exponential\"");
    }
    double alpha_ref = 1.0;
    if (doc.contains("alpha_ref"))
    {
      if (!doc["alpha_ref"].is_number())
        schema_error(origin, "alpha_ref", "expected a number");
      alpha_ref = doc["alpha_ref"].get<double>();
    }
    try
    {
      return ModelSpec(std::move(phases), dom, map, alpha_ref);
    }
    catch (const ValidationError& e)
    {
      throw ValidationError(origin + ": " + e.what());
    }
  }

  ModelSpec load_model(const std::string& path)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw ValidationError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str(), path);
  }

  json model_to_json(const ModelSpec& model)
  {
    json phases = json::array();
    for (std::size_t m = 0; m < model.size(); m++)
    {
      const PhaseSpec& p = model.phase(m);
      json coeffs = json::array();
      for (const auto& c : p.exponent)
        coeffs.push_back(cplx(c));
      phases.push_back({{"name", p.name}, {"q", p.degeneracy}, {"coeffs", coeffs}});
    }
    const Rect& d = model.domain();
    return {{"phases", phases},
            {"domain", {{"re", {d.re_lo, d.re_hi}}, {"im", {d.im_lo, d.im_hi}}}},
            {"coordinate_map", model.coordinate_map() == CoordinateMap::exponential ? "exponential" : "identity"},
            {"alpha_ref", model.alpha_ref()}};
  }

  // ---------------------------------------------------------------------------------------
  // CSV

  namespace
  {
    std::vector<std::string> split_csv(const std::string& line)
    {
      std::vector<std::string> out;
      std::string cell;
      std::istringstream ss(line);
      while (std::getline(ss, cell, ','))
        out.push_back(cell);
      return out;
    }

    // strtod rather than stod: subnormal values must read back too
    double to_double(const std::string& s)
    {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || end != s.c_str() + s.size())
        throw ValidationError("bad number '" + s + "' in CSV");
      return v;
    }

    template <class Row>
    std::vector<Row> read_rows(std::istream& is, std::size_t columns, Row (*make)(const std::vector<std::string>&))
    {
      std::string line;
      if (!std::getline(is, line))
        throw ValidationError("CSV is empty (missing header)");
      std::vector<Row> rows;
      std::size_t lineno = 1;
      while (std::getline(is, line))
      {
        lineno++;
        if (line.empty())
          continue;
        const auto cells = split_csv(line);
        if (cells.size() != columns)
          throw ValidationError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                                " columns");
        rows.push_back(make(cells));
      }
      return rows;
    }
  }

  void write_zeros_csv(std::ostream& os, const ZeroSet& zs)
  {
    os << "re_z,im_z,multiplicity,residual,method\n";
    for (const auto& z : zs.zeros)
      os << fmt(z.z.real()) << ',' << fmt(z.z.imag()) << ',' << z.multiplicity << ',' << fmt(z.residual) << ','
         << to_string(z.method) << '\n';
  }

  std::vector<Zero> read_zeros_csv(std::istream& is)
  {
    return read_rows<Zero>(is, 5, [](const std::vector<std::string>& c) {
      Zero z;
      z.z = {to_double(c[0]), to_double(c[1])};
      z.multiplicity = static_cast<int>(to_double(c[2]));
      z.residual = to_double(c[3]);
      if (c[4] == "brute_force")
        z.method = ZeroMethod::brute_force;
      else if (c[4] == "two_phase_eq")
        z.method = ZeroMethod::two_phase_eq;
      else if (c[4] == "multipoint_eq")
        z.method = ZeroMethod::multipoint_eq;
      else
        throw ValidationError("unknown zero method '" + c[4] + "'");
      return z;
    });
  }

  void write_curve_csv(std::ostream& os, const CoexistenceCurve& c)
  {
    os << "t,re_z,im_z,re_vm,im_vm,re_vn,im_vn\n";
    for (const auto& s : c.samples)
      os << fmt(s.t) << ',' << fmt(s.z.real()) << ',' << fmt(s.z.imag()) << ',' << fmt(s.v_m.real()) << ','
         << fmt(s.v_m.imag()) << ',' << fmt(s.v_n.real()) << ',' << fmt(s.v_n.imag()) << '\n';
  }

  std::vector<CurveSample> read_curve_csv(std::istream& is)
  {
    return read_rows<CurveSample>(is, 7, [](const std::vector<std::string>& c) {
      CurveSample s;
      s.t = to_double(c[0]);
      s.z = {to_double(c[1]), to_double(c[2])};
      s.v_m = {to_double(c[3]), to_double(c[4])};
      s.v_n = {to_double(c[5]), to_double(c[6])};
      return s;
    });
  }

  void write_density_csv(std::ostream& os, const std::vector<DensityRow>& rows)
  {
    os << "epsilon,L,N,count,empirical,theoretical,abs_error\n";
    for (const auto& r : rows)
      os << fmt(r.sample.epsilon) << ',' << r.sample.L << ',' << fmt(r.sample.N) << ',' << r.sample.count << ','
         << fmt(r.sample.empirical) << ',' << fmt(r.sample.theoretical) << ',' << fmt(r.abs_error) << '\n';
  }

  void write_uncovered_csv(std::ostream& os, const CoveringReport& rep)
  {
    os << "re_z,im_z,nearest_multiple_point\n";
    for (const auto& p : rep.uncovered)
      os << fmt(p.z.real()) << ',' << fmt(p.z.imag()) << ',' << fmt(p.nearest_mp) << '\n';
  }

  // ---------------------------------------------------------------------------------------
  // structured reports

  namespace
  {
    json num(double x) { return std::isfinite(x) ? json(x) : json(fmt(x)); }

    json phase_set(const PhaseSet& s) { return json(std::vector<std::size_t>(s.begin(), s.end())); }
  }

  json to_json(const ZeroSet& zs)
  {
    json zeros = json::array();
    for (const auto& z : zs.zeros)
      zeros.push_back({{"z", cplx(z.z)},
                       {"multiplicity", z.multiplicity},
                       {"residual", num(z.residual)},
                       {"method", to_string(z.method)}});
    json unresolved = json::array();
    for (const auto& r : zs.unresolved)
      unresolved.push_back({r.re_lo, r.re_hi, r.im_lo, r.im_hi});
    return {{"L", zs.L},
            {"N", zs.N},
            {"region", {zs.region.re_lo, zs.region.re_hi, zs.region.im_lo, zs.region.im_hi}},
            {"total_multiplicity", zs.total_multiplicity()},
            {"zeros", zeros},
            {"unresolved", unresolved},
            {"warnings", zs.warnings}};
  }

  json to_json(const PhaseDiagram& d)
  {
    json curves = json::array();
    for (const auto& c : d.curves)
    {
      json samples = json::array();
      for (const auto& s : c.samples)
        samples.push_back({s.t, s.z.real(), s.z.imag()});
      curves.push_back({{"pair", {c.m, c.n}},
                        {"start", to_string(c.start.kind)},
                        {"end", to_string(c.end.kind)},
                        {"start_diagnostic", c.start.diagnostic},
                        {"end_diagnostic", c.end.diagnostic},
                        {"length", c.length()},
                        {"samples", samples}});
    }
    json mps = json::array();
    for (const auto& mp : d.multiple_points)
    {
      json arcs = json::array();
      for (const auto& a : mp.incident_arcs)
        arcs.push_back({{"curve", a.curve}, {"at_end", a.at_end}, {"tangent", cplx(a.tangent)}});
      json vs = json::array();
      for (const auto& v : mp.v_values)
        vs.push_back(cplx(v));
      mps.push_back({{"z", cplx(mp.z)}, {"stable_set", phase_set(mp.stable_set)}, {"v", vs}, {"arcs", arcs}});
    }
    return {{"curves", curves},
            {"multiple_points", mps},
            {"min_angle", d.min_angle ? json(*d.min_angle) : json()},
            {"diagnostics", d.diagnostics}};
  }

  json to_json(const MatchReport& m, const ZeroSet& predicted, const ZeroSet& located)
  {
    json pairs = json::array();
    for (const auto& p : m.pairs)
      pairs.push_back({{"predicted", cplx(predicted.zeros[p.predicted].z)},
                       {"located", cplx(located.zeros[p.located].z)},
                       {"distance", p.distance},
                       {"delta", p.delta},
                       {"mutual_nearest", p.mutual_nearest}});
    return {{"pairs", pairs},
            {"matched", m.pairs.size()},
            {"unmatched_predicted", m.unmatched_predicted},
            {"unmatched_located", m.unmatched_located},
            {"min_located_spacing", num(m.min_located_spacing)},
            {"max_distance", m.max_distance()},
            {"c_match", m.c_match},
            {"violations", m.violations},
            {"stable", m.stable}};
  }

  json to_json(const AssumptionReport& r)
  {
    json samples = json::array();
    for (const auto& s : r.samples)
      samples.push_back({{"pair", {s.m, s.n}}, {"z", cplx(s.z)}, {"v_gap", s.v_gap}});
    json conv = json::array();
    for (const auto& c : r.convexity)
      conv.push_back({{"z", cplx(c.z)},
                      {"phases", phase_set(c.phases)},
                      {"strictly_convex", c.strictly_convex},
                      {"margin", c.margin}});
    json viol = json::array();
    for (const auto& v : r.violations)
      viol.push_back({{"z", cplx(v.z)}, {"assumption", v.assumption}, {"margin", num(v.margin)}});
    return {{"alpha_estimate", r.alpha_estimate ? json(*r.alpha_estimate) : json()},
            {"positivity_ok", r.positivity_ok},
            {"min_log_zeta", num(r.min_log_zeta)},
            {"coexistence_samples", samples},
            {"convexity", conv},
            {"violations", viol}};
  }

  json to_json(const VandermondeReport& r)
  {
    json b = json::array();
    for (const auto& v : r.b_values)
      b.push_back(cplx(v));
    return {{"Q", phase_set(r.Q)},
            {"z", cplx(r.z)},
            {"b", b},
            {"det_abs", r.det_abs},
            {"det_product", r.det_product},
            {"norm", r.norm},
            {"inverse_norm", num(r.inverse_norm)},
            {"inverse_bound", num(r.inverse_bound)},
            {"near_singular", r.near_singular},
            {"diagnostic", r.diagnostic}};
  }

  json to_json(const LeeYangReport& r)
  {
    return {{"max_abs_re", r.max_abs_re},
            {"count", r.count},
            {"segment", {r.segment_lo, r.segment_hi}},
            {"count_per_length", r.count_per_length},
            {"symmetry_defect", r.symmetry_defect},
            {"perturbation_defect", r.perturbation_defect}};
  }

  json to_json(const CoveringReport& r)
  {
    json mps = json::array();
    for (const auto& mp : r.multiple_points)
      mps.push_back(cplx(mp.z));
    return {{"grid_points", r.grid_points},
            {"in_G", r.in_G},
            {"covered_two_phase", r.covered_two_phase},
            {"covered_disc", r.covered_disc},
            {"uncovered", r.uncovered.size()},
            {"chi", num(r.chi)},
            {"multiple_points", mps}};
  }

  json to_json(const DegeneracyReport& r)
  {
    json entries = json::array();
    for (const auto& e : r.entries)
      if (!e.multiplicity_ok || !e.outside_single_phase)
        entries.push_back({{"zero", e.zero},
                           {"eps_stable", phase_set(e.eps_stable)},
                           {"multiplicity", e.multiplicity},
                           {"multiplicity_ok", e.multiplicity_ok},
                           {"outside_single_phase", e.outside_single_phase}});
    return {{"checked", r.entries.size()},
            {"violations", r.violations},
            {"max_multiplicity", r.max_multiplicity},
            {"violating_entries", entries}};
  }

  json to_json(const MultipointPrediction& p)
  {
    json scaled = json::array();
    for (const auto& s : p.scaled)
      scaled.push_back(cplx(s));
    return {{"zeros", to_json(p.zeros)},
            {"scaled", scaled},
            {"phases", p.phases},
            {"disc_winding", p.disc_winding},
            {"radius", p.radius}};
  }

  json to_json(const std::vector<AsymptoteLine>& lines)
  {
    json out = json::array();
    for (const auto& l : lines)
      out.push_back({{"side", {l.from, l.to}},
                     {"origin_offset", cplx(l.origin_offset)},
                     {"direction", cplx(l.direction)},
                     {"shift_magnitude", l.shift_magnitude}});
    return out;
  }

  // ---------------------------------------------------------------------------------------
  // SVG

  void emit_svg(std::ostream& os, const SvgScene& scene)
  {
    const Rect& vp = scene.viewport;
    if (!vp.valid())
      throw ArgumentError("SVG viewport needs lo < hi on both axes");
    const double W = 800, pad = 40;
    const double sx = (W - 2 * pad) / vp.width();
    const double H = 2 * pad + vp.height() * sx;
    auto X = [&](double re) { return fmt(pad + (re - vp.re_lo) * sx); };
    auto Y = [&](double im) { return fmt(H - pad - (im - vp.im_lo) * sx); };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\"" << fmt(H)
       << "\" viewBox=\"0 0 " << fmt(W) << ' ' << fmt(H) << "\">\n";
    os << "<rect class=\"frame\" x=\"" << fmt(pad) << "\" y=\"" << fmt(pad) << "\" width=\"" << fmt(W - 2 * pad)
       << "\" height=\"" << fmt(H - 2 * pad) << "\" fill=\"none\" stroke=\"#999\"/>\n";
    // axes through the origin when visible, otherwise along the frame
    const double ax = vp.contains({0, vp.im_lo}) ? 0.0 : vp.re_lo;
    const double ay = vp.contains({vp.re_lo, 0}) ? 0.0 : vp.im_lo;
    os << "<line class=\"axis\" x1=\"" << X(vp.re_lo) << "\" y1=\"" << Y(ay) << "\" x2=\"" << X(vp.re_hi)
       << "\" y2=\"" << Y(ay) << "\" stroke=\"#444\"/>\n";
    os << "<line class=\"axis\" x1=\"" << X(ax) << "\" y1=\"" << Y(vp.im_lo) << "\" x2=\"" << X(ax) << "\" y2=\""
       << Y(vp.im_hi) << "\" stroke=\"#444\"/>\n";
    os << "<text class=\"label\" x=\"" << fmt(pad) << "\" y=\"" << fmt(H - 10) << "\" font-size=\"12\">Re ["
       << fmt(vp.re_lo) << ", " << fmt(vp.re_hi) << "]  Im [" << fmt(vp.im_lo) << ", " << fmt(vp.im_hi)
       << "]</text>\n";

    if (scene.diagram)
    {
      for (const auto& c : scene.diagram->curves)
      {
        if (c.samples.empty())
          continue;
        os << "<path class=\"curve\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" d=\"";
        for (std::size_t k = 0; k < c.samples.size(); k++)
          os << (k == 0 ? "M" : " L") << X(c.samples[k].z.real()) << ' ' << Y(c.samples[k].z.imag());
        os << "\"/>\n";
      }
    }
    for (const auto& s : scene.asymptotes)
      os << "<line class=\"asymptote\" x1=\"" << X(s.a.real()) << "\" y1=\"" << Y(s.a.imag()) << "\" x2=\""
         << X(s.b.real()) << "\" y2=\"" << Y(s.b.imag()) << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    for (const ZeroSet* zs : scene.zeros)
      if (zs)
        for (const auto& z : zs->zeros)
          os << "<circle class=\"zero\" cx=\"" << X(z.z.real()) << "\" cy=\"" << Y(z.z.imag())
             << "\" r=\"2.5\" fill=\"" << (z.method == ZeroMethod::brute_force ? "#c0392b" : "#27ae60")
             << "\"/>\n";
    if (scene.diagram)
      for (const auto& mp : scene.diagram->multiple_points)
        os << "<rect class=\"multiple-point\" x=\"" << fmt(pad + (mp.z.real() - vp.re_lo) * sx - 4) << "\" y=\""
           << fmt(H - pad - (mp.z.imag() - vp.im_lo) * sx - 4) << "\" width=\"8\" height=\"8\" fill=\"#000\"/>\n";
    os << "</svg>\n";
  }
}

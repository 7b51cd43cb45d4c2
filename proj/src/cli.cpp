#include "pfz/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "pfz/analysis.hpp"
#include "pfz/density.hpp"
#include "pfz/errors.hpp"
#include "pfz/io.hpp"

namespace pfz::cli
{
  namespace
  {
    namespace fs = std::filesystem;
    using nlohmann::json;

    struct Params
    {
      std::string model_path;
      std::string out_dir;
      int workers = 0;
      bool svg = false;
      bool serial = false;

      std::vector<double> box;
      int L = 100;
      int d = 1;
      double tau = 1.0;
      double kappa = 1.0;
      double theta = 0.0;
      std::optional<std::uint64_t> perturb_seed;
      int perturb_degree = 3;
      double gamma_scale = 5.0;
      double rho_scale = 1.0;
      int max_depth = 40;
      double c_match = 10.0;

      std::size_t grid = 41;
      double step = 0;
      std::size_t max_steps = 0;
      std::string pair;
      std::vector<double> z;
      std::vector<double> eps_list;
      std::vector<int> L_list;
      std::string plus = "0", minus = "1";
      std::vector<double> segment;
      double ly_factor = 10.0;
    };

    // ---------------------------------------------------------------------------------------
    // validation helpers; everything here runs before any computation

    void require(bool ok, const std::string& what)
    {
      if (!ok)
        throw ValidationError(what);
    }

    Rect resolve_box(const Params& p, const ModelSpec& model)
    {
      if (p.box.empty())
        return model.domain();
      require(p.box.size() == 4, "--box needs re_lo,re_hi,im_lo,im_hi");
      const Rect r{p.box[0], p.box[1], p.box[2], p.box[3]};
      require(r.valid(), "--box bounds are inverted or not finite (need re_lo < re_hi and im_lo < im_hi)");
      const Rect& d = model.domain();
      const double slack = 1e-12 * d.diameter();
      require(d.contains({r.re_lo, r.im_lo}, slack) && d.contains({r.re_hi, r.im_hi}, slack),
              "--box is not inside the model domain");
      return r;
    }

    std::size_t resolve_phase(const ModelSpec& model, const std::string& key)
    {
      for (std::size_t m = 0; m < model.size(); m++)
        if (model.phase(m).name == key)
          return m;
      try
      {
        std::size_t used = 0;
        const unsigned long idx = std::stoul(key, &used);
        if (used == key.size() && idx < model.size())
          return idx;
      }
      catch (const std::logic_error&)
      {
      }
      throw ValidationError("unknown phase '" + key + "' (use a phase name or 0-based index)");
    }

    std::pair<std::size_t, std::size_t> resolve_pair(const ModelSpec& model, const std::string& spec)
    {
      const auto comma = spec.find(',');
      require(comma != std::string::npos, "--pair needs two phases separated by a comma");
      const std::size_t m = resolve_phase(model, spec.substr(0, comma));
      const std::size_t n = resolve_phase(model, spec.substr(comma + 1));
      require(m != n, "--pair needs two distinct phases");
      return {m, n};
    }

    Complex resolve_point(const std::vector<double>& v, const std::string& flag)
    {
      require(v.size() == 2, flag + " needs re,im");
      const Complex z(v[0], v[1]);
      require(is_finite(z), flag + " must be finite");
      return z;
    }

    void validate_common(const Params& p)
    {
      require(p.L >= 1, "--L must be >= 1");
      require(p.d >= 1 && p.d <= 4, "--d must be between 1 and 4");
      require(p.tau > 0 && std::isfinite(p.tau), "--tau must be positive");
      require(p.kappa > 0 && std::isfinite(p.kappa), "--kappa must be positive");
      require(p.theta >= 0 && std::isfinite(p.theta), "--theta must be >= 0");
      require(p.perturb_degree >= 0 && p.perturb_degree <= 20, "--perturb-degree must be in [0, 20]");
      require(p.gamma_scale > 0, "--gamma-scale must be positive");
      require(p.rho_scale >= 0, "--rho-scale must be >= 0");
      require(p.max_depth >= 1 && p.max_depth <= 60, "--max-depth must be in [1, 60]");
      require(p.c_match > 0, "--c-match must be positive");
      require(p.grid >= 4, "--grid must be >= 4");
      require(p.step >= 0, "--step must be >= 0");
      require(p.workers >= 0, "--workers must be >= 0");
      require(p.ly_factor > 0, "--tolerance-factor must be positive");
    }

    // ---------------------------------------------------------------------------------------

    class Runner
    {
    public:
      explicit Runner(const Params& p) : p_(p), model_(io::load_model(p.model_path))
      {
        validate_common(p_);
        exec_ = p_.serial ? Exec::serial : Exec::parallel;
        out_ = p_.out_dir;
        if (out_.empty())
        {
          const char* env = std::getenv("PFZ_OUT_DIR");
          out_ = env && *env ? env : ".";
        }
      }

      FiniteVolumeModel fvm(bool perturbed) const
      {
        std::vector<Poly> pert;
        if (perturbed && p_.perturb_seed)
          pert = random_perturbation(model_, *p_.perturb_seed, p_.perturb_degree);
        return finite_volume(model_, p_.L, p_.d, p_.tau, p_.kappa, std::move(pert), perturbed ? p_.theta : 0.0);
      }

      void write(const std::string& name, const std::function<void(std::ostream&)>& body) const
      {
        fs::create_directories(out_);
        const fs::path path = fs::path(out_) / name;
        std::ofstream os(path, std::ios::binary);
        if (!os)
          throw ValidationError("cannot write '" + path.string() + "'");
        body(os);
        std::cout << "wrote " << path.string() << "\n";
      }

      void write_json(const std::string& name, const json& j) const
      {
        write(name, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
      }

      DiagramOptions diagram_options() const
      {
        DiagramOptions o;
        o.grid = {p_.grid, p_.grid};
        o.step = p_.step;
        o.max_steps = p_.max_steps;
        o.exec = exec_;
        return o;
      }

      ZeroSet predict(const FiniteVolumeModel& f, const Rect& box) const
      {
        return predict_two_phase_region(f, box, diagram_options());
      }

      // below this, located and predicted zeros differ by rounding alone
      static constexpr double resolution_floor = 1e-12;

      // delta_L for each predicted zero, using the two dominant phases there
      std::vector<double> tolerances(const ZeroSet& predicted, std::size_t& outside) const
      {
        const double N = std::pow(static_cast<double>(p_.L), p_.d);
        const double gamma = ScaleParams{p_.gamma_scale, p_.rho_scale}.gamma(N);
        std::vector<double> tol;
        outside = 0;
        for (const auto& z : predicted.zeros)
        {
          std::vector<std::size_t> idx(model_.size());
          for (std::size_t m = 0; m < idx.size(); m++)
            idx[m] = m;
          std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](std::size_t a, std::size_t b) {
            return model_.log_zeta(a, z.z).real() > model_.log_zeta(b, z.z).real();
          });
          PhaseSet pair = {std::min(idx[0], idx[1]), std::max(idx[0], idx[1])};
          try
          {
            tol.push_back(std::max(delta_L(model_, z.z, p_.L, p_.d, gamma, p_.tau, p_.kappa, pair).value,
                                   resolution_floor));
          }
          catch (const DomainError&)
          {
            outside++;
            tol.push_back(std::max(N * std::exp(-0.5 * gamma * N), resolution_floor));
          }
        }
        if (tol.empty())
          tol.push_back(0);
        return tol;
      }

      int trace_diagram() const
      {
        if (!p_.pair.empty() || !p_.z.empty())
        {
          const auto [m, n] = resolve_pair(model_, p_.pair);
          const Complex z0 = resolve_point(p_.z, "--z");
          TraceOptions t;
          const Rect& d = model_.domain();
          t.step = p_.step > 0 ? p_.step : 1e-2 * std::min(d.width(), d.height());
          if (p_.max_steps > 0)
            t.max_steps = p_.max_steps;
          const CoexistenceCurve c = trace_curve(model_, m, n, z0, t);
          write("curve.csv", [&](std::ostream& os) { io::write_curve_csv(os, c); });
          std::cout << "samples " << c.samples.size() << " length " << io::fmt(c.length()) << " ends "
                    << to_string(c.start.kind) << " / " << to_string(c.end.kind) << "\n";
          return 0;
        }
        const PhaseDiagram dia = build_phase_diagram(model_, diagram_options());
        write_json("diagram.json", io::to_json(dia));
        for (std::size_t k = 0; k < dia.curves.size(); k++)
        {
          const auto& c = dia.curves[k];
          write("curve_" + std::to_string(k) + "_" + std::to_string(c.m) + "_" + std::to_string(c.n) + ".csv",
                [&](std::ostream& os) { io::write_curve_csv(os, c); });
        }
        if (p_.svg)
          write("diagram.svg", [&](std::ostream& os) { io::emit_svg(os, {&dia, {}, {}, model_.domain()}); });
        std::cout << "curves " << dia.curves.size() << " multiple_points " << dia.multiple_points.size()
                  << " diagnostics " << dia.diagnostics.size() << "\n";
        for (const auto& msg : dia.diagnostics)
          std::cout << "diagnostic: " << msg << "\n";
        return 0;
      }

      int find_zeros() const
      {
        const Rect box = resolve_box(p_, model_);
        const FiniteVolumeModel f = fvm(true);
        const ZeroSet zs = find_zeros_region(f, box, p_.max_depth, exec_);
        write("zeros.csv", [&](std::ostream& os) { io::write_zeros_csv(os, zs); });
        json j = io::to_json(zs);
        j["degeneracy"] = io::to_json(degeneracy_audit(f, zs));
        write_json("zeros.json", j);
        if (p_.svg)
          write("zeros.svg", [&](std::ostream& os) { io::emit_svg(os, {nullptr, {&zs}, {}, box}); });
        std::cout << "zeros " << zs.zeros.size() << " total_multiplicity " << zs.total_multiplicity()
                  << " unresolved " << zs.unresolved.size() << "\n";
        return 0;
      }

      int predict_zeros() const
      {
        const Rect box = resolve_box(p_, model_);
        const FiniteVolumeModel f = fvm(false);
        const ZeroSet zs = predict(f, box);
        write("predicted.csv", [&](std::ostream& os) { io::write_zeros_csv(os, zs); });
        write_json("predicted.json", io::to_json(zs));
        std::cout << "predicted " << zs.zeros.size() << "\n";
        return 0;
      }

      int compare() const
      {
        const Rect box = resolve_box(p_, model_);
        const ZeroSet located = find_zeros_region(fvm(true), box, p_.max_depth, exec_);
        const ZeroSet predicted = predict(fvm(false), box);
        std::size_t outside = 0;
        const auto tol = tolerances(predicted, outside);
        const MatchReport rep = match_zeros(predicted, located, tol, p_.c_match);
        json j = io::to_json(rep, predicted, located);
        j["predicted_outside_two_phase_region"] = outside;
        write_json("match.json", j);
        write("located.csv", [&](std::ostream& os) { io::write_zeros_csv(os, located); });
        write("predicted.csv", [&](std::ostream& os) { io::write_zeros_csv(os, predicted); });
        if (p_.svg)
        {
          const PhaseDiagram dia = build_phase_diagram(model_.with_domain(box), diagram_options());
          write("compare.svg", [&](std::ostream& os) { io::emit_svg(os, {&dia, {&located, &predicted}, {}, box}); });
        }
        std::cout << "matched " << rep.pairs.size() << " unmatched_predicted " << rep.unmatched_predicted.size()
                  << " unmatched_located " << rep.unmatched_located.size() << " max_distance "
                  << io::fmt(rep.max_distance()) << " violations " << rep.violations.size() << "\n";
        return 0;
      }

      int density() const
      {
        const auto [m, n] = resolve_pair(model_, p_.pair.empty() ? "0,1" : p_.pair);
        const Complex z = resolve_point(p_.z.empty() ? std::vector<double>{0, 0} : p_.z, "--z");
        require(!p_.eps_list.empty(), "--eps needs at least one value");
        for (double e : p_.eps_list)
          require(e > 0, "--eps values must be positive");
        std::vector<int> Ls = p_.L_list.empty() ? std::vector<int>{p_.L} : p_.L_list;
        for (int L : Ls)
          require(L >= 1, "--L values must be >= 1");
        const auto rows = density_convergence(model_, m, n, z, p_.eps_list, Ls, p_.d, exec_);
        write("density.csv", [&](std::ostream& os) { io::write_density_csv(os, rows); });
        for (const auto& r : rows)
        {
          std::cout << "eps " << io::fmt(r.sample.epsilon) << " L " << r.sample.L << " count " << r.sample.count
                    << " predicted " << r.predicted_count << " empirical " << io::fmt(r.sample.empirical)
                    << " theoretical " << io::fmt(r.sample.theoretical) << "\n";
          for (const auto& w : r.sample.warnings)
            std::cout << "warning: " << w << "\n";
        }
        return 0;
      }

      std::vector<MultiplePoint> multiple_points(const Rect& region) const
      {
        std::vector<MultiplePoint> out;
        for (auto& mp : find_multiple_points(model_, region, {p_.grid, p_.grid}))
          if (mp.stable_set.size() >= 3)
            out.push_back(std::move(mp));
        return out;
      }

      int multipoint() const
      {
        const Rect region = resolve_box(p_, model_);
        const FiniteVolumeModel base = fvm(false), pert = fvm(true);
        const double N = base.N();
        const double rho = ScaleParams{p_.gamma_scale, p_.rho_scale}.rho(N);
        require(rho > 0, "--rho-scale must be positive for multipoint predictions");
        json all = json::array();
        const auto mps = multiple_points(region);
        for (std::size_t k = 0; k < mps.size(); k++)
        {
          const MultiplePoint& mp = mps[k];
          const MultipointPrediction pred = predict_multipoint(base, mp, rho, exec_);
          json entry = io::to_json(pred);
          const Rect disc_box = Rect::around(mp.z, rho * (1 + 1e-6));
          if (model_.domain().contains({disc_box.re_lo, disc_box.im_lo}) &&
              model_.domain().contains({disc_box.re_hi, disc_box.im_hi}))
          {
            ZeroSet located = find_zeros_region(pert, disc_box, p_.max_depth, exec_);
            std::erase_if(located.zeros, [&](const Zero& z) { return std::abs(z.z - mp.z) > rho; });
            const MatchReport rep = match_zeros(pred.zeros, located, {std::pow(N, -4.0 / 3.0)}, p_.c_match);
            entry["match"] = io::to_json(rep, pred.zeros, located);
            entry["located_count"] = located.total_multiplicity();
            write("multipoint_" + std::to_string(k) + "_located.csv",
                  [&](std::ostream& os) { io::write_zeros_csv(os, located); });
            std::cout << "multiple point " << k << ": predicted " << pred.zeros.zeros.size() << " located "
                      << located.zeros.size() << " max_distance " << io::fmt(rep.max_distance()) << "\n";
          }
          else
            entry["match"] = "disc leaves the model domain; brute-force comparison skipped";
          write("multipoint_" + std::to_string(k) + "_predicted.csv",
                [&](std::ostream& os) { io::write_zeros_csv(os, pred.zeros); });
          all.push_back(entry);
        }
        write_json("multipoint.json", all);
        std::cout << "multiple points " << mps.size() << "\n";
        return 0;
      }

      int asymptotes() const
      {
        const Rect region = resolve_box(p_, model_);
        const double N = std::pow(static_cast<double>(p_.L), p_.d);
        const double rho = ScaleParams{p_.gamma_scale, p_.rho_scale}.rho(N);
        json all = json::array();
        std::vector<io::Segment> segs;
        const auto mps = multiple_points(region);
        for (const auto& mp : mps)
        {
          const auto lines = asymptote_lines(model_, mp);
          all.push_back({{"z", {mp.z.real(), mp.z.imag()}}, {"lines", io::to_json(lines)}});
          for (const auto& l : lines)
            segs.push_back({mp.z + l.origin_offset / N, mp.z + (l.origin_offset + N * rho * l.direction) / N});
        }
        write_json("asymptotes.json", all);
        if (p_.svg)
        {
          const PhaseDiagram dia = build_phase_diagram(model_.with_domain(region), diagram_options());
          write("asymptotes.svg", [&](std::ostream& os) { io::emit_svg(os, {&dia, {}, segs, region}); });
        }
        std::cout << "multiple points " << mps.size() << "\n";
        return 0;
      }

      int check_assumptions() const
      {
        const AssumptionReport rep = check_assumption_A(model_, {p_.grid, p_.grid}, exec_);
        write_json("assumptions.json", io::to_json(rep));
        std::cout << "alpha_estimate " << (rep.alpha_estimate ? io::fmt(*rep.alpha_estimate) : "none")
                  << " violations " << rep.violations.size() << "\n";
        return 0;
      }

      int lee_yang() const
      {
        const std::size_t plus = resolve_phase(model_, p_.plus), minus = resolve_phase(model_, p_.minus);
        require(plus != minus, "--plus and --minus must differ");
        const Rect box = resolve_box(p_, model_);
        double lo = 0, hi = box.im_hi;
        if (!p_.segment.empty())
        {
          require(p_.segment.size() == 2 && p_.segment[0] < p_.segment[1], "--segment needs lo,hi with lo < hi");
          lo = p_.segment[0];
          hi = p_.segment[1];
        }
        std::vector<Poly> pert;
        if (p_.perturb_seed)
          pert = symmetric_perturbation(model_, plus, minus, *p_.perturb_seed, p_.perturb_degree);
        const FiniteVolumeModel f = finite_volume(model_, p_.L, p_.d, p_.tau, p_.kappa, pert, p_.theta);
        const ZeroSet zs = find_zeros_region(f, box, p_.max_depth, exec_);
        const LeeYangReport rep = lee_yang_audit(f, zs, plus, minus, lo, hi, {p_.grid, p_.grid});
        write("zeros.csv", [&](std::ostream& os) { io::write_zeros_csv(os, zs); });
        json j = io::to_json(rep);
        const double tol = p_.ly_factor * f.correction_scale();
        j["tolerance"] = tol;
        j["on_axis"] = rep.max_abs_re <= tol;
        write_json("lee_yang.json", j);
        std::cout << "max_abs_re " << io::fmt(rep.max_abs_re) << " tolerance " << io::fmt(tol) << " count " << rep.count
                  << "\n";
        return 0;
      }

      int covering() const
      {
        const Rect region = resolve_box(p_, model_);
        const double N = std::pow(static_cast<double>(p_.L), p_.d);
        const ScaleParams s{p_.gamma_scale, p_.rho_scale};
        const CoveringReport rep = covering_check(model_, region, p_.L, p_.d, ScaleParams::omega(N), s.gamma(N),
                                                  s.rho(N), {p_.grid, p_.grid}, exec_);
        write_json("covering.json", io::to_json(rep));
        write("uncovered.csv", [&](std::ostream& os) { io::write_uncovered_csv(os, rep); });
        std::cout << "in_G " << rep.in_G << " uncovered " << rep.uncovered.size() << " chi " << io::fmt(rep.chi)
                  << "\n";
        return 0;
      }

    private:
      const Params& p_;
      ModelSpec model_;
      Exec exec_ = Exec::parallel;
      std::string out_;
    };

    void add_common(CLI::App* sub, Params& p)
    {
      sub->add_option("--model", p.model_path, "model definition file (JSON)")->required();
      sub->add_option("--out", p.out_dir, "output directory (default: $PFZ_OUT_DIR or .)");
      sub->add_option("--workers", p.workers, "OpenMP threads (0 = runtime default)");
      sub->add_flag("--svg", p.svg, "also render an SVG");
      sub->add_flag("--serial", p.serial, "use the serial reference kernels");
      sub->add_option("--grid", p.grid, "grid points per axis for seeding and checks");
    }

    void add_volume(CLI::App* sub, Params& p, bool single_L = true)
    {
      if (single_L)
        sub->add_option("--L", p.L, "linear size L");
      sub->add_option("--d", p.d, "dimension d (N = L^d)");
      sub->add_option("--tau", p.tau, "decay rate of the finite-size corrections");
      sub->add_option("--kappa", p.kappa, "neighbourhood constant kappa");
    }

    void add_perturbation(CLI::App* sub, Params& p)
    {
      sub->add_option("--theta", p.theta, "strength of the synthetic error term");
      sub->add_option("--perturb-seed", p.perturb_seed, "seed for random analytic perturbations");
      sub->add_option("--perturb-degree", p.perturb_degree, "degree of the perturbation polynomials");
    }

    void add_box(CLI::App* sub, Params& p)
    {
      sub->add_option("--box", p.box, "re_lo,re_hi,im_lo,im_hi (default: model domain)")->delimiter(',');
    }

    void add_scales(CLI::App* sub, Params& p)
    {
      sub->add_option("--gamma-scale", p.gamma_scale, "gamma_L = scale * log N / N");
      sub->add_option("--rho-scale", p.rho_scale, "rho_L = scale * log N / N");
    }
  }

  int run(int argc, char** argv)
  {
    CLI::App app{"pfz: complex phase diagrams and partition-function zeros"};
    app.require_subcommand(1);
    Params p;

    auto* trace = app.add_subcommand("trace-diagram", "trace coexistence curves and multiple points");
    add_common(trace, p);
    trace->add_option("--step", p.step, "curve step (default 1% of the smaller domain side)");
    trace->add_option("--max-steps", p.max_steps, "steps per direction");
    trace->add_option("--pair", p.pair, "trace a single curve of this pair (m,n)");
    trace->add_option("--z", p.z, "start point re,im for --pair")->delimiter(',');

    auto* find = app.add_subcommand("find-zeros", "brute-force zeros of the partition function");
    add_common(find, p);
    add_volume(find, p);
    add_perturbation(find, p);
    add_box(find, p);
    find->add_option("--max-depth", p.max_depth, "quadtree depth limit");

    auto* predict = app.add_subcommand("predict-zeros", "solutions of the two-phase zero equations");
    add_common(predict, p);
    add_volume(predict, p);
    add_box(predict, p);
    predict->add_option("--step", p.step, "curve step");

    auto* cmp = app.add_subcommand("compare", "match predicted and brute-force zeros");
    add_common(cmp, p);
    add_volume(cmp, p);
    add_perturbation(cmp, p);
    add_box(cmp, p);
    add_scales(cmp, p);
    cmp->add_option("--max-depth", p.max_depth, "quadtree depth limit");
    cmp->add_option("--c-match", p.c_match, "multiplier on delta_L for violations");
    cmp->add_option("--step", p.step, "curve step");

    auto* dens = app.add_subcommand("density", "line density of zeros along a coexistence curve");
    add_common(dens, p);
    add_volume(dens, p, false);
    dens->add_option("--L", p.L_list, "list of L values")->delimiter(',');
    dens->add_option("--pair", p.pair, "phase pair m,n (default 0,1)");
    dens->add_option("--z", p.z, "coexistence point re,im (default 0,0)")->delimiter(',');
    dens->add_option("--eps", p.eps_list, "list of disc radii")->delimiter(',')->required();

    auto* mpt = app.add_subcommand("multipoint", "zeros near multiple points");
    add_common(mpt, p);
    add_volume(mpt, p);
    add_perturbation(mpt, p);
    add_box(mpt, p);
    add_scales(mpt, p);
    mpt->add_option("--max-depth", p.max_depth, "quadtree depth limit");
    mpt->add_option("--c-match", p.c_match, "multiplier on the N^(-4/3) tolerance");

    auto* asym = app.add_subcommand("asymptotes", "asymptotic half-lines of zeros at multiple points");
    add_common(asym, p);
    add_volume(asym, p);
    add_box(asym, p);
    add_scales(asym, p);

    auto* check = app.add_subcommand("check-assumptions", "check positivity, non-degeneracy and convexity");
    add_common(check, p);

    auto* ly = app.add_subcommand("lee-yang", "local Lee-Yang audit in the field coordinate");
    add_common(ly, p);
    add_volume(ly, p);
    add_perturbation(ly, p);
    add_box(ly, p);
    ly->add_option("--plus", p.plus, "the + phase (name or index)");
    ly->add_option("--minus", p.minus, "the - phase (name or index)");
    ly->add_option("--segment", p.segment, "Im range lo,hi for counting")->delimiter(',');
    ly->add_option("--max-depth", p.max_depth, "quadtree depth limit");
    ly->add_option("--tolerance-factor", p.ly_factor, "zeros count as on the axis within factor * e^(-tau L)");

    auto* cov = app.add_subcommand("covering", "covering of G by two-phase regions and discs");
    add_common(cov, p);
    add_volume(cov, p);
    add_box(cov, p);
    add_scales(cov, p);

    try
    {
      app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
      return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
      app.exit(e);
      return 1;
    }

    try
    {
      if (p.workers > 0)
        omp_set_num_threads(p.workers);
      const Runner r(p);
      if (trace->parsed())
        return r.trace_diagram();
      if (find->parsed())
        return r.find_zeros();
      if (predict->parsed())
        return r.predict_zeros();
      if (cmp->parsed())
        return r.compare();
      if (dens->parsed())
        return r.density();
      if (mpt->parsed())
        return r.multipoint();
      if (asym->parsed())
        return r.asymptotes();
      if (check->parsed())
        return r.check_assumptions();
      if (ly->parsed())
        return r.lee_yang();
      if (cov->parsed())
        return r.covering();
      return 1;
    }
    catch (const ValidationError& e)
    {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    catch (const NumericalError& e)
    {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 2;
    }
    catch (const std::exception& e)
    {
      std::cerr << "failure: " << e.what() << "\n";
      return 2;
    }
  }

  int run(const std::vector<std::string>& args)
  {
    std::vector<std::string> storage{"pfz"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage)
      argv.push_back(s.data());
    return run(static_cast<int>(argv.size()), argv.data());
  }
}

// psk: generate, transform, verify and export principal contact element nets.
//
// Exit status: 0 success / all checks pass, 1 failed check or geometry/I-O error, 2 usage.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "psk/bianchi.hpp"
#include "psk/examples.hpp"
#include "psk/io.hpp"
#include "psk/rotquad.hpp"

namespace {

using namespace psk;

struct Options {
  std::optional<double> tolerance;
  std::string out;     // net or mesh output, "-" for stdout
  std::string report;  // report output, "-" for stdout
};

Tolerances tolerances(const Options& o) {
  Tolerances t;
  if (const char* env = std::getenv("PSK_TOLERANCE")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) throw CLI::ValidationError("PSK_TOLERANCE", "not a positive number");
    t.rel = v;
  }
  if (o.tolerance) t.rel = *o.tolerance;
  return t;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

int finish_report(const Report& r, const Options& o) {
  emit(o.report, dump_json(report_to_json(r)));
  const auto failed = r.failures();
  for (size_t k = 0; k < failed.size() && k < 20; ++k) {
    const Check& c = failed[k];
    std::cerr << "FAIL " << c.name;
    if (c.at) std::cerr << " at (" << c.at->first << "," << c.at->second << ")";
    std::cerr << " residual " << c.residual << " tolerance " << c.tolerance << "\n";
  }
  if (failed.size() > 20) std::cerr << "... " << failed.size() - 20 << " more\n";
  std::cerr << (failed.empty() ? "pass" : "fail") << ": " << r.checks.size() - failed.size() << "/" << r.checks.size()
            << " checks\n";
  return failed.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal contact element nets and Backlund transforms"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--tolerance", opt.tolerance, "relative tolerance (overrides PSK_TOLERANCE)")
      ->check(CLI::PositiveNumber);

  // gen
  TractrixParams par;
  auto* gen = app.add_subcommand("gen", "generate a net");
  gen->require_subcommand(1);
  auto* gen_axis = gen->add_subcommand("axis", "radial normals along the z-axis");
  auto* gen_tractrix = gen->add_subcommand("tractrix", "discrete pseudosphere of revolution");
  for (auto* c : {gen_axis, gen_tractrix}) {
    c->add_option("--k", par.k, "steps per full turn")->required()->check(CLI::Range(3, 1 << 20));
    c->add_option("--rows", par.rows, "rows (angular index)")->check(CLI::PositiveNumber);
    c->add_option("--cols", par.cols, "columns (height index)")->check(CLI::PositiveNumber);
    c->add_option("--out,-o", opt.out, "output net file (default stdout)");
  }
  gen_tractrix->add_option("--d", par.d, "seed distance")->check(CLI::PositiveNumber);
  gen_tractrix->add_option("--alpha", par.alpha, "seed normal angle");

  // backlund
  std::string in;
  Vec3 q0 = Vec3::Zero();
  std::string branch = "+";
  std::optional<double> angle;
  auto* bl = app.add_subcommand("backlund", "Backlund mate of a net");
  bl->add_option("input", in, "source net file")->required();
  bl->add_option("--qx", q0.x())->required();
  bl->add_option("--qy", q0.y())->required();
  bl->add_option("--qz", q0.z())->required();
  bl->add_option("--branch", branch, "seed normal root")->check(CLI::IsMember({"+", "-"}));
  bl->add_option("--angle", angle,
                 "signed seed normal angle from n(0,0) about p(0,0)->q0; required when the source curvature is undefined");
  bl->add_option("--out,-o", opt.out, "output net file (default stdout)");

  // verify
  std::vector<std::string> files;
  int trials = 100;
  std::uint64_t seed = 42;
  std::optional<double> fixed_t, fixed_e;
  std::string completed;
  auto* ver = app.add_subcommand("verify", "run a checker and write a report");
  ver->require_subcommand(1);
  auto* v_principal = ver->add_subcommand("principal", "principal contact element net");
  v_principal->add_option("net", files, "net file")->required()->expected(1);
  auto* v_mates = ver->add_subcommand("mates", "Backlund mates");
  v_mates->add_option("nets", files, "two net files")->required()->expected(2);
  auto* v_theorem2 = ver->add_subcommand("theorem2", "rotation quadrilateral area ratio and curvature");
  v_theorem2->add_option("--trials", trials)->check(CLI::PositiveNumber);
  v_theorem2->add_option("--seed", seed);
  v_theorem2->add_option("--t", fixed_t, "fix t (default: random in [0.2, 2])");
  v_theorem2->add_option("--e", fixed_e, "fix e (default: random in [0.2, 2])");
  auto* v_bianchi = ver->add_subcommand("bianchi", "complete a permutability square");
  v_bianchi->add_option("nets", files, "source net and two mates")->required()->expected(3);
  v_bianchi->add_option("--out,-o", completed, "write the completed net");
  for (auto* c : {v_principal, v_mates, v_theorem2, v_bianchi})
    c->add_option("--report,-r", opt.report, "report file (default stdout)");

  // export-obj
  std::string obj_out;
  auto* ex = app.add_subcommand("export-obj", "Wavefront OBJ of a net");
  ex->add_option("input", in, "net file")->required();
  ex->add_option("output", obj_out, "OBJ file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const Tolerances tol = tolerances(opt);
    if (*gen) {
      const NetPatch net = *gen_axis ? axis_net(par) : tractrix_net(par, tol);
      emit(opt.out, dump_json(net_to_json(net)));
      return 0;
    }
    if (*bl) {
      const NetPatch src = load_net(in);
      const ContactElement& p0 = src.at(0, 0);
      PropagateOptions po;
      po.tol = tol;
      ContactElement s;
      s.p = q0;
      double k = std::numeric_limits<double>::quiet_NaN();
      if (angle) {
        detail::check_tangent_plane(p0, q0, tol);
        s.n = detail::turn(p0.n, (q0 - p0.p).normalized(), *angle);
        po.degenerate_source = true;
      } else {
        k = constant_curvature(src, tol);
        const auto ms = seed_normals(p0, q0, k, tol);
        s.n = ms[branch == "+" ? 0 : 1];
      }
      const Propagation pr = propagate(src, s, po);
      std::cerr.precision(17);
      std::cerr << "d " << pr.d << "\nphi " << pr.phi << "\ntwist " << pr.twist << "\nK " << k << "\n";
      emit(opt.out, dump_json(net_to_json(pr.net)));
      return 0;
    }
    if (*v_principal) {
      Report r = check_principal_net(load_net(files[0]), tol);
      return finish_report(r, opt);
    }
    if (*v_mates) return finish_report(verify_mates(load_net(files[0]), load_net(files[1]), tol), opt);
    if (*v_theorem2) {
      RotQuadConfig cfg;
      cfg.seed = seed;
      std::optional<std::pair<double, double>> range;
      if (fixed_t) cfg.t = *fixed_t;
      if (fixed_e) cfg.e = *fixed_e;
      // with only one of t, e given the other keeps its default
      if (!fixed_t && !fixed_e) range = std::make_pair(0.2, 2.0);
      const auto t0 = std::chrono::steady_clock::now();
      Report r = verify_theorem2(cfg, trials, 1e-8, range);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      r.metric("seconds", secs);
      return finish_report(r, opt);
    }
    if (*v_bianchi) {
      const Completion c = complete_net(load_net(files[0]), load_net(files[1]), load_net(files[2]), tol);
      if (!completed.empty()) save_net(c.net, completed);
      return finish_report(c.report, opt);
    }
    if (*ex) {
      write_file(obj_out, to_obj(load_net(in)));
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

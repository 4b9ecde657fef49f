// difem command line: convergence studies for the built-in interface
// problems, verification suites, and mesh/matrix dumps.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "difem/difem.hpp"

namespace {

using namespace difem;

struct RunConfig {
  int example = 2;
  double beta_minus = 1.0;
  std::string levels;  // "lo:hi"
  std::string out_dir = "results";
  int reference_degree = 6;
  double assumption_c = 1e-6;
  std::string config_file;
};

std::pair<int, int> parse_levels(const std::string& s, int def_lo, int def_hi) {
  if (s.empty()) return {def_lo, def_hi};
  auto pos = s.find(':');
  if (pos == std::string::npos) {
    int lv = std::stoi(s);
    return {lv, lv};
  }
  return {std::stoi(s.substr(0, pos)), std::stoi(s.substr(pos + 1))};
}

// plain-text "key = value" configuration; explicit command-line flags win
void load_config(const std::string& path, RunConfig& cfg, const CLI::App& app) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::string line;
  auto overridden = [&](const std::string& flag) { return app.count(flag) > 0; };
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "example" && !overridden("--example")) cfg.example = std::stoi(val);
    else if (key == "beta_minus" && !overridden("--beta-minus")) cfg.beta_minus = std::stod(val);
    else if (key == "levels" && !overridden("--levels")) cfg.levels = val;
    else if (key == "output_dir" && !overridden("--out")) cfg.out_dir = val;
    else if (key == "reference_degree" && !overridden("--reference-degree"))
      cfg.reference_degree = std::stoi(val);
    else if (key == "assumption_c" && !overridden("--assumption-c"))
      cfg.assumption_c = std::stod(val);
    else if (!key.empty())
      throw ConfigError("unknown config key: " + key);
  }
}

int cmd_run(const RunConfig& cfg) {
  ProblemSpec prob = catalog(cfg.example, cfg.beta_minus);
  auto [lo, hi] = parse_levels(cfg.levels, prob.first_level, prob.default_last_level);
  StudyOptions opt;
  opt.out_dir = cfg.out_dir;
  opt.ref_degree = cfg.reference_degree;
  opt.assumption_c = cfg.assumption_c;
  opt.verbose = true;
  auto results = run_convergence(prob, lo, hi, opt);
  std::vector<ErrorRecord> recs;
  for (const auto& r : results) recs.push_back(r.errors);
  std::cout << prob.name << "  beta_minus = " << cfg.beta_minus << "\n"
            << rate_table_text(recs);
  if (!cfg.out_dir.empty())
    std::cout << "CSV and gnuplot data written to " << cfg.out_dir << "\n";
  return 0;
}

int verify_quadrature() {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    if (norm(b - a) < 1e-6) continue;
    double c0 = u(rng), c1 = u(rng), c2 = u(rng);
    auto f = [&](Vec2 p) { return c0 + c1 * p.x + c2 * p.y; };
    double exact = 0.5 * norm(b - a) * (f(a) + f(b));
    worst = std::max(worst, std::abs(integrate_segment(f, a, b) - exact) /
                                std::max(1.0, std::abs(exact)));
  }
  for (int it = 0; it < 1000; ++it) {
    Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    double area2 = cross(b - a, c - a);
    if (std::abs(area2) < 1e-4) continue;
    double cf[6];
    for (double& x : cf) x = u(rng);
    auto f = [&](Vec2 p) {
      return cf[0] + cf[1] * p.x + cf[2] * p.y + cf[3] * p.x * p.x + cf[4] * p.x * p.y +
             cf[5] * p.y * p.y;
    };
    // exact degree-2 integral via the midpoint-of-edges rule, which is exact
    // for quadratics and independent of the production rule's points
    Vec2 m01 = (a + b) * 0.5, m12 = (b + c) * 0.5, m20 = (c + a) * 0.5;
    double exact = std::abs(area2) * 0.5 / 3.0 * (f(m01) + f(m12) + f(m20));
    worst = std::max(worst, std::abs(integrate_tri3(f, a, b, c) - exact) /
                                std::max(1.0, std::abs(exact)));
  }
  std::cout << "quadrature exactness: max relative defect " << worst << "\n";
  return worst <= 1e-12 ? 0 : 1;
}

int verify_commuting(const std::string& out_csv) {
  std::mt19937_64 rng(20240811);
  std::string csv = "level,example,max_defect,mean_defect\n";
  double worst = 0.0;
  for (int ex = 1; ex <= 4; ++ex) {
    ProblemSpec p = catalog(ex, ex == 2 ? 10.0 : 1.0);
    for (int lv = 2; lv <= 5; ++lv) {
      Mesh m = build_mesh(p.lo, p.hi, lv);
      CutGeometry g = classify(m, p.levelset);
      DofLayout L = build_layout(m, g, p);
      InterfacePatchSet ps = build_patches(m, g);
      double mx = 0.0, mean = 0.0;
      const int n_fields = 50;
      for (int it = 0; it < n_fields; ++it) {
        P2VectorField f = P2VectorField::random(rng);
        auto rep = check_commuting(m, g, L, ps, f);
        mx = std::max(mx, rep.max_defect);
        mean += rep.mean_defect / n_fields;
      }
      char line[96];
      std::snprintf(line, sizeof line, "%d,%d,%.3e,%.3e\n", lv, ex, mx, mean);
      csv += line;
      worst = std::max(worst, mx);
    }
  }
  std::cout << csv;
  if (!out_csv.empty()) {
    std::ofstream os(out_csv);
    os << "# seed 20240811\n" << csv;
    std::cout << "report written to " << out_csv << "\n";
  }
  std::cout << "commuting defect: max " << worst << "\n";
  return worst <= 1e-10 ? 0 : 1;
}

int verify_infsup() {
  ProblemSpec p = catalog(2, 1.0);
  double base = 0.0;
  bool ok = true;
  for (int lv = 2; lv <= 5; ++lv) {
    Mesh m = build_mesh(p.lo, p.hi, lv);
    CutGeometry g = classify(m, p.levelset);
    DofLayout L = build_layout(m, g, p);
    double alpha = estimate_infsup(m, g, L, p);
    if (lv == 2) base = alpha;
    std::cout << "level " << lv << ": inf-sup constant " << alpha << "\n";
    ok = ok && alpha >= 0.5 * base;
  }
  std::cout << (ok ? "inf-sup stable across levels\n" : "inf-sup degenerated\n");
  return ok ? 0 : 1;
}

int verify_patch() {
  bool ok = true;
  auto res = run_convergence(patch_test_problem(), 2, 5, {});
  for (const auto& r : res) {
    std::cout << "level " << r.errors.level << ": grad " << r.errors.grad << " uplus "
              << r.errors.u_plus << " sigma " << r.errors.sigma << "\n";
    ok = ok && r.errors.grad <= 1e-9 && r.errors.u_plus <= 1e-9 && r.errors.sigma <= 1e-9;
  }
  std::cout << (ok ? "patch test reproduced exactly\n" : "patch test FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"difem: a direct finite element method for two-dimensional elliptic "
               "interface problems on unfitted meshes"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* run = app.add_subcommand("run", "run a convergence study for a built-in example");
  run->add_option("--example", cfg.example, "example id (1..4)");
  run->add_option("--beta-minus", cfg.beta_minus, "diffusion coefficient on Omega^-");
  run->add_option("--levels", cfg.levels, "level range lo:hi (default: example's range)");
  run->add_option("--out", cfg.out_dir, "output directory for CSV/gnuplot data");
  run->add_option("--reference-degree", cfg.reference_degree, "error-norm quadrature degree");
  run->add_option("--assumption-c", cfg.assumption_c, "threshold c in c h^4 <= |K_h^-|");
  run->add_option("--config", cfg.config_file, "key = value configuration file");

  std::string suite, commuting_csv;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite, "quadrature|commuting|infsup|patch")->required();
  verify->add_option("--out", commuting_csv, "CSV output (commuting suite)");

  int dump_level = 3;
  std::string dump_domain, dump_out;
  auto* dump = app.add_subcommand("dump-mesh", "write a mesh in the plain-text format");
  dump->add_option("--level", dump_level, "refinement level");
  dump->add_option("--domain", dump_domain, "square bounds lo:hi (default 0:1)");
  dump->add_option("--out", dump_out, "output file (default stdout)");

  RunConfig mcfg;
  int mat_level = 3;
  std::string mat_out;
  auto* dmat = app.add_subcommand("dump-matrix", "write the assembled system in "
                                                 "coordinate text format");
  dmat->add_option("--example", mcfg.example, "example id (1..4)");
  dmat->add_option("--beta-minus", mcfg.beta_minus, "diffusion coefficient on Omega^-");
  dmat->add_option("--level", mat_level, "refinement level");
  dmat->add_option("--out", mat_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!cfg.config_file.empty()) load_config(cfg.config_file, cfg, *run);
      return cmd_run(cfg);
    }
    if (*verify) {
      if (suite == "quadrature") return verify_quadrature();
      if (suite == "commuting") return verify_commuting(commuting_csv);
      if (suite == "infsup") return verify_infsup();
      if (suite == "patch") return verify_patch();
      throw difem::ConfigError("unknown suite: " + suite);
    }
    if (*dump) {
      auto [lo, hi] = [&]() -> std::pair<double, double> {
        if (dump_domain.empty()) return {0.0, 1.0};
        auto pos = dump_domain.find(':');
        return {std::stod(dump_domain.substr(0, pos)), std::stod(dump_domain.substr(pos + 1))};
      }();
      difem::Mesh m = difem::build_mesh(lo, hi, dump_level);
      if (dump_out.empty()) {
        difem::dump_mesh(m, std::cout);
      } else {
        std::ofstream os(dump_out);
        difem::dump_mesh(m, os);
      }
      return 0;
    }
    if (*dmat) {
      difem::ProblemSpec prob = difem::catalog(mcfg.example, mcfg.beta_minus);
      difem::Mesh m = difem::build_mesh(prob.lo, prob.hi, mat_level);
      difem::CutGeometry g = difem::classify(m, prob.levelset);
      difem::DofLayout L = difem::build_layout(m, g, prob);
      difem::SaddleSystem S = difem::assemble(m, g, L, prob);
      if (mat_out.empty()) {
        S.dump(std::cout);
      } else {
        std::ofstream os(mat_out);
        S.dump(os);
      }
      return 0;
    }
  } catch (const difem::InterfaceResolutionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;  // assumption violation
  } catch (const difem::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;  // numerical failure
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

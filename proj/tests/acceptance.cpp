// Acceptance runner: executes every top-level criterion at its pinned
// tolerance and prints one PASS/FAIL line per criterion. Exits nonzero
// if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "pathatlas/atlas.hpp"
#include "pathatlas/fixtures.hpp"
#include "pathatlas/ift.hpp"
#include "pathatlas/suites.hpp"

using namespace pathatlas;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void line(int index, bool ok, const std::string& what) {
  std::printf("[%s] %2d. %s\n", ok ? "PASS" : "FAIL", index, what.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

using ReportMap = std::map<std::string, VerificationReport>;

ReportMap run(const std::string& suite, const std::string& fixture = "default") {
  SuiteConfig cfg;
  cfg.suite = suite;
  cfg.fixture = fixture;
  ReportMap out;
  for (auto& r : run_suite(cfg)) out[r.check] = r;
  return out;
}

int cli_run(const std::string& args) {
  const std::string cmd = std::string(PATHATLAS_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

int main() {
  // 1. Sobolev embedding with constant 1 on 200 random paths, under 10 s
  {
    const auto t0 = Clock::now();
    const ReportMap m = run("sobolev");
    const double dt = seconds_since(t0);
    const bool ok = m.at("embedding-random-paths").passed &&
                    m.at("one-sided-embedding").passed && dt < 10.0;
    std::ostringstream os;
    os << "Sobolev embedding, 200 random paths, sup <= (1+1e-3) w12 ("
       << dt << " s)";
    line(1, ok, os.str());

    // 2. closed-form exponential path
    const auto& r = m.at("closed-form-exp-path");
    const bool ok2 = r.passed &&
                     r.details.at("w12_error").get<double>() <= 1e-3 &&
                     r.details.at("sup").get<double>() == 1.0;
    line(2, ok2, "closed-form path exp(-|s|): w12 = sqrt(2) +- 1e-3, sup = 1 at s=0");
  }

  // 3. mollifier second-order convergence and derivative commutation
  {
    const ReportMap m = run("mollifier");
    bool ok = m.at("second-order-convergence").passed &&
              m.at("derivative-commutation").passed;
    for (const auto& row : m.at("second-order-convergence").details.at("series")) {
      const double ratio = row.at("ratio").get<double>();
      ok = ok && ratio >= 0.2 && ratio <= 0.35;
    }
    line(3, ok, "mollifier: err(mu/2)/err(mu) in [0.2,0.35] for mu in {0.8,0.4,0.2}, commutation <= 1e-8 |f|");
  }

  // 4. Bochner norm inequality
  {
    const ReportMap m = run("bochner");
    line(4, m.at("norm-inequality").passed,
         "Bochner |int f| <= int |f| on 100 random 10-step functions, both levels, slack 1e-12");
  }

  // 5. tameness certificate and the composition constant, under 30 s
  {
    const auto t0 = Clock::now();
    const ReportMap mt = run("tame");
    const ReportMap mc = run("compose");
    const double dt = seconds_since(t0);
    const bool ok = mt.at("certificate").passed &&
                    mt.at("certificate").details.at("n_samples").get<int>() == 1000 &&
                    mc.at("composition-constant").passed && dt < 30.0;
    std::ostringstream os;
    os << "tameness of u+0.3 sin u on K=6 loops with fitted kappa, composition at 3k^3+2k^2 ("
       << dt << " s)";
    line(5, ok, os.str());
  }

  // 6. lift and weak tangent map C1 probes
  {
    const ReportMap m = run("lift");
    const auto& a = m.at("lift-c1");
    const auto& b = m.at("weak-tangent-c1");
    const bool ok =
        a.passed && b.passed &&
        a.details.at("fitted_order").get<double>() >= 0.9 &&
        b.details.at("fitted_order").get<double>() >= 0.9 &&
        a.details.at("central_diff_at_smallest_h").get<double>() <= 1e-5 &&
        b.details.at("central_diff_at_smallest_h").get<double>() <= 1e-5;
    line(6, ok, "lift C1: order >= 0.9 over h in {1e-2,1e-3,1e-4}, central diff <= 1e-5; same for the weak tangent map");
  }

  // 7. quantitative inverse function theorem on the scalar fixture
  {
    const ReportMap m = run("ift");
    const auto& inner = m.at("inner-ball-inversion");
    const auto& incl = m.at("ball-inclusions");
    const bool ok =
        inner.passed && incl.passed &&
        inner.details.at("worst_iterations").get<int>() <= 30 &&
        inner.details.at("worst_residual").get<double>() < 1e-12 &&
        inner.details.at("worst_contraction_rate").get<double>() <= 0.41 &&
        incl.details.at("inner_pass").get<int>() == 500 &&
        incl.details.at("outer_pass").get<int>() == 500;
    line(7, ok, "quantitative IFT: 500/500 inner solves (<=30 iters, 1e-12), 500/500 inclusions, rate <= 0.41");

    // 8. Neumann bound, including the saturating fixture
    const auto& sat = m.at("neumann-saturation");
    const auto& gen = m.at("interp-inverse-derivatives");
    bool ok8 = sat.passed && gen.passed &&
               sat.details.at("saturation_error").get<double>() <= 1e-10;
    // calibrated warped-atlas junctions also obey the bound
    const TimeGrid grid = grid_make(3.0, 240);
    CalibrationOptions copt;
    copt.eps0 = 0.8;
    for (int k : {2, 3}) {
      const PathChart A = fixtures::calibrated_chart(
          fixtures::make_warped_atlas(k, 0, grid), copt);
      for (int j = 1; j <= A.cov.size() - 1; ++j) {
        const double smid = 0.5 * (A.t_minus[j - 1] + A.cov.times[j - 1]);
        const InterpMap S = interpolation_map(A, j, smid);
        const VerificationReport r = inverse_derivative_checks(
            S, ScaleVector::zero(S.map.scale), 1e-5, 99);
        ok8 = ok8 && r.passed &&
              r.details.at("inverse_op_norm").get<double>() <= 2.0 + 1e-9;
      }
    }
    line(8, ok8, "Neumann bound: every calibrated interpolation inverse <= 2; linear fixture saturates 2 +- 1e-10");
  }

  // 9/10. atlas criteria, under 2 minutes total
  {
    const auto t0 = Clock::now();
    const ReportMap m = run("atlas");
    const double dt = seconds_since(t0);
    bool ok9 = true, ok10 = dt < 120.0;
    for (const std::string k : {"-k2", "-k3"}) {
      ok9 = ok9 && m.at("level2-junctions" + k).passed &&
            m.at("level2-junctions" + k).margin > 0.0;
      const auto& rt = m.at("transition-roundtrip" + k);
      const auto& c1 = m.at("transition-c1" + k);
      ok10 = ok10 && m.at("center-reproduction" + k).passed &&
             m.at("center-reproduction" + k).details.at("worst").get<double>() <= 1e-12 &&
             rt.passed &&
             rt.details.at("samples").get<int>() == 50 &&
             rt.details.at("worst_roundtrip").get<double>() <= 1e-8 &&
             c1.passed &&
             c1.details.at("fd").at("fitted_order").get<double>() >= 0.9 &&
             m.at("junction-continuity" + k).passed;
    }
    line(9, ok9, "level-2 inverse estimates with mu = 2(1+2C) at every calibrated junction, 200 samples");
    std::ostringstream os;
    os << "atlas: center reproduction 1e-12, 50-sample roundtrips <= 1e-8, C1 order >= 0.9, junctions <= 1e-10 ("
       << dt << " s)";
    line(10, ok10, os.str());
  }

  // 11. exponential charts
  {
    const ReportMap m = run("expcharts");
    const bool ok = m.at("sphere-exp-log-roundtrip").passed &&
                    m.at("exp-transition-roundtrip").passed &&
                    m.at("model-hypotheses-flat").passed &&
                    m.at("model-hypotheses-sphere").passed &&
                    m.at("model-hypotheses-conformal").passed &&
                    m.at("model-hypotheses-sphere").details
                            .at("frozen_tail_residual").get<double>() == 0.0 &&
                    m.at("trivialization-change").passed;
    line(11, ok, "exp charts: sphere roundtrips, model hypotheses with exact frozen tails, frame change inverse");
  }

  // 12. negative controls through the CLI: nonzero exit and a witness
  {
    const fs::path dir = fs::temp_directory_path() / "pathatlas_acceptance_neg";
    fs::remove_all(dir);
    const std::string cfgdir = PATHATLAS_CONFIG_DIR;
    const int rc_tame = cli_run("verify tame --config " + cfgdir +
                                "/negative_tame.json --out " + (dir / "tame").string());
    const int rc_ift = cli_run("verify ift --config " + cfgdir +
                               "/negative_ift.json --out " + (dir / "ift").string());
    bool ok = rc_tame == 1 && rc_ift == 1;
    for (const std::string sub : {"tame", "ift"}) {
      std::ifstream f(dir / sub / "report.json");
      if (!f.good()) {
        ok = false;
        break;
      }
      Json j;
      f >> j;
      bool witness = false;
      for (const auto& r : j.at("reports"))
        if (!r.at("passed").get<bool>() && !r.at("witnesses").empty())
          witness = true;
      ok = ok && witness;
    }
    // merged report over the two failing runs also signals failure, and
    // a bogus suite name is a usage error
    const int rc_merge = cli_run("report --merge " + dir.string());
    ok = ok && rc_merge == 1 && fs::exists(dir / "merged.json");
    ok = ok && cli_run("verify bogus") == 2;
    fs::remove_all(dir);
    line(12, ok, "negative controls: non-tame kappa and gamma=1.2 fixtures fail with exit 1 and witnesses");
  }

  // 13. determinism: byte-identical reports for a fixed config
  {
    SuiteConfig cfg;
    cfg.suite = "all";
    const std::string a = reports_to_string(run_suite(cfg));
    const std::string b = reports_to_string(run_suite(cfg));
    bool ok = a == b;

    const fs::path dir = fs::temp_directory_path() / "pathatlas_acceptance_det";
    fs::remove_all(dir);
    const std::string cfgdir = PATHATLAS_CONFIG_DIR;
    cli_run("verify all --config " + cfgdir + "/default.json --out " +
            (dir / "r1").string());
    cli_run("verify all --config " + cfgdir + "/default.json --out " +
            (dir / "r2").string());
    std::ifstream f1(dir / "r1" / "report.json"), f2(dir / "r2" / "report.json");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    ok = ok && s1.str().size() > 0 && s1.str() == s2.str();
    fs::remove_all(dir);
    line(13, ok, "determinism: two runs of `verify all` produce byte-identical JSON");
  }

  std::printf("%s: %d criterion(s) failed\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}

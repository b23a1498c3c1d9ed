#pragma once

#include <string>
#include <vector>

#include "pathatlas/report.hpp"
#include "pathatlas/scales.hpp"

namespace pathatlas {

/// {n_modes, w1[], w2[]} wire format for two-level scales.
Json scale_to_json(const ScalePair& s);
ScaleHandle scale_from_json(const Json& j);

/// Configuration of a verification run. All tolerances of the individual
/// checks are pinned in the suite implementations; the config selects the
/// suite, the fixture family, the discretization, and the seed. An
/// explicit "scale" entry overrides the loop-scale K for the suites that
/// work on a generic scale.
struct SuiteConfig {
  std::string suite = "all";
  int K = 6;          // loop-scale truncation
  double L = 10.0;    // grid half-width for function-space suites
  int M = 2000;       // grid intervals
  std::string fixture = "default";  // default | negative_tame | negative_ift
  std::uint64_t seed = 42;
  std::string out_dir;
  ScaleHandle explicit_scale;  // optional

  static SuiteConfig from_json(const Json& j);
  Json to_json() const;
  /// Canonical string for inputs digests.
  std::string canonical() const;
};

extern const std::vector<std::string> kSuiteNames;
bool is_known_suite(const std::string& name);

/// Run one named suite (or "all"); deterministic for a fixed config.
std::vector<VerificationReport> run_suite(const SuiteConfig& config);

/// Write report.json (and per-series CSV files for checks that carry an
/// h/residual- or mu/error-style series) into config.out_dir.
void emit_report(const std::vector<VerificationReport>& reports,
                 const std::string& format, const std::string& out_dir);

/// Serialize exactly as emit_report writes report.json.
std::string reports_to_string(const std::vector<VerificationReport>& reports);

}  // namespace pathatlas

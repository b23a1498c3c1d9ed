#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pathatlas {

using Json = nlohmann::ordered_json;

/// One verification record: the outcome of a single numerical check,
/// together with its margins and any failure witnesses. `anchor` is a
/// stable identifier of the mathematical fact being checked, or
/// "plumbing" for infrastructure checks.
struct VerificationReport {
  std::string suite;
  std::string check;
  std::string anchor = "plumbing";
  std::string inputs_digest;
  bool passed = false;
  double margin = 0.0;  // min slack across samples; > 0 means pass with room
  Json details = Json::object();
  std::vector<std::string> witnesses;

  Json to_json() const;
};

VerificationReport report_from_json(const Json& j);

/// FNV-1a hash of a canonical input description, hex-encoded.
std::string digest(const std::string& canonical_inputs);

/// Summary JSON for a batch of reports (counts plus the full records).
Json reports_to_json(const std::vector<VerificationReport>& reports);

bool all_passed(const std::vector<VerificationReport>& reports);

}  // namespace pathatlas

#include "pathatlas/report.hpp"

#include <cstdio>

namespace pathatlas {

Json VerificationReport::to_json() const {
  Json j = Json::object();
  j["suite"] = suite;
  j["check"] = check;
  j["anchor"] = anchor;
  j["inputs_digest"] = inputs_digest;
  j["passed"] = passed;
  j["margin"] = margin;
  j["details"] = details;
  j["witnesses"] = witnesses;
  return j;
}

VerificationReport report_from_json(const Json& j) {
  VerificationReport r;
  r.suite = j.at("suite").get<std::string>();
  r.check = j.at("check").get<std::string>();
  r.anchor = j.at("anchor").get<std::string>();
  r.inputs_digest = j.at("inputs_digest").get<std::string>();
  r.passed = j.at("passed").get<bool>();
  r.margin = j.at("margin").get<double>();
  r.details = j.at("details");
  r.witnesses = j.at("witnesses").get<std::vector<std::string>>();
  return r;
}

std::string digest(const std::string& canonical_inputs) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : canonical_inputs) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

Json reports_to_json(const std::vector<VerificationReport>& reports) {
  Json arr = Json::array();
  int failed = 0;
  for (const auto& r : reports) {
    arr.push_back(r.to_json());
    if (!r.passed) ++failed;
  }
  Json j = Json::object();
  j["total"] = reports.size();
  j["failed"] = failed;
  j["passed_all"] = (failed == 0);
  j["reports"] = std::move(arr);
  return j;
}

bool all_passed(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.passed) return false;
  return true;
}

}  // namespace pathatlas

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pathatlas/errors.hpp"
#include "pathatlas/report.hpp"
#include "pathatlas/suites.hpp"

namespace fs = std::filesystem;
using pathatlas::Json;

namespace {

int run_verify(const std::string& suite, const std::string& config_path,
               bool seed_set, std::uint64_t seed, const std::string& out_dir) {
  pathatlas::SuiteConfig cfg;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f.good()) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return 2;
    }
    Json j;
    f >> j;
    cfg = pathatlas::SuiteConfig::from_json(j);
  }
  if (!suite.empty()) cfg.suite = suite;
  if (seed_set) cfg.seed = seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!pathatlas::is_known_suite(cfg.suite)) {
    std::cerr << "error: unknown suite '" << cfg.suite << "'\n";
    return 2;
  }

  const auto reports = pathatlas::run_suite(cfg);
  int failed = 0;
  for (const auto& r : reports) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.suite << "/"
              << r.check << "  margin=" << r.margin << "\n";
    if (!r.passed) {
      ++failed;
      for (const auto& w : r.witnesses) std::cout << "      witness: " << w << "\n";
    }
  }
  std::cout << reports.size() - failed << "/" << reports.size()
            << " checks passed\n";
  if (!cfg.out_dir.empty())
    pathatlas::emit_report(reports, "both", cfg.out_dir);
  return failed == 0 ? 0 : 1;
}

int run_merge(const std::string& dir) {
  Json merged = Json::object();
  Json all = Json::array();
  std::size_t total = 0, failed = 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "report.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream f(p);
    Json j;
    f >> j;
    total += j.at("total").get<std::size_t>();
    failed += j.at("failed").get<std::size_t>();
    for (auto& r : j.at("reports")) all.push_back(r);
  }
  merged["merged_files"] = files.size();
  merged["total"] = total;
  merged["failed"] = failed;
  merged["passed_all"] = failed == 0;
  merged["reports"] = std::move(all);
  std::ofstream out(fs::path(dir) / "merged.json");
  if (!out.good()) {
    std::cerr << "error: cannot write merged.json\n";
    return 2;
  }
  out << merged.dump(2) << "\n";
  std::cout << "merged " << files.size() << " report files, " << failed
            << " failures\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification suites for two-level path-space charts"};
  app.require_subcommand(1);

  std::string suite, config_path, out_dir, merge_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "suite name or 'all'");
  verify->add_option("--config", config_path, "JSON config file");
  verify->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  verify->add_option("--out", out_dir, "output directory for reports");

  auto* report = app.add_subcommand("report", "merge report directories");
  report->add_option("--merge", merge_dir, "directory with report.json files")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed())
      return run_verify(suite, config_path, seed_set, seed, out_dir);
    return run_merge(merge_dir);
  } catch (const pathatlas::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

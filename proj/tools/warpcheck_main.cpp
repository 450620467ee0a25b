// Command-line front end: runs verification cases for a configured doubly
// warped product and writes match / corrected-match / mismatch reports.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "warpcheck/verify.hpp"

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warpcheck: verifies closed-form tension/bitension formulas on doubly "
               "warped products against independent jet-based oracles"};
  app.require_subcommand(1);

  std::string config_arg = "cfg-a";
  std::vector<std::string> case_args;
  int samples = 100;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  int jet_order = 4;
  bool printed_forms = false;
  bool serial = false;
  std::string report_path;
  std::string format = "text";

  CLI::App* verify = app.add_subcommand("verify", "run verification cases");
  verify->add_option("--config", config_arg,
                     "configuration: a builtin name (" + join(warpcheck::builtin_config_names()) +
                         ") or a JSON file path")
      ->capture_default_str();
  verify->add_option("--case", case_args,
                     "case id (" + join(warpcheck::case_ids()) + ") or 'all'; repeatable");
  verify->add_option("--samples", samples, "points per case")->capture_default_str();
  verify->add_option("--seed", seed, "sampling seed")->capture_default_str();
  verify->add_option("--tol", tol, "acceptance tolerance (abs or rel)")->capture_default_str();
  verify->add_option("--jet-order", jet_order, "maximum jet order consumed by the oracles")
      ->capture_default_str();
  verify->add_flag("--printed-forms", printed_forms,
                   "evaluate only the transcribed forms; disable the correction ladder");
  verify->add_flag("--serial", serial, "use the serial reference sweep instead of OpenMP");
  verify->add_option("--report", report_path, "write the serialized report to this file");
  verify->add_option("--format", format, "report format: json, csv, or text")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();

  CLI::App* list_cases = app.add_subcommand("list-cases", "print the available case ids");
  CLI::App* list_configs =
      app.add_subcommand("list-configs", "print the builtin configuration names");

  CLI11_PARSE(app, argc, argv);

  if (list_cases->parsed()) {
    for (const std::string& id : warpcheck::case_ids()) std::puts(id.c_str());
    return 0;
  }
  if (list_configs->parsed()) {
    for (const std::string& name : warpcheck::builtin_config_names()) std::puts(name.c_str());
    return 0;
  }

  try {
    warpcheck::VerifyConfig cfg = warpcheck::load_config(config_arg);
    if (!case_args.empty()) cfg.cases = case_args;
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.tol = tol;
    cfg.jet_order = jet_order;
    cfg.printed_forms_only = printed_forms;

    const warpcheck::RunMode mode =
        serial ? warpcheck::RunMode::serial : warpcheck::RunMode::parallel;
    const std::vector<warpcheck::FieldReport> reports = warpcheck::run_suite(cfg, mode);
    const std::string timestamp = utc_timestamp();

    std::string serialized;
    if (format == "json")
      serialized = warpcheck::to_json(reports, cfg, timestamp);
    else if (format == "csv")
      serialized = warpcheck::to_csv(reports);
    else
      serialized = warpcheck::to_text(reports, cfg, timestamp);

    if (!report_path.empty()) {
      std::ofstream out(report_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write report to '" << report_path << "'\n";
        return 2;
      }
      out << serialized;
      std::cout << warpcheck::to_text(reports, cfg, timestamp);
    } else {
      std::cout << serialized;
    }
    return warpcheck::all_passed(reports) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

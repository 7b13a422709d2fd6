// sigma345: periods, sigma function and identity checks for the (3,4,5)
// genus-2 space curve.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigma345/suites.hpp"

namespace {

sigma345::RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sigma345::IoError("cannot open config file: " + path);
  sigma345::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw sigma345::ConfigError(std::string("config parse: ") + e.what());
  }
  return sigma345::config_from_json(j);
}

sigma345::Complex parse_complex(const std::string& tok) {
  const auto comma = tok.find(',');
  if (comma == std::string::npos)
    throw sigma345::ConfigError("expected re,im but got: " + tok);
  try {
    return {std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1))};
  } catch (const std::exception&) {
    throw sigma345::ConfigError("cannot parse complex value: " + tok);
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw sigma345::IoError("cannot open output file: " + out_path);
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "periods, sigma function and identity checks for the (3,4,5) curve"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  std::string out_path;
  int grid_res = 0;
  std::string grid_path = "sigma_grid.csv";
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", out_path, "write output to this file");
  app.add_option("--emit-grid", grid_res,
                 "also sample |sigma| on a res x res grid over the omega1 cell")
      ->check(CLI::Range(1, 4096));
  app.add_option("--grid-out", grid_path, "grid CSV path");
  app.fallthrough();

  auto* cmd_check =
      app.add_subcommand("check", "run the configured suites, report pass/fail");
  auto* cmd_periods =
      app.add_subcommand("periods", "compute and print the period matrices");
  auto* cmd_verify = app.add_subcommand("verify", "run a single suite");
  std::string suite_arg;
  cmd_verify->add_option("suite", suite_arg, "suite name, or 'all'")
      ->required();
  auto* cmd_eval =
      app.add_subcommand("sigma-eval", "evaluate sigma at an argument");
  std::vector<std::string> u_tokens;
  cmd_eval
      ->add_option("--u", u_tokens, "argument components, two re,im pairs")
      ->expected(2)
      ->required();
  auto* cmd_report =
      app.add_subcommand("report", "full verification report");

  CLI11_PARSE(app, argc, argv);

  try {
    sigma345::RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (cmd_verify->parsed()) {
      cfg.suites = {suite_arg};
      sigma345::validate_config(cfg);
    }

    sigma345::Harness H(cfg);
    int rc = 0;

    if (cmd_periods->parsed()) {
      sigma345::Report rep;
      rep.config = cfg;
      rep.have_periods = true;
      rep.pd = H.periods();
      emit(format == "json" ? sigma345::report_to_json(rep).dump(2) + "\n"
                            : sigma345::report_to_text(rep),
           out_path);
    } else if (cmd_eval->parsed()) {
      sigma345::AbelVector u;
      u << parse_complex(u_tokens[0]), parse_complex(u_tokens[1]);
      const sigma345::Complex v = sigma345::sigma_eval(H.context(), u);
      if (format == "json") {
        sigma345::ordered_json j;
        j["u"] = {sigma345::complex_to_json(u(0)),
                  sigma345::complex_to_json(u(1))};
        j["sigma"] = sigma345::complex_to_json(v);
        emit(j.dump(2) + "\n", out_path);
      } else {
        std::ostringstream os;
        os.precision(15);
        os << "sigma(u) = " << v.real() << (v.imag() < 0 ? " - " : " + ")
           << std::abs(v.imag()) << "i\n";
        emit(os.str(), out_path);
      }
    } else if (cmd_check->parsed() || cmd_report->parsed() ||
               cmd_verify->parsed()) {
      const sigma345::Report rep = sigma345::run_report(H);
      emit(format == "json" ? sigma345::report_to_json(rep).dump(2) + "\n"
                            : sigma345::report_to_text(rep),
           out_path);
      rc = rep.pass() ? 0 : 1;
    }

    if (grid_res > 0) {
      std::ofstream os(grid_path);
      if (!os)
        throw sigma345::IoError("cannot open grid file: " + grid_path);
      sigma345::write_sigma_grid(H.context(), grid_res, os);
    }
    return rc;
  } catch (const sigma345::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sigma345::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

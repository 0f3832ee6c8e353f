// shadowlab run <experiment> [options]
//
// Exit codes: 0 all checks pass, 2 a check failed, 3 bad invocation or
// configuration.

#include "experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace shadowlab;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 2;
constexpr int kConfigError = 3;

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon experiments on shadowing and specification"};
  app.set_config("--config", "", "flat key = value configuration file");

  std::string command;
  std::string name;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> family;
  std::optional<std::string> epsilon;
  std::optional<std::string> delta;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "json";

  app.add_option("command", command, "run")->required()->check(CLI::IsMember({"run"}));
  std::vector<std::string> names;
  for (const auto& [k, v] : cli::registry()) names.push_back(k);
  app.add_option("experiment", name, "experiment name")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--horizon", horizon, "horizon L (or budget / s_max)");
  app.add_option("--family", family, "family size, depth or max preperiod");
  app.add_option("--epsilon", epsilon, "epsilon, e.g. 0.25 or 1/4");
  app.add_option("--delta", delta, "delta, e.g. 0.3 or 3/10");
  app.add_option("--seed", seed, "seed");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--format", format, "stdout rendering: json checks or csv table")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  cli::Config cfg{horizon, seed, epsilon, delta, family};
  cli::Output out;
  try {
    out = cli::registry().at(name)(cfg);
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return kCheckFailed;
  }

  Json checks = Json::array();
  for (const auto& c : out.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  out.config["seed"] = seed;
  out.config["format"] = format;
  Json doc{{"experiment", name},
           {"config", out.config},
           {"checks", checks},
           {"pass", out.pass()},
           {"results", out.results}};

  try {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_file(dir / (name + ".json"), doc.dump(2) + "\n");
    write_file(dir / (name + ".csv"), out.csv);
    for (const auto& [file, text] : out.extra) write_file(dir / file, text);

    std::ostringstream summary;
    summary << name << " at " << timestamp() << "\n";
    for (const auto& c : out.checks)
      summary << (c.pass ? "  ok   " : "  FAIL ") << c.name
              << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    summary << (out.pass() ? "all checks passed" : "checks failed") << "\n";
    write_file(dir / (name + ".summary.txt"), summary.str());
    std::cout << summary.str();
    if (format == "csv")
      std::cout << out.csv;
    else
      std::cout << doc["checks"].dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kConfigError;
  }

  if (!out.pass()) {
    for (const auto& c : out.checks)
      if (!c.pass) {
        std::cerr << "first failing check: " << c.name << "\n";
        break;
      }
    return kCheckFailed;
  }
  return kPass;
}

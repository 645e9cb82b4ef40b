#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "tubecheck/cli.hpp"
#include "tubecheck/error.hpp"

namespace tubecheck {

namespace {

struct Spec {
  const char* name;
  const char* help;
  std::vector<const char*> options;  // value options
  std::vector<const char*> flags;
};

const std::vector<Spec>& command_specs() {
  static const std::vector<Spec> specs{
      {"families", "List the catalog families and their domains", {}, {}},
      {"verify-sphericity", "Check that a catalog automorphism carries the base onto its quadric",
       {"family", "n", "k", "t"}, {"symbolic"}},
      {"verify-homogeneity", "Run the affine-homogeneity normalization at base points",
       {"family", "n", "k", "t", "expr", "point", "points", "seed"}, {"symbolic"}},
      {"trace", "Cubic trace with respect to the quadratic part", {"family", "n", "k", "p", "t", "tau", "expr"},
       {"symbolic"}},
      {"signature", "Levi-form signature at a base point",
       {"family", "n", "k", "p", "t", "tau", "t0", "expr", "point", "expect"}, {"symbolic"}},
      {"separate-quartics", "GL2(R) separation of q_t1 and q_t2", {"t1", "t2"}, {}},
      {"separate-bases", "Graded comparison of two bases", {"family1", "family2", "n", "k", "p", "t1", "t2"},
       {"symbolic"}},
      {"j-invariant", "j-invariant of the cubic c_t", {"t"}, {"symbolic"}},
      {"phi-scan", "Monotonicity scan of Phi", {"lo", "hi", "samples"}, {}},
      {"chi", "chi(t), or chi_inverse with --tau", {"t", "tau", "branch"}, {}},
      {"reciprocity", "j(t) j(-18/t) and its normalized variant", {"t"}, {"normalized", "symbolic"}},
      {"parse", "Parse an expression and print its canonical rendering", {"expr", "n"}, {}},
  };
  return specs;
}

}  // namespace

int cli_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact verification of spherical tube hypersurface identities", "tubecheck"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::string format = "json";
  std::string config_path;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--config", config_path, std::string("key=value configuration file (default: $") + kConfigEnv + ")");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, bool>> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& s : command_specs()) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    subs[s.name] = sub;
    for (const char* o : s.options) sub->add_option(std::string("--") + o, values[s.name][o]);
    for (const char* f : s.flags) sub->add_flag(std::string("--") + f, flags[s.name][f]);
  }

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  Config config;
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnv)) config_path = env;
    }
    if (!config_path.empty()) config = Config::load(config_path);
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  }

  Command cmd;
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    cmd.name = name;
    for (const auto& [k, v] : values[name]) {
      if (sub->count("--" + k) > 0) cmd.args[k] = v;
    }
    for (const auto& [k, v] : flags[name]) {
      if (v) cmd.args[k] = "";
    }
  }

  const Report report = run(cmd, config);
  const std::string body = format == "text" ? report.to_text() : report.to_json().dump(2) + "\n";
  out << body;
  if (report.verdict == ReportVerdict::Error) err << "error: " << report.values.value("message", "") << "\n";

  if (!config.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    std::ofstream f(std::filesystem::path(config.output_dir) / (cmd.name + ".json"));
    if (!f) {
      err << "cannot write report to " << config.output_dir << "\n";
      return 2;
    }
    f << report.to_json().dump(2) << "\n";
  }
  return exit_code(report);
}

}  // namespace tubecheck

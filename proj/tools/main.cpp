// Command-line front end: configuration-driven analyses of scales on right
// LCM monoids, emitting deterministic machine-readable reports.

#include <kmslcm/report.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
  std::string config_path;
  std::string beta_override;
  std::string cutoff_override;
  bool as_json = false;
  bool as_csv = false;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
  auto* config =
      cmd->add_option("--config", args.config_path,
                      "path to the JSON configuration document");
  if (needs_config) config->required();
  cmd->add_option("--beta", args.beta_override,
                  "comma-separated list overriding the configured beta values");
  cmd->add_option("--cutoff", args.cutoff_override,
                  "override the configured class cutoff (integer or p/q)");
  cmd->add_flag("--json", args.as_json, "emit JSON (default)");
  cmd->add_flag("--csv", args.as_csv, "emit flattened CSV rows instead of JSON");
  cmd->add_option("--seed", args.seed,
                  "seed for sampled structural diagnostics");
}

std::vector<double> parse_beta_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = std::stod(item, &used);
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
      ++used;
    if (used != item.size())
      throw kmslcm::ConfigError("--beta: cannot parse \"" + item + "\"");
    out.push_back(v);
  }
  if (out.empty()) throw kmslcm::ConfigError("--beta: empty list");
  return out;
}

kmslcm::Config load_config(const CommonArgs& args) {
  kmslcm::Config cfg = kmslcm::parse_config_file(args.config_path);
  if (!args.beta_override.empty()) cfg.beta = parse_beta_list(args.beta_override);
  if (!args.cutoff_override.empty()) {
    try {
      cfg.class_cutoff = kmslcm::parse_rational(args.cutoff_override);
    } catch (const std::exception& e) {
      throw kmslcm::ConfigError(std::string("--cutoff: ") + e.what());
    }
    if (cfg.class_cutoff < 1)
      throw kmslcm::ConfigError("--cutoff: must be at least 1");
  }
  if (args.seed) cfg.seed = *args.seed;
  return cfg;
}

int emit(const nlohmann::json& report, const kmslcm::Config* cfg,
         const CommonArgs& args) {
  if (args.as_json && args.as_csv)
    throw kmslcm::ConfigError("--json and --csv are mutually exclusive");
  std::string text = kmslcm::render_report(report, args.as_csv);
  if (cfg && cfg->output) {
    std::ofstream out(*cfg->output, std::ios::binary);
    if (!out)
      throw kmslcm::ConfigError("cannot write output file: " + *cfg->output);
    out << text;
    std::cerr << "report written to " << *cfg->output << "\n";
  } else {
    std::cout << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Scales on right LCM monoids: existence, zeta series, equilibrium "
      "states, and uniqueness ladders"};
  app.require_subcommand(1);

  CommonArgs analyze_args, existence_args, zeta_args, kms_args, uniq_args,
      boundary_args, families_args;
  std::string kms_s, kms_t;

  auto* cmd_analyze = app.add_subcommand(
      "analyze", "run the full pipeline: structure, existence, zeta, "
                 "boundary, uniqueness");
  add_common(cmd_analyze, analyze_args, true);
  auto* cmd_existence = app.add_subcommand(
      "existence", "search for a negative-measure cylinder certificate");
  add_common(cmd_existence, existence_args, true);
  auto* cmd_zeta =
      app.add_subcommand("zeta", "truncated class zeta series per beta");
  add_common(cmd_zeta, zeta_args, true);
  auto* cmd_kms = app.add_subcommand(
      "kms-eval", "evaluate equilibrium state values on a spanning pair");
  add_common(cmd_kms, kms_args, true);
  cmd_kms->add_option("s", kms_s, "left element (family text form)")->required();
  cmd_kms->add_option("t", kms_t, "right element (family text form)")->required();
  auto* cmd_uniq = app.add_subcommand(
      "uniqueness", "pairwise separation ladders and the global verdict");
  add_common(cmd_uniq, uniq_args, true);
  auto* cmd_boundary = app.add_subcommand(
      "boundary", "residual boundary mass outside every level cylinder");
  add_common(cmd_boundary, boundary_args, true);
  auto* cmd_families =
      app.add_subcommand("families", "list the built-in monoid families");
  add_common(cmd_families, families_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_families->parsed()) {
      return emit(kmslcm::report_families(), nullptr, families_args);
    }
    if (cmd_analyze->parsed()) {
      auto cfg = load_config(analyze_args);
      return emit(kmslcm::report_analyze(cfg), &cfg, analyze_args);
    }
    if (cmd_existence->parsed()) {
      auto cfg = load_config(existence_args);
      return emit(kmslcm::report_existence(cfg), &cfg, existence_args);
    }
    if (cmd_zeta->parsed()) {
      auto cfg = load_config(zeta_args);
      return emit(kmslcm::report_zeta(cfg), &cfg, zeta_args);
    }
    if (cmd_kms->parsed()) {
      auto cfg = load_config(kms_args);
      return emit(kmslcm::report_kms_eval(cfg, kms_s, kms_t), &cfg, kms_args);
    }
    if (cmd_uniq->parsed()) {
      auto cfg = load_config(uniq_args);
      return emit(kmslcm::report_uniqueness(cfg), &cfg, uniq_args);
    }
    if (cmd_boundary->parsed()) {
      auto cfg = load_config(boundary_args);
      return emit(kmslcm::report_boundary(cfg), &cfg, boundary_args);
    }
  } catch (const kmslcm::InternalInconsistencyError& e) {
    std::cerr << "internal consistency violation: " << e.what() << "\n";
    return 3;
  } catch (const kmslcm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

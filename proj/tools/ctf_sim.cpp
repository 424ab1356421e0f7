#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "ctfsim/harness.hpp"

namespace {

int usage_error(const std::string& message) {
  std::cerr << "ctf_sim: " << message << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charge-trap-flash pulse-train simulator"};
  app.set_version_flag("--version", std::string(ctfsim::kToolVersion));

  std::string command;
  std::string params_file;
  std::string protocol_file;
  std::string output_dir;
  std::string preset;
  std::string timestamp;
  std::uint64_t seed = 1;
  std::vector<std::string> sets;
  bool check_only = false;
  bool list_presets = false;

  std::string commands;
  for (auto name : ctfsim::command_names()) {
    commands += commands.empty() ? "" : ", ";
    commands += name;
  }
  app.add_option("command", command, "One of: " + commands);
  app.add_option("--params", params_file, "Model parameter file");
  app.add_option("--protocol", protocol_file, "Pulse protocol file");
  app.add_option("--out", output_dir, "Output directory");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--set", sets, "key=value override (repeatable)");
  app.add_option("--preset", preset, "Named reproduction target");
  app.add_option("--timestamp", timestamp, "ISO-8601 stamp written into CSV headers");
  app.add_flag("--check", check_only, "Validate the configuration and exit");
  app.add_flag("--list-presets", list_presets, "List presets and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  if (list_presets) {
    for (const auto& p : ctfsim::presets()) {
      std::cout << p.name << "  (" << ctfsim::to_string(p.command) << ")  " << p.description
                << "\n";
    }
    return 0;
  }

  try {
    ctfsim::RunConfig config;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) return usage_error("--set expects key=value: " + s);
      config.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!command.empty()) config.command = ctfsim::parse_command(command);
    if (!preset.empty()) {
      config = ctfsim::apply_preset(config, preset);
      if (!command.empty() && ctfsim::parse_command(command) != config.command) {
        return usage_error("preset '" + preset + "' runs '" +
                           std::string(ctfsim::to_string(config.command)) + "', not '" +
                           command + "'");
      }
    } else if (command.empty()) {
      return usage_error("a command or --preset is required (see --help)");
    }
    if (!params_file.empty()) config.params_file = params_file;
    if (!protocol_file.empty()) config.protocol_file = protocol_file;
    config.output_dir = output_dir;
    config.seed = seed;
    config.timestamp = timestamp;

    if (check_only) {
      const auto diags = ctfsim::validate(config);
      for (const auto& d : diags) std::cout << d.to_string() << "\n";
      return diags.empty() ? 0 : 2;
    }
    const auto manifest = ctfsim::run(config);
    for (const auto& f : manifest.files) {
      std::cout << (config.output_dir / f.name).string() << "\n";
    }
    return 0;
  } catch (const ctfsim::Error& e) {
    std::cerr << "ctf_sim: " << ctfsim::to_string(e.kind()) << ": " << e.what() << "\n";
    return ctfsim::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ctf_sim: " << e.what() << "\n";
    return 4;
  }
}

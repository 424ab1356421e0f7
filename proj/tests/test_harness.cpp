#include <gtest/gtest.h>
#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctfsim/harness.hpp"
#include "test_util.hpp"

using namespace ctfsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ctfsim_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig config_for(Command c, const std::string& name) {
  RunConfig cfg;
  cfg.command = c;
  cfg.output_dir = scratch(name);
  cfg.timestamp = "2024-01-01T00:00:00Z";
  return cfg;
}

}  // namespace

TEST(Commands, RoundTrip) {
  for (auto name : command_names()) EXPECT_EQ(to_string(parse_command(name)), name);
  EXPECT_ERROR_KIND(parse_command("frobnicate"), ErrorKind::InvalidArgument);
}

TEST(Validate, DefaultConfigIsClean) {
  for (auto name : command_names()) {
    RunConfig cfg;
    cfg.command = parse_command(name);
    cfg.output_dir = scratch("validate");
    EXPECT_TRUE(validate(cfg).empty()) << name;
  }
}

TEST(Validate, ReportsEachProblem) {
  RunConfig cfg = config_for(Command::sweep_n, "validate2");
  cfg.overrides = {{"t_gap_s", "-1"}};
  auto d = validate(cfg);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].field, "t_gap_s");

  cfg.overrides = {{"t_gap_s", "-1"}, {"no_such_key", "1"}, {"u_c", "abc"}};
  EXPECT_EQ(validate(cfg).size(), 3u);

  cfg.overrides.clear();
  cfg.output_dir.clear();
  d = validate(cfg);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].field, "output_dir");
}

TEST(Validate, ProtocolOnTimeMismatch) {
  const auto dir = scratch("protocol");
  fs::create_directories(dir);
  const auto path = dir / "p.yaml";
  std::ofstream(path) << "label: demo\ntrains:\n  - init\n  - amplitude_V: 12.5\n"
                         "    t_pw_s: 2.5e-6\n    N: 100\n    t_gap_s: 10\n    T_ON_s: 2.5e-3\n";
  RunConfig cfg = config_for(Command::sweep_n, "protocol_out");
  cfg.protocol_file = path;
  const auto d = validate(cfg);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].field, "T_ON_s");
  EXPECT_EQ(d[0].line, 8);
  EXPECT_ERROR_KIND(run(cfg), ErrorKind::InvalidArgument);
  EXPECT_FALSE(fs::exists(cfg.output_dir / kManifestName));
}

TEST(Validate, MissingParamsFile) {
  RunConfig cfg = config_for(Command::sweep_n, "missing");
  cfg.params_file = "/nonexistent/params.yaml";
  EXPECT_EQ(validate(cfg).size(), 1u);
}

TEST(Presets, Known) {
  EXPECT_EQ(presets().size(), 6u);
  const auto cfg = apply_preset(RunConfig{}, "fig3b");
  EXPECT_EQ(cfg.command, Command::sweep_gap);
  EXPECT_ERROR_KIND(apply_preset(RunConfig{}, "fig99"), ErrorKind::InvalidArgument);
}

TEST(Presets, ExplicitOverridesWin) {
  RunConfig cfg;
  cfg.overrides = {{"t_gap_s", "0.5"}};
  cfg = apply_preset(cfg, "fig4c");
  ASSERT_GE(cfg.overrides.size(), 2u);
  EXPECT_EQ(cfg.overrides.back(), (std::pair<std::string, std::string>{"t_gap_s", "0.5"}));
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::InvalidArgument), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::PreconditionViolation), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::Io), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::NotSaturated), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::TargetUnreachable), 4);
}

TEST(Timestamp, ExplicitWins) {
  EXPECT_EQ(resolve_timestamp("2020-02-02T00:00:00Z"), "2020-02-02T00:00:00Z");
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Run, SweepNWritesTableAndManifest) {
  const auto cfg = config_for(Command::sweep_n, "sweep_n");
  const auto m = run(cfg);
  const auto csv = slurp(cfg.output_dir / "fig3a.csv");
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      EXPECT_EQ(line, "N,t_pw_s,t_gap_s,vt_N_V,delta_vt_V");
      header = true;
      continue;
    }
    ++rows;
  }
  EXPECT_EQ(rows, 10);

  ASSERT_TRUE(fs::exists(cfg.output_dir / kManifestName));
  const YAML::Node doc = YAML::LoadFile((cfg.output_dir / kManifestName).string());
  EXPECT_EQ(doc["tool"].as<std::string>(), std::string(kToolVersion));
  for (const auto& f : m.files) {
    EXPECT_EQ(sha256_hex(slurp(cfg.output_dir / f.name)), f.sha256) << f.name;
  }
}

TEST(Run, RerunIsByteIdentical) {
  for (auto c : {Command::sweep_n, Command::sweep_gap, Command::splits}) {
    auto a = config_for(c, "rerun_a");
    auto b = config_for(c, "rerun_b");
    const auto ma = run(a);
    const auto mb = run(b);
    ASSERT_EQ(ma.files.size(), mb.files.size());
    for (std::size_t i = 0; i < ma.files.size(); ++i) {
      EXPECT_EQ(ma.files[i].name, mb.files[i].name);
      EXPECT_EQ(slurp(a.output_dir / ma.files[i].name), slurp(b.output_dir / mb.files[i].name));
    }
  }
}

TEST(Run, ManifestHashesParamsFile) {
  auto cfg = config_for(Command::sweep_n, "hash");
  cfg.params_file = fs::path(CTFSIM_DATA_DIR) / "default_params.yaml";
  cfg.overrides = {{"u_c", "0.9"}};
  const auto m = run(cfg);
  EXPECT_EQ(m.params_sha256, sha256_hex(slurp(*cfg.params_file)));
  const auto doc = slurp(cfg.output_dir / kManifestName);
  EXPECT_NE(doc.find("u_c"), std::string::npos);
}

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oarseg/engine/run_files.hpp"
#include "oarseg/metrics/report.hpp"
#include "oarseg/model/zoo.hpp"
#include "oarseg/engine/checkpoint.hpp"
#include "oarseg/engine/experiment.hpp"
#include "oarseg/engine/state.hpp"
#include "oarseg/errors.hpp"
#include "oarseg/optim/scheduler.hpp"
#include "oarseg/data/dataset_spec.hpp"
#include "oarseg/data/split.hpp"
#include "oarseg/data/volume.hpp"
#include "oarseg/grid.hpp"
#include "oarseg/commands.hpp"
#include "test_util.hpp"

using namespace oarseg;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result oarseg_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_config(const fs::path& dir, const fs::path& data, const std::string& run_name) {
  nlohmann::json cfg = {{"dataset", {{"name", "synthetic"}, {"root", data.string()}}},
                        {"model", {{"variant", "resunet3d"}, {"base_width", 4}, {"depth", 2}}},
                        {"augmentation", {{"crop_min_extent", {16, 16, 16}}}},
                        {"epochs", 2},
                        {"patch_size", "full"},
                        {"seed", 5},
                        {"run_name", run_name}};
  const auto p = dir / (run_name + ".json");
  std::ofstream(p) << cfg.dump(2);
  return p;
}

}  // namespace

TEST(Cli, HelpListsEveryVerbAndFlag) {
  const std::map<std::string, std::vector<std::string>> flags = {
      {"prepare", {"--config", "--set", "--seed", "--out"}},
      {"train", {"--config", "--set", "--seed", "--out"}},
      {"evaluate", {"--config", "--set", "--split", "--checkpoint"}},
      {"ablate", {"--kind", "--arms", "--split", "--config"}},
      {"compare", {"--baseline", "--enhanced", "--split", "--out"}},
      {"plot", {"--out"}},
      {"synth", {"--out", "--count", "--extent", "--seed"}}};
  const auto top = oarseg_cli({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const auto& [verb, list] : flags) {
    EXPECT_NE(top.out.find(verb), std::string::npos) << verb;
    const auto r = oarseg_cli({verb, "--help"});
    EXPECT_EQ(r.code, 0) << verb;
    for (const auto& f : list) EXPECT_NE(r.out.find(f), std::string::npos) << verb << " " << f;
  }
}

TEST(Cli, UsageErrorsExit64) {
  EXPECT_EQ(oarseg_cli({"train", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(oarseg_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(oarseg_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(oarseg_cli({"ablate"}).code, cli::kExitUsage);
  EXPECT_EQ(oarseg_cli({"compare", "--baseline", "x"}).code, cli::kExitUsage);
  test::TempDir tmp("usage");
  EXPECT_EQ(oarseg_cli({"train", "--set", "mode=sometimes", "--out", tmp.path().string()}).code, cli::kExitUsage);
  EXPECT_EQ(oarseg_cli({"train", "--set", "novalue"}).code, cli::kExitUsage);
}

TEST(Cli, PrepareIsByteStable) {
  test::TempDir tmp("prepare");
  ASSERT_EQ(oarseg_cli({"synth", "--out", (tmp / "data").string(), "--count", "8", "--extent", "16"}).code, 0);
  const auto cfg = write_config(tmp.path(), tmp / "data", "prep");
  const auto a = oarseg_cli({"prepare", "--config", cfg.string(), "--out", (tmp / "a").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = oarseg_cli({"prepare", "--config", cfg.string(), "--out", (tmp / "b").string()});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(tmp / "a" / "split.json"), slurp(tmp / "b" / "split.json"));
  EXPECT_EQ(slurp(tmp / "a" / "summary.json"), slurp(tmp / "b" / "summary.json"));
  const auto summary = nlohmann::json::parse(slurp(tmp / "a" / "summary.json"));
  EXPECT_EQ(summary["patients"], 8);
  EXPECT_NE(a.out.find("6/1/1"), std::string::npos);
  const auto other = oarseg_cli({"prepare", "--config", cfg.string(), "--seed", "99", "--out", (tmp / "c").string()});
  ASSERT_EQ(other.code, 0);
  EXPECT_EQ(read_manifest(tmp / "c" / "split.json").seed, 99u);
}

TEST(Cli, MissingMaskExitsWithDataError) {
  test::TempDir tmp("missingcli");
  ASSERT_EQ(oarseg_cli({"synth", "--out", (tmp / "data").string(), "--count", "3", "--extent", "16"}).code, 0);
  fs::remove(tmp / "data" / "phantom_001" / "mask_chiasm.npy");
  const auto cfg = write_config(tmp.path(), tmp / "data", "missing");
  const auto r = oarseg_cli({"prepare", "--config", cfg.string(), "--out", (tmp / "o").string()});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("phantom_001"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("chiasm"), std::string::npos) << r.err;
  const auto t = oarseg_cli({"train", "--config", cfg.string(), "--out", (tmp / "runs").string()});
  EXPECT_EQ(t.code, cli::kExitData);
  EXPECT_NE(t.err.find("chiasm"), std::string::npos) << t.err;
  EXPECT_EQ(oarseg_cli({"prepare", "--set", "dataset.root=" + (tmp / "nowhere").string()}).code, cli::kExitData);
}

TEST(Cli, TrainEvaluateCompareAndPlot) {
  test::TempDir tmp("e2e");
  ASSERT_EQ(oarseg_cli({"synth", "--out", (tmp / "data").string(), "--count", "8", "--extent", "16"}).code, 0);
  const auto cfg = write_config(tmp.path(), tmp / "data", "e2e");
  const auto runs = (tmp / "runs").string();

  const auto tb = oarseg_cli({"train", "--config", cfg.string(), "--set", "mode=baseline", "--set", "run_name=base",
                              "--out", runs});
  ASSERT_EQ(tb.code, 0) << tb.err;
  const auto te = oarseg_cli({"train", "--config", cfg.string(), "--set", "run_name=enh", "--out", runs});
  ASSERT_EQ(te.code, 0) << te.err;
  EXPECT_NE(te.out.find("epoch 2/2"), std::string::npos);

  const auto recorded = nlohmann::json::parse(slurp(tmp / "runs" / "base" / "config.json"));
  EXPECT_EQ(recorded["mode"], "baseline");
  EXPECT_EQ(recorded["overrides"], (nlohmann::json{"mode=baseline", "run_name=base"}));
  EXPECT_EQ(recorded["config_path"], cfg.string());
  EXPECT_EQ(recorded["loss"]["ce_weight"], 0.0);
  EXPECT_EQ(recorded["scheduler"]["policy"], "constant");

  for (const std::string name : {"base", "enh"}) {
    const auto r = oarseg_cli({"evaluate", "--config", cfg.string(), "--set", "run_name=" + name,
                               "--set", name == "base" ? "mode=baseline" : "mode=enhanced", "--out", runs});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(tmp / "runs" / name / "report_test.json"));
    EXPECT_TRUE(fs::exists(tmp / "runs" / name / "report_test.csv"));
    EXPECT_EQ(r.out.rfind("Organ,DICE,HD95\n", 0), 0u);
  }

  const auto cmp = oarseg_cli({"compare", "--baseline", (tmp / "runs" / "base").string(), "--enhanced",
                               (tmp / "runs" / "enh").string(), "--out", (tmp / "table").string()});
  ASSERT_EQ(cmp.code, 0) << cmp.err;
  EXPECT_EQ(cmp.out.rfind("Organ,Baseline DICE,Baseline HD95,Enhanced DICE,Enhanced HD95", 0), 0u);
  EXPECT_NE(cmp.out.find("\nOverall,"), std::string::npos);
  EXPECT_EQ(slurp(tmp / "table.csv"), cmp.out);
  EXPECT_TRUE(fs::exists(tmp / "table.json"));

  const auto plt = oarseg_cli({"plot", (tmp / "runs" / "base").string(), (tmp / "runs" / "enh").string(), "--out",
                               (tmp / "figs").string()});
  ASSERT_EQ(plt.code, 0) << plt.err;
  const auto curves_svg = slurp(tmp / "figs" / "curves_synthetic.svg");
  EXPECT_NE(curves_svg.find("data-label=\"base\""), std::string::npos);
  EXPECT_NE(curves_svg.find("data-label=\"enh\""), std::string::npos);
  EXPECT_TRUE(fs::exists(tmp / "figs" / "lr_trace.svg"));

  EXPECT_EQ(oarseg_cli({"plot", "--out", (tmp / "figs2").string()}).code, cli::kExitData);
  EXPECT_EQ(oarseg_cli({"plot", (tmp / "nothing").string()}).code, cli::kExitData);
  EXPECT_EQ(oarseg_cli({"compare", "--baseline", (tmp / "runs" / "base").string(), "--enhanced",
                        (tmp / "runs" / "enh").string(), "--split", "val"})
                .code,
            cli::kExitData);
}

TEST(Cli, EvaluateRejectsMismatchedCheckpoint) {
  test::TempDir tmp("mismatch");
  ASSERT_EQ(oarseg_cli({"synth", "--out", (tmp / "data").string(), "--count", "8", "--extent", "16"}).code, 0);
  const auto cfg = write_config(tmp.path(), tmp / "data", "mm");
  auto model_cfg = ModelConfig::for_variant(Variant::resunet3d, 6);
  model_cfg.base_width = 4;
  model_cfg.depth = 2;
  fs::create_directories(tmp / "runs");
  save_checkpoint(build_model(model_cfg), TrainState{}, tmp / "other.ckpt");
  const auto r = oarseg_cli({"evaluate", "--config", cfg.string(), "--checkpoint", (tmp / "other.ckpt").string(),
                             "--out", (tmp / "runs").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.code, cli::kExitInternal) << r.err;
  EXPECT_NE(r.err.find("class"), std::string::npos) << r.err;
}

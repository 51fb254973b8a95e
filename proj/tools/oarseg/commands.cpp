#include "oarseg/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oarseg/data/loader.hpp"
#include "oarseg/data/synthetic.hpp"
#include "oarseg/engine/ablation.hpp"
#include "oarseg/engine/checkpoint.hpp"
#include "oarseg/engine/compare.hpp"
#include "oarseg/engine/experiment.hpp"
#include "oarseg/engine/run_files.hpp"
#include "oarseg/engine/trainer.hpp"
#include "oarseg/errors.hpp"
#include "oarseg/plot/svg_plot.hpp"

namespace oarseg::cli {
namespace fs = std::filesystem;
namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
  cmd->add_option("--config", c.config, "experiment config (JSON)");
  cmd->add_option("--set", c.overrides, "dot-path override key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "global seed (overrides the config)");
  cmd->add_option("--out", c.out, out_help);
}

/// Config document after overrides, plus the list of overrides applied.
std::pair<nlohmann::json, std::vector<std::string>> effective_document(const Common& c) {
  nlohmann::json doc = nlohmann::json::object();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw InvalidConfig("cannot read config " + c.config);
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidConfig(c.config + ": " + e.what());
    }
  }
  std::vector<std::string> applied;
  for (const auto& o : c.overrides) {
    apply_override(doc, o);
    applied.push_back(o);
  }
  if (c.seed) {
    doc["seed"] = *c.seed;
    applied.push_back("seed=" + std::to_string(*c.seed));
  }
  return {doc, applied};
}

nlohmann::json recorded_config(const ExperimentConfig& cfg, const Common& c, const std::vector<std::string>& applied) {
  auto j = to_json(cfg);
  j["overrides"] = applied;
  if (!c.config.empty()) j["config_path"] = c.config;
  return j;
}

fs::path runs_dir(const Common& c) {
  return runs_root(c.out.empty() ? std::nullopt : std::optional<fs::path>(c.out));
}

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int cmd_prepare(const Common& c, std::ostream& out, std::ostream& err) {
  auto [doc, applied] = effective_document(c);
  const auto cfg = experiment_from_json(doc);
  const auto spec = cfg.dataset.spec();
  const auto issues = scan_dataset(cfg.dataset.root, spec);
  if (!issues.empty()) {
    err << "dataset " << cfg.dataset.root.string() << " has " << issues.size() << " invalid patient(s):\n";
    for (const auto& i : issues) err << "  " << i.patient << ": " << i.message << "\n";
    return kExitData;
  }
  const auto split = resolve_split(cfg);
  const fs::path dir = c.out.empty() ? run_paths(runs_root(), cfg.run_name).dir : fs::path(c.out);
  fs::create_directories(dir);
  write_manifest(dir / "split.json", split);

  std::map<std::string, int> shapes;
  std::size_t patients = 0;
  for (const auto& id : list_patients(cfg.dataset.root, spec)) {
    const auto item = load_patient(cfg.dataset.root / id, spec);
    ++shapes[to_string(item.volume.voxels.shape())];
    ++patients;
  }
  nlohmann::ordered_json summary;
  summary["dataset"] = std::string(to_string(cfg.dataset.name));
  summary["root"] = cfg.dataset.root.string();
  summary["patients"] = patients;
  summary["train"] = split.train_ids.size();
  summary["val"] = split.val_ids.size();
  summary["test"] = split.test_ids.size();
  summary["classes"] = spec.class_names();
  summary["shapes"] = shapes;
  atomic_write(dir / "summary.json", summary.dump(2) + "\n");

  out << "patients " << patients << "  train/val/test " << split.train_ids.size() << "/" << split.val_ids.size() << "/"
      << split.test_ids.size() << "\n";
  out << "classes";
  for (const auto& n : spec.class_names()) out << " " << n;
  out << "\n";
  for (const auto& [shape, n] : shapes) out << "  " << shape << " x" << n << "\n";
  out << "wrote " << (dir / "split.json").string() << "\n";
  return kExitOk;
}

int cmd_train(const Common& c, std::ostream& out) {
  auto [doc, applied] = effective_document(c);
  const auto cfg = experiment_from_json(doc);
  FitOptions opt;
  opt.runs_root = runs_dir(c);
  opt.config_document = recorded_config(cfg, c, applied);
  opt.on_epoch = [&](const EpochReport& r) {
    out << "epoch " << r.epoch + 1 << "/" << cfg.epochs << "  loss " << fmt(r.train_loss) << "  dice "
        << fmt(r.train_dice);
    if (r.val_dice) out << "  val_loss " << fmt(*r.val_loss) << "  val_dice " << fmt(*r.val_dice);
    out << "  lr " << fmt(r.lr, "%.6f") << "  " << fmt(r.seconds, "%.1f") << "s" << (r.improved ? "  *" : "") << "\n";
    out.flush();
  };
  const auto state = fit(cfg, opt);
  const auto paths = run_paths(opt.runs_root, cfg.run_name);
  if (state.best) {
    out << "best epoch " << state.best->epoch + 1 << " val_dice " << fmt(state.best->val_dice) << "\n";
  }
  out << "run directory " << paths.dir.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const Common& c, const std::string& split_name, const std::string& checkpoint, std::ostream& out) {
  auto [doc, applied] = effective_document(c);
  const auto cfg = experiment_from_json(doc);
  const auto split = split_name_from_string(split_name);
  const auto paths = run_paths(runs_dir(c), cfg.run_name);
  fs::path ckpt = checkpoint;
  if (ckpt.empty()) ckpt = fs::exists(paths.best()) ? paths.best() : paths.last();
  if (!fs::exists(ckpt)) throw CorruptCheckpoint("no checkpoint at " + ckpt.string());
  const auto ev = evaluate_checkpoint(ckpt, split, cfg);
  write_report(paths.report_stem(split), ev.report);
  out << to_csv(ev.report);
  out << "checkpoint " << ckpt.string() << " (selected by validation mean DICE)\n";
  out << "wrote " << paths.report_json(split).string() << "\n";
  return kExitOk;
}

int cmd_ablate(const Common& c, const std::string& kind_name, const std::vector<std::string>& arm_labels,
               const std::string& split_name, std::ostream& out, std::ostream& err) {
  auto [doc, applied] = effective_document(c);
  const auto base = experiment_from_json(doc);
  const auto kind = ablation_kind_from_string(kind_name);
  const auto split = split_name_from_string(split_name);
  const auto arms = select_arms(ablation_arms(kind, base), arm_labels);
  FitOptions opt;
  opt.runs_root = runs_dir(c);
  const auto report = run_ablation(kind, arms, opt, split, [&](const ArmResult& r) {
    if (r.overall_dice) {
      out << "arm " << r.label << ": overall dice " << fmt(*r.overall_dice) << "\n";
    } else {
      err << "arm " << r.label << " failed: " << r.error << "\n";
    }
  });
  const auto dir = opt.runs_root / (base.run_name + "_" + std::string(to_string(kind)));
  fs::create_directories(dir);
  atomic_write(dir / "ablation.csv", to_csv(report));
  atomic_write(dir / "ranked.csv", ranked_csv(report));
  atomic_write(dir / "ablation.json", to_json(report).dump(2) + "\n");
  std::vector<plot::Bar> bars;
  for (const auto& a : report.arms) bars.push_back({a.label, a.overall_dice.value_or(0.0)});
  atomic_write(dir / "ablation.svg", plot::render_bar_chart(std::string(to_string(kind)) + " ablation", "overall DICE", bars));
  out << to_csv(report) << "wrote " << dir.string() << "\n";
  return report.all_failed() ? kExitInternal : kExitOk;
}

int cmd_compare(const std::string& baseline, const std::string& enhanced, const std::string& split_name,
                const std::string& out_stem, std::ostream& out) {
  const auto split = split_name_from_string(split_name);
  const auto table = compare(load_run_summary(baseline, split, "Baseline"), load_run_summary(enhanced, split, "Enhanced"));
  const auto csv = to_csv(table);
  if (!out_stem.empty()) {
    fs::path stem(out_stem);
    atomic_write(fs::path(stem).concat(".csv"), csv);
    atomic_write(fs::path(stem).concat(".json"), to_json(table).dump(2) + "\n");
  }
  out << csv;
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& runs, const std::string& out_dir, std::ostream& out) {
  std::vector<fs::path> dirs(runs.begin(), runs.end());
  for (const auto& p : plot::plot_runs(dirs, out_dir.empty() ? fs::path("figures") : fs::path(out_dir))) {
    out << "wrote " << p.string() << "\n";
  }
  return kExitOk;
}

int cmd_synth(const std::string& root, std::int64_t count, std::int64_t extent, std::uint64_t seed, std::ostream& out) {
  SyntheticOptions opt;
  opt.extent = extent;
  opt.seed = seed;
  const auto spec = synthetic_spec();
  for (const auto& item : make_synthetic_dataset(count, opt)) write_patient(root, item, spec);
  out << "wrote " << count << " phantoms to " << root << "\n";
  return kExitOk;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::data: return kExitData;
    case ErrorKind::usage: return kExitUsage;
    case ErrorKind::internal: return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Organ-at-risk segmentation experiments", "oarseg"};
  app.require_subcommand(1);

  Common prep, train, eval, abl;
  auto* c_prepare = app.add_subcommand("prepare", "validate a dataset root and write the split manifest");
  add_common(c_prepare, prep, "output directory (default: <runs>/<run_name>)");

  auto* c_train = app.add_subcommand("train", "train a model and write its run directory");
  add_common(c_train, train, "runs root (default: $OARSEG_RUNS_DIR or ./runs)");

  std::string split = "test", checkpoint;
  auto* c_eval = app.add_subcommand("evaluate", "score a checkpoint on a split");
  add_common(c_eval, eval, "runs root (default: $OARSEG_RUNS_DIR or ./runs)");
  c_eval->add_option("--split", split, "train, val or test")->capture_default_str();
  c_eval->add_option("--checkpoint", checkpoint, "checkpoint file (default: best.ckpt of the run)");

  std::string kind, abl_split = "test";
  std::vector<std::string> arms;
  auto* c_ablate = app.add_subcommand("ablate", "run a loss-weight, scheduler or encoder ablation");
  add_common(c_ablate, abl, "runs root (default: $OARSEG_RUNS_DIR or ./runs)");
  c_ablate->add_option("--kind", kind, "loss_weights, scheduler or encoder")->required();
  c_ablate->add_option("--arms", arms, "subset of arm labels to run");
  c_ablate->add_option("--split", abl_split, "split the arms are scored on")->capture_default_str();

  std::string baseline, enhanced, cmp_split = "test", cmp_out;
  auto* c_compare = app.add_subcommand("compare", "baseline vs enhanced table from two evaluated runs");
  c_compare->add_option("--baseline", baseline, "baseline run directory")->required();
  c_compare->add_option("--enhanced", enhanced, "enhanced run directory")->required();
  c_compare->add_option("--split", cmp_split, "report split")->capture_default_str();
  c_compare->add_option("--out", cmp_out, "output stem for <stem>.csv and <stem>.json");

  std::vector<std::string> runs;
  std::string plot_out;
  auto* c_plot = app.add_subcommand("plot", "DICE, loss and learning-rate figures");
  c_plot->add_option("runs", runs, "run directories");
  c_plot->add_option("--out", plot_out, "output directory (default: ./figures)");

  std::string synth_root;
  std::int64_t synth_count = 8, synth_extent = 32;
  std::uint64_t synth_seed = 7;
  auto* c_synth = app.add_subcommand("synth", "write a synthetic phantom dataset");
  c_synth->add_option("--out", synth_root, "dataset root")->required();
  c_synth->add_option("--count", synth_count, "number of volumes")->capture_default_str();
  c_synth->add_option("--extent", synth_extent, "cube edge in voxels")->capture_default_str();
  c_synth->add_option("--seed", synth_seed, "phantom seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (c_prepare->parsed()) return cmd_prepare(prep, out, err);
    if (c_train->parsed()) return cmd_train(train, out);
    if (c_eval->parsed()) return cmd_evaluate(eval, split, checkpoint, out);
    if (c_ablate->parsed()) return cmd_ablate(abl, kind, arms, abl_split, out, err);
    if (c_compare->parsed()) return cmd_compare(baseline, enhanced, cmp_split, cmp_out, out);
    if (c_plot->parsed()) return cmd_plot(runs, plot_out, out);
    if (c_synth->parsed()) return cmd_synth(synth_root, synth_count, synth_extent, synth_seed, out);
  } catch (const MissingStructure& e) {
    err << "error: " << e.what() << " (patient " << e.patient() << ", organ " << e.organ() << ")\n";
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage{"oarseg"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace oarseg::cli

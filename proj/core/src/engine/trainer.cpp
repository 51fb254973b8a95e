#include "oarseg/engine/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "oarseg/data/loader.hpp"
#include "oarseg/data/patches.hpp"
#include "oarseg/data/transforms.hpp"
#include "oarseg/engine/checkpoint.hpp"
#include "oarseg/errors.hpp"
#include "oarseg/optim/adam.hpp"
#include "oarseg/optim/losses.hpp"

namespace oarseg {
namespace {

constexpr std::uint64_t kShuffleSalt = 0x5bd1e9955bd1e995ULL;
constexpr std::uint64_t kAugmentSalt = 0x94d049bb133111ebULL;

struct Batch {
  torch::Tensor x;  // B x 1 x spatial
  torch::Tensor y;  // B x spatial, int64
};

Shape3 batch_shape(const std::vector<LabeledVolume>& items, std::int64_t div, bool pad_depth) {
  Shape3 s{0, 0, 0};
  for (const auto& it : items) {
    const auto& g = it.volume.voxels.shape();
    s = Shape3{std::max(s.d, g.d), std::max(s.h, g.h), std::max(s.w, g.w)};
  }
  return Shape3{pad_depth ? round_up(s.d, div) : s.d, round_up(s.h, div), round_up(s.w, div)};
}

Batch stack_3d(const std::vector<LabeledVolume>& items, std::int64_t div) {
  const auto shape = batch_shape(items, div, true);
  std::vector<torch::Tensor> xs, ys;
  for (const auto& it : items) {
    const auto v = to_tensor(it.volume.voxels);
    xs.push_back(pad_spatial(v, shape, v.min().item<float>()));
    ys.push_back(pad_spatial(to_tensor(it.labels.labels), shape, 0));
  }
  return {torch::stack(xs).unsqueeze(1), torch::stack(ys)};
}

struct SliceRef {
  std::size_t item;
  std::int64_t z;
};

Batch stack_2d(const std::vector<LabeledVolume>& vols, const std::vector<SliceRef>& refs, std::int64_t div) {
  std::int64_t h = 0, w = 0;
  for (const auto& r : refs) {
    h = std::max(h, vols[r.item].volume.voxels.shape().h);
    w = std::max(w, vols[r.item].volume.voxels.shape().w);
  }
  const Shape3 shape{1, round_up(h, div), round_up(w, div)};
  std::vector<torch::Tensor> xs, ys;
  for (const auto& r : refs) {
    const auto v = to_tensor(vols[r.item].volume.voxels);
    const auto l = to_tensor(vols[r.item].labels.labels);
    xs.push_back(pad_spatial(v.slice(0, r.z, r.z + 1), shape, v.min().item<float>())[0]);
    ys.push_back(pad_spatial(l.slice(0, r.z, r.z + 1), shape, 0)[0]);
  }
  return {torch::stack(xs).unsqueeze(1), torch::stack(ys)};
}

/// Mean over foreground classes of the batch-level DICE of the argmax prediction.
std::vector<double> class_dice(const torch::Tensor& logits, const torch::Tensor& target, std::int64_t classes) {
  const auto pred = logits.argmax(1);
  std::vector<double> out;
  for (std::int64_t c = 1; c < classes; ++c) {
    const auto p = pred.eq(c), r = target.eq(c);
    const double inter = (p & r).sum().item<double>();
    const double total = p.sum().item<double>() + r.sum().item<double>();
    out.push_back(total == 0.0 ? 1.0 : 2.0 * inter / total);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

torch::Tensor heads_loss(Model& model, const Batch& b, const LossConfig& loss, torch::Tensor* primary) {
  const auto heads = model.forward_heads(b.x);
  torch::Tensor total;
  for (const auto& h : heads) {
    const auto l = combined_loss(h, b.y, loss);
    total = total.defined() ? total + l : l;
  }
  if (primary != nullptr) *primary = heads.back().detach();
  return total / static_cast<double>(heads.size());
}

}  // namespace

std::vector<std::string> table_organs(const DatasetSpec& spec) {
  std::vector<std::string> out;
  for (auto i : spec.table_order) out.push_back(spec.organs.at(i).display);
  return out;
}

SplitAssignment resolve_split(const ExperimentConfig& cfg) {
  const auto spec = cfg.dataset.spec();
  const auto ids = list_patients(cfg.dataset.root, spec);
  if (ids.empty()) throw EmptyInput("no patients under " + cfg.dataset.root.string());
  return split_patients(ids, cfg.dataset.ratios, cfg.seed);
}

std::vector<LabeledVolume> load_split(const ExperimentConfig& cfg, SplitName split) {
  const auto spec = cfg.dataset.spec();
  const auto assignment = resolve_split(cfg);
  std::vector<LabeledVolume> out;
  for (const auto& id : assignment.ids(split)) out.push_back(load_patient(cfg.dataset.root / id, spec));
  return out;
}

Grid3<float> normalize_for_inference(const Volume& v, const AugmentationConfig& aug) {
  auto g = v.voxels;
  if (aug.normalization == IntensityNorm::zscore) standardize(g);
  return g;
}

InferenceOptions inference_options(const ExperimentConfig& cfg) {
  InferenceOptions opt;
  if (cfg.model.dims() == 3) opt.window = cfg.patch_size;
  opt.slice_batch = cfg.effective_batch_size();
  return opt;
}

Evaluation evaluate_model(Model& model, const std::vector<LabeledVolume>& items, const ExperimentConfig& cfg,
                          bool with_hd95) {
  if (items.empty()) throw EmptyInput("nothing to evaluate");
  const auto opts = inference_options(cfg);
  const auto spec = cfg.dataset.spec();
  model.eval();
  torch::NoGradGuard guard;
  Evaluation ev;
  double loss_sum = 0.0;
  for (const auto& item : items) {
    const auto logits = predict_logits(model, normalize_for_inference(item.volume, cfg.augmentation), opts);
    const auto target = to_tensor(item.labels.labels);
    loss_sum += combined_loss(logits.unsqueeze(0), target.unsqueeze(0), cfg.loss).item<double>();
    const auto pred = logits_to_labels(logits, item.labels.class_names);
    ev.cases.push_back(evaluate_case(pred, item.labels, item.volume.spacing, with_hd95));
    ev.patient_ids.push_back(item.volume.patient_id);
  }
  ev.mean_loss = loss_sum / static_cast<double>(items.size());
  ev.report = reorder(aggregate(ev.cases), table_organs(spec));
  return ev;
}

Evaluation evaluate_checkpoint(const std::filesystem::path& checkpoint, SplitName split, const ExperimentConfig& cfg,
                               bool with_hd95) {
  const auto stored = peek_checkpoint_config(checkpoint);
  const auto expected_classes = static_cast<std::int64_t>(cfg.dataset.spec().num_foreground() + 1);
  if (stored.num_classes != expected_classes) {
    throw ConfigMismatch("checkpoint predicts " + std::to_string(stored.num_classes) + " classes but dataset '" +
                         std::string(to_string(cfg.dataset.name)) + "' has " + std::to_string(expected_classes));
  }
  auto loaded = load_checkpoint(checkpoint);
  auto eval_cfg = cfg;
  eval_cfg.model = stored;
  return evaluate_model(loaded.model, load_split(cfg, split), eval_cfg, with_hd95);
}

TrainState fit(const ExperimentConfig& cfg, const FitOptions& opt) {
  cfg.validate();
  const auto spec = cfg.dataset.spec();
  const auto paths = run_paths(opt.runs_root, cfg.run_name);
  std::filesystem::create_directories(paths.dir);
  atomic_write(paths.config(), (opt.config_document.is_null() ? to_json(cfg) : opt.config_document).dump(2) + "\n");

  const auto split = resolve_split(cfg);
  write_manifest(paths.split_manifest(), split);
  if (split.train_ids.empty()) throw EmptyInput("the training split is empty");

  std::vector<LabeledVolume> train;
  for (const auto& id : split.train_ids) {
    auto item = load_patient(cfg.dataset.root / id, spec);
    auto [v, l] = preprocess(item.volume, item.labels, cfg.augmentation);
    train.push_back({std::move(v), std::move(l)});
  }
  std::vector<LabeledVolume> val;
  for (const auto& id : split.val_ids) val.push_back(load_patient(cfg.dataset.root / id, spec));

  torch::manual_seed(cfg.seed);
  auto model = build_model(cfg.model);
  const bool is3d = cfg.model.dims() == 3;
  const auto div = cfg.model.divisor();
  const auto batch = cfg.effective_batch_size();

  std::int64_t slices = 0;
  for (const auto& t : train) slices += t.volume.voxels.shape().d;
  const auto units = is3d ? static_cast<std::int64_t>(train.size()) : slices;
  const auto iters_per_epoch = (units + batch - 1) / batch;

  TrainState state;
  auto sched = cfg.scheduler;
  if (sched.step_size == 0) sched.step_size = 2 * iters_per_epoch;
  state.step_size = sched.step_size;
  state.class_dice.organs = table_organs(spec);

  auto optimizer = make_optimizer(model.parameters(), lr_at(sched, 0));
  std::mt19937_64 shuffle_rng(cfg.seed ^ kShuffleSalt);
  std::int64_t nonfinite = 0;

  auto flush_logs = [&] {
    write_curves(paths.curves(), state.curves);
    write_class_dice(paths.class_dice(), state.class_dice);
    write_lr_trace(paths.lr_trace(), state.lr_trace);
  };
  flush_logs();

  for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    model.train();

    // Per-epoch views of the training data (patches or whole volumes, augmented).
    std::vector<LabeledVolume> views;
    views.reserve(train.size());
    for (const auto& item : train) {
      const auto seed = derive_seed(cfg.seed, item.volume.patient_id, epoch);
      LabeledVolume base;
      if (is3d && cfg.patch_size) {
        std::mt19937_64 rng(seed);
        base = sample_patch(item, *cfg.patch_size, cfg.foreground_prob, rng);
      } else {
        base = item;
      }
      auto [v, l] = augment(base.volume, base.labels, cfg.augmentation, seed ^ kAugmentSalt);
      views.push_back({std::move(v), std::move(l)});
    }

    std::vector<SliceRef> order;
    if (is3d) {
      for (std::size_t i = 0; i < views.size(); ++i) order.push_back({i, 0});
    } else {
      for (std::size_t i = 0; i < views.size(); ++i)
        for (std::int64_t z = 0; z < views[i].volume.voxels.shape().d; ++z) order.push_back({i, z});
    }
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    std::vector<double> losses, dices;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
      const std::vector<SliceRef> refs(order.begin() + static_cast<std::ptrdiff_t>(start),
                                       order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + batch)));
      Batch b;
      if (is3d) {
        std::vector<LabeledVolume> chosen;
        for (const auto& r : refs) chosen.push_back(views[r.item]);
        b = stack_3d(chosen, div);
      } else {
        b = stack_2d(views, refs, div);
      }
      const double lr = lr_at(sched, state.iteration);
      optimizer->set_lr(lr);
      optimizer->zero_grad();
      torch::Tensor primary;
      auto loss = heads_loss(model, b, cfg.loss, &primary);
      const double value = loss.item<double>();
      if (!std::isfinite(value)) {
        if (++nonfinite >= opt.max_nonfinite) {
          flush_logs();
          throw DivergenceError("loss was non-finite for " + std::to_string(nonfinite) +
                                " consecutive iterations (epoch " + std::to_string(epoch) + ")");
        }
        continue;
      }
      nonfinite = 0;
      loss.backward();
      optimizer->step();
      state.lr_trace.emplace_back(state.iteration, lr);
      ++state.iteration;
      losses.push_back(value);
      dices.push_back(mean(class_dice(primary, b.y, cfg.model.num_classes)));
    }

    EpochReport rep;
    rep.epoch = epoch;
    rep.train_loss = mean(losses);
    rep.train_dice = mean(dices);
    rep.lr = state.lr_trace.empty() ? lr_at(sched, 0) : state.lr_trace.back().second;
    state.curves.train.push_back({epoch, rep.train_loss, rep.train_dice});

    if (!val.empty()) {
      const auto ev = evaluate_model(model, val, cfg, false);
      rep.val_loss = ev.mean_loss;
      rep.val_dice = ev.report.overall_dice;
      state.curves.val.push_back({epoch, ev.mean_loss, ev.report.overall_dice});
      std::vector<double> row;
      for (const auto& organ : state.class_dice.organs) row.push_back(ev.report.at(organ).dice);
      state.class_dice.epochs.push_back(epoch);
      state.class_dice.dice.push_back(std::move(row));
      state.epochs_completed = epoch + 1;
      if (!state.best || ev.report.overall_dice > state.best->val_dice) {
        state.best = BestEpoch{epoch, ev.report.overall_dice};
        save_checkpoint(model, state, paths.best());
        rep.improved = true;
      }
    }
    state.epochs_completed = epoch + 1;
    flush_logs();
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (opt.on_epoch) opt.on_epoch(rep);
  }
  if (cfg.epochs > 0) save_checkpoint(model, state, paths.last());
  return state;
}

}  // namespace oarseg

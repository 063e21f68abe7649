#include "lle/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "lle/core/errors.hpp"
#include "lle/loss/losses.hpp"
#include "lle/nets/checkpoint.hpp"
#include "lle/nets/da_net.hpp"
#include "lle/nets/unet.hpp"
#include "lle/nets/vgg16.hpp"
#include "lle/train/adam.hpp"

namespace lle {

namespace {

constexpr std::uint64_t kBatchStream = 0xBA7C4;
constexpr std::uint64_t kCropStream = 0xC609;
constexpr std::uint64_t kVggFallbackSeed = 0x5EED;

// Decoded pairs kept in memory, FIFO-evicted. Toy sets fit entirely; full
// runs re-decode cold samples.
class SampleCache {
 public:
  SampleCache(const DatasetIndex& index, std::size_t cap)
      : index_(index), cap_(cap) {}

  const PairedSample& get(std::size_t i) {
    for (auto& [idx, sample] : cache_)
      if (idx == i) return sample;
    cache_.emplace_back(i, load_pair(index_, i));
    if (cache_.size() > cap_) cache_.pop_front();
    return cache_.back().second;
  }

 private:
  const DatasetIndex& index_;
  std::size_t cap_;
  std::deque<std::pair<std::size_t, PairedSample>> cache_;
};

double scheduled_lr(const TrainConfig& cfg, long step) {
  if (cfg.lr_schedule == "step" && cfg.lr_step_every > 0)
    return cfg.learning_rate *
           std::pow(cfg.lr_step_gamma, double(step / cfg.lr_step_every));
  return cfg.learning_rate;
}

long resolve_steps(const TrainConfig& cfg, std::size_t pairs) {
  if (cfg.epochs > 0) {
    const long per_epoch =
        long((pairs + std::size_t(cfg.batch_size) - 1) /
             std::size_t(cfg.batch_size));
    return long(cfg.epochs) * std::max(1L, per_epoch);
  }
  return cfg.steps;
}

LossConfig loss_config_from(const TrainConfig& cfg) {
  LossConfig lcfg;
  lcfg.lambda_tv = cfg.lambda_tv;
  lcfg.per_norm = cfg.perceptual_norm == "feature"
                      ? LossConfig::PerceptualNorm::Feature
                      : LossConfig::PerceptualNorm::Input;
  lcfg.validate();
  return lcfg;
}

std::string history_tail(const std::vector<StepRecord>& history,
                         std::size_t keep = 50) {
  std::ostringstream out;
  const std::size_t start = history.size() > keep ? history.size() - keep : 0;
  for (std::size_t i = start; i < history.size(); ++i) {
    if (i > start) out << ",";
    out << history[i].step << ":" << history[i].components.at("total");
  }
  return out.str();
}

void stamp_meta(WeightStore& model, const TrainConfig& cfg, long step,
                const std::vector<StepRecord>& history) {
  model.meta["phase"] = phase_name(cfg.phase);
  model.meta["step"] = std::to_string(step);
  model.meta["seed"] = std::to_string(cfg.seed);
  model.meta["lambda_tv"] = std::to_string(cfg.lambda_tv);
  model.meta["config_hash"] = arch_hash(cfg.canonical_string());
  model.meta["loss_history"] = history_tail(history);
}

void write_log_line(std::ofstream& log, const StepRecord& rec, double lr) {
  log << "step=" << rec.step;
  for (const auto& [key, value] : rec.components)
    log << " " << key << "=" << value;
  log << " lr=" << lr << " wall_ms=" << rec.wall_ms << "\n";
  log.flush();
}

void check_divergence(const TrainConfig& cfg, double total,
                      const std::vector<std::string>& batch_ids, long step) {
  if (std::isfinite(total) && total <= cfg.divergence_threshold) return;
  std::string ids;
  for (const auto& id : batch_ids) ids += " " + id;
  throw NumericalError("training diverged at step " + std::to_string(step) +
                       " (total=" + std::to_string(total) + "), last batch:" +
                       ids);
}

void accumulate_grads(GraphF& g, const BoundParams<float>& all,
                      std::vector<std::vector<float>>& grads) {
  for (std::size_t k = 0; k < all.vars.size(); ++k) {
    const Tensor gt = g.grad_of(all.vars[k].second);
    auto& dst = grads[k];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gt.data[i];
  }
}

}  // namespace

TrainResult train_decomposition(const TrainConfig& cfg,
                                const DatasetIndex& dataset,
                                const std::filesystem::path& out_dir) {
  cfg.validate();
  if (cfg.phase != Phase::Decomposition)
    throw ConfigError("train_decomposition: config phase mismatch");
  if (dataset.pairs.empty())
    throw DataError("train_decomposition: empty dataset");
  std::filesystem::create_directories(out_dir);

  const UNetConfig unet_cfg = decomposer_config();
  const DaConfig da_cfg;
  WeightStore model;
  model.merge("decom.", unet_init(unet_cfg, cfg.seed));
  model.merge("da.", da_init(da_cfg, cfg.seed + 1));
  model.meta["arch.decom"] = unet_cfg.arch_string();
  model.meta["hash.decom"] = arch_hash(unet_cfg.arch_string());
  model.meta["arch.da"] = da_cfg.arch_string();
  model.meta["hash.da"] = arch_hash(da_cfg.arch_string());

  AdamState opt;
  opt.init(model);
  const LossConfig lcfg = loss_config_from(cfg);
  const long steps = resolve_steps(cfg, dataset.pairs.size());
  SampleCache cache(dataset, 64);
  std::ofstream log(out_dir / "train_decomposition.log");

  TrainResult result;
  for (long step = 0; step < steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = scheduled_lr(cfg, step);
    Rng batch_rng = Rng::derive(cfg.seed, {kBatchStream, std::uint64_t(step)});

    std::vector<std::vector<float>> grads;
    for (const auto& entry : model.entries)
      grads.emplace_back(entry.values.size(), 0.0f);
    std::map<std::string, double> comps = {
        {"rc", 0}, {"smooth", 0}, {"equal", 0}, {"da", 0}, {"total", 0}};
    std::vector<std::string> batch_ids;

    for (int slot = 0; slot < cfg.batch_size; ++slot) {
      const std::size_t idx =
          batch_rng.below(std::uint32_t(dataset.pairs.size()));
      const PairedSample& full = cache.get(idx);
      Rng crop_rng = Rng::derive(
          cfg.seed, {kCropStream, std::uint64_t(step), std::uint64_t(slot)});
      const PairedSample crop =
          random_crop_pair(full, cfg.patch_size, crop_rng);
      batch_ids.push_back(crop.id);

      GraphF g;
      const auto all = bind_params(g, model, true);
      const auto dec = subset_params(all, "decom.");
      const auto da = subset_params(all, "da.");
      const int s_low = g.leaf(crop.low.tensor, false);
      const int s_high = g.leaf(crop.high.tensor, false);
      const int out_low = unet_forward(g, dec, unet_cfg, s_low);
      const int out_high = unet_forward(g, dec, unet_cfg, s_high);
      const int r_low = g.slice_c(out_low, 0, 3);
      const int i_low = g.slice_c(out_low, 3, 4);
      const int r_high = g.slice_c(out_high, 0, 3);
      const int i_high = g.slice_c(out_high, 3, 4);
      const auto terms = decom_total_loss(g, r_low, i_low, s_low, r_high,
                                          i_high, s_high, da, da_cfg, lcfg);
      g.backward(terms.total);
      accumulate_grads(g, all, grads);
      comps["rc"] += g.scalar(terms.rc);
      comps["smooth"] += g.scalar(terms.smooth);
      comps["equal"] += g.scalar(terms.equal);
      comps["da"] += g.scalar(terms.da);
      comps["total"] += g.scalar(terms.total);
    }

    for (auto& [key, value] : comps) value /= cfg.batch_size;
    const float inv_batch = 1.0f / float(cfg.batch_size);
    for (auto& g : grads)
      for (auto& v : g) v *= inv_batch;
    clip_global_norm(grads, cfg.grad_clip);
    adam_step(model, opt, grads, lr, cfg.beta1, cfg.beta2, cfg.eps);
    check_divergence(cfg, comps["total"], batch_ids, step);

    StepRecord rec;
    rec.step = step;
    rec.components = comps;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.history.push_back(rec);
    if (cfg.log_every > 0 && step % cfg.log_every == 0)
      write_log_line(log, rec, lr);

    if (cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0 &&
        step + 1 < steps) {
      stamp_meta(model, cfg, step + 1, result.history);
      save_checkpoint(model,
                      out_dir / ("decom_step" + std::to_string(step + 1) +
                                 ".ckpt"));
    }
  }

  stamp_meta(model, cfg, steps, result.history);
  result.checkpoint_path = out_dir / "decom_final.ckpt";
  save_checkpoint(model, result.checkpoint_path);
  return result;
}

TrainResult train_enhancement(const TrainConfig& cfg,
                              const DatasetIndex& dataset,
                              const std::filesystem::path& decom_ckpt,
                              const std::filesystem::path& out_dir) {
  cfg.validate();
  if (cfg.phase != Phase::Enhancement)
    throw ConfigError("train_enhancement: config phase mismatch");
  if (dataset.pairs.empty())
    throw DataError("train_enhancement: empty dataset");
  std::filesystem::create_directories(out_dir);

  const UNetConfig dec_cfg = decomposer_config();
  const UNetConfig enh_cfg = enhancer_config();
  const WeightStore loaded = load_checkpoint(decom_ckpt);
  require_arch(loaded, "arch.decom", dec_cfg.arch_string());
  const WeightStore decom = loaded.subset("decom.");

  WeightStore model;
  model.merge("enh.", unet_init(enh_cfg, cfg.seed + 2));
  model.meta["arch.enh"] = enh_cfg.arch_string();
  model.meta["hash.enh"] = arch_hash(enh_cfg.arch_string());
  model.meta["decom_checkpoint"] = decom_ckpt.string();

  const WeightStore vgg = cfg.vgg_checkpoint.empty()
                              ? vgg16_init(kVggFallbackSeed)
                              : load_checkpoint(cfg.vgg_checkpoint);
  require_arch(vgg, "arch", VggConfig::weights_arch());
  const VggConfig vgg_cfg{cfg.vgg_layer};
  if (cfg.patch_size < vgg_cfg.input_multiple())
    throw ConfigError("train_enhancement: patch_size " +
                      std::to_string(cfg.patch_size) +
                      " is below the perceptual-loss minimum " +
                      std::to_string(vgg_cfg.input_multiple()));

  AdamState opt;
  opt.init(model);
  const LossConfig lcfg = loss_config_from(cfg);
  const long steps = resolve_steps(cfg, dataset.pairs.size());
  SampleCache cache(dataset, 64);
  std::ofstream log(out_dir / "train_enhancement.log");

  TrainResult result;
  for (long step = 0; step < steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = scheduled_lr(cfg, step);
    Rng batch_rng = Rng::derive(cfg.seed, {kBatchStream, std::uint64_t(step)});

    std::vector<std::vector<float>> grads;
    for (const auto& entry : model.entries)
      grads.emplace_back(entry.values.size(), 0.0f);
    std::map<std::string, double> comps = {
        {"rc", 0}, {"bri", 0}, {"per", 0}, {"grad", 0}, {"total", 0}};
    std::vector<std::string> batch_ids;

    for (int slot = 0; slot < cfg.batch_size; ++slot) {
      const std::size_t idx =
          batch_rng.below(std::uint32_t(dataset.pairs.size()));
      const PairedSample& full = cache.get(idx);
      Rng crop_rng = Rng::derive(
          cfg.seed, {kCropStream, std::uint64_t(step), std::uint64_t(slot)});
      const PairedSample crop =
          random_crop_pair(full, cfg.patch_size, crop_rng);
      batch_ids.push_back(crop.id);

      GraphF g;
      const auto dec = bind_params(g, decom, false);  // frozen
      const auto all = bind_params(g, model, true);
      const auto enh = subset_params(all, "enh.");
      const auto vggp = bind_params(g, vgg, false);

      const int s_low = g.leaf(crop.low.tensor, false);
      const int s_high = g.leaf(crop.high.tensor, false);
      const int out_low = unet_forward(g, dec, dec_cfg, s_low);
      const int r_low = g.slice_c(out_low, 0, 3);
      const int i_low = g.slice_c(out_low, 3, 4);
      const int out_high = unet_forward(g, dec, dec_cfg, s_high);
      const int i_high = g.slice_c(out_high, 3, 4);
      const int i_out =
          unet_forward(g, enh, enh_cfg, g.concat_c(r_low, i_low));
      const auto terms = enh_total_loss(g, r_low, i_out, s_high, i_high, vggp,
                                        vgg_cfg, lcfg);
      g.backward(terms.total);
      accumulate_grads(g, all, grads);
      comps["rc"] += g.scalar(terms.rc);
      comps["bri"] += g.scalar(terms.bri);
      comps["per"] += g.scalar(terms.per);
      comps["grad"] += g.scalar(terms.grad);
      comps["total"] += g.scalar(terms.total);
    }

    for (auto& [key, value] : comps) value /= cfg.batch_size;
    const float inv_batch = 1.0f / float(cfg.batch_size);
    for (auto& g : grads)
      for (auto& v : g) v *= inv_batch;
    clip_global_norm(grads, cfg.grad_clip);
    adam_step(model, opt, grads, lr, cfg.beta1, cfg.beta2, cfg.eps);
    check_divergence(cfg, comps["total"], batch_ids, step);

    StepRecord rec;
    rec.step = step;
    rec.components = comps;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.history.push_back(rec);
    if (cfg.log_every > 0 && step % cfg.log_every == 0)
      write_log_line(log, rec, lr);

    if (cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0 &&
        step + 1 < steps) {
      stamp_meta(model, cfg, step + 1, result.history);
      save_checkpoint(model, out_dir / ("enh_step" + std::to_string(step + 1) +
                                        ".ckpt"));
    }
  }

  stamp_meta(model, cfg, steps, result.history);
  result.checkpoint_path = out_dir / "enh_final.ckpt";
  save_checkpoint(model, result.checkpoint_path);
  return result;
}

}  // namespace lle

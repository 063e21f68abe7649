#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace lle {

enum class Phase { Decomposition, Enhancement };

// Training protocol: Adam, batch 4, 384x384 crops; lambda_tv 0.2 for the
// real-world pairs and 0.05 for the synthetic set. Parsed from a flat
// key=value file; every field can also be overridden on the CLI.
struct TrainConfig {
  Phase phase = Phase::Decomposition;
  int batch_size = 4;
  int patch_size = 384;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // One optimization step consumes one batch. `epochs`, when nonzero,
  // overrides steps with epochs * ceil(pairs / batch_size).
  int steps = 2000;
  int epochs = 0;
  double lambda_tv = 0.2;
  std::uint64_t seed = 1;
  int checkpoint_every = 500;
  bool deterministic = true;
  double grad_clip = 5.0;
  double divergence_threshold = 1e3;
  std::string lr_schedule = "none";  // none | step
  int lr_step_every = 0;
  double lr_step_gamma = 0.5;
  std::string vgg_checkpoint;  // empty: deterministic random features
  int vgg_layer = 31;
  std::string perceptual_norm = "input";  // input | feature
  int log_every = 1;

  void validate() const;
  // Stable textual form; its hash is recorded in checkpoint meta.
  std::string canonical_string() const;
};

TrainConfig parse_train_config(const std::filesystem::path& path);
TrainConfig parse_train_config_text(const std::string& text);

const char* phase_name(Phase phase);

}  // namespace lle

#include "lle/train/config.hpp"

#include <fstream>
#include <sstream>

#include "lle/core/errors.hpp"

namespace lle {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
  if (patch_size < 8 || patch_size % 8 != 0)
    throw ConfigError("config: patch_size must be a positive multiple of 8");
  if (!(lambda_tv >= 0.0)) throw ConfigError("config: lambda_tv must be >= 0");
  if (!(learning_rate > 0.0))
    throw ConfigError("config: learning_rate must be > 0");
  if (steps < 1 && epochs < 1)
    throw ConfigError("config: need steps >= 1 or epochs >= 1");
  if (lr_schedule != "none" && lr_schedule != "step")
    throw ConfigError("config: lr_schedule must be none or step");
  if (lr_schedule == "step" && lr_step_every < 1)
    throw ConfigError("config: lr_schedule=step needs lr_step_every >= 1");
  if (perceptual_norm != "input" && perceptual_norm != "feature")
    throw ConfigError("config: perceptual_norm must be input or feature");
  if (vgg_layer < 1 || vgg_layer > 31)
    throw ConfigError("config: vgg_layer must be in [1, 31]");
}

std::string TrainConfig::canonical_string() const {
  std::ostringstream out;
  out << "phase=" << phase_name(phase) << ";batch=" << batch_size
      << ";patch=" << patch_size << ";lr=" << learning_rate
      << ";beta1=" << beta1 << ";beta2=" << beta2 << ";eps=" << eps
      << ";steps=" << steps << ";epochs=" << epochs
      << ";lambda_tv=" << lambda_tv << ";seed=" << seed
      << ";clip=" << grad_clip << ";sched=" << lr_schedule << ","
      << lr_step_every << "," << lr_step_gamma
      << ";vgg_layer=" << vgg_layer << ";per_norm=" << perceptual_norm
      << ";det=" << (deterministic ? 1 : 0);
  return out.str();
}

const char* phase_name(Phase phase) {
  return phase == Phase::Decomposition ? "decomposition" : "enhancement";
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: bad boolean for " + key + ": " + value);
}

}  // namespace

TrainConfig parse_train_config_text(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "phase") {
        if (value == "decom" || value == "decomposition")
          cfg.phase = Phase::Decomposition;
        else if (value == "enh" || value == "enhancement")
          cfg.phase = Phase::Enhancement;
        else
          throw ConfigError("config: unknown phase '" + value + "'");
      } else if (key == "batch_size") {
        cfg.batch_size = std::stoi(value);
      } else if (key == "patch_size") {
        cfg.patch_size = std::stoi(value);
      } else if (key == "learning_rate") {
        cfg.learning_rate = std::stod(value);
      } else if (key == "beta1") {
        cfg.beta1 = std::stod(value);
      } else if (key == "beta2") {
        cfg.beta2 = std::stod(value);
      } else if (key == "eps") {
        cfg.eps = std::stod(value);
      } else if (key == "steps") {
        cfg.steps = std::stoi(value);
      } else if (key == "epochs") {
        cfg.epochs = std::stoi(value);
      } else if (key == "lambda_tv") {
        cfg.lambda_tv = std::stod(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "checkpoint_every") {
        cfg.checkpoint_every = std::stoi(value);
      } else if (key == "deterministic") {
        cfg.deterministic = parse_bool(value, key);
      } else if (key == "grad_clip") {
        cfg.grad_clip = std::stod(value);
      } else if (key == "divergence_threshold") {
        cfg.divergence_threshold = std::stod(value);
      } else if (key == "lr_schedule") {
        cfg.lr_schedule = value;
      } else if (key == "lr_step_every") {
        cfg.lr_step_every = std::stoi(value);
      } else if (key == "lr_step_gamma") {
        cfg.lr_step_gamma = std::stod(value);
      } else if (key == "vgg_checkpoint") {
        cfg.vgg_checkpoint = value;
      } else if (key == "vgg_layer") {
        cfg.vgg_layer = std::stoi(value);
      } else if (key == "perceptual_norm") {
        cfg.perceptual_norm = value;
      } else if (key == "log_every") {
        cfg.log_every = std::stoi(value);
      } else {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": bad value for '" + key + "': " + value);
    } catch (const std::out_of_range&) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": value out of range for '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig parse_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_train_config_text(buf.str());
}

}  // namespace lle

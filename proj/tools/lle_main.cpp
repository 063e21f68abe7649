// lle: Retinex-decomposition low-light image enhancement toolkit.
//
// Subcommands: train, decompose, enhance, eval, grid.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "lle/core/errors.hpp"
#include "lle/image/image.hpp"
#include "lle/metrics/metrics.hpp"
#include "lle/nets/checkpoint.hpp"
#include "lle/nets/pad.hpp"
#include "lle/nets/unet.hpp"
#include "lle/pipeline/pipeline.hpp"
#include "lle/train/config.hpp"
#include "lle/train/trainer.hpp"

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::string phase;
  std::string data_root;
  std::string config_path;
  std::optional<double> lambda_tv;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::string decom_ckpt;
  std::string vgg_ckpt;
  std::string out_dir = "runs";
};

int run_train(const TrainArgs& args) {
  lle::TrainConfig cfg = lle::parse_train_config(args.config_path);
  cfg.phase = args.phase == "decom" ? lle::Phase::Decomposition
                                    : lle::Phase::Enhancement;
  if (args.lambda_tv) cfg.lambda_tv = *args.lambda_tv;
  if (args.seed) cfg.seed = *args.seed;
  if (args.steps) cfg.steps = *args.steps;
  if (!args.vgg_ckpt.empty()) cfg.vgg_checkpoint = args.vgg_ckpt;
  cfg.validate();

  const lle::DatasetIndex dataset =
      lle::index_paired_dataset(args.data_root, lle::Split::Train);
  std::cout << "training " << args.phase << " on " << dataset.pairs.size()
            << " pairs, " << (cfg.epochs > 0 ? -1 : cfg.steps)
            << " steps, lambda_tv=" << cfg.lambda_tv << ", seed=" << cfg.seed
            << "\n";

  lle::TrainResult result;
  if (cfg.phase == lle::Phase::Decomposition) {
    result = lle::train_decomposition(cfg, dataset, args.out_dir);
  } else {
    if (args.decom_ckpt.empty())
      throw lle::ConfigError("train --phase enh requires --decom-ckpt");
    result =
        lle::train_enhancement(cfg, dataset, args.decom_ckpt, args.out_dir);
  }
  std::cout << "final loss " << result.history.back().components.at("total")
            << " after " << result.history.size() << " steps\n"
            << "checkpoint: " << result.checkpoint_path.string() << "\n";
  return 0;
}

int run_decompose(const std::string& input, const std::string& ckpt,
                  const std::string& out_dir) {
  const lle::ImageTensor img = lle::load_image(input);
  const lle::WeightStore weights = lle::load_decomposer(ckpt);
  const int multiple = lle::decomposer_config().pad_multiple();
  const auto [padded, record] = lle::pad_to_multiple(img, multiple);
  auto [reflectance, illumination] = lle::decompose(weights, padded);
  fs::create_directories(out_dir);
  const std::string stem = fs::path(input).stem().string();
  lle::save_image(lle::crop_back(reflectance, record),
                  fs::path(out_dir) / (stem + "_R.png"));
  lle::save_image(lle::crop_back(illumination, record),
                  fs::path(out_dir) / (stem + "_I.png"));
  std::cout << "wrote " << stem << "_R.png and " << stem << "_I.png to "
            << out_dir << "\n";
  return 0;
}

int run_enhance(const std::string& input, const std::string& decom_ckpt,
                const std::string& enh_ckpt, const std::string& output) {
  const lle::ImageTensor img = lle::load_image(input);
  const lle::EnhancedOutput out =
      lle::enhance_image(fs::path(decom_ckpt), fs::path(enh_ckpt), img);
  lle::save_image(out.enhanced, output);
  std::cout << "wrote " << output << "\n";
  return 0;
}

int run_eval(const std::string& pred_dir, const std::string& gt_dir,
             const std::string& out_path) {
  const lle::MetricReport report =
      lle::evaluate_directories(pred_dir, gt_dir);
  lle::write_report(report, out_path);
  std::cout << "evaluated " << report.per_image.size() << " images\n";
  for (const auto& [key, value] : report.aggregate)
    std::cout << "  " << key << ": " << value << "\n";
  std::cout << "report: " << out_path << "\n";
  return 0;
}

int run_grid(const std::vector<std::string>& inputs, const std::string& output,
             const std::string& gt_path) {
  std::vector<lle::ImageTensor> panels;
  std::vector<std::string> labels;
  std::optional<lle::ImageTensor> gt;
  if (!gt_path.empty()) gt = lle::load_image(gt_path);
  for (const auto& path : inputs) {
    panels.push_back(lle::load_image(path));
    std::string label = fs::path(path).filename().string();
    if (gt && gt->tensor.same_shape(panels.back().tensor)) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), " %.2f dB",
                    lle::psnr(panels.back(), *gt));
      label += buf;
    }
    labels.push_back(label);
  }
  lle::save_image(lle::make_grid(panels, labels), output);
  std::cout << "wrote " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retinex low-light image enhancement toolkit"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a phase");
  train->add_option("--phase", train_args.phase, "decom | enh")
      ->required()
      ->check(CLI::IsMember({"decom", "enh"}));
  train->add_option("--data-root", train_args.data_root,
                    "dataset root with low/ and high/")
      ->required();
  train->add_option("--config", train_args.config_path, "key=value config")
      ->required();
  train->add_option("--lambda-tv", train_args.lambda_tv,
                    "override lambda_tv");
  train->add_option("--seed", train_args.seed, "override seed");
  train->add_option("--steps", train_args.steps, "override step count");
  train->add_option("--decom-ckpt", train_args.decom_ckpt,
                    "phase-1 checkpoint (enhancement phase)");
  train->add_option("--vgg-ckpt", train_args.vgg_ckpt,
                    "pretrained VGG16 archive for the perceptual loss");
  train->add_option("--out-dir", train_args.out_dir, "output directory");

  std::string in_path, out_path, out_dir, decom_ckpt, enh_ckpt;
  CLI::App* decompose =
      app.add_subcommand("decompose", "write reflectance and illumination");
  decompose->add_option("--input", in_path)->required();
  decompose->add_option("--decom-ckpt", decom_ckpt)->required();
  decompose->add_option("--out-dir", out_dir)->required();

  CLI::App* enhance = app.add_subcommand("enhance", "enhance one image");
  enhance->add_option("--input", in_path)->required();
  enhance->add_option("--decom-ckpt", decom_ckpt)->required();
  enhance->add_option("--enh-ckpt", enh_ckpt)->required();
  enhance->add_option("--output", out_path)->required();

  std::string pred_dir, gt_dir;
  CLI::App* eval = app.add_subcommand("eval", "full metric battery");
  eval->add_option("--pred-dir", pred_dir)->required();
  eval->add_option("--gt-dir", gt_dir)->required();
  eval->add_option("--out", out_path)->required();

  std::vector<std::string> grid_inputs;
  std::string grid_gt;
  CLI::App* grid = app.add_subcommand("grid", "side-by-side comparison image");
  grid->add_option("--inputs", grid_inputs)->required()->expected(-1);
  grid->add_option("--output", out_path)->required();
  grid->add_option("--gt", grid_gt, "annotate panels with PSNR against this");

  try {
    app.parse(argc, argv);
    if (train->parsed()) return run_train(train_args);
    if (decompose->parsed())
      return run_decompose(in_path, decom_ckpt, out_dir);
    if (enhance->parsed())
      return run_enhance(in_path, decom_ckpt, enh_ckpt, out_path);
    if (eval->parsed()) return run_eval(pred_dir, gt_dir, out_path);
    if (grid->parsed()) return run_grid(grid_inputs, out_path, grid_gt);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << app.help() << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const lle::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const lle::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

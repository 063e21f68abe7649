#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "lle/core/errors.hpp"
#include "lle/nets/checkpoint.hpp"
#include "lle/nets/da_net.hpp"
#include "lle/nets/unet.hpp"
#include "lle/pipeline/pipeline.hpp"
#include "support/toydata.hpp"

using namespace lle;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() /
           (std::string("lle_pipeline_") + tag + "_" +
            std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Random-initialized phase-1/phase-2 archives, enough for plumbing tests.
void write_fake_checkpoints(const fs::path& dir, fs::path& decom_out,
                            fs::path& enh_out) {
  WeightStore phase1;
  phase1.merge("decom.", unet_init(decomposer_config(), 5));
  phase1.merge("da.", da_init(DaConfig{}, 6));
  phase1.meta["arch.decom"] = decomposer_config().arch_string();
  phase1.meta["arch.da"] = DaConfig{}.arch_string();
  decom_out = dir / "decom.ckpt";
  save_checkpoint(phase1, decom_out);

  WeightStore phase2;
  phase2.merge("enh.", unet_init(enhancer_config(), 7));
  phase2.meta["arch.enh"] = enhancer_config().arch_string();
  enh_out = dir / "enh.ckpt";
  save_checkpoint(phase2, enh_out);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LLE_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("enhance_image satisfies the recomposition identity") {
  TempDir tmp("recompose");
  fs::path decom_ckpt, enh_ckpt;
  write_fake_checkpoints(tmp.path, decom_ckpt, enh_ckpt);

  Rng rng(17);
  ImageTensor img;
  img.tensor = Tensor(400, 600, 3);
  for (auto& v : img.tensor.data) v = float(rng.uniform());

  const EnhancedOutput out = enhance_image(decom_ckpt, enh_ckpt, img);
  REQUIRE(out.enhanced.tensor.h == 400);
  REQUIRE(out.enhanced.tensor.w == 600);
  REQUIRE(out.reflectance.tensor.c == 3);
  REQUIRE(out.illumination_in.tensor.c == 1);
  REQUIRE(out.illumination_out.tensor.c == 1);

  for (int pix = 0; pix < 400 * 600; ++pix) {
    const float gain = out.illumination_out.tensor.data[std::size_t(pix)];
    for (int ch = 0; ch < 3; ++ch) {
      const float want = std::clamp(
          out.reflectance.tensor.data[std::size_t(pix) * 3 + ch] * gain, 0.0f,
          1.0f);
      REQUIRE(out.enhanced.tensor.data[std::size_t(pix) * 3 + ch] == want);
      REQUIRE(out.enhanced.tensor.data[std::size_t(pix) * 3 + ch] >= 0.0f);
      REQUIRE(out.enhanced.tensor.data[std::size_t(pix) * 3 + ch] <= 1.0f);
    }
  }

  const EnhancedOutput again = enhance_image(decom_ckpt, enh_ckpt, img);
  CHECK(again.enhanced.tensor.data == out.enhanced.tensor.data);
}

TEST_CASE("enhance_image rejects mismatched checkpoints") {
  TempDir tmp("badpair");
  fs::path decom_ckpt, enh_ckpt;
  write_fake_checkpoints(tmp.path, decom_ckpt, enh_ckpt);
  ImageTensor img;
  img.tensor = Tensor(16, 16, 3);
  CHECK_THROWS_AS((void)enhance_image(enh_ckpt, decom_ckpt, img),
                  IncompatibilityError);
  ImageTensor gray;
  gray.tensor = Tensor(16, 16, 1);
  CHECK_THROWS_AS((void)enhance_image(decom_ckpt, enh_ckpt, gray),
                  ShapeError);
}

TEST_CASE("report aggregate is the per-metric mean") {
  MetricReport report;
  report.per_image["one"] = {{"psnr_db", 10.0}, {"ssim", 0.5}};
  report.per_image["two"] = {{"psnr_db", 30.0}, {"ssim", 0.7}};
  make_aggregate(report);
  CHECK(report.aggregate.at("psnr_db") == doctest::Approx(20.0));
  CHECK(report.aggregate.at("ssim") == doctest::Approx(0.6));

  MetricReport single;
  single.per_image["only"] = {{"psnr_db", 20.0}};
  make_aggregate(single);
  CHECK(single.aggregate.at("psnr_db") == doctest::Approx(20.0));

  MetricReport ragged;
  ragged.per_image["a"] = {{"psnr_db", 1.0}};
  ragged.per_image["b"] = {{"ssim", 1.0}};
  CHECK_THROWS_AS(make_aggregate(ragged), DataError);
}

TEST_CASE("report JSON round-trips") {
  TempDir tmp("report");
  MetricReport report;
  report.per_image["img1"] = {{"psnr_db", 12.345678}, {"ssim", 0.87}};
  report.per_image["img2"] = {{"psnr_db", 23.456789}, {"ssim", 0.91}};
  report.notes["sam_deg"] = "lower is better";
  make_aggregate(report);
  write_report(report, tmp.path / "report.json");
  const MetricReport back = read_report(tmp.path / "report.json");
  CHECK(back.per_image.size() == 2);
  CHECK(back.per_image.at("img1").at("psnr_db") ==
        doctest::Approx(12.345678).epsilon(1e-12));
  CHECK(back.aggregate.at("ssim") ==
        doctest::Approx(report.aggregate.at("ssim")).epsilon(1e-12));
  CHECK(back.notes.at("sam_deg") == "lower is better");
}

TEST_CASE("eval of a directory against itself is ideal") {
  TempDir tmp("selfeval");
  test::write_toy_dataset(tmp.path, 3, 48, 2024);
  // compare high/ with itself
  const MetricReport report =
      evaluate_directories(tmp.path / "high", tmp.path / "high");
  REQUIRE(report.per_image.size() == 3);
  for (const auto& [id, metrics] : report.per_image) {
    CAPTURE(id);
    CHECK(metrics.at("psnr_db") == 100.0);
    CHECK(metrics.at("ssim") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(metrics.at("delta_e2000") == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(metrics.at("angular_mean_deg") == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(metrics.at("angular_median_deg") ==
          doctest::Approx(0.0).epsilon(1e-6));
    CHECK(metrics.at("angular_avg_deg") == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(metrics.at("rmse") == 0.0);
    CHECK(metrics.at("uqi") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(metrics.at("srer_db") == 100.0);
  }
}

TEST_CASE("eval reports pairing offenders") {
  TempDir tmp("pairing");
  fs::create_directories(tmp.path / "pred");
  fs::create_directories(tmp.path / "gt");
  ImageTensor img;
  img.tensor = Tensor::full(16, 16, 3, 0.5f);
  save_image(img, tmp.path / "pred" / "a.png");
  save_image(img, tmp.path / "gt" / "b.png");
  try {
    (void)evaluate_directories(tmp.path / "pred", tmp.path / "gt");
    FAIL("expected PairingError");
  } catch (const PairingError& e) {
    const std::string what = e.what();
    CHECK(what.find("a") != std::string::npos);
    CHECK(what.find("b") != std::string::npos);
  }
}

TEST_CASE("grid composes labeled panels") {
  ImageTensor a, b;
  a.tensor = Tensor::full(40, 60, 3, 0.2f);
  b.tensor = Tensor::full(40, 50, 3, 0.8f);
  const ImageTensor grid = make_grid({a, b}, {"dark", "bright"});
  CHECK(grid.tensor.h == 40);
  CHECK(grid.tensor.w == 60 + 4 + 50);
  CHECK_THROWS_AS((void)make_grid({}, {}), DataError);
  CHECK_THROWS_AS((void)make_grid({a}, {"x", "y"}), DataError);
}

TEST_CASE("cli exit codes") {
  TempDir tmp("cli");
  fs::path decom_ckpt, enh_ckpt;
  write_fake_checkpoints(tmp.path, decom_ckpt, enh_ckpt);
  ImageTensor img;
  img.tensor = Tensor::full(24, 24, 3, 0.3f);
  save_image(img, tmp.path / "input.png");

  SUBCASE("enhance happy path exits 0 and writes the file") {
    const fs::path out = tmp.path / "out.png";
    const int code =
        run_cli("enhance --input " + (tmp.path / "input.png").string() +
                " --decom-ckpt " + decom_ckpt.string() + " --enh-ckpt " +
                enh_ckpt.string() + " --output " + out.string());
    CHECK(code == 0);
    CHECK(fs::exists(out));
  }
  SUBCASE("missing required flag exits 1") {
    const int code = run_cli("enhance --decom-ckpt " + decom_ckpt.string() +
                             " --enh-ckpt " + enh_ckpt.string() +
                             " --output x.png");
    CHECK(code == 1);
  }
  SUBCASE("unknown flag exits 1") {
    CHECK(run_cli("enhance --frobnicate yes") == 1);
  }
  SUBCASE("eval with mismatched basenames exits 2") {
    fs::create_directories(tmp.path / "pred");
    fs::create_directories(tmp.path / "gt");
    save_image(img, tmp.path / "pred" / "one.png");
    save_image(img, tmp.path / "gt" / "two.png");
    const int code = run_cli("eval --pred-dir " +
                             (tmp.path / "pred").string() + " --gt-dir " +
                             (tmp.path / "gt").string() + " --out " +
                             (tmp.path / "r.json").string());
    CHECK(code == 2);
  }
  SUBCASE("decompose writes R and I images") {
    const int code =
        run_cli("decompose --input " + (tmp.path / "input.png").string() +
                " --decom-ckpt " + decom_ckpt.string() + " --out-dir " +
                (tmp.path / "parts").string());
    CHECK(code == 0);
    CHECK(fs::exists(tmp.path / "parts" / "input_R.png"));
    CHECK(fs::exists(tmp.path / "parts" / "input_I.png"));
  }
  SUBCASE("grid subcommand writes a comparison image") {
    const int code =
        run_cli("grid --inputs " + (tmp.path / "input.png").string() + " " +
                (tmp.path / "input.png").string() + " --output " +
                (tmp.path / "grid.png").string());
    CHECK(code == 0);
    CHECK(fs::exists(tmp.path / "grid.png"));
  }
}

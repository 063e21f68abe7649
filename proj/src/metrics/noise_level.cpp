// Single-image noise-level estimation from weak-texture patches: sigma^2 is
// the smallest eigenvalue of the covariance of selected 7x7 patches, where
// selection thresholds each patch's gradient energy against a gamma
// quantile scaled by the current sigma^2 estimate, iterated to convergence.

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "lle/core/errors.hpp"
#include "lle/metrics/metrics.hpp"

namespace lle {

namespace {

constexpr int kPatch = 7;
constexpr int kMaxIters = 10;
constexpr double kSigmaTol = 1e-4;
constexpr double kConfidence = 1.0 - 1e-6;

struct DerivativeStats {
  double tau0;  // gamma quantile * 2*tr(DD)/rank
};

// Gradient energy statistics of the 7x7 derivative operators: DD =
// Dh^T Dh + Dv^T Dv for the valid-region [-1/2, 0, 1/2] filters.
DerivativeStats derivative_stats() {
  const int n = kPatch * kPatch;
  const int valid = kPatch * (kPatch - 2);
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(valid, n);
  Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(valid, n);
  int row = 0;
  for (int y = 0; y < kPatch; ++y)
    for (int x = 1; x + 1 < kPatch; ++x, ++row) {
      dh(row, y * kPatch + x - 1) = -0.5;
      dh(row, y * kPatch + x + 1) = 0.5;
    }
  row = 0;
  for (int y = 1; y + 1 < kPatch; ++y)
    for (int x = 0; x < kPatch; ++x, ++row) {
      dv(row, (y - 1) * kPatch + x) = -0.5;
      dv(row, (y + 1) * kPatch + x) = 0.5;
    }
  const Eigen::MatrixXd dd = dh.transpose() * dh + dv.transpose() * dv;
  const double trace = dd.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dd);
  const double max_eig = eig.eigenvalues().maxCoeff();
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (eig.eigenvalues()(i) > 1e-9 * max_eig) ++rank;
  const double quantile =
      boost::math::gamma_p_inv(double(rank) / 2.0, kConfidence);
  return {quantile * 2.0 * trace / double(rank)};
}

double smallest_cov_eigenvalue(const std::vector<const float*>& patches,
                               int dim) {
  const std::size_t n = patches.size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd p(dim);
  for (const float* patch : patches) {
    for (int i = 0; i < dim; ++i) p(i) = patch[i];
    mean += p;
    second.selfadjointView<Eigen::Lower>().rankUpdate(p);
  }
  mean /= double(n);
  Eigen::MatrixXd cov =
      (Eigen::MatrixXd(second.selfadjointView<Eigen::Lower>()) -
       double(n) * mean * mean.transpose()) /
      double(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

}  // namespace

double noise_level_estimate(const ImageTensor& img) {
  const Tensor& t = img.tensor;
  const int h = t.h, w = t.w;
  if (h < 32 || w < 32)
    throw ShapeError("noise_level_estimate: image must be at least 32x32");

  std::vector<double> gray(std::size_t(h) * w);
  for (int pix = 0; pix < h * w; ++pix) {
    double acc = 0.0;
    for (int ch = 0; ch < t.c; ++ch)
      acc += t.data[std::size_t(pix) * t.c + ch];
    gray[std::size_t(pix)] = acc / t.c;
  }

  // Per-patch gradient energy via prefix sums over the valid-region
  // squared-derivative maps.
  const int gw = w - 2, gh_h = h - 2;
  std::vector<double> ph(std::size_t(h + 1) * (gw + 1), 0.0);
  std::vector<double> pv(std::size_t(gh_h + 1) * (w + 1), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < gw; ++x) {
      const double d =
          0.5 * (gray[std::size_t(y) * w + x + 2] - gray[std::size_t(y) * w + x]);
      ph[std::size_t(y + 1) * (gw + 1) + x + 1] =
          d * d + ph[std::size_t(y) * (gw + 1) + x + 1] +
          ph[std::size_t(y + 1) * (gw + 1) + x] -
          ph[std::size_t(y) * (gw + 1) + x];
    }
  for (int y = 0; y < gh_h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = 0.5 * (gray[std::size_t(y + 2) * w + x] -
                              gray[std::size_t(y) * w + x]);
      pv[std::size_t(y + 1) * (w + 1) + x + 1] =
          d * d + pv[std::size_t(y) * (w + 1) + x + 1] +
          pv[std::size_t(y + 1) * (w + 1) + x] -
          pv[std::size_t(y) * (w + 1) + x];
    }
  auto block_sum = [](const std::vector<double>& p, int stride, int y0, int x0,
                      int rows, int cols) {
    return p[std::size_t(y0 + rows) * stride + x0 + cols] -
           p[std::size_t(y0) * stride + x0 + cols] -
           p[std::size_t(y0 + rows) * stride + x0] +
           p[std::size_t(y0) * stride + x0];
  };

  const int rows = h - kPatch + 1, cols = w - kPatch + 1;
  const int dim = kPatch * kPatch;
  std::vector<float> patch_data(std::size_t(rows) * cols * dim);
  std::vector<double> energy(std::size_t(rows) * cols);
  for (int py = 0; py < rows; ++py)
    for (int px = 0; px < cols; ++px) {
      float* dst = &patch_data[(std::size_t(py) * cols + px) * dim];
      for (int i = 0; i < kPatch; ++i)
        for (int j = 0; j < kPatch; ++j)
          dst[i * kPatch + j] = float(gray[std::size_t(py + i) * w + px + j]);
      // horizontal-valid interior is 7x5, vertical-valid 5x7
      energy[std::size_t(py) * cols + px] =
          block_sum(ph, gw + 1, py, px, kPatch, kPatch - 2) +
          block_sum(pv, w + 1, py, px, kPatch - 2, kPatch);
    }

  std::vector<const float*> all;
  all.reserve(std::size_t(rows) * cols);
  for (std::size_t i = 0; i < std::size_t(rows) * cols; ++i)
    all.push_back(&patch_data[i * dim]);

  double sigma2 = smallest_cov_eigenvalue(all, dim);
  if (sigma2 <= 0.0) return 0.0;

  static const DerivativeStats stats = derivative_stats();
  double sigma = std::sqrt(sigma2);
  for (int iter = 0; iter < kMaxIters; ++iter) {
    const double tau = sigma2 * stats.tau0;
    std::vector<const float*> selected;
    selected.reserve(all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
      if (energy[i] < tau) selected.push_back(all[i]);
    if (int(selected.size()) <= dim + 1) break;  // keep the last estimate
    const double next2 = smallest_cov_eigenvalue(selected, dim);
    const double next = std::sqrt(std::max(0.0, next2));
    const bool converged = std::abs(next - sigma) < kSigmaTol;
    sigma = next;
    sigma2 = next2;
    if (converged) break;
  }
  return sigma;
}

}  // namespace lle

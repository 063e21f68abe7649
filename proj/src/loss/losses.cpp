#include "lle/loss/losses.hpp"

#include "lle/core/errors.hpp"

namespace lle {

void LossConfig::validate() const {
  const double weights[] = {lambda_ij_same, lambda_ij_cross, smooth_lambda,
                            lambda_tv,      da_tv_coeff,     da_mse_coeff,
                            da_l1_coeff,    w_rc,            w_smooth,
                            w_equal,        w_da,            w_rc_e,
                            w_bri,          w_per,           w_grad};
  for (const double w : weights)
    if (!(w >= 0.0))
      throw ConfigError("LossConfig: loss weights must be nonnegative");
}

template <class T>
TensorT<T> tensor_grad_h(const TensorT<T>& img) {
  TensorT<T> out(img.h, img.w, img.c);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x + 1 < img.w; ++x)
      for (int ch = 0; ch < img.c; ++ch)
        out.at(y, x, ch) = img.at(y, x + 1, ch) - img.at(y, x, ch);
  return out;
}

template <class T>
TensorT<T> tensor_grad_v(const TensorT<T>& img) {
  TensorT<T> out(img.h, img.w, img.c);
  for (int y = 0; y + 1 < img.h; ++y)
    for (int x = 0; x < img.w; ++x)
      for (int ch = 0; ch < img.c; ++ch)
        out.at(y, x, ch) = img.at(y + 1, x, ch) - img.at(y, x, ch);
  return out;
}

template <class T>
GradientPairT<T> gradient_pair(const TensorT<T>& img) {
  return {tensor_grad_h(img), tensor_grad_v(img)};
}

namespace {

template <class T>
void check_spatial(Graph<T>& g, int a, int b, const char* where) {
  const auto& av = g.val(a);
  const auto& bv = g.val(b);
  if (av.h != bv.h || av.w != bv.w)
    throw ShapeError(std::string(where) + ": spatial mismatch " +
                     av.shape_str() + " vs " + bv.shape_str());
}

template <class T>
int mean_abs_diff(Graph<T>& g, int a, int b) {
  return g.mean_all(g.abs(g.sub(a, b)));
}

}  // namespace

template <class T>
int recon_loss_decom(Graph<T>& g, int R_low, int I_low, int S_low, int R_high,
                     int I_high, int S_high, const LossConfig& cfg) {
  check_spatial(g, R_low, S_low, "recon_loss_decom");
  check_spatial(g, R_high, S_high, "recon_loss_decom");
  check_spatial(g, R_low, I_low, "recon_loss_decom");
  check_spatial(g, R_high, I_high, "recon_loss_decom");
  auto term = [&](int R, int I, int S) {
    return g.mean_all(g.abs(g.sub(g.mul(R, I), S)));
  };
  const T same = T(cfg.lambda_ij_same);
  const T cross = T(cfg.lambda_ij_cross);
  return g.weighted_sum({{term(R_low, I_low, S_low), same},
                         {term(R_high, I_high, S_high), same},
                         {term(R_low, I_high, S_high), cross},
                         {term(R_high, I_low, S_low), cross}});
}

template <class T>
int equal_loss(Graph<T>& g, int R_low, int R_high) {
  check_spatial(g, R_low, R_high, "equal_loss");
  return mean_abs_diff(g, R_low, g.detach(R_high));
}

template <class T>
int smooth_loss_single(Graph<T>& g, int I, int R, const LossConfig& cfg) {
  check_spatial(g, I, R, "smooth_loss");
  const int rbar = g.channel_mean(R);
  const T neg_lambda = T(-cfg.smooth_lambda);
  auto directional = [&](bool horizontal) {
    const int gi = horizontal ? g.grad_h(I) : g.grad_v(I);
    const int gr = horizontal ? g.grad_h(rbar) : g.grad_v(rbar);
    const int weight = g.exp(g.scale(g.abs(gr), neg_lambda));
    return g.mean_all(g.abs(g.mul(gi, weight)));
  };
  return g.add(directional(true), directional(false));
}

template <class T>
int smooth_loss(Graph<T>& g, int I_low, int R_low, int I_high, int R_high,
                const LossConfig& cfg) {
  return g.add(smooth_loss_single(g, I_low, R_low, cfg),
               smooth_loss_single(g, I_high, R_high, cfg));
}

template <class T>
int da_mse_loss(Graph<T>& g, int R_low, int R_high) {
  check_spatial(g, R_low, R_high, "da_mse_loss");
  return g.mean_all(g.square(g.sub(R_low, g.detach(R_high))));
}

template <class T>
int da_tv_loss(Graph<T>& g, int F_low) {
  return g.add(g.mean_all(g.square(g.grad_h(F_low))),
               g.mean_all(g.square(g.grad_v(F_low))));
}

template <class T>
int da_l1_loss(Graph<T>& g, int F_low, int F_high) {
  check_spatial(g, F_low, F_high, "da_l1_loss");
  return mean_abs_diff(g, F_low, g.detach(F_high));
}

template <class T>
int da_loss(Graph<T>& g, int R_low, int R_high, const BoundParams<T>& da_params,
            const DaConfig& da_cfg, const LossConfig& cfg) {
  const int f_low = da_forward(g, da_params, da_cfg, R_low);
  const int f_high =
      g.detach(da_forward(g, da_params, da_cfg, g.detach(R_high)));
  const int tv = da_tv_loss(g, f_low);
  const int mse = da_mse_loss(g, R_low, R_high);
  const int l1 = da_l1_loss(g, f_low, f_high);
  return g.weighted_sum({{tv, T(cfg.lambda_tv * cfg.da_tv_coeff)},
                         {mse, T(cfg.lambda_tv * cfg.da_mse_coeff)},
                         {l1, T(cfg.da_l1_coeff)}});
}

template <class T>
DecomLossTerms<T> decom_total_loss(Graph<T>& g, int R_low, int I_low,
                                   int S_low, int R_high, int I_high,
                                   int S_high, const BoundParams<T>& da_params,
                                   const DaConfig& da_cfg,
                                   const LossConfig& cfg) {
  DecomLossTerms<T> terms;
  terms.rc = recon_loss_decom(g, R_low, I_low, S_low, R_high, I_high, S_high,
                              cfg);
  terms.smooth = smooth_loss(g, I_low, R_low, I_high, R_high, cfg);
  terms.equal = equal_loss(g, R_low, R_high);
  terms.da = da_loss(g, R_low, R_high, da_params, da_cfg, cfg);
  terms.total = g.weighted_sum({{terms.rc, T(cfg.w_rc)},
                                {terms.smooth, T(cfg.w_smooth)},
                                {terms.equal, T(cfg.w_equal)},
                                {terms.da, T(cfg.w_da)}});
  return terms;
}

template <class T>
int recon_loss_enh(Graph<T>& g, int R_low, int I_output, int S_high) {
  check_spatial(g, R_low, I_output, "recon_loss_enh");
  check_spatial(g, R_low, S_high, "recon_loss_enh");
  return g.mean_all(g.abs(g.sub(g.mul(R_low, I_output), S_high)));
}

template <class T>
int brighten_loss(Graph<T>& g, int I_output, int I_high) {
  require_same_shape(g.val(I_output), g.val(I_high), "brighten_loss");
  return mean_abs_diff(g, I_output, g.detach(I_high));
}

template <class T>
int perceptual_loss(Graph<T>& g, int R_low, int I_output, int S_high,
                    const BoundParams<T>& vgg_params, const VggConfig& vgg_cfg,
                    const LossConfig& cfg) {
  check_spatial(g, R_low, S_high, "perceptual_loss");
  const int in_h = g.val(S_high).h;
  const int in_w = g.val(S_high).w;
  const int in_c = g.val(S_high).c;
  const int multiple = vgg_cfg.input_multiple();
  if (in_h < multiple || in_w < multiple)
    throw ShapeError("perceptual_loss: input " + std::to_string(in_h) + "x" +
                     std::to_string(in_w) + " smaller than " +
                     std::to_string(multiple) + "x" +
                     std::to_string(multiple));
  const int pred = g.mul(R_low, I_output);
  const int f_pred = vgg16_forward(g, vgg_params, vgg_cfg, pred);
  const int f_gt =
      g.detach(vgg16_forward(g, vgg_params, vgg_cfg, g.detach(S_high)));
  const int sq = g.square(g.sub(f_pred, f_gt));
  const int feature_mean = g.mean_all(sq);
  if (cfg.per_norm == LossConfig::PerceptualNorm::Feature) return feature_mean;
  // Published form divides the summed squared feature distance by the
  // input image's C*H*W rather than the feature count.
  const double ratio = double(g.val(sq).size()) /
                       (double(in_h) * double(in_w) * double(in_c));
  return g.scale(feature_mean, T(ratio));
}

template <class T>
int gradient_loss(Graph<T>& g, int R_low, int I_output, int S_high) {
  check_spatial(g, R_low, I_output, "gradient_loss");
  check_spatial(g, R_low, S_high, "gradient_loss");
  const int pred = g.mul(R_low, I_output);
  const int h_term = mean_abs_diff(g, g.grad_h(pred), g.grad_h(S_high));
  const int v_term = mean_abs_diff(g, g.grad_v(pred), g.grad_v(S_high));
  return g.add(h_term, v_term);
}

template <class T>
EnhLossTerms<T> enh_total_loss(Graph<T>& g, int R_low, int I_output,
                               int S_high, int I_high,
                               const BoundParams<T>& vgg_params,
                               const VggConfig& vgg_cfg,
                               const LossConfig& cfg) {
  EnhLossTerms<T> terms;
  terms.rc = recon_loss_enh(g, R_low, I_output, S_high);
  terms.bri = brighten_loss(g, I_output, I_high);
  terms.per = perceptual_loss(g, R_low, I_output, S_high, vgg_params, vgg_cfg,
                              cfg);
  terms.grad = gradient_loss(g, R_low, I_output, S_high);
  terms.total = g.weighted_sum({{terms.rc, T(cfg.w_rc_e)},
                                {terms.bri, T(cfg.w_bri)},
                                {terms.per, T(cfg.w_per)},
                                {terms.grad, T(cfg.w_grad)}});
  return terms;
}

// --- explicit instantiations ----------------------------------------------

#define LLE_INSTANTIATE_LOSSES(T)                                             \
  template TensorT<T> tensor_grad_h<T>(const TensorT<T>&);                    \
  template TensorT<T> tensor_grad_v<T>(const TensorT<T>&);                    \
  template GradientPairT<T> gradient_pair<T>(const TensorT<T>&);              \
  template int recon_loss_decom<T>(Graph<T>&, int, int, int, int, int, int,   \
                                   const LossConfig&);                        \
  template int equal_loss<T>(Graph<T>&, int, int);                            \
  template int smooth_loss_single<T>(Graph<T>&, int, int, const LossConfig&); \
  template int smooth_loss<T>(Graph<T>&, int, int, int, int,                  \
                              const LossConfig&);                             \
  template int da_mse_loss<T>(Graph<T>&, int, int);                           \
  template int da_tv_loss<T>(Graph<T>&, int);                                 \
  template int da_l1_loss<T>(Graph<T>&, int, int);                            \
  template int da_loss<T>(Graph<T>&, int, int, const BoundParams<T>&,         \
                          const DaConfig&, const LossConfig&);                 \
  template DecomLossTerms<T> decom_total_loss<T>(                             \
      Graph<T>&, int, int, int, int, int, int, const BoundParams<T>&,         \
      const DaConfig&, const LossConfig&);                                    \
  template int recon_loss_enh<T>(Graph<T>&, int, int, int);                   \
  template int brighten_loss<T>(Graph<T>&, int, int);                         \
  template int perceptual_loss<T>(Graph<T>&, int, int, int,                   \
                                  const BoundParams<T>&, const VggConfig&,    \
                                  const LossConfig&);                         \
  template int gradient_loss<T>(Graph<T>&, int, int, int);                    \
  template EnhLossTerms<T> enh_total_loss<T>(                                 \
      Graph<T>&, int, int, int, int, const BoundParams<T>&, const VggConfig&, \
      const LossConfig&);

LLE_INSTANTIATE_LOSSES(float)
LLE_INSTANTIATE_LOSSES(double)

#undef LLE_INSTANTIATE_LOSSES

}  // namespace lle

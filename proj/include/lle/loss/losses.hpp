#pragma once

#include "lle/core/graph.hpp"
#include "lle/nets/da_net.hpp"
#include "lle/nets/vgg16.hpp"

namespace lle {

// All losses are mean-reduced scalars built inside a Graph, so analytic
// gradients come from the tape. Functions taking a "high" target detach it;
// gradients flow through the low/predicted branch only. The exception is
// the decomposition reconstruction and smoothness losses, where the high
// branch is itself a decomposer output that must keep learning.
struct LossConfig {
  // reconstruction mixing: 1 on the diagonal, 0.001 across
  double lambda_ij_same = 1.0;
  double lambda_ij_cross = 0.001;
  // smoothness edge-weight exponent
  double smooth_lambda = 10.0;
  // outer coefficient of the TV+MSE group (0.2 real / 0.05 synthetic)
  double lambda_tv = 0.2;
  // DA inner weights
  double da_tv_coeff = 0.05;
  double da_mse_coeff = 1.0;
  double da_l1_coeff = 0.1;
  // decomposition total
  double w_rc = 1.0;
  double w_smooth = 0.1;
  double w_equal = 0.01;
  double w_da = 1.0;
  // enhancement total
  double w_rc_e = 1.0;
  double w_bri = 1.0;
  double w_per = 1.0;
  double w_grad = 1.0;
  // Eq-style normalization of the perceptual term: by the input image's
  // C*H*W (as published) or by the feature map's own element count.
  enum class PerceptualNorm { Input, Feature } per_norm = PerceptualNorm::Input;

  void validate() const;
};

// Forward differences with a zero final column/row.
template <class T>
TensorT<T> tensor_grad_h(const TensorT<T>& img);
template <class T>
TensorT<T> tensor_grad_v(const TensorT<T>& img);

template <class T>
struct GradientPairT {
  TensorT<T> dh;
  TensorT<T> dv;
};
template <class T>
GradientPairT<T> gradient_pair(const TensorT<T>& img);

// --- decomposition-phase losses -----------------------------------------
template <class T>
int recon_loss_decom(Graph<T>& g, int R_low, int I_low, int S_low, int R_high,
                     int I_high, int S_high, const LossConfig& cfg);
template <class T>
int equal_loss(Graph<T>& g, int R_low, int R_high);
template <class T>
int smooth_loss_single(Graph<T>& g, int I, int R, const LossConfig& cfg);
template <class T>
int smooth_loss(Graph<T>& g, int I_low, int R_low, int I_high, int R_high,
                const LossConfig& cfg);
template <class T>
int da_mse_loss(Graph<T>& g, int R_low, int R_high);
template <class T>
int da_tv_loss(Graph<T>& g, int F_low);
template <class T>
int da_l1_loss(Graph<T>& g, int F_low, int F_high);
template <class T>
int da_loss(Graph<T>& g, int R_low, int R_high, const BoundParams<T>& da_params,
            const DaConfig& da_cfg, const LossConfig& cfg);

template <class T>
struct DecomLossTerms {
  int rc = -1;
  int smooth = -1;
  int equal = -1;
  int da = -1;
  int total = -1;
};
template <class T>
DecomLossTerms<T> decom_total_loss(Graph<T>& g, int R_low, int I_low,
                                   int S_low, int R_high, int I_high,
                                   int S_high, const BoundParams<T>& da_params,
                                   const DaConfig& da_cfg,
                                   const LossConfig& cfg);

// --- enhancement-phase losses -------------------------------------------
template <class T>
int recon_loss_enh(Graph<T>& g, int R_low, int I_output, int S_high);
template <class T>
int brighten_loss(Graph<T>& g, int I_output, int I_high);
template <class T>
int perceptual_loss(Graph<T>& g, int R_low, int I_output, int S_high,
                    const BoundParams<T>& vgg_params, const VggConfig& vgg_cfg,
                    const LossConfig& cfg);
template <class T>
int gradient_loss(Graph<T>& g, int R_low, int I_output, int S_high);

template <class T>
struct EnhLossTerms {
  int rc = -1;
  int bri = -1;
  int per = -1;
  int grad = -1;
  int total = -1;
};
template <class T>
EnhLossTerms<T> enh_total_loss(Graph<T>& g, int R_low, int I_output,
                               int S_high, int I_high,
                               const BoundParams<T>& vgg_params,
                               const VggConfig& vgg_cfg, const LossConfig& cfg);

}  // namespace lle

#pragma once

// Tape-based reverse-mode autodiff over TensorT<T>. A Graph owns the nodes
// of one forward pass; backward() walks the tape in reverse creation order.
// Instantiated for float (training, SIMD-dispatched inner loops) and for
// double (scalar path used by the finite-difference gradient checks).

#include <deque>
#include <functional>
#include <memory>
#include <vector>

#include "lle/core/tensor.hpp"
#include "lle/simd/kernels.hpp"

namespace lle {

template <class T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&)>;

  int leaf(TensorT<T> value, bool requires_grad = false);

  // Nodes live in a deque so val() references stay valid while further ops
  // are appended.
  const TensorT<T>& val(int id) const { return nodes_[id].value; }
  // Zero tensor of the node's shape when no gradient flowed to it.
  TensorT<T> grad_of(int id) const;
  bool needs_grad(int id) const { return nodes_[id].requires_grad; }
  T scalar(int id) const { return nodes_[id].value.data[0]; }

  // Seeds d(root)/d(root) = 1 and runs the tape. root must be 1x1x1.
  void backward(int root);

  // --- ops ---------------------------------------------------------------
  int conv2d(int x, int w, int b, int kh, int kw, int stride, int pad);
  int leaky_relu(int x, T slope);
  int relu(int x);
  int sigmoid(int x);
  int upsample_nearest2(int x);
  int maxpool2(int x);
  int concat_c(int a, int b);
  int slice_c(int x, int c0, int c1);
  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);  // broadcasts a 1-channel side across the other
  int scale(int x, T s);
  int abs(int x);
  int square(int x);
  int exp(int x);
  int grad_h(int x);
  int grad_v(int x);
  int channel_mean(int x);
  int mean_all(int x);
  int detach(int x);
  int affine_c(int x, std::vector<T> mul_c, std::vector<T> add_c);
  int weighted_sum(const std::vector<std::pair<int, T>>& terms);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    TensorT<T> value;
    TensorT<T> grad;
    BackwardFn backward;
    bool requires_grad = false;
    bool grad_alloc = false;
  };

  int make(TensorT<T> value, bool requires_grad, BackwardFn fn);
  TensorT<T>& gbuf(int id);

  std::deque<Node> nodes_;
};

using GraphF = Graph<float>;
using GraphD = Graph<double>;

}  // namespace lle

#include "lle/core/graph_impl.hpp"

#include "lle/core/errors.hpp"
#include "lle/pipeline/pipeline.hpp"

namespace lle {

ImageTensor make_grid(const std::vector<ImageTensor>& panels,
                      const std::vector<std::string>& labels) {
  if (panels.empty()) throw DataError("make_grid: no panels");
  if (labels.size() != panels.size())
    throw DataError("make_grid: label count mismatch");
  constexpr int kGap = 4;
  int height = 0, width = 0;
  for (const auto& panel : panels) {
    height = std::max(height, panel.h());
    width += panel.w();
  }
  width += kGap * int(panels.size() - 1);

  ImageTensor out;
  out.color_space = ColorSpace::Srgb;
  out.tensor = Tensor(height, width, 3);
  int x0 = 0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const ImageTensor labeled = annotate_image(panels[i], labels[i]);
    for (int y = 0; y < labeled.h(); ++y)
      for (int x = 0; x < labeled.w(); ++x)
        for (int ch = 0; ch < 3; ++ch)
          out.tensor.at(y, x0 + x, ch) = labeled.tensor.at(y, x, ch);
    x0 += panels[i].w() + kGap;
  }
  return out;
}

}  // namespace lle

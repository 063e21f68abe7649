#include "lle/nets/pad.hpp"

#include "lle/core/errors.hpp"

namespace lle {

namespace {

int mirror_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace

std::pair<ImageTensor, CropRecord> pad_to_multiple(const ImageTensor& img,
                                                   int m) {
  if (m < 1) throw ConfigError("pad_to_multiple: m must be >= 1");
  const Tensor& src = img.tensor;
  const CropRecord record{src.h, src.w};
  const int ph = (src.h + m - 1) / m * m;
  const int pw = (src.w + m - 1) / m * m;
  if (ph == src.h && pw == src.w) return {img, record};

  ImageTensor out;
  out.color_space = img.color_space;
  out.tensor = Tensor(ph, pw, src.c);
  for (int y = 0; y < ph; ++y) {
    const int sy = mirror_index(y, src.h);
    for (int x = 0; x < pw; ++x) {
      const int sx = mirror_index(x, src.w);
      for (int ch = 0; ch < src.c; ++ch)
        out.tensor.at(y, x, ch) = src.at(sy, sx, ch);
    }
  }
  return {std::move(out), record};
}

ImageTensor crop_back(const ImageTensor& img, const CropRecord& record) {
  const Tensor& src = img.tensor;
  if (record.orig_h > src.h || record.orig_w > src.w)
    throw ShapeError("crop_back: record larger than image");
  if (record.orig_h == src.h && record.orig_w == src.w) return img;
  ImageTensor out;
  out.color_space = img.color_space;
  out.tensor = Tensor(record.orig_h, record.orig_w, src.c);
  for (int y = 0; y < record.orig_h; ++y)
    for (int x = 0; x < record.orig_w; ++x)
      for (int ch = 0; ch < src.c; ++ch)
        out.tensor.at(y, x, ch) = src.at(y, x, ch);
  return out;
}

}  // namespace lle

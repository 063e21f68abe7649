#pragma once

#include "lle/image/image.hpp"

namespace lle {

struct CropRecord {
  int orig_h = 0;
  int orig_w = 0;
};

// Mirror padding (edge included) on the bottom/right up to the next
// multiple of m; crop_back inverts exactly.
std::pair<ImageTensor, CropRecord> pad_to_multiple(const ImageTensor& img,
                                                   int m);
ImageTensor crop_back(const ImageTensor& img, const CropRecord& record);

}  // namespace lle

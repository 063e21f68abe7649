// PNG/JPEG codec access goes through OpenCV's imgcodecs; everything else in
// the project works on plain float tensors.

#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "lle/core/errors.hpp"
#include "lle/image/image.hpp"

namespace lle {

ImageTensor load_image(const std::filesystem::path& path) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty())
    throw IoError("load_image: cannot read " + path.string());
  if (raw.depth() != CV_8U)
    throw FormatError("load_image: " + path.string() +
                      " is not 8-bit (16-bit and float inputs are rejected)");
  cv::Mat rgb;
  switch (raw.channels()) {
    case 1:
      cv::cvtColor(raw, rgb, cv::COLOR_GRAY2RGB);
      break;
    case 3:
      cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB);
      break;
    case 4:
      cv::cvtColor(raw, rgb, cv::COLOR_BGRA2RGB);
      break;
    default:
      throw FormatError("load_image: unsupported channel count " +
                        std::to_string(raw.channels()));
  }

  ImageTensor out;
  out.color_space = ColorSpace::Srgb;
  out.tensor = Tensor(rgb.rows, rgb.cols, 3);
  for (int y = 0; y < rgb.rows; ++y) {
    const std::uint8_t* row = rgb.ptr<std::uint8_t>(y);
    float* dst = &out.tensor.data[std::size_t(y) * rgb.cols * 3];
    for (int i = 0; i < rgb.cols * 3; ++i) dst[i] = float(row[i]) / 255.0f;
  }
  return out;
}

void save_image(const ImageTensor& img, const std::filesystem::path& path) {
  const Tensor& t = img.tensor;
  if (t.c != 1 && t.c != 3)
    throw ShapeError("save_image: expected 1 or 3 channels, got " +
                     std::to_string(t.c));
  cv::Mat mat(t.h, t.w, t.c == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < t.h; ++y) {
    std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    const float* src = &t.data[std::size_t(y) * t.w * t.c];
    if (t.c == 1) {
      for (int x = 0; x < t.w; ++x) {
        const float v = std::min(1.0f, std::max(0.0f, src[x]));
        row[x] = std::uint8_t(std::floor(v * 255.0f + 0.5f));  // half-up
      }
    } else {
      for (int x = 0; x < t.w; ++x) {
        for (int ch = 0; ch < 3; ++ch) {
          const float v = std::min(1.0f, std::max(0.0f, src[x * 3 + ch]));
          row[x * 3 + (2 - ch)] =  // RGB -> BGR
              std::uint8_t(std::floor(v * 255.0f + 0.5f));
        }
      }
    }
  }
  // Always encode PNG, independent of the path's extension.
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", mat, buf))
    throw IoError("save_image: PNG encoding failed");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_image: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()),
            std::streamsize(buf.size()));
  if (!out) throw IoError("save_image: write failed for " + path.string());
}

ImageTensor annotate_image(const ImageTensor& img, const std::string& text) {
  const Tensor& t = img.tensor;
  cv::Mat mat(t.h, t.w, CV_32FC3);
  for (int y = 0; y < t.h; ++y) {
    float* row = mat.ptr<float>(y);
    const float* src = &t.data[std::size_t(y) * t.w * t.c];
    for (int x = 0; x < t.w; ++x)
      for (int ch = 0; ch < 3; ++ch)
        row[x * 3 + ch] = t.c == 1 ? src[x] : src[x * 3 + ch];
  }
  const double scale = std::max(0.4, t.w / 800.0);
  const int thickness = std::max(1, int(scale * 2));
  const cv::Point org(6, int(22 * scale) + 4);
  cv::putText(mat, text, org, cv::FONT_HERSHEY_SIMPLEX, scale,
              cv::Scalar(0, 0, 0), thickness + 2, cv::LINE_AA);
  cv::putText(mat, text, org, cv::FONT_HERSHEY_SIMPLEX, scale,
              cv::Scalar(1, 1, 1), thickness, cv::LINE_AA);

  ImageTensor out;
  out.color_space = img.color_space;
  out.tensor = Tensor(t.h, t.w, 3);
  for (int y = 0; y < t.h; ++y) {
    const float* row = mat.ptr<float>(y);
    float* dst = &out.tensor.data[std::size_t(y) * t.w * 3];
    for (int i = 0; i < t.w * 3; ++i) dst[i] = row[i];
  }
  return out;
}

}  // namespace lle

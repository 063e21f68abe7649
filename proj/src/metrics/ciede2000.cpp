// CIEDE2000 with kL = kC = kH = 1, following the Sharma/Wu/Dalal
// implementation notes; validated against the published 34-pair dataset.

#include <cmath>

#include "lle/metrics/metrics.hpp"

namespace lle {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPow25To7 = 6103515625.0;  // 25^7

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace

double ciede2000(const double lab1[3], const double lab2[3]) {
  const double l1 = lab1[0], a1 = lab1[1], b1 = lab1[2];
  const double l2 = lab2[0], a2 = lab2[1], b2 = lab2[2];

  const double c1 = std::sqrt(a1 * a1 + b1 * b1);
  const double c2 = std::sqrt(a2 * a2 + b2 * b2);
  const double c_avg = 0.5 * (c1 + c2);
  const double c_avg7 = std::pow(c_avg, 7.0);
  const double g = 0.5 * (1.0 - std::sqrt(c_avg7 / (c_avg7 + kPow25To7)));

  const double a1p = (1.0 + g) * a1;
  const double a2p = (1.0 + g) * a2;
  const double c1p = std::sqrt(a1p * a1p + b1 * b1);
  const double c2p = std::sqrt(a2p * a2p + b2 * b2);

  auto hue = [](double ap, double b) {
    if (ap == 0.0 && b == 0.0) return 0.0;
    double h = rad2deg(std::atan2(b, ap));
    if (h < 0.0) h += 360.0;
    return h;
  };
  const double h1p = hue(a1p, b1);
  const double h2p = hue(a2p, b2);

  const double dlp = l2 - l1;
  const double dcp = c2p - c1p;

  double dhp_angle = 0.0;
  if (c1p * c2p != 0.0) {
    dhp_angle = h2p - h1p;
    if (dhp_angle > 180.0) dhp_angle -= 360.0;
    else if (dhp_angle < -180.0) dhp_angle += 360.0;
  }
  const double dhp = 2.0 * std::sqrt(c1p * c2p) *
                     std::sin(deg2rad(dhp_angle) / 2.0);

  const double l_avg = 0.5 * (l1 + l2);
  const double cp_avg = 0.5 * (c1p + c2p);

  double hp_avg = h1p + h2p;
  if (c1p * c2p != 0.0) {
    if (std::abs(h1p - h2p) > 180.0) {
      if (hp_avg < 360.0) hp_avg += 360.0;
      else hp_avg -= 360.0;
    }
    hp_avg *= 0.5;
  }

  const double t = 1.0 - 0.17 * std::cos(deg2rad(hp_avg - 30.0)) +
                   0.24 * std::cos(deg2rad(2.0 * hp_avg)) +
                   0.32 * std::cos(deg2rad(3.0 * hp_avg + 6.0)) -
                   0.20 * std::cos(deg2rad(4.0 * hp_avg - 63.0));

  const double d_theta = 30.0 * std::exp(-((hp_avg - 275.0) / 25.0) *
                                         ((hp_avg - 275.0) / 25.0));
  const double cp_avg7 = std::pow(cp_avg, 7.0);
  const double rc = 2.0 * std::sqrt(cp_avg7 / (cp_avg7 + kPow25To7));
  const double rt = -std::sin(deg2rad(2.0 * d_theta)) * rc;

  const double l_avg50 = (l_avg - 50.0) * (l_avg - 50.0);
  const double sl = 1.0 + 0.015 * l_avg50 / std::sqrt(20.0 + l_avg50);
  const double sc = 1.0 + 0.045 * cp_avg;
  const double sh = 1.0 + 0.015 * cp_avg * t;

  const double term_l = dlp / sl;
  const double term_c = dcp / sc;
  const double term_h = dhp / sh;
  return std::sqrt(term_l * term_l + term_c * term_c + term_h * term_h +
                   rt * term_c * term_h);
}

}  // namespace lle

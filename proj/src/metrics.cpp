#include "rdh/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "rdh/error.hpp"

namespace rdh {

double entropy(const ErrorHistogram& hist) {
  if (hist.empty()) throw Error("entropy of an empty histogram");
  const double total = static_cast<double>(hist.total());
  double h = 0.0;
  for (int e = kMinError; e <= kMaxError; ++e) {
    const auto c = hist.count(e);
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error("psnr: image dimensions differ");
  }
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const int d = static_cast<int>(pa[i]) - static_cast<int>(pb[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  if (sse == 0) return kInfinitePsnr;
  const double mse = static_cast<double>(sse) / static_cast<double>(pa.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::string format_psnr(double db) {
  if (std::isinf(db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", db);
  return buf;
}

}  // namespace rdh

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>

namespace rdh {

inline constexpr int kMinError = -255;
inline constexpr int kMaxError = 255;

/// Prediction-error counts over [kMinError, kMaxError].
class ErrorHistogram {
 public:
  void add(int error, std::int64_t count = 1);
  std::int64_t count(int error) const;
  std::int64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }

 private:
  static constexpr std::size_t kBins = kMaxError - kMinError + 1;
  std::array<std::int64_t, kBins> counts_{};
  std::int64_t total_ = 0;
};

/// Embedding bins. An absent side embeds nothing and shifts nothing.
struct BinPair {
  std::optional<int> neg;  // <= -1
  std::optional<int> pos;  // >= 0
  bool operator==(const BinPair&) const = default;
};

std::int64_t capacity(const ErrorHistogram& hist, const BinPair& bins);
/// Pixels moved by one without carrying data: errors beyond a used bin.
std::int64_t shifted_count(const ErrorHistogram& hist, const BinPair& bins);

ErrorHistogram build_histogram(std::span<const int> errors);
/// Counts errors[i] only where participates[i] is non-zero.
ErrorHistogram build_histogram(std::span<const int> errors, std::span<const std::uint8_t> participates);

/// Bin pair with capacity >= payload_bits that shifts the fewest pixels. Ties
/// keep the first candidate in the order pos = {none, 0, 1, ...} (outer) and
/// neg = {none, -1, -2, ...} (inner). Throws CapacityError when even the two
/// peak bins are too small.
BinPair select_bins(const ErrorHistogram& hist, std::int64_t payload_bits);

/// The largest-capacity pair: the tallest negative and non-negative bins.
BinPair peak_bins(const ErrorHistogram& hist);

/// Shift/embed rule; `bit` is used only when `error` sits on a used bin.
int embed_value(int error, const BinPair& bins, int bit);

struct ExtractedValue {
  int error = 0;
  std::optional<int> bit;
  bool operator==(const ExtractedValue&) const = default;
};

ExtractedValue extract_value(int marked_error, const BinPair& bins);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct EmbedPlan {
  int threshold = 0;
  BinPair bins;
  std::int64_t capacity = 0;
  std::int64_t modified_pixels = 0;  // pixels changed by one in this pass
  double predicted_psnr = kInfinitePsnr;
};

struct PlanRequest {
  std::int64_t payload_bits = 0;
  std::int64_t payload_ones = 0;  // ones among the payload bits
  std::int64_t image_pixels = 0;  // denominator of the pass MSE
  std::optional<int> threshold_max;
  bool pixel_selection = true;  // false: plain dynamic shifting over every pixel
};

/// Pixel-selection threshold sweep. `errors` and `smoothness` are aligned with
/// the pass traversal. T runs from 0 upward; at each T the pixels with
/// smoothness <= T form a histogram, bins are selected, and the exact PSNR of
/// the resulting pass is evaluated. The sweep keeps the best plan seen before
/// the first PSNR decrease (ties keep the smaller T); the plan at the sweep
/// limit replaces it when strictly better. Throws CapacityError when no T up
/// to the sweep limit can hold the payload.
EmbedPlan greedy_plan(std::span<const int> errors, std::span<const int> smoothness,
                      const PlanRequest& request);

/// 10 * log10(255^2 * pixels / modified) for unit changes.
double psnr_from_modified(std::int64_t modified, std::int64_t pixels);

}  // namespace rdh

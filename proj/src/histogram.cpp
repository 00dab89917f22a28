#include "rdh/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rdh/error.hpp"

namespace rdh {

void ErrorHistogram::add(int error, std::int64_t count) {
  if (error < kMinError || error > kMaxError) {
    throw Error("prediction error " + std::to_string(error) + " outside histogram support");
  }
  counts_[static_cast<std::size_t>(error - kMinError)] += count;
  total_ += count;
}

std::int64_t ErrorHistogram::count(int error) const {
  if (error < kMinError || error > kMaxError) return 0;
  return counts_[static_cast<std::size_t>(error - kMinError)];
}

std::int64_t capacity(const ErrorHistogram& hist, const BinPair& bins) {
  return (bins.neg ? hist.count(*bins.neg) : 0) + (bins.pos ? hist.count(*bins.pos) : 0);
}

std::int64_t shifted_count(const ErrorHistogram& hist, const BinPair& bins) {
  std::int64_t shifted = 0;
  if (bins.pos) {
    for (int e = *bins.pos + 1; e <= kMaxError; ++e) shifted += hist.count(e);
  }
  if (bins.neg) {
    for (int e = kMinError; e < *bins.neg; ++e) shifted += hist.count(e);
  }
  return shifted;
}

ErrorHistogram build_histogram(std::span<const int> errors) {
  ErrorHistogram hist;
  for (int e : errors) hist.add(e);
  return hist;
}

ErrorHistogram build_histogram(std::span<const int> errors, std::span<const std::uint8_t> participates) {
  if (errors.size() != participates.size()) throw Error("participation mask length mismatch");
  ErrorHistogram hist;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (participates[i] != 0) hist.add(errors[i]);
  }
  return hist;
}

BinPair peak_bins(const ErrorHistogram& hist) {
  BinPair bins;
  std::int64_t best_pos = 0;
  for (int e = 0; e <= kMaxError; ++e) {
    if (hist.count(e) > best_pos) {
      best_pos = hist.count(e);
      bins.pos = e;
    }
  }
  std::int64_t best_neg = 0;
  for (int e = -1; e >= kMinError; --e) {
    if (hist.count(e) > best_neg) {
      best_neg = hist.count(e);
      bins.neg = e;
    }
  }
  return bins;
}

namespace {

// Cheapest feasible pair, or nullopt. Candidates run pos = {none, 0..255} in
// the outer loop and neg = {none, -1..-255} inside; the first strict minimum
// of the shifted count wins.
std::optional<BinPair> cheapest_pair(const ErrorHistogram& hist, std::int64_t payload_bits) {
  constexpr int kSide = kMaxError + 1;
  // above[p] = count of errors > p; below[k] = count of errors < -(k+1).
  std::vector<std::int64_t> above(kSide, 0);
  std::vector<std::int64_t> below(kSide, 0);
  std::int64_t acc = 0;
  for (int e = kMaxError; e >= 0; --e) {
    above[static_cast<std::size_t>(e)] = acc;
    acc += hist.count(e);
  }
  acc = 0;
  for (int e = kMinError; e <= -1; ++e) {
    below[static_cast<std::size_t>(-e - 1)] = acc;
    acc += hist.count(e);
  }

  std::optional<BinPair> best;
  std::int64_t best_cost = 0;
  for (int p = -1; p <= kMaxError; ++p) {
    const std::int64_t cap_pos = p < 0 ? 0 : hist.count(p);
    const std::int64_t shift_pos = p < 0 ? 0 : above[static_cast<std::size_t>(p)];
    if (best && shift_pos >= best_cost) continue;
    for (int k = -1; k <= -kMinError - 1; ++k) {
      const int neg = -(k + 1);
      const std::int64_t cap_neg = k < 0 ? 0 : hist.count(neg);
      if (cap_pos + cap_neg < payload_bits) continue;
      const std::int64_t cost = shift_pos + (k < 0 ? 0 : below[static_cast<std::size_t>(k)]);
      if (!best || cost < best_cost) {
        BinPair bins;
        if (p >= 0) bins.pos = p;
        if (k >= 0) bins.neg = neg;
        best = bins;
        best_cost = cost;
      }
    }
  }
  return best;
}

}  // namespace

BinPair select_bins(const ErrorHistogram& hist, std::int64_t payload_bits) {
  if (payload_bits < 0) throw Error("payload size must be non-negative");
  auto best = cheapest_pair(hist, payload_bits);
  if (!best) {
    const std::int64_t max_cap = capacity(hist, peak_bins(hist));
    throw CapacityError("insufficient capacity: " + std::to_string(payload_bits) +
                            " bits requested, peak bins hold " + std::to_string(max_cap),
                        static_cast<std::size_t>(max_cap));
  }
  return *best;
}

int embed_value(int error, const BinPair& bins, int bit) {
  if (bins.pos) {
    if (error == *bins.pos) {
      if (bit != 0 && bit != 1) throw Error("embedded bit must be 0 or 1");
      return error + bit;
    }
    if (error > *bins.pos) return error + 1;
  }
  if (bins.neg) {
    if (error == *bins.neg) {
      if (bit != 0 && bit != 1) throw Error("embedded bit must be 0 or 1");
      return error - bit;
    }
    if (error < *bins.neg) return error - 1;
  }
  return error;
}

ExtractedValue extract_value(int marked_error, const BinPair& bins) {
  if (bins.pos) {
    const int p = *bins.pos;
    if (marked_error == p || marked_error == p + 1) return {p, marked_error - p};
    if (marked_error > p + 1) return {marked_error - 1, std::nullopt};
  }
  if (bins.neg) {
    const int q = *bins.neg;
    if (marked_error == q || marked_error == q - 1) return {q, q - marked_error};
    if (marked_error < q - 1) return {marked_error + 1, std::nullopt};
  }
  return {marked_error, std::nullopt};
}

double psnr_from_modified(std::int64_t modified, std::int64_t pixels) {
  if (modified <= 0) return kInfinitePsnr;
  const double mse = static_cast<double>(modified) / static_cast<double>(pixels);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

EmbedPlan greedy_plan(std::span<const int> errors, std::span<const int> smoothness,
                      const PlanRequest& request) {
  if (errors.size() != smoothness.size()) throw Error("errors and smoothness length mismatch");
  if (request.payload_bits < 0 || request.payload_ones < 0 ||
      request.payload_ones > request.payload_bits) {
    throw Error("invalid payload statistics");
  }
  const std::int64_t pixels =
      request.image_pixels > 0 ? request.image_pixels : static_cast<std::int64_t>(errors.size());
  const int observed_max =
      smoothness.empty() ? 0 : *std::max_element(smoothness.begin(), smoothness.end());
  int limit = observed_max;
  if (request.threshold_max) limit = std::clamp(*request.threshold_max, 0, observed_max);

  std::vector<std::size_t> order(errors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return smoothness[a] < smoothness[b]; });

  auto evaluate = [&](const ErrorHistogram& hist, int threshold) -> std::optional<EmbedPlan> {
    auto bins = cheapest_pair(hist, request.payload_bits);
    if (!bins) return std::nullopt;
    EmbedPlan plan;
    plan.threshold = threshold;
    plan.bins = *bins;
    plan.capacity = capacity(hist, *bins);
    plan.modified_pixels = shifted_count(hist, *bins) + request.payload_ones;
    plan.predicted_psnr = psnr_from_modified(plan.modified_pixels, pixels);
    return plan;
  };

  ErrorHistogram hist;
  std::size_t next = 0;
  auto admit_up_to = [&](int threshold) {
    bool added = false;
    while (next < order.size() && smoothness[order[next]] <= threshold) {
      hist.add(errors[order[next]]);
      ++next;
      added = true;
    }
    return added;
  };

  std::optional<EmbedPlan> best;
  if (!request.pixel_selection) {
    admit_up_to(limit);
    best = evaluate(hist, limit);
  } else {
    ErrorHistogram all;
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (smoothness[i] <= limit) all.add(errors[i]);
    }
    const auto full = evaluate(all, limit);
    for (int t = 0; t <= limit; ++t) {
      const bool added = admit_up_to(t);
      if (!added && t > 0) continue;  // same histogram as t - 1
      auto plan = evaluate(hist, t);
      if (!plan) continue;
      if (!best) {
        best = plan;
      } else if (plan->predicted_psnr < best->predicted_psnr) {
        break;
      } else if (plan->predicted_psnr > best->predicted_psnr) {
        best = plan;
      }
    }
    // The sweep can stop right after the first feasible T, where only the
    // peak bins fit; the plan over every pixel then shifts less.
    if (full && (!best || full->predicted_psnr > best->predicted_psnr)) best = full;
  }

  if (!best) {
    admit_up_to(limit);
    const std::int64_t max_cap = capacity(hist, peak_bins(hist));
    throw CapacityError("payload too large for this pass: " + std::to_string(request.payload_bits) +
                            " bits requested, at most " + std::to_string(max_cap) + " available",
                        static_cast<std::size_t>(max_cap));
  }
  return *best;
}

}  // namespace rdh

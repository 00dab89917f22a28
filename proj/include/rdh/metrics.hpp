#pragma once

#include <string>

#include "rdh/histogram.hpp"
#include "rdh/image.hpp"

namespace rdh {

/// Shannon entropy in bits per symbol. Throws rdh::Error on an empty histogram.
double entropy(const ErrorHistogram& hist);

/// Peak signal-to-noise ratio in dB; kInfinitePsnr for identical images.
double psnr(const GrayImage& a, const GrayImage& b);

/// "inf" for the infinite sentinel, otherwise fixed with four decimals.
std::string format_psnr(double db);

}  // namespace rdh

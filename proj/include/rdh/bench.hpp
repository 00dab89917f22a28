#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rdh/bitstream.hpp"
#include "rdh/codec.hpp"
#include "rdh/histogram.hpp"
#include "rdh/image.hpp"
#include "rdh/predictor.hpp"

namespace rdh {

struct CorpusImage {
  std::string name;  // file stem
  GrayImage image;
};

/// Every *.pgm in `dir`, sorted by file name.
std::vector<CorpusImage> load_corpus(const std::filesystem::path& dir);

/// Seeded uniform bits (std::mt19937_64).
Bits random_bits(std::size_t count, std::uint64_t seed);

/// Error histogram over all interior pixels of an unmodified image, white
/// pass then gray pass, each predicted under its embedding causality.
ErrorHistogram prediction_error_histogram(const GrayImage& image, const PredictorConfig& config);

struct EntropyRow {
  std::string image;
  PredictorKind predictor = PredictorKind::WLS;
  int n = 0;
  int m = 0;
  double gamma = 0.0;
  double entropy = 0.0;
};

/// One row per image and predictor in {MED, GAP, LS, WLS}.
std::vector<EntropyRow> bench_entropy(const std::vector<CorpusImage>& corpus, const PredictorConfig& base);
void write_entropy_csv(std::ostream& out, const std::vector<EntropyRow>& rows);

inline constexpr const char* kMethodDhsPs = "WLS+DHS-PS";
inline constexpr const char* kMethodDhs = "WLS";

struct PsnrRow {
  std::string image;
  std::size_t payload_bits = 0;
  std::string method;
  double psnr_db = 0.0;
  std::uint64_t seed = 0;
};

/// Embeds a seeded random payload with and without pixel selection, verifies
/// the round trip, and records the marked-image PSNR. Payloads that exceed
/// the capacity of an image are skipped. Throws rdh::Error if any round trip
/// fails.
std::vector<PsnrRow> bench_psnr(const std::vector<CorpusImage>& corpus,
                                const std::vector<std::size_t>& payload_sizes, const EmbedConfig& base,
                                std::uint64_t seed);
void write_psnr_csv(std::ostream& out, const std::vector<PsnrRow>& rows);

/// embed + extract + comparison; throws rdh::Error on any mismatch.
EmbedResult embed_verified(const GrayImage& cover, const Bits& payload, const EmbedConfig& config);

}  // namespace rdh

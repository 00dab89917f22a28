#include "rdh/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "rdh/error.hpp"
#include "rdh/metrics.hpp"

namespace rdh {

std::vector<CorpusImage> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusImage> corpus;
  for (const auto& f : files) corpus.push_back({f.stem().string(), read_pgm(f)});
  return corpus;
}

Bits random_bits(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bits bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return bits;
}

ErrorHistogram prediction_error_histogram(const GrayImage& image, const PredictorConfig& config) {
  PixelPredictor predictor(config, image.width(), image.height());
  ErrorHistogram hist;
  for (Pass pass : {Pass::White, Pass::Gray}) {
    for (const auto& c : traversal(image.width(), image.height(), pass)) {
      hist.add(static_cast<int>(image.at(c.row, c.col)) - predictor.predict(image, c));
    }
  }
  return hist;
}

std::vector<EntropyRow> bench_entropy(const std::vector<CorpusImage>& corpus, const PredictorConfig& base) {
  std::vector<EntropyRow> rows;
  for (const auto& item : corpus) {
    for (PredictorKind kind : {PredictorKind::MED, PredictorKind::GAP, PredictorKind::LS, PredictorKind::WLS}) {
      PredictorConfig config = base;
      config.kind = kind;
      rows.push_back({item.name, kind, config.context_size, config.train_radius, config.gamma,
                      entropy(prediction_error_histogram(item.image, config))});
    }
  }
  return rows;
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyRow>& rows) {
  out << "image,predictor,n,m,gamma,entropy\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%g,%.4f", r.gamma, r.entropy);
    out << r.image << ',' << to_string(r.predictor) << ',' << r.n << ',' << r.m << ',' << buf << '\n';
  }
}

EmbedResult embed_verified(const GrayImage& cover, const Bits& payload, const EmbedConfig& config) {
  EmbedResult result = embed(cover, payload, config);
  const ExtractResult back = extract(result.marked);
  if (back.payload != payload) throw Error("round trip failed: payload mismatch");
  if (!(back.restored == cover)) throw Error("round trip failed: restored image differs from cover");
  return result;
}

std::vector<PsnrRow> bench_psnr(const std::vector<CorpusImage>& corpus,
                                const std::vector<std::size_t>& payload_sizes, const EmbedConfig& base,
                                std::uint64_t seed) {
  std::vector<PsnrRow> rows;
  for (const auto& item : corpus) {
    for (std::size_t bits : payload_sizes) {
      const Bits payload = random_bits(bits, seed);
      for (bool selection : {true, false}) {
        EmbedConfig config = base;
        config.pixel_selection = selection;
        try {
          const EmbedResult r = embed_verified(item.image, payload, config);
          rows.push_back({item.name, bits, selection ? kMethodDhsPs : kMethodDhs, r.psnr, seed});
        } catch (const CapacityError&) {
          // payload does not fit this image
        }
      }
    }
  }
  return rows;
}

void write_psnr_csv(std::ostream& out, const std::vector<PsnrRow>& rows) {
  out << "image,payload_bits,method,psnr_db,seed\n";
  for (const auto& r : rows) {
    out << r.image << ',' << r.payload_bits << ',' << r.method << ',' << format_psnr(r.psnr_db) << ','
        << r.seed << '\n';
  }
}

}  // namespace rdh

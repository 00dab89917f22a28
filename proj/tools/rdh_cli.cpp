// rdh: command-line front end for the reversible data-hiding codec.
//
//   rdh embed COVER.pgm (--payload FILE | --random-bits N) --out MARKED.pgm
//   rdh extract MARKED.pgm [--out-payload FILE] [--out-restored FILE] [--verify-against COVER.pgm]
//   rdh bench-entropy CORPUS_DIR [--csv FILE]
//   rdh bench-psnr CORPUS_DIR --payloads 500,1000,... [--csv FILE]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "rdh/bench.hpp"
#include "rdh/codec.hpp"
#include "rdh/error.hpp"
#include "rdh/metrics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCapacity = 2;
constexpr int kExitParse = 3;
constexpr int kExitVerify = 4;

struct CodecFlags {
  int context_size = 10;
  int train_size = 10;
  double gamma = 1.0;
  std::optional<int> threshold_max;
  bool no_checksum = false;
  bool no_selection = false;
  std::string predictor = "WLS";
};

void add_codec_flags(CLI::App* cmd, CodecFlags& f) {
  cmd->add_option("--context-size", f.context_size, "Context pixels per sample")->capture_default_str();
  cmd->add_option("--train-size", f.train_size, "Training window radius")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Weight regularizer")->capture_default_str();
  cmd->add_option("--threshold-max", f.threshold_max, "Upper bound of the smoothness threshold sweep");
  cmd->add_option("--predictor", f.predictor, "MED, GAP, LS or WLS")->capture_default_str();
}

rdh::EmbedConfig to_config(const CodecFlags& f) {
  rdh::EmbedConfig c;
  c.predictor.kind = rdh::parse_predictor_kind(f.predictor);
  c.predictor.context_size = f.context_size;
  c.predictor.train_radius = f.train_size;
  c.predictor.gamma = f.gamma;
  c.threshold_max = f.threshold_max;
  c.checksum = !f.no_checksum;
  c.pixel_selection = !f.no_selection;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rdh::Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw rdh::Error("cannot write " + path);
  }
}

std::string describe(const rdh::BinPair& bins) {
  std::ostringstream s;
  s << '(' << (bins.neg ? std::to_string(*bins.neg) : "-") << ", "
    << (bins.pos ? std::to_string(*bins.pos) : "-") << ')';
  return s.str();
}

void print_pass(const char* name, const rdh::PassReport& p) {
  std::cout << name << " pass: T=" << p.plan.threshold << " bins=" << describe(p.plan.bins)
            << " capacity=" << p.plan.capacity << " stream=" << p.stream_bits
            << " payload=" << p.payload_bits << " map=" << p.map_bits
            << " participating=" << p.participating << '\n';
}

std::ostream* open_csv(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path, std::ios::trunc);
  if (!file) throw rdh::Error("cannot write " + path);
  return &file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversible data hiding with a WLS predictor and dynamic histogram shifting"};
  app.require_subcommand(1);

  CodecFlags embed_flags;
  std::string cover_path, payload_path, marked_out, payload_copy;
  std::optional<std::size_t> random_bits;
  std::uint64_t seed = 1;
  auto* embed_cmd = app.add_subcommand("embed", "Embed a payload into a cover PGM");
  embed_cmd->add_option("cover", cover_path, "Cover image (P5 PGM)")->required();
  auto* payload_opt = embed_cmd->add_option("--payload", payload_path, "Payload file (bytes)");
  auto* random_opt = embed_cmd->add_option("--random-bits", random_bits, "Embed N seeded random bits");
  payload_opt->excludes(random_opt);
  embed_cmd->add_option("--seed", seed, "Seed for --random-bits")->capture_default_str();
  embed_cmd->add_option("--save-payload", payload_copy, "Write the embedded payload bits (packed) here");
  embed_cmd->add_option("--out", marked_out, "Marked image output")->required();
  embed_cmd->add_flag("--no-checksum", embed_flags.no_checksum, "Do not append a CRC-32 to the payload");
  embed_cmd->add_flag("--no-selection", embed_flags.no_selection, "Disable pixel selection (plain DHS)");
  add_codec_flags(embed_cmd, embed_flags);

  std::string marked_path, out_payload, out_restored, verify_against;
  auto* extract_cmd = app.add_subcommand("extract", "Extract the payload and restore the cover");
  extract_cmd->add_option("marked", marked_path, "Marked image (P5 PGM)")->required();
  extract_cmd->add_option("--out-payload", out_payload, "Payload output (packed bytes)");
  extract_cmd->add_option("--out-restored", out_restored, "Restored cover output");
  extract_cmd->add_option("--verify-against", verify_against, "Compare the restored image to this cover");

  CodecFlags bench_flags;
  std::string corpus_dir, csv_path;
  std::vector<std::size_t> payloads{500, 1000, 2000, 5000, 10000};
  std::uint64_t bench_seed = 1;
  auto* entropy_cmd = app.add_subcommand("bench-entropy", "Prediction-error entropy per image and predictor");
  entropy_cmd->add_option("corpus", corpus_dir, "Directory of PGM images")->required();
  entropy_cmd->add_option("--csv", csv_path, "CSV output (default stdout)");
  add_codec_flags(entropy_cmd, bench_flags);

  auto* psnr_cmd = app.add_subcommand("bench-psnr", "Marked-image PSNR with and without pixel selection");
  psnr_cmd->add_option("corpus", corpus_dir, "Directory of PGM images")->required();
  psnr_cmd->add_option("--payloads", payloads, "Payload sizes in bits")->delimiter(',')->capture_default_str();
  psnr_cmd->add_option("--seed", bench_seed, "Payload seed")->capture_default_str();
  psnr_cmd->add_option("--csv", csv_path, "CSV output (default stdout)");
  psnr_cmd->add_flag("--no-checksum", bench_flags.no_checksum, "Do not append a CRC-32 to the payload");
  add_codec_flags(psnr_cmd, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*embed_cmd) {
      const rdh::GrayImage cover = rdh::read_pgm(cover_path);
      rdh::Bits payload;
      if (random_bits) {
        payload = rdh::random_bits(*random_bits, seed);
      } else if (!payload_path.empty()) {
        payload = rdh::unpack_bits(read_file(payload_path));
      }
      const rdh::EmbedResult r = rdh::embed(cover, payload, to_config(embed_flags));
      rdh::write_pgm(r.marked, marked_out);
      if (!payload_copy.empty()) write_file(payload_copy, rdh::pack_bits(payload));
      std::cout << "embedded " << payload.size() << " payload bits\n";
      print_pass("white", r.white);
      print_pass("gray", r.gray);
      std::cout << "location map: " << r.location_map_bits << " bits, compressed " << r.compressed_map_bits
                << '\n';
      std::cout << "PSNR: " << rdh::format_psnr(r.psnr) << " dB\n";
      return kExitOk;
    }
    if (*extract_cmd) {
      const rdh::GrayImage marked = rdh::read_pgm(marked_path);
      const rdh::ExtractResult r = rdh::extract(marked);
      if (!out_payload.empty()) write_file(out_payload, rdh::pack_bits(r.payload));
      if (!out_restored.empty()) rdh::write_pgm(r.restored, out_restored);
      std::cout << "extracted " << r.payload.size() << " payload bits"
                << (r.overhead.checksum ? " (checksum ok)" : " (no checksum)") << '\n';
      if (!verify_against.empty()) {
        const rdh::GrayImage cover = rdh::read_pgm(verify_against);
        if (!(cover == r.restored)) {
          std::cerr << "restored image differs from " << verify_against << '\n';
          return kExitVerify;
        }
        std::cout << "restored == cover (bit-exact)\n";
      }
      return kExitOk;
    }
    if (*entropy_cmd) {
      const auto rows = rdh::bench_entropy(rdh::load_corpus(corpus_dir), to_config(bench_flags).predictor);
      std::ofstream file;
      rdh::write_entropy_csv(*open_csv(csv_path, file), rows);
      return kExitOk;
    }
    if (*psnr_cmd) {
      const auto rows =
          rdh::bench_psnr(rdh::load_corpus(corpus_dir), payloads, to_config(bench_flags), bench_seed);
      std::ofstream file;
      rdh::write_psnr_csv(*open_csv(csv_path, file), rows);
      return kExitOk;
    }
  } catch (const rdh::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\nmax capacity: " << e.max_payload_bits() << " bits\n";
    return kExitCapacity;
  } catch (const rdh::PgmError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const rdh::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const rdh::ChecksumError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerify;
  } catch (const rdh::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

#include "rdh/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "rdh/arith_coder.hpp"
#include "rdh/error.hpp"
#include "rdh/metrics.hpp"
#include "rdh/selection.hpp"

namespace rdh {

Preprocessed preprocess(const GrayImage& cover) {
  Preprocessed out{cover, {}};
  for (auto& v : out.image.pixels()) {
    if (v == 0 || v == 255) {
      v = v == 0 ? 1 : 254;
      out.map.bits.push_back(1);
    } else if (v == 1 || v == 254) {
      out.map.bits.push_back(0);
    }
  }
  return out;
}

GrayImage postprocess(const GrayImage& preprocessed, const LocationMap& map) {
  GrayImage out = preprocessed;
  std::size_t next = 0;
  for (auto& v : out.pixels()) {
    if (v != 1 && v != 254) continue;
    if (next >= map.bits.size()) throw Error("location map shorter than the saturated pixel count");
    if (map.bits[next++]) v = v == 1 ? 0 : 255;
  }
  if (next != map.bits.size()) throw Error("location map longer than the saturated pixel count");
  return out;
}

namespace {

constexpr std::uint32_t kUnusedBin = 1023;
constexpr int kBinBias = 512;
constexpr std::uint32_t kMaxLength = (1U << 24) - 1;

void put_bin(BitWriter& w, const std::optional<int>& bin) {
  w.put(bin ? static_cast<std::uint32_t>(*bin + kBinBias) : kUnusedBin, 10);
}

std::optional<int> get_bin(BitReader& r) {
  const auto raw = static_cast<std::uint32_t>(r.get(10));
  if (raw == kUnusedBin) return std::nullopt;
  return static_cast<int>(raw) - kBinBias;
}

void put_record(BitWriter& w, const OverheadRecord& rec) {
  w.put(static_cast<std::uint32_t>(rec.threshold), 16);
  put_bin(w, rec.bins.neg);
  put_bin(w, rec.bins.pos);
  w.put(rec.map_bits, 24);
  w.put(rec.payload_bits, 24);
}

OverheadRecord get_record(BitReader& r, const char* name) {
  OverheadRecord rec;
  rec.threshold = static_cast<int>(r.get(16));
  rec.bins.neg = get_bin(r);
  rec.bins.pos = get_bin(r);
  rec.map_bits = static_cast<std::uint32_t>(r.get(24));
  rec.payload_bits = static_cast<std::uint32_t>(r.get(24));
  if ((rec.bins.neg && (*rec.bins.neg > -1 || *rec.bins.neg < kMinError)) ||
      (rec.bins.pos && (*rec.bins.pos < 0 || *rec.bins.pos > kMaxError))) {
    throw FormatError(std::string("not a valid marked image: bad ") + name + " bins");
  }
  if (rec.threshold > kMaxSmoothness) {
    throw FormatError(std::string("not a valid marked image: bad ") + name + " threshold");
  }
  return rec;
}

}  // namespace

Bits encode_overhead(const Overhead& o) {
  BitWriter w;
  w.put(o.version, 8);
  w.put(o.checksum ? 1U : 0U, 8);
  w.put(static_cast<std::uint8_t>(o.predictor.kind), 8);
  w.put(static_cast<std::uint32_t>(o.predictor.context_size), 8);
  w.put(static_cast<std::uint32_t>(o.predictor.train_radius), 8);
  w.put(std::bit_cast<std::uint32_t>(static_cast<float>(o.predictor.gamma)), 32);
  for (const auto* rec : {&o.white, &o.gray}) {
    if (rec->map_bits > kMaxLength || rec->payload_bits > kMaxLength) {
      throw Error("overhead length field exceeds 24 bits");
    }
    put_record(w, *rec);
  }
  return std::move(w).take();
}

Overhead decode_overhead(std::span<const std::uint8_t> bits) {
  if (bits.size() < static_cast<std::size_t>(kOverheadBits)) {
    throw FormatError("not a valid marked image: overhead truncated");
  }
  BitReader r(bits);
  Overhead o;
  o.version = static_cast<std::uint8_t>(r.get(8));
  if (o.version != kFormatVersion) {
    throw FormatError("not a valid marked image: unknown format version " + std::to_string(o.version));
  }
  const auto flags = r.get(8);
  if (flags > 1) throw FormatError("not a valid marked image: unknown flags");
  o.checksum = flags == 1;
  const auto kind = r.get(8);
  if (kind > static_cast<std::uint64_t>(PredictorKind::WLS)) {
    throw FormatError("not a valid marked image: unknown predictor");
  }
  o.predictor.kind = static_cast<PredictorKind>(kind);
  o.predictor.context_size = static_cast<int>(r.get(8));
  o.predictor.train_radius = static_cast<int>(r.get(8));
  o.predictor.gamma = static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(r.get(32))));
  try {
    validate(o.predictor);
  } catch (const Error& e) {
    throw FormatError(std::string("not a valid marked image: ") + e.what());
  }
  o.white = get_record(r, "white");
  o.gray = get_record(r, "gray");
  return o;
}

namespace {

struct PassAnalysis {
  std::vector<Coord> order;
  std::vector<int> predictions;
  std::vector<int> errors;
  std::vector<int> smoothness;
};

PassAnalysis analyze(const GrayImage& image, Pass pass, PixelPredictor& predictor) {
  PassAnalysis a;
  a.order = traversal(image.width(), image.height(), pass);
  a.predictions.reserve(a.order.size());
  a.errors.reserve(a.order.size());
  a.smoothness.reserve(a.order.size());
  for (const auto& c : a.order) {
    const int pred = predictor.predict(image, c);
    a.predictions.push_back(pred);
    a.errors.push_back(static_cast<int>(image.at(c.row, c.col)) - pred);
    a.smoothness.push_back(smoothness(image, c));
  }
  return a;
}

std::int64_t peak_capacity(const PassAnalysis& a, const EmbedConfig& config) {
  int limit = kMaxSmoothness;
  if (config.threshold_max && config.pixel_selection) limit = *config.threshold_max;
  ErrorHistogram hist;
  for (std::size_t i = 0; i < a.errors.size(); ++i) {
    if (a.smoothness[i] <= limit) hist.add(a.errors[i]);
  }
  return capacity(hist, peak_bins(hist));
}

EmbedPlan plan_pass(const PassAnalysis& a, std::span<const std::uint8_t> stream,
                    const EmbedConfig& config, std::int64_t pixels) {
  PlanRequest req;
  req.payload_bits = static_cast<std::int64_t>(stream.size());
  req.payload_ones = static_cast<std::int64_t>(popcount(stream));
  req.image_pixels = pixels;
  req.threshold_max = config.threshold_max;
  req.pixel_selection = config.pixel_selection;
  return greedy_plan(a.errors, a.smoothness, req);
}

std::size_t apply_pass(GrayImage& image, const PassAnalysis& a, const EmbedPlan& plan,
                       std::span<const std::uint8_t> stream, PassTrace* trace) {
  std::size_t cursor = 0;
  std::size_t participating = 0;
  for (std::size_t i = 0; i < a.order.size(); ++i) {
    if (a.smoothness[i] > plan.threshold) continue;
    ++participating;
    const int e = a.errors[i];
    int bit = 0;
    if ((plan.bins.pos && e == *plan.bins.pos) || (plan.bins.neg && e == *plan.bins.neg)) {
      bit = cursor < stream.size() ? stream[cursor] : 0;
      ++cursor;
    }
    const int value = a.predictions[i] + embed_value(e, plan.bins, bit);
    const Coord c = a.order[i];
    image.at(c.row, c.col) = static_cast<std::uint8_t>(value);
    if (trace) {
      trace->coords.push_back(c);
      trace->predictions.push_back(a.predictions[i]);
      trace->smoothness.push_back(a.smoothness[i]);
    }
  }
  if (cursor < stream.size()) throw Error("internal: plan capacity below stream length");
  return participating;
}

// Extracts one pass in raster order, restoring pixels in place.
Bits extract_pass(GrayImage& image, Pass pass, PixelPredictor& predictor, const OverheadRecord& rec,
                  PassTrace* trace) {
  Bits bits;
  for (const auto& c : traversal(image.width(), image.height(), pass)) {
    const int s = smoothness(image, c);
    if (s > rec.threshold) continue;
    const int pred = predictor.predict(image, c);
    const auto [e, bit] = extract_value(static_cast<int>(image.at(c.row, c.col)) - pred, rec.bins);
    const int value = pred + e;
    if (value < 0 || value > 255) throw FormatError("not a valid marked image: pixel out of range");
    image.at(c.row, c.col) = static_cast<std::uint8_t>(value);
    if (bit) bits.push_back(static_cast<std::uint8_t>(*bit));
    if (trace) {
      trace->coords.push_back(c);
      trace->predictions.push_back(pred);
      trace->smoothness.push_back(s);
    }
  }
  return bits;
}

Bits concat(std::initializer_list<std::span<const std::uint8_t>> parts) {
  Bits out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::span<const std::uint8_t> slice(const Bits& bits, std::size_t from, std::size_t count) {
  return std::span<const std::uint8_t>(bits).subspan(from, count);
}

void check_geometry(int width, int height) {
  if (width < 3 || height < 3) {
    throw CapacityError("image too small: no interior pixels", 0);
  }
  if (border_sequence(width, height).size() < static_cast<std::size_t>(kOverheadBits)) {
    throw CapacityError("image too small: the border cannot hold the " +
                            std::to_string(kOverheadBits) + "-bit overhead",
                        0);
  }
}

// Splits `need` bits so that the white pass takes at most `room`; payload is
// moved to the gray pass before map bits.
bool fit_white(std::size_t room, std::size_t& pw, std::size_t& mw) {
  const std::size_t need = kOverheadBits + pw + mw;
  if (need <= room) return true;
  std::size_t excess = need - room;
  const std::size_t from_payload = std::min(excess, pw);
  pw -= from_payload;
  excess -= from_payload;
  const std::size_t from_map = std::min(excess, mw);
  mw -= from_map;
  excess -= from_map;
  return excess == 0;
}

}  // namespace

EmbedResult embed(const GrayImage& cover, std::span<const std::uint8_t> payload,
                  const EmbedConfig& config_in, CodecTrace* trace) {
  EmbedConfig config = config_in;
  validate(config.predictor);
  // The gamma travels as binary32; both sides must use the rounded value.
  config.predictor.gamma = static_cast<double>(static_cast<float>(config.predictor.gamma));
  for (auto b : payload) {
    if (b > 1) throw Error("payload elements must be 0 or 1");
  }

  const int width = cover.width();
  const int height = cover.height();
  check_geometry(width, height);
  const auto border = border_sequence(width, height);
  const auto pixels = static_cast<std::int64_t>(cover.size());

  Preprocessed pre = preprocess(cover);
  GrayImage work = pre.image;
  Bits displaced;
  for (int i = 0; i < kOverheadBits; ++i) {
    auto& v = work.at(border[static_cast<std::size_t>(i)].row, border[static_cast<std::size_t>(i)].col);
    displaced.push_back(v & 1U);
    v = static_cast<std::uint8_t>(v & 0xFE);
  }

  const Bits cmap = compress_map(pre.map.bits);
  Bits data(payload.begin(), payload.end());
  if (config.checksum) {
    BitWriter w;
    w.put(payload_checksum(payload), kChecksumBits);
    data.insert(data.end(), w.bits().begin(), w.bits().end());
  }
  const std::size_t total_payload = data.size();
  const std::size_t total_map = cmap.size();

  PixelPredictor predictor(config.predictor, width, height);
  const PassAnalysis white = analyze(work, Pass::White, predictor);
  const auto white_room = static_cast<std::size_t>(peak_capacity(white, config));

  std::size_t pw = (total_payload + 1) / 2;
  std::size_t mw = (total_map + 1) / 2;
  auto capacity_error = [&](std::size_t gray_room) {
    const std::size_t fixed = kOverheadBits + total_map + (config.checksum ? kChecksumBits : 0);
    const std::size_t room = white_room + gray_room;
    const std::size_t max_payload = room > fixed ? room - fixed : 0;
    return CapacityError("capacity exceeded: " + std::to_string(payload.size()) +
                             " payload bits requested, measured capacity " +
                             std::to_string(max_payload) + " bits",
                         max_payload);
  };
  if (!fit_white(white_room, pw, mw)) throw capacity_error(0);

  for (int attempt = 0;; ++attempt) {
    const Bits white_stream = concat({displaced, slice(data, 0, pw), slice(cmap, 0, mw)});
    const EmbedPlan white_plan = plan_pass(white, white_stream, config, pixels);
    GrayImage stage = work;
    CodecTrace local;
    const std::size_t white_participating =
        apply_pass(stage, white, white_plan, white_stream, trace ? &local.white : nullptr);

    const PassAnalysis gray = analyze(stage, Pass::Gray, predictor);
    const Bits gray_stream =
        concat({slice(data, pw, total_payload - pw), slice(cmap, mw, total_map - mw)});
    EmbedPlan gray_plan;
    try {
      gray_plan = plan_pass(gray, gray_stream, config, pixels);
    } catch (const CapacityError&) {
      const std::size_t used = kOverheadBits + pw + mw;
      if (attempt == 0 && used < white_room) {
        // Move as much as possible into the white pass and retry once.
        std::size_t room = white_room - used;
        const std::size_t more_payload = std::min(room, total_payload - pw);
        pw += more_payload;
        room -= more_payload;
        mw += std::min(room, total_map - mw);
        continue;
      }
      throw capacity_error(static_cast<std::size_t>(peak_capacity(gray, config)));
    }
    const std::size_t gray_participating =
        apply_pass(stage, gray, gray_plan, gray_stream, trace ? &local.gray : nullptr);

    Overhead overhead;
    overhead.checksum = config.checksum;
    overhead.predictor = config.predictor;
    overhead.white = {white_plan.threshold, white_plan.bins, static_cast<std::uint32_t>(mw),
                      static_cast<std::uint32_t>(pw)};
    overhead.gray = {gray_plan.threshold, gray_plan.bins, static_cast<std::uint32_t>(total_map - mw),
                     static_cast<std::uint32_t>(total_payload - pw)};
    const Bits header = encode_overhead(overhead);
    for (int i = 0; i < kOverheadBits; ++i) {
      auto& v = stage.at(border[static_cast<std::size_t>(i)].row, border[static_cast<std::size_t>(i)].col);
      v = static_cast<std::uint8_t>((v & 0xFE) | header[static_cast<std::size_t>(i)]);
    }

    EmbedResult result;
    result.white = {white_plan, pw, mw, white_stream.size(), white_participating};
    result.gray = {gray_plan, total_payload - pw, total_map - mw, gray_stream.size(), gray_participating};
    result.location_map_bits = pre.map.bits.size();
    result.compressed_map_bits = total_map;
    result.psnr = psnr(cover, stage);
    result.marked = std::move(stage);
    if (trace) *trace = std::move(local);
    return result;
  }
}

ExtractResult extract(const GrayImage& marked, CodecTrace* trace) {
  const int width = marked.width();
  const int height = marked.height();
  try {
    check_geometry(width, height);
  } catch (const CapacityError& e) {
    throw FormatError(std::string("not a valid marked image: ") + e.what());
  }
  const auto border = border_sequence(width, height);

  GrayImage work = marked;
  Bits header;
  for (int i = 0; i < kOverheadBits; ++i) {
    auto& v = work.at(border[static_cast<std::size_t>(i)].row, border[static_cast<std::size_t>(i)].col);
    header.push_back(v & 1U);
    v = static_cast<std::uint8_t>(v & 0xFE);
  }
  const Overhead overhead = decode_overhead(header);

  PixelPredictor predictor(overhead.predictor, width, height);
  CodecTrace local;

  const Bits gray_bits = extract_pass(work, Pass::Gray, predictor, overhead.gray,
                                      trace ? &local.gray : nullptr);
  const std::size_t gray_len = std::size_t{overhead.gray.payload_bits} + overhead.gray.map_bits;
  if (gray_bits.size() < gray_len) throw FormatError("not a valid marked image: gray stream truncated");

  const Bits white_bits = extract_pass(work, Pass::White, predictor, overhead.white,
                                       trace ? &local.white : nullptr);
  const std::size_t white_len =
      kOverheadBits + std::size_t{overhead.white.payload_bits} + overhead.white.map_bits;
  if (white_bits.size() < white_len) throw FormatError("not a valid marked image: white stream truncated");

  for (int i = 0; i < kOverheadBits; ++i) {
    auto& v = work.at(border[static_cast<std::size_t>(i)].row, border[static_cast<std::size_t>(i)].col);
    v = static_cast<std::uint8_t>((v & 0xFE) | white_bits[static_cast<std::size_t>(i)]);
  }

  std::size_t saturated = 0;
  for (auto v : work.pixels()) saturated += (v == 1 || v == 254) ? 1 : 0;
  const std::size_t pw = overhead.white.payload_bits;
  const std::size_t mw = overhead.white.map_bits;
  const std::size_t pg = overhead.gray.payload_bits;
  const std::size_t mg = overhead.gray.map_bits;
  const Bits cmap = concat({slice(white_bits, kOverheadBits + pw, mw), slice(gray_bits, pg, mg)});

  LocationMap map;
  try {
    map.bits = decompress_map(cmap, saturated);
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("not a valid marked image: ") + e.what());
  }

  ExtractResult result;
  result.overhead = overhead;
  result.restored = postprocess(work, map);
  Bits data = concat({slice(white_bits, kOverheadBits, pw), slice(gray_bits, 0, pg)});
  if (overhead.checksum) {
    if (data.size() < static_cast<std::size_t>(kChecksumBits)) {
      throw FormatError("not a valid marked image: payload shorter than its checksum");
    }
    const std::size_t n = data.size() - kChecksumBits;
    BitReader r(std::span<const std::uint8_t>(data).subspan(n));
    const auto stored = static_cast<std::uint32_t>(r.get(kChecksumBits));
    data.resize(n);
    if (stored != payload_checksum(data)) throw ChecksumError("payload checksum mismatch");
  }
  result.payload = std::move(data);
  if (trace) *trace = std::move(local);
  return result;
}

std::size_t estimate_capacity(const GrayImage& cover, const EmbedConfig& config) {
  try {
    const EmbedResult r = embed(cover, {}, config);
    // Re-plan both passes at their peak bins to measure the room left.
    EmbedConfig probe = config;
    probe.predictor.gamma = static_cast<double>(static_cast<float>(config.predictor.gamma));
    PixelPredictor predictor(probe.predictor, cover.width(), cover.height());
    GrayImage work = preprocess(cover).image;
    const auto border = border_sequence(cover.width(), cover.height());
    for (int i = 0; i < kOverheadBits; ++i) {
      auto& v = work.at(border[static_cast<std::size_t>(i)].row, border[static_cast<std::size_t>(i)].col);
      v = static_cast<std::uint8_t>(v & 0xFE);
    }
    const auto white_room = static_cast<std::size_t>(peak_capacity(analyze(work, Pass::White, predictor), probe));
    // Gray errors depend on the white data; use the white pass as embedded above.
    GrayImage stage = r.marked;
    for (int i = 0; i < kOverheadBits; ++i) {
      auto& v = stage.at(border[static_cast<std::size_t>(i)].row, border[static_cast<std::size_t>(i)].col);
      v = static_cast<std::uint8_t>(v & 0xFE);
    }
    for (const auto& c : traversal(cover.width(), cover.height(), Pass::Gray)) {
      stage.at(c.row, c.col) = work.at(c.row, c.col);
    }
    const auto gray_room = static_cast<std::size_t>(peak_capacity(analyze(stage, Pass::Gray, predictor), probe));
    const std::size_t fixed =
        kOverheadBits + r.compressed_map_bits + (config.checksum ? kChecksumBits : 0);
    const std::size_t room = white_room + gray_room;
    return room > fixed ? room - fixed : 0;
  } catch (const CapacityError& e) {
    return e.max_payload_bits();
  }
}

}  // namespace rdh

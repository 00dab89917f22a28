#include "rdh/predictor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "rdh/error.hpp"

namespace rdh {

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::MED: return "MED";
    case PredictorKind::GAP: return "GAP";
    case PredictorKind::LS: return "LS";
    case PredictorKind::WLS: return "WLS";
  }
  return "?";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  std::string upper(name);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (upper == "MED") return PredictorKind::MED;
  if (upper == "GAP") return PredictorKind::GAP;
  if (upper == "LS") return PredictorKind::LS;
  if (upper == "WLS") return PredictorKind::WLS;
  throw Error("unknown predictor '" + std::string(name) + "' (expected MED, GAP, LS or WLS)");
}

void validate(const PredictorConfig& config) {
  if (config.context_size < 1 || config.context_size > kMaxContextSize) {
    throw Error("context size must be in [1, " + std::to_string(kMaxContextSize) + "]");
  }
  if (config.train_radius < 1 || config.train_radius > kMaxTrainRadius) {
    throw Error("training radius must be in [1, " + std::to_string(kMaxTrainRadius) + "]");
  }
  if (!(config.gamma > 0.0) || !std::isfinite(config.gamma)) {
    throw Error("gamma must be a positive finite number");
  }
}

namespace {

// Causality of a same-image offset relative to the target, for pixels that
// are all interior.
bool causal_offset(int dr, int dc) {
  if (dr == 0 && dc == 0) return false;
  if (((dr + dc) & 1) != 0) return true;
  return dr < 0 || (dr == 0 && dc < 0);
}

Coord clamp_to(const GrayImage& image, int row, int col) {
  return {std::clamp(row, 0, image.height() - 1), std::clamp(col, 0, image.width() - 1)};
}

int pixel_clamped(const GrayImage& image, int row, int col) {
  const Coord c = clamp_to(image, row, col);
  return image.at(c.row, c.col);
}

}  // namespace

ContextLayout::ContextLayout(std::vector<Offset> offsets) : offsets_(std::move(offsets)) {
  if (offsets_.empty() || static_cast<int>(offsets_.size()) > kMaxContextSize) {
    throw Error("context layout must have between 1 and " + std::to_string(kMaxContextSize) +
                " offsets");
  }
  for (const auto& o : offsets_) {
    if (!causal_offset(o.dr, o.dc)) throw Error("context layout contains a non-causal offset");
    reach_ = std::max({reach_, std::abs(o.dr), std::abs(o.dc)});
  }
}

ContextLayout ContextLayout::nearest_causal(int n) {
  if (n < 1 || n > kMaxContextSize) {
    throw Error("context size must be in [1, " + std::to_string(kMaxContextSize) + "]");
  }
  std::vector<Offset> candidates;
  for (int dr = -4; dr <= 4; ++dr) {
    for (int dc = -4; dc <= 4; ++dc) {
      if (causal_offset(dr, dc)) candidates.push_back({dr, dc});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Offset& a, const Offset& b) {
    const int da = a.dr * a.dr + a.dc * a.dc;
    const int db = b.dr * b.dr + b.dc * b.dc;
    if (da != db) return da < db;
    if (a.dr != b.dr) return a.dr < b.dr;
    return a.dc < b.dc;
  });
  candidates.resize(static_cast<std::size_t>(n));
  return ContextLayout(std::move(candidates));
}

bool is_causal(int width, int height, Coord target, Coord q) {
  if (is_border(width, height, q)) return true;
  if (((q.row + q.col - target.row - target.col) & 1) != 0) return true;
  return q.row < target.row || (q.row == target.row && q.col < target.col);
}

std::vector<int> extract_context(const GrayImage& image, Coord at, const ContextLayout& layout) {
  std::vector<int> values;
  values.reserve(static_cast<std::size_t>(layout.size()));
  for (const auto& o : layout.offsets()) {
    values.push_back(pixel_clamped(image, at.row + o.dr, at.col + o.dc));
  }
  return values;
}

TrainingSet build_training_set(const GrayImage& image, Coord target, const ContextLayout& layout,
                               int radius) {
  const int w = image.width();
  const int h = image.height();
  TrainingSet set;
  set.n = layout.size();
  const int r0 = std::max(1, target.row - radius);
  const int r1 = std::min(h - 2, target.row + radius);
  const int c0 = std::max(1, target.col - radius);
  const int c1 = std::min(w - 2, target.col + radius);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Coord p{r, c};
      if (p == target || !is_causal(w, h, target, p)) continue;
      bool usable = true;
      for (const auto& o : layout.offsets()) {
        if (!is_causal(w, h, target, clamp_to(image, r + o.dr, c + o.dc))) {
          usable = false;
          break;
        }
      }
      if (!usable) continue;
      set.coords.push_back(p);
      for (const auto& o : layout.offsets()) {
        set.x.push_back(pixel_clamped(image, r + o.dr, c + o.dc));
      }
      set.y.push_back(image.at(r, c));
    }
  }
  return set;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    d2 += d * d;
  }
  return d2;
}

}  // namespace

std::vector<double> compute_weights(std::span<const int> target_context, const TrainingSet& training,
                                    double gamma) {
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  if (static_cast<int>(target_context.size()) != training.n) {
    throw Error("context length does not match training set");
  }
  std::vector<double> x(target_context.begin(), target_context.end());
  std::vector<double> w;
  w.reserve(training.size());
  for (std::size_t i = 0; i < training.size(); ++i) {
    w.push_back(1.0 / (squared_distance(x, training.row(i)) + gamma));
  }
  return w;
}

NormalEquations::NormalEquations(int n)
    : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0),
      b_(static_cast<std::size_t>(n), 0.0) {}

void NormalEquations::reset() {
  std::fill(a_.begin(), a_.end(), 0.0);
  std::fill(b_.begin(), b_.end(), 0.0);
  samples_ = 0;
}

void NormalEquations::add(std::span<const double> x, double y, double weight) {
  for (int i = 0; i < n_; ++i) {
    const double wx = weight * x[static_cast<std::size_t>(i)];
    b_[static_cast<std::size_t>(i)] += wx * y;
    double* row = a_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_);
    for (int j = i; j < n_; ++j) row[j] += wx * x[static_cast<std::size_t>(j)];
  }
  ++samples_;
}

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kRidgeScale = 1e-6;

// In-place lower Cholesky of the full symmetric matrix m. Returns the pivot
// condition estimate, or a negative value when not positive definite.
double cholesky(std::vector<double>& m, int n) {
  double dmin = 0.0;
  double dmax = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = m[static_cast<std::size_t>(j * n + j)];
    for (int k = 0; k < j; ++k) {
      const double l = m[static_cast<std::size_t>(j * n + k)];
      d -= l * l;
    }
    if (!(d > 0.0) || !std::isfinite(d)) return -1.0;
    const double ljj = std::sqrt(d);
    m[static_cast<std::size_t>(j * n + j)] = ljj;
    dmin = j == 0 ? ljj : std::min(dmin, ljj);
    dmax = j == 0 ? ljj : std::max(dmax, ljj);
    for (int i = j + 1; i < n; ++i) {
      double s = m[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < j; ++k) {
        s -= m[static_cast<std::size_t>(i * n + k)] * m[static_cast<std::size_t>(j * n + k)];
      }
      m[static_cast<std::size_t>(i * n + j)] = s / ljj;
    }
  }
  const double ratio = dmax / dmin;
  return ratio * ratio;
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::span<const double> b, int n) {
  std::vector<double> z(b.begin(), b.end());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) z[static_cast<std::size_t>(i)] -= l[static_cast<std::size_t>(i * n + k)] * z[static_cast<std::size_t>(k)];
    z[static_cast<std::size_t>(i)] /= l[static_cast<std::size_t>(i * n + i)];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) z[static_cast<std::size_t>(i)] -= l[static_cast<std::size_t>(k * n + i)] * z[static_cast<std::size_t>(k)];
    z[static_cast<std::size_t>(i)] /= l[static_cast<std::size_t>(i * n + i)];
  }
  return z;
}

WlsSolution averaging_fallback(int n) {
  WlsSolution s;
  s.alpha.assign(static_cast<std::size_t>(n), 1.0 / n);
  s.fallback = true;
  return s;
}

}  // namespace

WlsSolution NormalEquations::solve() const {
  const int n = n_;
  if (samples_ < 2) return averaging_fallback(n);

  std::vector<double> full(a_.size());
  double trace = 0.0;
  for (int i = 0; i < n; ++i) {
    trace += a_[static_cast<std::size_t>(i * n + i)];
    for (int j = i; j < n; ++j) {
      const double v = a_[static_cast<std::size_t>(i * n + j)];
      full[static_cast<std::size_t>(i * n + j)] = v;
      full[static_cast<std::size_t>(j * n + i)] = v;
    }
  }

  WlsSolution out;
  std::vector<double> l = full;
  const double cond = cholesky(l, n);
  if (cond < 0.0 || cond > kMaxCondition) {
    if (!(trace > 0.0) || !std::isfinite(trace)) return averaging_fallback(n);
    const double lambda = kRidgeScale * trace / n;
    l = full;
    for (int i = 0; i < n; ++i) l[static_cast<std::size_t>(i * n + i)] += lambda;
    if (cholesky(l, n) < 0.0) return averaging_fallback(n);
    out.ridge = true;
  }
  out.alpha = cholesky_solve(l, b_, n);
  for (double v : out.alpha) {
    if (!std::isfinite(v)) return averaging_fallback(n);
  }
  return out;
}

WlsSolution solve_wls(std::span<const double> x, std::span<const double> y,
                      std::span<const double> w, int n) {
  if (n < 1) throw Error("solve_wls: n must be positive");
  const std::size_t m = y.size();
  if (x.size() != m * static_cast<std::size_t>(n) || w.size() != m) {
    throw Error("solve_wls: inconsistent system dimensions");
  }
  NormalEquations eq(n);
  for (std::size_t i = 0; i < m; ++i) {
    eq.add(x.subspan(i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)), y[i], w[i]);
  }
  return eq.solve();
}

int predict_med(int west, int north, int north_west) {
  const int lo = std::min(west, north);
  const int hi = std::max(west, north);
  if (north_west >= hi) return lo;
  if (north_west <= lo) return hi;
  return west + north - north_west;
}

double predict_gap(int w, int ww, int n, int nn, int nw, int ne, int nne) {
  const int dh = std::abs(w - ww) + std::abs(n - nw) + std::abs(n - ne);
  const int dv = std::abs(w - nw) + std::abs(n - nn) + std::abs(ne - nne);
  const int diff = dv - dh;
  if (diff > 80) return w;
  if (diff < -80) return n;
  double pred = (w + n) / 2.0 + (ne - nw) / 4.0;
  if (diff > 32) {
    pred = (pred + w) / 2.0;
  } else if (diff > 8) {
    pred = (3.0 * pred + w) / 4.0;
  } else if (diff < -32) {
    pred = (pred + n) / 2.0;
  } else if (diff < -8) {
    pred = (3.0 * pred + n) / 4.0;
  }
  return pred;
}

int quantize_prediction(double value) {
  if (!std::isfinite(value)) return 128;
  return static_cast<int>(std::lround(std::clamp(value, 0.0, 255.0)));
}

PixelPredictor::PixelPredictor(const PredictorConfig& config, int width, int height)
    : config_(config), width_(width), height_(height),
      layout_(ContextLayout::nearest_causal(config.context_size)), normal_(config.context_size) {
  validate(config);
  const int radius = config_.train_radius;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (!causal_offset(dr, dc)) continue;
      bool usable = true;
      for (const auto& o : layout_.offsets()) {
        if (!causal_offset(dr + o.dr, dc + o.dc)) {
          usable = false;
          break;
        }
      }
      if (usable) {
        fast_offsets_.push_back({dr, dc});
        fast_linear_.push_back(static_cast<long>(dr) * width_ + dc);
      }
    }
  }
  for (const auto& o : layout_.offsets()) {
    layout_linear_.push_back(static_cast<long>(o.dr) * width_ + o.dc);
  }
  target_ctx_.resize(static_cast<std::size_t>(config_.context_size));
  sample_ctx_.resize(static_cast<std::size_t>(config_.context_size));
}

bool PixelPredictor::fast_path(Coord t) const {
  const int margin = config_.train_radius + layout_.reach();
  return t.row - margin >= 1 && t.col - margin >= 1 && t.row + margin <= height_ - 2 &&
         t.col + margin <= width_ - 2;
}

double PixelPredictor::predict_ls(const GrayImage& image, Coord target) {
  const bool weighted = config_.kind == PredictorKind::WLS;
  const std::size_t n = static_cast<std::size_t>(config_.context_size);
  normal_.reset();

  if (fast_path(target)) {
    const std::uint8_t* px = image.pixels().data();
    const long centre = static_cast<long>(target.row) * width_ + target.col;
    for (std::size_t k = 0; k < n; ++k) target_ctx_[k] = px[centre + layout_linear_[k]];
    for (const long cand : fast_linear_) {
      const long p = centre + cand;
      for (std::size_t k = 0; k < n; ++k) sample_ctx_[k] = px[p + layout_linear_[k]];
      const double w = weighted ? 1.0 / (squared_distance(target_ctx_, sample_ctx_) + config_.gamma)
                                : 1.0;
      normal_.add(sample_ctx_, px[p], w);
    }
  } else {
    const auto ctx = extract_context(image, target, layout_);
    for (std::size_t k = 0; k < n; ++k) target_ctx_[k] = ctx[k];
    const TrainingSet set = build_training_set(image, target, layout_, config_.train_radius);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto row = set.row(i);
      const double w =
          weighted ? 1.0 / (squared_distance(target_ctx_, row) + config_.gamma) : 1.0;
      normal_.add(row, set.y[i], w);
    }
  }

  const WlsSolution sol = normal_.solve();
  double value = 0.0;
  for (std::size_t k = 0; k < n; ++k) value += sol.alpha[k] * target_ctx_[k];
  return value;
}

double PixelPredictor::predict_real(const GrayImage& image, Coord t) {
  switch (config_.kind) {
    case PredictorKind::MED:
      return predict_med(pixel_clamped(image, t.row, t.col - 1), pixel_clamped(image, t.row - 1, t.col),
                         pixel_clamped(image, t.row - 1, t.col - 1));
    case PredictorKind::GAP:
      return predict_gap(pixel_clamped(image, t.row, t.col - 1), pixel_clamped(image, t.row, t.col - 2),
                         pixel_clamped(image, t.row - 1, t.col), pixel_clamped(image, t.row - 2, t.col),
                         pixel_clamped(image, t.row - 1, t.col - 1),
                         pixel_clamped(image, t.row - 1, t.col + 1),
                         pixel_clamped(image, t.row - 2, t.col + 1));
    case PredictorKind::LS:
    case PredictorKind::WLS:
      return predict_ls(image, t);
  }
  return 0.0;
}

int PixelPredictor::predict(const GrayImage& image, Coord target) {
  if (image.width() != width_ || image.height() != height_) {
    throw Error("predictor geometry does not match image");
  }
  if (is_border(width_, height_, target) || target.row <= 0 || target.col <= 0 ||
      target.row >= height_ - 1 || target.col >= width_ - 1) {
    throw Error("prediction target must be an interior pixel");
  }
  return quantize_prediction(predict_real(image, target));
}

int predict(const GrayImage& image, Coord target, Pass pass, const PredictorConfig& config) {
  if (classify(image.width(), image.height(), target.row, target.col) != pass_class(pass)) {
    throw Error("target pixel does not belong to the requested pass");
  }
  PixelPredictor predictor(config, image.width(), image.height());
  return predictor.predict(image, target);
}

}  // namespace rdh

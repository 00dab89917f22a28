#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rdh/image.hpp"
#include "rdh/partition.hpp"

namespace rdh {

enum class PredictorKind : std::uint8_t { MED = 0, GAP = 1, LS = 2, WLS = 3 };

std::string_view to_string(PredictorKind kind);
/// Accepts "MED", "GAP", "LS", "WLS" (case-insensitive).
PredictorKind parse_predictor_kind(std::string_view name);

inline constexpr int kMaxContextSize = 24;
inline constexpr int kMaxTrainRadius = 32;

struct PredictorConfig {
  PredictorKind kind = PredictorKind::WLS;
  int context_size = 10;  // regressors per sample
  int train_radius = 10;  // half-width of the square training window
  double gamma = 1.0;     // weight regularizer, > 0
};

/// Throws rdh::Error on out-of-range fields.
void validate(const PredictorConfig& config);

struct Offset {
  int dr = 0;
  int dc = 0;
  bool operator==(const Offset&) const = default;
};

/// Ordered neighbour offsets; the same layout is applied to the target and to
/// every training sample.
class ContextLayout {
 public:
  explicit ContextLayout(std::vector<Offset> offsets);

  /// The n offsets nearest to the origin (Euclidean, ties by row then column)
  /// that are causal for either pass: any opposite-parity offset, and
  /// same-parity offsets that precede the origin in raster order.
  static ContextLayout nearest_causal(int n);

  std::span<const Offset> offsets() const noexcept { return offsets_; }
  int size() const noexcept { return static_cast<int>(offsets_.size()); }
  /// Largest |dr| or |dc| over the layout.
  int reach() const noexcept { return reach_; }

 private:
  std::vector<Offset> offsets_;
  int reach_ = 0;
};

/// True when pixel `q` holds the same value while `target` is being embedded
/// and while it is being extracted: border pixels, every pixel of the other
/// pass, and pixels of the target's pass that precede it in raster order.
bool is_causal(int width, int height, Coord target, Coord q);

/// Layout values around `at`; coordinates falling outside the image are
/// clamped onto the nearest border pixel.
std::vector<int> extract_context(const GrayImage& image, Coord at, const ContextLayout& layout);

struct TrainingSet {
  int n = 0;
  std::vector<Coord> coords;
  std::vector<double> x;  // size() rows of n regressors, row-major
  std::vector<double> y;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(x).subspan(i * static_cast<std::size_t>(n),
                                              static_cast<std::size_t>(n));
  }
};

/// Interior pixels within `radius` (Chebyshev) of the interior pixel `target`,
/// in raster order, excluding the target and any pixel whose value or context
/// is not causal for the target.
TrainingSet build_training_set(const GrayImage& image, Coord target, const ContextLayout& layout,
                               int radius);

/// w_i = 1 / (|x - x_i|^2 + gamma).
std::vector<double> compute_weights(std::span<const int> target_context, const TrainingSet& training,
                                    double gamma);

struct WlsSolution {
  std::vector<double> alpha;
  bool ridge = false;     // a ridge term was added to the normal matrix
  bool fallback = false;  // unsolvable; alpha averages the context
};

/// Normal-equation accumulator for min sum_i w_i (y_i - alpha . x_i)^2.
class NormalEquations {
 public:
  explicit NormalEquations(int n);

  void reset();
  void add(std::span<const double> x, double y, double weight);
  std::size_t samples() const noexcept { return samples_; }

  /// Cholesky solve. When the pivot-ratio condition estimate exceeds 1e12 or
  /// the matrix is not positive definite, lambda = 1e-6 * trace / n is added
  /// to the diagonal; if that still fails, or fewer than two samples were
  /// added, the result is the averaging fallback.
  WlsSolution solve() const;

  std::span<const double> matrix() const noexcept { return a_; }  // n*n, upper triangle filled
  std::span<const double> rhs() const noexcept { return b_; }

 private:
  int n_;
  std::size_t samples_ = 0;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Solves the weighted least-squares problem for X (m x n, row-major).
WlsSolution solve_wls(std::span<const double> x, std::span<const double> y,
                      std::span<const double> w, int n);

int predict_med(int west, int north, int north_west);
/// CALIC gradient-adjusted prediction, real-valued before rounding.
double predict_gap(int w, int ww, int n, int nn, int nw, int ne, int nne);

/// Rounds half away from zero after clamping to [0, 255].
int quantize_prediction(double value);

/// Per-pixel predictor bound to one image geometry. Holds scratch buffers, so
/// one instance must not be shared between threads.
class PixelPredictor {
 public:
  PixelPredictor(const PredictorConfig& config, int width, int height);

  const PredictorConfig& config() const noexcept { return config_; }
  const ContextLayout& layout() const noexcept { return layout_; }

  /// Integer prediction for the interior pixel `target`. Reads only pixels
  /// that are causal for the target, so embed- and extract-time calls agree.
  int predict(const GrayImage& image, Coord target);

  /// Real-valued prediction before clamping and rounding.
  double predict_real(const GrayImage& image, Coord target);

  /// Offsets used for targets far from the border; exposed for tests.
  std::span<const Offset> interior_training_offsets() const noexcept { return fast_offsets_; }

 private:
  double predict_ls(const GrayImage& image, Coord target);
  bool fast_path(Coord target) const;

  PredictorConfig config_;
  int width_;
  int height_;
  ContextLayout layout_;
  std::vector<Offset> fast_offsets_;
  std::vector<long> fast_linear_;
  std::vector<long> layout_linear_;
  NormalEquations normal_;
  std::vector<double> target_ctx_;
  std::vector<double> sample_ctx_;
};

/// Convenience single-shot prediction; `pass` must match the target's parity.
int predict(const GrayImage& image, Coord target, Pass pass, const PredictorConfig& config);

}  // namespace rdh

#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "rdh/error.hpp"
#include "rdh/predictor.hpp"
#include "support/synthetic.hpp"

using namespace rdh;

namespace {

// Independent oracle: alpha = pinv(sqrt(W) X) sqrt(W) Y via SVD.
Eigen::VectorXd pinv_oracle(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& w, int n) {
  const int m = static_cast<int>(y.size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double s = std::sqrt(w[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n; ++j) a(i, j) = s * x[static_cast<std::size_t>(i * n + j)];
    b(i) = s * y[static_cast<std::size_t>(i)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd inv = svd.singularValues();
  for (int i = 0; i < inv.size(); ++i) inv(i) = inv(i) > 1e-12 * inv(0) ? 1.0 / inv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * b;
}

// Composed reference path for one target: training set, weights, solve.
double reference_prediction(const GrayImage& img, Coord t, const PredictorConfig& cfg) {
  const auto layout = ContextLayout::nearest_causal(cfg.context_size);
  const auto ctx = extract_context(img, t, layout);
  const auto set = build_training_set(img, t, layout, cfg.train_radius);
  std::vector<double> w = cfg.kind == PredictorKind::WLS ? compute_weights(ctx, set, cfg.gamma)
                                                         : std::vector<double>(set.size(), 1.0);
  const auto sol = solve_wls(set.x, set.y, w, set.n);
  double v = 0.0;
  for (std::size_t k = 0; k < ctx.size(); ++k) v += sol.alpha[k] * ctx[k];
  return v;
}

}  // namespace

TEST_CASE("default layout is the ten nearest causal neighbours") {
  const auto layout = ContextLayout::nearest_causal(10);
  const std::vector<Offset> expected{{-1, 0}, {0, -1}, {0, 1},  {1, 0},   {-1, -1},
                                     {-1, 1}, {-2, 0}, {0, -2}, {-2, -1}, {-2, 1}};
  CHECK(std::vector<Offset>(layout.offsets().begin(), layout.offsets().end()) == expected);
  CHECK(layout.reach() == 2);
  CHECK_THROWS_AS(ContextLayout::nearest_causal(0), Error);
  CHECK_THROWS_AS(ContextLayout::nearest_causal(kMaxContextSize + 1), Error);
  CHECK_THROWS_AS(ContextLayout({{1, 1}}), Error);  // same pass, later in raster order
}

TEST_CASE("extract_context") {
  const auto layout = ContextLayout::nearest_causal(10);
  SUBCASE("constant image") {
    const GrayImage img(8, 8, 100);
    CHECK(extract_context(img, {3, 4}, layout) == std::vector<int>(10, 100));
  }
  SUBCASE("ramp p(r,c) = 10r + c at (2,2)") {
    GrayImage img(5, 5);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) img.at(r, c) = static_cast<std::uint8_t>(10 * r + c);
    CHECK(extract_context(img, {2, 2}, layout) == std::vector<int>{12, 21, 23, 32, 11, 13, 2, 20, 1, 3});
  }
  SUBCASE("offsets outside the image clamp to the border") {
    GrayImage img(5, 5);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) img.at(r, c) = static_cast<std::uint8_t>(10 * r + c);
    const auto ctx = extract_context(img, {1, 1}, layout);
    CHECK(ctx[6] == img.at(0, 1));  // (-2, 0) -> row -1 -> row 0
    CHECK(ctx[7] == img.at(1, 0));  // (0, -2) -> col -1 -> col 0
    CHECK(ctx[8] == img.at(0, 0));  // (-2, -1)
  }
}

TEST_CASE("causality") {
  CHECK(is_causal(10, 10, {4, 4}, {4, 5}));    // other pass
  CHECK(is_causal(10, 10, {4, 4}, {3, 5}));    // same pass, earlier
  CHECK_FALSE(is_causal(10, 10, {4, 4}, {5, 5}));  // same pass, later
  CHECK_FALSE(is_causal(10, 10, {4, 4}, {4, 4}));
  CHECK(is_causal(10, 10, {4, 4}, {9, 9}));    // border
}

TEST_CASE("training set") {
  std::mt19937_64 rng(3);
  const GrayImage img = testing::textured_image(64, 64, rng);
  const auto layout = ContextLayout::nearest_causal(10);

  SUBCASE("interior target uses the full window") {
    PixelPredictor p({PredictorKind::WLS, 10, 10, 1.0}, 64, 64);
    const auto set = build_training_set(img, {32, 32}, layout, 10);
    CHECK(set.size() == p.interior_training_offsets().size());
    CHECK(set.size() > 150);
  }
  SUBCASE("corner target sees few samples") {
    const GrayImage tiny(4, 4, 50);
    const auto set = build_training_set(tiny, {1, 1}, layout, 10);
    CHECK(set.size() < 10);
  }
  SUBCASE("every sample and every context pixel is causal") {
    for (Coord t : {Coord{1, 1}, Coord{2, 7}, Coord{30, 31}, Coord{62, 62}, Coord{40, 1}}) {
      const auto set = build_training_set(img, t, layout, 6);
      for (std::size_t i = 0; i < set.size(); ++i) {
        const Coord p = set.coords[i];
        CHECK(p != t);
        CHECK(is_causal(64, 64, t, p));
        for (const auto& o : layout.offsets()) {
          const Coord q{std::clamp(p.row + o.dr, 0, 63), std::clamp(p.col + o.dc, 0, 63)};
          CHECK(is_causal(64, 64, t, q));
        }
        CHECK(set.y[i] == img.at(p.row, p.col));
      }
    }
  }
  SUBCASE("a later same-pass pixel is never a sample") {
    const auto set = build_training_set(img, {20, 20}, layout, 10);
    for (const auto& p : set.coords) {
      const bool same_pass = ((p.row + p.col) & 1) == 0;
      if (same_pass) CHECK(p < Coord{20, 20});
    }
  }
}

TEST_CASE("weights") {
  TrainingSet set;
  set.n = 2;
  set.x = {1, 1, 4, 1, 3, 2, 2, 1};
  set.y = {0, 0, 0, 0};
  const auto w = compute_weights(std::vector<int>{1, 1}, set, 1.0);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.1));          // distance 9
  CHECK(w[2] == doctest::Approx(1.0 / 6.0));    // distance 5
  CHECK(w[3] == doctest::Approx(0.5));          // distance 1

  TrainingSet far;
  far.n = 1;
  far.x = {10.0 + std::sqrt(99.0)};
  far.y = {0};
  CHECK(compute_weights(std::vector<int>{10}, far, 1.0)[0] == doctest::Approx(0.01));

  TrainingSet pair;
  pair.n = 1;
  pair.x = {std::sqrt(3.0), 1.0};
  pair.y = {0, 0};
  const auto wp = compute_weights(std::vector<int>{0}, pair, 1.0);
  CHECK(wp[0] == doctest::Approx(0.25));
  CHECK(wp[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(compute_weights(std::vector<int>{0}, pair, 0.0), Error);
}

TEST_CASE("solve_wls") {
  SUBCASE("exact fit") {
    for (double w2 : {0.1, 1.0, 7.0}) {
      const auto sol = solve_wls(std::vector<double>{1, 2}, std::vector<double>{2, 4},
                                 std::vector<double>{1.0, w2}, 1);
      CHECK_FALSE(sol.fallback);
      CHECK(sol.alpha[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
  }

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> pw(0.05, 2.0);

  SUBCASE("matches the pseudo-inverse oracle") {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 10, m = 10 + trial % 30;
      std::vector<double> x(static_cast<std::size_t>(m * n)), y(static_cast<std::size_t>(m)),
          w(static_cast<std::size_t>(m));
      for (auto& v : x) v = g(rng);
      for (auto& v : y) v = g(rng);
      for (auto& v : w) v = pw(rng);
      const auto sol = solve_wls(x, y, w, n);
      const Eigen::VectorXd ref = pinv_oracle(x, y, w, n);
      for (int j = 0; j < n; ++j) {
        CHECK(sol.alpha[static_cast<std::size_t>(j)] == doctest::Approx(ref(j)).epsilon(1e-6));
      }
    }
  }

  SUBCASE("identity and uniform weights reduce to ordinary least squares") {
    const int n = 6, m = 40;
    std::vector<double> x(static_cast<std::size_t>(m * n)), y(static_cast<std::size_t>(m));
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    const auto ls = solve_wls(x, y, std::vector<double>(m, 1.0), n);
    const auto scaled = solve_wls(x, y, std::vector<double>(m, 3.5), n);
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b(i) = y[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) a(i, j) = x[static_cast<std::size_t>(i * n + j)];
    }
    const Eigen::VectorXd ols = a.colPivHouseholderQr().solve(b);
    for (int j = 0; j < n; ++j) {
      CHECK(ls.alpha[static_cast<std::size_t>(j)] == doctest::Approx(ols(j)).epsilon(1e-9));
      CHECK(std::abs(ls.alpha[static_cast<std::size_t>(j)] - scaled.alpha[static_cast<std::size_t>(j)]) <= 1e-9);
    }
  }

  SUBCASE("normal-equation residual") {
    const int n = 10, m = 60;
    std::vector<double> x(static_cast<std::size_t>(m * n)), y(static_cast<std::size_t>(m)),
        w(static_cast<std::size_t>(m));
    for (auto& v : x) v = 100.0 + 40.0 * g(rng);
    for (auto& v : y) v = 100.0 + 40.0 * g(rng);
    for (auto& v : w) v = pw(rng);
    NormalEquations eq(n);
    for (int i = 0; i < m; ++i) {
      eq.add(std::span<const double>(x).subspan(static_cast<std::size_t>(i * n), n), y[static_cast<std::size_t>(i)],
             w[static_cast<std::size_t>(i)]);
    }
    const auto sol = eq.solve();
    REQUIRE_FALSE(sol.fallback);
    REQUIRE_FALSE(sol.ridge);
    const auto a = eq.matrix();
    const auto b = eq.rhs();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = -b[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        const double aij = i <= j ? a[static_cast<std::size_t>(i * n + j)] : a[static_cast<std::size_t>(j * n + i)];
        r += aij * sol.alpha[static_cast<std::size_t>(j)];
      }
      num += r * r;
      den += b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    }
    CHECK(std::sqrt(num / den) <= 1e-8);
  }

  SUBCASE("rank-deficient systems take the ridge") {
    // Identical rows: X^T W X has rank one.
    std::vector<double> x, y, w;
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 3; ++j) x.push_back(80.0);
      y.push_back(80.0);
      w.push_back(1.0);
    }
    const auto sol = solve_wls(x, y, w, 3);
    CHECK(sol.ridge);
    CHECK_FALSE(sol.fallback);
    double pred = 0.0;
    for (double a : sol.alpha) pred += a * 80.0;
    CHECK(pred == doctest::Approx(80.0).epsilon(1e-3));
  }

  SUBCASE("too few samples fall back to the context mean") {
    const auto none = solve_wls({}, {}, {}, 4);
    CHECK(none.fallback);
    CHECK(none.alpha == std::vector<double>(4, 0.25));
    const auto one = solve_wls(std::vector<double>{1, 2}, std::vector<double>{3}, std::vector<double>{1}, 2);
    CHECK(one.fallback);
  }

  SUBCASE("all-zero system falls back") {
    const auto sol = solve_wls(std::vector<double>(20, 0.0), std::vector<double>(10, 0.0),
                               std::vector<double>(10, 1.0), 2);
    CHECK(sol.fallback);
  }

  CHECK_THROWS_AS(solve_wls(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2},
                            std::vector<double>{1, 1}, 2),
                  Error);
}

TEST_CASE("MED and GAP") {
  CHECK(predict_med(10, 20, 5) == 20);
  CHECK(predict_med(10, 20, 25) == 10);
  CHECK(predict_med(10, 20, 15) == 15);
  CHECK(predict_gap(100, 100, 100, 100, 100, 100, 100) == 100.0);
  CHECK(predict_gap(50, 50, 200, 200, 50, 200, 200) == 200.0);          // sharp horizontal edge
  CHECK(predict_gap(100, 96, 110, 104, 102, 112, 108) == 107.5);        // no adjustment band
  CHECK(predict_gap(90, 90, 100, 80, 100, 100, 100) == 93.75);          // weak horizontal edge
}

TEST_CASE("quantize_prediction") {
  CHECK(quantize_prediction(2.5) == 3);
  CHECK(quantize_prediction(2.49) == 2);
  CHECK(quantize_prediction(-0.5) == 0);
  CHECK(quantize_prediction(254.5) == 255);
  CHECK(quantize_prediction(900.0) == 255);
}

TEST_CASE("pixel predictor") {
  SUBCASE("constant images predict exactly, for any offset k") {
    for (int k : {0, 17, 100, 255}) {
      const GrayImage img(40, 40, static_cast<std::uint8_t>(k));
      for (auto kind : {PredictorKind::MED, PredictorKind::GAP, PredictorKind::LS, PredictorKind::WLS}) {
        PixelPredictor p({kind, 10, 6, 1.0}, 40, 40);
        CHECK(p.predict(img, {20, 20}) == k);
        CHECK(p.predict(img, {1, 2}) == k);
      }
    }
  }

  SUBCASE("fast path matches the composed reference path bit for bit") {
    std::mt19937_64 rng(5);
    const GrayImage img = testing::textured_image(40, 36, rng, 6);
    for (auto kind : {PredictorKind::LS, PredictorKind::WLS}) {
      const PredictorConfig cfg{kind, 10, 5, 1.0};
      PixelPredictor p(cfg, 40, 36);
      for (int r = 1; r < 35; ++r) {
        for (int c = 1; c < 39; ++c) {
          CHECK(p.predict_real(img, {r, c}) == reference_prediction(img, {r, c}, cfg));
        }
      }
    }
  }

  SUBCASE("prediction ignores non-causal pixels") {
    std::mt19937_64 rng(9);
    GrayImage img = testing::textured_image(48, 48, rng, 5);
    PixelPredictor p({PredictorKind::WLS, 10, 6, 1.0}, 48, 48);
    const Coord t{24, 24};
    const int before = p.predict(img, t);
    // Scramble the target and every later white pixel.
    for (int r = 1; r < 47; ++r) {
      for (int c = 1; c < 47; ++c) {
        if (((r + c) & 1) == 0 && !(Coord{r, c} < t)) img.at(r, c) = static_cast<std::uint8_t>((r * 31 + c * 17) & 0xFF);
      }
    }
    CHECK(p.predict(img, t) == before);
  }

  SUBCASE("WLS beats LS on a two-texture image") {
    // Left half horizontal stripes, right half vertical stripes.
    GrayImage img(64, 64);
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c)
        img.at(r, c) = static_cast<std::uint8_t>(c < 32 ? 60 + 60 * (r % 4 < 2) : 60 + 60 * (c % 4 < 2));
    PixelPredictor ls({PredictorKind::LS, 10, 8, 1.0}, 64, 64);
    PixelPredictor wls({PredictorKind::WLS, 10, 8, 1.0}, 64, 64);
    long err_ls = 0, err_wls = 0;
    for (int r = 12; r < 52; ++r) {
      for (int c = 26; c < 38; ++c) {
        err_ls += std::abs(img.at(r, c) - ls.predict(img, {r, c}));
        err_wls += std::abs(img.at(r, c) - wls.predict(img, {r, c}));
      }
    }
    CHECK(err_wls <= err_ls);
  }

  CHECK_THROWS_AS(predict(GrayImage(8, 8, 1), {1, 2}, Pass::White, {}), Error);
  CHECK(predict(GrayImage(8, 8, 9), {1, 1}, Pass::White, {}) == 9);
  PixelPredictor p({}, 8, 8);
  CHECK_THROWS_AS(p.predict(GrayImage(8, 8, 0), {0, 3}), Error);
  CHECK_THROWS_AS(validate(PredictorConfig{PredictorKind::WLS, 10, 10, 0.0}), Error);
  CHECK(parse_predictor_kind("wls") == PredictorKind::WLS);
  CHECK_THROWS_AS(parse_predictor_kind("calic"), Error);
}

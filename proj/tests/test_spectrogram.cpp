#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "resplab/error.hpp"
#include "resplab/fft.hpp"
#include "resplab/io.hpp"
#include "resplab/spectrogram.hpp"
#include "support.hpp"

using namespace resplab;

namespace {

std::vector<double> noise(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_SUITE("spectrogram") {

TEST_CASE("fft against the naive DFT") {
  std::mt19937_64 rng(11);
  for (int n : {2, 4, 8, 64, 256, 1024}) {
    const auto x = noise(rng, static_cast<std::size_t>(n));
    const std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    const auto oracle = testing::naive_dft_magnitudes(x, ones);
    std::vector<std::complex<double>> buf(x.begin(), x.end());
    fft_inplace(buf);
    const double peak = *std::max_element(oracle.begin(), oracle.end());
    for (int k = 0; k <= n / 2; ++k) CHECK(std::abs(std::abs(buf[k]) - oracle[k]) <= 1e-9 * peak);
  }
  CHECK(is_power_of_two(256));
  CHECK_FALSE(is_power_of_two(100));
  CHECK_FALSE(is_power_of_two(0));
}

TEST_CASE("frame magnitudes match the oracle for every window") {
  std::mt19937_64 rng(5);
  const auto x = noise(rng, 1500);
  for (auto fn : {WindowFunction::Hann, WindowFunction::Hamming, WindowFunction::Rectangular}) {
    SpectrogramParams p;
    p.window_size = 128;
    p.hop_size = 50;
    p.window_fn = fn;
    const auto mags = frame_magnitudes(x, p);
    REQUIRE(mags.size() == frame_count(x.size(), 128, 50));
    const auto w = make_window(fn, 128);
    for (std::size_t t = 0; t < mags.size(); ++t) {
      const auto oracle = testing::naive_dft_magnitudes(std::span(x).subspan(t * 50, 128), w);
      const double peak = *std::max_element(oracle.begin(), oracle.end());
      for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(std::abs(mags[t][k] - oracle[k]) <= 1e-9 * peak);
    }
  }
}

TEST_CASE("Parseval with a rectangular window") {
  std::mt19937_64 rng(9);
  const auto x = noise(rng, 256);
  SpectrogramParams p;
  p.window_size = 256;
  p.hop_size = 256;
  p.window_fn = WindowFunction::Rectangular;
  const auto mags = frame_magnitudes(x, p);
  REQUIRE(mags.size() == 1);
  double time_energy = 0;
  for (double v : x) time_energy += v * v;
  double freq_energy = mags[0][0] * mags[0][0] + mags[0][128] * mags[0][128];
  for (int k = 1; k < 128; ++k) freq_energy += 2 * mags[0][k] * mags[0][k];
  CHECK(freq_energy / 256 == doctest::Approx(time_energy).epsilon(1e-12));
}

TEST_CASE("periodic windows") {
  const auto hann = make_window(WindowFunction::Hann, 8);
  CHECK(hann[0] == 0.0);
  CHECK(hann[4] == doctest::Approx(1.0));
  CHECK(hann[2] == doctest::Approx(0.5));
  const auto ham = make_window(WindowFunction::Hamming, 8);
  CHECK(ham[0] == doctest::Approx(0.08));
  const auto rect = make_window(WindowFunction::Rectangular, 8);
  CHECK(std::all_of(rect.begin(), rect.end(), [](double v) { return v == 1.0; }));
  CHECK(parse_window_function("hamming") == WindowFunction::Hamming);
  CHECK(code_of([] { parse_window_function("kaiser"); }) == ErrorCode::InvalidParams);
}

TEST_CASE("full-scale sine peaks at its bin at 0 dB") {
  const auto x = testing::sine(1000.0, 1.0, 4000, 4000);
  const Spectrogram spec = compute_spectrogram(x, 4000, SpectrogramParams{});
  REQUIRE(spec.bins() == 129);
  CHECK(spec.bin_freqs_hz[64] == 1000.0);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.bins(); ++k)
      if (spec.at(k, t) > spec.at(best, t)) best = k;
    CHECK(best == 64);
    CHECK(std::abs(spec.at(64, t)) <= 0.1);
  }
}

TEST_CASE("scaling by 0.1 shifts by -20 dB") {
  std::mt19937_64 rng(2);
  auto x = noise(rng, 2048);
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return 0.1 * v; });
  const auto a = compute_spectrogram(x, 4000, SpectrogramParams{});
  const auto b = compute_spectrogram(y, 4000, SpectrogramParams{});
  std::size_t compared = 0;
  for (std::size_t i = 0; i < a.values_db.size(); ++i) {
    if (b.values_db[i] <= a.params.floor_db) continue;
    CHECK(std::abs(b.values_db[i] - (a.values_db[i] - 20.0)) <= 1e-6);
    ++compared;
  }
  CHECK(compared > a.values_db.size() / 2);
}

TEST_CASE("silence sits on the floor") {
  SpectrogramParams p;
  p.floor_db = -60;
  const auto spec = compute_spectrogram(std::vector<double>(1000, 0.0), 4000, p);
  CHECK(std::all_of(spec.values_db.begin(), spec.values_db.end(), [](double v) { return v == -60.0; }));
}

TEST_CASE("shape, frame times and bin frequencies") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int win = 1 << std::uniform_int_distribution<int>(4, 10)(rng);
    const int hop = std::uniform_int_distribution<int>(1, win)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(win, 6000)(rng);
    SpectrogramParams p;
    p.window_size = win;
    p.hop_size = hop;
    const auto spec = compute_spectrogram(noise(rng, n), 3000, p);
    CHECK(spec.bins() == static_cast<std::size_t>(win / 2 + 1));
    CHECK(spec.frames() == (n - win) / hop + 1);
    CHECK(spec.values_db.size() == spec.bins() * spec.frames());
    CHECK(spec.frame_times_ms[1 % spec.frames()] == doctest::Approx((1 % spec.frames()) * hop * 1000.0 / 3000));
    CHECK(spec.bin_freqs_hz.back() == doctest::Approx(1500.0));
    CHECK(*std::min_element(spec.values_db.begin(), spec.values_db.end()) >= p.floor_db);
  }
}

TEST_CASE("raising the floor only clamps") {
  std::mt19937_64 rng(6);
  const auto x = noise(rng, 3000);
  SpectrogramParams lo, hi;
  lo.floor_db = -120;
  hi.floor_db = -30;
  const auto a = compute_spectrogram(x, 4000, lo);
  const auto b = compute_spectrogram(x, 4000, hi);
  for (std::size_t i = 0; i < a.values_db.size(); ++i) CHECK(b.values_db[i] == std::max(-30.0, a.values_db[i]));
}

TEST_CASE("invalid parameters and short input") {
  SpectrogramParams p;
  p.hop_size = 512;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidParams);
  p = {};
  p.window_size = 300;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidParams);
  p = {};
  p.floor_db = 0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { compute_spectrogram(std::vector<double>(100), 4000, SpectrogramParams{}); }) == ErrorCode::TooShort);
}

TEST_CASE("tiles") {
  const auto x = testing::sine(500.0, 0.5, 4000, 8000);
  const auto spec = compute_spectrogram(x, 4000, SpectrogramParams{});
  const Tile full = full_tile(spec);
  CHECK(full.rows() == spec.bins());
  CHECK(full.cols() == spec.frames());

  // 1 s to 1.5 s, 0 to 1000 Hz: frame starts at 16 ms steps, bins at 15.625 Hz.
  const Tile t = render_tile(spec, 1000, 1500, 0, 1000);
  CHECK(t.bin_begin == 0);
  CHECK(t.bin_end == 64);
  CHECK(t.frame_begin == 63);  // 62.5 -> first start >= 1000 ms
  CHECK(t.frame_end == 94);
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) CHECK(t.at(r, c) == spec.at(t.bin_begin + r, t.frame_begin + c));
  CHECK(code_of([&] { render_tile(spec, 5000, 6000, 0, 2000); }) == ErrorCode::EmptyTile);
  CHECK(code_of([&] { render_tile(spec, 0, 1000, 100, 100); }) == ErrorCode::EmptyTile);
}

TEST_CASE("tile boundaries") {
  const auto spec = compute_spectrogram(std::vector<double>(4000, 0.25), 4000, SpectrogramParams{});
  const Tile one = render_tile(spec, 160, 176, 0, 4000);  // exactly one hop of 16 ms
  CHECK(one.cols() == 1);
  CHECK(one.frame_begin == 10);
  CHECK(one.rows() == spec.bins());
  CHECK(code_of([&] { render_tile(spec, 0, 1000, 2001, 5000); }) == ErrorCode::EmptyTile);
}

TEST_CASE("deterministic output") {
  std::mt19937_64 rng(8);
  const auto x = noise(rng, 3000);
  CHECK(compute_spectrogram(x, 4000, SpectrogramParams{}).values_db ==
        compute_spectrogram(x, 4000, SpectrogramParams{}).values_db);
}

TEST_CASE("graymap and PGM encoding") {
  CHECK(graymap_level(-80, -80) == 0);
  CHECK(graymap_level(0, -80) == 255);
  CHECK(graymap_level(-40, -80) == 128);
  CHECK(graymap_level(-200, -80) == 0);
  CHECK(graymap_level(5, -80) == 255);

  Tile t;
  t.bin_end = 2;
  t.frame_end = 3;
  t.floor_db = -80;
  t.values_db = {-80, -40, 0, 0, 0, -80};
  const std::string pgm = encode_pgm(t);
  const std::string head = "P5\n3 2\n255\n";
  REQUIRE(pgm.size() == head.size() + 6);
  CHECK(pgm.substr(0, head.size()) == head);
  // lowest bin is the first image row
  CHECK(static_cast<unsigned char>(pgm[head.size() + 0]) == 0);
  CHECK(static_cast<unsigned char>(pgm[head.size() + 1]) == 128);
  CHECK(static_cast<unsigned char>(pgm[head.size() + 3]) == 255);
}

TEST_CASE("CSV export") {
  testing::TempDir dir;
  const auto spec = compute_spectrogram(testing::sine(250.0, 1.0, 4000, 512), 4000, SpectrogramParams{});
  export_matrix(spec, dir / "s.csv", MatrixFormat::Csv);
  const std::string text = read_file_text(dir / "s.csv");
  CHECK(text.rfind("# window_size=256", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(spec.bins() + 1));
  const auto second_line = text.substr(text.find('\n') + 1);
  CHECK(std::count(second_line.begin(), second_line.begin() + static_cast<long>(second_line.find('\n')), ',') ==
        static_cast<long>(spec.frames() - 1));
  export_matrix(spec, dir / "s.pgm", MatrixFormat::Pgm);
  CHECK(read_file_text(dir / "s.pgm").rfind("P5\n" + std::to_string(spec.frames()) + " 129\n", 0) == 0);
}

}  // TEST_SUITE

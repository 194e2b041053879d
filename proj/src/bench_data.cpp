#include "nnverify/bench_data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nnverify/error.hpp"

namespace nnverify {

namespace {

// Boxy font. A and O differ in six pixels: A's crossbar and O's bottom bar.
constexpr const char *glyphs[5] = {
    "#####"
    "#...#"
    "#####"
    "#...#"
    "#...#",

    "#####"
    "#...."
    "####."
    "#...."
    "#####",

    "#####"
    "..#.."
    "..#.."
    "..#.."
    "#####",

    "#####"
    "#...#"
    "#...#"
    "#...#"
    "#####",

    "#...#"
    "#...#"
    "#...#"
    "#...#"
    "#####",
};

// std distributions differ between standard libraries; this does not.
double unit(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t pixel_distance(const Image &a, const Image &b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    n += a[i] != b[i] ? 1 : 0;
  return n;
}

} // namespace

std::size_t vowel_class(char vowel) {
  const auto pos = vowels.find(vowel);
  if (pos == std::string_view::npos)
    throw Error(ErrorCode::invalid_argument,
                std::string("not a vowel: '") + vowel + "'");
  return pos;
}

Image vowel_bitmap(char vowel) {
  const char *g = glyphs[vowel_class(vowel)];
  Image img(image_side * image_side);
  for (std::size_t i = 0; i < img.size(); ++i)
    img[i] = g[i] == '#' ? 1.0 : 0.0;
  return img;
}

Image add_noise(const Image &img, double rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image out = img;
  for (auto &p : out)
    if (unit(rng) < rate)
      p = 1.0 - p;
  return out;
}

Image random_non_vocalic(std::uint64_t seed, std::size_t min_distance) {
  std::mt19937_64 rng(seed);
  for (;;) {
    Image img(image_side * image_side);
    for (auto &p : img)
      p = unit(rng) < 0.5 ? 1.0 : 0.0;
    bool far = true;
    for (char v : vowels)
      far = far && pixel_distance(img, vowel_bitmap(v)) >= min_distance;
    if (far)
      return img;
  }
}

std::vector<BenchFile> generate_bench(const BenchOptions &options) {
  std::vector<BenchFile> files;
  std::mt19937_64 seeds(options.seed);
  for (char v : vowels) {
    files.push_back({std::string(1, v), std::string(1, v), vowel_bitmap(v)});
    for (std::size_t i = 0; i < options.noisy_per_vowel; ++i)
      files.push_back({std::string(1, v) + "_noisy_" + std::to_string(i),
                       std::string(1, v),
                       add_noise(vowel_bitmap(v), options.noise_rate, seeds())});
  }
  for (std::size_t i = 0; i < options.non_vocalic; ++i)
    files.push_back({"none_" + std::to_string(i), "none",
                     random_non_vocalic(seeds())});
  return files;
}

std::string to_pgm(const Image &img, std::size_t width, std::size_t height) {
  if (img.size() != width * height)
    throw Error(ErrorCode::shape_mismatch, "image size differs from width*height");
  std::ostringstream out;
  out << "P2\n" << width << ' ' << height << "\n255\n";
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double v = std::clamp(img[r * width + c], 0.0, 1.0);
      out << (c ? " " : "") << static_cast<int>(std::lround(v * 255.0));
    }
    out << '\n';
  }
  return out.str();
}

void write_bench(const std::vector<BenchFile> &files, const std::string &dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json index = nlohmann::json::array();
  for (const auto &f : files) {
    const auto path = std::filesystem::path(dir) / (f.name + ".pgm");
    std::ofstream out(path);
    if (!out)
      throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << to_pgm(f.image, image_side, image_side);
    index.push_back({{"file", f.name + ".pgm"}, {"label", f.label}});
  }
  std::ofstream out(std::filesystem::path(dir) / "index.json");
  out << index.dump(2) << '\n';
}

Image parse_pgm(std::string_view text, std::size_t *width, std::size_t *height) {
  // Strip comments, then read whitespace-separated tokens.
  std::string clean;
  bool comment = false;
  for (char ch : text) {
    if (ch == '#')
      comment = true;
    if (ch == '\n')
      comment = false;
    if (!comment)
      clean.push_back(ch);
  }
  std::istringstream in(clean);
  std::string magic;
  long long w = 0, h = 0, maxval = 0;
  if (!(in >> magic) || magic != "P2")
    throw ParseError(1, "not an ASCII PGM (P2) image");
  if (!(in >> w >> h >> maxval) || w <= 0 || h <= 0 || maxval <= 0)
    throw ParseError(2, "bad PGM header");
  Image img;
  img.reserve(static_cast<std::size_t>(w * h));
  for (long long i = 0; i < w * h; ++i) {
    long long v = 0;
    if (!(in >> v) || v < 0 || v > maxval)
      throw ParseError(3, "bad or missing PGM pixel " + std::to_string(i));
    img.push_back(static_cast<double>(v) / static_cast<double>(maxval));
  }
  if (width)
    *width = static_cast<std::size_t>(w);
  if (height)
    *height = static_cast<std::size_t>(h);
  return img;
}

Image load_pgm(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pgm(ss.str());
}

} // namespace nnverify

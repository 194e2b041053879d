#pragma once

// 5x5 vocalic bitmaps, seeded noisy variants and PGM (P2) image files.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nnverify {

using Image = std::vector<double>; // row-major, values in [0,1]

inline constexpr std::size_t image_side = 5;
inline constexpr std::string_view vowels = "AEIOU";

/// Base bitmap of a vowel (A, E, I, O or U); throws for anything else.
Image vowel_bitmap(char vowel);
std::size_t vowel_class(char vowel);

/// Flips each pixel independently with probability `rate`.
Image add_noise(const Image &img, double rate, std::uint64_t seed);

/// Uniform random binary image that differs from every vowel in at least
/// `min_distance` pixels.
Image random_non_vocalic(std::uint64_t seed, std::size_t min_distance = 4);

struct BenchFile {
  std::string name;
  std::string label; // vowel letter or "none"
  Image image;
};

struct BenchOptions {
  std::uint64_t seed = 0;
  std::size_t noisy_per_vowel = 20;
  double noise_rate = 0.04;
  std::size_t non_vocalic = 100;
};

std::vector<BenchFile> generate_bench(const BenchOptions &options);

/// Writes the set as PGM files plus an index.json into `dir`.
void write_bench(const std::vector<BenchFile> &files, const std::string &dir);

std::string to_pgm(const Image &img, std::size_t width, std::size_t height);
/// Pixel values are scaled to [0,1] by the file's maxval.
Image parse_pgm(std::string_view text, std::size_t *width = nullptr,
                std::size_t *height = nullptr);
Image load_pgm(const std::string &path);

} // namespace nnverify

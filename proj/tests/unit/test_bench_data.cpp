#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nnverify/bench_data.hpp"
#include "nnverify/error.hpp"
#include "nnverify/verifier.hpp"

using namespace nnverify;

TEST_CASE("vowel bitmaps") {
  for (char v : vowels) {
    const auto img = vowel_bitmap(v);
    CHECK(img.size() == 25);
    for (double p : img)
      CHECK((p == 0.0 || p == 1.0));
  }
  CHECK(vowel_class('A') == 0);
  CHECK(vowel_class('U') == 4);
  CHECK_THROWS_AS(vowel_bitmap('B'), Error);
  CHECK(euclidean_distance(vowel_bitmap('A'), vowel_bitmap('O')) ==
        doctest::Approx(2.449).epsilon(0.0005));
}

TEST_CASE("noise is seeded") {
  const auto a = add_noise(vowel_bitmap('E'), 0.3, 7);
  CHECK(a == add_noise(vowel_bitmap('E'), 0.3, 7));
  CHECK(a != vowel_bitmap('E'));
  CHECK(add_noise(vowel_bitmap('E'), 0.0, 7) == vowel_bitmap('E'));
}

TEST_CASE("non-vocalic images keep their distance") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto img = random_non_vocalic(s);
    for (char v : vowels) {
      std::size_t diff = 0;
      const auto ref = vowel_bitmap(v);
      for (std::size_t i = 0; i < 25; ++i)
        diff += img[i] != ref[i];
      REQUIRE(diff >= 4);
    }
  }
}

TEST_CASE("bench set shape") {
  const auto set = generate_bench({});
  CHECK(set.size() == 5 + 5 * 20 + 100);
  CHECK(set.front().label == "A");
  CHECK(set.back().label == "none");
  const auto again = generate_bench({});
  CHECK(set.back().image == again.back().image);
}

TEST_CASE("pgm round trip") {
  const auto img = vowel_bitmap('I');
  const auto text = to_pgm(img, 5, 5);
  CHECK(text.rfind("P2", 0) == 0);
  std::size_t w = 0, h = 0;
  CHECK(parse_pgm(text, &w, &h) == img);
  CHECK(w == 5);
  CHECK(h == 5);
  CHECK(parse_pgm("P2\n# comment\n2 1\n4\n0 2\n") == Image{0, 0.5});
  CHECK_THROWS_AS(parse_pgm("P5\n1 1\n255\n0\n"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2\n2 2\n255\n0 1 2\n"), ParseError);
}

TEST_CASE("write bench files") {
  const auto dir = std::filesystem::temp_directory_path() / "nnverify_bench_test";
  std::filesystem::remove_all(dir);
  BenchOptions opts;
  opts.noisy_per_vowel = 1;
  opts.non_vocalic = 2;
  const auto set = generate_bench(opts);
  write_bench(set, dir.string());
  CHECK(std::filesystem::exists(dir / "index.json"));
  CHECK(load_pgm((dir / (set[0].name + ".pgm")).string()) == set[0].image);
  std::filesystem::remove_all(dir);
}

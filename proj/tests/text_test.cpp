#include <gtest/gtest.h>

#include "kpa/random.hpp"
#include "kpa/text.hpp"

namespace kpa {
namespace {

TEST(Text, TrimAndLower) {
  EXPECT_EQ(trim("  a b \t\n"), "a b");
  EXPECT_EQ(trim(""), "");
  EXPECT_EQ(ascii_lower("AbC-\xC3\x89"), "abc-\xC3\x89");
  EXPECT_TRUE(iequals("Yes", "yES"));
  EXPECT_FALSE(iequals("Yes", "Ye"));
}

TEST(Text, TokenizeReplacesPunctuation) {
  EXPECT_EQ(tokenize("Vaccination, saves-lives!"), (std::vector<std::string>{"vaccination", "saves", "lives"}));
  EXPECT_TRUE(tokenize(" ... ").empty());
}

// Reference values of the 64-bit FNV-1a test vectors.
TEST(Text, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Random, SubstreamsDifferByName) {
  EXPECT_NE(derive_seed(42, "kmeans:T:pro"), derive_seed(42, "local-search:T:pro"));
  EXPECT_EQ(derive_seed(42, "x"), derive_seed(42, "x"));
}

TEST(Random, UniformIndexCoversRange) {
  Rng rng(1);
  std::vector<int> seen(7, 0);
  for (int k = 0; k < 7000; ++k) ++seen[uniform_index(rng, 7)];
  for (int c : seen) EXPECT_GT(c, 800);
}

}  // namespace
}  // namespace kpa

#include <doctest.h>

#include <set>

#include "csicl/util/digest.hpp"
#include "csicl/util/json_store.hpp"
#include "csicl/util/rng.hpp"
#include "csicl/util/text.hpp"
#include "csicl/util/unicode.hpp"
#include "support.hpp"

using namespace csicl;

TEST_SUITE("util") {
  TEST_CASE("sha256 matches the published test vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("splitmix64 reference stream") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(rng.next() == 0x06c45d188009454fULL);
  }

  TEST_CASE("below stays in range and covers it") {
    SplitMix64 rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
      const auto v = rng.below(6);
      REQUIRE(v < 6);
      seen.insert(v);
    }
    CHECK(seen.size() == 6);
  }

  TEST_CASE("derived seeds depend on every part and on order") {
    const auto a = derive_seed(42, {"x", "y"});
    CHECK(a == derive_seed(42, {"x", "y"}));
    CHECK(a != derive_seed(42, {"y", "x"}));
    CHECK(a != derive_seed(43, {"x", "y"}));
    CHECK(derive_seed(42, std::uint64_t{1}) != derive_seed(42, std::uint64_t{2}));
  }

  TEST_CASE("draw without replacement yields distinct indices") {
    SplitMix64 rng(1);
    const auto d = draw_without_replacement(10, 10, rng);
    CHECK(std::set<std::size_t>(d.begin(), d.end()).size() == 10);
    CHECK(draw_without_replacement(5, 0, rng).empty());
  }

  TEST_CASE("text helpers") {
    CHECK(trim("  a b \n") == "a b");
    CHECK(split_whitespace(" a  b\tc ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_lines("a\r\nb\n") == std::vector<std::string>{"a", "b", ""});
    CHECK(rfind_icase("The answer is A. the ANSWER is B", "the answer is") == 17);
    CHECK(format_fixed(0.126, 2) == "0.13");
    CHECK(format_fixed(2.5, 0) == "2");
  }

  TEST_CASE("unicode normalization") {
    CHECK(unicode::nfkc("４２") == "42");
    CHECK(unicode::to_lower("ÉCOLE") == "école");
    CHECK(unicode::script_of(U'한') == unicode::Script::hangul);
    CHECK(unicode::script_of(U'a') == unicode::Script::latin);
  }

  TEST_CASE("json store keeps the first writer") {
    test::TempDir dir;
    JsonStore store(dir.path());
    CHECK_FALSE(store.get("abc"));
    CHECK(store.put("abc", {{"v", 1}}));
    CHECK_FALSE(store.put("abc", {{"v", 2}}));
    CHECK(store.get("abc")->at("v") == 1);
  }

  TEST_CASE("canonical dump sorts keys and ends with a newline") {
    CHECK(canonical_dump({{"b", 1}, {"a", 2}}) == "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
  }
}

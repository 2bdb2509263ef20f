#include <doctest.h>

#include "csicl/codeswitch/ladder.hpp"
#include "csicl/codeswitch/mix_ratio.hpp"
#include "support.hpp"

using namespace csicl;

namespace {

const ParallelPair kDinner{"dinner", "나는 저녁을 빨리 먹었다.", "I ate dinner quickly.", language("ko")};
const ParallelPair kMeena{"meena", "미나야, 바구니에 장난감을 다 넣고 빨리 집에 가자.",
                          "Meena, put all the toys in the basket quickly, and go home.", language("ko")};

const char* kMeenaLadder =
    "Output:\n"
    "  1. 미나야, 바구니에 장난감을 다 넣고 빨리 집에 가자.\n"
    "  2. Meena, 바구니에 장난감을 다 put하고 빨리 집에 가자.\n"
    "  3. Meena, basket 안에다 all the toys를 빨리 put하고 집에 가자.\n"
    "  4. Meena, put all the toys in the basket quickly, 집에 가자.\n"
    "  5. Meena, put all the toys in the basket quickly, and go home.\n";

const char* kDinnerLadder =
    "  1. I ate dinner quickly.\n"
    "  2. I ate dinner 빨리.\n"
    "  3. I ate 저녁 빨리.\n"
    "  4. 나는 저녁 빨리 ate.\n"
    "  5. 나는 저녁을 빨리 먹었다.\n";

// A ladder whose second step is far too Korean.
const char* kJumpyLadder =
    "1. I ate dinner quickly.\n"
    "2. 나는 저녁을 빨리 ate.\n"
    "3. I ate 저녁 빨리.\n"
    "4. 나는 저녁 빨리 ate.\n"
    "5. 나는 저녁을 빨리 먹었다.\n";

}  // namespace

TEST_SUITE("codeswitch") {
  TEST_CASE("mix ratio by script") {
    const auto& en = english();
    const auto& ko = language("ko");
    CHECK(estimate_mix_ratio("I ate 저녁 빨리.", en, ko).fraction == doctest::Approx(0.5));
    CHECK(estimate_mix_ratio("나는 저녁을 빨리 먹었다.", en, ko).fraction == 1.0);
    CHECK(estimate_mix_ratio("I ate dinner quickly.", en, ko).fraction == 0.0);
    // Six whitespace tokens, three of them mostly Latin.
    const auto m = estimate_mix_ratio("John은 Mary가 yesterday 무엇을 샀는지 궁금해한다.", ko, en);
    CHECK(m.tokens == 6);
    CHECK(m.b_count == 3);
    CHECK(m.fraction == doctest::Approx(0.5));
  }

  TEST_CASE("mix ratio edge cases") {
    const auto r = estimate_mix_ratio("123 , !", english(), language("ko"));
    CHECK(r.no_signal);
    CHECK(r.fraction == 0.0);
    CHECK(estimate_mix_ratio("", english(), language("ko")).tokens == 0);
    // Same script: lexicons decide.
    const auto sw = estimate_mix_ratio("the cat na mbwa", english(), language("sw"));
    CHECK(sw.b_count == 1);
    CHECK(sw.classified == 2);
    CHECK_THROWS_AS(estimate_mix_ratio("x", language("ko"), language("ko")), std::invalid_argument);
  }

  TEST_CASE("numbered line parsing") {
    CHECK(parse_numbered_lines("Output:\n1. a\n2) b\n3. c", 3) == std::vector<std::string>{"a", "b", "c"});
    CHECK_THROWS_AS(parse_numbered_lines("1. a\n2. b\n3. c\n4. d", 5), LadderParseError);
    CHECK_THROWS_AS(parse_numbered_lines("1. a\n3. b", 2), LadderParseError);
  }

  TEST_CASE("scripted code-switched sentence is taken verbatim") {
    test::ScriptedGenerator gen({"I ate 저녁 빨리."});
    const PromptLibrary prompts;
    const auto cs = generate_cs(kDinner, english(), gen, prompts);
    CHECK(cs.text == "I ate 저녁 빨리.");
    CHECK(cs.matrix_lang == english());
    CHECK(cs.embedded_lang == language("ko"));
    CHECK(cs.embedded_fraction == doctest::Approx(0.5));
    const auto req = gen.requests().at(0);
    CHECK(req.user.find("I ate dinner quickly.") != std::string::npos);
    CHECK(req.system.find("Korean") != std::string::npos);
  }

  TEST_CASE("code-switch tag echo is stripped; degenerate matrix rejected") {
    test::ScriptedGenerator gen({"<Code-Switching> I ate 저녁 빨리."});
    const PromptLibrary prompts;
    CHECK(generate_cs(kDinner, english(), gen, prompts).text == "I ate 저녁 빨리.");
    CHECK_THROWS_AS(generate_cs(kDinner, language("zh"), gen, prompts), std::invalid_argument);
  }

  TEST_CASE("Korean to English example ladder") {
    test::ScriptedGenerator gen({"Meena, basket 안에다 all the toys를 빨리 put하고 집에 가자.", kMeenaLadder});
    const PromptLibrary prompts;
    const auto out = validate_and_regenerate(kMeena, Direction::tgt_to_en, {}, gen, prompts);
    CHECK(out.valid);
    CHECK(out.attempts == 1);
    CHECK(out.ladder.steps[4] == "Meena, put all the toys in the basket quickly, and go home.");
    CHECK(out.ladder.measured[0] == 0.0);
    CHECK(out.ladder.measured[4] == 1.0);
  }

  TEST_CASE("English source is a precondition error") {
    test::ScriptedGenerator gen({"x"});
    const PromptLibrary prompts;
    ParallelPair bad{"1", "I ate.", "I ate.", english()};
    CsSentence cs{"I ate.", english(), english(), 0.0};
    CHECK_THROWS_AS(generate_ladder(bad, cs, Direction::tgt_to_en, gen, prompts), std::invalid_argument);
  }

  TEST_CASE("four-line reply is a parse error with the attempt count") {
    test::ScriptedGenerator gen({"I ate 저녁 빨리.", "1. a\n2. b\n3. c\n4. d"});
    const PromptLibrary prompts;
    GenerationPolicy policy;
    policy.max_attempts = 2;
    try {
      validate_and_regenerate(kDinner, Direction::en_to_tgt, policy, gen, prompts);
      FAIL("expected LadderParseError");
    } catch (const LadderParseError& e) {
      CHECK(std::string(e.what()).find("after 2 attempts") != std::string::npos);
    }
  }

  TEST_CASE("ladder checks") {
    const GenerationPolicy policy;
    CHECK(check_ladder({0.0, 0.31, 0.48, 0.74, 1.0}, policy).accepted());
    const auto bad = check_ladder({0.0, 0.6, 0.5, 0.8, 1.0}, policy);
    CHECK_FALSE(bad.monotone);
    CHECK_FALSE(bad.accepted());
    CHECK_FALSE(check_ladder({0.1, 0.25, 0.5, 0.75, 1.0}, policy).endpoints_pure);
    CHECK_FALSE(check_ladder({0.0, 0.45, 0.5, 0.75, 1.0}, policy).within_band);
  }

  TEST_CASE("regeneration succeeds on the third attempt") {
    const std::string cs = "I ate 저녁 빨리.";
    test::ScriptedGenerator gen({cs, kJumpyLadder, cs, kJumpyLadder, cs, kDinnerLadder});
    const PromptLibrary prompts;
    const auto out = validate_and_regenerate(kDinner, Direction::en_to_tgt, {}, gen, prompts);
    CHECK(out.valid);
    CHECK(out.attempts == 3);
    CHECK(out.failures.size() == 2);
    CHECK(gen.calls() == 6);
  }

  TEST_CASE("exhausted attempts return the closest ladder flagged invalid") {
    test::ScriptedGenerator gen({"I ate 저녁 빨리.", kJumpyLadder});
    const PromptLibrary prompts;
    const auto out = validate_and_regenerate(kDinner, Direction::en_to_tgt, {}, gen, prompts);
    CHECK_FALSE(out.valid);
    CHECK(out.attempts == 3);
    CHECK(out.failures.size() == 3);
  }

  TEST_CASE("policy validation") {
    GenerationPolicy p;
    CHECK_NOTHROW(p.validate());
    p.max_attempts = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.step_tolerance = 0.6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }

  TEST_CASE("fallback generator produces valid ladders in both directions") {
    FallbackGenerator gen;
    const PromptLibrary prompts;
    for (Direction d : {Direction::tgt_to_en, Direction::en_to_tgt}) {
      const auto out = validate_and_regenerate(kMeena, d, {}, gen, prompts);
      CHECK(out.valid);
      CHECK(out.ladder.steps[0] == (d == Direction::tgt_to_en ? kMeena.source_text : kMeena.english_text));
      CHECK(out.ladder.steps[4] == (d == Direction::tgt_to_en ? kMeena.english_text : kMeena.source_text));
    }
  }

  TEST_CASE("fallback code-switch depends on the matrix language") {
    FallbackGenerator gen;
    const PromptLibrary prompts;
    const auto en = generate_cs(kMeena, english(), gen, prompts);
    const auto ko = generate_cs(kMeena, language("ko"), gen, prompts);
    CHECK(en.text != ko.text);
  }

  TEST_CASE("paraphrases") {
    FallbackGenerator gen;
    const PromptLibrary prompts;
    const auto p = generate_paraphrases("The cat sat on the mat.", english(), 4, gen, prompts);
    CHECK(p.size() == 4);
    test::ScriptedGenerator short_reply({"1. a\n2. b"});
    CHECK_THROWS_AS(generate_paraphrases("x y", english(), 4, short_reply, prompts), LadderParseError);
  }

  TEST_CASE("ladder outcome json round trip") {
    FallbackGenerator gen;
    const PromptLibrary prompts;
    const auto out = validate_and_regenerate(kDinner, Direction::en_to_tgt, {}, gen, prompts);
    const auto back = ladder_outcome_from_json(to_json(out));
    CHECK(back.ladder.steps == out.ladder.steps);
    CHECK(back.ladder.measured == out.ladder.measured);
    CHECK(back.cs.text == out.cs.text);
    CHECK(back.valid == out.valid);
  }

  TEST_CASE("demo cache serves repeats without generator calls") {
    test::TempDir dir;
    FallbackGenerator inner;
    test::CountingGenerator gen(inner);
    const PromptLibrary prompts;
    DemoCache cache(dir.path());
    const auto first = cache.ladder(kDinner, Direction::en_to_tgt, {}, gen, prompts);
    const int calls = gen.calls();
    CHECK_FALSE(first.from_cache);
    CHECK(calls > 0);
    const auto second = cache.ladder(kDinner, Direction::en_to_tgt, {}, gen, prompts);
    CHECK(second.from_cache);
    CHECK(gen.calls() == calls);
    CHECK(second.digest == first.digest);
    CHECK(second.outcome.ladder.steps == first.outcome.ladder.steps);
    CHECK(std::filesystem::exists(dir.path() / "ladders" / (first.digest + ".json")));

    GenerationPolicy tighter;
    tighter.step_tolerance = 0.1;
    CHECK(DemoCache::ladder_digest(kDinner, Direction::en_to_tgt, gen.id(), tighter) != first.digest);
    CHECK_FALSE(cache.find_ladder(kDinner, Direction::tgt_to_en, gen.id(), {}));

    const auto p1 = cache.paraphrases("The cat sat.", english(), 4, gen, prompts);
    const auto p2 = cache.paraphrases("The cat sat.", english(), 4, gen, prompts);
    CHECK(p2.from_cache);
    CHECK(p1.paraphrases == p2.paraphrases);
  }
}

#include <doctest.h>

#include <set>

#include "csicl/promptkit/assemble.hpp"
#include "csicl/util/text.hpp"
#include "support.hpp"

using namespace csicl;

namespace {

std::size_t count_of(const std::string& hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

PromptBundle assemble_fixture(const XiclSetting& s, const test::FixtureDemos& fx) {
  const PromptLibrary prompts;
  AssembleOptions opts;
  opts.model_id = "mock-a";
  const std::span<const DemoShot> demos =
      s.uses_demos() ? std::span<const DemoShot>(fx.shots) : std::span<const DemoShot>();
  return assemble_prompt(s, demos, fx.query, language("ko"), fx.pool, 42, opts, prompts);
}

}  // namespace

TEST_SUITE("promptkit") {
  TEST_CASE("setting ids round trip and are distinct") {
    std::set<std::string> ids;
    for (const auto& s : all_settings()) {
      CHECK(XiclSetting::parse(s.id()) == s);
      ids.insert(s.id());
    }
    CHECK(ids.size() == 15);
    CHECK(main_settings().size() == 13);
    CHECK(XiclSetting::parse("translate_cot:random:nodemos") == XiclSetting::translate_cot(TranslateDest::random, false));
    CHECK_FALSE(XiclSetting::translate_cot(TranslateDest::en, false).uses_demos());
    CHECK_THROWS_AS(XiclSetting::parse("csicl:sideways"), std::invalid_argument);
    CHECK_THROWS_AS(XiclSetting::parse("nope"), std::invalid_argument);
  }

  TEST_CASE("setting properties") {
    CHECK(main_settings().front() == XiclSetting::zero_shot());
    CHECK(main_settings().back() == XiclSetting::csicl(Direction::tgt_to_en));
    CHECK(XiclSetting::csicl(Direction::tgt_to_en).label() == "CSICL (Tgt.→En)");
    CHECK(XiclSetting::zero_shot_gradual().uses_gradual_instruction());
    CHECK_FALSE(XiclSetting::zero_shot_gradual().uses_demos());
    CHECK(XiclSetting::gradual_cs_fewshot(Direction::en_to_tgt).needs_ladder(Direction::en_to_tgt));
    CHECK_FALSE(XiclSetting::gradual_cs_fewshot(Direction::en_to_tgt).needs_ladder(Direction::tgt_to_en));
    CHECK(XiclSetting::cs_fewshot(LangSide::en).needs_ladder(Direction::en_to_tgt));
    CHECK_FALSE(XiclSetting::paraphrase(LangSide::en).needs_ladder(Direction::tgt_to_en));
  }

  TEST_CASE("template rendering") {
    CHECK(render_template("a {x} b {y_z}", {{"x", "1"}, {"y_z", "2"}}) == "a 1 b 2");
    CHECK_THROWS_AS(render_template("{missing}", {}), std::invalid_argument);
    const PromptLibrary lib;
    CHECK(lib.contains("system/csicl.mcq"));
    CHECK(lib.names().size() == 18);
  }

  TEST_CASE("template checksums are pinned") {
    const PromptLibrary lib;
    std::string listing;
    for (const auto& n : lib.names()) listing += n + " " + lib.checksum(n) + "\n";
    CHECK(listing == test::check_golden("template_checksums.txt", listing));
  }

  TEST_CASE("system prompts") {
    const PromptLibrary lib;
    const SystemPromptVars ko{language("ko"), language("ko"), std::nullopt};
    const auto csicl = build_system_prompt(XiclSetting::csicl(Direction::tgt_to_en), TaskKind::mcq, ko, lib);
    CHECK(count_of(csicl, kCsiclOpening) == 1);
    const auto zs = build_system_prompt(XiclSetting::zero_shot(), TaskKind::mcq, ko, lib);
    CHECK(zs.find("The final output must be exactly one letter.") != std::string::npos);
    const auto tr = build_system_prompt(XiclSetting::fewshot_mono(LangSide::en), TaskKind::translation, ko, lib);
    CHECK(tr.find("Korean") != std::string::npos);
    CHECK(tr.find('{') == std::string::npos);
  }

  TEST_CASE("random destination") {
    const auto& pool = known_languages();
    const std::vector<LanguageTag> exclude{language("ko"), english()};
    const auto a = pick_random_language(pool, exclude, 42, "ko:3");
    CHECK(a != language("ko"));
    CHECK(a != english());
    CHECK(pick_random_language(pool, exclude, 42, "ko:3") == a);
    std::set<std::string> seen;
    for (int i = 0; i < 200; ++i) seen.insert(pick_random_language(pool, exclude, 42, std::to_string(i)).code);
    CHECK(seen.size() == pool.size() - 2);
    const std::vector<LanguageTag> small{language("ko"), english()};
    CHECK_THROWS_AS(pick_random_language(small, small, 42, "x"), std::invalid_argument);
  }

  TEST_CASE("bundle shapes") {
    const auto fx = test::fixture_demos();
    const auto zs = assemble_fixture(XiclSetting::zero_shot(), fx);
    CHECK(zs.messages.empty());
    CHECK(zs.conversation().size() == 1);
    CHECK(zs.query == format_question(fx.query));

    const auto cs = assemble_fixture(XiclSetting::csicl(Direction::tgt_to_en), fx);
    REQUIRE(cs.messages.size() == 10);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& user = cs.messages[2 * i];
      const auto& assistant = cs.messages[2 * i + 1];
      CHECK(user.role == "user");
      CHECK(assistant.role == "assistant");
      CHECK(user.content.rfind(fx.shots[i].target.question, 0) == 0);
      const auto lines = split_lines(assistant.content);
      CHECK(lines.front() == kCsiclOpening);
      CHECK(lines[2].rfind("1. ", 0) == 0);
      CHECK(lines[6] == "5. " + fx.shots[i].ladder_tgt_to_en->steps[4]);
      CHECK(lines.back() == "The answer is " + fx.shots[i].target.gold[0]);
    }

    const auto para = assemble_fixture(XiclSetting::paraphrase(LangSide::en), fx);
    for (std::size_t i = 0; i < para.messages.size(); i += 2) {
      const auto stem = para.messages[i].content.substr(0, para.messages[i].content.find("\nA. "));
      CHECK(split_lines(stem).size() == 5);
    }
  }

  TEST_CASE("demo count and material are enforced") {
    const auto fx = test::fixture_demos();
    const PromptLibrary prompts;
    const std::span<const DemoShot> four(fx.shots.data(), 4);
    CHECK_THROWS_AS(assemble_prompt(XiclSetting::fewshot_mono(LangSide::tgt), four, fx.query, language("ko"), fx.pool,
                                    42, {}, prompts),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        assemble_prompt(XiclSetting::zero_shot(), fx.shots, fx.query, language("ko"), fx.pool, 42, {}, prompts),
        std::invalid_argument);
    auto bare = fx.shots;
    for (auto& s : bare) s.ladder_tgt_to_en.reset();
    CHECK_THROWS_AS(assemble_prompt(XiclSetting::csicl(Direction::tgt_to_en), bare, fx.query, language("ko"), fx.pool,
                                    42, {}, prompts),
                    std::invalid_argument);
  }

  TEST_CASE("digest covers every field") {
    const auto fx = test::fixture_demos();
    auto b = assemble_fixture(XiclSetting::fewshot_parallel(), fx);
    CHECK(bundle_digest(b) == b.digest);
    b.temperature = 0.5;
    CHECK(bundle_digest(b) != b.digest);
  }

  TEST_CASE("every setting matches its golden") {
    const auto fx = test::fixture_demos();
    for (const auto& s : all_settings()) {
      CAPTURE(s.id());
      const auto text = test::render_bundle(assemble_fixture(s, fx));
      CHECK(text == test::check_golden(test::golden_name(s), text));
    }
  }
}

#include <doctest.h>

#include <set>

#include "csicl/corpus/corpus.hpp"
#include "csicl/util/text.hpp"
#include "support.hpp"

using namespace csicl;

namespace {

std::filesystem::path write_tmp(const test::TempDir& dir, const std::string& body) {
  const auto p = dir.path() / "data.jsonl";
  write_file_atomic(p, body);
  return p;
}

std::set<std::string> ids_of(const SampleSet& s) {
  std::set<std::string> out;
  for (const auto& x : s) out.insert(x.id);
  return out;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("language registry") {
    CHECK(language("ko").name == "Korean");
    CHECK(english().code == "en");
    CHECK(language("sw").tier == ResourceTier::low);
    CHECK_THROWS_AS(language("xx"), std::invalid_argument);
    CHECK(std::is_sorted(known_languages().begin(), known_languages().end()));
  }

  TEST_CASE("well-formed mcq file keeps order") {
    test::TempDir dir;
    const auto p = write_tmp(dir,
                             R"({"id":"b","language":"en","question":"q1","choices":[{"letter":"A","text":"x"},{"letter":"B","text":"y"}],"answer":"A"}
{"id":"a","language":"en","question":"q2","choices":[{"letter":"A","text":"x"},{"letter":"B","text":"y"}],"answer":"B"}
{"id":7,"language":"ko","question":"q3","choices":[{"letter":"A","text":"x"},{"letter":"B","text":"y"}],"answer":["A","B"]}
)");
    const auto set = load_dataset(p, DatasetKind::globalmmlu);
    REQUIRE(set.size() == 3);
    CHECK(set[0].id == "b");
    CHECK(set[1].id == "a");
    CHECK(set[2].id == "7");
    CHECK(set[2].gold.size() == 2);
    CHECK(set[0].subject_or_none() == "(none)");
  }

  TEST_CASE("gold letter outside the choices names the id") {
    test::TempDir dir;
    const auto p = write_tmp(dir,
                             R"({"id":"q-17","language":"en","question":"q","choices":[{"letter":"A","text":"1"},{"letter":"B","text":"2"},{"letter":"C","text":"3"},{"letter":"D","text":"4"}],"answer":"E"})"
                             "\n");
    try {
      load_dataset(p, DatasetKind::globalmmlu);
      FAIL("expected a schema error");
    } catch (const SchemaError& e) {
      CHECK(e.id() == "q-17");
      CHECK(e.line() == 1);
      CHECK(std::string(e.what()).find("q-17") != std::string::npos);
    }
  }

  TEST_CASE("unknown language and malformed json are schema errors") {
    test::TempDir dir;
    CHECK_THROWS_AS(load_dataset(write_tmp(dir, R"({"id":"1","language":"xx","source":"a","reference":"b"})"
                                                "\n"),
                                 DatasetKind::flores),
                    SchemaError);
    CHECK_THROWS_AS(load_dataset(write_tmp(dir, "{not json\n"), DatasetKind::flores), SchemaError);
  }

  TEST_CASE("reference mini fixture has ids 0 to 9 per language") {
    const auto set = load_dataset(test::fixture("mini_mmlu.jsonl"), DatasetKind::globalmmlu);
    CHECK(set.size() == 40);
    for (const char* lang : {"en", "ko", "zh", "sw"}) {
      const auto one = filter_language(set, lang);
      REQUIRE(one.size() == 10);
      for (int i = 0; i < 10; ++i) CHECK(one[static_cast<std::size_t>(i)].id == std::to_string(i));
    }
  }

  TEST_CASE("other task kinds load") {
    const auto flores = load_dataset(test::fixture("mini_flores.jsonl"), DatasetKind::flores);
    CHECK(flores[0].task == TaskKind::translation);
    CHECK(flores[0].gold == std::vector<std::string>{"The cat sat on the mat."});
    const auto qa = load_dataset(test::fixture("mini_qa.jsonl"), DatasetKind::custom);
    CHECK(qa[0].task == TaskKind::short_answer);
    CHECK(qa[0].gold == std::vector<std::string>{"paris"});
  }

  TEST_CASE("balanced sampling") {
    const auto set = load_dataset(test::fixture("mini_mmlu.jsonl"), DatasetKind::globalmmlu);
    const std::vector<CellKey> keys{CellKey::subject, CellKey::language};
    CHECK(sample_balanced(set, 0, keys, 42).empty());
    const auto a = sample_balanced(set, 2, keys, 42);
    const auto b = sample_balanced(set, 2, keys, 42);
    CHECK(a.size() == 2 * 2 * 4);
    CHECK(to_jsonl(a) == to_jsonl(b));
    CHECK(to_jsonl(a) != to_jsonl(sample_balanced(set, 2, keys, 43)));
    CHECK(sample_balanced(set, 600, keys, 42).size() == 40);
  }

  TEST_CASE("balanced sampling at full scale yields one cell quota per cell") {
    // 6 subjects x 10 languages, 700 items each, 600 drawn per cell.
    std::vector<Sample> all;
    const char* langs[] = {"en", "ko", "zh", "es", "id", "tr", "sw", "te", "ja", "fr"};
    for (int s = 0; s < 6; ++s)
      for (const char* l : langs)
        for (int i = 0; i < 700; ++i) {
          Sample x;
          x.id = std::to_string(s) + "-" + std::to_string(i);
          x.language = language(l);
          x.question = "q";
          x.choices = {{"A", "a"}, {"B", "b"}};
          x.gold = {"A"};
          x.subject = "subject" + std::to_string(s);
          all.push_back(std::move(x));
        }
    const std::vector<CellKey> keys{CellKey::subject, CellKey::language};
    CHECK(sample_balanced(SampleSet(std::move(all), {}), 600, keys, 42).size() == 36000);
  }

  TEST_CASE("mbbq keeps balanced ambiguous and unambiguous items") {
    const auto set = load_dataset(test::fixture("mini_mbbq.jsonl"), DatasetKind::mbbq);
    const auto picked = sample_mbbq(set, 10, 42);
    int t1_amb = 0, t1_un = 0, t2 = 0;
    for (const auto& s : picked) {
      if (*s.template_id == "t1") (*s.ambiguous ? t1_amb : t1_un)++;
      else ++t2;
    }
    CHECK(t1_amb == 5);
    CHECK(t1_un == 3);
    CHECK(t2 == 10);
  }

  TEST_CASE("mbbq at full scale") {
    // 98 templates with 5 + 5 available each.
    std::vector<Sample> all;
    for (int t = 0; t < 98; ++t)
      for (int k = 0; k < 12; ++k) {
        Sample x;
        x.id = std::to_string(t) + "-" + std::to_string(k);
        x.dataset = DatasetKind::mbbq;
        x.language = english();
        x.question = "q";
        x.choices = {{"A", "a"}, {"B", "b"}, {"C", "c"}};
        x.gold = {"C"};
        x.template_id = std::to_string(t);
        x.ambiguous = k % 2 == 0;
        all.push_back(std::move(x));
      }
    CHECK(sample_mbbq(SampleSet(std::move(all), {}), 10, 42).size() == 980);
  }

  TEST_CASE("demo split") {
    const auto ko = filter_language(load_dataset(test::fixture("mini_mmlu.jsonl"), DatasetKind::globalmmlu), "ko");
    const auto s42 = split_demos(ko, 5, 42);
    CHECK(s42.demo.size() == 5);
    CHECK(s42.test.size() == 5);
    const auto d = ids_of(s42.demo);
    for (const auto& t : s42.test) CHECK(d.count(t.id) == 0);
    CHECK(ids_of(split_demos(ko, 5, 43).demo) != d);

    std::vector<Sample> six(ko.begin(), ko.begin() + 6);
    const auto edge = split_demos(SampleSet(six, {}), 5, 42);
    CHECK(edge.demo.size() == 5);
    CHECK(edge.test.size() == 1);
  }

  TEST_CASE("demo split on 600 items") {
    std::vector<Sample> all;
    for (int i = 0; i < 600; ++i) {
      Sample x;
      x.id = std::to_string(i);
      x.language = language("ko");
      x.question = "q";
      x.choices = {{"A", "a"}, {"B", "b"}};
      x.gold = {"A"};
      all.push_back(std::move(x));
    }
    const auto s = split_demos(SampleSet(std::move(all), {}), 5, 42);
    CHECK(s.demo.size() == 5);
    CHECK(s.test.size() == 595);
  }

  TEST_CASE("set operations") {
    const auto set = load_dataset(test::fixture("mini_mmlu.jsonl"), DatasetKind::globalmmlu);
    const std::vector<std::string> drop{"0", "1"};
    CHECK(exclude_ids(set, drop).size() == 32);
    const std::vector<SampleSet> parts{filter_language(set, "en"), filter_language(set, "ko")};
    CHECK(concat(parts).size() == 20);
  }

  TEST_CASE("parallel pair validation") {
    ParallelPair p{"1", "안녕", "hello", language("ko")};
    CHECK_NOTHROW(p.validate());
    p.source_lang = english();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }
}

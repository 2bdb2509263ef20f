#include <doctest.h>

#include "csicl/report/report.hpp"
#include "support.hpp"

using namespace csicl;

namespace {

ScoreMatrix column_of(std::vector<double> values) {
  ScoreMatrix m;
  m.title = "t";
  m.columns = {{"tgt", "Tgt.", {"ko"}, false}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    m.row_ids.push_back("r" + std::to_string(i));
    m.row_labels.push_back("Row " + std::to_string(i));
    m.cells.push_back({Cell{to_nano(values[i]), 1, Mark::none}});
  }
  return m;
}

Mark mark_at(const ScoreMatrix& m, std::size_t row) { return m.cells[row][0]->mark; }

ScoreMatrix two_by_two() {
  const std::vector<EvalRecord> recs{
      test::scored_record("zero_shot", "en", "0", true),  test::scored_record("zero_shot", "en", "1", false),
      test::scored_record("zero_shot", "ko", "0", false), test::scored_record("zero_shot", "ko", "1", false),
      test::scored_record("csicl", "en", "0", true),      test::scored_record("csicl", "en", "1", true),
      test::scored_record("csicl", "ko", "0", true),      test::scored_record("csicl", "ko", "1", false)};
  AggregateSpec spec;
  spec.columns = {{"en", "En", {"en"}, false}, {"tgt", "Tgt.", {"ko"}, true}};
  spec.row_order = {"zero_shot", "csicl"};
  spec.row_labels = {{"zero_shot", "Zero-shot"}, {"csicl", "CSICL (Tgt.→En)"}};
  spec.title = "Synthetic";
  return aggregate(recs, spec);
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("zero-shot replay reproduces the reference row") {
    AggregateSpec spec;
    spec.columns = test::reference_columns();
    const auto m = aggregate(test::reference_zero_shot(), spec);
    REQUIRE(m.row_ids == std::vector<std::string>{"zero_shot"});
    std::vector<std::string> row;
    for (const auto& c : m.cells[0]) row.push_back(format_points(c->nano));
    CHECK(row == std::vector<std::string>{"88.6", "68.6", "86.2", "62.1", "39.4"});
    CHECK(m.cells[0][2]->count == 2000);
  }

  TEST_CASE("empty input") {
    CHECK_THROWS_WITH_AS(aggregate(std::vector<EvalRecord>{}, {}), "nothing to aggregate", std::invalid_argument);
  }

  TEST_CASE("hand-averaged synthetic set") {
    const auto m = two_by_two();
    CHECK(m.cells[0][0]->value() == doctest::Approx(50.0));
    CHECK(m.cells[0][1]->value() == doctest::Approx(0.0));
    CHECK(m.cells[1][0]->value() == doctest::Approx(100.0));
    CHECK(m.cells[1][1]->value() == doctest::Approx(50.0));
  }

  TEST_CASE("tier cells average member means") {
    std::vector<EvalRecord> recs;
    // zh: 1 of 1 correct; es: 1 of 3 correct. Mean of means = 2/3, pooled = 1/2.
    recs.push_back(test::scored_record("s", "zh", "0", true));
    for (int i = 0; i < 3; ++i) recs.push_back(test::scored_record("s", "es", std::to_string(i), i == 0));
    AggregateSpec spec;
    spec.columns = {{"high", "High", {"zh", "es"}, false}};
    const auto m = aggregate(recs, spec);
    CHECK(m.cells[0][0]->value() == doctest::Approx(200.0 / 3.0));
  }

  TEST_CASE("columns by subject and model") {
    std::vector<EvalRecord> recs{test::scored_record("s", "ko", "0", true, "m1"),
                                 test::scored_record("s", "ko", "1", false, "m2")};
    recs[0].subject = "math";
    recs[1].subject = "science";
    AggregateSpec by_subject;
    by_subject.column_field = GroupField::subject;
    const auto m = aggregate(recs, by_subject);
    REQUIRE(m.columns.size() == 2);
    CHECK(m.columns[0].id == "math");
    AggregateSpec by_model;
    by_model.column_field = GroupField::model;
    CHECK(aggregate(recs, by_model).columns[1].id == "m2");
  }

  TEST_CASE("best and second best") {
    auto m = mark_best(column_of({76.8, 74.5, 72.7}));
    CHECK(mark_at(m, 0) == Mark::best);
    CHECK(mark_at(m, 1) == Mark::second);
    CHECK(mark_at(m, 2) == Mark::none);
    m = mark_best(column_of({70.0, 70.0, 60.0}));
    CHECK(mark_at(m, 0) == Mark::best);
    CHECK(mark_at(m, 1) == Mark::best);
    CHECK(mark_at(m, 2) == Mark::none);
    m = mark_best(column_of({50.0}));
    CHECK(mark_at(m, 0) == Mark::best);
    // Equal at one decimal counts as a tie.
    m = mark_best(column_of({70.04, 70.01, 69.0}));
    CHECK(mark_at(m, 1) == Mark::best);
    CHECK(mark_at(m, 2) == Mark::none);
  }

  TEST_CASE("deltas against a baseline") {
    const auto m = column_of({68.6, 76.8});
    const auto d = delta_vs_baseline(m, "r0");
    CHECK(format_points(d.cells[1][0]->nano, true) == "+8.2");
    CHECK(d.cells[0][0]->nano == 0);
    CHECK(d.cells[1][0]->nano + m.cells[0][0]->nano == m.cells[1][0]->nano);
    const auto s = delta_vs_baseline(two_by_two(), "zero_shot");
    CHECK(s.cells[1][0]->value() == doctest::Approx(50.0));
    CHECK(s.cells[1][1]->value() == doctest::Approx(50.0));
    CHECK_FALSE(s.columns[1].significant);
    CHECK_THROWS(delta_vs_baseline(m, "missing"));
  }

  TEST_CASE("formatting") {
    CHECK(format_points(to_nano(88.65)) == "88.7");
    CHECK(format_points(to_nano(-0.05)) == "-0.1");
    CHECK(format_points(to_nano(0.04), true) == "0.0");
    CHECK(format_points(to_nano(3.0), true) == "+3.0");
  }

  TEST_CASE("rendering") {
    const auto one = column_of({42.0});
    const auto md = render(one, RenderFormat::markdown);
    CHECK(md.find("| Row 0 |") != std::string::npos);
    const auto m = mark_best(two_by_two());
    const auto text = render(m, RenderFormat::markdown);
    CHECK(text == render(m, RenderFormat::markdown));
    CHECK(text == test::check_golden("report_synthetic.md", text));
    CHECK(text.find("Tgt.*") != std::string::npos);
    const auto csv = render(m, RenderFormat::csv);
    CHECK(csv.rfind("table,row_id,row_label,column_id,column_label,value,count,mark,significant\n", 0) == 0);
  }

  TEST_CASE("json round trip") {
    const auto m = mark_best(two_by_two());
    CHECK(matrix_from_json(to_json(m)) == m);
    CHECK(matrix_from_json(nlohmann::json::parse(render(m, RenderFormat::json))) == m);
  }
}

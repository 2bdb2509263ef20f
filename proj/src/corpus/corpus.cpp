#include "csicl/corpus/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "csicl/extraction/extraction.hpp"
#include "csicl/util/rng.hpp"

namespace csicl {

using nlohmann::json;

std::string_view to_string(DatasetKind kind) noexcept {
  switch (kind) {
    case DatasetKind::globalmmlu: return "globalmmlu";
    case DatasetKind::flores: return "flores";
    case DatasetKind::medexpqa: return "medexpqa";
    case DatasetKind::polymath: return "polymath";
    case DatasetKind::blend: return "blend";
    case DatasetKind::mbbq: return "mbbq";
    case DatasetKind::custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::mcq: return "mcq";
    case TaskKind::short_answer: return "short_answer";
    case TaskKind::translation: return "translation";
  }
  return "mcq";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  for (auto k : {DatasetKind::globalmmlu, DatasetKind::flores, DatasetKind::medexpqa, DatasetKind::polymath,
                 DatasetKind::blend, DatasetKind::mbbq, DatasetKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown dataset kind '" + std::string(name) + "'");
}

TaskKind parse_task_kind(std::string_view name) {
  for (auto k : {TaskKind::mcq, TaskKind::short_answer, TaskKind::translation})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown task kind '" + std::string(name) + "'");
}

std::vector<std::string> Sample::choice_letters() const {
  std::vector<std::string> out;
  out.reserve(choices.size());
  for (const auto& c : choices) out.push_back(c.letter);
  return out;
}

std::string Sample::subject_or_none() const { return subject.value_or("(none)"); }

SchemaError::SchemaError(std::size_t line, std::string id, const std::string& what)
    : std::runtime_error(what), line_(line), id_(std::move(id)) {}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& id, const std::string& msg) {
  std::string where = line ? "line " + std::to_string(line) : std::string("sample");
  if (!id.empty()) where += " (id " + id + ")";
  throw SchemaError(line, id, where + ": " + msg);
}

void check_sample(const Sample& s, std::size_t line) {
  if (s.id.empty()) fail(line, s.id, "empty id");
  if (s.question.empty()) fail(line, s.id, "empty question/source text");
  switch (s.task) {
    case TaskKind::mcq: {
      if (s.choices.empty()) fail(line, s.id, "mcq sample without choices");
      if (s.gold.empty()) fail(line, s.id, "mcq sample without answer");
      std::set<std::string> letters;
      for (const auto& c : s.choices) {
        if (c.letter.empty()) fail(line, s.id, "choice with empty letter");
        if (!letters.insert(c.letter).second) fail(line, s.id, "duplicate choice letter " + c.letter);
      }
      for (const auto& g : s.gold)
        if (!letters.count(g)) fail(line, s.id, "gold letter \"" + g + "\" is not among the choice letters");
      break;
    }
    case TaskKind::short_answer:
      if (s.gold.empty()) fail(line, s.id, "short_answer sample without answers");
      for (const auto& g : s.gold)
        if (g.empty()) fail(line, s.id, "answer normalizes to an empty string");
      break;
    case TaskKind::translation:
      if (s.gold.size() != 1) fail(line, s.id, "translation sample needs exactly one reference");
      if (s.gold.front().empty()) fail(line, s.id, "empty reference");
      break;
  }
  if (s.dataset == DatasetKind::mbbq && (!s.template_id || !s.ambiguous))
    fail(line, s.id, "mbbq sample needs template_id and ambiguous");
}

std::string required_string(const json& rec, const char* key, std::size_t line, const std::string& id) {
  auto it = rec.find(key);
  if (it == rec.end()) fail(line, id, std::string("missing key \"") + key + "\"");
  if (!it->is_string()) fail(line, id, std::string("key \"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::string id_of(const json& rec) {
  auto it = rec.find("id");
  if (it == rec.end()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  return {};
}

TaskKind task_for(DatasetKind kind, const json& rec) {
  switch (kind) {
    case DatasetKind::globalmmlu:
    case DatasetKind::mbbq:
      return TaskKind::mcq;
    case DatasetKind::medexpqa:
    case DatasetKind::polymath:
    case DatasetKind::blend:
      return TaskKind::short_answer;
    case DatasetKind::flores:
      return TaskKind::translation;
    case DatasetKind::custom:
      if (rec.contains("task")) return parse_task_kind(rec.at("task").get<std::string>());
      if (rec.contains("choices")) return TaskKind::mcq;
      if (rec.contains("answers")) return TaskKind::short_answer;
      return TaskKind::translation;
  }
  return TaskKind::mcq;
}

Sample parse_record(const json& rec, DatasetKind kind, std::size_t line) {
  if (!rec.is_object()) fail(line, "", "record is not a JSON object");
  Sample s;
  s.id = id_of(rec);
  if (s.id.empty()) fail(line, "", "missing or non-scalar \"id\"");
  s.dataset = kind;
  const std::string code = required_string(rec, "language", line, s.id);
  if (!is_known_language(code)) fail(line, s.id, "unknown language code \"" + code + "\"");
  s.language = language(code);
  s.task = task_for(kind, rec);

  switch (s.task) {
    case TaskKind::mcq: {
      s.question = required_string(rec, "question", line, s.id);
      const auto it = rec.find("choices");
      if (it == rec.end() || !it->is_array()) fail(line, s.id, "missing \"choices\" array");
      for (const auto& c : *it) {
        if (!c.is_object() || !c.contains("letter") || !c.contains("text"))
          fail(line, s.id, "choice must be {letter, text}");
        s.choices.push_back({c.at("letter").get<std::string>(), c.at("text").get<std::string>()});
      }
      const auto ans = rec.find("answer");
      if (ans == rec.end()) fail(line, s.id, "missing \"answer\"");
      if (ans->is_string()) {
        s.gold.push_back(ans->get<std::string>());
      } else if (ans->is_array()) {
        for (const auto& a : *ans) s.gold.push_back(a.get<std::string>());
      } else {
        fail(line, s.id, "\"answer\" must be a letter or a list of letters");
      }
      break;
    }
    case TaskKind::short_answer: {
      s.question = required_string(rec, "question", line, s.id);
      const auto it = rec.find("answers");
      if (it == rec.end() || !it->is_array()) fail(line, s.id, "missing \"answers\" array");
      for (const auto& a : *it) s.gold.push_back(normalize_answer(a.get<std::string>()));
      break;
    }
    case TaskKind::translation:
      s.question = required_string(rec, "source", line, s.id);
      s.gold.push_back(required_string(rec, "reference", line, s.id));
      break;
  }
  if (auto it = rec.find("subject"); it != rec.end() && it->is_string()) s.subject = it->get<std::string>();
  if (auto it = rec.find("template_id"); it != rec.end()) {
    s.template_id = it->is_string() ? it->get<std::string>() : it->dump();
  }
  if (auto it = rec.find("ambiguous"); it != rec.end()) {
    if (!it->is_boolean()) fail(line, s.id, "\"ambiguous\" must be a boolean");
    s.ambiguous = it->get<bool>();
  }
  check_sample(s, line);
  return s;
}

json sample_to_json(const Sample& s) {
  json j;
  j["id"] = s.id;
  j["dataset"] = to_string(s.dataset);
  j["language"] = s.language.code;
  j["task"] = to_string(s.task);
  j["question"] = s.question;
  if (!s.choices.empty()) {
    json cs = json::array();
    for (const auto& c : s.choices) cs.push_back({{"letter", c.letter}, {"text", c.text}});
    j["choices"] = cs;
  }
  j["gold"] = s.gold;
  if (s.subject) j["subject"] = *s.subject;
  if (s.template_id) j["template_id"] = *s.template_id;
  if (s.ambiguous) j["ambiguous"] = *s.ambiguous;
  return j;
}

}  // namespace

void validate_sample(const Sample& s) { check_sample(s, 0); }

void ParallelPair::validate() const {
  if (source_text.empty() || english_text.empty())
    throw std::invalid_argument("parallel pair " + id + ": both texts must be non-empty");
  if (source_lang.code == "en") throw std::invalid_argument("parallel pair " + id + ": source language is English");
}

SampleSet::SampleSet(std::vector<Sample> samples, Provenance provenance)
    : samples_(std::move(samples)), provenance_(std::move(provenance)) {}

const Sample* SampleSet::find(std::string_view id) const noexcept {
  for (const auto& s : samples_)
    if (s.id == id) return &s;
  return nullptr;
}

SampleSet load_dataset(const std::filesystem::path& path, DatasetKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("dataset file not found: " + path.string());
  std::vector<Sample> samples;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(lineno, "", std::string("malformed JSON: ") + e.what());
    }
    Sample s;
    try {
      s = parse_record(rec, kind, lineno);
    } catch (const json::exception& e) {
      fail(lineno, id_of(rec), std::string("bad field type: ") + e.what());
    }
    if (!seen.insert({s.language.code, s.id}).second) fail(lineno, s.id, "duplicate id within language");
    samples.push_back(std::move(s));
  }
  return SampleSet(std::move(samples), Provenance{path.string(), std::nullopt, "all"});
}

SampleSet sample_balanced(const SampleSet& set, std::size_t per_cell, std::span<const CellKey> cell_keys,
                          std::uint64_t seed) {
  const bool by_subject = std::find(cell_keys.begin(), cell_keys.end(), CellKey::subject) != cell_keys.end();
  const bool by_language = std::find(cell_keys.begin(), cell_keys.end(), CellKey::language) != cell_keys.end();

  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& s = set[i];
    cells[{by_subject ? s.subject_or_none() : std::string(), by_language ? s.language.code : std::string()}]
        .push_back(i);
  }

  std::vector<Sample> out;
  for (const auto& [key, members] : cells) {
    SplitMix64 rng(derive_seed(seed, {"balanced", key.first, key.second}));
    for (std::size_t j : draw_without_replacement(members.size(), per_cell, rng)) out.push_back(set[members[j]]);
  }
  std::string filter = "balanced per_cell=" + std::to_string(per_cell) + " keys=";
  filter += by_subject ? "subject" : "";
  filter += (by_subject && by_language) ? "," : "";
  filter += by_language ? "language" : "";
  return SampleSet(std::move(out), Provenance{set.provenance().path, seed, filter});
}

SampleSet sample_mbbq(const SampleSet& set, std::size_t per_template, std::uint64_t seed) {
  const std::size_t per_side = per_template / 2;
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> templates;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& s = set[i];
    if (!s.template_id || !s.ambiguous)
      throw SchemaError(0, s.id, "sample " + s.id + " lacks MBBQ fields template_id/ambiguous");
    auto& slot = templates[s.language.code + "\x1f" + *s.template_id];
    (*s.ambiguous ? slot.first : slot.second).push_back(i);
  }
  std::vector<Sample> out;
  for (const auto& [key, groups] : templates) {
    SplitMix64 amb(derive_seed(seed, {"mbbq", key, "ambiguous"}));
    for (std::size_t j : draw_without_replacement(groups.first.size(), per_side, amb))
      out.push_back(set[groups.first[j]]);
    SplitMix64 unamb(derive_seed(seed, {"mbbq", key, "unambiguous"}));
    for (std::size_t j : draw_without_replacement(groups.second.size(), per_side, unamb))
      out.push_back(set[groups.second[j]]);
  }
  return SampleSet(std::move(out),
                   Provenance{set.provenance().path, seed, "mbbq per_template=" + std::to_string(per_template)});
}

DemoSplit split_demos(const SampleSet& set, std::size_t k, std::uint64_t seed) {
  if (k >= set.size())
    throw std::invalid_argument("split_demos: k=" + std::to_string(k) + " must be smaller than the set size " +
                                std::to_string(set.size()));
  SplitMix64 rng(derive_seed(seed, {"split_demos"}));
  const auto picked = draw_without_replacement(set.size(), k, rng);
  std::vector<bool> is_demo(set.size(), false);
  std::vector<Sample> demo, test;
  for (std::size_t i : picked) {
    is_demo[i] = true;
    demo.push_back(set[i]);
  }
  for (std::size_t i = 0; i < set.size(); ++i)
    if (!is_demo[i]) test.push_back(set[i]);
  const auto& path = set.provenance().path;
  return {SampleSet(std::move(demo), Provenance{path, seed, "demo k=" + std::to_string(k)}),
          SampleSet(std::move(test), Provenance{path, seed, "test (demo k=" + std::to_string(k) + " removed)"})};
}

SampleSet filter_language(const SampleSet& set, std::string_view code) {
  std::vector<Sample> out;
  for (const auto& s : set)
    if (s.language.code == code) out.push_back(s);
  auto prov = set.provenance();
  prov.filter += " language=" + std::string(code);
  return SampleSet(std::move(out), prov);
}

SampleSet exclude_ids(const SampleSet& set, std::span<const std::string> ids) {
  const std::set<std::string> drop(ids.begin(), ids.end());
  std::vector<Sample> out;
  for (const auto& s : set)
    if (!drop.count(s.id)) out.push_back(s);
  auto prov = set.provenance();
  prov.filter += " minus " + std::to_string(drop.size()) + " ids";
  return SampleSet(std::move(out), prov);
}

SampleSet concat(std::span<const SampleSet> sets) {
  std::vector<Sample> out;
  Provenance prov;
  for (const auto& s : sets) {
    out.insert(out.end(), s.begin(), s.end());
    if (!prov.path.empty()) prov.path += ";";
    prov.path += s.provenance().path;
  }
  prov.filter = "concat";
  return SampleSet(std::move(out), prov);
}

std::string to_jsonl(const SampleSet& set) {
  std::string out;
  for (const auto& s : set) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

}  // namespace csicl

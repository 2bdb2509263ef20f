#include "csicl/runner/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include "csicl/extraction/extraction.hpp"
#include "csicl/util/json_store.hpp"
#include "csicl/util/rng.hpp"
#include "csicl/util/text.hpp"

namespace csicl {

using nlohmann::json;

const Sample* PreparedDataset::english_counterpart(const std::string& id) const {
  for (const auto& s : full)
    if (s.language == english() && s.id == id) return &s;
  return nullptr;
}

std::vector<EvalRecord> read_records(const std::filesystem::path& path) {
  std::vector<EvalRecord> out;
  if (!std::filesystem::exists(path)) return out;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(read_file(path))) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(eval_record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad record: " + e.what());
    }
  }
  return out;
}

void write_records(const std::filesystem::path& path, const std::vector<EvalRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  write_file_atomic(path, out);
}

struct Pipeline::Impl {
  PromptLibrary prompts;
  std::unique_ptr<Gateway> gateway;
  std::optional<std::vector<PreparedDataset>> data;
  std::unique_ptr<DemoCache> demo_cache;
  std::shared_ptr<TextGenerator> generator;
};

namespace {

std::ostream& out_of(const PipelineHooks& h) { return h.out ? *h.out : std::cout; }
std::ostream& err_of(const PipelineHooks& h) { return h.err ? *h.err : std::cerr; }

std::string record_key(const std::string& dataset, const std::string& model, const std::string& setting,
                       const std::string& lang, const std::string& id) {
  return dataset + "\x1f" + model + "\x1f" + setting + "\x1f" + lang + "\x1f" + id;
}

std::string record_key(const EvalRecord& r) {
  return record_key(r.dataset, r.model_id, r.setting, r.language, r.sample_id);
}

}  // namespace

Pipeline::Pipeline(RunConfig config, PipelineHooks hooks)
    : cfg_(std::move(config)), hooks_(std::move(hooks)), impl_(std::make_unique<Impl>()) {
  cfg_.validate();
  cfg_.bootstrap.seed = cfg_.seed;
  run_id_ = csicl::run_id(cfg_);
}

Pipeline::~Pipeline() = default;

std::filesystem::path Pipeline::results_path() const { return cfg_.resolve(cfg_.results_dir) / run_id_; }
std::filesystem::path Pipeline::cache_path() const { return cfg_.resolve(cfg_.cache_dir); }

std::size_t Pipeline::network_calls() const { return impl_->gateway ? impl_->gateway->network_calls() : 0; }

namespace {

Gateway& gateway_of(std::unique_ptr<Gateway>& gw, const RunConfig& cfg, const PipelineHooks& hooks,
                    const std::filesystem::path& cache) {
  if (!gw) {
    GatewayOptions opts;
    opts.cache_dir = cache;
    opts.sleeper = hooks.sleeper;
    opts.transport_for = hooks.transport_for;
    gw = std::make_unique<Gateway>(cfg.models, std::move(opts));
  }
  return *gw;
}

}  // namespace

const std::vector<PreparedDataset>& Pipeline::datasets() {
  if (impl_->data) return *impl_->data;
  if (cfg_.datasets.empty()) throw std::invalid_argument("config: no datasets");
  const std::string& target = cfg_.target_language;
  std::vector<PreparedDataset> out;
  for (const auto& spec : cfg_.datasets) {
    PreparedDataset ds;
    ds.spec = spec;
    ds.full = load_dataset(cfg_.resolve(spec.path), spec.kind);
    if (ds.full.empty()) throw std::invalid_argument("dataset " + spec.name + " is empty");
    ds.task = ds.full[0].task;
    for (const auto& s : ds.full)
      if (s.task != ds.task) throw std::invalid_argument("dataset " + spec.name + " mixes task kinds");

    const std::vector<CellKey> keys{CellKey::subject, CellKey::language};
    const SampleSet sampled = spec.kind == DatasetKind::mbbq ? sample_mbbq(ds.full, cfg_.mbbq_per_template, cfg_.seed)
                                                             : sample_balanced(ds.full, cfg_.per_cell, keys, cfg_.seed);
    const SampleSet target_set = filter_language(sampled, target);
    if (target_set.size() <= cfg_.k_shots)
      throw std::invalid_argument("dataset " + spec.name + " has " + std::to_string(target_set.size()) + " " +
                                  target + " samples; demonstrations need more than k_shots = " +
                                  std::to_string(cfg_.k_shots));
    const DemoSplit split = split_demos(target_set, cfg_.k_shots, cfg_.seed);
    ds.demos = split.demo.samples();
    std::vector<std::string> demo_ids;
    for (const auto& d : ds.demos) demo_ids.push_back(d.id);

    std::vector<std::string> langs;
    if (cfg_.include_english) langs.push_back("en");
    langs.push_back(target);
    for (const auto& l : cfg_.unseen_languages()) langs.push_back(l);
    for (const auto& lang : langs) {
      SampleSet set = lang == target ? split.test : filter_language(sampled, lang);
      if (cfg_.demo_sharing == DemoSharing::parallel_id) set = exclude_ids(set, demo_ids);
      if (set.empty()) continue;
      ds.languages.push_back(lang);
      ds.tests.emplace(lang, std::move(set));
    }
    out.push_back(std::move(ds));
  }
  impl_->data = std::move(out);
  return *impl_->data;
}

std::vector<ColumnSpec> Pipeline::main_columns() const {
  return {{"en", "En", {"en"}, false},
          {"tgt", "Tgt.", {cfg_.target_language}, false},
          {"high", "High", cfg_.unseen_high, false},
          {"mid", "Mid", cfg_.unseen_mid, false},
          {"low", "Low", cfg_.unseen_low, false}};
}

namespace {

// Translation corpora carry no English rows; the reference is the English side.
std::optional<Sample> english_side(const PreparedDataset& ds, const Sample& demo) {
  if (const Sample* en = ds.english_counterpart(demo.id)) return *en;
  if (demo.task != TaskKind::translation || demo.gold.empty()) return std::nullopt;
  Sample en = demo;
  en.language = english();
  en.question = demo.gold.front();
  return en;
}

ParallelPair demo_pair(const PreparedDataset& ds, const Sample& demo) {
  ParallelPair p;
  p.id = demo.id;
  p.source_text = demo.question;
  p.source_lang = demo.language;
  if (const Sample* en = ds.english_counterpart(demo.id)) p.english_text = en->question;
  else if (demo.task == TaskKind::translation && !demo.gold.empty()) p.english_text = demo.gold.front();
  else
    throw std::invalid_argument("dataset " + ds.spec.name + ": demonstration " + demo.id +
                                " has no English counterpart with the same id");
  return p;
}

std::set<Direction> ladder_directions(const std::vector<XiclSetting>& settings) {
  std::set<Direction> out;
  for (const auto& s : settings)
    for (Direction d : {Direction::tgt_to_en, Direction::en_to_tgt})
      if (s.needs_ladder(d)) out.insert(d);
  return out;
}

std::set<LangSide> paraphrase_sides(const std::vector<XiclSetting>& settings) {
  std::set<LangSide> out;
  for (const auto& s : settings)
    if (s.kind() == SettingKind::paraphrase) out.insert(s.side());
  return out;
}

}  // namespace

namespace {

TextGenerator& generator_of(std::shared_ptr<TextGenerator>& slot, std::unique_ptr<Gateway>& gw, const RunConfig& cfg,
                            const PipelineHooks& hooks, const std::filesystem::path& cache) {
  if (!slot) {
    if (hooks.generator) slot = hooks.generator;
    else if (cfg.generator == "fallback") slot = std::make_shared<FallbackGenerator>();
    else slot = std::make_shared<ChatGenerator>(gateway_of(gw, cfg, hooks, cache), cfg.generator, cfg.temperature);
  }
  return *slot;
}

}  // namespace

std::vector<DemoShot> Pipeline::demo_shots(const PreparedDataset& ds, XiclSetting setting) {
  if (!setting.uses_demos()) return {};
  if (!impl_->demo_cache) impl_->demo_cache = std::make_unique<DemoCache>(cache_path());
  TextGenerator& gen = generator_of(impl_->generator, impl_->gateway, cfg_, hooks_, cache_path());
  const std::string gen_id = gen.id();
  std::vector<DemoShot> shots;
  for (const auto& demo : ds.demos) {
    DemoShot shot;
    shot.target = demo;
    shot.english = english_side(ds, demo);
    for (Direction d : {Direction::tgt_to_en, Direction::en_to_tgt}) {
      if (!setting.needs_ladder(d)) continue;
      const auto outcome = impl_->demo_cache->find_ladder(demo_pair(ds, demo), d, gen_id, cfg_.generation);
      if (!outcome)
        throw std::runtime_error("no cached " + std::string(to_string(d)) + " ladder for demonstration " + demo.id +
                                 " of " + ds.spec.name + "; run gen-demos first");
      if (d == Direction::tgt_to_en) {
        shot.ladder_tgt_to_en = outcome->ladder;
        shot.cs_matrix_tgt = outcome->cs.text;
      } else {
        shot.ladder_en_to_tgt = outcome->ladder;
        shot.cs_matrix_en = outcome->cs.text;
      }
    }
    if (setting.kind() == SettingKind::paraphrase) {
      const bool en = setting.side() == LangSide::en;
      if (en && !shot.english)
        throw std::runtime_error("demonstration " + demo.id + " has no English counterpart to paraphrase");
      const Sample& s = en ? *shot.english : demo;
      auto list = impl_->demo_cache->find_paraphrases(s.question, s.language, cfg_.paraphrases_per_shot, gen_id);
      if (!list)
        throw std::runtime_error("no cached paraphrases for demonstration " + demo.id + " (" + s.language.code +
                                 "); run gen-demos first");
      (en ? shot.paraphrases_en : shot.paraphrases_tgt) = std::move(*list);
    }
    shots.push_back(std::move(shot));
  }
  return shots;
}

int Pipeline::gen_demos() {
  std::ostream& out = out_of(hooks_);
  try {
    const auto& data = datasets();
    if (!impl_->demo_cache) impl_->demo_cache = std::make_unique<DemoCache>(cache_path());
    TextGenerator& gen = generator_of(impl_->generator, impl_->gateway, cfg_, hooks_, cache_path());
    const auto directions = ladder_directions(cfg_.settings);
    const auto sides = paraphrase_sides(cfg_.settings);

    json entries = json::array();
    bool partial = false;
    std::size_t generated = 0;
    for (const auto& ds : data) {
      for (const auto& demo : ds.demos) {
        const ParallelPair pair = demo_pair(ds, demo);
        for (Direction d : directions) {
          if (hooks_.dry_run) {
            const auto digest = DemoCache::ladder_digest(pair, d, gen.id(), cfg_.generation);
            const bool cached = impl_->demo_cache->find_ladder(pair, d, gen.id(), cfg_.generation).has_value();
            out << "ladder " << ds.spec.name << " " << demo.id << " " << to_string(d) << " " << digest
                << (cached ? " cached" : " missing") << "\n";
            continue;
          }
          const auto res = impl_->demo_cache->ladder(pair, d, cfg_.generation, gen, impl_->prompts);
          if (!res.from_cache) ++generated;
          if (!res.outcome.valid) partial = true;
          entries.push_back({{"dataset", ds.spec.name},
                             {"sample_id", demo.id},
                             {"kind", "ladder"},
                             {"direction", to_string(d)},
                             {"digest", res.digest},
                             {"attempts", res.outcome.attempts},
                             {"valid", res.outcome.valid},
                             {"measured_fractions", res.outcome.ladder.measured},
                             {"failures", res.outcome.failures}});
        }
        for (LangSide side : sides) {
          const bool en = side == LangSide::en;
          const auto en_side = english_side(ds, demo);
          const Sample* s = en ? (en_side ? &*en_side : nullptr) : &demo;
          if (!s) throw std::invalid_argument("demonstration " + demo.id + " has no English counterpart to paraphrase");
          if (hooks_.dry_run) {
            const bool cached = impl_->demo_cache->find_paraphrases(s->question, s->language,
                                                                    cfg_.paraphrases_per_shot, gen.id())
                                    .has_value();
            out << "paraphrase " << ds.spec.name << " " << demo.id << " " << s->language.code
                << (cached ? " cached" : " missing") << "\n";
            continue;
          }
          const auto res =
              impl_->demo_cache->paraphrases(s->question, s->language, cfg_.paraphrases_per_shot, gen, impl_->prompts);
          if (!res.from_cache) ++generated;
          entries.push_back({{"dataset", ds.spec.name},
                             {"sample_id", demo.id},
                             {"kind", "paraphrase"},
                             {"language", s->language.code},
                             {"digest", res.digest},
                             {"count", res.paraphrases.size()}});
        }
      }
    }
    if (hooks_.dry_run) return kExitOk;
    const json manifest{{"run_id", run_id_},
                        {"generator", gen.id()},
                        {"k_shots", cfg_.k_shots},
                        {"seed", cfg_.seed},
                        {"policy",
                         {{"max_attempts", cfg_.generation.max_attempts},
                          {"step_tolerance", cfg_.generation.step_tolerance},
                          {"purity_tolerance", cfg_.generation.purity_tolerance}}},
                        {"entries", entries}};
    write_file_atomic(results_path() / "demos.json", canonical_dump(manifest));
    out << "gen-demos: " << entries.size() << " entries, " << generated << " generated, "
        << entries.size() - generated << " from cache" << (partial ? ", some ladders INVALID" : "") << "\n";
    return partial ? kExitPartial : kExitOk;
  } catch (const std::exception& e) {
    err_of(hooks_) << "gen-demos: " << e.what() << "\n";
    return kExitError;
  }
}

namespace {

Extracted extract_for(const Sample& sample, const std::string& response, const XiclSetting& setting,
                      const RunConfig& cfg) {
  const std::string text =
      cfg.strip_reasoning ? strip_reasoning(response, cfg.reasoning_open, cfg.reasoning_close) : response;
  switch (sample.task) {
    case TaskKind::mcq: return extract_mcq(text, sample.choice_letters());
    case TaskKind::short_answer: return extract_short_answer(text);
    case TaskKind::translation: return extract_translation(text, setting);
  }
  return Extracted::none();
}

// Scores records in place; translation records are scored in one batch.
void score_all(std::vector<EvalRecord*>& records, const std::vector<const Sample*>& samples, const RunConfig& cfg) {
  std::optional<CometBridgeClient> bridge;
  if (cfg.metrics.backend == TranslationBackend::comet_bridge) bridge.emplace(*cfg.bridge_endpoint);
  std::vector<TranslationTriple> triples;
  std::vector<EvalRecord*> pending;
  for (std::size_t i = 0; i < records.size(); ++i) {
    EvalRecord& r = *records[i];
    const Sample& s = *samples[i];
    r.metric = metric_name(s.task, cfg.metrics);
    r.out_of_format = r.extracted.out_of_format;
    r.score = 0.0;
    if (r.is_error() || r.out_of_format) continue;
    if (s.task == TaskKind::translation) {
      triples.push_back({s.question, *r.extracted.value, s.gold.front()});
      pending.push_back(&r);
    } else {
      r.score = score_choice_or_short(s, r.extracted);
    }
  }
  const auto scores = score_translations(triples, cfg.metrics, bridge ? &*bridge : nullptr);
  for (std::size_t i = 0; i < pending.size(); ++i) pending[i]->score = scores[i];
}

}  // namespace

int Pipeline::run() {
  std::ostream& out = out_of(hooks_);
  try {
    if (cfg_.models.empty()) throw std::invalid_argument("config: no models");
    const auto& data = datasets();
    const auto records_path = results_path() / "records.jsonl";
    std::map<std::string, EvalRecord> existing;
    for (auto& r : read_records(records_path)) existing[record_key(r)] = std::move(r);

    struct Work {
      EvalRecord record;
      const Sample* sample = nullptr;
      XiclSetting setting;
      std::optional<ChatRequest> request;
    };
    std::vector<Work> work;
    std::size_t pending = 0;
    std::vector<LanguageTag> pool;
    if (cfg_.random_pool.empty()) pool = known_languages();
    else
      for (const auto& c : cfg_.random_pool) pool.push_back(language(c));
    const LanguageTag& target = language(cfg_.target_language);

    for (const auto& ds : data) {
      for (const auto& model : cfg_.models) {
        for (const auto& setting : cfg_.settings) {
          std::optional<std::vector<DemoShot>> shots;
          for (const auto& lang : ds.languages) {
            for (const auto& sample : ds.tests.at(lang)) {
              const auto key = record_key(ds.spec.name, model.id, setting.id(), lang, sample.id);
              if (auto it = existing.find(key); it != existing.end() && !it->second.is_error()) {
                work.push_back({it->second, &sample, setting, std::nullopt});
                continue;
              }
              if (!hooks_.dry_run && hooks_.limit && pending >= *hooks_.limit) continue;
              if (!shots) shots = demo_shots(ds, setting);
              AssembleOptions opts{cfg_.k_shots, cfg_.paraphrases_per_shot, model.id, cfg_.temperature};
              const PromptBundle bundle =
                  assemble_prompt(setting, *shots, sample, target, pool, cfg_.seed, opts, impl_->prompts);
              if (hooks_.dry_run) {
                out << bundle.digest << " " << ds.spec.name << " " << model.id << " " << setting.id() << " " << lang
                    << " " << sample.id << "\n";
                continue;
              }
              EvalRecord r;
              r.model_id = model.id;
              r.setting = setting.id();
              r.dataset = ds.spec.name;
              r.language = lang;
              r.sample_id = sample.id;
              r.task = sample.task;
              r.subject = sample.subject;
              r.prompt_digest = bundle.digest;
              work.push_back({std::move(r), &sample, setting, to_request(bundle)});
              ++pending;
            }
          }
        }
      }
    }
    if (hooks_.dry_run) return kExitOk;

    std::vector<ChatRequest> requests;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < work.size(); ++i)
      if (work[i].request) {
        requests.push_back(*work[i].request);
        index.push_back(i);
      }
    Gateway& gw = gateway_of(impl_->gateway, cfg_, hooks_, cache_path());
    const auto responses = gw.complete_batch(requests, cfg_.max_in_flight);

    std::vector<EvalRecord*> to_score;
    std::vector<const Sample*> samples;
    std::size_t errors = 0;
    std::set<std::string> substituted;
    for (std::size_t k = 0; k < responses.size(); ++k) {
      Work& w = work[index[k]];
      const ModelResponse& resp = responses[k];
      if (resp.temperature_substituted && substituted.insert(w.record.model_id).second)
        err_of(hooks_) << "note: " << w.record.model_id << " ran at temperature " << *resp.temperature_substituted
                       << " instead of " << cfg_.temperature << "\n";
      if (!resp.ok()) {
        w.record.error = resp.error;
        w.record.extracted = Extracted::none();
        ++errors;
      } else {
        w.record.response = resp.text;
        w.record.extracted = extract_for(*w.sample, resp.text, w.setting, cfg_);
      }
      to_score.push_back(&w.record);
      samples.push_back(w.sample);
    }
    score_all(to_score, samples, cfg_);

    std::vector<EvalRecord> records;
    const auto flags = std::make_unique<bool[]>(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
      flags[i] = work[i].record.out_of_format;
      records.push_back(std::move(work[i].record));
    }
    write_records(records_path, records);
    const OutOfFormatSummary oof = out_of_format_ratio(std::span<const bool>(flags.get(), work.size()));
    json manifest{{"run_id", run_id_},
                  {"config", resolved_json(cfg_)},
                  {"seed", cfg_.seed},
                  {"k_shots", cfg_.k_shots},
                  {"records", records.size()},
                  {"errors", errors},
                  {"out_of_format", oof.flagged}};
    write_file_atomic(results_path() / "run.json", canonical_dump(manifest));
    out << "run " << run_id_ << ": " << records.size() << " records (" << requests.size() << " queried, " << errors
        << " errors), out-of-format ratio " << format_fixed(oof.ratio, 4) << ", network calls " << gw.network_calls()
        << "\n";
    return errors > 0 ? kExitPartial : kExitOk;
  } catch (const std::exception& e) {
    err_of(hooks_) << "run: " << e.what() << "\n";
    return kExitError;
  }
}

int Pipeline::score() {
  try {
    const auto& data = datasets();
    const auto path = results_path() / "records.jsonl";
    auto records = read_records(path);
    if (records.empty()) throw std::runtime_error("no records at " + path.string() + "; run first");
    std::map<std::string, const Sample*> by_key;
    for (const auto& ds : data)
      for (const auto& s : ds.full) by_key[ds.spec.name + "\x1f" + s.language.code + "\x1f" + s.id] = &s;
    std::vector<EvalRecord*> to_score;
    std::vector<const Sample*> samples;
    for (auto& r : records) {
      const auto it = by_key.find(r.dataset + "\x1f" + r.language + "\x1f" + r.sample_id);
      if (it == by_key.end()) throw std::runtime_error("record refers to unknown sample " + r.sample_id);
      if (!r.is_error()) r.extracted = extract_for(*it->second, r.response, XiclSetting::parse(r.setting), cfg_);
      to_score.push_back(&r);
      samples.push_back(it->second);
    }
    if (hooks_.dry_run) {
      out_of(hooks_) << "score: would rescore " << records.size() << " records\n";
      return kExitOk;
    }
    score_all(to_score, samples, cfg_);
    write_records(path, records);
    out_of(hooks_) << "score: rescored " << records.size() << " records with " << to_string(cfg_.metrics.backend)
                   << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err_of(hooks_) << "score: " << e.what() << "\n";
    return kExitError;
  }
}

int Pipeline::stats() {
  std::ostream& out = out_of(hooks_);
  try {
    const auto records = read_records(results_path() / "records.jsonl");
    if (records.empty()) throw std::runtime_error("no records; run first");
    const XiclSetting target = XiclSetting::parse(cfg_.stats_target);
    if (std::find(cfg_.settings.begin(), cfg_.settings.end(), target) == cfg_.settings.end())
      throw std::invalid_argument("stats target " + cfg_.stats_target + " is not among the configured settings");

    json tables = json::array();
    for (const auto& spec : cfg_.datasets) {
      for (const auto& model : cfg_.models) {
        for (const auto& col : main_columns()) {
          const std::set<std::string> members(col.members.begin(), col.members.end());
          std::map<std::string, std::map<std::string, double>> by_setting;
          for (const auto& r : records)
            if (r.dataset == spec.name && r.model_id == model.id && members.count(r.language))
              by_setting[r.setting][r.item_key()] = percent_score(r);
          const auto t = by_setting.find(target.id());
          if (t == by_setting.end()) continue;
          std::set<std::string> common;
          for (const auto& [k, _] : t->second) common.insert(k);
          std::vector<std::string> baseline_ids;
          for (const auto& s : cfg_.settings) {
            if (s == target) continue;
            const auto b = by_setting.find(s.id());
            if (b == by_setting.end()) continue;
            baseline_ids.push_back(s.id());
            std::set<std::string> keep;
            for (const auto& k : common)
              if (b->second.count(k)) keep.insert(k);
            common = std::move(keep);
          }
          if (common.empty()) continue;
          const std::vector<std::string> items(common.begin(), common.end());
          auto vec = [&](const std::string& id) {
            ScoreVector v{id, items, {}};
            for (const auto& k : items) v.scores.push_back(by_setting[id][k]);
            return v;
          };
          const ScoreVector tv = vec(target.id());
          std::vector<ScoreVector> bases;
          for (const auto& id : baseline_ids) bases.push_back(vec(id));
          BootstrapParams params = cfg_.bootstrap;
          params.seed = derive_seed(cfg_.seed, {spec.name, model.id, col.id});
          const auto summary = significant_vs_all(tv, bases, params);
          if (summary.vacuous)
            err_of(hooks_) << "warning: no baselines for " << spec.name << "/" << model.id << "/" << col.id
                           << "; significance is vacuous\n";
          tables.push_back({{"dataset", spec.name},
                            {"model", model.id},
                            {"column", col.id},
                            {"items", items.size()},
                            {"target", target.id()},
                            {"summary", to_json(summary)}});
        }
      }
    }
    const json doc{{"run_id", run_id_},
                   {"iterations", cfg_.bootstrap.iterations},
                   {"ci_level", cfg_.bootstrap.ci_level},
                   {"seed", cfg_.seed},
                   {"tables", tables}};
    if (hooks_.dry_run) {
      out << "stats: would write " << tables.size() << " comparisons\n";
      return kExitOk;
    }
    write_file_atomic(results_path() / "bootstrap.json", canonical_dump(doc));
    std::size_t significant = 0;
    for (const auto& t : tables) significant += t["summary"]["overall"].get<bool>() ? 1 : 0;
    out << "stats: " << tables.size() << " columns tested, " << significant << " significant over all baselines\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err_of(hooks_) << "stats: " << e.what() << "\n";
    return kExitError;
  }
}

int Pipeline::report() {
  std::ostream& out = out_of(hooks_);
  try {
    const auto records = read_records(results_path() / "records.jsonl");
    if (records.empty()) throw std::runtime_error("no records; run first");
    std::set<std::string> significant;
    const auto boot_path = results_path() / "bootstrap.json";
    if (std::filesystem::exists(boot_path)) {
      const json boot = json::parse(read_file(boot_path));
      for (const auto& t : boot.at("tables"))
        if (t["summary"]["overall"].get<bool>() && !t["summary"]["vacuous"].get<bool>())
          significant.insert(t["dataset"].get<std::string>() + "\x1f" + t["model"].get<std::string>() + "\x1f" +
                             t["column"].get<std::string>());
    }
    std::map<std::string, std::string> labels;
    std::vector<std::string> main_rows, para_rows;
    for (const auto& s : cfg_.settings) {
      labels[s.id()] = s.label();
      (s.kind() == SettingKind::paraphrase ? para_rows : main_rows).push_back(s.id());
    }
    if (!para_rows.empty()) para_rows.push_back(cfg_.stats_target);

    std::vector<ScoreMatrix> mains, paras, deltas, subjects, models;
    for (const auto& spec : cfg_.datasets) {
      std::vector<EvalRecord> ds_records;
      for (const auto& r : records)
        if (r.dataset == spec.name) ds_records.push_back(r);
      if (ds_records.empty()) continue;
      for (const auto& model : cfg_.models) {
        std::vector<EvalRecord> mr;
        for (const auto& r : ds_records)
          if (r.model_id == model.id) mr.push_back(r);
        if (mr.empty()) continue;
        const std::string title = spec.name + " / " + model.id;
        auto columns = main_columns();
        for (auto& c : columns) c.significant = significant.count(spec.name + "\x1f" + model.id + "\x1f" + c.id) > 0;
        AggregateSpec main_spec{GroupField::language, columns, main_rows, labels, title};
        const ScoreMatrix main = aggregate(mr, main_spec);
        mains.push_back(mark_best(main));
        if (!para_rows.empty()) {
          AggregateSpec ps{GroupField::language, columns, para_rows, labels, title + " (paraphrase control)"};
          paras.push_back(mark_best(aggregate(mr, ps)));
        }
        if (std::find(main.row_ids.begin(), main.row_ids.end(), cfg_.delta_baseline) != main.row_ids.end()) {
          ScoreMatrix d = delta_vs_baseline(main, cfg_.delta_baseline);
          d.title = title + " vs " + labels[cfg_.delta_baseline] + " (%p)";
          deltas.push_back(std::move(d));
        }
        std::vector<EvalRecord> tr;
        for (const auto& r : mr)
          if (r.language == cfg_.target_language) tr.push_back(r);
        if (!tr.empty()) {
          AggregateSpec ss{GroupField::subject, {}, main_rows, labels, title + " by subject (Tgt.)"};
          subjects.push_back(mark_best(aggregate(tr, ss)));
        }
      }
      std::vector<EvalRecord> tr;
      for (const auto& r : ds_records)
        if (r.language == cfg_.target_language) tr.push_back(r);
      if (!tr.empty()) {
        std::vector<ColumnSpec> cols;
        for (const auto& m : cfg_.models) cols.push_back({m.id, m.id, {m.id}, false});
        AggregateSpec ms{GroupField::model, cols, main_rows, labels, spec.name + " by model (Tgt.)"};
        models.push_back(mark_best(aggregate(tr, ms)));
      }
    }

    auto md = [](const std::vector<ScoreMatrix>& ms, const RenderOptions& o) {
      std::string s;
      for (const auto& m : ms) s += (s.empty() ? "" : "\n") + render(m, RenderFormat::markdown, o);
      return s;
    };
    auto csv = [](const std::vector<std::vector<ScoreMatrix>*>& groups) {
      std::string s;
      for (const auto* g : groups)
        for (const auto& m : *g) {
          std::string body = render(m, RenderFormat::csv);
          if (!s.empty()) body = body.substr(body.find('\n') + 1);
          s += body;
        }
      return s;
    };
    auto js = [](const std::vector<ScoreMatrix>& ms) {
      json a = json::array();
      for (const auto& m : ms) a.push_back(to_json(m));
      return a;
    };
    if (hooks_.dry_run) {
      out << "report: would write " << mains.size() << " main tables\n";
      return kExitOk;
    }
    const RenderOptions plain;
    RenderOptions signed_opts;
    signed_opts.signed_values = true;
    const auto dir = results_path();
    std::string table = md(mains, plain);
    if (!paras.empty()) table += "\n" + md(paras, plain);
    write_file_atomic(dir / "table.md", table);
    write_file_atomic(dir / "table.csv", csv({&mains, &paras}));
    write_file_atomic(dir / "matrix.json",
                      canonical_dump(json{{"main", js(mains)},
                                          {"paraphrase", js(paras)},
                                          {"deltas", js(deltas)},
                                          {"subjects", js(subjects)},
                                          {"models", js(models)}}));
    write_file_atomic(dir / "deltas.md", md(deltas, signed_opts));
    write_file_atomic(dir / "subjects.md", md(subjects, plain));
    write_file_atomic(dir / "models.md", md(models, plain));
    out << "report: wrote " << mains.size() << " main tables to " << dir.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err_of(hooks_) << "report: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace csicl

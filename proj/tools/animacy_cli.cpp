// animacy: command-line front end for scoring, annotation, tuning,
// evaluation, pooling and WordNet inspection.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "animacy/dataset.hpp"
#include "animacy/disambiguation.hpp"
#include "animacy/errors.hpp"
#include "animacy/eval.hpp"
#include "animacy/mlm_backend.hpp"
#include "animacy/scorer.hpp"
#include "animacy/text.hpp"
#include "animacy/wordnet.hpp"
#include "json.hpp"

using namespace animacy;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;
constexpr int kExitOther = 1;

struct RunConfig {
  std::string backend = "replay";
  std::string fixture;
  std::string endpoint;
  std::string model_id;
  int timeout_ms = 10000;
  int max_retries = 2;

  int kappa = 10;
  double tau = 0.5;
  std::string weight_mode = "softmax";
  std::string unknown_policy = "exclude";
  std::string lesk_sentence = "original";
  bool use_context = false;
  bool gloss_examples = false;
  int max_parallel = 4;

  std::string wordnet;
  std::string pronouns;
  std::uint64_t seed = 42;
  bool json = false;
};

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

ScorerConfig scorer_config(const RunConfig& rc) {
  ScorerConfig c;
  c.kappa = rc.kappa;
  c.tau = rc.tau;
  c.weight_mode = parse_weight_mode(rc.weight_mode);
  c.unknown_policy = parse_unknown_policy(rc.unknown_policy);
  c.use_context = rc.use_context;
  c.lesk_sentence = rc.lesk_sentence == "masked" ? LeskSentence::masked : LeskSentence::original;
  c.max_parallel = rc.max_parallel;
  c.validate();
  return c;
}

json config_json(const ScorerConfig& c, const std::string& model_id) {
  return {{"model_id", model_id},
          {"kappa", c.kappa},
          {"tau", c.tau},
          {"weight_mode", std::string(to_string(c.weight_mode))},
          {"unknown_policy", std::string(to_string(c.unknown_policy))},
          {"use_context", c.use_context},
          {"lesk_sentence", c.lesk_sentence == LeskSentence::masked ? "masked" : "original"}};
}

// Everything a scoring command needs, built once.
struct Pipeline {
  std::unique_ptr<wordnet::WordNetGraph> graph;
  std::unique_ptr<mlm::MaskedLanguageModel> backend;
  std::unique_ptr<wsd::Disambiguator> wsd;
  ScorerConfig config;

  Scorer scorer() const { return Scorer(config, *wsd, *backend); }
};

std::unique_ptr<wordnet::WordNetGraph> load_graph(const RunConfig& rc) {
  std::string dir = rc.wordnet;
  if (dir.empty())
    if (const char* env = std::getenv("ANIMACY_WORDNET_DIR")) dir = env;
  if (dir.empty()) throw ConfigError("no WordNet given (--wordnet or ANIMACY_WORDNET_DIR)");
  std::filesystem::path p(dir);
  if (std::filesystem::is_regular_file(p)) {
    std::ifstream in(p, std::ios::binary);
    return std::make_unique<wordnet::WordNetGraph>(wordnet::WordNetGraph::load_dump(in));
  }
  return std::make_unique<wordnet::WordNetGraph>(wordnet::WordNetGraph::load(p));
}

Pipeline make_pipeline(const RunConfig& rc) {
  Pipeline p;
  p.config = scorer_config(rc);
  p.graph = load_graph(rc);

  mlm::BackendDescriptor desc;
  desc.model_id = rc.model_id;
  if (rc.backend == "replay") {
    if (rc.fixture.empty()) throw ConfigError("--backend replay needs --fixture");
    desc.kind = mlm::BackendKind::replay;
    desc.location = rc.fixture;
  } else if (rc.backend == "http") {
    desc.kind = mlm::BackendKind::http;
    desc.location = rc.endpoint;
  } else {
    throw ConfigError("unknown backend '" + rc.backend + "' (replay|http)");
  }
  mlm::HttpOptions http;
  http.timeout = std::chrono::milliseconds(rc.timeout_ms);
  http.max_retries = rc.max_retries;
  http.max_in_flight = rc.max_parallel;
  p.backend = mlm::make_backend(desc, http);

  auto pronouns =
      rc.pronouns.empty() ? wsd::PronounList::builtin() : wsd::PronounList::from_file(rc.pronouns);
  p.wsd = std::make_unique<wsd::Disambiguator>(*p.graph, *p.backend, std::move(pronouns),
                                               wsd::DisambiguatorOptions{rc.gloss_examples});
  return p;
}

// "dresser.n.02" style name of a synset, via its first lemma.
std::string sense_name(const wordnet::WordNetGraph& g, wordnet::SynsetId id) {
  const auto& s = g.synset(id);
  if (s.lemmas.empty()) return id.str();
  auto senses = g.senses_of(s.lemmas.front());
  for (std::size_t i = 0; i < senses.size(); ++i)
    if (senses[i]->id == id) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ".n.%02zu", i + 1);
      return s.lemmas.front() + buf;
    }
  return id.str();
}

std::vector<std::string> load_issues(const dataset::LoadResult& res) {
  std::vector<std::string> out;
  for (const auto& e : res.errors)
    out.push_back("line " + std::to_string(e.line) + ": " + e.message);
  return out;
}

dataset::LoadResult load_input(const std::string& path, const std::string& schema) {
  auto res = dataset::load_corpus(path, dataset::parse_schema(schema));
  for (const auto& msg : load_issues(res)) std::cerr << "warning: skipped " << msg << '\n';
  if (res.corpus.instances.empty()) throw InputError(path + ": no usable rows");
  return res;
}

// ---- score ----------------------------------------------------------------

struct ScoreArgs {
  std::string sentence;
  std::string target;
  std::optional<std::size_t> start, end;
  std::string before, after;
};

int cmd_score(const RunConfig& rc, const ScoreArgs& a) {
  MaskedInstance inst;
  inst.id = "cli";
  inst.sentence = a.sentence;
  if (a.start.has_value() != a.end.has_value())
    throw InputError("--start and --end go together");
  if (a.start) {
    inst.target_start = *a.start;
    inst.target_end = *a.end;
    inst.validate();
    if (!a.target.empty() && inst.target() != a.target)
      throw InputError("offsets select '" + inst.target() + "', not '" + a.target + "'");
  } else {
    if (a.target.empty()) throw InputError("give --target or --start/--end");
    auto pos = a.sentence.find(a.target);
    if (pos == std::string::npos)
      throw InputError("target '" + a.target + "' does not occur in the sentence");
    inst.target_start = text::codepoint_offset(a.sentence, pos);
    inst.target_end = inst.target_start + text::codepoint_length(a.target);
  }
  if (!a.before.empty()) inst.context_before = a.before;
  if (!a.after.empty()) inst.context_after = a.after;

  auto p = make_pipeline(rc);
  const auto result = p.scorer().score(inst);
  const std::string masked = mask_target(inst, p.config.use_context);

  if (rc.json) {
    json preds = json::array();
    for (const auto& u : result.used_predictions)
      preds.push_back({{"token", u.token},
                       {"raw_score", u.raw_score},
                       {"weight", u.weight},
                       {"label", std::string(wsd::to_string(u.label))},
                       {"source", std::string(wsd::to_string(u.source))},
                       {"sense", u.sense ? json(sense_name(*p.graph, *u.sense)) : json(nullptr)}});
    json out = {{"sentence", inst.sentence},
                {"target", inst.target()},
                {"masked", masked},
                {"score", result.score},
                {"decision", std::string(to_string(result.decision))},
                {"degenerate", result.degenerate},
                {"excluded_count", result.excluded_count},
                {"excluded_tokens", result.excluded_tokens},
                {"predictions", preds},
                {"config", config_json(p.config, p.backend->model_id())}};
    std::cout << out.dump() << '\n';
    return kExitOk;
  }

  std::cout << "sentence  " << inst.sentence << '\n'
            << "masked    " << masked << '\n'
            << "model     " << p.backend->model_id() << '\n'
            << "score     " << fmt(result.score) << '\n'
            << "decision  " << to_string(result.decision) << " (tau " << fmt(p.config.tau, 2)
            << ")\n";
  if (result.degenerate) std::cout << "note      every prediction was unknown\n";
  std::cout << '\n'
            << std::left << std::setw(14) << "token" << std::right << std::setw(10) << "raw"
            << std::setw(10) << "weight" << "  " << std::left << std::setw(11) << "label"
            << std::setw(9) << "source" << "sense\n";
  for (const auto& u : result.used_predictions) {
    std::cout << std::left << std::setw(14) << u.token << std::right << std::setw(10)
              << fmt(u.raw_score, 4) << std::setw(10) << fmt(u.weight, 4) << "  " << std::left
              << std::setw(11) << wsd::to_string(u.label) << std::setw(9)
              << wsd::to_string(u.source) << (u.sense ? sense_name(*p.graph, *u.sense) : "-")
              << '\n';
  }
  if (!result.excluded_tokens.empty()) {
    std::cout << "excluded ";
    for (const auto& t : result.excluded_tokens) std::cout << ' ' << t;
    std::cout << '\n';
  }
  return kExitOk;
}

// ---- annotate ---------------------------------------------------------------

struct AnnotateArgs {
  std::string input, output, schema = "stories";
};

int cmd_annotate(const RunConfig& rc, const AnnotateArgs& a) {
  auto table = dataset::read_tsv(std::filesystem::path(a.input));
  dataset::check_header(table, dataset::parse_schema(a.schema));

  std::vector<MaskedInstance> good;
  std::vector<std::optional<std::size_t>> slot(table.rows.size());
  std::vector<std::string> errors(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    try {
      good.push_back(dataset::instance_from_row(table, r));
      slot[r] = good.size() - 1;
    } catch (const RowError& e) {
      errors[r] = e.what();
    }
  }

  auto p = make_pipeline(rc);
  const auto batch = p.scorer().score_batch(good);

  dataset::TsvTable out;
  out.header = table.header;
  for (const char* c : {"score", "decision", "error"}) out.header.emplace_back(c);
  std::size_t failed = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto row = table.rows[r];
    row.resize(table.header.size());
    std::string err = errors[r];
    if (slot[r] && !batch[*slot[r]].ok()) err = batch[*slot[r]].error;
    if (err.empty()) {
      const auto& res = *batch[*slot[r]].result;
      row.push_back(fmt(res.score));
      row.emplace_back(to_string(res.decision));
      row.emplace_back();
    } else {
      ++failed;
      for (auto& ch : err)
        if (ch == '\t' || ch == '\n') ch = ' ';
      row.emplace_back();
      row.emplace_back();
      row.push_back(err);
    }
    out.rows.push_back(std::move(row));
  }

  if (a.output.empty() || a.output == "-") {
    dataset::write_tsv(std::cout, out);
  } else {
    std::ofstream f(a.output, std::ios::binary);
    if (!f) throw ResourceError("cannot write " + a.output);
    dataset::write_tsv(f, out);
  }
  std::cerr << "annotated " << table.rows.size() << " rows: " << table.rows.size() - failed
            << " processed, " << failed << " failed\n";
  return kExitOk;
}

// ---- tune -------------------------------------------------------------------

struct TuneArgs {
  std::string input, schema = "stories", save_config;
  double tau_step = eval::kDefaultTauStep;
  std::vector<int> kappas = eval::kDefaultKappaGrid;
};

int cmd_tune(const RunConfig& rc, const TuneArgs& a) {
  auto loaded = load_input(a.input, a.schema);
  const auto& corpus = loaded.corpus;
  auto train = corpus.split ? corpus.subset(corpus.split->train) : corpus.instances;
  if (train.empty()) throw InputError("no training instances");

  auto p = make_pipeline(rc);
  auto result = eval::tune(train, p.config, *p.wsd, *p.backend, a.tau_step, a.kappas);

  if (!a.save_config.empty()) {
    std::ofstream f(a.save_config);
    if (!f) throw ResourceError("cannot write " + a.save_config);
    f << "# tuned on " << train.size() << " instances of " << corpus.name << "\n"
      << "backend=" << rc.backend << "\n";
    if (!rc.fixture.empty()) f << "fixture=" << rc.fixture << "\n";
    if (!rc.endpoint.empty()) f << "endpoint=" << rc.endpoint << "\n";
    f << "model-id=" << p.backend->model_id() << "\n"
      << "kappa=" << result.best_kappa << "\n"
      << "tau=" << fmt(result.best_tau, 4) << "\n"
      << "weight-mode=" << to_string(p.config.weight_mode) << "\n"
      << "unknown-policy=" << to_string(p.config.unknown_policy) << "\n"
      << "context=" << (p.config.use_context ? "true" : "false") << "\n"
      << "lesk-sentence=" << rc.lesk_sentence << "\n"
      << "gloss-examples=" << (rc.gloss_examples ? "true" : "false") << "\n";
  }

  if (rc.json) {
    auto j = result.to_json();
    j["n_train"] = train.size();
    j["config"] = config_json(p.config, p.backend->model_id());
    std::cout << j.dump() << '\n';
    return kExitOk;
  }
  std::cout << "trained on " << train.size() << " instances\n"
            << "best kappa " << result.best_kappa << "  tau " << fmt(result.best_tau, 2)
            << "  macro F " << fmt(result.best_f, 4) << '\n';
  return kExitOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string input, schema = "stories", on = "auto";
};

int cmd_evaluate(const RunConfig& rc, const EvaluateArgs& a) {
  auto loaded = load_input(a.input, a.schema);
  const auto& corpus = loaded.corpus;
  std::string on = a.on;
  if (on == "auto") on = corpus.split ? "test" : "all";
  std::vector<MaskedInstance> items;
  if (on == "all") {
    items = corpus.instances;
  } else if (on == "test" || on == "train") {
    if (!corpus.split) throw InputError("--on " + on + " needs a split column");
    items = corpus.subset(on == "test" ? corpus.split->test : corpus.split->train);
  } else {
    throw ConfigError("--on takes auto, all, train or test");
  }
  if (items.empty()) throw InputError("nothing to evaluate");

  auto p = make_pipeline(rc);
  const auto batch = p.scorer().score_batch(items);
  std::vector<eval::ScoredDecision> preds;
  std::vector<int> gold;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!batch[i].ok()) {
      std::cerr << "warning: " << items[i].id << ": " << batch[i].error << '\n';
      ++failed;
      continue;
    }
    preds.push_back({batch[i].result->score, batch[i].result->decision});
    gold.push_back(*items[i].gold_animacy);
  }
  if (preds.empty()) throw InputError("every instance failed to score");
  const auto report = eval::evaluate(preds, gold);

  std::optional<eval::EvalReport> baseline;
  if (corpus.split && !corpus.split->train.empty()) {
    std::vector<int> train_gold;
    for (const auto& inst : corpus.subset(corpus.split->train))
      train_gold.push_back(*inst.gold_animacy);
    baseline = eval::most_frequent_class_baseline(train_gold, gold);
  }

  if (rc.json) {
    json j = {{"on", on},
              {"failed", failed},
              {"maskpredict", report.to_json()},
              {"config", config_json(p.config, p.backend->model_id())}};
    if (baseline) j["most_frequent_class"] = baseline->to_json();
    std::cout << j.dump() << '\n';
    return kExitOk;
  }
  std::vector<eval::TableRow> rows;
  if (baseline) rows.push_back({"Most frequent class", *baseline});
  rows.push_back({"MaskPredict (" + p.backend->model_id() + ")", report});
  std::cout << eval::format_table(rows);
  std::cout << "n=" << report.n << " on " << on;
  if (failed) std::cout << ", " << failed << " failed";
  if (report.single_class) std::cout << ", gold has a single class";
  std::cout << '\n';
  return kExitOk;
}

// ---- pool -------------------------------------------------------------------

struct PoolArgs {
  std::string input;
  std::size_t per_band = 25;
};

int cmd_pool(const RunConfig& rc, const PoolArgs& a) {
  auto table = dataset::read_tsv(std::filesystem::path(a.input));
  auto id_col = table.column("id");
  auto score_col = table.column("score");
  if (!id_col || !score_col) throw SchemaError(a.input + ": pool needs id and score columns");
  std::vector<dataset::ScoredId> scored;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() <= std::max(*id_col, *score_col) || row[*score_col].empty()) continue;
    try {
      std::size_t used = 0;
      double s = std::stod(row[*score_col], &used);
      if (used != row[*score_col].size()) throw std::invalid_argument("trailing");
      scored.push_back({row[*id_col], s});
    } catch (const std::logic_error&) {
      throw RowError(table.line_numbers[r], "score is not a number: '" + row[*score_col] + "'");
    }
  }
  auto bands = dataset::canonical_bands();
  auto result = dataset::pool_by_band(scored, bands, a.per_band, rc.seed);
  if (rc.json) {
    std::cout << result.to_json().dump() << '\n';
    return kExitOk;
  }
  for (const auto& sel : result.bands)
    for (const auto& id : sel.ids)
      std::cout << id << '\t' << fmt(sel.band.lower, 2) << '-' << fmt(sel.band.upper, 2) << '\n';
  return kExitOk;
}

// ---- wordnet ----------------------------------------------------------------

struct WordnetArgs {
  std::string lemma, synset, dump;
};

int cmd_wordnet(const RunConfig& rc, const WordnetArgs& a) {
  auto g = load_graph(rc);
  if (!a.dump.empty()) {
    std::ofstream f(a.dump, std::ios::binary);
    if (!f) throw ResourceError("cannot write " + a.dump);
    g->dump(f);
  }
  std::vector<const wordnet::Synset*> senses;
  if (!a.lemma.empty()) {
    senses = g->senses_of(a.lemma);
    if (senses.empty()) throw LookupError("no noun senses for '" + a.lemma + "'");
  } else if (!a.synset.empty()) {
    auto id = g->resolve_name(a.synset);
    if (!id) {
      try {
        id = wordnet::SynsetId::parse(a.synset);
      } catch (const InputError&) {
        throw LookupError("unknown synset '" + a.synset + "'");
      }
    }
    senses.push_back(&g->synset(*id));
  } else if (a.dump.empty()) {
    std::cout << g->size() << " noun synsets\n";
    return kExitOk;
  }

  if (rc.json) {
    json arr = json::array();
    for (const auto* s : senses)
      arr.push_back({{"id", s->id.str()},
                     {"name", sense_name(*g, s->id)},
                     {"lemmas", s->lemmas},
                     {"gloss", s->gloss},
                     {"living_thing", g->is_living_thing(s->id)}});
    std::cout << json{{"query", a.lemma.empty() ? a.synset : a.lemma}, {"senses", arr}}.dump()
              << '\n';
    return kExitOk;
  }
  for (const auto* s : senses) {
    std::cout << sense_name(*g, s->id) << "  " << s->id.str() << "  "
              << (g->is_living_thing(s->id) ? "living_thing" : "-") << '\n';
    std::cout << "  lemmas:";
    for (const auto& l : s->lemmas) std::cout << ' ' << l;
    std::cout << "\n  gloss:  " << s->gloss << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised animacy scoring with masked language models and WordNet"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key=value config file; command-line flags take precedence");

  RunConfig rc;
  app.add_option("--backend", rc.backend, "Model backend: replay or http")
      ->check(CLI::IsMember({"replay", "http"}))
      ->capture_default_str();
  app.add_option("--fixture", rc.fixture, "Replay fixture JSON (replay backend)");
  app.add_option("--endpoint", rc.endpoint,
                 std::string("Model server base URL (http backend); defaults to $") +
                     mlm::kServerUrlEnv);
  app.add_option("--model-id", rc.model_id, "Expected model id; mismatches are rejected");
  app.add_option("--timeout-ms", rc.timeout_ms, "HTTP request timeout")->capture_default_str();
  app.add_option("--retries", rc.max_retries, "HTTP retries after the first attempt")
      ->capture_default_str();
  app.add_option("--kappa", rc.kappa, "Number of predictions kept")->capture_default_str();
  app.add_option("--tau", rc.tau, "Decision threshold; animate when score > tau")
      ->capture_default_str();
  app.add_option("--weight-mode", rc.weight_mode, "softmax, linear or uniform")
      ->check(CLI::IsMember({"softmax", "linear", "uniform"}))
      ->capture_default_str();
  app.add_option("--unknown-policy", rc.unknown_policy, "exclude or count_inanimate")
      ->check(CLI::IsMember({"exclude", "count_inanimate"}))
      ->capture_default_str();
  app.add_flag("--context,!--no-context", rc.use_context,
               "Include neighbouring sentences in the masked input");
  app.add_option("--lesk-sentence", rc.lesk_sentence,
                 "Sentence compared with glosses: original or masked")
      ->check(CLI::IsMember({"original", "masked"}))
      ->capture_default_str();
  app.add_flag("--gloss-examples", rc.gloss_examples, "Keep example sentences in glosses");
  app.add_option("--max-parallel", rc.max_parallel, "Concurrent scoring workers")
      ->capture_default_str();
  app.add_option("--wordnet", rc.wordnet,
                 "WordNet dict directory or graph dump; defaults to $ANIMACY_WORDNET_DIR");
  app.add_option("--pronouns", rc.pronouns, "Pronoun list file (one per line)");
  app.add_option("--seed", rc.seed, "Seed for pooling")->capture_default_str();
  app.add_flag("--json", rc.json, "Print one JSON object instead of text");

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score one target expression in a sentence");
  score->add_option("--sentence,-s", score_args.sentence, "Sentence text")->required();
  score->add_option("--target,-t", score_args.target, "Target expression (first occurrence)");
  score->add_option("--start", score_args.start, "Target start, code points");
  score->add_option("--end", score_args.end, "Target end, code points (exclusive)");
  score->add_option("--before", score_args.before, "Preceding sentence");
  score->add_option("--after", score_args.after, "Following sentence");

  AnnotateArgs ann_args;
  auto* annotate = app.add_subcommand("annotate", "Append score/decision/error columns to a TSV");
  annotate->add_option("--input,-i", ann_args.input, "Input TSV")->required();
  annotate->add_option("--output,-o", ann_args.output, "Output TSV (default stdout)");
  annotate->add_option("--schema", ann_args.schema, "stories or machines")
      ->check(CLI::IsMember({"stories", "machines"}))
      ->capture_default_str();

  TuneArgs tune_args;
  auto* tune = app.add_subcommand("tune", "Grid-search tau and kappa on the training split");
  tune->add_option("--input,-i", tune_args.input, "Annotated TSV")->required();
  tune->add_option("--schema", tune_args.schema, "stories or machines")
      ->check(CLI::IsMember({"stories", "machines"}))
      ->capture_default_str();
  tune->add_option("--tau-step", tune_args.tau_step, "Tau grid step")->capture_default_str();
  tune->add_option("--kappas", tune_args.kappas, "Kappa grid")->delimiter(',')->capture_default_str();
  tune->add_option("--save-config", tune_args.save_config, "Write the tuned settings here");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Macro P/R/F and MAP against gold labels");
  evaluate->add_option("--input,-i", eval_args.input, "Annotated TSV")->required();
  evaluate->add_option("--schema", eval_args.schema, "stories or machines")
      ->check(CLI::IsMember({"stories", "machines"}))
      ->capture_default_str();
  evaluate->add_option("--on", eval_args.on, "auto, all, train or test")
      ->check(CLI::IsMember({"auto", "all", "train", "test"}))
      ->capture_default_str();

  PoolArgs pool_args;
  auto* pool = app.add_subcommand("pool", "Sample ids evenly from the four animacy bands");
  pool->add_option("--input,-i", pool_args.input, "TSV with id and score columns")->required();
  pool->add_option("--per-band,-n", pool_args.per_band, "Ids per band")->capture_default_str();

  WordnetArgs wn_args;
  auto* wn = app.add_subcommand("wordnet", "Inspect noun senses and the living_thing closure");
  wn->add_option("--lemma,-l", wn_args.lemma, "Lemma to look up");
  wn->add_option("--synset", wn_args.synset, "Synset name (dresser.n.02) or id (03237639-n)");
  wn->add_option("--dump", wn_args.dump, "Write the parsed graph as JSON");

  // Subcommand help lists the global flags too.
  auto global_help = [&app] {
    auto fmt = std::dynamic_pointer_cast<CLI::Formatter>(app.get_formatter());
    std::string out = "GLOBAL OPTIONS (before or after the subcommand):\n";
    for (const CLI::Option* opt : app.get_options())
      if (opt != app.get_help_ptr()) out += fmt->make_option(opt, false);
    return out;
  };
  for (auto* sub : app.get_subcommands({})) sub->footer(global_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc_parse = app.exit(e);
    return rc_parse == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*score) return cmd_score(rc, score_args);
    if (*annotate) return cmd_annotate(rc, ann_args);
    if (*tune) return cmd_tune(rc, tune_args);
    if (*evaluate) return cmd_evaluate(rc, eval_args);
    if (*pool) return cmd_pool(rc, pool_args);
    if (*wn) return cmd_wordnet(rc, wn_args);
  } catch (const BackendError& e) {
    std::cerr << "error: backend: " << e.what() << '\n';
    return kExitBackend;
  } catch (const FixtureMissError& e) {
    std::cerr << "error: backend: " << e.what() << '\n';
    return kExitBackend;
  } catch (const Error& e) {
    // Bad input, schema, config, lookups and unreadable resources.
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}

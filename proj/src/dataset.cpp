#include "animacy/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

#include "animacy/errors.hpp"
#include "animacy/text.hpp"

namespace animacy::dataset {

namespace {

const std::vector<std::string> kCanonicalColumns = {
    "id",     "date",         "context_before", "sentence", "context_after",
    "target", "target_start", "target_end",     "animacy",  "humanness"};

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Uniform draw in [0, n) from raw mt19937_64 output by rejection, so the
// selection does not depend on the standard library's distribution code.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % n;
}

std::string fmt_band(const AnimacyBand& b) {
  std::ostringstream os;
  os << '[' << b.lower << ", " << b.upper << ')';
  return os.str();
}

}  // namespace

Schema parse_schema(std::string_view s) {
  if (s == "stories") return Schema::stories;
  if (s == "machines") return Schema::machines;
  throw ConfigError("unknown corpus schema '" + std::string(s) + "' (stories|machines)");
}

std::optional<std::size_t> TsvTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

TsvTable read_tsv(std::istream& in) {
  TsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      t.header = split_tabs(line);
      have_header = true;
      continue;
    }
    t.rows.push_back(split_tabs(line));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header) throw SchemaError("TSV input has no header row");
  return t;
}

TsvTable read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open " + path.string());
  return read_tsv(in);
}

void write_tsv(std::ostream& out, const TsvTable& table) {
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << '\t';
      out << row[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& r : table.rows) write_row(r);
}

void check_header(const TsvTable& table, Schema schema) {
  std::vector<std::string> required = {"id", "sentence", "target", "animacy"};
  if (schema == Schema::machines) required.push_back("humanness");
  std::string missing;
  for (const auto& c : required)
    if (!table.column(c)) missing += (missing.empty() ? "" : ", ") + c;
  if (!missing.empty()) throw SchemaError("missing required column(s): " + missing);
  const bool has_start = table.column("target_start").has_value();
  const bool has_end = table.column("target_end").has_value();
  if (has_start != has_end)
    throw SchemaError("target_start and target_end must appear together");
}

MaskedInstance instance_from_row(const TsvTable& table, std::size_t row_index) {
  const auto& row = table.rows.at(row_index);
  const std::size_t line = table.line_numbers.at(row_index);
  if (row.size() != table.header.size())
    throw RowError(line, "expected " + std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(row.size()));
  auto cell = [&](std::string_view name) -> std::optional<std::string> {
    auto c = table.column(name);
    if (!c || row[*c].empty()) return std::nullopt;
    return row[*c];
  };
  auto int_cell = [&](std::string_view name) -> std::optional<long long> {
    auto v = cell(name);
    if (!v) return std::nullopt;
    auto n = parse_int(*v);
    if (!n) throw RowError(line, std::string(name) + " is not an integer: '" + *v + "'");
    return n;
  };
  auto label_cell = [&](std::string_view name) -> std::optional<int> {
    auto v = int_cell(name);
    if (v && *v != 0 && *v != 1)
      throw RowError(line, std::string(name) + " must be 0 or 1");
    if (!v) return std::nullopt;
    return static_cast<int>(*v);
  };

  MaskedInstance inst;
  auto id = cell("id");
  if (!id) throw RowError(line, "empty id");
  inst.id = *id;
  auto sentence = cell("sentence");
  if (!sentence) throw RowError(line, "empty sentence");
  inst.sentence = *sentence;
  auto target = cell("target");
  if (!target) throw RowError(line, "empty target");
  inst.context_before = cell("context_before");
  inst.context_after = cell("context_after");
  if (auto d = int_cell("date")) inst.date = static_cast<int>(*d);
  inst.gold_animacy = label_cell("animacy");
  inst.gold_humanness = label_cell("humanness");

  auto start = int_cell("target_start");
  auto end = int_cell("target_end");
  if (start.has_value() != end.has_value())
    throw RowError(line, "target_start and target_end must both be set or both empty");
  if (start) {
    if (*start < 0 || *end < 0) throw RowError(line, "negative target offset");
    inst.target_start = static_cast<std::size_t>(*start);
    inst.target_end = static_cast<std::size_t>(*end);
  } else {
    auto pos = inst.sentence.find(*target);
    if (pos == std::string::npos)
      throw RowError(line, "target '" + *target + "' does not occur in sentence");
    inst.target_start = text::codepoint_offset(inst.sentence, pos);
    inst.target_end = inst.target_start + text::codepoint_length(*target);
  }
  try {
    inst.validate();
  } catch (const InputError& e) {
    throw RowError(line, e.what());
  }
  if (start && inst.target() != *target)
    throw RowError(line, "offsets select '" + inst.target() + "', target column says '" +
                             *target + "'");
  return inst;
}

const MaskedInstance* Corpus::find(std::string_view id) const {
  for (const auto& i : instances)
    if (i.id == id) return &i;
  return nullptr;
}

std::vector<MaskedInstance> Corpus::subset(const std::vector<std::string>& ids) const {
  std::unordered_map<std::string_view, const MaskedInstance*> by_id;
  for (const auto& i : instances) by_id.emplace(i.id, &i);
  std::vector<MaskedInstance> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw IntegrityError("unknown instance id '" + id + "'");
    out.push_back(*it->second);
  }
  return out;
}

void Corpus::validate() const {
  std::unordered_set<std::string_view> ids;
  for (const auto& i : instances)
    if (!ids.insert(i.id).second) throw IntegrityError("duplicate instance id '" + i.id + "'");
  if (!split) return;
  std::unordered_set<std::string_view> train;
  for (const auto& id : split->train) {
    if (!ids.contains(id)) throw IntegrityError("train id '" + id + "' not in corpus");
    train.insert(id);
  }
  for (const auto& id : split->test) {
    if (!ids.contains(id)) throw IntegrityError("test id '" + id + "' not in corpus");
    if (train.contains(id)) throw IntegrityError("id '" + id + "' is in both train and test");
  }
}

LoadResult load_corpus(std::istream& in, Schema schema, std::string name) {
  TsvTable table = read_tsv(in);
  check_header(table, schema);
  const auto split_col = table.column("split");
  const bool offsets_given = table.column("target_start").has_value();

  LoadResult res;
  res.corpus.name = std::move(name);
  if (split_col) res.corpus.split.emplace();
  std::unordered_set<std::string> seen;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line = table.line_numbers[r];
    MaskedInstance inst;
    try {
      inst = instance_from_row(table, r);
      if (schema == Schema::machines && !inst.gold_humanness)
        throw RowError(line, "machines schema requires a humanness label");
      if (!inst.gold_animacy) throw RowError(line, "missing animacy label");
      if (!seen.insert(inst.id).second) throw RowError(line, "duplicate id '" + inst.id + "'");
    } catch (const RowError& e) {
      res.errors.push_back({line, e.what()});
      continue;
    }
    const std::size_t start_col = offsets_given ? *table.column("target_start") : 0;
    if (!offsets_given || table.rows[r][start_col].empty())
      res.notes.push_back({line, "offsets resolved from first occurrence of target"});

    if (split_col) {
      const auto& s = table.rows[r][*split_col];
      if (s == "train")
        res.corpus.split->train.push_back(inst.id);
      else if (s == "test")
        res.corpus.split->test.push_back(inst.id);
      else if (!s.empty()) {
        res.errors.push_back({line, "split must be 'train', 'test' or empty, got '" + s + "'"});
        continue;
      }
    }
    res.corpus.instances.push_back(std::move(inst));
  }
  res.corpus.validate();
  return res;
}

LoadResult load_corpus(const std::filesystem::path& path, Schema schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open " + path.string());
  return load_corpus(in, schema, path.stem().string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  TsvTable t;
  t.header = kCanonicalColumns;
  std::unordered_map<std::string_view, std::string_view> split_of;
  if (corpus.split) {
    t.header.push_back("split");
    for (const auto& id : corpus.split->train) split_of[id] = "train";
    for (const auto& id : corpus.split->test) split_of[id] = "test";
  }
  auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& i : corpus.instances) {
    std::vector<std::string> row = {i.id,
                                    opt(i.date),
                                    i.context_before.value_or(""),
                                    i.sentence,
                                    i.context_after.value_or(""),
                                    i.target(),
                                    std::to_string(i.target_start),
                                    std::to_string(i.target_end),
                                    opt(i.gold_animacy),
                                    opt(i.gold_humanness)};
    if (corpus.split) {
      auto it = split_of.find(i.id);
      row.emplace_back(it == split_of.end() ? "" : it->second);
    }
    t.rows.push_back(std::move(row));
  }
  write_tsv(out, t);
}

SplitCounts split_counts(const Corpus& corpus) {
  if (!corpus.split) throw StateError("corpus '" + corpus.name + "' has no train/test split");
  SplitCounts c;
  c.train = corpus.split->train.size();
  c.test = corpus.split->test.size();
  c.animate = static_cast<std::size_t>(
      std::count_if(corpus.instances.begin(), corpus.instances.end(),
                    [](const MaskedInstance& i) { return i.gold_animacy == 1; }));
  return c;
}

std::vector<AnimacyBand> canonical_bands() {
  return {{0.0, 0.25}, {0.25, 0.5}, {0.5, 0.75}, {0.75, 1.0}};
}

std::vector<AnimacyBand> validate_bands(std::span<const AnimacyBand> bands) {
  if (bands.empty()) throw ConfigError("no animacy bands given");
  std::vector<AnimacyBand> sorted(bands.begin(), bands.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const AnimacyBand& a, const AnimacyBand& b) { return a.lower < b.lower; });
  for (const auto& b : sorted)
    if (!(b.lower >= 0.0 && b.lower < b.upper && b.upper <= 1.0))
      throw ConfigError("band " + fmt_band(b) + " is not a non-empty sub-interval of [0, 1]");
  if (sorted.front().lower != 0.0) throw ConfigError("bands do not cover 0");
  if (sorted.back().upper != 1.0) throw ConfigError("bands do not cover 1");
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lower < sorted[i - 1].upper)
      throw ConfigError("bands " + fmt_band(sorted[i - 1]) + " and " + fmt_band(sorted[i]) +
                        " overlap");
    if (sorted[i].lower > sorted[i - 1].upper)
      throw ConfigError("gap between " + fmt_band(sorted[i - 1]) + " and " + fmt_band(sorted[i]));
  }
  return sorted;
}

std::vector<std::string> PoolResult::ids() const {
  std::vector<std::string> out;
  for (const auto& b : bands) out.insert(out.end(), b.ids.begin(), b.ids.end());
  return out;
}

nlohmann::json PoolResult::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["per_band"] = per_band;
  auto arr = nlohmann::json::array();
  for (const auto& b : bands)
    arr.push_back({{"lower", b.band.lower},
                   {"upper", b.band.upper},
                   {"available", b.available},
                   {"selected", b.ids}});
  j["bands"] = std::move(arr);
  return j;
}

PoolResult pool_by_band(std::span<const ScoredId> scored, std::span<const AnimacyBand> bands,
                        std::size_t per_band, std::uint64_t seed) {
  if (per_band == 0) throw ConfigError("per_band must be positive");
  const auto sorted = validate_bands(bands);
  for (const auto& s : scored)
    if (!(s.score >= 0.0 && s.score <= 1.0))
      throw InputError("score for '" + s.id + "' outside [0, 1]");

  PoolResult res;
  res.seed = seed;
  res.per_band = per_band;
  std::mt19937_64 gen(seed);
  for (std::size_t b = 0; b < sorted.size(); ++b) {
    const auto& band = sorted[b];
    const bool last = b + 1 == sorted.size();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < scored.size(); ++i) {
      double s = scored[i].score;
      if (s >= band.lower && (s < band.upper || (last && s <= band.upper)))
        candidates.push_back(i);
    }
    BandSelection sel{band, candidates.size(), {}};
    const std::size_t take = std::min(per_band, candidates.size());
    // Partial Fisher-Yates over the first `take` slots.
    for (std::size_t k = 0; k < take && take < candidates.size(); ++k) {
      auto j = k + uniform_below(gen, candidates.size() - k);
      std::swap(candidates[k], candidates[j]);
    }
    candidates.resize(take);
    std::sort(candidates.begin(), candidates.end());
    for (auto i : candidates) sel.ids.push_back(scored[i].id);
    res.bands.push_back(std::move(sel));
  }
  return res;
}

}  // namespace animacy::dataset

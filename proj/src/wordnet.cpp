#include "animacy/wordnet.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "animacy/errors.hpp"
#include "json.hpp"

namespace animacy::wordnet {

namespace {

using nlohmann::json;

constexpr int kDumpVersion = 1;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits on single spaces while remembering where each token starts, so the
// gloss can be sliced out of the original line verbatim.
struct Token {
  std::string_view text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    out.push_back({line.substr(i, j - i), i});
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n' ||
                        s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

// Visits each line, handing over the line text (no CR) and its byte offset.
// Offsets are counted as if line ends were bare LF; some redistributed
// copies of the database were converted to CRLF and would otherwise fail
// the offset check on every record.
template <typename F>
void for_each_line(std::string_view content, F&& f) {
  std::size_t start = 0;
  std::size_t lineno = 0;
  std::size_t crs = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++lineno;
    auto line = content.substr(start, end - start);
    const bool cr = !line.empty() && line.back() == '\r';
    if (cr) line.remove_suffix(1);
    f(line, start - crs, lineno);
    if (cr) ++crs;
    start = end + 1;
  }
}

bool is_license_line(std::string_view line) {
  return line.size() >= 2 && line[0] == ' ' && line[1] == ' ';
}

Synset parse_data_line(std::string_view line, std::size_t byte_offset, std::size_t lineno,
                       const std::string& file) {
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(file, lineno, what);
  };
  auto toks = tokenize(line);
  if (toks.size() < 6) throw fail("record too short");

  Synset s;
  std::uint32_t offset = 0;
  if (toks[0].text.size() != 8 || !parse_number(toks[0].text, offset))
    throw fail("bad synset offset '" + std::string(toks[0].text) + "'");
  if (offset != byte_offset)
    throw fail("synset offset " + std::string(toks[0].text) +
               " does not match byte position " + std::to_string(byte_offset));
  if (toks[2].text != "n") throw fail("not a noun record: '" + std::string(toks[2].text) + "'");
  s.id = SynsetId{offset, 'n'};

  unsigned word_count = 0;
  if (!parse_number(toks[3].text, word_count, 16) || word_count == 0)
    throw fail("bad word count");
  std::size_t k = 4;
  if (toks.size() < k + 2 * word_count + 1) throw fail("truncated lemma list");
  for (unsigned w = 0; w < word_count; ++w, k += 2) s.lemmas.emplace_back(toks[k].text);

  unsigned ptr_count = 0;
  if (!parse_number(toks[k].text, ptr_count)) throw fail("bad pointer count");
  ++k;
  if (toks.size() < k + 4 * ptr_count) throw fail("truncated pointer list");
  for (unsigned p = 0; p < ptr_count; ++p, k += 4) {
    std::string_view sym = toks[k].text;
    if (sym != "@" && sym != "@i") continue;
    std::uint32_t target = 0;
    if (toks[k + 1].text.size() != 8 || !parse_number(toks[k + 1].text, target))
      throw fail("bad pointer offset");
    if (toks[k + 2].text != "n") throw fail("hypernym pointer to non-noun synset");
    s.hypernyms.push_back(SynsetId{target, 'n'});
  }

  if (k >= toks.size() || toks[k].text != "|") throw fail("missing gloss separator");
  if (k + 1 < toks.size())
    s.gloss = std::string(trim_right(line.substr(toks[k + 1].pos)));
  return s;
}

}  // namespace

std::string SynsetId::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08u-%c", offset, pos);
  return buf;
}

SynsetId SynsetId::parse(std::string_view text) {
  SynsetId id;
  auto dash = text.find('-');
  if (dash == std::string_view::npos || dash + 2 != text.size() ||
      !parse_number(text.substr(0, dash), id.offset))
    throw InputError("malformed synset id '" + std::string(text) + "'");
  id.pos = text[dash + 1];
  return id;
}

std::string strip_gloss_examples(std::string_view gloss) {
  auto quote = gloss.find('"');
  std::string_view def = gloss.substr(0, quote);
  while (!def.empty() && (def.back() == ' ' || def.back() == ';')) def.remove_suffix(1);
  return std::string(def);
}

std::string normalize_lemma(std::string_view lemma) {
  std::string out;
  out.reserve(lemma.size());
  for (char c : lemma) {
    if (c == ' ')
      out.push_back('_');
    else
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

WordNetGraph WordNetGraph::load(const std::filesystem::path& dir) {
  const auto data_path = dir / "data.noun";
  const auto index_path = dir / "index.noun";
  if (!std::filesystem::is_regular_file(data_path))
    throw ResourceError("missing " + data_path.string());
  if (!std::filesystem::is_regular_file(index_path))
    throw ResourceError("missing " + index_path.string());

  WordNetGraph g;
  const std::string data = read_file(data_path);
  const std::string data_name = data_path.string();
  for_each_line(data, [&](std::string_view line, std::size_t off, std::size_t lineno) {
    if (line.empty() || is_license_line(line)) return;
    Synset s = parse_data_line(line, off, lineno, data_name);
    if (g.by_offset_.contains(s.id.offset))
      throw ParseError(data_name, lineno, "duplicate synset " + s.id.str());
    g.by_offset_.emplace(s.id.offset, g.synsets_.size());
    g.synsets_.push_back(std::move(s));
  });

  const std::string index = read_file(index_path);
  const std::string index_name = index_path.string();
  for_each_line(index, [&](std::string_view line, std::size_t, std::size_t lineno) {
    line = trim_right(line);
    if (line.empty() || is_license_line(line)) return;
    auto fail = [&](const std::string& what) { return ParseError(index_name, lineno, what); };
    auto toks = tokenize(line);
    if (toks.size() < 6) throw fail("index record too short");
    if (toks[1].text != "n") throw fail("not a noun index entry");
    unsigned synset_cnt = 0, ptr_cnt = 0;
    if (!parse_number(toks[2].text, synset_cnt) || synset_cnt == 0)
      throw fail("bad synset count");
    if (!parse_number(toks[3].text, ptr_cnt)) throw fail("bad pointer count");
    // lemma pos synset_cnt p_cnt [ptr...] sense_cnt tagsense_cnt offsets...
    const std::size_t first = 4 + ptr_cnt + 2;
    if (toks.size() != first + synset_cnt) throw fail("synset count does not match offsets");
    std::vector<SynsetId> ids;
    ids.reserve(synset_cnt);
    for (std::size_t i = first; i < toks.size(); ++i) {
      std::uint32_t off = 0;
      if (toks[i].text.size() != 8 || !parse_number(toks[i].text, off))
        throw fail("bad synset offset '" + std::string(toks[i].text) + "'");
      if (!g.by_offset_.contains(off))
        throw IntegrityError(index_name + ":" + std::to_string(lineno) + ": offset " +
                             std::string(toks[i].text) + " not in data.noun");
      ids.push_back(SynsetId{off, 'n'});
    }
    auto [it, inserted] = g.index_.emplace(normalize_lemma(toks[0].text), std::move(ids));
    if (!inserted) throw fail("duplicate lemma '" + std::string(toks[0].text) + "'");
  });

  g.finalize();
  return g;
}

void WordNetGraph::finalize() {
  for (const auto& s : synsets_)
    for (const auto& h : s.hypernyms)
      if (!by_offset_.contains(h.offset))
        throw IntegrityError("hypernym " + h.str() + " of " + s.id.str() + " does not resolve");

  auto root = resolve_name("entity.n.01");
  auto living = resolve_name("living_thing.n.01");
  if (!root) throw IntegrityError("entity.n.01 not found");
  if (!living) throw IntegrityError("living_thing.n.01 not found");
  root_ = *root;
  living_thing_ = *living;

  const std::size_t n = synsets_.size();
  const std::size_t root_idx = index_of(root_);
  const std::size_t living_idx = index_of(living_thing_);
  if (!synsets_[root_idx].hypernyms.empty())
    throw IntegrityError("root " + root_.str() + " has hypernyms");

  // Post-order DFS; colour 1 = on stack, 2 = done. A grey hit is a cycle.
  std::vector<std::uint8_t> colour(n, 0);
  std::vector<std::uint8_t> rooted(n, 0);
  living_.assign(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // node, next hypernym
  for (std::size_t start = 0; start < n; ++start) {
    if (colour[start]) continue;
    stack.emplace_back(start, 0);
    colour[start] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& hyps = synsets_[v].hypernyms;
      if (next < hyps.size()) {
        std::size_t u = by_offset_.at(hyps[next++].offset);
        if (colour[u] == 1)
          throw IntegrityError("hypernym cycle through " + synsets_[u].id.str());
        if (colour[u] == 0) {
          colour[u] = 1;
          stack.emplace_back(u, 0);
        }
        continue;
      }
      std::uint8_t is_living = v == living_idx;
      std::uint8_t reaches_root = v == root_idx;
      for (const auto& h : hyps) {
        std::size_t u = by_offset_.at(h.offset);
        is_living |= living_[u];
        reaches_root |= rooted[u];
      }
      living_[v] = is_living;
      rooted[v] = reaches_root;
      colour[v] = 2;
      stack.pop_back();
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (!rooted[i]) throw IntegrityError(synsets_[i].id.str() + " does not reach entity.n.01");
}

std::size_t WordNetGraph::index_of(SynsetId id) const {
  auto it = id.pos == 'n' ? by_offset_.find(id.offset) : by_offset_.end();
  if (it == by_offset_.end()) throw LookupError("unknown synset " + id.str());
  return it->second;
}

bool WordNetGraph::contains(SynsetId id) const {
  return id.pos == 'n' && by_offset_.contains(id.offset);
}

const Synset& WordNetGraph::synset(SynsetId id) const { return synsets_[index_of(id)]; }

std::vector<const Synset*> WordNetGraph::senses_of(std::string_view lemma) const {
  std::vector<const Synset*> out;
  auto it = index_.find(normalize_lemma(lemma));
  if (it == index_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& id : it->second) out.push_back(&synsets_[index_of(id)]);
  return out;
}

std::optional<SynsetId> WordNetGraph::resolve_name(std::string_view name) const {
  auto last = name.rfind('.');
  if (last == std::string_view::npos || last == 0) return std::nullopt;
  auto mid = name.rfind('.', last - 1);
  if (mid == std::string_view::npos || name.substr(mid + 1, last - mid - 1) != "n")
    return std::nullopt;
  unsigned sense = 0;
  if (!parse_number(name.substr(last + 1), sense) || sense == 0) return std::nullopt;
  auto it = index_.find(normalize_lemma(name.substr(0, mid)));
  if (it == index_.end() || sense > it->second.size()) return std::nullopt;
  return it->second[sense - 1];
}

bool WordNetGraph::is_living_thing(SynsetId id) const { return living_[index_of(id)] != 0; }

std::string WordNetGraph::gloss_text(SynsetId id, bool with_examples) const {
  const auto& gloss = synset(id).gloss;
  return with_examples ? gloss : strip_gloss_examples(gloss);
}

void WordNetGraph::dump(std::ostream& out) const {
  json doc;
  doc["format"] = "animacy-wordnet";
  doc["version"] = kDumpVersion;
  json arr = json::array();
  for (const auto& s : synsets_) {
    json hyps = json::array();
    for (const auto& h : s.hypernyms) hyps.push_back(h.str());
    arr.push_back({{"id", s.id.str()}, {"lemmas", s.lemmas}, {"gloss", s.gloss},
                   {"hypernyms", std::move(hyps)}});
  }
  doc["synsets"] = std::move(arr);
  json idx = json::object();  // std::map backed, so keys come out sorted
  for (const auto& [lemma, ids] : index_) {
    json list = json::array();
    for (const auto& id : ids) list.push_back(id.str());
    idx[lemma] = std::move(list);
  }
  doc["index"] = std::move(idx);
  out << doc.dump() << '\n';
}

WordNetGraph WordNetGraph::load_dump(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("<dump>", 1, e.what());
  }
  if (doc.value("format", "") != "animacy-wordnet" || doc.value("version", 0) != kDumpVersion)
    throw ParseError("<dump>", 1, "unsupported dump format or version");

  WordNetGraph g;
  try {
    for (const auto& js : doc.at("synsets")) {
      Synset s;
      s.id = SynsetId::parse(js.at("id").get<std::string>());
      s.lemmas = js.at("lemmas").get<std::vector<std::string>>();
      s.gloss = js.at("gloss").get<std::string>();
      for (const auto& h : js.at("hypernyms")) s.hypernyms.push_back(SynsetId::parse(h.get<std::string>()));
      if (!g.by_offset_.emplace(s.id.offset, g.synsets_.size()).second)
        throw IntegrityError("duplicate synset " + s.id.str() + " in dump");
      g.synsets_.push_back(std::move(s));
    }
    for (const auto& [lemma, ids] : doc.at("index").items()) {
      std::vector<SynsetId> list;
      for (const auto& id : ids) {
        list.push_back(SynsetId::parse(id.get<std::string>()));
        if (!g.by_offset_.contains(list.back().offset))
          throw IntegrityError("index entry '" + lemma + "' points at unknown synset");
      }
      if (list.empty()) throw IntegrityError("index entry '" + lemma + "' is empty");
      g.index_.emplace(lemma, std::move(list));
    }
  } catch (const json::exception& e) {
    throw ParseError("<dump>", 1, e.what());
  }
  g.finalize();
  return g;
}

}  // namespace animacy::wordnet

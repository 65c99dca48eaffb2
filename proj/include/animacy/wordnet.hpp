#pragma once
// In-memory WordNet noun graph loaded from the Princeton plain-text database
// (data.noun / index.noun).
//
// The graph is immutable after load. Living-thing membership is computed
// once for every synset during load, so queries are lock-free reads.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace animacy::wordnet {

// Byte offset of the record in data.noun plus part of speech.
// Textual form: "02084442-n".
struct SynsetId {
  std::uint32_t offset = 0;
  char pos = 'n';

  std::string str() const;
  static SynsetId parse(std::string_view text);

  friend auto operator<=>(const SynsetId&, const SynsetId&) = default;
};

struct Synset {
  SynsetId id;
  std::vector<std::string> lemmas;  // as written in data.noun, underscores kept
  std::string gloss;                // full gloss, usage examples included
  std::vector<SynsetId> hypernyms;  // '@' and '@i' pointers, file order
};

// Definition part of a WordNet gloss: everything before the first quoted
// usage example, with the separating "; " trimmed.
std::string strip_gloss_examples(std::string_view gloss);

// Lowercase, spaces to underscores. Index keys use this form.
std::string normalize_lemma(std::string_view lemma);

class WordNetGraph {
 public:
  // Loads data.noun and index.noun from `dir`, validates the hypernym graph
  // (every pointer resolves, acyclic, rooted at entity) and precomputes the
  // living_thing closure.
  static WordNetGraph load(const std::filesystem::path& dir);

  // Reload from the JSON form written by dump().
  static WordNetGraph load_dump(std::istream& in);
  void dump(std::ostream& out) const;

  std::size_t size() const noexcept { return synsets_.size(); }
  const std::vector<Synset>& synsets() const noexcept { return synsets_; }

  bool contains(SynsetId id) const;
  // Throws LookupError for unknown ids.
  const Synset& synset(SynsetId id) const;

  // Senses in WordNet order; empty for unknown lemmas. Case-insensitive,
  // multiword lemmas may use spaces or underscores.
  std::vector<const Synset*> senses_of(std::string_view lemma) const;

  // Resolves "person.n.01" style names through the index.
  std::optional<SynsetId> resolve_name(std::string_view name) const;

  bool is_living_thing(SynsetId id) const;

  std::string gloss_text(SynsetId id, bool with_examples = false) const;

  SynsetId root() const noexcept { return root_; }
  SynsetId living_thing() const noexcept { return living_thing_; }

 private:
  WordNetGraph() = default;

  std::size_t index_of(SynsetId id) const;
  void finalize();  // validation + closure

  std::vector<Synset> synsets_;
  std::unordered_map<std::uint32_t, std::size_t> by_offset_;
  // Ordered map would make dump() trivially sorted, but lookups dominate.
  std::unordered_map<std::string, std::vector<SynsetId>> index_;
  std::vector<std::uint8_t> living_;
  SynsetId root_;
  SynsetId living_thing_;
};

}  // namespace animacy::wordnet

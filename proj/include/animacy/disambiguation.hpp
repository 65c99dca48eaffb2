#pragma once
// Embedding-based Lesk: pick the WordNet noun sense whose gloss is closest to
// the sentence, then decide typical animacy from the living_thing closure.

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "animacy/mlm_backend.hpp"
#include "animacy/wordnet.hpp"

namespace animacy::wsd {

struct SenseChoice {
  std::string token;
  std::optional<wordnet::SynsetId> chosen_synset;
  std::optional<double> similarity;
  std::size_t candidate_count = 0;
  // True when a single candidate was taken without consulting the backend;
  // similarity is then reported as 1.0.
  bool sole_candidate = false;
};

enum class Animacy { animate, inanimate, unknown };

std::string_view to_string(Animacy a);

enum class LabelSource { pronoun, wordnet, filtered, no_sense };
std::string_view to_string(LabelSource s);

struct TokenJudgement {
  Animacy animacy = Animacy::unknown;
  LabelSource source = LabelSource::no_sense;
  std::optional<SenseChoice> sense;  // set when WordNet was consulted
};

// Closed list of person-denoting pronouns, compared case-insensitively.
class PronounList {
 public:
  static PronounList builtin();
  // One token per line; blank lines and lines starting with '#' skipped.
  static PronounList from_file(const std::filesystem::path& path);
  explicit PronounList(const std::vector<std::string>& words);

  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Tokens made only of ASCII letters pass; word pieces ("##ing"), digits and
// punctuation do not.
bool is_lookup_candidate(std::string_view token);

struct DisambiguatorOptions {
  bool gloss_examples = false;
};

// Thread-safe. Gloss embeddings are cached per synset for the lifetime of the
// object; the cache admits concurrent readers and serialises insertion.
class Disambiguator {
 public:
  Disambiguator(const wordnet::WordNetGraph& graph, const mlm::MaskedLanguageModel& backend,
                PronounList pronouns = PronounList::builtin(),
                DisambiguatorOptions opts = {});

  SenseChoice disambiguate(std::string_view token, const std::string& sentence) const;

  TokenJudgement token_animacy(std::string_view token, const std::string& sentence) const;

  const wordnet::WordNetGraph& graph() const noexcept { return graph_; }
  const PronounList& pronouns() const noexcept { return pronouns_; }
  std::size_t cached_glosses() const;

 private:
  const wordnet::WordNetGraph& graph_;
  const mlm::MaskedLanguageModel& backend_;
  PronounList pronouns_;
  DisambiguatorOptions opts_;

  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<std::uint32_t, mlm::SentenceVector> gloss_cache_;
};

}  // namespace animacy::wsd

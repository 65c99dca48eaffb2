#pragma once
// Masked-prediction animacy scoring.
//
// The target expression is replaced by a single [MASK], the backend proposes
// the top-kappa fillers, each filler is labelled animate/inanimate through
// the pronoun list or WordNet, and the labels are averaged with weights
// derived from the raw prediction scores.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "animacy/disambiguation.hpp"
#include "animacy/mlm_backend.hpp"

namespace animacy {

enum class WeightMode { softmax, linear, uniform };
enum class UnknownPolicy { exclude, count_inanimate };
// Which sentence is embedded on the sentence side of sense disambiguation.
enum class LeskSentence { original, masked };

std::string_view to_string(WeightMode m);
std::string_view to_string(UnknownPolicy p);
WeightMode parse_weight_mode(std::string_view s);
UnknownPolicy parse_unknown_policy(std::string_view s);

struct ScorerConfig {
  int kappa = 10;
  double tau = 0.5;
  WeightMode weight_mode = WeightMode::softmax;
  bool use_context = false;
  UnknownPolicy unknown_policy = UnknownPolicy::exclude;
  LeskSentence lesk_sentence = LeskSentence::original;
  int max_parallel = 4;

  // Throws ConfigError.
  void validate() const;
};

struct MaskedInstance {
  std::string id;
  std::string sentence;
  // Code point offsets, half-open.
  std::size_t target_start = 0;
  std::size_t target_end = 0;
  std::optional<std::string> context_before;
  std::optional<std::string> context_after;
  std::optional<int> date;
  std::optional<int> gold_animacy;
  std::optional<int> gold_humanness;

  // Throws InputError when offsets, labels or the humanness/animacy
  // entailment are invalid.
  void validate() const;
  std::string target() const;
};

enum class Decision { inanimate, animate };
std::string_view to_string(Decision d);

struct UsedPrediction {
  std::string token;
  double raw_score = 0.0;
  double weight = 0.0;
  wsd::Animacy label = wsd::Animacy::unknown;
  wsd::LabelSource source = wsd::LabelSource::no_sense;
  std::optional<wordnet::SynsetId> sense;
};

struct AnimacyResult {
  double score = 0.0;
  Decision decision = Decision::inanimate;
  std::vector<UsedPrediction> used_predictions;
  std::vector<std::string> excluded_tokens;
  std::size_t excluded_count = 0;
  // Every prediction was unknown; score forced to 0.
  bool degenerate = false;
};

// Replaces the target span by one [MASK]; with `use_context` the flanking
// sentences are joined with single spaces.
std::string mask_target(const MaskedInstance& instance, bool use_context);

// Weights for the retained raw scores. Always sums to 1 for non-empty input.
//   softmax  exp(s_i - max) / sum
//   linear   (s_i - min(0, min s)) / sum, uniform if that sum is 0
//   uniform  1 / n
std::vector<double> compute_weights(std::span<const double> raw_scores, WeightMode mode);

struct BatchEntry {
  std::optional<AnimacyResult> result;
  std::string error;  // set iff result is empty

  bool ok() const noexcept { return result.has_value(); }
};

class Scorer {
 public:
  // `wsd` must outlive the scorer; it carries the graph and the backend.
  Scorer(ScorerConfig config, const wsd::Disambiguator& wsd,
         const mlm::MaskedLanguageModel& backend);

  const ScorerConfig& config() const noexcept { return config_; }

  AnimacyResult score(const MaskedInstance& instance) const;

  // Order preserving. Per-instance failures land in BatchEntry::error. The
  // backend is probed once up front; failure there throws.
  std::vector<BatchEntry> score_batch(std::span<const MaskedInstance> instances) const;

 private:
  ScorerConfig config_;
  const wsd::Disambiguator& wsd_;
  const mlm::MaskedLanguageModel& backend_;
};

}  // namespace animacy

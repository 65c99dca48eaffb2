#include "animacy/scorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "animacy/errors.hpp"
#include "animacy/text.hpp"

namespace animacy {

std::string_view to_string(WeightMode m) {
  switch (m) {
    case WeightMode::softmax: return "softmax";
    case WeightMode::linear: return "linear";
    case WeightMode::uniform: return "uniform";
  }
  return "softmax";
}

std::string_view to_string(UnknownPolicy p) {
  return p == UnknownPolicy::exclude ? "exclude" : "count_inanimate";
}

std::string_view to_string(Decision d) {
  return d == Decision::animate ? "animate" : "inanimate";
}

WeightMode parse_weight_mode(std::string_view s) {
  if (s == "softmax") return WeightMode::softmax;
  if (s == "linear") return WeightMode::linear;
  if (s == "uniform") return WeightMode::uniform;
  throw ConfigError("unknown weight mode '" + std::string(s) + "'");
}

UnknownPolicy parse_unknown_policy(std::string_view s) {
  if (s == "exclude") return UnknownPolicy::exclude;
  if (s == "count_inanimate" || s == "count-inanimate") return UnknownPolicy::count_inanimate;
  throw ConfigError("unknown unknown-token policy '" + std::string(s) + "'");
}

void ScorerConfig::validate() const {
  if (kappa < 1) throw ConfigError("kappa must be >= 1, got " + std::to_string(kappa));
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
}

void MaskedInstance::validate() const {
  const auto len = text::codepoint_length(sentence);
  if (target_start >= target_end || target_end > len)
    throw InputError("instance '" + id + "': target offsets [" + std::to_string(target_start) +
                     ", " + std::to_string(target_end) + ") invalid for sentence of length " +
                     std::to_string(len));
  if (target().find_first_not_of(" \t") == std::string::npos)
    throw InputError("instance '" + id + "': target span is blank");
  auto binary = [](const std::optional<int>& v) { return !v || *v == 0 || *v == 1; };
  if (!binary(gold_animacy) || !binary(gold_humanness))
    throw InputError("instance '" + id + "': gold labels must be 0 or 1");
  if (gold_humanness == 1 && gold_animacy != 1)
    throw InputError("instance '" + id + "': humanness 1 requires animacy 1");
}

std::string MaskedInstance::target() const {
  auto b = text::byte_offset(sentence, target_start);
  auto e = text::byte_offset(sentence, target_end);
  if (!b || !e || *b > *e) return {};
  return sentence.substr(*b, *e - *b);
}

std::string mask_target(const MaskedInstance& instance, bool use_context) {
  instance.validate();
  auto b = *text::byte_offset(instance.sentence, instance.target_start);
  auto e = *text::byte_offset(instance.sentence, instance.target_end);
  std::string masked = instance.sentence.substr(0, b);
  masked += mlm::kMaskToken;
  masked += instance.sentence.substr(e);
  if (!use_context) return masked;

  std::string out;
  if (instance.context_before && !instance.context_before->empty())
    out = *instance.context_before + " ";
  out += masked;
  if (instance.context_after && !instance.context_after->empty())
    out += " " + *instance.context_after;
  return out;
}

std::vector<double> compute_weights(std::span<const double> raw, WeightMode mode) {
  const std::size_t n = raw.size();
  std::vector<double> w(n);
  if (n == 0) return w;
  switch (mode) {
    case WeightMode::softmax: {
      const double hi = *std::max_element(raw.begin(), raw.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += (w[i] = std::exp(raw[i] - hi));
      for (auto& x : w) x /= sum;
      return w;
    }
    case WeightMode::linear: {
      const double shift = std::min(0.0, *std::min_element(raw.begin(), raw.end()));
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += (w[i] = raw[i] - shift);
      if (sum > 0.0) {
        for (auto& x : w) x /= sum;
        return w;
      }
      [[fallthrough]];
    }
    case WeightMode::uniform:
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
      return w;
  }
  return w;
}

Scorer::Scorer(ScorerConfig config, const wsd::Disambiguator& wsd,
               const mlm::MaskedLanguageModel& backend)
    : config_(config), wsd_(wsd), backend_(backend) {
  config_.validate();
}

AnimacyResult Scorer::score(const MaskedInstance& instance) const {
  const std::string query = mask_target(instance, config_.use_context);
  const std::string lesk_sentence = config_.lesk_sentence == LeskSentence::original
                                        ? instance.sentence
                                        : mask_target(instance, false);
  const auto preds = backend_.fill_mask(query, config_.kappa);

  AnimacyResult result;
  std::vector<double> raw;
  for (const auto& p : preds) {
    auto judgement = wsd_.token_animacy(p.token, lesk_sentence);
    if (judgement.animacy == wsd::Animacy::unknown &&
        config_.unknown_policy == UnknownPolicy::exclude) {
      result.excluded_tokens.push_back(p.token);
      continue;
    }
    UsedPrediction used;
    used.token = p.token;
    used.raw_score = p.score;
    used.label = judgement.animacy;
    used.source = judgement.source;
    if (judgement.sense) used.sense = judgement.sense->chosen_synset;
    raw.push_back(p.score);
    result.used_predictions.push_back(std::move(used));
  }
  result.excluded_count = result.excluded_tokens.size();

  if (result.used_predictions.empty()) {
    result.degenerate = true;
    result.score = 0.0;
  } else {
    const auto weights = compute_weights(raw, config_.weight_mode);
    double score = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      result.used_predictions[i].weight = weights[i];
      if (result.used_predictions[i].label == wsd::Animacy::animate) score += weights[i];
    }
    result.score = std::clamp(score, 0.0, 1.0);
  }
  result.decision = result.score > config_.tau ? Decision::animate : Decision::inanimate;
  return result;
}

std::vector<BatchEntry> Scorer::score_batch(std::span<const MaskedInstance> instances) const {
  std::vector<BatchEntry> out(instances.size());
  if (instances.empty()) return out;
  (void)backend_.model_id();  // reachability probe; throws if the server is down

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      try {
        out[i].result = score(instances[i]);
      } catch (const Error& e) {
        out[i].error = e.what();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config_.max_parallel),
                                             instances.size());
  if (threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();  // joins
  return out;
}

}  // namespace animacy

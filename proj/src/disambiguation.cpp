#include "animacy/disambiguation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>

#include "animacy/errors.hpp"

namespace animacy::wsd {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(Animacy a) {
  switch (a) {
    case Animacy::animate: return "animate";
    case Animacy::inanimate: return "inanimate";
    case Animacy::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(LabelSource s) {
  switch (s) {
    case LabelSource::pronoun: return "pronoun";
    case LabelSource::wordnet: return "wordnet";
    case LabelSource::filtered: return "filtered";
    case LabelSource::no_sense: return "no_sense";
  }
  return "no_sense";
}

PronounList::PronounList(const std::vector<std::string>& words) {
  for (const auto& w : words) words_.insert(lower(w));
}

PronounList PronounList::builtin() {
  return PronounList({"she",      "he",      "her",       "him",        "his",     "hers",
                      "herself",  "himself", "i",         "me",         "my",      "mine",
                      "myself",   "we",      "us",        "our",        "ours",    "ourselves",
                      "you",      "your",    "yours",     "yourself",   "yourselves",
                      "who",      "whom",    "whoever",   "somebody",   "someone", "anybody",
                      "anyone",   "everybody", "everyone"});
}

PronounList PronounList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open pronoun list " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.push_back(std::move(w));
  }
  if (words.empty()) throw ConfigError("pronoun list " + path.string() + " is empty");
  return PronounList(words);
}

bool PronounList::contains(std::string_view token) const { return words_.contains(lower(token)); }

bool is_lookup_candidate(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char c) {
    return std::isalpha(c) != 0;
  });
}

Disambiguator::Disambiguator(const wordnet::WordNetGraph& graph,
                             const mlm::MaskedLanguageModel& backend, PronounList pronouns,
                             DisambiguatorOptions opts)
    : graph_(graph), backend_(backend), pronouns_(std::move(pronouns)), opts_(opts) {}

std::size_t Disambiguator::cached_glosses() const {
  std::shared_lock lock(cache_mutex_);
  return gloss_cache_.size();
}

SenseChoice Disambiguator::disambiguate(std::string_view token,
                                        const std::string& sentence) const {
  SenseChoice choice;
  choice.token = std::string(token);
  const auto senses = graph_.senses_of(token);
  choice.candidate_count = senses.size();
  if (senses.empty()) return choice;
  if (senses.size() == 1) {
    choice.chosen_synset = senses.front()->id;
    choice.similarity = 1.0;
    choice.sole_candidate = true;
    return choice;
  }

  std::vector<mlm::SentenceVector> gloss_vecs(senses.size());
  std::vector<std::size_t> missing;
  {
    std::shared_lock lock(cache_mutex_);
    for (std::size_t i = 0; i < senses.size(); ++i) {
      auto it = gloss_cache_.find(senses[i]->id.offset);
      if (it != gloss_cache_.end())
        gloss_vecs[i] = it->second;
      else
        missing.push_back(i);
    }
  }

  std::vector<std::string> texts{sentence};
  for (auto i : missing) texts.push_back(graph_.gloss_text(senses[i]->id, opts_.gloss_examples));
  auto vecs = backend_.embed(texts);
  if (vecs.size() != texts.size())
    throw BackendError("embed returned " + std::to_string(vecs.size()) + " vectors for " +
                           std::to_string(texts.size()) + " texts",
                       1, -1);
  if (!missing.empty()) {
    std::unique_lock lock(cache_mutex_);
    for (std::size_t j = 0; j < missing.size(); ++j) {
      gloss_vecs[missing[j]] = vecs[j + 1];
      gloss_cache_.try_emplace(senses[missing[j]]->id.offset, vecs[j + 1]);
    }
  }

  const auto& sentence_vec = vecs.front();
  std::size_t best = 0;
  double best_sim = mlm::cosine_similarity(sentence_vec, gloss_vecs[0]);
  for (std::size_t i = 1; i < senses.size(); ++i) {
    double sim = mlm::cosine_similarity(sentence_vec, gloss_vecs[i]);
    if (sim > best_sim) {  // strict: earlier sense wins ties
      best = i;
      best_sim = sim;
    }
  }
  choice.chosen_synset = senses[best]->id;
  choice.similarity = best_sim;
  return choice;
}

TokenJudgement Disambiguator::token_animacy(std::string_view token,
                                            const std::string& sentence) const {
  TokenJudgement j;
  if (pronouns_.contains(token)) {
    j.animacy = Animacy::animate;
    j.source = LabelSource::pronoun;
    return j;
  }
  if (!is_lookup_candidate(token)) {
    j.source = LabelSource::filtered;
    return j;
  }
  j.sense = disambiguate(token, sentence);
  if (!j.sense->chosen_synset) {
    j.source = LabelSource::no_sense;
    return j;
  }
  j.source = LabelSource::wordnet;
  j.animacy = graph_.is_living_thing(*j.sense->chosen_synset) ? Animacy::animate
                                                              : Animacy::inanimate;
  return j;
}

}  // namespace animacy::wsd

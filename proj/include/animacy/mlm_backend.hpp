#pragma once
// Masked-language-model and sentence-embedding backends.
//
// Two implementations sit behind MaskedLanguageModel:
//   ReplayBackend  answers from a recorded JSON fixture (tests, offline runs)
//   HttpBackend    talks to a model server over the JSON wire protocol
//
// Scores crossing this interface are the model's raw scores; any
// normalisation happens in the scorer.

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace animacy::mlm {

inline constexpr std::string_view kMaskToken = "[MASK]";

struct Prediction {
  std::string token;
  double score = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct SentenceVector {
  std::vector<double> values;

  std::size_t dimension() const noexcept { return values.size(); }
  friend bool operator==(const SentenceVector&, const SentenceVector&) = default;
};

enum class BackendKind { replay, http };

struct BackendDescriptor {
  BackendKind kind = BackendKind::replay;
  std::string model_id;
  // Fixture path for replay, base URL ("http://host:port") for http.
  std::string location;
};

// Number of `[MASK]` occurrences in `text`.
std::size_t count_masks(std::string_view text);

// Throws InputError unless `text` has exactly one mask placeholder.
void require_single_mask(std::string_view text);

// Descending by score, ties by token (lexicographic ascending).
void sort_predictions(std::vector<Prediction>& preds);

// Throws InputError on dimension mismatch, DegenerateInputError on a zero
// vector. Result is clamped to [-1, 1].
double cosine_similarity(const SentenceVector& a, const SentenceVector& b);

class MaskedLanguageModel {
 public:
  virtual ~MaskedLanguageModel() = default;

  virtual std::vector<Prediction> fill_mask(std::string_view sentence_with_mask,
                                            int top_k) const = 0;
  virtual std::vector<SentenceVector> embed(std::span<const std::string> texts) const = 0;
  virtual std::string model_id() const = 0;
};

// Fixture layout:
//   {"model_id": "...", "dim": 3,
//    "fill_mask": {"<masked sentence>": [{"token": "man", "score": 5.07}, ...]},
//    "embeddings": {"<text>": [0.1, 0.2, 0.3]}}
// "dim" may be omitted when "embeddings" is empty.
class ReplayBackend final : public MaskedLanguageModel {
 public:
  static ReplayBackend from_file(const std::filesystem::path& path);
  static ReplayBackend from_json(const nlohmann::json& doc);

  std::vector<Prediction> fill_mask(std::string_view sentence_with_mask,
                                    int top_k) const override;
  std::vector<SentenceVector> embed(std::span<const std::string> texts) const override;
  std::string model_id() const override { return model_id_; }
  std::size_t dimension() const noexcept { return dim_; }

 private:
  std::string model_id_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<Prediction>> fills_;  // pre-sorted
  std::unordered_map<std::string, SentenceVector> vectors_;
};

struct HttpOptions {
  std::chrono::milliseconds timeout{10000};
  int max_retries = 2;  // extra attempts after the first
  std::chrono::milliseconds retry_backoff{200};
  int max_in_flight = 4;
  // When set, responses reporting a different model_id are rejected.
  std::string expected_model_id;
};

// Environment variable consulted for the server URL when none is given.
inline constexpr const char* kServerUrlEnv = "ANIMACY_MODEL_SERVER";

class HttpBackend final : public MaskedLanguageModel {
 public:
  // Empty `base_url` falls back to $ANIMACY_MODEL_SERVER; ConfigError if
  // neither is set.
  explicit HttpBackend(std::string base_url, HttpOptions opts = {});

  std::vector<Prediction> fill_mask(std::string_view sentence_with_mask,
                                    int top_k) const override;
  std::vector<SentenceVector> embed(std::span<const std::string> texts) const override;
  // Queries GET /health; cached after the first successful call.
  std::string model_id() const override;

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  nlohmann::json request(const std::string& method, const std::string& path,
                         const nlohmann::json* body) const;

  std::string base_url_;
  HttpOptions opts_;
  mutable std::counting_semaphore<1024> slots_;
  mutable std::string model_id_;
  mutable std::mutex model_id_mutex_;
};

std::unique_ptr<MaskedLanguageModel> make_backend(const BackendDescriptor& desc,
                                                  HttpOptions http = {});

}  // namespace animacy::mlm

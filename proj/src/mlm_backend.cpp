#include "animacy/mlm_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "animacy/errors.hpp"
#include "httplib.h"

namespace animacy::mlm {

using nlohmann::json;

std::size_t count_masks(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kMaskToken); pos != std::string_view::npos;
       pos = text.find(kMaskToken, pos + kMaskToken.size()))
    ++n;
  return n;
}

void require_single_mask(std::string_view text) {
  auto n = count_masks(text);
  if (n != 1)
    throw InputError("expected exactly one " + std::string(kMaskToken) + " in input, found " +
                     std::to_string(n));
}

void sort_predictions(std::vector<Prediction>& preds) {
  std::stable_sort(preds.begin(), preds.end(), [](const Prediction& a, const Prediction& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.token < b.token;
  });
}

double cosine_similarity(const SentenceVector& a, const SentenceVector& b) {
  if (a.dimension() != b.dimension())
    throw InputError("cosine: dimension mismatch (" + std::to_string(a.dimension()) + " vs " +
                     std::to_string(b.dimension()) + ")");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw DegenerateInputError("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

void check_top_k(int top_k) {
  if (top_k < 1) throw InputError("top_k must be positive, got " + std::to_string(top_k));
}

void check_texts(std::span<const std::string> texts) {
  if (texts.empty()) throw InputError("embed: empty input list");
  for (const auto& t : texts)
    if (t.empty()) throw InputError("embed: empty text");
}

std::vector<Prediction> parse_predictions(const json& arr) {
  std::vector<Prediction> out;
  for (const auto& p : arr) {
    Prediction pred{p.at("token").get<std::string>(), p.at("score").get<double>()};
    if (pred.token.empty()) throw InputError("prediction with empty token");
    if (!std::isfinite(pred.score)) throw InputError("non-finite prediction score");
    out.push_back(std::move(pred));
  }
  return out;
}

SentenceVector parse_vector(const json& arr) {
  SentenceVector v{arr.get<std::vector<double>>()};
  for (double x : v.values)
    if (!std::isfinite(x)) throw InputError("non-finite embedding component");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Replay

ReplayBackend ReplayBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open replay fixture " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  return from_json(doc);
}

ReplayBackend ReplayBackend::from_json(const json& doc) {
  ReplayBackend b;
  try {
    b.model_id_ = doc.value("model_id", "replay");
    if (doc.contains("fill_mask")) {
      for (const auto& [sentence, preds] : doc.at("fill_mask").items()) {
        auto list = parse_predictions(preds);
        sort_predictions(list);
        b.fills_.emplace(sentence, std::move(list));
      }
    }
    if (doc.contains("embeddings") && !doc.at("embeddings").empty()) {
      b.dim_ = doc.at("dim").get<std::size_t>();
      if (b.dim_ == 0) throw InputError("replay fixture: dim must be positive");
      for (const auto& [text, vec] : doc.at("embeddings").items()) {
        auto v = parse_vector(vec);
        if (v.dimension() != b.dim_)
          throw InputError("replay fixture: vector for '" + text + "' has dimension " +
                           std::to_string(v.dimension()));
        b.vectors_.emplace(text, std::move(v));
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("replay fixture: ") + e.what());
  }
  return b;
}

std::vector<Prediction> ReplayBackend::fill_mask(std::string_view sentence_with_mask,
                                                 int top_k) const {
  require_single_mask(sentence_with_mask);
  check_top_k(top_k);
  auto it = fills_.find(std::string(sentence_with_mask));
  if (it == fills_.end())
    throw FixtureMissError("no recorded fill-mask response for: " +
                           std::string(sentence_with_mask));
  const auto& all = it->second;
  auto n = std::min<std::size_t>(static_cast<std::size_t>(top_k), all.size());
  return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<SentenceVector> ReplayBackend::embed(std::span<const std::string> texts) const {
  check_texts(texts);
  std::vector<SentenceVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = vectors_.find(t);
    if (it == vectors_.end()) throw FixtureMissError("no recorded embedding for: " + t);
    out.push_back(it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

std::string resolve_url(std::string url) {
  if (url.empty()) {
    if (const char* env = std::getenv(kServerUrlEnv)) url = env;
  }
  if (url.empty())
    throw ConfigError(std::string("no model server URL given and $") + kServerUrlEnv +
                      " is not set");
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

// RAII slot on the in-flight limiter.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

HttpBackend::HttpBackend(std::string base_url, HttpOptions opts)
    : base_url_(resolve_url(std::move(base_url))),
      opts_(std::move(opts)),
      slots_(std::clamp(opts_.max_in_flight, 1, 1024)) {
  if (opts_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

json HttpBackend::request(const std::string& method, const std::string& path,
                          const json* body) const {
  SlotGuard slot(slots_);
  const int attempts = 1 + opts_.max_retries;
  int last_status = -1;
  std::string last_error;

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(opts_.retry_backoff * (attempt - 1));

    httplib::Client cli(base_url_);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());

    auto res = body ? cli.Post(path, body->dump(), "application/json") : cli.Get(path);
    if (!res) {
      last_status = -1;
      last_error = httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    if (res->status == 200) {
      try {
        return json::parse(res->body);
      } catch (const json::exception& e) {
        throw BackendError(method + " " + path + ": malformed JSON response: " + e.what(),
                           attempt, last_status);
      }
    }
    std::string detail = res->body;
    try {
      auto j = json::parse(res->body);
      if (j.contains("error")) detail = j["error"].dump();
    } catch (const json::exception&) {
    }
    // 4xx means the request itself is wrong; retrying will not help.
    if (res->status >= 400 && res->status < 500)
      throw BackendError(method + " " + path + " rejected with HTTP " +
                             std::to_string(res->status) + ": " + detail,
                         attempt, last_status);
    last_error = "HTTP " + std::to_string(res->status) + ": " + detail;
  }
  throw BackendError(method + " " + base_url_ + path + " failed after " +
                         std::to_string(attempts) + " attempt(s): " + last_error,
                     attempts, last_status);
}

namespace {

void check_model_id(const json& resp, const std::string& expected, const std::string& where) {
  if (!resp.contains("model_id") || !resp["model_id"].is_string())
    throw BackendError(where + ": response lacks model_id", 1, 200);
  if (!expected.empty() && resp["model_id"].get<std::string>() != expected)
    throw BackendError(where + ": server runs model '" + resp["model_id"].get<std::string>() +
                           "', expected '" + expected + "'",
                       1, 200);
}

}  // namespace

std::vector<Prediction> HttpBackend::fill_mask(std::string_view sentence_with_mask,
                                               int top_k) const {
  require_single_mask(sentence_with_mask);
  check_top_k(top_k);
  const json body = {{"text", sentence_with_mask}, {"top_k", top_k}};
  const json resp = request("POST", "/fill-mask", &body);
  check_model_id(resp, opts_.expected_model_id, "/fill-mask");

  std::vector<Prediction> preds;
  try {
    preds = parse_predictions(resp.at("predictions"));
  } catch (const std::exception& e) {
    throw BackendError(std::string("/fill-mask: invalid predictions: ") + e.what(), 1, 200);
  }
  if (preds.size() > static_cast<std::size_t>(top_k))
    throw BackendError("/fill-mask: server returned " + std::to_string(preds.size()) +
                           " predictions for top_k " + std::to_string(top_k),
                       1, 200);
  for (std::size_t i = 1; i < preds.size(); ++i)
    if (preds[i].score > preds[i - 1].score)
      throw BackendError("/fill-mask: predictions not sorted by score", 1, 200);
  sort_predictions(preds);  // only reorders equal-score runs
  return preds;
}

std::vector<SentenceVector> HttpBackend::embed(std::span<const std::string> texts) const {
  check_texts(texts);
  const json body = {{"texts", texts}};
  const json resp = request("POST", "/embed", &body);
  check_model_id(resp, opts_.expected_model_id, "/embed");

  std::vector<SentenceVector> out;
  try {
    const auto dim = resp.at("dim").get<std::size_t>();
    if (dim == 0) throw InputError("dim must be positive");
    for (const auto& v : resp.at("vectors")) {
      out.push_back(parse_vector(v));
      if (out.back().dimension() != dim) throw InputError("vector length differs from dim");
    }
  } catch (const std::exception& e) {
    throw BackendError(std::string("/embed: invalid response: ") + e.what(), 1, 200);
  }
  if (out.size() != texts.size())
    throw BackendError("/embed: expected " + std::to_string(texts.size()) + " vectors, got " +
                           std::to_string(out.size()),
                       1, 200);
  return out;
}

std::string HttpBackend::model_id() const {
  std::lock_guard lock(model_id_mutex_);
  if (model_id_.empty()) {
    const json resp = request("GET", "/health", nullptr);
    if (resp.value("status", "") != "ok")
      throw BackendError("/health: server not ready", 1, 200);
    check_model_id(resp, opts_.expected_model_id, "/health");
    model_id_ = resp["model_id"].get<std::string>();
  }
  return model_id_;
}

std::unique_ptr<MaskedLanguageModel> make_backend(const BackendDescriptor& desc,
                                                  HttpOptions http) {
  switch (desc.kind) {
    case BackendKind::replay: {
      if (!std::filesystem::is_regular_file(desc.location))
        throw ConfigError("replay fixture not found: " + desc.location);
      auto b = std::make_unique<ReplayBackend>(ReplayBackend::from_file(desc.location));
      if (!desc.model_id.empty() && desc.model_id != b->model_id())
        throw ConfigError("replay fixture records model '" + b->model_id() + "', requested '" +
                          desc.model_id + "'");
      return b;
    }
    case BackendKind::http:
      if (http.expected_model_id.empty()) http.expected_model_id = desc.model_id;
      return std::make_unique<HttpBackend>(desc.location, std::move(http));
  }
  throw ConfigError("unknown backend kind");
}

}  // namespace animacy::mlm

#include "animacy/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "animacy/errors.hpp"

namespace animacy::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

void check_gold(std::span<const int> gold) {
  for (int g : gold)
    if (g != 0 && g != 1) throw InputError("gold labels must be 0 or 1");
}

}  // namespace

double average_precision(std::span<const double> scores, std::span<const int> gold) {
  if (scores.size() != gold.size()) throw InputError("average_precision: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (gold[order[rank]] != 1) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

EvalReport evaluate(std::span<const ScoredDecision> results, std::span<const int> gold) {
  if (results.empty()) throw InputError("evaluate: no instances");
  if (results.size() != gold.size())
    throw InputError("evaluate: " + std::to_string(results.size()) + " results but " +
                     std::to_string(gold.size()) + " gold labels");
  check_gold(gold);

  EvalReport r;
  r.n = results.size();
  std::array<std::size_t, 2> support{};
  for (std::size_t i = 0; i < r.n; ++i) {
    const int predicted = results[i].decision == Decision::animate ? 1 : 0;
    const int truth = gold[i];
    ++support[truth];
    if (predicted == truth) {
      ++r.per_class[truth].tp;
    } else {
      ++r.per_class[predicted].fp;
      ++r.per_class[truth].fn;
    }
  }
  r.single_class = support[0] == 0 || support[1] == 0;
  for (auto& c : r.per_class) {
    c.precision = ratio(c.tp, c.tp + c.fp);
    c.recall = ratio(c.tp, c.tp + c.fn);
    c.f1 = harmonic(c.precision, c.recall);
  }
  r.macro_precision = (r.per_class[0].precision + r.per_class[1].precision) / 2.0;
  r.macro_recall = (r.per_class[0].recall + r.per_class[1].recall) / 2.0;
  r.macro_f = (r.per_class[0].f1 + r.per_class[1].f1) / 2.0;
  r.f_of_macro_pr = harmonic(r.macro_precision, r.macro_recall);

  std::vector<double> scores(r.n);
  for (std::size_t i = 0; i < r.n; ++i) scores[i] = results[i].score;
  r.map = average_precision(scores, gold);
  return r;
}

EvalReport most_frequent_class_baseline(std::span<const int> gold_train,
                                        std::span<const int> gold_test) {
  if (gold_train.empty() || gold_test.empty())
    throw InputError("most_frequent_class_baseline: empty split");
  check_gold(gold_train);
  const auto animate = std::count(gold_train.begin(), gold_train.end(), 1);
  const auto inanimate = static_cast<std::ptrdiff_t>(gold_train.size()) - animate;
  const Decision majority = animate >= inanimate ? Decision::animate : Decision::inanimate;
  std::vector<ScoredDecision> preds(gold_test.size(), ScoredDecision{0.5, majority});
  return evaluate(preds, gold_test);
}

std::vector<double> tau_grid(double step) {
  if (!(step > 0.0 && step <= 0.5)) throw ConfigError("tau step must lie in (0, 0.5]");
  std::vector<double> taus;
  const auto n = static_cast<long>(std::floor(1.0 / step + 1e-9));
  for (long i = 0; i <= n; ++i) taus.push_back(std::min(1.0, static_cast<double>(i) * step));
  if (1.0 - taus.back() > 1e-9) taus.push_back(1.0);
  taus.back() = std::min(taus.back(), 1.0);
  return taus;
}

TuneResult sweep(const std::map<int, std::vector<double>>& scores_by_kappa,
                 std::span<const int> gold, std::span<const double> taus) {
  if (scores_by_kappa.empty() || taus.empty()) throw ConfigError("empty tuning grid");
  TuneResult res;
  bool first = true;
  // std::map iterates kappa ascending and taus ascend, so a strict '>' keeps
  // the smaller kappa, then the smaller tau, on ties.
  for (const auto& [kappa, scores] : scores_by_kappa) {
    for (double tau : taus) {
      std::vector<ScoredDecision> preds(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i)
        preds[i] = {scores[i], scores[i] > tau ? Decision::animate : Decision::inanimate};
      const double f = evaluate(preds, gold).macro_f;
      res.grid.push_back({tau, kappa, f});
      if (first || f > res.best_f) {
        res.best_f = f;
        res.best_tau = tau;
        res.best_kappa = kappa;
        first = false;
      }
    }
  }
  return res;
}

TuneResult tune(std::span<const MaskedInstance> train, const ScorerConfig& config_template,
                const wsd::Disambiguator& wsd, const mlm::MaskedLanguageModel& backend,
                double tau_step, std::span<const int> kappa_grid) {
  const auto taus = tau_grid(tau_step);
  if (kappa_grid.empty()) throw ConfigError("empty kappa grid");
  if (train.empty()) throw InputError("tune: empty training set");
  std::vector<int> gold;
  gold.reserve(train.size());
  for (const auto& inst : train) {
    if (!inst.gold_animacy) throw InputError("tune: instance '" + inst.id + "' has no gold label");
    gold.push_back(*inst.gold_animacy);
  }

  std::map<int, std::vector<double>> scores_by_kappa;
  for (int kappa : kappa_grid) {
    if (scores_by_kappa.contains(kappa)) continue;
    ScorerConfig cfg = config_template;
    cfg.kappa = kappa;
    Scorer scorer(cfg, wsd, backend);
    auto& scores = scores_by_kappa[kappa];
    for (const auto& entry : scorer.score_batch(train)) {
      if (!entry.ok()) throw InputError("tune: " + entry.error);
      scores.push_back(entry.result->score);
    }
  }
  return sweep(scores_by_kappa, gold, taus);
}

nlohmann::json EvalReport::to_json() const {
  auto cls = [](const ClassCounts& c) {
    return nlohmann::json{{"tp", c.tp},
                          {"fp", c.fp},
                          {"fn", c.fn},
                          {"precision", c.precision},
                          {"recall", c.recall},
                          {"f1", c.f1}};
  };
  return {{"n", n},
          {"macro_precision", macro_precision},
          {"macro_recall", macro_recall},
          {"macro_f", macro_f},
          {"f_of_macro_pr", f_of_macro_pr},
          {"map", map},
          {"single_class", single_class},
          {"per_class", {{"inanimate", cls(per_class[0])}, {"animate", cls(per_class[1])}}}};
}

nlohmann::json TuneResult::to_json() const {
  auto grid_json = nlohmann::json::array();
  for (const auto& g : grid) grid_json.push_back({{"tau", g.tau}, {"kappa", g.kappa}, {"f", g.f}});
  return {{"best_tau", best_tau},
          {"best_kappa", best_kappa},
          {"best_f", best_f},
          {"grid", std::move(grid_json)}};
}

std::string format_table(std::span<const TableRow> rows) {
  std::size_t width = 4;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  const auto w = static_cast<int>(width);
  std::ostringstream os;
  os << std::left << std::setw(w) << "" << std::right;
  for (const char* col : {"Precision", "Recall", "F-Score", "Map"}) os << "  " << std::setw(9) << col;
  os << '\n' << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    os << std::left << std::setw(w) << r.name << std::right;
    for (double v : {r.report.macro_precision, r.report.macro_recall, r.report.macro_f, r.report.map})
      os << "  " << std::setw(9) << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace animacy::eval

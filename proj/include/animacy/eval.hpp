#pragma once
// Evaluation metrics (macro P/R/F, MAP), the most-frequent-class reference
// and the tau/kappa grid search.

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "animacy/scorer.hpp"
#include "json.hpp"

namespace animacy::eval {

struct ScoredDecision {
  double score = 0.0;
  Decision decision = Decision::inanimate;
};

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct EvalReport {
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f = 0.0;  // mean of per-class F1
  // F1 of (macro_precision, macro_recall); the other common convention.
  double f_of_macro_pr = 0.0;
  double map = 0.0;
  std::array<ClassCounts, 2> per_class{};  // [0] inanimate, [1] animate
  std::size_t n = 0;
  // Gold holds a single class; metrics of the absent class are 0.
  bool single_class = false;

  nlohmann::json to_json() const;
};

// Average precision of the ranking by descending score, animate relevant;
// equal scores keep input order. 0 when no item is relevant.
double average_precision(std::span<const double> scores, std::span<const int> gold);

// Throws InputError on empty input, length mismatch or non-binary gold.
EvalReport evaluate(std::span<const ScoredDecision> results, std::span<const int> gold);

// Predicts the train majority (animate on a tie) with constant score 0.5.
EvalReport most_frequent_class_baseline(std::span<const int> gold_train,
                                        std::span<const int> gold_test);

// {0, step, 2 step, ...} up to 1, with 1 appended if the step does not land
// on it. Throws ConfigError unless 0 < step <= 0.5.
std::vector<double> tau_grid(double step);

struct GridPoint {
  double tau = 0.0;
  int kappa = 0;
  double f = 0.0;
};

struct TuneResult {
  double best_tau = 0.0;
  int best_kappa = 0;
  double best_f = 0.0;
  std::vector<GridPoint> grid;  // kappa-major, tau ascending

  nlohmann::json to_json() const;
};

// Grid search over precomputed scores (one vector per kappa). Maximises
// macro F; ties go to the smaller kappa, then the smaller tau.
TuneResult sweep(const std::map<int, std::vector<double>>& scores_by_kappa,
                 std::span<const int> gold, std::span<const double> taus);

// Scores `train` once per kappa and sweeps tau. Instances need gold animacy.
TuneResult tune(std::span<const MaskedInstance> train, const ScorerConfig& config_template,
                const wsd::Disambiguator& wsd, const mlm::MaskedLanguageModel& backend,
                double tau_step, std::span<const int> kappa_grid);

inline const std::vector<int> kDefaultKappaGrid = {3, 5, 10, 15, 20};
inline constexpr double kDefaultTauStep = 0.05;

struct TableRow {
  std::string name;
  EvalReport report;
};

// Plain-text table with Precision, Recall, F-Score and Map columns.
std::string format_table(std::span<const TableRow> rows);

}  // namespace animacy::eval

#pragma once
// Annotated animacy corpora: TSV ingestion, validation, train/test split and
// band-pooled sampling.
//
// Canonical columns (header required, order free):
//   id, date, context_before, sentence, context_after, target,
//   target_start, target_end, animacy, humanness, split
// Required: id, sentence, target, animacy (+ humanness for the machines
// schema). target_start/target_end are code point offsets; when absent the
// first case-sensitive occurrence of `target` is used. `split` takes
// "train" or "test". Empty cells mean "absent".

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "animacy/scorer.hpp"
#include "json.hpp"

namespace animacy::dataset {

enum class Schema { stories, machines };
Schema parse_schema(std::string_view s);

struct TsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based file line of each row

  std::optional<std::size_t> column(std::string_view name) const;
};

// Tab separated, LF (a trailing CR is dropped), blank lines skipped. Rows
// whose width differs from the header are kept; callers report them.
TsvTable read_tsv(std::istream& in);
TsvTable read_tsv(const std::filesystem::path& path);
void write_tsv(std::ostream& out, const TsvTable& table);

// Throws SchemaError when the header lacks a required column.
void check_header(const TsvTable& table, Schema schema);

// Builds one instance from a row; throws RowError carrying `line`.
MaskedInstance instance_from_row(const TsvTable& table, std::size_t row_index);

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

struct Corpus {
  std::string name;
  std::vector<MaskedInstance> instances;
  std::optional<Split> split;

  const MaskedInstance* find(std::string_view id) const;
  std::vector<MaskedInstance> subset(const std::vector<std::string>& ids) const;
  // Throws IntegrityError on duplicate ids, unknown split ids or overlap.
  void validate() const;
};

struct RowIssue {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  Corpus corpus;
  std::vector<RowIssue> errors;  // rows that could not be loaded
  std::vector<RowIssue> notes;   // e.g. first-occurrence offset fallback
};

LoadResult load_corpus(const std::filesystem::path& path, Schema schema);
LoadResult load_corpus(std::istream& in, Schema schema, std::string name);

// Writes the canonical column set; empty optionals become empty cells.
void write_corpus(std::ostream& out, const Corpus& corpus);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t test = 0;
  std::size_t animate = 0;  // over the whole corpus

  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

// Throws StateError when the corpus has no split.
SplitCounts split_counts(const Corpus& corpus);

struct AnimacyBand {
  double lower = 0.0;
  double upper = 1.0;

  friend bool operator==(const AnimacyBand&, const AnimacyBand&) = default;
};

std::vector<AnimacyBand> canonical_bands();

// Throws ConfigError unless the bands tile [0, 1] without gaps or overlap.
// Returns them sorted by lower bound.
std::vector<AnimacyBand> validate_bands(std::span<const AnimacyBand> bands);

struct ScoredId {
  std::string id;
  double score = 0.0;
};

struct BandSelection {
  AnimacyBand band;
  std::size_t available = 0;
  std::vector<std::string> ids;  // in input order
};

struct PoolResult {
  std::uint64_t seed = 0;
  std::size_t per_band = 0;
  std::vector<BandSelection> bands;

  std::vector<std::string> ids() const;  // flattened, grouped by band
  nlohmann::json to_json() const;
};

// Each band is [lower, upper) except the last, which is closed above. One
// mt19937_64 seeded with `seed` drives all bands in order.
PoolResult pool_by_band(std::span<const ScoredId> scored, std::span<const AnimacyBand> bands,
                        std::size_t per_band, std::uint64_t seed);

}  // namespace animacy::dataset

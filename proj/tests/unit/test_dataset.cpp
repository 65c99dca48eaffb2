#include <map>
#include <random>
#include <set>
#include <sstream>

#include "animacy/dataset.hpp"
#include "animacy/errors.hpp"
#include "animacy/text.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace animacy;
using namespace animacy::dataset;
using namespace animacy::testing;

namespace {

LoadResult load_text(const std::string& text, Schema schema) {
  std::istringstream in(text);
  return load_corpus(in, schema, "inline");
}

std::string random_word(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {"the", "engine", "café", "ran", "over",
                                                 "naïve", "dragon", "hill", "and", "slept"};
  return words[rng() % words.size()];
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("machines sample loads with split and labels") {
    auto res = load_corpus(data_dir() / "machines_sample.tsv", Schema::machines);
    CHECK(res.errors.empty());
    REQUIRE(res.corpus.instances.size() == 3);
    CHECK(res.corpus.name == "machines_sample");
    const auto* m2 = res.corpus.find("m2");
    REQUIRE(m2);
    CHECK(m2->target() == "engine");
    CHECK(m2->date == 1889);
    CHECK(m2->gold_animacy == 1);
    CHECK(m2->gold_humanness == 1);
    CHECK(res.corpus.find("m3")->gold_humanness == 0);
    CHECK(split_counts(res.corpus) == SplitCounts{2, 1, 2});
    CHECK(res.notes.size() == 3);
  }

  TEST_CASE("stories sample: multi-word and sentence-initial targets") {
    auto res = load_corpus(data_dir() / "stories_sample.tsv", Schema::stories);
    CHECK(res.errors.empty());
    REQUIRE(res.corpus.instances.size() == 3);
    CHECK(res.corpus.find("s1")->target() == "noise of the leaves");
    CHECK(res.corpus.find("s2")->target_start == 0);
    CHECK(res.corpus.find("s3")->target() == "twelve-headed dragon");
    CHECK_FALSE(res.corpus.split);
    CHECK_THROWS_AS(split_counts(res.corpus), StateError);
  }

  TEST_CASE("machines schema needs humanness") {
    CHECK_THROWS_AS(load_corpus(data_dir() / "stories_sample.tsv", Schema::machines), SchemaError);
    CHECK_THROWS_AS(load_text("id\tsentence\ttarget\tanimacy\ttarget_start\nx\ty\ty\t0\t0\n",
                              Schema::stories),
                    SchemaError);
    CHECK_THROWS_AS(load_text("", Schema::stories), SchemaError);
    CHECK_THROWS_AS(parse_schema("novels"), ConfigError);
  }

  TEST_CASE("bad rows are reported with their line number and skipped") {
    auto res = load_text(
        "id\tsentence\ttarget\tanimacy\thumanness\n"
        "a\tThe engine ran.\tengine\t1\t0\n"
        "b\tThe engine ran.\tdragon\t1\t0\n"
        "\n"
        "c\tThe engine ran.\tengine\t0\t1\n"
        "a\tThe engine ran.\tengine\t1\t0\n"
        "d\tThe engine ran.\tengine\t2\t0\n"
        "e\tThe engine ran.\tengine\t0\n"
        "f\tThe engine ran.\tengine\t0\t\n",
        Schema::machines);
    REQUIRE(res.corpus.instances.size() == 1);
    REQUIRE(res.errors.size() == 6);
    CHECK(res.errors[0].line == 3);
    CHECK(res.errors[0].message.find("does not occur") != std::string::npos);
    CHECK(res.errors[1].line == 5);  // human but inanimate
    CHECK(res.errors[2].line == 6);
    CHECK(res.errors[2].message.find("duplicate") != std::string::npos);
    CHECK(res.errors[3].line == 7);
    CHECK(res.errors[4].line == 8);
    CHECK(res.errors[4].message.find("fields") != std::string::npos);
    CHECK(res.errors[5].line == 9);
  }

  TEST_CASE("explicit offsets must select the target") {
    auto ok = load_text(
        "id\tsentence\ttarget\ttarget_start\ttarget_end\tanimacy\n"
        "a\tLe café et le café.\tcafé\t14\t18\t0\n",
        Schema::stories);
    REQUIRE(ok.errors.empty());
    CHECK(ok.corpus.instances[0].target_start == 14);
    CHECK(ok.notes.empty());
    auto bad = load_text(
        "id\tsentence\ttarget\ttarget_start\ttarget_end\tanimacy\n"
        "a\tLe café et le café.\tcafé\t13\t17\t0\n"
        "b\tLe café.\tcafé\t3\t99\t0\n",
        Schema::stories);
    CHECK(bad.corpus.instances.empty());
    CHECK(bad.errors.size() == 2);
  }

  TEST_CASE("split column values") {
    auto res = load_text(
        "id\tsentence\ttarget\tanimacy\tsplit\n"
        "a\tA dog.\tdog\t1\ttrain\n"
        "b\tA dog.\tdog\t1\t\n"
        "c\tA dog.\tdog\t0\tvalidation\n",
        Schema::stories);
    CHECK(res.corpus.instances.size() == 2);
    CHECK(res.errors.size() == 1);
    CHECK(split_counts(res.corpus) == SplitCounts{1, 0, 2});
  }

  TEST_CASE("empty corpus with a split column counts zero") {
    auto res = load_text("id\tsentence\ttarget\tanimacy\tsplit\n", Schema::stories);
    CHECK(split_counts(res.corpus) == SplitCounts{0, 0, 0});
  }

  TEST_CASE("corpus validation") {
    Corpus c;
    c.instances.resize(2);
    c.instances[0].id = "a";
    c.instances[1].id = "b";
    c.split = Split{{"a"}, {"a"}};
    CHECK_THROWS_AS(c.validate(), IntegrityError);
    c.split = Split{{"a"}, {"z"}};
    CHECK_THROWS_AS(c.validate(), IntegrityError);
    c.split = Split{{"a"}, {"b"}};
    CHECK_NOTHROW(c.validate());
    CHECK(c.subset({"b", "a"})[0].id == "b");
    CHECK_THROWS_AS(c.subset({"q"}), IntegrityError);
  }

  TEST_CASE("property: write then load reproduces the corpus") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      Corpus c;
      c.name = "rt";
      if (trial % 2) c.split.emplace();
      const int n = 1 + static_cast<int>(rng() % 12);
      for (int i = 0; i < n; ++i) {
        MaskedInstance inst;
        inst.id = "i" + std::to_string(i);
        std::string sentence;
        const int words = 2 + static_cast<int>(rng() % 8);
        for (int w = 0; w < words; ++w) sentence += (w ? " " : "") + random_word(rng);
        inst.sentence = sentence;
        // Target = last word, which may also occur earlier.
        auto last = sentence.rfind(' ') + 1;
        inst.target_start = text::codepoint_offset(sentence, last);
        inst.target_end = text::codepoint_length(sentence);
        inst.gold_animacy = static_cast<int>(rng() % 2);
        if (rng() % 2) inst.gold_humanness = *inst.gold_animacy ? static_cast<int>(rng() % 2) : 0;
        if (rng() % 3 == 0) inst.date = 1800 + static_cast<int>(rng() % 150);
        if (rng() % 3 == 0) inst.context_before = "Before it.";
        if (rng() % 3 == 0) inst.context_after = "After it.";
        if (c.split) (rng() % 2 ? c.split->train : c.split->test).push_back(inst.id);
        c.instances.push_back(inst);
      }
      std::ostringstream out;
      write_corpus(out, c);
      auto back = load_text(out.str(), Schema::stories);
      REQUIRE(back.errors.empty());
      REQUIRE(back.corpus.instances.size() == c.instances.size());
      for (std::size_t i = 0; i < c.instances.size(); ++i) {
        const auto& a = c.instances[i];
        const auto& b = back.corpus.instances[i];
        CHECK(a.id == b.id);
        CHECK(a.sentence == b.sentence);
        CHECK(a.target_start == b.target_start);
        CHECK(a.target_end == b.target_end);
        CHECK(a.gold_animacy == b.gold_animacy);
        CHECK(a.gold_humanness == b.gold_humanness);
        CHECK(a.date == b.date);
        CHECK(a.context_before == b.context_before);
        CHECK(a.context_after == b.context_after);
      }
      CHECK(back.corpus.split.has_value() == c.split.has_value());
      if (c.split) {
        CHECK(back.corpus.split->train == c.split->train);
        CHECK(back.corpus.split->test == c.split->test);
      }
      std::ostringstream again;
      write_corpus(again, back.corpus);
      CHECK(again.str() == out.str());
    }
  }

  TEST_CASE("band validation") {
    CHECK(validate_bands(canonical_bands()) == canonical_bands());
    std::vector<AnimacyBand> shuffled = {{0.5, 1.0}, {0.0, 0.5}};
    CHECK(validate_bands(shuffled).front().lower == 0.0);
    CHECK_THROWS_AS(validate_bands(std::vector<AnimacyBand>{{0.0, 0.6}, {0.5, 1.0}}), ConfigError);
    CHECK_THROWS_AS(validate_bands(std::vector<AnimacyBand>{{0.0, 0.4}, {0.5, 1.0}}), ConfigError);
    CHECK_THROWS_AS(validate_bands(std::vector<AnimacyBand>{{0.1, 1.0}}), ConfigError);
    CHECK_THROWS_AS(validate_bands(std::vector<AnimacyBand>{{0.0, 0.9}}), ConfigError);
    CHECK_THROWS_AS(validate_bands(std::vector<AnimacyBand>{}), ConfigError);
  }

  TEST_CASE("pooling respects band edges") {
    std::vector<ScoredId> scored = {{"a", 0.0}, {"b", 0.25}, {"c", 0.2499}, {"d", 0.75},
                                    {"e", 1.0}, {"f", 0.5}};
    auto r = pool_by_band(scored, canonical_bands(), 10, 1);
    REQUIRE(r.bands.size() == 4);
    CHECK(r.bands[0].ids == std::vector<std::string>{"a", "c"});
    CHECK(r.bands[1].ids == std::vector<std::string>{"b"});
    CHECK(r.bands[2].ids == std::vector<std::string>{"f"});
    CHECK(r.bands[3].ids == std::vector<std::string>{"d", "e"});
    CHECK(r.ids() == std::vector<std::string>{"a", "c", "b", "f", "d", "e"});
    CHECK_THROWS_AS(pool_by_band(std::vector<ScoredId>{{"x", 1.2}}, canonical_bands(), 1, 0),
                    InputError);
    CHECK_THROWS_AS(pool_by_band(scored, canonical_bands(), 0, 0), ConfigError);
  }

  TEST_CASE("pooling: sizes, membership and seed determinism") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ScoredId> scored;
    for (int i = 0; i < 300; ++i) scored.push_back({"id" + std::to_string(i), u(rng)});
    scored.push_back({"one", 1.0});

    auto a = pool_by_band(scored, canonical_bands(), 20, 42);
    auto b = pool_by_band(scored, canonical_bands(), 20, 42);
    CHECK(a.ids() == b.ids());
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_json()["seed"] == 42);
    auto c = pool_by_band(scored, canonical_bands(), 20, 43);
    CHECK(a.ids() != c.ids());

    std::map<std::string, double> score_of;
    for (const auto& s : scored) score_of[s.id] = s.score;
    for (std::size_t k = 0; k < a.bands.size(); ++k) {
      const auto& sel = a.bands[k];
      CHECK(sel.ids.size() == std::min<std::size_t>(20, sel.available));
      std::set<std::string> unique(sel.ids.begin(), sel.ids.end());
      CHECK(unique.size() == sel.ids.size());
      for (const auto& id : sel.ids) {
        double s = score_of.at(id);
        CHECK(s >= sel.band.lower);
        CHECK((s < sel.band.upper || (k == 3 && s == 1.0)));
      }
    }

    // Bands smaller than the request come back whole.
    auto all = pool_by_band(scored, canonical_bands(), 1000, 42);
    CHECK(all.ids().size() == scored.size());
  }
}

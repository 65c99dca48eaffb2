#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "animacy/errors.hpp"
#include "animacy/wordnet.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "mini_wordnet.hpp"

using namespace animacy;
using namespace animacy::testing;
using wordnet::SynsetId;
using wordnet::WordNetGraph;

namespace {

// Independent closure check: plain BFS over hypernym links.
bool bfs_reaches(const WordNetGraph& g, SynsetId from, SynsetId target) {
  std::deque<SynsetId> queue{from};
  std::set<SynsetId> seen{from};
  while (!queue.empty()) {
    SynsetId cur = queue.front();
    queue.pop_front();
    if (cur == target) return true;
    for (const auto& h : g.synset(cur).hypernyms)
      if (seen.insert(h).second) queue.push_back(h);
  }
  return false;
}

std::size_t count_edges(const WordNetGraph& g) {
  std::size_t n = 0;
  for (const auto& s : g.synsets()) n += s.hypernyms.size();
  return n;
}

SynsetId named(const WordNetGraph& g, const char* name) {
  auto id = g.resolve_name(name);
  REQUIRE_MESSAGE(id.has_value(), name);
  return *id;
}

}  // namespace

TEST_SUITE("wordnet") {
  TEST_CASE("five-synset fixture loads with four resolvable hypernym edges") {
    TempDir dir;
    write_mini_wordnet(dir.path(), five_synset_fixture());
    auto g = WordNetGraph::load(dir.path());
    CHECK(g.size() == 5);
    CHECK(count_edges(g) == 4);
    for (const auto& s : g.synsets())
      for (const auto& h : s.hypernyms) CHECK(g.contains(h));
    CHECK(g.synset(named(g, "person.n.01")).lemmas ==
          std::vector<std::string>{"person", "individual"});
  }

  TEST_CASE("missing files raise resource errors") {
    TempDir dir;
    write_mini_wordnet(dir.path(), five_synset_fixture());
    std::filesystem::remove(dir / "index.noun");
    CHECK_THROWS_AS(WordNetGraph::load(dir.path()), ResourceError);
    CHECK_THROWS_AS(WordNetGraph::load(dir / "nope"), ResourceError);
  }

  TEST_CASE("malformed data line reports its line number") {
    TempDir dir;
    write_mini_wordnet(dir.path(), five_synset_fixture());
    auto text = slurp(dir / "data.noun");
    // Corrupt the pointer count of the 2nd record (file line 4).
    auto line_start = text.find('\n', text.find("entity 0 000")) + 1;
    auto count_pos = text.find(" 001 ", line_start);
    text.replace(count_pos, 5, " 0x1 ");
    spit(dir / "data.noun", text);
    try {
      WordNetGraph::load(dir.path());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
      CHECK(std::string(e.what()).find("pointer count") != std::string::npos);
    }
  }

  TEST_CASE("offsets must match byte positions") {
    TempDir dir;
    write_mini_wordnet(dir.path(), five_synset_fixture());
    // An extra header line shifts every record.
    spit(dir / "data.noun", "  0 extra license line\n" + slurp(dir / "data.noun"));
    CHECK_THROWS_WITH_AS(WordNetGraph::load(dir.path()), doctest::Contains("byte position"),
                         ParseError);
  }

  TEST_CASE("CRLF copies load with the same offsets") {
    TempDir dir;
    write_mini_wordnet(dir.path(), five_synset_fixture());
    for (const char* f : {"data.noun", "index.noun"}) {
      std::string crlf;
      for (char c : slurp(dir / f)) {
        if (c == '\n') crlf += '\r';
        crlf += c;
      }
      spit(dir / f, crlf);
    }
    auto g = WordNetGraph::load(dir.path());
    CHECK(g.size() == 5);
    CHECK(g.synset(named(g, "machine.n.01")).gloss.find('\r') == std::string::npos);
    CHECK(g.is_living_thing(named(g, "person.n.01")));
  }

  TEST_CASE("hypernym cycle is an integrity error") {
    TempDir dir;
    auto fx = five_synset_fixture();
    fx[1].hypernyms = {"machine"};  // living_thing -> machine -> artifact -> entity
    fx[3].hypernyms = {"person"};   // artifact -> person -> living_thing -> machine -> artifact
    write_mini_wordnet(dir.path(), fx);
    CHECK_THROWS_AS(WordNetGraph::load(dir.path()), IntegrityError);
  }

  TEST_CASE("synset not reaching entity is an integrity error") {
    TempDir dir;
    auto fx = five_synset_fixture();
    fx.push_back({"orphan", {"orphan"}, "no parents", {}, {}});
    write_mini_wordnet(dir.path(), fx);
    CHECK_THROWS_WITH_AS(WordNetGraph::load(dir.path()), doctest::Contains("entity"),
                         IntegrityError);
  }

  TEST_CASE("dangling hypernym pointer is an integrity error") {
    TempDir dir;
    write_mini_wordnet(dir.path(), five_synset_fixture());
    auto text = slurp(dir / "data.noun");
    auto p = text.find("@ 00000124 n", text.find("artifact 0"));
    text.replace(p + 2, 8, "00000125");
    spit(dir / "data.noun", text);
    CHECK_THROWS_AS(WordNetGraph::load(dir.path()), IntegrityError);
  }

  TEST_CASE("gloss examples are stripped by default") {
    CHECK(wordnet::strip_gloss_examples("a human being; \"the person who...\"") == "a human being");
    CHECK(wordnet::strip_gloss_examples("no examples here") == "no examples here");
    const auto& g = mini_graph();
    auto person = named(g, "person.n.01");
    CHECK(g.gloss_text(person) == "a human being");
    CHECK(g.gloss_text(person, true) ==
          "a human being; \"there was too much for one person to do\"");
    CHECK_FALSE(g.gloss_text(named(g, "living_thing.n.01")).empty());
  }

  TEST_CASE("sense lookup is case-insensitive and keeps WordNet order") {
    const auto& g = mini_graph();
    auto dresser = g.senses_of("Dresser");
    REQUIRE(dresser.size() == 2);
    CHECK(dresser[0]->gloss.starts_with("furniture"));
    CHECK(g.is_living_thing(dresser[1]->id));
    CHECK_FALSE(g.is_living_thing(dresser[0]->id));
    CHECK(g.senses_of("chest of drawers").size() == 1);
    CHECK(g.senses_of("CHEST_OF_DRAWERS").size() == 1);
    CHECK(g.senses_of("zzzz-not-a-word").empty());
  }

  TEST_CASE("unknown synset ids raise lookup errors") {
    const auto& g = mini_graph();
    SynsetId bogus{99999999, 'n'};
    CHECK_THROWS_AS(g.is_living_thing(bogus), LookupError);
    CHECK_THROWS_AS(g.gloss_text(bogus), LookupError);
    CHECK_THROWS_AS(g.synset(SynsetId{g.root().offset, 'v'}), LookupError);
  }

  TEST_CASE("living_thing closure on the scoring fixture") {
    const auto& g = mini_graph();
    for (const char* name : {"man.n.01", "person.n.01", "child.n.01", "king.n.01", "patient.n.01",
                             "stranger.n.01", "dog.n.01", "living_thing.n.01"})
      CHECK_MESSAGE(g.is_living_thing(named(g, name)), name);
    for (const char* name : {"entity.n.01", "other.n.01", "one.n.01", "table.n.01", "machine.n.01"})
      CHECK_MESSAGE(!g.is_living_thing(named(g, name)), name);
    // Reached only through an instance hypernym.
    CHECK(g.is_living_thing(named(g, "napoleon.n.01")));
    for (const auto& s : g.synsets())
      CHECK(g.is_living_thing(s.id) == bfs_reaches(g, s.id, g.living_thing()));
  }

  TEST_CASE("resolve_name") {
    const auto& g = mini_graph();
    CHECK(g.resolve_name("dresser.n.02").has_value());
    CHECK_FALSE(g.resolve_name("dresser.n.03"));
    CHECK_FALSE(g.resolve_name("dresser.v.01"));
    CHECK_FALSE(g.resolve_name("dresser"));
    CHECK(SynsetId::parse("02084442-n") == SynsetId{2084442, 'n'});
    CHECK(SynsetId{2084442, 'n'}.str() == "02084442-n");
    CHECK_THROWS_AS(SynsetId::parse("02084442"), InputError);
  }

  TEST_CASE("repeated loads dump identically and the dump reloads") {
    auto a = WordNetGraph::load(data_dir() / "mini_wordnet");
    auto b = WordNetGraph::load(data_dir() / "mini_wordnet");
    std::ostringstream da, db;
    a.dump(da);
    b.dump(db);
    CHECK(da.str() == db.str());

    std::istringstream in(da.str());
    auto c = WordNetGraph::load_dump(in);
    std::ostringstream dc;
    c.dump(dc);
    CHECK(dc.str() == da.str());
    CHECK(c.is_living_thing(named(c, "king.n.01")));

    std::istringstream junk("{\"format\": \"other\"}");
    CHECK_THROWS_AS(WordNetGraph::load_dump(junk), ParseError);
  }

  TEST_CASE("committed fixture matches the generator") {
    TempDir dir;
    write_mini_wordnet(dir.path(), scoring_fixture());
    CHECK(slurp(dir / "data.noun") == slurp(data_dir() / "mini_wordnet" / "data.noun"));
    CHECK(slurp(dir / "index.noun") == slurp(data_dir() / "mini_wordnet" / "index.noun"));
  }

  TEST_CASE("full WordNet 3.0") {
    const WordNetGraph* g = full_graph();
    if (!g) {
      MESSAGE("ANIMACY_WORDNET_DIR not configured; skipping full-database checks");
      return;
    }
    // Non-license lines of data.noun, counted straight from the file.
    std::ifstream in(std::filesystem::path(ANIMACY_WORDNET_DIR) / "data.noun");
    std::size_t records = 0;
    for (std::string line; std::getline(in, line);)
      if (!line.starts_with("  ")) ++records;
    CHECK(records == 82115);
    CHECK(g->size() == records);

    // First offset on the "person" line of index.noun.
    auto person = g->senses_of("person");
    REQUIRE_FALSE(person.empty());
    CHECK(person.front()->id.str() == "00007846-n");
    CHECK(g->living_thing().str() == "00004258-n");
    CHECK(g->root().str() == "00001740-n");

    auto dresser = g->senses_of("dresser");
    CHECK(dresser.size() >= 2);
    bool living = false, not_living = false;
    for (auto* s : dresser) (g->is_living_thing(s->id) ? living : not_living) = true;
    CHECK(living);
    CHECK(not_living);

    CHECK(g->is_living_thing(*g->resolve_name("person.n.01")));
    CHECK(g->is_living_thing(*g->resolve_name("man.n.01")));
    CHECK_FALSE(g->is_living_thing(*g->resolve_name("entity.n.01")));
    CHECK(g->is_living_thing(*g->resolve_name("napoleon.n.01")));  // instance hypernym
    CHECK_FALSE(g->is_living_thing(*g->resolve_name("machine.n.01")));

    std::size_t mismatches = 0;
    for (const auto& s : g->synsets())
      if (g->is_living_thing(s.id) != bfs_reaches(*g, s.id, g->living_thing())) ++mismatches;
    CHECK(mismatches == 0);
  }
}

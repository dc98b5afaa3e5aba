#include <doctest.h>

#include <sstream>

#include "episcore/io.hpp"
#include "episcore/pipeline.hpp"

using namespace episcore;

TEST_CASE("sequence files: comments, whitespace, round trip") {
  std::istringstream in("# header comment\nfox jump  fox\nriver\n");
  auto data = read_sequence(in);
  CHECK(data.sequence.length() == 4);
  CHECK(data.table.size() == 3);
  CHECK(data.sequence.at(1) == data.sequence.at(3));

  std::ostringstream out;
  write_sequence(out, data.sequence, data.table);
  std::istringstream back(out.str());
  auto again = read_sequence(back);
  CHECK(render(again.sequence, again.table) == render(data.sequence, data.table));
}

TEST_CASE("probability csv round trip") {
  std::istringstream src("a b a c");
  auto data = read_sequence(src);
  auto model = estimate_probabilities(data.sequence, data.table, 1.0);
  std::ostringstream out;
  write_probability_csv(out, model, data.table);
  std::istringstream in(out.str());
  auto parsed = read_probability_csv(in, data.table);
  for (Symbol a = 0; a < model.alphabet(); ++a)
    CHECK(parsed.of(a) == doctest::Approx(model.of(a)).epsilon(1e-15));
}

TEST_CASE("episode file round trip preserves structure and support") {
  SymbolTable table;
  table.intern("fox");
  table.intern("jump");
  table.intern("river");
  std::vector<MinedEpisode> episodes;
  episodes.push_back({Episode::serial(std::vector<Symbol>{0, 1, 2}), 12});
  episodes.push_back({Episode::parallel(std::vector<Symbol>{0, 2}), 4});
  episodes.push_back({Episode({0, 1, 2}, {{0, 2}, {1, 2}}), 7});

  std::ostringstream out;
  write_episodes(out, episodes, table);
  std::istringstream in(out.str());
  auto parsed = read_episodes(in, table);
  REQUIRE(parsed.size() == episodes.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].support == episodes[i].support);
    CHECK(parsed[i].episode.canonical_key() == episodes[i].episode.canonical_key());
  }
}

TEST_CASE("episode file parse errors carry line numbers") {
  SymbolTable table;
  table.intern("a");
  std::istringstream bad("nodes 1:a\nedges 1-2\n");
  CHECK_THROWS_WITH_AS(read_episodes(bad, table), doctest::Contains("line 2"), Error);

  std::istringstream unknown("frobnicate 3\n");
  CHECK_THROWS_WITH_AS(read_episodes(unknown, table), doctest::Contains("line 1"), Error);
}

TEST_CASE("json export shape") {
  SymbolTable table;
  table.intern("a");
  table.intern("b");
  Episode ab = Episode::serial(std::vector<Symbol>{0, 1});
  std::string j = episode_to_json(ab, table);
  CHECK(j.find("\"nodes\":[1,2]") != std::string::npos);
  CHECK(j.find("\"labels\":[\"a\",\"b\"]") != std::string::npos);
  CHECK(j.find("\"edges\":[[1,2]]") != std::string::npos);
}

TEST_CASE("episode rendering styles") {
  SymbolTable table;
  table.intern("a");
  table.intern("b");
  table.intern("c");
  CHECK(Episode::serial(std::vector<Symbol>{0, 1, 2}).render(table) == "a>b>c");
  CHECK(Episode::parallel(std::vector<Symbol>{2, 0}).render(table) == "a|c");
  Episode gen({0, 1, 2}, {{0, 2}, {1, 2}});
  CHECK(gen.render(table) == "[1:a 2:b 3:c | 1>3 2>3]");
}

TEST_CASE("ranked csv has header, flags and six-significant-digit scores") {
  SymbolTable table;
  table.intern("a");
  table.intern("b");
  std::vector<MinedEpisode> candidates;
  candidates.push_back({Episode::serial(std::vector<Symbol>{0, 1}), 3});
  auto train = generate_independent(2, 400, 3);
  auto test = generate_independent(2, 400, 4);
  RankConfig cfg;
  auto records = rank_episodes(candidates, train, test, 2, cfg);
  REQUIRE(records.size() == 1);
  std::ostringstream out;
  write_ranked_csv(out, records, table);
  auto text = out.str();
  CHECK(text.rfind("rank,episode,class,nodes,support,n,r,mu,sigma,score,p_value,flags\n", 0) ==
        0);
  CHECK(text.find("a>b") != std::string::npos);
}

TEST_CASE("ks distance of a perfect grid is 1/n") {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back((i + 0.5) / 10.0);
  CHECK(ks_distance_uniform(grid) == doctest::Approx(0.05).epsilon(1e-12));
  std::vector<double> skew(10, 0.05);
  CHECK(ks_distance_uniform(skew) > 0.9);
}

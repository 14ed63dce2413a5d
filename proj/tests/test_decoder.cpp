#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lhr/decoder/decoder.hpp"
#include "lhr/error.hpp"
#include "repair_oracle.hpp"

using namespace lhr;
using namespace lhr::decoder;

namespace {

ScoreMatrix random_scores(std::size_t n, nn::Rng& rng, bool coarse) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> step(-2, 2);
  ScoreMatrix s(n);
  auto draw = [&] { return coarse ? 0.5 * step(rng) : u(rng); };
  for (std::size_t i = 0; i < n; ++i) {
    s.root_sim(i) = draw();
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s.sim(i, j) = draw();
    }
  }
  return s;
}

oracle::Sim sim_of(const ScoreMatrix& s) {
  return [&s](int i, int j) { return s.sim(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); };
}

model::EncodedSentence random_encoding(std::size_t n, std::size_t d, nn::Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  model::EncodedSentence enc;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> c(d), h(d);
    for (auto& v : c) v = z(rng);
    for (auto& v : h) v = z(rng);
    enc.context.push_back(c);
    enc.latent_heads.push_back(h);
    enc.embeddings.push_back({});
  }
  return enc;
}

}  // namespace

TEST_CASE("build_scores") {
  SUBCASE("single token has only a root score") {
    model::EncodedSentence enc;
    enc.context = {{1.0, 0.0}};
    enc.latent_heads = {{0.6, 0.8}};
    std::vector<double> root{0.0, 1.0};
    const auto s = build_scores(enc, root);
    CHECK(s.size() == 1);
    CHECK(s.root_sim(0) == doctest::Approx(0.8));
  }
  SUBCASE("h_i equal to c_j gives similarity one, and sim is not symmetric") {
    model::EncodedSentence enc;
    enc.context = {{1.0, 2.0, 0.0}, {0.0, 1.0, 1.0}};
    enc.latent_heads = {{0.0, 1.0, 1.0}, {3.0, -1.0, 2.0}};
    std::vector<double> root{1.0, 1.0, 1.0};
    const auto s = build_scores(enc, root);
    CHECK(s.sim(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.sim(0, 1) != doctest::Approx(s.sim(1, 0)));
  }
  SUBCASE("self root target compares with the token's own context") {
    model::EncodedSentence enc;
    enc.context = {{1.0, 0.0}, {0.0, 1.0}};
    enc.latent_heads = {{1.0, 0.0}, {1.0, 0.0}};
    std::vector<double> root{0.0, 1.0};
    const auto s = build_scores(enc, root, model::RootTarget::self);
    CHECK(s.root_sim(0) == doctest::Approx(1.0));
    CHECK(s.root_sim(1) == doctest::Approx(0.0));
  }
  SUBCASE("entries lie in [-1, 1]") {
    nn::Rng rng(5);
    const auto enc = random_encoding(12, 7, rng);
    std::vector<double> root(7, 0.3);
    const auto s = build_scores(enc, root);
    for (std::size_t i = 0; i < 12; ++i) {
      CHECK(std::abs(s.root_sim(i)) <= 1.0);
      for (std::size_t j = 0; j < 12; ++j) CHECK(std::abs(s.sim(i, j)) <= 1.0);
    }
  }
}

TEST_CASE("select_root") {
  ScoreMatrix s(3);
  s.root_sim(0) = 0.1;
  s.root_sim(1) = 0.9;
  s.root_sim(2) = 0.3;
  CHECK(select_root(s) == 2);
  ScoreMatrix one(1);
  CHECK(select_root(one) == 1);
  ScoreMatrix tie(2);
  tie.root_sim(0) = 0.5;
  tie.root_sim(1) = 0.5;
  CHECK(select_root(tie) == 1);
}

TEST_CASE("select_root ignores every non-root entry") {
  nn::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_scores(8, rng, false);
    const int before = select_root(s);
    auto p = random_scores(8, rng, false);
    for (std::size_t i = 0; i < 8; ++i) p.root_sim(i) = s.root_sim(i);
    CHECK(select_root(p) == before);
  }
}

TEST_CASE("assign_heads") {
  SUBCASE("two tokens") {
    ScoreMatrix s(2);
    s.sim(1, 0) = -0.7;
    const auto t = assign_heads(s, 1);
    CHECK(t.heads == std::vector<int>{0, 1});
  }
  SUBCASE("both dependents prefer token 1") {
    ScoreMatrix s(3);
    s.sim(1, 0) = 0.9;
    s.sim(1, 2) = 0.1;
    s.sim(2, 0) = 0.8;
    s.sim(2, 1) = 0.2;
    const auto t = assign_heads(s, 1);
    CHECK(t.heads == std::vector<int>{0, 1, 1});
    CHECK(find_cycle(t.heads).empty());
  }
  SUBCASE("mutual preference makes a cycle") {
    ScoreMatrix s(3);
    s.sim(1, 2) = 0.9;
    s.sim(2, 1) = 0.5;
    s.sim(1, 0) = 0.1;
    s.sim(2, 0) = 0.2;
    const auto t = assign_heads(s, 1);
    CHECK(t.heads == std::vector<int>{0, 3, 2});
    CHECK(find_cycle(t.heads) == std::vector<int>{2, 3});
  }
  SUBCASE("no other token takes the root") {
    nn::Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = random_scores(6, rng, true);
      const auto t = assign_heads(s, 4);
      for (std::size_t i = 0; i < 6; ++i) CHECK((t.heads[i] == 0) == (i == 3));
    }
  }
}

TEST_CASE("repair_cycles") {
  SUBCASE("a tree is left unchanged") {
    ScoreMatrix s(3);
    s.sim(1, 0) = 0.9;
    s.sim(2, 0) = 0.8;
    auto t = assign_heads(s, 1);
    const auto r = repair_cycles(t, s);
    CHECK(r.heads == t.heads);
    CHECK(r.arc_scores == t.arc_scores);
    CHECK(r.repaired_cycles == 0);
  }
  SUBCASE("2-3 cycle: the weaker arc 3->2 is removed and 3 goes to token 1") {
    ScoreMatrix s(3);
    s.sim(1, 2) = 0.9;
    s.sim(2, 1) = 0.5;
    s.sim(1, 0) = 0.1;
    s.sim(2, 0) = 0.2;
    const auto r = repair_cycles(assign_heads(s, 1), s);
    CHECK(r.heads == std::vector<int>{0, 3, 1});
    CHECK(r.repaired_cycles == 1);
    CHECK(r.arc_scores[2] == 0.2);
    CHECK(is_single_rooted_tree(r.heads));
  }
  SUBCASE("equal arc scores: the lowest dependent is detached") {
    ScoreMatrix s(3);
    s.sim(1, 2) = 0.5;
    s.sim(2, 1) = 0.5;
    const auto r = repair_cycles(assign_heads(s, 1), s);
    CHECK(r.heads == std::vector<int>{0, 1, 2});
  }
  SUBCASE("random matrices, n <= 6, always a tree and equal to the oracle") {
    nn::Rng rng(20180510);
    std::uniform_int_distribution<std::size_t> size(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = size(rng);
      const auto s = random_scores(n, rng, trial % 2 == 0);
      const auto pre = assign_heads(s, select_root(s));
      const auto r = repair_cycles(pre, s);
      REQUIRE(is_single_rooted_tree(r.heads));
      for (std::size_t i = 0; i < n; ++i) CHECK(r.heads[i] != static_cast<int>(i) + 1);
      CHECK(r.heads == oracle::brute_force_repair(pre.heads, sim_of(s)));
      CHECK(repair_cycles(r, s).heads == r.heads);
    }
  }
}

TEST_CASE("cosine scale invariance") {
  nn::Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    auto enc = random_encoding(9, 6, rng);
    std::vector<double> root(6, 0.1);
    root[trial % 6] = 1.0;
    const auto s = build_scores(enc, root);
    const auto base = repair_cycles(assign_heads(s, select_root(s)), s);
    for (auto& h : enc.latent_heads) {
      for (auto& v : h) v *= 3.7;
    }
    const auto s2 = build_scores(enc, root);
    CHECK(select_root(s2) == select_root(s));
    CHECK(repair_cycles(assign_heads(s2, select_root(s2)), s2).heads == base.heads);
  }
}

TEST_CASE("non-projective trees are produced without error") {
  ScoreMatrix s(4);
  s.root_sim(1) = 1.0;
  s.sim(0, 2) = 0.9;
  s.sim(2, 1) = 0.9;
  s.sim(3, 1) = 0.9;
  const auto r = repair_cycles(assign_heads(s, select_root(s)), s);
  CHECK(r.heads == std::vector<int>{3, 0, 2, 2});
  CHECK(is_single_rooted_tree(r.heads));
  CHECK(has_crossing_arcs(r.heads));
}

TEST_CASE("choose_label_pos") {
  // labels {A, B}, pos {X, Y}
  const std::vector<double> labels{0.9, 0.6};
  const std::vector<double> pos{0.1, 0.5};
  SUBCASE("sum decides") {
    const std::vector<std::pair<std::size_t, std::size_t>> seen{{0, 0}, {1, 1}};
    CHECK(choose_label_pos(labels, pos, seen) == 1);
  }
  SUBCASE("the unconstrained best pair is skipped when unseen") {
    const std::vector<std::pair<std::size_t, std::size_t>> seen{{0, 0}, {1, 0}};
    CHECK(choose_label_pos(labels, pos, seen) == 0);  // (A,Y) would score 1.4
  }
  SUBCASE("first pair wins ties") {
    const std::vector<double> flat{0.0, 0.0};
    const std::vector<std::pair<std::size_t, std::size_t>> seen{{1, 0}, {0, 1}};
    CHECK(choose_label_pos(flat, flat, seen) == 0);
  }
  SUBCASE("no pairs is a configuration error") {
    CHECK_THROWS_AS(choose_label_pos(labels, pos, {}), ConfigError);
  }
}

TEST_CASE("labels and POS through the model") {
  SUBCASE("a single seen pair labels everything") {
    auto tb = fixtures::treebank({fixtures::sentence({"go"}, {"VERB"}, {0}, {"root"})});
    auto m = fixtures::tiny_model(tb);
    auto s = fixtures::sentence({"a", "b", "c"}, {"DET", "NOUN", "X"}, {2, 0, 2}, {"det", "root", "dep"});
    const auto t = parse(m, s);
    CHECK(t.labels == std::vector<std::string>{"root", "root", "root"});
    CHECK(t.pos == std::vector<std::string>{"VERB", "VERB", "VERB"});
    const auto kept = parse(m, s, DecodeOptions{false});
    CHECK(kept.pos == std::vector<std::string>{"DET", "NOUN", "X"});
    CHECK(kept.heads == t.heads);
  }
  SUBCASE("chosen pairs are always seen pairs") {
    auto tb = fixtures::load("fixture_train.conllu");
    auto m = fixtures::tiny_model(tb);
    for (const auto& t : parse_all(m, tb)) {
      for (std::size_t i = 0; i < t.size(); ++i) CHECK(tb.seen_label_pos_pairs.contains({t.labels[i], t.pos[i]}));
    }
  }
}

TEST_CASE("parse always yields a tree") {
  auto tb = fixtures::load("fixture_train.conllu");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = fixtures::tiny_model(tb, fixtures::tiny_config(3, seed));
    for (const auto& s : tb.sentences) {
      const auto t = parse(m, s);
      CHECK(t.size() == s.size());
      CHECK(is_single_rooted_tree(t.heads));
    }
  }
  auto one = fixtures::sentence({"Stop"}, {"VERB"}, {0}, {"root"});
  CHECK(parse(fixtures::tiny_model(tb), one).heads == std::vector<int>{0});
}

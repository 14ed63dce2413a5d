#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "lhr/error.hpp"
#include "lhr/model/lhr_model.hpp"
#include "lhr/model/lss_io.hpp"
#include "lhr/model/token_encoder.hpp"

using namespace lhr;
using namespace lhr::model;

namespace {

std::vector<double> values(const nn::Graph& g, nn::Expr e) {
  auto v = g.value(e);
  return {v.begin(), v.end()};
}

std::vector<std::vector<double>> encode_values(const LhrModel& m, const treebank::Sentence& s, bool training,
                                               nn::Rng* rng) {
  nn::Graph g;
  auto e = m.token_encoder().encode_tokens(g, s, training, rng);
  std::vector<std::vector<double>> out;
  for (auto x : e) out.push_back(values(g, x));
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lhr_test_model_" + name);
}

}  // namespace

TEST_CASE("drop_probability") {
  CHECK(drop_probability(0, 0.25) == 1.0);
  CHECK(drop_probability(1, 0.25) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(drop_probability(1000000, 0.25) < 1e-6);
  for (std::size_t c = 0; c < 50; ++c) {
    CHECK(drop_probability(c + 1, 0.25) < drop_probability(c, 0.25));
    CHECK(drop_probability(c, 0.25) == 0.25 / (static_cast<double>(c) + 0.25));
  }
}

TEST_CASE("encoder mode names") {
  CHECK(parse_encoder_mode("word+pos") == EncoderMode::word_pos);
  CHECK(parse_encoder_mode("word+char") == EncoderMode::word_char);
  CHECK_THROWS_AS(parse_encoder_mode("chars"), InvalidInput);
}

TEST_CASE("token encoder") {
  auto tb = fixtures::treebank({fixtures::dog_saw_cat()});
  const auto s = tb.sentences[0];

  SUBCASE("default word+pos width is 200") {
    ModelConfig cfg;
    cfg.context_hidden = 2;
    cfg.heads_hidden = 2;
    cfg.labeler_hidden = 2;
    LhrModel m(cfg, treebank::build_vocabularies(tb));
    for (const auto& e : encode_values(m, s, false, nullptr)) CHECK(e.size() == 200);
  }

  SUBCASE("inference is deterministic") {
    auto m = fixtures::tiny_model(tb);
    CHECK(encode_values(m, s, false, nullptr) == encode_values(m, s, false, nullptr));
  }

  SUBCASE("out-of-vocabulary word maps to the unknown row") {
    auto m = fixtures::tiny_model(tb);
    auto oov = fixtures::sentence({"zebra"}, {"NOUN"}, {0}, {"root"});
    const auto e = encode_values(m, oov, false, nullptr)[0];
    const auto* words = m.parameters().find("token_encoder.words");
    REQUIRE(words != nullptr);
    auto unk = words->value.row(m.vocab().words.unknown_index());
    CHECK(std::equal(unk.begin(), unk.end(), e.begin()));
  }

  SUBCASE("dropout is reproducible under a seed and only touches the word part") {
    auto m = fixtures::tiny_model(tb);
    const auto clean = encode_values(m, s, false, nullptr);
    nn::Rng a(42), b(42);
    const auto da = encode_values(m, s, true, &a);
    const auto db = encode_values(m, s, true, &b);
    CHECK(da == db);
    const std::size_t w = m.config().encoder.word_dim;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::equal(da[i].begin() + static_cast<long>(w), da[i].end(), clean[i].begin() + static_cast<long>(w)));
    }
  }

  SUBCASE("dropout frequency follows alpha/(count+alpha)") {
    auto m = fixtures::tiny_model(tb);
    auto one = fixtures::sentence({"dog"}, {"NOUN"}, {0}, {"root"});  // count 1 -> 0.2
    const auto clean = encode_values(m, one, false, nullptr)[0];
    nn::Rng rng(3);
    int dropped = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
      if (encode_values(m, one, true, &rng)[0] != clean) ++dropped;
    }
    CHECK(static_cast<double>(dropped) / trials == doctest::Approx(0.2).epsilon(0.05));
  }

  SUBCASE("training mode without generator is a usage error") {
    auto m = fixtures::tiny_model(tb);
    nn::Graph g;
    CHECK_THROWS_AS(m.token_encoder().encode_tokens(g, s, true, nullptr), UsageError);
  }

  SUBCASE("unbuilt encoder is a usage error") {
    TokenEncoder enc;
    nn::Graph g;
    CHECK_THROWS_AS(enc.encode_tokens(g, s, false, nullptr), UsageError);
  }
}

TEST_CASE("character encoder") {
  auto tb = fixtures::treebank({fixtures::dog_saw_cat()});
  auto cfg = fixtures::tiny_config();
  cfg.encoder.mode = EncoderMode::word_char;
  auto m = fixtures::tiny_model(tb, cfg);
  auto chars = [&](std::string_view w) {
    nn::Graph g;
    return values(g, m.token_encoder().encode_chars(g, w));
  };
  CHECK(chars("a").size() == cfg.encoder.pos_dim);
  CHECK(chars("catalogue").size() == cfg.encoder.pos_dim);
  CHECK(chars("cat") == chars("cat"));
  CHECK(chars("cat") != chars("act"));
  CHECK(chars("") == std::vector<double>(cfg.encoder.pos_dim, 0.0));

  // word+char tokens are [word; chars(form)]
  nn::Graph g;
  auto e = m.token_encoder().encode_tokens(g, tb.sentences[0], false, nullptr);
  auto v = values(g, e[1]);
  REQUIRE(v.size() == cfg.encoder.word_dim + cfg.encoder.pos_dim);
  const auto c = chars("dog");
  CHECK(std::equal(c.begin(), c.end(), v.begin() + static_cast<long>(cfg.encoder.word_dim)));
}

TEST_CASE("encode_sentence") {
  auto tb = fixtures::treebank({fixtures::dog_saw_cat()});
  auto m = fixtures::tiny_model(tb);
  const auto& s = tb.sentences[0];
  const auto enc = m.encode_sentence(s);
  CHECK(enc.embeddings.size() == s.size());
  CHECK(enc.context.size() == s.size());
  CHECK(enc.latent_heads.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(enc.context[i].size() == m.context_size());
    CHECK(enc.latent_heads[i].size() == m.context_size());
  }
  CHECK(m.root_vector().size() == m.context_size());

  const auto again = m.encode_sentence(s);
  CHECK(again.latent_heads == enc.latent_heads);

  // Both "the" tokens share an embedding but not a context vector.
  CHECK(enc.embeddings[0] == enc.embeddings[3]);
  CHECK(enc.context[0] != enc.context[3]);

  treebank::Sentence empty;
  CHECK_THROWS_AS(m.encode_sentence(empty), InvalidInput);
}

TEST_CASE("dimension chain holds for uneven hidden sizes") {
  auto tb = fixtures::treebank({fixtures::dog_saw_cat()});
  auto cfg = fixtures::tiny_config();
  cfg.context_hidden = 5;
  cfg.heads_hidden = 9;
  auto m = fixtures::tiny_model(tb, cfg);
  const auto enc = m.encode_sentence(tb.sentences[0]);
  CHECK(enc.latent_heads[0].size() == 10);
  CHECK(enc.context[0].size() == 10);
  CHECK(m.root_vector().size() == 10);
  CHECK(m.head_reducer().output_size() == 10);
}

TEST_CASE("score_label_pos") {
  auto tb = fixtures::treebank({fixtures::dog_saw_cat()});
  auto m = fixtures::tiny_model(tb);
  const auto enc = m.encode_sentence(tb.sentences[0]);
  const std::size_t nl = m.vocab().labels.size();
  const std::size_t np = m.vocab().pos.size();

  SUBCASE("shapes and graph/value agreement") {
    const auto sc = m.score_label_pos(enc.context[1], enc.context[2]);
    CHECK(sc.label.size() == nl);
    CHECK(sc.pos.size() == np);
    nn::Graph g;
    auto e = m.score_label_pos(g, g.input(enc.context[1]), g.input(enc.context[2]));
    CHECK(values(g, e.label_scores) == sc.label);
    CHECK(values(g, e.pos_scores) == sc.pos);
  }

  SUBCASE("root governor uses the root vector") {
    nn::Graph g;
    auto e = m.score_label_pos(g, g.input(enc.context[2]), m.root(g));
    const auto via_values = m.score_label_pos(enc.context[2], m.root_vector());
    CHECK(values(g, e.label_scores) == via_values.label);
  }

  SUBCASE("dependent and governor are not interchangeable") {
    const auto a = m.score_label_pos(enc.context[1], enc.context[2]);
    const auto b = m.score_label_pos(enc.context[2], enc.context[1]);
    CHECK(a.label != b.label);
    CHECK(a.pos != b.pos);
  }

  SUBCASE("zero weights give uniform scores") {
    for (auto& p : m.parameters()) {
      if (p->name.rfind("labeler.", 0) == 0) p->value.fill(0.0);
    }
    const auto sc = m.score_label_pos(enc.context[1], enc.context[2]);
    for (double v : sc.label) CHECK(v == sc.label[0]);
    for (double v : sc.pos) CHECK(v == sc.pos[0]);
  }

  SUBCASE("wrong input size is a configuration error") {
    std::vector<double> short_vec(m.context_size() - 1, 0.0);
    CHECK_THROWS_AS(m.score_label_pos(short_vec, enc.context[0]), ConfigError);
  }
}

TEST_CASE("softmax labeler output sums to one") {
  auto tb = fixtures::treebank({fixtures::dog_saw_cat()});
  auto cfg = fixtures::tiny_config();
  cfg.labeler_output = LabelerOutput::softmax;
  auto m = fixtures::tiny_model(tb, cfg);
  const auto enc = m.encode_sentence(tb.sentences[0]);
  const auto sc = m.score_label_pos(enc.context[0], enc.context[1]);
  double sum = 0.0;
  for (double v : sc.label) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("latent structure") {
  auto tb = fixtures::treebank({fixtures::sentence({"go"}, {"VERB"}, {0}, {"root"})});
  auto m = fixtures::tiny_model(tb);
  const auto enc = m.encode_sentence(tb.sentences[0]);
  const auto lss = latent_structure(enc);
  REQUIRE(lss.size() == 1);
  CHECK(lss[0].size() == 2 * m.context_size());
  CHECK(std::equal(enc.context[0].begin(), enc.context[0].end(), lss[0].begin()));
  CHECK(std::equal(enc.latent_heads[0].begin(), enc.latent_heads[0].end(),
                   lss[0].begin() + static_cast<long>(m.context_size())));
}

TEST_CASE("LSS export round trip is bit-exact") {
  auto tb = fixtures::load("fixture_dev.conllu");
  auto m = fixtures::tiny_model(tb);
  std::vector<LssRecord> records;
  for (std::size_t s = 0; s < tb.sentences.size(); ++s) {
    const auto lss = latent_structure(m.encode_sentence(tb.sentences[s]));
    for (std::size_t i = 0; i < lss.size(); ++i) records.push_back({s + 1, i + 1, lss[i]});
  }
  CHECK(records.size() == tb.token_count());
  for (auto fmt : {LssFormat::text, LssFormat::binary}) {
    const auto path = temp_path(fmt == LssFormat::text ? "lss.txt" : "lss.bin");
    write_lss(path, records, fmt);
    CHECK(read_lss(path, fmt) == records);
    std::filesystem::remove(path);
  }
  std::istringstream bad("1\t1\t0.5 x\n");
  CHECK_THROWS_AS(read_lss(bad, LssFormat::text), FormatError);
}

TEST_CASE("checkpoint round trip") {
  auto tb = fixtures::load("fixture_train.conllu");
  auto cfg = fixtures::tiny_config();
  cfg.labeler_output = LabelerOutput::softmax;
  cfg.encoder.mode = EncoderMode::word_char;
  auto m = fixtures::tiny_model(tb, cfg);
  const auto path = temp_path("ckpt.bin");
  m.save(path);
  const auto loaded = LhrModel::load(path);
  CHECK(loaded.config().labeler_output == LabelerOutput::softmax);
  CHECK(loaded.config().encoder.mode == EncoderMode::word_char);
  CHECK(loaded.snapshot() == m.snapshot());
  CHECK(loaded.vocab().words.symbols() == m.vocab().words.symbols());
  CHECK(loaded.vocab().seen_pairs == m.vocab().seen_pairs);
  const auto& s = tb.sentences[3];
  CHECK(loaded.encode_sentence(s).latent_heads == m.encode_sentence(s).latent_heads);

  SUBCASE("version mismatch is rejected") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const char version2[8] = {2, 0, 0, 0, 0, 0, 0, 0};
    f.write(version2, 8);
    f.close();
    CHECK_THROWS_AS(LhrModel::load(path), FormatError);
  }
  SUBCASE("garbage is rejected") {
    std::ofstream(path, std::ios::binary) << "not a checkpoint";
    CHECK_THROWS_AS(LhrModel::load(path), FormatError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("same seed builds the same model") {
  auto tb = fixtures::load("fixture_train.conllu");
  CHECK(fixtures::tiny_model(tb).snapshot() == fixtures::tiny_model(tb).snapshot());
  CHECK(fixtures::tiny_model(tb, fixtures::tiny_config(4, 1)).snapshot() !=
        fixtures::tiny_model(tb, fixtures::tiny_config(4, 2)).snapshot());
}

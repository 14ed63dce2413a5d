#pragma once

#include <string>
#include <vector>

#include "lhr/model/lhr_model.hpp"
#include "lhr/treebank/conll.hpp"
#include "lhr/treebank/vocabulary.hpp"

namespace fixtures {

inline lhr::treebank::Treebank load(const std::string& name,
                                    lhr::treebank::Format format = lhr::treebank::Format::conllu) {
  lhr::treebank::ReadOptions opt;
  opt.format = format;
  return lhr::treebank::read_conll("data/" + name, opt);
}

// Sentence with coarse = predicted tags; heads are CoNLL-numbered.
inline lhr::treebank::Sentence sentence(const std::vector<std::string>& forms, const std::vector<std::string>& tags,
                                        const std::vector<int>& heads, const std::vector<std::string>& labels) {
  lhr::treebank::Sentence s;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    lhr::treebank::Token t;
    t.index = static_cast<int>(i + 1);
    t.form = forms[i];
    t.gold_pos = tags[i];
    t.predicted_pos = tags[i];
    t.gold_head = heads[i];
    t.gold_label = labels[i];
    t.is_punct = labels[i] == "punct";
    t.columns = {std::to_string(i + 1), forms[i], lhr::treebank::lowercase(forms[i]), tags[i], tags[i], "_",
                 std::to_string(heads[i]), labels[i], "_", "_"};
    s.tokens.push_back(std::move(t));
  }
  return s;
}

inline lhr::treebank::Treebank treebank(std::vector<lhr::treebank::Sentence> sentences) {
  lhr::treebank::Treebank tb;
  tb.sentences = std::move(sentences);
  lhr::treebank::index_treebank(tb);
  return tb;
}

// "the dog saw the cat ."
inline lhr::treebank::Sentence dog_saw_cat() {
  return sentence({"the", "dog", "saw", "the", "cat", "."}, {"DET", "NOUN", "VERB", "DET", "NOUN", "PUNCT"},
                  {2, 3, 0, 5, 3, 3}, {"det", "nsubj", "root", "det", "obj", "punct"});
}

inline lhr::model::ModelConfig tiny_config(std::size_t hidden = 4, std::uint64_t seed = 7) {
  lhr::model::ModelConfig cfg;
  cfg.encoder.word_dim = 6;
  cfg.encoder.pos_dim = 3;
  cfg.encoder.char_dim = 4;
  cfg.encoder.char_hidden = 3;
  cfg.context_hidden = hidden;
  cfg.heads_hidden = hidden;
  cfg.labeler_hidden = 5;
  cfg.seed = seed;
  return cfg;
}

inline lhr::model::LhrModel tiny_model(const lhr::treebank::Treebank& tb, lhr::model::ModelConfig cfg = tiny_config()) {
  return lhr::model::LhrModel(cfg, lhr::treebank::build_vocabularies(tb, cfg.encoder.min_count));
}

}  // namespace fixtures

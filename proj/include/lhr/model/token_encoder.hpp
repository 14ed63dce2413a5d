#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lhr/nn/graph.hpp"
#include "lhr/nn/layers.hpp"
#include "lhr/nn/parameter.hpp"
#include "lhr/treebank/conll.hpp"
#include "lhr/treebank/vocabulary.hpp"

namespace lhr::model {

enum class EncoderMode { word_pos, word_char };

EncoderMode parse_encoder_mode(std::string_view name);  // "word+pos" | "word+char"
std::string_view encoder_mode_name(EncoderMode mode);

struct EncoderConfig {
  EncoderMode mode = EncoderMode::word_pos;
  std::size_t word_dim = 150;
  std::size_t pos_dim = 50;   // also the projected width of the character representation
  double alpha = 0.25;        // word dropout coefficient
  std::size_t char_dim = 50;
  std::size_t char_hidden = 50;  // per direction
  std::size_t min_count = 1;

  std::size_t output_size() const { return word_dim + pos_dim; }
  void validate() const;
};

// Probability that a word seen `word_count` times in training is replaced by
// the unknown vector: alpha / (count + alpha).
double drop_probability(std::size_t word_count, double alpha);

// Character-level word representation: a BiLSTM over character embeddings;
// the last forward and first reverse states are concatenated and projected.
class CharEncoder {
 public:
  CharEncoder() = default;
  CharEncoder(nn::ParameterSet& params, const std::string& prefix, std::size_t vocab_size,
              const EncoderConfig& cfg, nn::Rng& rng);

  // Empty words map to a zero vector.
  nn::Expr encode(nn::Graph& g, const treebank::Vocabulary& chars, std::string_view word) const;
  std::size_t output_size() const { return projection_.output_size(); }

 private:
  nn::Parameter* table_ = nullptr;
  nn::BiEncoder birnn_;
  nn::DenseLayer projection_;
};

// Builds e_1..e_n: [word; pos] or [word; chars] per token.
class TokenEncoder {
 public:
  TokenEncoder() = default;
  TokenEncoder(nn::ParameterSet& params, const EncoderConfig& cfg,
               const treebank::Vocabularies& vocab, nn::Rng& rng);

  // With `training` set, each word is independently swapped for the unknown
  // vector with drop_probability(count); `rng` drives those draws.
  std::vector<nn::Expr> encode_tokens(nn::Graph& g, const treebank::Sentence& sentence,
                                      bool training, nn::Rng* rng) const;
  nn::Expr encode_chars(nn::Graph& g, std::string_view word) const;

  std::size_t output_size() const { return cfg_.output_size(); }
  const EncoderConfig& config() const { return cfg_; }

 private:
  void require_ready() const;

  EncoderConfig cfg_;
  const treebank::Vocabularies* vocab_ = nullptr;
  nn::Parameter* words_ = nullptr;
  nn::Parameter* pos_ = nullptr;
  CharEncoder chars_;
};

}  // namespace lhr::model

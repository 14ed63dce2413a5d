#include "lhr/model/token_encoder.hpp"

#include "lhr/error.hpp"

namespace lhr::model {
namespace {

constexpr double kEmbeddingInit = 0.05;

}  // namespace

EncoderMode parse_encoder_mode(std::string_view name) {
  if (name == "word+pos" || name == "word-pos" || name == "word_pos") return EncoderMode::word_pos;
  if (name == "word+char" || name == "word-char" || name == "word_char") return EncoderMode::word_char;
  throw InvalidInput("unknown encoder mode: " + std::string(name));
}

std::string_view encoder_mode_name(EncoderMode mode) {
  return mode == EncoderMode::word_pos ? "word+pos" : "word+char";
}

void EncoderConfig::validate() const {
  if (word_dim == 0 || pos_dim == 0 || char_dim == 0 || char_hidden == 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (!(alpha >= 0.0)) throw ConfigError("encoder.alpha must be non-negative");
}

double drop_probability(std::size_t word_count, double alpha) {
  if (alpha <= 0.0) return 0.0;
  return alpha / (static_cast<double>(word_count) + alpha);
}

CharEncoder::CharEncoder(nn::ParameterSet& params, const std::string& prefix, std::size_t vocab_size,
                         const EncoderConfig& cfg, nn::Rng& rng)
    : table_(&params.add(prefix + ".table", {vocab_size, cfg.char_dim})),
      birnn_(params, prefix + ".birnn", cfg.char_dim, cfg.char_hidden, rng),
      projection_(params, prefix + ".projection", 2 * cfg.char_hidden, cfg.pos_dim,
                  nn::Activation::tanh, rng) {
  nn::init_uniform(*table_, kEmbeddingInit, rng);
}

nn::Expr CharEncoder::encode(nn::Graph& g, const treebank::Vocabulary& chars, std::string_view word) const {
  const auto symbols = treebank::utf8_characters(word);
  if (symbols.empty()) return g.input(std::vector<double>(output_size(), 0.0));
  std::vector<nn::Expr> xs;
  xs.reserve(symbols.size());
  for (const auto& ch : symbols) xs.push_back(g.lookup(*table_, chars.lookup(ch)));
  const auto states = birnn_.encode(g, xs);
  const std::size_t h = birnn_.hidden_size();
  // forward half of the last state, reverse half of the first
  const nn::Expr summary = g.concat({g.slice(states.back(), 0, h), g.slice(states.front(), h, h)});
  return projection_.forward(g, summary);
}

TokenEncoder::TokenEncoder(nn::ParameterSet& params, const EncoderConfig& cfg,
                           const treebank::Vocabularies& vocab, nn::Rng& rng)
    : cfg_(cfg), vocab_(&vocab) {
  cfg_.validate();
  words_ = &params.add("token_encoder.words", {vocab.words.size(), cfg.word_dim});
  nn::init_uniform(*words_, kEmbeddingInit, rng);
  if (cfg.mode == EncoderMode::word_pos) {
    pos_ = &params.add("token_encoder.pos", {vocab.input_pos.size(), cfg.pos_dim});
    nn::init_uniform(*pos_, kEmbeddingInit, rng);
  } else {
    chars_ = CharEncoder(params, "token_encoder.chars", vocab.chars.size(), cfg, rng);
  }
}

void TokenEncoder::require_ready() const {
  if (vocab_ == nullptr || words_ == nullptr) throw UsageError("token encoder used before vocabularies were built");
}

nn::Expr TokenEncoder::encode_chars(nn::Graph& g, std::string_view word) const {
  require_ready();
  if (cfg_.mode != EncoderMode::word_char) throw UsageError("encode_chars requires word+char mode");
  return chars_.encode(g, vocab_->chars, word);
}

std::vector<nn::Expr> TokenEncoder::encode_tokens(nn::Graph& g, const treebank::Sentence& sentence,
                                                  bool training, nn::Rng* rng) const {
  require_ready();
  if (training && rng == nullptr && cfg_.alpha > 0.0) throw UsageError("training-mode encoding needs a random generator");
  std::vector<nn::Expr> out;
  out.reserve(sentence.size());
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (const auto& tok : sentence.tokens) {
    const std::string lowered = treebank::lowercase(tok.form);
    std::size_t word = vocab_->words.lookup(lowered);
    if (training && cfg_.alpha > 0.0) {
      const double p = drop_probability(vocab_->word_count(lowered), cfg_.alpha);
      if (coin(*rng) < p) word = vocab_->words.unknown_index();
    }
    const nn::Expr w = g.lookup(*words_, word);
    const nn::Expr second = cfg_.mode == EncoderMode::word_pos
                                ? g.lookup(*pos_, vocab_->input_pos.lookup(tok.predicted_pos))
                                : chars_.encode(g, vocab_->chars, tok.form);
    out.push_back(g.concat({w, second}));
  }
  return out;
}

}  // namespace lhr::model

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "lhr/model/token_encoder.hpp"
#include "lhr/nn/graph.hpp"
#include "lhr/nn/layers.hpp"
#include "lhr/nn/parameter.hpp"
#include "lhr/treebank/conll.hpp"
#include "lhr/treebank/vocabulary.hpp"

namespace lhr::model {

// How the labeler's outputs are scored: raw scores trained with the margin
// objective, or softmax probabilities trained with cross-entropy.
enum class LabelerOutput { margin, softmax };
// Reconstruction target (and decoding reference) for the sentence's top token.
enum class RootTarget { root_vector, self };

LabelerOutput parse_labeler_output(std::string_view name);  // "margin" | "xent" | "softmax"
std::string_view labeler_output_name(LabelerOutput v);
RootTarget parse_root_target(std::string_view name);  // "root_vector" | "self"
std::string_view root_target_name(RootTarget v);

struct ModelConfig {
  EncoderConfig encoder;
  std::size_t context_hidden = 200;  // per direction; |c| = 2 * context_hidden
  std::size_t heads_hidden = 200;    // per direction, reduced back to |c|
  std::size_t labeler_hidden = 100;
  LabelerOutput labeler_output = LabelerOutput::margin;
  RootTarget root_target = RootTarget::root_vector;
  std::uint64_t seed = 1;

  std::size_t context_size() const { return 2 * context_hidden; }
  void validate() const;
};

// Graph handles for one sentence.
struct EncodedExprs {
  std::vector<nn::Expr> embeddings;
  std::vector<nn::Expr> context;
  std::vector<nn::Expr> latent_heads;
};

// Plain values of the same; all three sequences have the sentence length.
struct EncodedSentence {
  std::vector<std::vector<double>> embeddings;
  std::vector<std::vector<double>> context;
  std::vector<std::vector<double>> latent_heads;

  std::size_t size() const { return context.size(); }
};

struct LabelPosExprs {
  nn::Expr label_scores;
  nn::Expr pos_scores;
  nn::Expr label_logits;  // pre-softmax; equal to scores in margin mode
  nn::Expr pos_logits;
};

struct LabelPosScores {
  std::vector<double> label;
  std::vector<double> pos;
};

// Shared-hidden labeler: tanh hidden layer over [dependent; governor] feeding
// an arc-label head and a POS head.
struct LabelerHead {
  nn::DenseLayer shared_hidden;
  nn::DenseLayer label_output;
  nn::DenseLayer pos_output;
};

class LhrModel {
 public:
  LhrModel(const ModelConfig& cfg, treebank::Vocabularies vocab);
  LhrModel(LhrModel&&) noexcept;
  LhrModel& operator=(LhrModel&&) noexcept;
  ~LhrModel();

  // Context-encoder, heads-encoder and head reduction over one sentence.
  EncodedExprs encode(nn::Graph& g, const treebank::Sentence& sentence, bool training,
                      nn::Rng* dropout_rng) const;
  // Inference-mode encode_sentence.
  EncodedSentence encode_sentence(const treebank::Sentence& sentence) const;

  LabelPosExprs score_label_pos(nn::Graph& g, nn::Expr dependent, nn::Expr governor) const;
  LabelPosScores score_label_pos(std::span<const double> dependent, std::span<const double> governor) const;

  nn::Expr root(nn::Graph& g) const { return g.parameter(*root_vector_); }
  std::span<const double> root_vector() const { return root_vector_->value.data(); }

  const ModelConfig& config() const { return cfg_; }
  const treebank::Vocabularies& vocab() const { return *vocab_; }
  const TokenEncoder& token_encoder() const { return token_encoder_; }
  const nn::BiEncoder& context_encoder() const { return context_encoder_; }
  const nn::BiEncoder& heads_encoder() const { return heads_encoder_; }
  const nn::DenseLayer& head_reducer() const { return head_reducer_; }
  const LabelerHead& labeler() const { return labeler_; }
  nn::ParameterSet& parameters() { return *params_; }
  const nn::ParameterSet& parameters() const { return *params_; }
  std::size_t context_size() const { return cfg_.context_size(); }

  // Copies of every parameter value, in parameter order.
  std::vector<nn::Tensor> snapshot() const;
  void restore(const std::vector<nn::Tensor>& values);

  void save(const std::filesystem::path& path) const;
  static LhrModel load(const std::filesystem::path& path);

 private:
  ModelConfig cfg_;
  std::unique_ptr<treebank::Vocabularies> vocab_;
  std::unique_ptr<nn::ParameterSet> params_;
  TokenEncoder token_encoder_;
  nn::BiEncoder context_encoder_;
  nn::BiEncoder heads_encoder_;
  nn::DenseLayer head_reducer_;
  nn::Parameter* root_vector_ = nullptr;
  LabelerHead labeler_;
};

// Latent syntactic structure: [c_i; h_i] per token.
std::vector<std::vector<double>> latent_structure(const EncodedSentence& enc);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace lhr::model

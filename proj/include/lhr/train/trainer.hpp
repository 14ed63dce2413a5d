#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "lhr/eval/eval.hpp"
#include "lhr/model/lhr_model.hpp"
#include "lhr/nn/adam.hpp"
#include "lhr/nn/graph.hpp"
#include "lhr/treebank/conll.hpp"

namespace lhr::train {

enum class HeadLoss { mse, mae };

HeadLoss parse_head_loss(std::string_view name);  // "mse" | "mae"
std::string_view head_loss_name(HeadLoss v);

struct TrainConfig {
  std::size_t epochs = 30;
  nn::AdamConfig adam;  // 0.001 / 0.9 / 0.999
  HeadLoss loss = HeadLoss::mse;
  model::LabelerOutput labeler_loss = model::LabelerOutput::margin;  // must match the model
  bool skip_punctuation_heads = false;
  double labeler_weight = 1.0;  // 0 disables the labeler objective
  bool target_gradient = false;  // let the head loss back-propagate into its targets
  bool word_dropout = true;
  bool allow_partial_trees = false;  // train on sentences with unannotated heads
  std::uint64_t shuffle_seed = 1;
  std::size_t dev_eval_every = 1;
  bool pos_correction = true;  // used when decoding the dev set
  std::ostream* log = nullptr;

  void validate() const;
};

struct SentenceLoss {
  model::EncodedExprs encoded;
  // Reconstruction target of each token; invalid where the term is skipped.
  std::vector<nn::Expr> targets;
  nn::Expr head;   // mean head loss, invalid when there are no head terms
  nn::Expr label;  // mean labeler loss, invalid when the labeler is off
  nn::Expr total;  // invalid when nothing is trainable in the sentence
  std::size_t head_terms = 0;
  std::size_t label_terms = 0;
};

// Forward pass and loss for one sentence. `dropout_rng` null disables word dropout.
SentenceLoss build_sentence_loss(nn::Graph& g, const model::LhrModel& model,
                                 const treebank::Sentence& sentence, const TrainConfig& cfg,
                                 nn::Rng* dropout_rng);

struct StepLosses {
  double head_loss = 0.0;
  double label_loss = 0.0;
  bool skipped = false;
};

// One forward/backward pass and one Adam update.
StepLosses train_sentence(model::LhrModel& model, const treebank::Sentence& sentence,
                          const TrainConfig& cfg, nn::Rng& rng);

struct EpochRecord {
  std::size_t epoch = 0;
  double head_loss = 0.0;   // mean over trained sentences
  double label_loss = 0.0;
  std::optional<eval::EvalResult> dev;
  bool aborted = false;  // stopped early on a non-finite gradient

  bool operator==(const EpochRecord& o) const;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0 when no dev evaluation happened
  double best_dev_uas = 0.0;

  // Tab-separated, one header line and one row per epoch.
  void write(std::ostream& out) const;
  bool operator==(const TrainReport&) const = default;
};

// Online training; the model ends up holding the best-dev parameters when a
// dev set is given, the final ones otherwise.
TrainReport train(model::LhrModel& model, const treebank::Treebank& train_tb,
                  const treebank::Treebank& dev_tb, const TrainConfig& cfg);

}  // namespace lhr::train

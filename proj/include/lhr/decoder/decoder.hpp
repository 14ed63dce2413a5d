#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lhr/model/lhr_model.hpp"
#include "lhr/tree.hpp"
#include "lhr/treebank/conll.hpp"

namespace lhr::decoder {

// Cosine similarities between latent heads and candidate governors.
// Tokens are 0-based here; sim(i, j) compares h_i with c_j and is undefined
// on the diagonal. root_sim[i] compares h_i with the root reference.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(std::size_t n) : n_(n), sim_(n * n, 0.0), root_sim_(n, 0.0) {}

  std::size_t size() const { return n_; }
  double sim(std::size_t i, std::size_t j) const { return sim_[i * n_ + j]; }
  double& sim(std::size_t i, std::size_t j) { return sim_[i * n_ + j]; }
  double root_sim(std::size_t i) const { return root_sim_[i]; }
  double& root_sim(std::size_t i) { return root_sim_[i]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> sim_;
  std::vector<double> root_sim_;
};

// With RootTarget::self the root reference of token i is its own context vector.
ScoreMatrix build_scores(const model::EncodedSentence& enc, std::span<const double> root_vector,
                         model::RootTarget root_target = model::RootTarget::root_vector);

// Token (1-based) whose latent head is closest to the root; lowest index on ties.
int select_root(const ScoreMatrix& scores);

// heads[root] = 0; every other token takes argmax_{j != i} sim(i, j).
// Labels and POS are left empty.
DependencyTree assign_heads(const ScoreMatrix& scores, int root_token);

// Breaks cycles one at a time: the cycle through the lowest-numbered token is
// handled first, its lowest-scoring arc (lowest dependent on ties) is removed
// and the dependent is reattached to the best-scoring token that is not one
// of its descendants. The root attachment is never changed.
DependencyTree repair_cycles(DependencyTree tree, const ScoreMatrix& scores);

// Index into `seen_pairs` maximizing label_scores[l] + pos_scores[p]; first
// pair wins ties.
std::size_t choose_label_pos(std::span<const double> label_scores, std::span<const double> pos_scores,
                             std::span<const std::pair<std::size_t, std::size_t>> seen_pairs);

// Fills labels and POS. Without POS correction the sentence's input tags are
// kept as the output POS.
DependencyTree assign_labels_pos(const model::LhrModel& model, const model::EncodedSentence& enc,
                                 DependencyTree tree, const treebank::Sentence& sentence,
                                 bool pos_correction = true);

struct DecodeOptions {
  bool pos_correction = true;
};

DependencyTree parse(const model::LhrModel& model, const treebank::Sentence& sentence,
                     const DecodeOptions& options = {});
std::vector<DependencyTree> parse_all(const model::LhrModel& model, const treebank::Treebank& tb,
                                      const DecodeOptions& options = {});

}  // namespace lhr::decoder

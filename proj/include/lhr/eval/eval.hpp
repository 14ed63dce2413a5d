#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>

#include "lhr/tree.hpp"
#include "lhr/treebank/conll.hpp"

namespace lhr::eval {

struct EvalResult {
  double uas = 0.0;
  double las = 0.0;
  double pos_accuracy = 0.0;
  // Extensions beyond attachment scores.
  double root_accuracy = 0.0;
  std::optional<double> cycle_free_rate;  // only when trees come from the decoder

  std::size_t scored_tokens = 0;
  std::size_t correct_heads = 0;
  std::size_t correct_labeled = 0;
  std::size_t correct_pos = 0;
  std::size_t sentences = 0;
  std::size_t correct_roots = 0;
  std::size_t cycle_free_sentences = 0;
};

// Punctuation tokens and tokens without a gold head are not scored. Scores are
// fractions of scored tokens (0 when nothing is scored).
EvalResult evaluate(const treebank::Treebank& gold, std::span<const DependencyTree> predicted,
                    bool decoder_diagnostics = true);

void print_summary(std::ostream& out, const EvalResult& r);
// key=value lines; fractions printed with full precision.
void write_report(std::ostream& out, const EvalResult& r);

}  // namespace lhr::eval

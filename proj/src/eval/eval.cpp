#include "lhr/eval/eval.hpp"

#include <cstdio>
#include <ostream>
#include <string>

#include "lhr/error.hpp"

namespace lhr::eval {
namespace {

double fraction(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

int root_of(std::span<const int> heads) {
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (heads[i] == 0) return static_cast<int>(i) + 1;
  }
  return 0;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

EvalResult evaluate(const treebank::Treebank& gold, std::span<const DependencyTree> predicted,
                    bool decoder_diagnostics) {
  if (gold.sentences.size() != predicted.size()) {
    throw InvalidInput("evaluate: " + std::to_string(predicted.size()) + " predicted trees for " +
                       std::to_string(gold.sentences.size()) + " gold sentences");
  }
  EvalResult r;
  for (std::size_t s = 0; s < predicted.size(); ++s) {
    const auto& sent = gold.sentences[s];
    const auto& tree = predicted[s];
    if (tree.size() != sent.size() || tree.labels.size() != sent.size() || tree.pos.size() != sent.size()) {
      throw InvalidInput("evaluate: sentence " + std::to_string(s + 1) + " is misaligned");
    }
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const auto& tok = sent.tokens[i];
      if (tok.is_punct || tok.gold_head == treebank::kUnknownHead) continue;
      ++r.scored_tokens;
      const bool head_ok = tree.heads[i] == tok.gold_head;
      r.correct_heads += head_ok;
      r.correct_labeled += head_ok && tree.labels[i] == tok.gold_label;
      r.correct_pos += tree.pos[i] == tok.gold_pos;
    }
    ++r.sentences;
    const int gold_root = root_of(sent.gold_heads());
    r.correct_roots += gold_root != 0 && gold_root == root_of(tree.heads);
    r.cycle_free_sentences += tree.repaired_cycles == 0;
  }
  r.uas = fraction(r.correct_heads, r.scored_tokens);
  r.las = fraction(r.correct_labeled, r.scored_tokens);
  r.pos_accuracy = fraction(r.correct_pos, r.scored_tokens);
  r.root_accuracy = fraction(r.correct_roots, r.sentences);
  if (decoder_diagnostics) r.cycle_free_rate = fraction(r.cycle_free_sentences, r.sentences);
  return r;
}

void print_summary(std::ostream& out, const EvalResult& r) {
  out << "Scored tokens (punctuation excluded): " << r.scored_tokens << " in " << r.sentences << " sentences\n";
  out << "UAS = " << num(100.0 * r.uas) << " %\n";
  out << "LAS = " << num(100.0 * r.las) << " %\n";
  out << "POS = " << num(100.0 * r.pos_accuracy) << " %\n";
  out << "ROOT = " << num(100.0 * r.root_accuracy) << " %  (extension)\n";
  if (r.cycle_free_rate) out << "CYCLE-FREE = " << num(100.0 * *r.cycle_free_rate) << " %  (extension)\n";
}

void write_report(std::ostream& out, const EvalResult& r) {
  char buf[64];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << '=' << buf << '\n';
  };
  kv("uas", r.uas);
  kv("las", r.las);
  kv("pos_accuracy", r.pos_accuracy);
  kv("root_accuracy", r.root_accuracy);
  if (r.cycle_free_rate) kv("cycle_free_rate", *r.cycle_free_rate);
  out << "scored_tokens=" << r.scored_tokens << '\n';
  out << "correct_heads=" << r.correct_heads << '\n';
  out << "correct_labeled=" << r.correct_labeled << '\n';
  out << "correct_pos=" << r.correct_pos << '\n';
  out << "sentences=" << r.sentences << '\n';
}

}  // namespace lhr::eval

#include "lhr/decoder/decoder.hpp"

#include "lhr/error.hpp"
#include "lhr/simd/kernels.hpp"

namespace lhr::decoder {

ScoreMatrix build_scores(const model::EncodedSentence& enc, std::span<const double> root_vector,
                         model::RootTarget root_target) {
  const std::size_t n = enc.size();
  ScoreMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& h = enc.latent_heads[i];
    s.root_sim(i) = simd::cosine_similarity(
        h, root_target == model::RootTarget::self ? std::span<const double>(enc.context[i]) : root_vector);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) s.sim(i, j) = simd::cosine_similarity(h, enc.context[j]);
    }
  }
  return s;
}

int select_root(const ScoreMatrix& scores) {
  if (scores.size() == 0) throw InvalidInput("select_root: empty sentence");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores.root_sim(i) > scores.root_sim(best)) best = i;
  }
  return static_cast<int>(best) + 1;
}

DependencyTree assign_heads(const ScoreMatrix& scores, int root_token) {
  const std::size_t n = scores.size();
  if (root_token < 1 || root_token > static_cast<int>(n)) throw InvalidInput("assign_heads: root token out of range");
  DependencyTree t;
  t.heads.assign(n, 0);
  t.arc_scores.assign(n, 0.0);
  const auto root = static_cast<std::size_t>(root_token - 1);
  t.arc_scores[root] = scores.root_sim(root);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == root) continue;
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && (best == n || scores.sim(i, j) > scores.sim(i, best))) best = j;
    }
    t.heads[i] = static_cast<int>(best) + 1;
    t.arc_scores[i] = scores.sim(i, best);
  }
  return t;
}

namespace {

// True if `ancestor` lies on the head path from `node` (1-based).
bool reaches(const std::vector<int>& heads, int node, int ancestor) {
  const std::size_t n = heads.size();
  for (std::size_t steps = 0; node >= 1 && steps <= n; ++steps) {
    if (node == ancestor) return true;
    node = heads[node - 1];
  }
  return false;
}

}  // namespace

DependencyTree repair_cycles(DependencyTree tree, const ScoreMatrix& scores) {
  const std::size_t n = tree.size();
  if (scores.size() != n) throw InvalidInput("repair_cycles: score matrix does not match the tree");
  int root_token = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.heads[i] == 0) root_token = static_cast<int>(i) + 1;
  }
  // each pass removes one cycle without creating another
  for (auto cycle = find_cycle(tree.heads); !cycle.empty(); cycle = find_cycle(tree.heads)) {
    int weakest = cycle.front();
    for (int v : cycle) {
      const double s = tree.arc_scores[v - 1];
      const double w = tree.arc_scores[weakest - 1];
      if (s < w || (s == w && v < weakest)) weakest = v;
    }
    const std::size_t d = static_cast<std::size_t>(weakest - 1);
    tree.heads[d] = -1;
    int best = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const int cand = static_cast<int>(j) + 1;
      if (j == d || reaches(tree.heads, cand, weakest)) continue;
      if (best == 0 || scores.sim(d, j) > scores.sim(d, static_cast<std::size_t>(best - 1))) best = cand;
    }
    if (best == 0) best = root_token;  // unreachable while a root token exists
    tree.heads[d] = best;
    tree.arc_scores[d] = scores.sim(d, static_cast<std::size_t>(best - 1));
    ++tree.repaired_cycles;
  }
  return tree;
}

std::size_t choose_label_pos(std::span<const double> label_scores, std::span<const double> pos_scores,
                             std::span<const std::pair<std::size_t, std::size_t>> seen_pairs) {
  if (seen_pairs.empty()) throw ConfigError("no label/POS pairs were seen in training");
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t k = 0; k < seen_pairs.size(); ++k) {
    const auto [l, p] = seen_pairs[k];
    if (l >= label_scores.size() || p >= pos_scores.size()) throw ConfigError("seen pair outside the label/POS sets");
    const double s = label_scores[l] + pos_scores[p];
    if (k == 0 || s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

DependencyTree assign_labels_pos(const model::LhrModel& model, const model::EncodedSentence& enc,
                                 DependencyTree tree, const treebank::Sentence& sentence, bool pos_correction) {
  const std::size_t n = tree.size();
  if (enc.size() != n || sentence.size() != n) throw InvalidInput("assign_labels_pos: size mismatch");
  const auto& vocab = model.vocab();
  tree.labels.assign(n, {});
  tree.pos.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const int h = tree.heads[i];
    if (h < 0 || h > static_cast<int>(n)) throw InvalidInput("assign_labels_pos: head out of range");
    const auto governor = h == 0 ? model.root_vector() : std::span<const double>(enc.context[h - 1]);
    const auto scores = model.score_label_pos(enc.context[i], governor);
    const auto [label, pos] = vocab.seen_pairs[choose_label_pos(scores.label, scores.pos, vocab.seen_pairs)];
    tree.labels[i] = vocab.labels.symbol(label);
    tree.pos[i] = pos_correction ? vocab.pos.symbol(pos) : sentence.tokens[i].predicted_pos;
  }
  return tree;
}

DependencyTree parse(const model::LhrModel& model, const treebank::Sentence& sentence, const DecodeOptions& options) {
  const auto enc = model.encode_sentence(sentence);
  const auto scores = build_scores(enc, model.root_vector(), model.config().root_target);
  auto tree = assign_heads(scores, select_root(scores));
  tree = repair_cycles(std::move(tree), scores);
  return assign_labels_pos(model, enc, std::move(tree), sentence, options.pos_correction);
}

std::vector<DependencyTree> parse_all(const model::LhrModel& model, const treebank::Treebank& tb,
                                      const DecodeOptions& options) {
  std::vector<DependencyTree> out;
  out.reserve(tb.sentences.size());
  for (const auto& s : tb.sentences) out.push_back(parse(model, s, options));
  return out;
}

}  // namespace lhr::decoder

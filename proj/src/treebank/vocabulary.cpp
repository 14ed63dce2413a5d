#include "lhr/treebank/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "lhr/error.hpp"

namespace lhr::treebank {

Vocabulary::Vocabulary(bool with_unknown) : has_unknown_(with_unknown) {
  if (with_unknown) add(std::string(kUnknown));
}

std::size_t Vocabulary::add(const std::string& symbol) {
  if (auto it = index_.find(symbol); it != index_.end()) return it->second;
  const std::size_t id = symbols_.size();
  symbols_.push_back(symbol);
  index_.emplace(symbol, id);
  return id;
}

std::optional<std::size_t> Vocabulary::find(std::string_view symbol) const {
  if (auto it = index_.find(symbol); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t Vocabulary::lookup(std::string_view symbol) const {
  if (auto id = find(symbol)) return *id;
  if (has_unknown_) return unknown_index();
  throw InvalidInput("symbol not in vocabulary: " + std::string(symbol));
}

std::size_t Vocabularies::word_count(std::string_view lowered) const {
  auto it = word_counts.find(lowered);
  return it == word_counts.end() ? 0 : it->second;
}

std::vector<std::string> utf8_characters(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if ((lead & 0xE0) == 0xC0) len = 2;
    else if ((lead & 0xF0) == 0xE0) len = 3;
    else if ((lead & 0xF8) == 0xF0) len = 4;
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

Vocabularies build_vocabularies(const Treebank& tb, std::size_t min_count) {
  Vocabularies v;
  for (const auto& s : tb.sentences) {
    for (const auto& t : s.tokens) ++v.word_counts[lowercase(t.form)];
  }
  // first-occurrence order keeps indices stable for a given corpus
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& s : tb.sentences) {
    for (const auto& t : s.tokens) {
      const std::string lowered = lowercase(t.form);
      if (v.word_count(lowered) >= min_count) v.words.add(lowered);
      v.input_pos.add(t.predicted_pos);
      for (const auto& ch : utf8_characters(t.form)) v.chars.add(ch);
    }
  }
  for (const auto& l : tb.label_set) v.labels.add(l);
  for (const auto& p : tb.pos_set) v.pos.add(p);
  for (const auto& [label, pos] : tb.seen_label_pos_pairs) {
    pairs.emplace(*v.labels.find(label), *v.pos.find(pos));
  }
  v.seen_pairs.assign(pairs.begin(), pairs.end());
  return v;
}

}  // namespace lhr::treebank

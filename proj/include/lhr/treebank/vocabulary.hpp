#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lhr/treebank/conll.hpp"

namespace lhr::treebank {

// Symbol <-> index table. When built with an unknown symbol it sits at index 0
// and lookup() maps anything unseen there.
class Vocabulary {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  Vocabulary() = default;
  explicit Vocabulary(bool with_unknown);

  std::size_t add(const std::string& symbol);
  std::optional<std::size_t> find(std::string_view symbol) const;
  std::size_t lookup(std::string_view symbol) const;  // throws when absent and no unknown
  const std::string& symbol(std::size_t index) const { return symbols_.at(index); }
  std::size_t size() const { return symbols_.size(); }
  bool has_unknown() const { return has_unknown_; }
  std::size_t unknown_index() const { return 0; }
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, std::size_t, std::less<>> index_;
  bool has_unknown_ = false;
};

struct Vocabularies {
  Vocabulary words{true};      // lowercased forms with count >= min_count
  Vocabulary input_pos{true};  // predicted tags fed to the encoder
  Vocabulary chars{true};      // code points of surface forms
  Vocabulary labels{false};    // gold arc labels
  Vocabulary pos{false};       // gold coarse POS (labeler targets)
  std::vector<std::pair<std::size_t, std::size_t>> seen_pairs;  // (label, pos), sorted
  std::map<std::string, std::size_t, std::less<>> word_counts;  // every lowercased form

  std::size_t word_count(std::string_view lowered) const;
  // Word index with the min_count threshold already applied at build time.
  std::size_t word_index(std::string_view form) const { return words.lookup(lowercase(form)); }
};

Vocabularies build_vocabularies(const Treebank& tb, std::size_t min_count = 1);

// UTF-8 code points of `s` as separate strings; invalid bytes become single-byte symbols.
std::vector<std::string> utf8_characters(std::string_view s);

}  // namespace lhr::treebank

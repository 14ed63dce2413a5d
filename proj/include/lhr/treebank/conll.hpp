#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lhr/tree.hpp"

namespace lhr::treebank {

enum class Format { conllu, conllx };

Format parse_format(std::string_view name);  // "conllu" | "conll-u" | "conllx" | "conll-x"
std::string_view format_name(Format f);

inline constexpr int kUnknownHead = -1;

struct Token {
  int index = 0;
  std::string form;
  std::string gold_pos;       // coarse column (UPOS / CPOSTAG)
  std::string predicted_pos;  // external tagger column; coarse tag when absent
  int gold_head = kUnknownHead;
  std::string gold_label;
  bool is_punct = false;
  std::vector<std::string> columns;  // all ten source columns, for writing back
};

struct Sentence {
  std::vector<Token> tokens;
  // Comment lines, multiword ranges and empty nodes, kept verbatim. The
  // first member is the number of tokens that precede the line.
  std::vector<std::pair<std::size_t, std::string>> extra_lines;

  std::size_t size() const { return tokens.size(); }
  bool fully_annotated() const;
  std::vector<int> gold_heads() const;
};

struct Treebank {
  Format format = Format::conllu;
  std::vector<Sentence> sentences;
  std::vector<std::string> label_set;  // sorted, distinct
  std::vector<std::string> pos_set;    // sorted, distinct gold coarse tags
  std::set<std::pair<std::string, std::string>> seen_label_pos_pairs;
  std::map<std::string, std::size_t> word_frequency;  // lowercased form -> count

  std::size_t token_count() const;
};

struct ReadOptions {
  Format format = Format::conllu;
  // Strict: every sentence must be a single-rooted tree. Permissive: "_" heads
  // are allowed (kUnknownHead) and cycles or multiple roots are tolerated.
  bool strict = true;
  std::set<std::string> punct_tags{"``", "''", ",", ".", ":"};
  std::string punct_label = "punct";
  // 1-based column holding externally predicted tags; 0 disables. A "_" value
  // falls back to the coarse column.
  int predicted_pos_column = 5;
};

// ASCII lowercase; other bytes unchanged.
std::string lowercase(std::string_view s);

Treebank read_conll(const std::filesystem::path& path, const ReadOptions& options);
Treebank parse_conll(std::istream& in, const ReadOptions& options, const std::string& source_name);

// Fills label_set, pos_set, seen pairs and frequencies from the sentences.
void index_treebank(Treebank& tb);

// Emits each sentence with HEAD, DEPREL and the coarse POS column taken from
// the matching tree; every other column and extra line is copied through.
void write_conll(const Treebank& tb, std::span<const DependencyTree> trees, std::ostream& out);
void write_conll(const Treebank& tb, std::span<const DependencyTree> trees,
                 const std::filesystem::path& path);

// Gold analysis of a sentence as a tree (identity copy).
DependencyTree gold_tree(const Sentence& s);
std::vector<DependencyTree> gold_trees(const Treebank& tb);

}  // namespace lhr::treebank

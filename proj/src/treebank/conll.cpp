#include "lhr/treebank/conll.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lhr/error.hpp"

namespace lhr::treebank {
namespace {

constexpr std::size_t kColumns = 10;
constexpr std::size_t kColId = 0, kColForm = 1, kColPos = 3, kColHead = 6, kColLabel = 7;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

class Reader {
 public:
  Reader(const ReadOptions& opt, const std::string& source) : opt_(opt), source_(source) {}

  void line(const std::string& raw, std::size_t lineno) {
    if (is_blank(raw)) {
      flush();
      return;
    }
    if (raw.front() == '#') {
      current_.extra_lines.emplace_back(current_.tokens.size(), raw);
      has_content_ = true;
      return;
    }
    auto cols = split_tabs(raw);
    if (cols.size() != kColumns) fail(lineno, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    const std::string& id = cols[kColId];
    if (id.find_first_of("-.") != std::string::npos) {
      // multiword range or empty node
      current_.extra_lines.emplace_back(current_.tokens.size(), raw);
      has_content_ = true;
      return;
    }
    Token tok;
    if (!parse_int(id, tok.index) || tok.index != static_cast<int>(current_.tokens.size()) + 1) {
      fail(lineno, "token id '" + id + "' is not the next index in the sentence");
    }
    tok.form = cols[kColForm];
    tok.gold_pos = cols[kColPos];
    tok.gold_label = cols[kColLabel];
    const int pcol = opt_.predicted_pos_column;
    if (pcol < 0 || pcol > static_cast<int>(kColumns)) fail(lineno, "invalid predicted POS column");
    tok.predicted_pos = (pcol == 0 || cols[pcol - 1] == "_") ? tok.gold_pos : cols[pcol - 1];
    const std::string& head = cols[kColHead];
    if (head == "_" && !opt_.strict) {
      tok.gold_head = kUnknownHead;
    } else if (!parse_int(head, tok.gold_head) || tok.gold_head < 0) {
      fail(lineno, "malformed head '" + head + "'");
    }
    tok.is_punct = tok.gold_label == opt_.punct_label || opt_.punct_tags.contains(tok.gold_pos);
    tok.columns = std::move(cols);
    current_.tokens.push_back(std::move(tok));
    has_content_ = true;
    last_line_ = lineno;
  }

  void flush() {
    if (!has_content_) return;
    if (current_.tokens.empty()) {
      // block of comments only; keep nothing
      current_ = Sentence{};
      has_content_ = false;
      return;
    }
    validate(current_);
    tb_.sentences.push_back(std::move(current_));
    current_ = Sentence{};
    has_content_ = false;
  }

  Treebank finish(Format f) {
    flush();
    tb_.format = f;
    index_treebank(tb_);
    return std::move(tb_);
  }

 private:
  [[noreturn]] void fail(std::size_t lineno, const std::string& msg) const {
    throw FormatError(source_ + ":" + std::to_string(lineno) + ": " + msg);
  }

  void validate(const Sentence& s) const {
    const std::size_t sid = tb_.sentences.size() + 1;
    const int n = static_cast<int>(s.tokens.size());
    auto where = [&] { return source_ + ": sentence " + std::to_string(sid) + " (ending line " + std::to_string(last_line_) + ")"; };
    for (const Token& t : s.tokens) {
      if (t.gold_head > n) throw FormatError(where() + ": head " + std::to_string(t.gold_head) + " out of range for token " + std::to_string(t.index));
      if (t.gold_head == t.index) throw FormatError(where() + ": token " + std::to_string(t.index) + " is its own head");
    }
    if (opt_.strict && !is_single_rooted_tree(s.gold_heads())) {
      throw FormatError(where() + ": gold heads do not form a single-rooted tree");
    }
  }

  const ReadOptions& opt_;
  const std::string& source_;
  Treebank tb_;
  Sentence current_;
  bool has_content_ = false;
  std::size_t last_line_ = 0;
};

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "conllu" || name == "conll-u") return Format::conllu;
  if (name == "conllx" || name == "conll-x") return Format::conllx;
  throw InvalidInput("unknown treebank format: " + std::string(name));
}

std::string_view format_name(Format f) { return f == Format::conllu ? "conllu" : "conllx"; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool Sentence::fully_annotated() const {
  for (const Token& t : tokens) {
    if (t.gold_head == kUnknownHead) return false;
  }
  return true;
}

std::vector<int> Sentence::gold_heads() const {
  std::vector<int> h;
  h.reserve(tokens.size());
  for (const Token& t : tokens) h.push_back(t.gold_head);
  return h;
}

std::size_t Treebank::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

void index_treebank(Treebank& tb) {
  std::set<std::string> labels, pos;
  tb.seen_label_pos_pairs.clear();
  tb.word_frequency.clear();
  for (const Sentence& s : tb.sentences) {
    for (const Token& t : s.tokens) {
      labels.insert(t.gold_label);
      pos.insert(t.gold_pos);
      tb.seen_label_pos_pairs.emplace(t.gold_label, t.gold_pos);
      ++tb.word_frequency[lowercase(t.form)];
    }
  }
  tb.label_set.assign(labels.begin(), labels.end());
  tb.pos_set.assign(pos.begin(), pos.end());
}

Treebank parse_conll(std::istream& in, const ReadOptions& options, const std::string& source_name) {
  Reader reader(options, source_name);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    reader.line(line, lineno);
  }
  return reader.finish(options.format);
}

Treebank read_conll(const std::filesystem::path& path, const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open treebank file: " + path.string());
  return parse_conll(in, options, path.string());
}

void write_conll(const Treebank& tb, std::span<const DependencyTree> trees, std::ostream& out) {
  if (trees.size() != tb.sentences.size()) {
    throw InvalidInput("write_conll: " + std::to_string(trees.size()) + " trees for " +
                       std::to_string(tb.sentences.size()) + " sentences");
  }
  for (std::size_t s = 0; s < trees.size(); ++s) {
    const Sentence& sent = tb.sentences[s];
    const DependencyTree& tree = trees[s];
    if (tree.size() != sent.size() || tree.labels.size() != sent.size() || tree.pos.size() != sent.size()) {
      throw InvalidInput("write_conll: tree " + std::to_string(s + 1) + " does not match its sentence length");
    }
    std::size_t extra = 0;
    auto emit_extra = [&](std::size_t before) {
      while (extra < sent.extra_lines.size() && sent.extra_lines[extra].first == before) {
        out << sent.extra_lines[extra].second << '\n';
        ++extra;
      }
    };
    for (std::size_t i = 0; i < sent.size(); ++i) {
      emit_extra(i);
      std::vector<std::string> cols = sent.tokens[i].columns;
      cols.resize(kColumns, "_");
      cols[kColPos] = tree.pos[i];
      cols[kColHead] = tree.heads[i] < 0 ? "_" : std::to_string(tree.heads[i]);
      cols[kColLabel] = tree.labels[i];
      for (std::size_t c = 0; c < kColumns; ++c) out << (c ? "\t" : "") << cols[c];
      out << '\n';
    }
    emit_extra(sent.size());
    out << '\n';
  }
}

void write_conll(const Treebank& tb, std::span<const DependencyTree> trees, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write file: " + path.string());
  write_conll(tb, trees, out);
  if (!out) throw FormatError("write failed: " + path.string());
}

DependencyTree gold_tree(const Sentence& s) {
  DependencyTree t;
  for (const Token& tok : s.tokens) {
    t.heads.push_back(tok.gold_head);
    t.labels.push_back(tok.gold_label);
    t.pos.push_back(tok.gold_pos);
    t.arc_scores.push_back(1.0);
  }
  return t;
}

std::vector<DependencyTree> gold_trees(const Treebank& tb) {
  std::vector<DependencyTree> out;
  out.reserve(tb.sentences.size());
  for (const auto& s : tb.sentences) out.push_back(gold_tree(s));
  return out;
}

}  // namespace lhr::treebank

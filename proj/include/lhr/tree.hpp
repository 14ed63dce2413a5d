#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lhr {

// Decoded analysis of one sentence. Positions are 0-based in the vectors;
// head values follow CoNLL numbering: 0 is the virtual root, k is token k.
struct DependencyTree {
  std::vector<int> heads;
  std::vector<std::string> labels;
  std::vector<std::string> pos;
  std::vector<double> arc_scores;
  // Number of cycles removed while decoding; 0 means the raw argmax was a tree.
  std::size_t repaired_cycles = 0;

  std::size_t size() const { return heads.size(); }
};

// Members of the cycle through the lowest-numbered token that lies on any
// cycle, in head-following order starting from that token; empty if acyclic.
// Heads outside [0, n] or negative values are treated as "no head".
std::vector<int> find_cycle(std::span<const int> heads);

// Exactly one token attached to 0, no self loops, every token reaches 0.
bool is_single_rooted_tree(std::span<const int> heads);

// True if two arcs cross when drawn above the sentence.
bool has_crossing_arcs(std::span<const int> heads);

}  // namespace lhr

#include "lhr/tree.hpp"

#include <algorithm>

namespace lhr {

std::vector<int> find_cycle(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  // 0 unvisited, 1 on current walk, 2 finished
  std::vector<int> state(n + 1, 0);
  int best_start = -1;
  for (int start = 1; start <= n; ++start) {
    if (state[start] != 0) continue;
    std::vector<int> walk;
    int v = start;
    while (v >= 1 && v <= n && state[v] == 0) {
      state[v] = 1;
      walk.push_back(v);
      v = heads[v - 1];
    }
    if (v >= 1 && v <= n && state[v] == 1) {
      // v is on a cycle; its minimum member decides priority
      int lowest = v;
      for (int u = heads[v - 1]; u != v; u = heads[u - 1]) lowest = std::min(lowest, u);
      if (best_start == -1 || lowest < best_start) best_start = lowest;
    }
    for (int u : walk) state[u] = 2;
  }
  if (best_start == -1) return {};
  std::vector<int> cycle{best_start};
  for (int u = heads[best_start - 1]; u != best_start; u = heads[u - 1]) cycle.push_back(u);
  return cycle;
}

bool is_single_rooted_tree(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return false;
  int roots = 0;
  for (int i = 1; i <= n; ++i) {
    const int h = heads[i - 1];
    if (h < 0 || h > n || h == i) return false;
    if (h == 0) ++roots;
  }
  return roots == 1 && find_cycle(heads).empty();
}

bool has_crossing_arcs(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  for (int i = 1; i <= n; ++i) {
    const int hi = heads[i - 1];
    if (hi <= 0) continue;
    const int a = std::min(i, hi), b = std::max(i, hi);
    for (int j = 1; j <= n; ++j) {
      const int hj = heads[j - 1];
      if (hj <= 0) continue;
      const int c = std::min(j, hj), d = std::max(j, hj);
      if (a < c && c < b && b < d) return true;
    }
  }
  return false;
}

}  // namespace lhr

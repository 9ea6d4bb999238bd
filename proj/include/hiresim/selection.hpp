#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace hiresim {

// Indices of the k largest values, ties toward the lower index; returned
// sorted ascending.
inline std::vector<int> top_k(const std::vector<double>& value, int k) {
  const int n = int(value.size());
  if (k < 0 || k > n) throw std::invalid_argument("top_k: k out of range");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    if (value[a] != value[b]) return value[a] > value[b];
    return a < b;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Top-k constrained to include at least one index from every group.
// Enumerates per-group quotas (each >= 1, summing to k); within a group the
// best m values are taken (ties toward lower index).  Among quota splits
// with equal total value the lexicographically smallest index set wins.
inline std::vector<int> constrained_top_k(const std::vector<double>& value,
                                          const std::vector<int>& group,
                                          int n_groups, int k) {
  const int n = int(value.size());
  if (group.size() != value.size())
    throw std::invalid_argument("constrained_top_k: group/value size mismatch");
  if (k < n_groups || k > n)
    throw std::invalid_argument("constrained_top_k: k out of range");

  std::vector<std::vector<int>> by_group(n_groups);
  for (int i = 0; i < n; ++i) {
    if (group[i] < 0 || group[i] >= n_groups)
      throw std::invalid_argument("constrained_top_k: group id out of range");
    by_group[group[i]].push_back(i);
  }
  for (auto& ids : by_group) {
    if (ids.empty())
      throw std::invalid_argument("constrained_top_k: a group has no candidates");
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      if (value[a] != value[b]) return value[a] > value[b];
      return a < b;
    });
  }

  std::vector<int> quota(n_groups, 0), best_set;
  double best_total = 0;
  bool have_best = false;

  auto evaluate = [&]() {
    double total = 0;
    std::vector<int> set;
    set.reserve(k);
    for (int g = 0; g < n_groups; ++g)
      for (int m = 0; m < quota[g]; ++m) {
        total += value[by_group[g][m]];
        set.push_back(by_group[g][m]);
      }
    std::sort(set.begin(), set.end());
    if (!have_best || total > best_total ||
        (total == best_total &&
         std::lexicographical_compare(set.begin(), set.end(), best_set.begin(),
                                      best_set.end()))) {
      have_best = true;
      best_total = total;
      best_set = std::move(set);
    }
  };

  auto recurse = [&](auto&& self, int g, int left) -> void {
    if (g == n_groups - 1) {
      if (left >= 1 && left <= int(by_group[g].size())) {
        quota[g] = left;
        evaluate();
      }
      return;
    }
    const int max_here = std::min(int(by_group[g].size()), left - (n_groups - 1 - g));
    for (int m = 1; m <= max_here; ++m) {
      quota[g] = m;
      self(self, g + 1, left - m);
    }
  };
  recurse(recurse, 0, k);

  if (!have_best)
    throw std::invalid_argument("constrained_top_k: no feasible selection");
  return best_set;
}

}  // namespace hiresim

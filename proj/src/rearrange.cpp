#include "coboundary/rearrange.hpp"
#include "coboundary/errors.hpp"

#include <algorithm>
#include <numeric>

namespace coboundary {

Permutation::Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (std::size_t v : image_) {
    if (v >= image_.size() || seen[v])
      throw precondition_error("permutation image is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> img(n);
  std::iota(img.begin(), img.end(), std::size_t{0});
  return Permutation(std::move(img));
}

Permutation rearrange_zero_sum(const std::vector<Rat>& a) {
  const std::size_t n = a.size();
  Rat total = 0;
  for (const Rat& v : a) total += v;
  if (total != 0)
    throw precondition_error("rearrange_zero_sum: sum is " + to_string(total) + ", not 0");
  if (n == 0) return Permutation();

  Rat bound = 0;
  for (const Rat& v : a) bound = max(bound, abs(v));

  std::vector<bool> used(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);
  order.push_back(0);
  used[0] = true;
  Rat running = a[0];
  for (std::size_t step = 1; step < n; ++step) {
    const int s = sign(running);
    std::size_t pick = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (s == 0 || sign(a[j]) * s <= 0) { pick = j; break; }
    }
    // A zero total guarantees an opposing value among the remainder.
    if (pick == n)
      throw search_exhausted_error("rearrange_zero_sum: no opposing value found");
    used[pick] = true;
    order.push_back(pick);
    running += a[pick];
    if (abs(running) > bound)
      throw search_exhausted_error("rearrange_zero_sum: prefix bound violated");
  }
  return Permutation(std::move(order));
}

namespace {

// Bipartite perfect matching between row entries and columns, entry e usable
// at column j iff |sums[j] + entries[e]| <= target. Kuhn's augmenting paths;
// adjacency in ascending column order for determinism.
bool feasibility_matching(const std::vector<Rat>& entries, const std::vector<Rat>& sums,
                          const Rat& target, std::vector<std::size_t>& entry_to_col) {
  const std::size_t m = entries.size();
  std::vector<std::vector<std::size_t>> adj(m);
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t j = 0; j < m; ++j)
      if (abs(sums[j] + entries[e]) <= target) adj[e].push_back(j);

  constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);
  std::vector<std::size_t> col_to_entry(m, kUnmatched);
  std::vector<bool> visited;

  auto try_augment = [&](auto&& self, std::size_t e) -> bool {
    for (std::size_t j : adj[e]) {
      if (visited[j]) continue;
      visited[j] = true;
      if (col_to_entry[j] == kUnmatched || self(self, col_to_entry[j])) {
        col_to_entry[j] = e;
        return true;
      }
    }
    return false;
  };

  for (std::size_t e = 0; e < m; ++e) {
    visited.assign(m, false);
    if (!try_augment(try_augment, e)) return false;
  }
  entry_to_col.assign(m, kUnmatched);
  for (std::size_t j = 0; j < m; ++j) entry_to_col[col_to_entry[j]] = j;
  return true;
}

} // namespace

MatrixRearrangement rearrange_matrix(const std::vector<std::vector<Rat>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return MatrixRearrangement{};
  const std::size_t m = a[0].size();

  Rat c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != m) throw precondition_error("rearrange_matrix: ragged matrix");
    Rat row_sum = 0;
    for (const Rat& v : a[i]) {
      row_sum += v;
      c = max(c, abs(v));
    }
    if (row_sum != 0)
      throw precondition_error("rearrange_matrix: row " + std::to_string(i) + " sums to " +
                               to_string(row_sum) + ", not 0");
  }

  MatrixRearrangement out;
  out.column_sums.assign(m, Rat(0));
  std::vector<Rat>& sums = out.column_sums;

  for (std::size_t i = 0; i < n; ++i) {
    // Tier 0: columns sorted by current sum ascending receive the row's
    // entries sorted descending; keeps |sums| <= C when it applies.
    std::vector<std::size_t> cols(m), ents(m);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    std::iota(ents.begin(), ents.end(), std::size_t{0});
    std::stable_sort(cols.begin(), cols.end(),
                     [&](std::size_t x, std::size_t y) { return sums[x] < sums[y]; });
    std::stable_sort(ents.begin(), ents.end(),
                     [&](std::size_t x, std::size_t y) { return a[i][x] > a[i][y]; });

    std::vector<std::size_t> col_of_entry(m);
    bool ok = true;
    for (std::size_t k = 0; k < m; ++k) {
      if (abs(sums[cols[k]] + a[i][ents[k]]) > c) { ok = false; break; }
      col_of_entry[ents[k]] = cols[k];
    }

    if (!ok) {
      // Tier 1..5: bipartite feasibility at target C, then stepwise
      // relaxation C, 5C/4, 3C/2, 7C/4, 2C.
      int tier = 1;
      bool matched = false;
      for (; tier <= 5; ++tier) {
        Rat target = c + c * Rat(tier - 1, 4);
        if (feasibility_matching(a[i], sums, target, col_of_entry)) {
          matched = true;
          break;
        }
      }
      if (!matched)
        throw search_exhausted_error("rearrange_matrix: no assignment within 2C at row " +
                                     std::to_string(i));
      out.max_tier = std::max(out.max_tier, tier);
    }

    // sigma_i(j) = entry index assigned to column j.
    std::vector<std::size_t> sigma(m);
    for (std::size_t e = 0; e < m; ++e) sigma[col_of_entry[e]] = e;
    for (std::size_t j = 0; j < m; ++j) sums[j] += a[i][sigma[j]];
    out.rows.emplace_back(std::move(sigma));
  }

  // Postcondition: re-run all running column sums against 2C.
  std::vector<Rat> check(m, Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      check[j] += a[i][out.rows[i][j]];
      if (abs(check[j]) > 2 * c)
        throw search_exhausted_error("rearrange_matrix: 2C bound violated at row " +
                                     std::to_string(i) + ", column " + std::to_string(j));
    }
  return out;
}

} // namespace coboundary

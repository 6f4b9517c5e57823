#include "moyal/jet.hpp"

#include <mutex>

namespace moyal {

namespace {

void enumerate(int n, int total, MultiIndex& cur, int pos, int remaining, bool exact,
               std::vector<MultiIndex>& out) {
  if (pos == n) {
    if (!exact || remaining == 0) out.push_back(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur[pos] = k;
    enumerate(n, total, cur, pos + 1, remaining - k, exact, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_degree(int n, int total) {
  std::vector<MultiIndex> out;
  MultiIndex cur(n, 0);
  if (n == 0) {
    if (total == 0) out.push_back(cur);
    return out;
  }
  enumerate(n, total, cur, 0, total, true, out);
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(int n, int total) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= total; ++k) {
    auto d = multi_indices_of_degree(n, k);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

int order_of(const MultiIndex& m) {
  int s = 0;
  for (int k : m) s += k;
  return s;
}

LayoutPtr JetLayout::make(std::vector<VarGroup> groups, std::vector<int> conj_perm) {
  static std::mutex mu;
  static std::map<std::pair<std::vector<std::pair<int, int>>, std::vector<int>>, LayoutPtr> cache;
  int n = 0;
  std::vector<std::pair<int, int>> key;
  for (const auto& g : groups) {
    if (g.vars < 0 || g.order < 0) throw ShapeError("JetLayout: negative group size or order");
    n += g.vars;
    key.emplace_back(g.vars, g.order);
  }
  if (conj_perm.empty()) {
    conj_perm.resize(n);
    for (int i = 0; i < n; ++i) conj_perm[i] = i;
  }
  if (static_cast<int>(conj_perm.size()) != n) throw ShapeError("JetLayout: conj_perm size mismatch");
  std::lock_guard<std::mutex> lock(mu);
  auto k = std::make_pair(key, conj_perm);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  LayoutPtr p(new JetLayout(std::move(groups), std::move(conj_perm)));
  cache.emplace(k, p);
  return p;
}

JetLayout::JetLayout(std::vector<VarGroup> groups, std::vector<int> conj_perm)
    : groups_(std::move(groups)), conj_perm_(std::move(conj_perm)) {
  for (const auto& g : groups_) {
    offsets_.push_back(vars_);
    vars_ += g.vars;
    max_order_ += g.order;
  }
  // mixed-radix product of per-group monomial lists; index 0 is the constant
  const int ng = static_cast<int>(groups_.size());
  std::vector<std::vector<MultiIndex>> local(ng);
  std::vector<std::vector<std::vector<std::pair<int, int>>>> local_prod(ng);
  std::vector<int> stride(ng, 1);
  for (int g = 0; g < ng; ++g) {
    local[g] = multi_indices_up_to(groups_[g].vars, groups_[g].order);
    std::map<MultiIndex, int> idx;
    for (int i = 0; i < static_cast<int>(local[g].size()); ++i) idx[local[g][i]] = i;
    local_prod[g].resize(local[g].size());
    MultiIndex sum(groups_[g].vars);
    for (int i = 0; i < static_cast<int>(local[g].size()); ++i)
      for (int j = 0; j < static_cast<int>(local[g].size()); ++j) {
        for (int v = 0; v < groups_[g].vars; ++v) sum[v] = local[g][i][v] + local[g][j][v];
        auto it = idx.find(sum);
        if (it != idx.end()) local_prod[g][i].emplace_back(j, it->second);
      }
  }
  int total = 1;
  for (int g = ng - 1; g >= 0; --g) {
    stride[g] = total;
    total *= static_cast<int>(local[g].size());
  }
  monomials_.resize(total);
  std::vector<std::vector<int>> digits(total, std::vector<int>(ng));
  for (int i = 0; i < total; ++i) {
    int rem = i;
    MultiIndex m;
    for (int g = 0; g < ng; ++g) {
      int d = rem / stride[g];
      rem %= stride[g];
      digits[i][g] = d;
      m.insert(m.end(), local[g][d].begin(), local[g][d].end());
    }
    monomials_[i] = std::move(m);
    index_[monomials_[i]] = i;
  }

  products_.resize(total);
  for (int i = 0; i < total; ++i) {
    std::vector<std::pair<int, int>> acc{{0, 0}};
    for (int g = 0; g < ng; ++g) {
      std::vector<std::pair<int, int>> next;
      const auto& lp = local_prod[g][digits[i][g]];
      next.reserve(acc.size() * lp.size());
      for (const auto& [j, k] : acc)
        for (const auto& [lj, lk] : lp) next.emplace_back(j + lj * stride[g], k + lk * stride[g]);
      acc = std::move(next);
    }
    products_[i] = std::move(acc);
  }

  conj_index_.resize(total);
  MultiIndex img(vars_);
  for (int i = 0; i < total; ++i) {
    for (int v = 0; v < vars_; ++v) img[conj_perm_[v]] = monomials_[i][v];
    int k = index_of(img);
    if (k < 0) throw ShapeError("JetLayout: conj_perm does not preserve the truncation");
    conj_index_[i] = k;
  }

  fact_.resize(total);
  for (int i = 0; i < total; ++i) {
    double f = 1;
    for (int k : monomials_[i]) f *= factorial(k);
    fact_[i] = f;
  }
}

int JetLayout::index_of(const MultiIndex& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace moyal

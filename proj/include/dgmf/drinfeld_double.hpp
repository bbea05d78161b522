#pragma once

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "dgmf/char_table.hpp"
#include "dgmf/common.hpp"
#include "dgmf/cyclotomic.hpp"
#include "dgmf/group.hpp"

namespace dgmf {

/// Irreducible label: a conjugacy class together with an irreducible
/// character of the centralizer of its representative. The dimension is
/// |class| * degree.
struct DoubleLabel {
  int class_index = 0;
  int irrep_row = 0;
  int dim = 1;
};

/// Everything about the quantum double algebra of a finite group G that the
/// engine needs: its basis (g, h) with product
///   (g,h)*(g',h') = [h = g' h' g'^-1] (g g', h'),
/// its irreducible labels, their characters
///   chi_(c,pi)(g,h) = [h in c][gh = hg] chi_pi(s^-1 g s),  s rep(c) s^-1 = h,
/// duals, and fusion coefficients. The vacuum (identity class, trivial
/// character) is label 0. All character values live in Q(zeta_exponent).
class DoubleData {
 public:
  explicit DoubleData(FiniteGroup g) : G_(std::move(g)), cc_(conjugacy_data(G_)) {
    conductor_ = G_.exponent;
    const int k = static_cast<int>(cc_.classes.size());
    cents_.reserve(k);
    cent_ccs_.reserve(k);
    cent_tables_.reserve(k);
    for (int c = 0; c < k; ++c) {
      cents_.push_back(make_subgroup(G_, cc_.centralizer[c]));
      cent_ccs_.push_back(conjugacy_data(cents_.back().group));
      cent_tables_.push_back(&character_table(cents_.back().group, cent_ccs_.back(), conductor_));
    }
    label_start_.assign(k + 1, 0);
    for (int c = 0; c < k; ++c) {
      label_start_[c + 1] = label_start_[c] + cent_tables_[c]->num_classes;
      for (int r = 0; r < cent_tables_[c]->num_classes; ++r) {
        DoubleLabel l;
        l.class_index = c;
        l.irrep_row = r;
        l.dim = static_cast<int>(cc_.classes[c].size()) * cent_tables_[c]->degrees[r];
        labels_.push_back(l);
      }
    }
    BigInt sumsq = 0;
    for (const auto& l : labels_) sumsq += BigInt(l.dim) * l.dim;
    check(sumsq == BigInt(G_.order) * G_.order,
          "sum of squared label dimensions must equal |G|^2");
    build_pairs();
    build_duals();
  }

  const FiniteGroup& group() const { return G_; }
  const ConjClassInfo& classes() const { return cc_; }
  int conductor() const { return conductor_; }
  const std::vector<DoubleLabel>& labels() const { return labels_; }
  int label_count() const { return static_cast<int>(labels_.size()); }
  int vacuum() const { return 0; }
  int dual(int label) const { return duals_[label]; }
  int label_of(int class_index, int irrep_row) const {
    return label_start_[class_index] + irrep_row;
  }
  const Subgroup& centralizer(int class_index) const { return cents_[class_index]; }
  const CharacterTable& centralizer_table(int class_index) const {
    return *cent_tables_[class_index];
  }

  /// Value of the centralizer character behind `label` at a parent-group
  /// element that must centralize the class representative.
  const Cyclo& centralizer_character(int label, int parent_element) const {
    const DoubleLabel& l = labels_[label];
    const Subgroup& s = cents_[l.class_index];
    int sub = s.from_parent[parent_element];
    check(sub >= 0, "element outside the centralizer");
    return cent_tables_[l.class_index]->values[l.irrep_row][cent_ccs_[l.class_index].class_of[sub]];
  }

  /// Character of the label at the basis element (g, h); zero unless h lies
  /// in the label's class and commutes with g.
  Cyclo chi(int label, int g, int h) const {
    const DoubleLabel& l = labels_[label];
    if (cc_.class_of[h] != l.class_index) return Cyclo::zero(conductor_);
    if (!G_.commutes(g, h)) return Cyclo::zero(conductor_);
    const int s = cc_.transporter[h];
    const int u = G_.at(G_.at(G_.inv[s], g), s);
    return centralizer_character(label, u);
  }

  /// All (g, h) with gh = hg, ordered lexicographically. Characters of the
  /// double are supported on these pairs.
  const std::vector<std::pair<int, int>>& commuting_pairs() const { return pairs_; }
  int pair_index(int g, int h) const {
    return pair_index_[static_cast<std::size_t>(g) * G_.order + h];
  }

  const std::vector<Cyclo>& chi_on_pairs(int label) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = chi_pairs_.find(label);
    if (it == chi_pairs_.end()) {
      std::vector<Cyclo> v;
      v.reserve(pairs_.size());
      for (const auto& [g, h] : pairs_) v.push_back(chi(label, g, h));
      it = chi_pairs_.emplace(label, std::move(v)).first;
    }
    return it->second;
  }
  const std::vector<Cyclo>& conj_chi_on_pairs(int label) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = conj_chi_pairs_.find(label);
    if (it == conj_chi_pairs_.end()) {
      std::vector<Cyclo> v;
      v.reserve(pairs_.size());
      for (const auto& [g, h] : pairs_) v.push_back(chi(label, g, h).conj());
      it = conj_chi_pairs_.emplace(label, std::move(v)).first;
    }
    return it->second;
  }

  /// Character of the tensor product of two labels on the commuting pairs,
  /// via the coproduct: (chi_l * chi_m)(g, h) = sum_{h1 h2 = h} chi_l(g,h1) chi_m(g,h2).
  std::vector<Cyclo> product_char_on_pairs(int l, int m) const {
    const auto& xl = chi_on_pairs(l);
    const auto& xm = chi_on_pairs(m);
    const int cl = labels_[l].class_index;
    std::vector<Cyclo> out;
    out.reserve(pairs_.size());
    for (const auto& [g, h] : pairs_) {
      Cyclo acc(conductor_);
      for (int h1 : cc_.classes[cl]) {
        if (!G_.commutes(g, h1)) continue;
        const int h2 = G_.at(G_.inv[h1], h);
        // g commutes with h and h1, hence with h2; chi_m filters the class
        const int i2 = pair_index(g, h2);
        if (i2 < 0) continue;
        const Cyclo& b = xm[static_cast<std::size_t>(i2)];
        if (b.is_zero()) continue;
        acc += xl[static_cast<std::size_t>(pair_index(g, h1))] * b;
      }
      out.push_back(std::move(acc));
    }
    return out;
  }

  /// Fusion coefficients N_{lm}^n as multiplicities of each label in l (x) m.
  const std::vector<long long>& fuse(int l, int m) const {
    const auto key = std::make_pair(l < m ? l : m, l < m ? m : l);  // symmetric
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = fusion_rows_.find(key);
      if (it != fusion_rows_.end()) return it->second;
    }
    std::vector<Cyclo> prod = product_char_on_pairs(key.first, key.second);
    std::vector<long long> row(labels_.size(), 0);
    long long weighted = 0;
    for (int n = 0; n < label_count(); ++n) {
      const auto& xn = conj_chi_on_pairs(n);
      Cyclo acc(conductor_);
      for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (xn[i].is_zero() || prod[i].is_zero()) continue;
        acc += prod[i] * xn[i];
      }
      BigInt v = (acc * Rational(1, G_.order)).as_integer();
      check(v >= 0, "fusion coefficient must be non-negative");
      row[n] = v.get_si();
      weighted += row[n] * labels_[n].dim;
    }
    check(weighted == static_cast<long long>(labels_[key.first].dim) * labels_[key.second].dim,
          "fusion coefficients must preserve total dimension");
    std::lock_guard<std::mutex> lk(mu_);
    return fusion_rows_.emplace(key, std::move(row)).first->second;
  }
  long long fusion(int l, int m, int n) const { return fuse(l, m)[n]; }

  /// Multiplicity of the vacuum: (1/|G|) sum_g chi(g, identity).
  template <class ChiFn>
  BigInt invariants_dimension(ChiFn&& chi_fn) const {
    Cyclo acc(conductor_);
    for (int g = 0; g < G_.order; ++g) acc += chi_fn(g, 0);
    BigInt v = (acc * Rational(1, G_.order)).as_integer();
    check(v >= 0, "invariants dimension must be non-negative");
    return v;
  }

 private:
  void build_pairs() {
    const int N = G_.order;
    pair_index_.assign(static_cast<std::size_t>(N) * N, -1);
    for (int g = 0; g < N; ++g)
      for (int h = 0; h < N; ++h)
        if (G_.commutes(g, h)) {
          pair_index_[static_cast<std::size_t>(g) * N + h] = static_cast<int>(pairs_.size());
          pairs_.emplace_back(g, h);
        }
  }

  // dual(l) is the unique m with vacuum multiplicity 1 in l (x) m:
  // (1/|G|) sum_{h in class(l), g in C(h)} chi_l(g,h) chi_m(g,h^-1) = delta.
  void build_duals() {
    const int n = label_count();
    duals_.assign(n, -1);
    for (int l = 0; l < n; ++l) {
      const int cl = labels_[l].class_index;
      for (int m = 0; m < n; ++m) {
        if (labels_[m].dim != labels_[l].dim) continue;
        Cyclo acc(conductor_);
        for (int h : cc_.classes[cl])
          for (int g = 0; g < G_.order; ++g) {
            if (!G_.commutes(g, h)) continue;
            Cyclo b = chi(m, g, G_.inv[h]);
            if (b.is_zero()) continue;
            acc += chi(l, g, h) * b;
          }
        BigInt v = (acc * Rational(1, G_.order)).as_integer();
        check(v == 0 || v == 1, "vacuum multiplicity in a product of irreducibles must be 0/1");
        if (v == 1) {
          check(duals_[l] < 0, "dual label is not unique");
          duals_[l] = m;
        }
      }
      check(duals_[l] >= 0, "dual label not found");
    }
    check(duals_[0] == 0, "vacuum must be self-dual");
    for (int l = 0; l < n; ++l) {
      check(duals_[duals_[l]] == l, "duality must be an involution");
      check(labels_[duals_[l]].dim == labels_[l].dim, "dual labels must share dimension");
    }
  }

  FiniteGroup G_;
  ConjClassInfo cc_;
  int conductor_ = 1;
  std::vector<Subgroup> cents_;
  std::vector<ConjClassInfo> cent_ccs_;
  std::vector<const CharacterTable*> cent_tables_;
  std::vector<DoubleLabel> labels_;
  std::vector<int> label_start_;
  std::vector<int> duals_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> pair_index_;
  mutable std::mutex mu_;
  mutable std::map<int, std::vector<Cyclo>> chi_pairs_;
  mutable std::map<int, std::vector<Cyclo>> conj_chi_pairs_;
  mutable std::map<std::pair<int, int>, std::vector<long long>> fusion_rows_;
};

// ---- elements of the double as a *-algebra ---------------------------------

/// Sparse element: canonical ordered map from basis pairs (g, h) to exact
/// coefficients. Zero coefficients are pruned.
using DoubleElement = std::map<std::pair<int, int>, Cyclo>;

inline DoubleElement double_basis(int conductor, int g, int h) {
  DoubleElement e;
  e[{g, h}] = Cyclo::one(conductor);
  return e;
}

/// Identity: sum over h of (identity, h).
inline DoubleElement double_unit(const FiniteGroup& G, int conductor) {
  DoubleElement e;
  for (int h = 0; h < G.order; ++h) e[{0, h}] = Cyclo::one(conductor);
  return e;
}

inline void double_prune(DoubleElement& a) {
  for (auto it = a.begin(); it != a.end();)
    it = it->second.is_zero() ? a.erase(it) : std::next(it);
}

inline DoubleElement double_product(const FiniteGroup& G, const DoubleElement& a,
                                    const DoubleElement& b) {
  DoubleElement out;
  for (const auto& [xa, ca] : a)
    for (const auto& [xb, cb] : b) {
      const auto [g1, h1] = xa;
      const auto [g2, h2] = xb;
      if (h1 != G.conjugate(g2, h2)) continue;
      const auto key = std::make_pair(G.at(g1, g2), h2);
      auto it = out.find(key);
      if (it == out.end())
        out.emplace(key, ca * cb);
      else
        it->second += ca * cb;
    }
  double_prune(out);
  return out;
}

inline DoubleElement double_sum(const DoubleElement& a, const DoubleElement& b) {
  DoubleElement out = a;
  for (const auto& [k, v] : b) {
    auto it = out.find(k);
    if (it == out.end())
      out.emplace(k, v);
    else
      it->second += v;
  }
  double_prune(out);
  return out;
}

}  // namespace dgmf

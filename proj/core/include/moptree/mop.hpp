#pragma once

#include "moptree/roots.hpp"
#include "moptree/systems.hpp"

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace moptree {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> n);
  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(d, 0)); }
  static MultiIndex ones(int d) { return MultiIndex(std::vector<int>(d, 1)); }
  static MultiIndex unit(int d, int j);

  int d() const { return static_cast<int>(n_.size()); }
  int total() const;
  int operator[](int j) const { return n_[j]; }
  const std::vector<int>& components() const { return n_; }

  MultiIndex plus(int j) const;
  bool can_minus(int j) const { return n_[j] > 0; }
  // Throws when the component is already zero.
  MultiIndex minus(int j) const;
  bool all_positive() const;
  // Componentwise <=.
  bool within(const MultiIndex& bound) const;

  std::string str() const;  // "(1,2)"
  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> n_;
};

// "3,2" or "(3,2)".
MultiIndex parse_multi_index(const std::string& text);

// All indices in the box [0, bound], lexicographic order.
std::vector<MultiIndex> box_indices(const MultiIndex& bound);

template <class T>
struct TypeII {
  MultiIndex index;
  Poly<T> P;                   // monic, degree |n|
  std::vector<Poly<T>> assoc;  // P^(j), degree |n| - 1
};

template <class T>
struct TypeI {
  MultiIndex index;
  std::vector<Poly<T>> A;  // A^(j), zero polynomial when n_j = 0
  Poly<T> A0;              // associated polynomial
};

// int p dmu_j from the moment table.
template <class T>
T integrate(const MomentTable<T>& mt, int j, const Poly<T>& p);

// int (p(z) - p(x)) / (z - x) dmu_j(x) as a polynomial in z.
template <class T>
Poly<T> associated(const MomentTable<T>& mt, int j, const Poly<T>& p);

// Memoized type I / type II families of one system, keyed by multi-index.
// Lookups take a shared lock; new entries are inserted under the exclusive
// lock, and returned references stay valid for the family's lifetime.
template <class T>
class Family {
 public:
  explicit Family(std::shared_ptr<const MomentTable<T>> mt);

  const MomentTable<T>& moments() const { return *mt_; }
  std::shared_ptr<const MomentTable<T>> moments_ptr() const { return mt_; }
  int d() const { return mt_->d(); }

  const TypeII<T>& type2(const MultiIndex& n) const;
  // Throws InvalidConfig for the zero index (no type I form exists there).
  const TypeI<T>& type1(const MultiIndex& n) const;

 private:
  TypeII<T> solve_type2(const MultiIndex& n) const;
  TypeI<T> solve_type1(const MultiIndex& n) const;

  std::shared_ptr<const MomentTable<T>> mt_;
  mutable std::shared_mutex mutex_;
  mutable std::map<MultiIndex, std::unique_ptr<TypeII<T>>> type2_;
  mutable std::map<MultiIndex, std::unique_ptr<TypeI<T>>> type1_;
};

template <class T>
std::shared_ptr<Family<T>> make_family(const SystemSpec& sys) {
  return std::make_shared<Family<T>>(std::make_shared<MomentTable<T>>(sys));
}

// Max |int P x^l dmu_j| over the defining conditions of type II.
template <class T>
T type2_residual(const Family<T>& fam, const MultiIndex& n);
// Max deviation of the type I conditions, including the normalization.
template <class T>
T type1_residual(const Family<T>& fam, const MultiIndex& n);

struct NormalityReport {
  bool normal = false;
  int degP = -1;
  int detSign = 0;
};

template <class T>
NormalityReport normality_report(const MomentTable<T>& mt, const MultiIndex& n);
// Same check from raw moment rows moments[j][l]; accepts systems that would not
// validate (repeated measures and the like).
template <class T>
NormalityReport normality_report(const std::vector<std::vector<T>>& moments, const MultiIndex& n);

// Zeros of P_n on each interval (n_j of them on Delta_j).
template <class T>
std::vector<std::vector<RootBracket<T>>> type2_zeros(const Family<T>& fam, const MultiIndex& n);
// Zeros of A_n^(j) on Delta_j (n_j - 1 of them).
template <class T>
std::vector<RootBracket<T>> type1_zeros(const Family<T>& fam, const MultiIndex& n, int j);

struct SecondKindValues {
  std::vector<Complex<BigFloat>> R;  // R^(j) = P mu_j^ - P^(j)
  Complex<BigFloat> L;               // sum A^(j) mu_j^ - A^(0)
};

template <class T>
SecondKindValues second_kind(const Family<T>& fam, const MultiIndex& n, const Complex<BigFloat>& z);

// L_n(z) split into its polynomial parts, L = sum_j coef[j] mu_j^ - coef0.
// Exact when T and z are exact; used by the identity suites.
template <class T>
struct FormParts {
  std::vector<Complex<T>> coef;
  Complex<T> coef0;
};

template <class T>
FormParts<T> form_parts(const Family<T>& fam, const MultiIndex& n, const Complex<T>& z);

}  // namespace moptree

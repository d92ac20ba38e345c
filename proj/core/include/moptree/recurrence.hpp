#pragma once

#include "moptree/mop.hpp"

#include <array>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

namespace moptree {

enum class Provenance { por_formula, coefficient_match, propagated, constant };
const char* provenance_name(Provenance p);

// Anything that can answer a_{n,j} and b_{n,j} (j 0-based). a_{n,j} = 0 when
// n_j = 0.
template <class T>
class CoefficientProvider {
 public:
  virtual ~CoefficientProvider() = default;
  virtual int d() const = 0;
  virtual T a(const MultiIndex& n, int j) const = 0;
  virtual T b(const MultiIndex& n, int j) const = 0;
  virtual Provenance provenance() const = 0;
};

template <class T>
struct CoefficientRoutes {
  T a_por{0};    // from the ratio of orthogonality integrals
  T b_por{0};    // from type I moments of neighboring indices
  T a_match{0};  // from matching coefficients in the type II recurrence
  T b_match{0};
};

// Coefficients from the moment-solved families, each computed by two
// independent routes. Disagreement beyond the tolerance (exact equality on
// rationals) raises ProvenanceMismatch.
//
// b indexing: the type I formula naturally produces b_{n-e_j,j}; the table is
// keyed by the lower index, so b(n, j) = int x^{|n|+1} Q_{n+e_j} - int x^{|n|} Q_n
// with the second term read as 0 at n = 0.
template <class T>
class RecurrenceTable : public CoefficientProvider<T> {
 public:
  explicit RecurrenceTable(std::shared_ptr<const Family<T>> fam, T tolerance = T(-1));

  const Family<T>& family() const { return *fam_; }
  std::shared_ptr<const Family<T>> family_ptr() const { return fam_; }
  int d() const override { return fam_->d(); }
  T a(const MultiIndex& n, int j) const override { return routes(n, j).a_por; }
  T b(const MultiIndex& n, int j) const override { return routes(n, j).b_por; }
  Provenance provenance() const override { return Provenance::por_formula; }

  const CoefficientRoutes<T>& routes(const MultiIndex& n, int j) const;
  // Computes every (n, j) with n in the box [0, window].
  void fill(const MultiIndex& window) const;
  // Entries computed so far, ordered by (n, j).
  std::vector<std::pair<std::pair<MultiIndex, int>, CoefficientRoutes<T>>> entries() const;
  const T& tolerance() const { return tol_; }

 private:
  CoefficientRoutes<T> compute(const MultiIndex& n, int j) const;
  T moment_of_form(const MultiIndex& n) const;  // int x^{|n|} Q_n, 0 at n = 0

  std::shared_ptr<const Family<T>> fam_;
  T tol_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<MultiIndex, int>, std::unique_ptr<CoefficientRoutes<T>>> cache_;
};

template <class T>
std::shared_ptr<RecurrenceTable<T>> make_table(const SystemSpec& sys) {
  return std::make_shared<RecurrenceTable<T>>(make_family<T>(sys));
}

// a_j = A_j, b_j = B_j at every index (a = 0 still when n_j = 0).
template <class T>
class ConstantCoefficients : public CoefficientProvider<T> {
 public:
  ConstantCoefficients(std::vector<T> A, std::vector<T> B);
  int d() const override { return static_cast<int>(A_.size()); }
  T a(const MultiIndex& n, int j) const override { return n[j] > 0 ? A_[j] : T(0); }
  T b(const MultiIndex&, int j) const override { return B_[j]; }
  Provenance provenance() const override { return Provenance::constant; }

 private:
  std::vector<T> A_;
  std::vector<T> B_;
};

// Coefficients for every |n| <= max_level obtained from the one-measure
// Jacobi coefficients on the coordinate axes and the consistency relations,
// level by level. Reaches indices far beyond what moment solves can handle.
// Needs bounded measures with polynomial weights (Gauss-Legendre is exact
// for the one-measure Stieltjes procedure then).
template <class T>
class PropagatedCoefficients : public CoefficientProvider<T> {
 public:
  PropagatedCoefficients(const SystemSpec& sys, int max_level);
  int d() const override { return d_; }
  T a(const MultiIndex& n, int j) const override;
  T b(const MultiIndex& n, int j) const override;
  Provenance provenance() const override { return Provenance::propagated; }
  int max_level() const { return max_level_; }

 private:
  struct Cell {
    std::vector<T> a;
    std::vector<T> b;
  };
  const Cell& cell(const MultiIndex& n) const;

  int d_;
  int max_level_;
  std::map<MultiIndex, Cell> cells_;
};

// Monic Jacobi coefficients of one measure: x p_k = p_{k+1} + beta_k p_k +
// alpha_k p_{k-1}, k < count (alpha_0 = 0). Discretized Stieltjes procedure
// on a Gauss-Legendre rule that integrates the needed degree exactly.
template <class T>
void jacobi_coefficients(const MeasureSpec& m, int count, std::vector<T>& alpha, std::vector<T>& beta);

template <class T>
struct IdentityReport {
  bool ok = true;
  int checked = 0;
  T max_residual{0};
  std::vector<std::string> failures;

  void record(const T& residual, const T& threshold, const std::string& what);
};

// Residual polynomials of the type II relations at every n in [0, window] and
// of the form relations (on the A^(m) level, m = 0..d) at n in N^d within the
// window. Float threshold: 2^(-bits/2) relative to the coefficients involved.
template <class T>
IdentityReport<T> verify_recurrences(const RecurrenceTable<T>& table, const MultiIndex& window);

// Residuals of the three consistency relations at (n, i, j), using the
// table's coefficients.
template <class T>
std::array<T, 3> consistency(const CoefficientProvider<T>& c, const MultiIndex& n, int i, int j);

template <class T>
struct BoundsReport {
  bool ok = true;
  bool skipped = false;
  std::string note;
  int checked = 0;
  T a_bound{0};  // max over j of the a bound
  T b_bound{0};
  T max_a{0};
  T max_abs_b{0};
  std::vector<std::string> failures;
};

// Positivity and the explicit bounds on a and b, and b_{n,j} < b_{n,k} for
// j < k, over the box [0, window]. Unbounded (Hermite) systems are skipped
// with a note.
template <class T>
BoundsReport<T> bounds_and_order(const RecurrenceTable<T>& table, const MultiIndex& window);

// Zeros of P_{n+e_j} and P_n interlace, zeros of P_{n+e_k} and P_n
// interlace, and for j < k those of P_{n+e_k} dominate those of P_{n+e_j}.
template <class T>
bool interlacing(const Family<T>& fam, const MultiIndex& n, int j, int k);

// Step-line index i(n): first (n mod d) components m+1, the rest m.
MultiIndex step_line_index(int d, int n);

template <class T>
struct StepLineTable {
  int d = 0;
  std::vector<std::vector<T>> gamma;  // gamma[n][k], k = 0..d
  T max_residual{0};
};

// gamma_{n,k} for n = 0..n_max by triangular coefficient matching; throws
// IdentityViolated when the (d+2)-term relation leaves a nonzero remainder.
template <class T>
StepLineTable<T> step_line(const Family<T>& fam, int n_max);

// Limits of gamma_{md+i,k}, k = 0..d, from the ratio-limit constants at
// c = (1/d, ..., 1/d); B subscripts are cyclic.
std::vector<BigFloat> step_line_limits(const std::vector<BigFloat>& A, const std::vector<BigFloat>& B, int i);

}  // namespace moptree

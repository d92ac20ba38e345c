#pragma once

#include "moptree/linalg.hpp"
#include "moptree/poly.hpp"

#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace moptree {

enum class WeightKind { lebesgue, power_endpoint, polynomial, gaussian };

struct WeightSpec {
  WeightKind kind = WeightKind::lebesgue;
  Rational alpha{0};                // power_endpoint: (x-a)^alpha
  Rational beta{0};                 // power_endpoint: (b-x)^beta
  std::vector<Rational> coeffs;     // polynomial, ascending
  Rational c{0};                    // gaussian: exp(-x^2 + c x)
};

struct MeasureSpec {
  bool whole_line = false;
  Rational lo{0};
  Rational hi{0};
  WeightSpec weight;
};

enum class SystemKind { angelesco, hermite, single };

struct SystemSpec {
  SystemKind kind = SystemKind::angelesco;
  std::vector<MeasureSpec> measures;
  ScalarContext backend;

  int d() const { return static_cast<int>(measures.size()); }
};

struct Geometry {
  bool bounded = true;
  Rational hull_lo{0};  // Delta_max = [hull_lo, hull_hi]
  Rational hull_hi{0};
  std::vector<Rational> gaps;  // g_i between consecutive intervals
  Rational g_min{0};           // 0 when d == 1
  Rational R{0};               // sup |x| over the supports
};

// System definition documents (JSON text); rationals as "p/q" strings.
SystemSpec parse_system(const std::string& json_text);
SystemSpec load_system(const std::string& path);
std::string system_to_json(const SystemSpec& sys);

// Throws OverlappingIntervals, UnorderedIntervals, DuplicateHermiteShift or
// InvalidWeight; returns the geometry constants otherwise.
Geometry validate(const SystemSpec& sys);

// Lebesgue measures on the given intervals (Angelesco kind when d >= 2).
SystemSpec lebesgue_system(const std::vector<std::pair<Rational, Rational>>& intervals);
// Gaussian weights exp(-x^2 + c_j x) on the real line.
SystemSpec hermite_system(const std::vector<Rational>& shifts);

// The weight as a polynomial with rational coefficients when it is one
// (lebesgue, polynomial, power_endpoint with integer exponents).
std::optional<Poly<Rational>> polynomial_weight(const MeasureSpec& m);

// Exact moment when all data are rational and the moment is rational.
std::optional<Rational> exact_moment(const MeasureSpec& m, int l);

BigFloat weight_value(const MeasureSpec& m, const BigFloat& x);

// Lazily grown moment cache. Readers take a shared lock; extension is
// serialized under the exclusive lock.
template <class T>
class MomentTable {
 public:
  explicit MomentTable(SystemSpec sys);

  const SystemSpec& system() const { return sys_; }
  const Geometry& geometry() const { return geom_; }
  int d() const { return sys_.d(); }

  // j is 0-based.
  T moment(int j, int l) const;
  // Copy of m[j][0..l_max].
  std::vector<T> moments(int j, int l_max) const;

 private:
  void extend(int l_max) const;

  SystemSpec sys_;
  Geometry geom_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<std::vector<T>> m_;
};

// mu_j^(z) = int dmu_j(x) / (z - x).
Complex<BigFloat> markov(const SystemSpec& sys, int j, const Complex<BigFloat>& z);

// Boundary value from above (side = +1) or below (side = -1):
// PV int w(t) dt / (x - t) -/+ i pi w(x).
Complex<BigFloat> markov_boundary(const SystemSpec& sys, int j, const BigFloat& x, int side);

template <class T>
struct GammaConstants {
  std::vector<T> gamma;        // from the (d-1)-row systems at 1 - e_j
  std::vector<T> gamma_tilde;  // from the d-row system at (1,...,1)
};

template <class T>
GammaConstants<T> gamma_constants(const MomentTable<T>& mt, const std::vector<T>& kappa);

// Xi = 1 / (mean_2 - mean_1), d = 2.
template <class T>
T xi_constant(const MomentTable<T>& mt);

}  // namespace moptree

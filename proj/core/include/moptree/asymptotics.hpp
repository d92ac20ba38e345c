#pragma once

#include "moptree/recurrence.hpp"

#include <string>
#include <utility>
#include <vector>

namespace moptree {

using Interval = std::pair<BigFloat, BigFloat>;

// z(w) = w + sum A_i / (w - B_i) maps the w-sphere onto the genus-0 surface.
// Critical points w_1 < ... < w_2d of z(w) sit in the pattern w_{2i-1} < B_i < w_{2i}
// and their critical values are the sorted endpoints.
struct SurfaceMap {
  int d = 0;
  std::vector<Interval> endpoints;
  std::vector<BigFloat> A;
  std::vector<BigFloat> B;
  std::vector<BigFloat> critical_points;
  BigFloat residual{0};  // max |z(w_k) - e_k|, |z'(w_k)|
  int iterations = 0;
  int continuation_steps = 0;
  bool pattern_ok = false;
};

// Newton on {A_i, B_i, w_k} started from the single-interval maps
// (A_i = |Delta_i|^2 / 16, B_i = midpoint), with a separation homotopy when a
// direct solve fails. Throws NewtonDiverged.
SurfaceMap solve_surface(const std::vector<Interval>& endpoints);
// Full intervals of a bounded system.
SurfaceMap solve_surface(const SystemSpec& sys);

Complex<BigFloat> surface_z(const SurfaceMap& map, const Complex<BigFloat>& w);
Complex<BigFloat> surface_dz(const SurfaceMap& map, const Complex<BigFloat>& w);

// w = chi(z^(0)): the root of z(w) = z tracked from 10^6 (1 + 0.1i) (mirrored
// for Im z < 0) along the segment to z. Throws BranchTrackingFailed on a cut.
Complex<BigFloat> chi_sheet0(const SurfaceMap& map, const Complex<BigFloat>& z);

// d = 1: (z + (a+b)/2 + sqrt((z-a)(z-b))) / 2 with the root ~ z at infinity.
Complex<BigFloat> chi_interval(const Interval& iv, const Complex<BigFloat>& z);

struct RatioLimit {
  Complex<BigFloat> chi;
  Complex<BigFloat> limit;    // 1 / (chi - B_j), the limit of P_n / P_{n+e_j}
  Complex<BigFloat> upsilon;  // A_j / (chi - B_j)
  Complex<BigFloat> M;        // -upsilon / A_j
};
RatioLimit ratio_limit(const SurfaceMap& map, int j, const Complex<BigFloat>& z);

// max_j |A_j / Y_j + B_j + sum_i Y_i - z| at Y_i = upsilon_i(z^(0)).
BigFloat algebraic_residual(const SurfaceMap& map, const Complex<BigFloat>& z);

struct NevanlinnaSolution {
  Complex<BigFloat> z;
  std::vector<Complex<BigFloat>> M;
  BigFloat residual{0};  // max_j |z - (-1/M_j + B_j - sum A_i M_i)|
  int iterations = 0;
  int restarts = 0;
};

// M_j = (B_j - z - sum A_i M_i)^-1 by damped fixed point (factor 1/2, halved on
// each restart) from M_j = -1/z, then Newton polish. Im z < 0 is answered by
// conjugation. Throws IterationDiverged.
NevanlinnaSolution solve_M_system(const std::vector<BigFloat>& A, const std::vector<BigFloat>& B,
                                  const Complex<BigFloat>& z);

struct ConvergenceStream {
  std::string name;  // "a1", "b2", "ratio1@(2,0)"
  std::vector<BigFloat> errors;  // one per m = 1..m_max
  bool decreasing = false;       // max over the last third < max over the first third, or at rounding level
  double slope = 0;              // -d log err / d log m, fitted over m >= m_max / 2
};

struct ConvergenceRow {
  int m = 0;
  int j = 0;
  BigFloat a_err{0};
  BigFloat b_err{0};
  std::vector<BigFloat> ratio_err;  // per z
};

struct ConvergenceReport {
  bool skipped = false;
  std::string note;
  std::vector<Rational> c;
  std::vector<Complex<BigFloat>> z_grid;
  SurfaceMap map;
  Provenance coefficients = Provenance::propagated;
  std::vector<MultiIndex> indices;
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceStream> streams;
  bool ok = false;  // every stream decreasing
};

// n(m)_i = round(m d c_i). Coefficients come from propagation when the
// weights are polynomial, otherwise from moment solves. Unbounded systems are
// skipped with an UnboundedSystem note.
ConvergenceReport convergence_study(const SystemSpec& sys, const std::vector<Rational>& c, int m_max,
                                    const std::vector<Complex<BigFloat>>& z_grid);

MultiIndex direction_index(const std::vector<Rational>& c, int m);

// {"A":[...],"B":[...],"endpoints":[[lo,hi],...],...}
std::string surface_to_json(const SurfaceMap& map);
// m,j,z_re,z_im,a_err,b_err,ratio_err
std::string convergence_to_csv(const ConvergenceReport& rep);

}  // namespace moptree

#pragma once

#include "moptree/trees.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace moptree {

enum class GreenMethod { direct_solve, polynomial_formula, continued_fraction };
const char* green_method_name(GreenMethod m);

template <class T>
struct GreenValue {
  int Y = 0;
  int X = 0;
  Complex<T> z;
  Complex<T> value;
  GreenMethod method = GreenMethod::direct_solve;
};

// Column X of (K - z)^-1 in the K-form normalization, whatever form op is
// stored in: leaf-first elimination along the tree, O(vertices). Floats
// check the residual and throw NearSpectrum when it is not small.
template <class T>
std::vector<Complex<T>> resolvent_column(const TreeOperator<T>& op, int X, const Complex<T>& z);

// G(Y, X, z) = <(op - z)^-1 e_X, e_Y> in op's own form. Checks the resolvent
// symmetry G(X,Y,z) = conj(G(Y,X,conj z)) (scaled by m_X^2 / m_Y^2 for K-forms).
// Exact symmetrized operators are answered only when m_X / m_Y is rational.
template <class T>
GreenValue<T> green_direct(const TreeOperator<T>& op, int Y, int X, const Complex<T>& z);

// G(Y, O, z) = -p_Y / sum kappa_j P_{N+e_j}(z) on a finite tree, in op's form.
template <class T>
GreenValue<T> green_formula_finite(const Family<T>& fam, const TreeOperator<T>& op, int Y, const Complex<T>& z);

// M_N^(j)(z) = -P_N / P_{N+e_j} by the branching continued fraction:
// M_n^(j) = 1 / (b_{n,j} - z - sum_l a_{n,l} M_{n-e_l}^(l)), one memoized value
// per index (label 1), the other labels from 1/M^(j) = 1/M^(m) + b_{n,j} - b_{n,m}.
template <class T>
GreenValue<T> cf_finite(const CoefficientProvider<T>& c, const MultiIndex& N, int j, const Complex<T>& z);

struct ThetaValues {
  Complex<BigFloat> truncated;
  Complex<BigFloat> formula;
};

// Theta_kappa(z) = sum gt_i mu_i^ / sum g_i mu_i^ with the gamma constants.
Complex<BigFloat> theta_formula(const MomentTable<BigFloat>& mt, const std::vector<BigFloat>& kappa,
                                const Complex<BigFloat>& z);
// d = 2 closed form: Xi (mu1^ |mu2| - mu2^ |mu1|) / (k2 mu1^ |mu2| + k1 mu2^ |mu1|).
Complex<BigFloat> theta_formula_d2(const MomentTable<BigFloat>& mt, const std::vector<BigFloat>& kappa,
                                   const Complex<BigFloat>& z);

// Root entry of the depth-D truncation next to the formula value.
ThetaValues theta_infinite(const RecurrenceTable<BigFloat>& table, const std::vector<BigFloat>& kappa,
                           const Complex<BigFloat>& z, int D);

// G(Y, O, z) = l_Y / sum gamma_j mu_j^(z) on the infinite tree, l_Y = L_{Pi(Y)} / m_Y.
Complex<BigFloat> green_formula_infinite(const RecurrenceTable<BigFloat>& table, const TreeOperator<BigFloat>& op,
                                         int Y, const Complex<BigFloat>& z);

// Branching continued fraction for Theta: seeds Theta_Y = -L_{Pi(Y)} / L_{Pi(parent)}
// at depth D and rolls up with V_Y - 1/Theta_Y - sum W_c Theta_c = z.
Complex<BigFloat> cf_infinite(const RecurrenceTable<BigFloat>& table, const std::vector<BigFloat>& kappa,
                              const Complex<BigFloat>& z, int D);

// Density of the root spectral measure for kappa = (0, 1), d = 2.
BigFloat density_kuk1(const MomentTable<BigFloat>& mt, const BigFloat& x);

// Total mass of density_kuk1 over both intervals (graded Gauss-Legendre).
BigFloat density_mass(const MomentTable<BigFloat>& mt, int order = 20, int levels = 40);

// Density values times quadrature weights on a composite Gauss-Legendre grid
// over both intervals; reused for every smoothing point.
struct DensitySamples {
  std::vector<BigFloat> t;
  std::vector<BigFloat> weighted;
};
DensitySamples sample_density(const MomentTable<BigFloat>& mt, int panels = 64, int order = 12);

// Poisson-smoothed density: sum eps / (pi ((x - t)^2 + eps^2)) weighted(t).
BigFloat smooth_density(const DensitySamples& s, const BigFloat& x, const BigFloat& eps);

template <class T>
struct TkReport {
  std::vector<Poly<T>> T_k;
  bool ok = true;
  int checked = 0;
  BigFloat max_residual{0};
};

// T_0 = 1, T_{k+1} = x T_k + (b_{0,1} - b_{0,2}) A^(2)_{(1,1)} int x T_k dmu_2, and
// the check (J_{e1}^k e_O)(Y) = m_Y^-1 sum_j int T_k A_Y^(j) x dmu_j on a depth-D
// truncation for k <= D - 2 (exactly zero on rationals).
template <class T>
TkReport<T> multiplication_Tk(const RecurrenceTable<T>& table, int k_max, int D);

struct SupportReport {
  bool ok = true;
  int vertices = 0;
  std::vector<BigFloat> eigenvalues;  // atoms with weight above the cutoff, ascending
  std::vector<BigFloat> weights;
  int distinct_support = 0;
  BigFloat weight_sum{0};
  BigFloat max_root_distance{0};
  BigFloat max_transform_error{0};
  std::vector<std::string> failures;
};

// Root spectral measure of J_{e_j,N} (Lanczos from e_O, then a small
// tridiagonal eigenproblem): its atoms must sit on the zeros of P_{N+e_j}, and
// its Stieltjes transform must match -P_N / P_{N+e_j} at five test points.
SupportReport spectral_support_check(const RecurrenceTable<BigFloat>& table, const MultiIndex& N, int j,
                                     const BigFloat& weight_cutoff = BigFloat(1e-25),
                                     const BigFloat& root_tolerance = BigFloat(1e-30));

struct RandomPathReport {
  int steps = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> rates;  // (log 1/m_Y) / n per trial
  double mean = 0;
  double stddev = 0;
  double stderr_mean = 0;
  double target = 0;  // (1/(2d)) sum log A_i
  bool within_3se = false;
  double relative_error = 0;
};

// Uniform random descent from the root of the homogeneous tree; each trial
// seeds its own generator from (seed, trial).
RandomPathReport random_path_stats(const CoefficientProvider<BigFloat>& c, const std::vector<BigFloat>& A,
                                   int steps, std::uint64_t seed, int trials);

// Label sequence of one trial (for replay checks).
std::vector<int> random_path(int d, int steps, std::uint64_t seed, int trial);

}  // namespace moptree

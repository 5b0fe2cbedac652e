#pragma once

// The boundary representation rho_p(gamma) v(b) = lambda^{gamma p}(b) v(gamma^-1 b),
// matrix coefficients, the averaging operators T_t^f and the experiments
// built on them.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypbdry/exact.hpp"
#include "hypbdry/plane.hpp"
#include "hypbdry/tree.hpp"

namespace hypbdry {

/// Function on the tree boundary, constant on depth-`depth` cylinders.
class SimpleFunction {
 public:
  SimpleFunction() = default;
  SimpleFunction(const FreeGroup& g, std::size_t depth, std::vector<ExactScalar> values);
  static SimpleFunction constant(const FreeGroup& g, ExactScalar c);
  static SimpleFunction indicator(const FreeGroup& g, const CylinderSet& s);

  int rank() const { return rank_; }
  std::size_t depth() const { return depth_; }
  const std::vector<ExactScalar>& values() const { return values_; }
  std::size_t cells() const { return values_.size(); }

  const ExactScalar& cell_value(std::uint64_t index) const { return values_[index]; }
  /// Value on the cylinder given by at least depth() letters.
  const ExactScalar& value_at(const Letter* letters) const;
  ExactScalar evaluate(const BoundaryWord& b) const;
  SimpleFunction refined(std::size_t depth) const;

  friend bool operator==(const SimpleFunction& a, const SimpleFunction& b);

 private:
  int rank_ = 2;
  std::size_t depth_ = 0;
  std::vector<ExactScalar> values_;
};

/// <u, v> = integral of u v against nu_p (values are real).
ExactScalar inner_product(const FreeTreeModel& m, const SimpleFunction& u, const SimpleFunction& v);

/// lambda^q(b) = exp(-eta/2 beta_b(p, q)); exact power of sqrt(2k-1).
ExactScalar lambda_eval(const FreeTreeModel& m, const TreePoint& q, const BoundaryWord& b);
/// Chopped variant, built from the chopped product.
ExactScalar chopped_lambda_eval(const FreeTreeModel& m, const TreePoint& q, const BoundaryWord& b);
/// lambda^q as a simple function of depth |q|.
SimpleFunction lambda_function(const FreeTreeModel& m, const ReducedWord& q);
/// ||lambda^q||_1 for a vertex at word length n, summed over match classes.
ExactScalar lambda_l1(const FreeTreeModel& m, std::size_t n);
ExactScalar lambda_l1(const FreeTreeModel& m, const ReducedWord& q);

/// rho(gamma) v at depth |gamma| + depth(v); throws ResolutionBudgetExceeded
/// when that exceeds `max_depth`.
SimpleFunction apply_rho(const FreeTreeModel& m, const ReducedWord& gamma, const SimpleFunction& v,
                         std::size_t max_depth = 10);

/// Cells of the decomposition of the boundary on which lambda_gamma,
/// g(gamma^-1 .) and h are all constant. emit(E, gcell, hcell) receives the
/// cell weight as nu(cell) * lambda_gamma = (1/2k) (2k-1)^(E/2) and the
/// depth-mg / depth-mh cylinder indices seen by g and h.
template <class Emit>
void for_each_coefficient_cell(const FreeGroup& g, const ReducedWord& w, std::size_t mg, std::size_t mh,
                               Emit&& emit);

/// <rho(gamma) g, h> by streaming over coefficient cells.
ExactScalar matrix_coefficient(const FreeTreeModel& m, const ReducedWord& gamma, const SimpleFunction& g,
                               const SimpleFunction& h);
/// Same through apply_rho and the model's Busemann cocycle; slower but
/// honours the edge length, used as a cross-check.
ExactScalar matrix_coefficient_direct(const FreeTreeModel& m, const ReducedWord& gamma, const SimpleFunction& g,
                                      const SimpleFunction& h, std::size_t max_depth = 12);

/// Finitely supported nonnegative element of the group algebra.
struct GroupAlgebraVector {
  std::vector<ReducedWord> support;
  std::vector<ExactScalar> coefficients;
  ExactScalar total() const;
};

/// T_t^f = (1/|S_t|) sum_{gamma in S_t} f(z_p^{gamma p}) / <rho(gamma)1,1> gamma.
GroupAlgebraVector build_Tt(const FreeTreeModel& m, const SimpleFunction& f, double t);
/// <(rho o T) g, h> for an explicit group-algebra vector.
ExactScalar pair_group_algebra(const FreeTreeModel& m, const GroupAlgebraVector& T, const SimpleFunction& g,
                               const SimpleFunction& h);

struct SupNormResult {
  ExactScalar sup;
  ExactScalar inf;
  std::size_t classes = 0;  // distinct match-count profiles over boundary cells
};
/// ||(rho o T_t^1)(1)||_inf on the tree, exact. Boundary cells are grouped by
/// the number of gamma in S_t matching them in exactly j letters.
SupNormResult sup_norm_Tt1(const FreeTreeModel& m, double t);

struct PlaneSupNorm {
  double sup = 0.0;  // lower bound for the true sup (sampled)
  double inf = 0.0;
  std::size_t s_t_size = 0;
  std::size_t samples = 0;
};
/// Sampled sup norm on the plane; `samples` equally spaced boundary points.
PlaneSupNorm sup_norm_Tt1(const PlaneModel& m, const OrbitCache& cache, double t, std::size_t samples,
                          int threads = 1);

struct TailBound {
  ExactScalar lhs_exact;
  double lhs = 0.0;
  double rhs = 0.0;
  double C0 = 0.0;
  bool short_branch = false;  // |q| <= a
  bool holds = false;
};
/// <lambda^q, chi_V> / ||lambda^q||_1 against C0 e^{eta a} / |q|, with
/// C0 = e^{delta eta} nu(B) e^{delta} / C and C the lower Lambda constant.
TailBound tail_bound_check(const FreeTreeModel& m, const ReducedWord& q, const CylinderSet& V, double a,
                           double lambda_lower_constant);

struct ConvergenceRow {
  double t = 0.0;
  std::uint64_t s_t_size = 0;
  ExactScalar value;
  ExactScalar target;
  double abs_error = 0.0;
  double wall_ms = 0.0;
};
/// <(rho o T_t^{chi_U}) chi_V, chi_W> against nu(U cap W) nu(V) for each t.
std::vector<ConvergenceRow> convergence_experiment(const FreeTreeModel& m, const CylinderSet& U,
                                                   const CylinderSet& V, const CylinderSet& W,
                                                   const std::vector<double>& t_list, int threads = 1,
                                                   std::size_t max_word_length = 16);
/// One value of the experiment with general simple functions.
ExactScalar Tt_coefficient(const FreeTreeModel& m, const SimpleFunction& f, const SimpleFunction& g,
                           const SimpleFunction& h, double t, int threads = 1, std::uint64_t* s_t_size = nullptr);

struct RankSweep {
  std::size_t dimension = 0;  // D
  std::vector<std::size_t> rank_by_length;  // index L
  std::optional<std::size_t> full_rank_length;
};
/// Numerical rank of span{P_n rho(gamma) P_n : |gamma| <= L} for L = 0..max_L.
RankSweep truncation_rank(const FreeTreeModel& m, std::size_t n, std::size_t max_L, double rel_tol = 1e-9,
                          std::size_t max_dimension = 500);
/// D x D matrix of P_n rho(gamma) P_n in the basis chi_c / sqrt(nu(c)).
std::vector<double> compressed_operator(const FreeTreeModel& m, const ReducedWord& gamma, std::size_t n);

// ---------------------------------------------------------------------------
// Plane

using PlaneFunction = std::function<double(const CirclePoint&)>;

/// rho(gamma) v as a callable on the circle.
PlaneFunction apply_rho(const MobiusIsometry& gamma, PlaneFunction v);
/// <rho(gamma) g, h> by adaptive quadrature, with breakpoints of g and h.
double matrix_coefficient(const MobiusIsometry& gamma, const PlaneFunction& g, const PlaneFunction& h,
                          const std::vector<double>& breakpoints = {});

// ---------------------------------------------------------------------------

template <class Emit>
void for_each_coefficient_cell(const FreeGroup& g, const ReducedWord& w, std::size_t mg, std::size_t mh,
                               Emit&& emit) {
  const long n = static_cast<long>(w.size());
  const int nl = g.num_letters();
  std::vector<Letter> u;
  std::vector<Letter> gseq;

  // enumerate u[from..D) below a fixed head and report each full cell
  auto walk = [&](auto& self, std::size_t pos, std::size_t D, long E, std::size_t g_from) -> void {
    if (pos == D) {
      std::uint64_t gcell = 0;
      if (mg > 0) {
        // gamma^-1 u = gseq followed by u[g_from..]
        std::size_t have = std::min(gseq.size(), mg);
        Letter buf[64];
        for (std::size_t i = 0; i < have; ++i) buf[i] = gseq[i];
        for (std::size_t i = have; i < mg; ++i) buf[i] = u[g_from + (i - have)];
        gcell = g.cylinder_index(buf, mg);
      }
      std::uint64_t hcell = mh > 0 ? g.cylinder_index(u.data(), mh) : 0;
      emit(E, gcell, hcell);
      return;
    }
    for (int c = 0; c < nl; ++c) {
      Letter l = static_cast<Letter>(c);
      if (pos > 0 && l == inverse_letter(u[pos - 1])) continue;
      u[pos] = l;
      self(self, pos + 1, D, E, g_from);
    }
  };

  for (long j = 0; j < n; ++j) {
    std::size_t D = std::max<long>({j + 1, static_cast<long>(mh), static_cast<long>(mg) + 2 * j - n, 1});
    long E = 2 * j - n - 2 * (static_cast<long>(D) - 1);
    u.assign(D, 0);
    for (long i = 0; i < j; ++i) u[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)];
    gseq.clear();
    for (long i = n - 1; i >= j; --i) gseq.push_back(inverse_letter(w[static_cast<std::size_t>(i)]));
    for (int c = 0; c < nl; ++c) {
      Letter l = static_cast<Letter>(c);
      if (l == w[static_cast<std::size_t>(j)]) continue;
      if (j > 0 && l == inverse_letter(w[static_cast<std::size_t>(j - 1)])) continue;
      u[static_cast<std::size_t>(j)] = l;
      // gseq already holds n - j letters; c follows at u[j]
      walk(walk, static_cast<std::size_t>(j) + 1, D, E, static_cast<std::size_t>(j));
    }
  }
  // full match: u = w v
  std::size_t D = std::max<std::size_t>({static_cast<std::size_t>(n) + mg, mh, 1});
  long E = n - 2 * (static_cast<long>(D) - 1);
  u.assign(D, 0);
  for (long i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)];
  gseq.clear();
  walk(walk, static_cast<std::size_t>(n), D, E, static_cast<std::size_t>(n));
}

}  // namespace hypbdry

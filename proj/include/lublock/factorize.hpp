#pragma once

#include <span>
#include <vector>

#include "lublock/grid.hpp"
#include "lublock/kernels.hpp"

namespace lublock {

struct FactorOptions {
  Index workers = 1;
  PivotOptions pivot;
  /// Run Schur updates on targets with density >= 0.5 through dense loops.
  bool dense_fallback = false;
};

struct FactorStats {
  Index tasks_executed = 0;
  Index perturbed_pivots = 0;
  bool pivoted = false;
};

/// Block LU factors: P * A = L * U with P the block-diagonal composition of
/// the diagonal blocks' local row permutations.
struct LUFactors {
  BlockingPlan plan;
  BlockStructure structure;
  /// Indexed by block id: L_ki below the diagonal, U_ij above it. Entries for
  /// diagonal blocks are empty; those live in `diag`.
  std::vector<SparseBlock> blocks;
  std::vector<DiagonalFactor> diag;
  FactorStats stats;

  Index n() const { return plan.n; }
};

/// Right-looking blocked LU over the task DAG. workers == 1 runs the step
/// loop directly; more workers dispatch ready tasks from a shared queue.
/// Updates to a block always apply in ascending step order, so the result is
/// bitwise independent of the worker count.
LUFactors factorize(const BlockGrid& grid, const DependencyTree& tree, const FactorOptions& options = {});

/// Global CSC factors; `lower` stores its unit diagonal explicitly and
/// (P A)[t, :] = A[row_perm[t], :].
struct GlobalFactors {
  CscMatrix lower;
  CscMatrix upper;
  std::vector<Index> row_perm;
};

GlobalFactors assemble(const LUFactors& f);

/// ||P A - L U||_F / ||A||_F.
double residual(const CscMatrix& a, const LUFactors& f);
double residual(const CscMatrix& a, const GlobalFactors& g);

std::vector<double> solve(const LUFactors& f, std::span<const double> b);
std::vector<double> solve(const GlobalFactors& g, std::span<const double> b);

/// Solves A x = A x_true for x_true[i] = 1 + i/n and returns
/// ||x - x_true||_inf / ||x_true||_inf.
double manufactured_solve_error(const CscMatrix& a, const LUFactors& f);

}  // namespace lublock

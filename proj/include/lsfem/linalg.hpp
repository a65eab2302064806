#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lsfem {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed-row sparse matrix with sorted, unique column indices per row.
struct SparseMatrix {
  int rows = 0, cols = 0;
  std::vector<int> row_offsets;  ///< size rows + 1
  std::vector<int> col_indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(values.size()); }
  std::vector<double> multiply(const std::vector<double>& x) const;
  std::vector<double> multiply_transposed(const std::vector<double>& x) const;
  SparseMatrix transposed() const;
};

/// Builds CSR from triplets. Duplicates are summed in a fixed order (stable
/// sort by row, then column), so the result is reproducible bit for bit for
/// a given triplet sequence.
SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);

struct LinearSolveReport {
  double relative_residual = 0.0;
  std::string factorization_kind;
  long nnz_factors = 0;
};

/// Sparse LU solve (with iterative refinement) and a post-solve residual
/// check: ||Ax - b||_2 / max(||b||_2, tiny) <= 1e-10, or, past the double
/// precision floor of that quotient, a normwise backward error below 1e-13.
/// Throws std::runtime_error on singular systems or residual failure.
/// Deterministic pivoting: identical inputs give bitwise identical
/// solutions.
std::pair<std::vector<double>, LinearSolveReport> solve_sparse(const SparseMatrix& A,
                                                               const std::vector<double>& rhs);

struct SaddleSolution {
  std::vector<double> p;
  std::vector<double> u;
  LinearSolveReport report;
};

/// Solves [[A, B], [B^T, 0]] (p, u) = (f, 0). A must be square with
/// A.rows == B.rows. Checks the block residual and ||B^T p||_inf after the
/// solve; throws on singular systems (violated discrete inf-sup).
SaddleSolution solve_saddle(const SparseMatrix& A, const SparseMatrix& B,
                            const std::vector<double>& f_rhs);

}  // namespace lsfem

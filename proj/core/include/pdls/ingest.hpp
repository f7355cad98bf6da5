#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdls/dense.hpp"

namespace pdls {

/// A global least-squares instance: minimize ||A x - b||^2 over x.
/// A is tall (rows >= cols). x_star is recorded when b was synthesized
/// as A x_star, so relative estimation error is computable.
struct Problem {
  DenseMatrix A;
  Vec b;
  std::optional<Vec> x_star;

  std::size_t n_rows() const { return A.rows(); }
  std::size_t n_cols() const { return A.cols(); }
};

/// One agent's private shard (A^i, b^i): a contiguous block of rows of
/// the global problem. gram is the opt-in cached (A^i)^T A^i.
struct AgentShard {
  std::size_t agent_id = 0;
  DenseMatrix A_i;
  Vec b_i;
  std::optional<DenseMatrix> gram;
};

/// Parses Matrix Market text (coordinate or array format, real or integer
/// field, general or symmetric) into a dense matrix. Symmetric storage is
/// expanded to full; unlisted entries are zero.
DenseMatrix parse_matrix_market(std::istream& in);
DenseMatrix parse_matrix_market(const std::string& text);
DenseMatrix load_matrix_market_file(const std::filesystem::path& path);

/// Writes in MatrixMarket array/general format with round-trip precision;
/// parse(write(M)) == M exactly.
void write_matrix_market_array(const DenseMatrix& m, std::ostream& out);
std::string to_matrix_market_array(const DenseMatrix& m);

/// Plain CSV: one row per line, comma-separated reals, equal row lengths.
DenseMatrix parse_csv_matrix(std::istream& in);
DenseMatrix load_csv_matrix(const std::filesystem::path& path);

/// Builds a Problem with b = A x_star and x_star recorded.
Problem synthesize_rhs(const DenseMatrix& a, const Vec& x_star);

/// Builds a Problem from an explicit (A, b) pair; A must be tall.
Problem make_problem(DenseMatrix a, Vec b);

/// Splits a problem into m contiguous row blocks in ascending agent order.
/// When m does not divide N, the first N mod m agents get one extra row.
std::vector<AgentShard> partition(const Problem& p, std::size_t m);

/// A^T A with the fixed summation order.
DenseMatrix gram(const DenseMatrix& a);

/// Computes and caches (A^i)^T A^i on every shard.
void attach_gram(std::vector<AgentShard>& shards);

/// Sum of per-shard Gram matrices in ascending agent order.
DenseMatrix sum_of_grams(const std::vector<AgentShard>& shards);

/// Cheap load-time probe used by the CLI to report (not fix) violations.
bool is_positive_definite(const DenseMatrix& s);

}  // namespace pdls

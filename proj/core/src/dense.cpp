#include "pdls/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pdls {

namespace {

[[noreturn]] void dim_fail(const char* op, std::size_t a, std::size_t b) {
  throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                       " vs " + std::to_string(b) + ")");
}

}  // namespace

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec DenseMatrix::col_copy(std::size_t c) const {
  Vec v(rows_);
  const double* p = col(c);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = p[r];
  return v;
}

void DenseMatrix::set_col(std::size_t c, const Vec& v) {
  if (v.size() != rows_) dim_fail("set_col", v.size(), rows_);
  double* p = col(c);
  for (std::size_t r = 0; r < rows_; ++r) p[r] = v[r];
}

Vec matvec(const DenseMatrix& m, const Vec& v) {
  if (m.cols() != v.size()) dim_fail("matvec", m.cols(), v.size());
  Vec out(m.rows(), 0.0);
  // Column sweep: each out[r] accumulates terms in ascending column index,
  // the mandated summation order.
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double vc = v[c];
    const double* mc = m.col(c);
    double* o = out.data();
    for (std::size_t r = 0; r < m.rows(); ++r) o[r] += mc[r] * vc;
  }
  return out;
}

Vec transpose_matvec(const DenseMatrix& m, const Vec& v) {
  if (m.rows() != v.size()) dim_fail("transpose_matvec", m.rows(), v.size());
  Vec out(m.cols(), 0.0);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double* mc = m.col(c);
    double acc = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) acc += mc[r] * v[r];
    out[c] = acc;
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& lhs, const DenseMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) dim_fail("matmul", lhs.cols(), rhs.rows());
  const std::size_t nr = lhs.rows(), nk = lhs.cols(), nc = rhs.cols();
  DenseMatrix out(nr, nc, 0.0);
  // Blocked column-axpy sweep. Every out(r,j) still accumulates its terms
  // in ascending k, so the result is bitwise equal to the naive triple loop.
  constexpr std::size_t jb = 4;
  for (std::size_t j0 = 0; j0 < nc; j0 += jb) {
    const std::size_t j1 = std::min(j0 + jb, nc);
    for (std::size_t k = 0; k < nk; ++k) {
      const double* a = lhs.col(k);
      for (std::size_t j = j0; j < j1; ++j) {
        const double b = rhs(k, j);
        double* o = out.col(j);
        for (std::size_t r = 0; r < nr; ++r) o[r] += a[r] * b;
      }
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols(), m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) out(c, r) = m(r, c);
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) dim_fail("add", a.rows(), b.rows());
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] += b.values()[i];
  return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) dim_fail("sub", a.rows(), b.rows());
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] -= b.values()[i];
  return out;
}

DenseMatrix scaled(const DenseMatrix& m, double s) {
  DenseMatrix out = m;
  for (double& v : out.values()) v *= s;
  return out;
}

DenseMatrix add_scaled_identity(const DenseMatrix& m, double s) {
  if (m.rows() != m.cols()) dim_fail("add_scaled_identity", m.rows(), m.cols());
  DenseMatrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) out(i, i) += s;
  return out;
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) dim_fail("add", a.size(), b.size());
  Vec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) dim_fail("sub", a.size(), b.size());
  Vec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Vec scaled(const Vec& v, double s) {
  Vec out = v;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return out;
}

void axpy(double a, const Vec& x, Vec& y) {
  if (x.size() != y.size()) dim_fail("axpy", x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) dim_fail("dot", a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const Vec& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * v[i];
  return std::sqrt(acc);
}

double frobenius_norm(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.values()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs(const DenseMatrix& m) {
  double mx = 0.0;
  for (double v : m.values()) mx = std::max(mx, std::abs(v));
  return mx;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) dim_fail("max_abs_diff", a.rows(), b.rows());
  double mx = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    mx = std::max(mx, std::abs(a.values()[i] - b.values()[i]));
  return mx;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) dim_fail("max_abs_diff", a.size(), b.size());
  double mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
  return mx;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const DenseMatrix& m) {
  for (double x : m.values())
    if (!std::isfinite(x)) return false;
  return true;
}

bool is_symmetric(const DenseMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = max_abs(m);
  if (scale == 0.0) return true;
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = c + 1; r < m.rows(); ++r)
      if (std::abs(m(r, c) - m(c, r)) > rel_tol * scale) return false;
  return true;
}

EigenResult sym_eig(const DenseMatrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("sym_eig: matrix must be square");
  if (!is_symmetric(s)) throw InvalidArgument("sym_eig: matrix not symmetric (1e-12 relative)");
  if (!all_finite(s)) throw InvalidArgument("sym_eig: non-finite entries");

  const std::size_t n = s.rows();
  DenseMatrix b = s;
  DenseMatrix v = DenseMatrix::identity(n);
  const double fro = frobenius_norm(s);

  auto offdiag = [&]() {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < c; ++r) acc += b(r, c) * b(r, c);
    return std::sqrt(2.0 * acc);
  };

  if (fro > 0.0) {
    const double stop = 1e-14 * fro;
    constexpr int max_sweeps = 64;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
      if (offdiag() <= stop) break;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const double apq = b(p, q);
          if (apq == 0.0) continue;
          const double app = b(p, p);
          const double aqq = b(q, q);
          const double theta = (aqq - app) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double sn = t * c;

          b(p, p) = c * c * app - 2.0 * sn * c * apq + sn * sn * aqq;
          b(q, q) = sn * sn * app + 2.0 * sn * c * apq + c * c * aqq;
          b(p, q) = 0.0;
          b(q, p) = 0.0;
          for (std::size_t k = 0; k < n; ++k) {
            if (k == p || k == q) continue;
            const double akp = b(k, p);
            const double akq = b(k, q);
            b(k, p) = c * akp - sn * akq;
            b(p, k) = b(k, p);
            b(k, q) = sn * akp + c * akq;
            b(q, k) = b(k, q);
          }
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - sn * vkq;
            v(k, q) = sn * vkp + c * vkq;
          }
        }
      }
    }
    if (sweep == max_sweeps && offdiag() > stop)
      throw Error("sym_eig: Jacobi sweep limit reached without convergence");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return b(i, i) < b(j, j); });

  EigenResult out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = b(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  if (!all_finite(out.vectors)) throw Error("sym_eig: non-finite output");
  return out;
}

namespace {

// Lower Cholesky factor, throws on non-positive pivots.
DenseMatrix cholesky_lower(const DenseMatrix& s) {
  const std::size_t n = s.rows();
  DenseMatrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0))
      throw NotPositiveDefinite("solve_spd: matrix not positive definite (pivot " +
                                std::to_string(j) + ")");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = s(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      l(i, j) = acc / l(j, j);
    }
  }
  return l;
}

void solve_cholesky_inplace(const DenseMatrix& l, double* x, std::size_t n) {
  // forward: L y = b
  for (std::size_t i = 0; i < n; ++i) {
    double acc = x[i];
    for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * x[k];
    x[i] = acc / l(i, i);
  }
  // backward: L^T x = y
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) acc -= l(k, ii) * x[k];
    x[ii] = acc / l(ii, ii);
  }
}

}  // namespace

DenseMatrix solve_spd(const DenseMatrix& s, const DenseMatrix& rhs) {
  if (s.rows() != s.cols()) throw DimensionError("solve_spd: matrix must be square");
  if (s.rows() != rhs.rows()) dim_fail("solve_spd", s.rows(), rhs.rows());
  if (!is_symmetric(s)) throw InvalidArgument("solve_spd: matrix not symmetric");
  const DenseMatrix l = cholesky_lower(s);
  DenseMatrix x = rhs;
  for (std::size_t c = 0; c < rhs.cols(); ++c) solve_cholesky_inplace(l, x.col(c), s.rows());
  if (!all_finite(x)) throw Error("solve_spd: non-finite solution");
  return x;
}

Vec solve_spd(const DenseMatrix& s, const Vec& rhs) {
  if (s.rows() != s.cols()) throw DimensionError("solve_spd: matrix must be square");
  if (s.rows() != rhs.size()) dim_fail("solve_spd", s.rows(), rhs.size());
  if (!is_symmetric(s)) throw InvalidArgument("solve_spd: matrix not symmetric");
  const DenseMatrix l = cholesky_lower(s);
  Vec x = rhs;
  solve_cholesky_inplace(l, x.data(), s.rows());
  if (!all_finite(x)) throw Error("solve_spd: non-finite solution");
  return x;
}

}  // namespace pdls

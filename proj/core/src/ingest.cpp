#include "pdls/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pdls {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

// Next content line: skips blank lines and, when skip_comments, % lines.
bool next_line(std::istream& in, std::string& line, bool skip_comments = true) {
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    if (skip_comments && line[0] == '%') continue;
    return true;
  }
  return false;
}

double parse_real(const std::string& tok) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("matrix market: bad numeric token '" + tok + "'");
  }
  if (pos != tok.size()) throw ParseError("matrix market: bad numeric token '" + tok + "'");
  if (!std::isfinite(v)) throw ParseError("matrix market: non-finite value '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream iss(line);
  std::string t;
  while (iss >> t) toks.push_back(t);
  return toks;
}

}  // namespace

DenseMatrix parse_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("matrix market: empty input");
  auto header = split_ws(line);
  if (header.size() < 5 || lower(header[0]) != "%%matrixmarket" || lower(header[1]) != "matrix")
    throw ParseError("matrix market: missing '%%MatrixMarket matrix' header");
  const std::string format = lower(header[2]);
  const std::string field = lower(header[3]);
  const std::string symmetry = lower(header[4]);

  if (format != "coordinate" && format != "array")
    throw ParseError("matrix market: unsupported format '" + format + "'");
  if (field != "real" && field != "integer")
    throw ParseError("matrix market: unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("matrix market: unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  if (!next_line(in, line)) throw ParseError("matrix market: missing size line");
  auto size_toks = split_ws(line);

  auto parse_index = [](const std::string& tok) -> long long {
    try {
      return std::stoll(tok);
    } catch (const std::exception&) {
      throw ParseError("matrix market: bad size/index token '" + tok + "'");
    }
  };

  if (format == "coordinate") {
    if (size_toks.size() != 3) throw ParseError("matrix market: coordinate size line needs 3 fields");
    const long long rows = parse_index(size_toks[0]);
    const long long cols = parse_index(size_toks[1]);
    const long long nnz = parse_index(size_toks[2]);
    if (rows < 0 || cols < 0 || nnz < 0) throw ParseError("matrix market: negative size");
    if (symmetric && rows != cols)
      throw ParseError("matrix market: symmetric matrix must be square");

    DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), 0.0);
    long long seen = 0;
    while (seen < nnz) {
      if (!next_line(in, line))
        throw ParseError("matrix market: declared " + std::to_string(nnz) + " entries, found " +
                         std::to_string(seen));
      auto toks = split_ws(line);
      if (toks.size() != 3) throw ParseError("matrix market: coordinate entry needs 'i j value'");
      const long long i = parse_index(toks[0]);
      const long long j = parse_index(toks[1]);
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError("matrix market: index (" + toks[0] + "," + toks[1] +
                         ") out of declared bounds");
      const double v = parse_real(toks[2]);
      const auto r = static_cast<std::size_t>(i - 1);
      const auto c = static_cast<std::size_t>(j - 1);
      m(r, c) += v;
      if (symmetric && r != c) m(c, r) += v;
      ++seen;
    }
    if (next_line(in, line)) throw ParseError("matrix market: unexpected trailing data");
    return m;
  }

  // array format
  if (size_toks.size() != 2) throw ParseError("matrix market: array size line needs 2 fields");
  const long long rows = parse_index(size_toks[0]);
  const long long cols = parse_index(size_toks[1]);
  if (rows < 0 || cols < 0) throw ParseError("matrix market: negative size");
  if (symmetric && rows != cols) throw ParseError("matrix market: symmetric matrix must be square");

  DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), 0.0);
  // Column-major stream of values; symmetric array files carry the lower
  // triangle of each column only.
  std::vector<double> pending;
  std::size_t expected = symmetric
                             ? static_cast<std::size_t>(rows) * (static_cast<std::size_t>(rows) + 1) / 2
                             : static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  while (pending.size() < expected) {
    if (!next_line(in, line))
      throw ParseError("matrix market: declared " + std::to_string(expected) +
                       " array values, found " + std::to_string(pending.size()));
    for (const auto& tok : split_ws(line)) pending.push_back(parse_real(tok));
  }
  if (pending.size() > expected || next_line(in, line))
    throw ParseError("matrix market: unexpected trailing data");

  std::size_t k = 0;
  if (symmetric) {
    for (std::size_t c = 0; c < m.cols(); ++c)
      for (std::size_t r = c; r < m.rows(); ++r) {
        m(r, c) = pending[k];
        m(c, r) = pending[k];
        ++k;
      }
  } else {
    for (std::size_t c = 0; c < m.cols(); ++c)
      for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = pending[k++];
  }
  return m;
}

DenseMatrix parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix_market(in);
}

DenseMatrix load_matrix_market_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return parse_matrix_market(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_matrix_market_array(const DenseMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  char buf[40];
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << buf << "\n";
    }
}

std::string to_matrix_market_array(const DenseMatrix& m) {
  std::ostringstream out;
  write_matrix_market_array(m, out);
  return out.str();
}

DenseMatrix parse_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    std::vector<double> row;
    std::string tok;
    std::istringstream ls(line);
    while (std::getline(ls, tok, ',')) {
      // trim
      const auto b = tok.find_first_not_of(" \t\r");
      const auto e = tok.find_last_not_of(" \t\r");
      if (b == std::string::npos) throw ParseError("csv: empty field");
      row.push_back(parse_real(tok.substr(b, e - b + 1)));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("csv: ragged rows (" + std::to_string(row.size()) + " vs " +
                       std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv: no data");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  return m;
}

DenseMatrix load_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return parse_csv_matrix(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Problem synthesize_rhs(const DenseMatrix& a, const Vec& x_star) {
  if (a.cols() != x_star.size())
    throw DimensionError("synthesize_rhs: A has " + std::to_string(a.cols()) +
                         " columns, x* has " + std::to_string(x_star.size()));
  Problem p;
  p.b = matvec(a, x_star);
  p.A = a;
  p.x_star = x_star;
  if (p.A.rows() < p.A.cols()) throw InvalidArgument("synthesize_rhs: A must be tall (rows >= cols)");
  return p;
}

Problem make_problem(DenseMatrix a, Vec b) {
  if (a.rows() != b.size())
    throw DimensionError("make_problem: A has " + std::to_string(a.rows()) + " rows, b has " +
                         std::to_string(b.size()));
  if (a.rows() < a.cols()) throw InvalidArgument("make_problem: A must be tall (rows >= cols)");
  Problem p;
  p.A = std::move(a);
  p.b = std::move(b);
  return p;
}

std::vector<AgentShard> partition(const Problem& p, std::size_t m) {
  const std::size_t n_rows = p.A.rows();
  if (m < 1 || m > n_rows)
    throw InvalidArgument("partition: need 1 <= m <= N, got m=" + std::to_string(m) +
                          ", N=" + std::to_string(n_rows));
  const std::size_t base = n_rows / m;
  const std::size_t extra = n_rows % m;
  std::vector<AgentShard> shards;
  shards.reserve(m);
  std::size_t row0 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t ni = base + (i < extra ? 1 : 0);
    AgentShard s;
    s.agent_id = i;
    s.A_i = DenseMatrix(ni, p.A.cols());
    s.b_i = Vec(ni);
    for (std::size_t r = 0; r < ni; ++r) {
      for (std::size_t c = 0; c < p.A.cols(); ++c) s.A_i(r, c) = p.A(row0 + r, c);
      s.b_i[r] = p.b[row0 + r];
    }
    row0 += ni;
    shards.push_back(std::move(s));
  }
  return shards;
}

DenseMatrix gram(const DenseMatrix& a) { return matmul(transpose(a), a); }

void attach_gram(std::vector<AgentShard>& shards) {
  for (auto& s : shards) s.gram = gram(s.A_i);
}

DenseMatrix sum_of_grams(const std::vector<AgentShard>& shards) {
  if (shards.empty()) throw InvalidArgument("sum_of_grams: no shards");
  DenseMatrix acc(shards.front().A_i.cols(), shards.front().A_i.cols(), 0.0);
  for (const auto& s : shards) acc = add(acc, s.gram ? *s.gram : gram(s.A_i));
  return acc;
}

bool is_positive_definite(const DenseMatrix& s) {
  if (s.rows() != s.cols() || !is_symmetric(s)) return false;
  try {
    solve_spd(s, Vec(s.rows(), 0.0));
  } catch (const NotPositiveDefinite&) {
    return false;
  }
  return true;
}

}  // namespace pdls

#pragma once

#include "polybanach/rational.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace polybanach {

using Mat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

inline Eigen::Index rank_of(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return Eigen::FullPivLU<Mat>(m).rank();
}

inline bool is_invertible(const Mat& m) {
  return m.rows() == m.cols() && rank_of(m) == m.rows();
}

/// Exact inverse of a square nonsingular matrix.
inline Mat inverse_of(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse_of: matrix not square");
  if (m.rows() == 0) return Mat(0, 0);
  Eigen::FullPivLU<Mat> lu(m);
  if (lu.rank() != m.rows()) throw std::invalid_argument("inverse_of: matrix singular");
  return lu.inverse();
}

/// Solves A X = B exactly; throws if the system is inconsistent.
inline Mat solve_exact(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve_exact: row mismatch");
  if (a.cols() == 0) {
    if (!b.isZero()) throw std::invalid_argument("solve_exact: inconsistent system");
    return Mat(0, b.cols());
  }
  Eigen::FullPivLU<Mat> lu(a);
  Mat x = lu.solve(b);
  if (a * x != b) throw std::invalid_argument("solve_exact: inconsistent system");
  return x;
}

inline Vec solve_exact(const Mat& a, const Vec& b) {
  Mat x = solve_exact(a, Mat(b));
  return Vec(x.col(0));
}

/// Indices of a maximal independent subset of columns, chosen greedily in
/// column order (deterministic).
inline std::vector<Eigen::Index> greedy_independent_columns(const Mat& m) {
  std::vector<Eigen::Index> chosen;
  // Row-echelon basis of the span collected so far: (pivot row, vector).
  std::vector<std::pair<Eigen::Index, Vec>> basis;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Vec v = m.col(c);
    for (const auto& [pivot, w] : basis) {
      if (v(pivot) != 0) v -= (v(pivot) / w(pivot)) * w;
    }
    Eigen::Index pivot = -1;
    for (Eigen::Index r = 0; r < v.size(); ++r) {
      if (v(r) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot >= 0) {
      chosen.push_back(c);
      basis.emplace_back(pivot, v);
    }
  }
  return chosen;
}

inline Mat columns_subset(const Mat& m, const std::vector<Eigen::Index>& idx) {
  Mat out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
  return out;
}

inline Mat hstack(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row mismatch");
  Mat out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

inline bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size() && i < b.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return a.size() < b.size();
}

}  // namespace polybanach

#pragma once

#include "sixj/cyclotomic.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sixj {

using IntMatrix = std::vector<std::vector<Integer>>;

inline IntMatrix int_zero(int rows, int cols) { return IntMatrix(rows, std::vector<Integer>(cols, 0)); }

inline IntMatrix int_identity(int n) {
  IntMatrix m = int_zero(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline IntMatrix int_mul(const IntMatrix& a, const IntMatrix& b, int inner) {
  const int rows = static_cast<int>(a.size());
  const int cols = b.empty() ? 0 : static_cast<int>(b[0].size());
  IntMatrix c = int_zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (int j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

inline bool int_is_zero(const IntMatrix& m) {
  for (const auto& row : m)
    for (const auto& x : row)
      if (x != 0) return false;
  return true;
}

// U * A * V = diag(d_1, ..., d_rank, 0, ...), d_i | d_{i+1}, U and V unimodular.
struct SmithForm {
  IntMatrix U, V, D;
  std::vector<Integer> diag;
  int rank = 0;
};

inline SmithForm smith(const IntMatrix& a, int rows, int cols) {
  SmithForm s;
  s.D = a;
  s.U = int_identity(rows);
  s.V = int_identity(cols);
  IntMatrix& d = s.D;
  auto swap_rows = [&](int i, int j) {
    std::swap(d[i], d[j]);
    std::swap(s.U[i], s.U[j]);
  };
  auto swap_cols = [&](int i, int j) {
    for (auto& row : d) std::swap(row[i], row[j]);
    for (auto& row : s.V) std::swap(row[i], row[j]);
  };
  auto add_row = [&](int dst, int src, const Integer& q) {  // row dst -= q row src
    for (int j = 0; j < cols; ++j) d[dst][j] -= q * d[src][j];
    for (int j = 0; j < rows; ++j) s.U[dst][j] -= q * s.U[src][j];
  };
  auto add_col = [&](int dst, int src, const Integer& q) {
    for (int i = 0; i < rows; ++i) d[i][dst] -= q * d[i][src];
    for (int i = 0; i < cols; ++i) s.V[i][dst] -= q * s.V[i][src];
  };
  int k = 0;
  while (k < rows && k < cols) {
    int pi = -1, pj = -1;
    for (int i = k; i < rows; ++i)
      for (int j = k; j < cols; ++j)
        if (d[i][j] != 0 && (pi < 0 || abs(d[i][j]) < abs(d[pi][pj]))) pi = i, pj = j;
    if (pi < 0) break;
    swap_rows(k, pi);
    swap_cols(k, pj);
    for (;;) {
      bool dirty = false;
      for (int i = k + 1; i < rows; ++i) {
        if (d[i][k] == 0) continue;
        add_row(i, k, d[i][k] / d[k][k]);
        if (d[i][k] != 0) {
          swap_rows(k, i);
          dirty = true;
        }
      }
      for (int j = k + 1; j < cols; ++j) {
        if (d[k][j] == 0) continue;
        add_col(j, k, d[k][j] / d[k][k]);
        if (d[k][j] != 0) {
          swap_cols(k, j);
          dirty = true;
        }
      }
      if (dirty) continue;
      // divisibility of the remaining block
      int bad = -1;
      for (int i = k + 1; i < rows && bad < 0; ++i)
        for (int j = k + 1; j < cols; ++j)
          if (d[i][j] % d[k][k] != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      add_row(k, bad, Integer(-1));
    }
    if (d[k][k] < 0) {
      for (int j = 0; j < cols; ++j) d[k][j] = -d[k][j];
      for (int j = 0; j < rows; ++j) s.U[k][j] = -s.U[k][j];
    }
    s.diag.push_back(d[k][k]);
    ++k;
  }
  s.rank = k;
  return s;
}

// H1 of a chain complex C2 -> C1 -> C0 given by d2 (n1 x n2) and d1 (n0 x n1).
class FirstHomology {
public:
  FirstHomology(IntMatrix d1, IntMatrix d2, int n0, int n1, int n2)
      : d1_(std::move(d1)), d2_(std::move(d2)), n0_(n0), n1_(n1), n2_(n2) {
    snf2_ = smith(d2_, n1_, n2_);
    const SmithForm snf1 = smith(d1_, n0_, n1_);
    free_rank_ = n1_ - snf1.rank - snf2_.rank;
    for (const auto& x : snf2_.diag)
      if (x != 1) torsion_.push_back(x);
  }

  bool boundaries_compose_to_zero() const { return int_is_zero(int_mul(d1_, d2_, n1_)); }
  int free_rank() const { return free_rank_; }
  const std::vector<Integer>& torsion() const { return torsion_; }
  bool trivial() const { return free_rank_ == 0 && torsion_.empty(); }
  const IntMatrix& d1() const { return d1_; }
  const IntMatrix& d2() const { return d2_; }

  bool is_cycle(const std::vector<Integer>& z) const {
    for (int i = 0; i < n0_; ++i) {
      Integer acc = 0;
      for (int j = 0; j < n1_; ++j) acc += d1_[i][j] * z[j];
      if (acc != 0) return false;
    }
    return true;
  }

  // Complete invariant of z modulo boundaries: torsion residues, then free coordinates.
  std::vector<Integer> coordinates(const std::vector<Integer>& z) const {
    if (static_cast<int>(z.size()) != n1_) throw DomainError("chain has the wrong length");
    if (!is_cycle(z)) throw DomainError("class requested for a chain that is not a cycle");
    std::vector<Integer> y(n1_, 0);
    for (int i = 0; i < n1_; ++i)
      for (int j = 0; j < n1_; ++j) y[i] += snf2_.U[i][j] * z[j];
    std::vector<Integer> out;
    for (int i = 0; i < snf2_.rank; ++i) {
      const Integer& m = snf2_.diag[i];
      if (m == 1) continue;
      Integer res = y[i] % m;
      if (res < 0) res += m;
      out.push_back(res);
    }
    for (int i = snf2_.rank; i < n1_; ++i) out.push_back(y[i]);
    return out;
  }

  std::string class_label(const std::vector<Integer>& z) const {
    const auto c = coordinates(z);
    bool zero = true;
    for (const auto& x : c) zero = zero && x == 0;
    if (zero) return "0";
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + c[i].str();
    return s + ")";
  }

  std::string to_string() const {
    if (trivial()) return "H1 = 0";
    std::string s = "H1 = ";
    bool first = true;
    if (free_rank_ > 0) {
      s += free_rank_ == 1 ? "Z" : "Z^" + std::to_string(free_rank_);
      first = false;
    }
    for (const auto& t : torsion_) {
      s += (first ? "" : " + ") + std::string("Z/") + t.str();
      first = false;
    }
    return s;
  }

private:
  IntMatrix d1_, d2_;
  int n0_, n1_, n2_;
  SmithForm snf2_;
  int free_rank_ = 0;
  std::vector<Integer> torsion_;
};

// {"d1": [[..]], "d2": [[..]]}: a bare chain complex for fixtures.
inline FirstHomology homology_from_json(const nlohmann::json& j) {
  auto read = [](const nlohmann::json& m) {
    IntMatrix out;
    for (const auto& row : m) {
      std::vector<Integer> r;
      for (const auto& x : row) r.emplace_back(x.get<long long>());
      out.push_back(std::move(r));
    }
    return out;
  };
  IntMatrix d1 = read(j.at("d1")), d2 = read(j.at("d2"));
  const int n0 = static_cast<int>(d1.size()), n1 = static_cast<int>(d2.size());
  const int n2 = n1 ? static_cast<int>(d2[0].size()) : 0;
  for (const auto& row : d1)
    if (static_cast<int>(row.size()) != n1) throw DomainError("d1 and d2 do not compose");
  return FirstHomology(std::move(d1), std::move(d2), n0, n1, n2);
}

}  // namespace sixj

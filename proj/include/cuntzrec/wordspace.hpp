#pragma once

// Truncated word space: the Hilbert space spanned by words of length 0..L
// over the alphabet {1..d}. The empty word (vacuum) sits at index 0, then
// words are ordered by length and lexicographically within a length.

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cuntzrec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Letters are 1-based; an empty vector is the vacuum.
using Word = std::vector<int>;

inline constexpr std::size_t kDefaultDimCap = 100000;

namespace tol {
inline constexpr double kRelation = 1e-9;
inline constexpr double kNormalize = 1e-12;
}  // namespace tol

class WordBasis {
 public:
  static std::shared_ptr<const WordBasis> build(int d, int L,
                                                std::size_t dim_cap = kDefaultDimCap);

  int d() const { return d_; }
  int L() const { return L_; }
  std::size_t dim() const { return dim_; }

  /// Index of the first word of length n.
  std::size_t level_offset(int n) const { return offsets_.at(n); }
  /// Number of words of length n (d^n).
  std::size_t level_size(int n) const { return offsets_.at(n + 1) - offsets_.at(n); }
  int length_at(std::size_t index) const { return lengths_.at(index); }

  std::size_t index_of(const Word& w) const;
  Word word_at(std::size_t index) const;

  /// Index of the word i·w (letter prepended); w must have length < L.
  std::size_t prefixed_index(int letter, std::size_t index) const;

  /// Diagonal 0/1 vector selecting words of length <= n.
  Eigen::VectorXd level_mask(int max_len) const;

  bool same_shape(const WordBasis& other) const {
    return d_ == other.d_ && L_ == other.L_;
  }

 private:
  WordBasis(int d, int L, std::vector<std::size_t> offsets);

  int d_;
  int L_;
  std::size_t dim_;
  std::vector<std::size_t> offsets_;  // size L+2
  std::vector<int> lengths_;
};

using BasisPtr = std::shared_ptr<const WordBasis>;

/// Words as digit strings "1".."d"; "" is the vacuum. Requires d <= 9.
Word parse_word(std::string_view text);
std::string format_word(const Word& w);

void require_same_basis(const WordBasis& a, const WordBasis& b, const char* where);

struct StateVector {
  BasisPtr basis;
  CVector amplitudes;
  bool normalized = false;

  double norm() const { return amplitudes.norm(); }
  /// Largest word length carrying a nonzero amplitude (-1 for the zero vector).
  int max_support_length(double cutoff = 0.0) const;
};

using StateTerm = std::pair<Word, Complex>;

StateVector make_state(const BasisPtr& basis, const std::vector<StateTerm>& terms,
                       bool normalize);

struct DensityMatrix {
  BasisPtr basis;
  CMatrix matrix;

  double trace() const { return matrix.trace().real(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  bool is_valid(double tol = tol::kRelation) const {
    return hermiticity_defect() <= tol && min_eigenvalue() >= -tol;
  }
};

DensityMatrix pure_density(const StateVector& psi);
DensityMatrix zero_density(const BasisPtr& basis);

/// <phi|rho|phi>. Throws NumericalError when the result has an imaginary
/// part above `imag_tol`.
double fidelity(const StateVector& phi, const DensityMatrix& rho,
                double imag_tol = tol::kRelation);

}  // namespace cuntzrec

#include "cuntzrec/wordspace.hpp"

#include <cmath>
#include <limits>

#include "cuntzrec/errors.hpp"

namespace cuntzrec {

WordBasis::WordBasis(int d, int L, std::vector<std::size_t> offsets)
    : d_(d), L_(L), dim_(offsets.back()), offsets_(std::move(offsets)) {
  lengths_.resize(dim_);
  for (int n = 0; n <= L_; ++n)
    for (std::size_t i = offsets_[n]; i < offsets_[n + 1]; ++i) lengths_[i] = n;
}

std::shared_ptr<const WordBasis> WordBasis::build(int d, int L, std::size_t dim_cap) {
  if (d < 1) throw DimensionError("alphabet size must be >= 1, got " + std::to_string(d));
  if (L < 1) throw DimensionError("maximum word length must be >= 1, got " + std::to_string(L));

  std::vector<std::size_t> offsets{0};
  std::size_t level = 1;
  for (int n = 0; n <= L; ++n) {
    const std::size_t next = offsets.back() + level;
    if (next > dim_cap)
      throw DimensionError("word space (d=" + std::to_string(d) + ", L=" + std::to_string(L) +
                           ") exceeds dimension cap " + std::to_string(dim_cap));
    offsets.push_back(next);
    if (level > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(d))
      throw DimensionError("word space size overflows");
    level *= static_cast<std::size_t>(d);
  }
  return std::shared_ptr<const WordBasis>(new WordBasis(d, L, std::move(offsets)));
}

std::size_t WordBasis::index_of(const Word& w) const {
  if (static_cast<int>(w.size()) > L_)
    throw WordError("word '" + format_word(w) + "' longer than L=" + std::to_string(L_));
  std::size_t local = 0;
  for (int letter : w) {
    if (letter < 1 || letter > d_)
      throw WordError("letter " + std::to_string(letter) + " outside alphabet 1.." +
                      std::to_string(d_));
    local = local * d_ + static_cast<std::size_t>(letter - 1);
  }
  return offsets_[w.size()] + local;
}

Word WordBasis::word_at(std::size_t index) const {
  if (index >= dim_) throw WordError("basis index " + std::to_string(index) + " out of range");
  const int n = lengths_[index];
  std::size_t local = index - offsets_[n];
  Word w(n);
  for (int pos = n - 1; pos >= 0; --pos) {
    w[pos] = static_cast<int>(local % d_) + 1;
    local /= d_;
  }
  return w;
}

std::size_t WordBasis::prefixed_index(int letter, std::size_t index) const {
  const int n = lengths_.at(index);
  if (n >= L_) throw WordError("cannot prepend to a top-level word");
  const std::size_t local = index - offsets_[n];
  return offsets_[n + 1] + static_cast<std::size_t>(letter - 1) * level_size(n) + local;
}

Eigen::VectorXd WordBasis::level_mask(int max_len) const {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    if (lengths_[i] <= max_len) mask(static_cast<Eigen::Index>(i)) = 1.0;
  return mask;
}

Word parse_word(std::string_view text) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    if (c < '1' || c > '9') throw WordError("invalid letter '" + std::string(1, c) + "' in word");
    w.push_back(c - '0');
  }
  return w;
}

std::string format_word(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (int letter : w) {
    if (letter < 1 || letter > 9) throw WordError("letter cannot be written as a digit");
    s.push_back(static_cast<char>('0' + letter));
  }
  return s;
}

void require_same_basis(const WordBasis& a, const WordBasis& b, const char* where) {
  if (!a.same_shape(b))
    throw BasisMismatch(std::string(where) + ": operands on different word bases (d=" +
                        std::to_string(a.d()) + ",L=" + std::to_string(a.L()) + " vs d=" +
                        std::to_string(b.d()) + ",L=" + std::to_string(b.L()) + ")");
}

int StateVector::max_support_length(double cutoff) const {
  int longest = -1;
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i)
    if (std::abs(amplitudes(i)) > cutoff)
      longest = std::max(longest, basis->length_at(static_cast<std::size_t>(i)));
  return longest;
}

StateVector make_state(const BasisPtr& basis, const std::vector<StateTerm>& terms,
                       bool normalize) {
  StateVector psi{basis, CVector::Zero(static_cast<Eigen::Index>(basis->dim())), false};
  for (const auto& [word, amp] : terms)
    psi.amplitudes(static_cast<Eigen::Index>(basis->index_of(word))) += amp;
  if (normalize) {
    const double n = psi.amplitudes.norm();
    if (n == 0.0) throw NumericalError("cannot normalize the zero vector");
    psi.amplitudes /= n;
    psi.normalized = true;
  } else {
    psi.normalized = std::abs(psi.amplitudes.norm() - 1.0) <= tol::kNormalize;
  }
  return psi;
}

double DensityMatrix::hermiticity_defect() const {
  if (matrix.size() == 0) return 0.0;
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const CMatrix herm = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix pure_density(const StateVector& psi) {
  return {psi.basis, psi.amplitudes * psi.amplitudes.adjoint()};
}

DensityMatrix zero_density(const BasisPtr& basis) {
  const auto n = static_cast<Eigen::Index>(basis->dim());
  return {basis, CMatrix::Zero(n, n)};
}

double fidelity(const StateVector& phi, const DensityMatrix& rho, double imag_tol) {
  require_same_basis(*phi.basis, *rho.basis, "fidelity");
  const Complex value = phi.amplitudes.dot(rho.matrix * phi.amplitudes);
  if (std::abs(value.imag()) > imag_tol)
    throw NumericalError("fidelity has imaginary part " + std::to_string(value.imag()) +
                         "; density matrix is not Hermitian");
  return value.real();
}

}  // namespace cuntzrec

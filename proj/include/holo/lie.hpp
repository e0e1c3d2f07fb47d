#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace holo {

using cplx = std::complex<double>;

/// Largest supported matrix size for sl(n) / SL(n).
inline constexpr int kMaxRank = 4;

/// n x n complex matrix with inline storage (n <= kMaxRank).
using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxRank, kMaxRank>;

/// Linear operator on sl(n), dimension n^2 - 1, in the basis returned by lie::sl_basis.
using AlgebraOperator = Eigen::MatrixXcd;

namespace lie {

inline constexpr double kTraceTol = 1e-9;
inline constexpr double kDetTol = 1e-9;

/// Traceless n x n complex matrix: an element of sl(n, C).
class AlgebraElement {
 public:
  AlgebraElement() = default;
  /// Validates size, finiteness and |trace| <= kTraceTol * max(1, |X|).
  explicit AlgebraElement(Mat m);

  static AlgebraElement zero(int n);
  /// Removes the trace part: m - tr(m)/n * I.
  static AlgebraElement project(const Mat& m);

  const Mat& matrix() const noexcept { return m_; }
  int n() const noexcept { return static_cast<int>(m_.rows()); }

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator-() const;
  friend AlgebraElement operator*(cplx s, const AlgebraElement& x);

 private:
  struct Unchecked {};
  AlgebraElement(Mat m, Unchecked) : m_(std::move(m)) {}
  Mat m_;
};

/// Element of SL(n, C), checked to |det - 1| <= kDetTol (scaled by the matrix norm).
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(Mat m);

  static GroupElement identity(int n);

  const Mat& matrix() const noexcept { return m_; }
  int n() const noexcept { return static_cast<int>(m_.rows()); }

  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& o) const;

 private:
  struct Unchecked {};
  GroupElement(Mat m, Unchecked) : m_(std::move(m)) {}
  Mat m_;
};

/// Standard basis of sl(n): off-diagonal units E_ij (row-major order, i != j),
/// then H_i = E_ii - E_{i+1,i+1}.
std::vector<Mat> sl_basis(int n);
/// Coordinates of a traceless matrix in sl_basis(n).
Eigen::VectorXcd sl_coordinates(const Mat& x);
Mat from_sl_coordinates(int n, const Eigen::VectorXcd& c);

/// Matrix of ad(X) acting on sl(n) in the sl_basis coordinates.
AlgebraOperator ad_matrix(const Mat& x);

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);
inline Mat commutator(const Mat& x, const Mat& y) { return x * y - y * x; }

/// Killing form via the sl(n) identity kappa(X, Y) = 2n tr(XY).
cplx killing_form(const AlgebraElement& x, const AlgebraElement& y);
cplx killing_form(const Mat& x, const Mat& y);
/// Killing form as tr(ad X ad Y), the basis-independent definition.
cplx killing_form_ad_trace(const AlgebraElement& x, const AlgebraElement& y);

/// Dual basis of sl_basis(n) under the Killing form: kappa(b_i, d_j) = delta_ij.
std::vector<Mat> killing_dual_basis(int n);

/// Matrix exponential by scaling and squaring with a diagonal Pade approximant.
/// Throws Numerical/ExpOverflow when the result is not representable.
Mat matrix_exp(const Mat& x);
GroupElement group_exp(const AlgebraElement& x);

/// exp(X)^{-1} d exp(X) along the direction Xdot, i.e. Phi(-ad X)(Xdot) with
/// Phi(u) = (1 - e^{-u})/u. Arguments with |X| > 2 are halved first.
Mat dexp_left(const Mat& x, const Mat& xdot);

/// Ad(g) X = g X g^{-1}. Throws Numerical/SingularGroupElement for ill-conditioned g.
AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x);
Mat adjoint(const Mat& g, const Mat& x);

struct CartanProjector {
  cplx eigenvalue;
  AlgebraOperator projector;
};

/// One projector per distinct eigenvalue of ad(h), built as polynomials in ad(h)
/// from the Bezout identity sum_i R_i Q_i = 1 with Q_i = prod_{j != i} (t - l_j).
/// Eigenvalues closer than 1e-6 |ad h| are merged. Throws Mathematical/NonSemisimple
/// when ad(h) is not diagonalizable.
std::vector<CartanProjector> cartan_projectors(const AlgebraElement& h);

using Word = std::vector<int>;

struct ConjugacyInvariants {
  int n = 0;
  int max_word_len = 0;
  std::map<Word, cplx> word_traces;
  /// Coefficients of det(tI - M_i), leading coefficient first.
  std::vector<std::vector<cplx>> char_polys;
};

std::vector<cplx> characteristic_polynomial(const Mat& m);

ConjugacyInvariants trace_word_invariants(std::span<const GroupElement> tuple, int max_word_len);

/// Dimension of the span of all words of length <= max_word_len in the tuple.
int word_span_dimension(std::span<const GroupElement> tuple, int max_word_len, double rel_tol = 1e-8);
/// True when the words span all of M_n(C) (irreducible tuple).
bool is_generic_tuple(std::span<const GroupElement> tuple);

enum class Verdict { Equivalent, Distinct, Indeterminate };
std::string to_string(Verdict v);

inline constexpr int kDefaultWordLength = 4;

/// Compares two tuples up to simultaneous conjugation. Values are compared with
/// |a - b| <= tol * max(1, |a|, |b|).
Verdict simultaneous_conjugacy_test(std::span<const GroupElement> a, std::span<const GroupElement> b,
                                    double tol, int max_word_len = kDefaultWordLength);

}  // namespace lie
}  // namespace holo

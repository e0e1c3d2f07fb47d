#include "holo/lie.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "holo/error.hpp"

namespace holo::lie {
namespace {

void check_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 2 || m.rows() > kMaxRank) {
    throw input_error("BadMatrixSize", std::string(what) + " must be square with 2 <= n <= " +
                                           std::to_string(kMaxRank));
  }
  if (!m.allFinite()) throw input_error("NonFinite", std::string(what) + " has non-finite entries");
}

void check_same_size(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) {
    throw input_error("SizeMismatch", "matrix sizes " + std::to_string(a.rows()) + " and " +
                                          std::to_string(b.rows()) + " differ");
  }
}

Mat identity(int n) { return Mat::Identity(n, n); }

double norm1(const Mat& m) {
  double best = 0.0;
  for (int j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).cwiseAbs().sum());
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Element types

AlgebraElement::AlgebraElement(Mat m) : m_(std::move(m)) {
  check_square(m_, "algebra element");
  const double scale = std::max(1.0, m_.norm());
  if (std::abs(m_.trace()) > kTraceTol * scale) {
    throw input_error("NotTraceless", "|trace| = " + std::to_string(std::abs(m_.trace())));
  }
}

AlgebraElement AlgebraElement::zero(int n) { return AlgebraElement(Mat::Zero(n, n)); }

AlgebraElement AlgebraElement::project(const Mat& m) {
  check_square(m, "algebra element");
  const int n = static_cast<int>(m.rows());
  Mat out = m - (m.trace() / static_cast<double>(n)) * identity(n);
  return AlgebraElement(std::move(out), Unchecked{});
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  check_same_size(m_, o.m_);
  return AlgebraElement(Mat(m_ + o.m_), Unchecked{});
}
AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  check_same_size(m_, o.m_);
  return AlgebraElement(Mat(m_ - o.m_), Unchecked{});
}
AlgebraElement AlgebraElement::operator-() const { return AlgebraElement(Mat(-m_), Unchecked{}); }
AlgebraElement operator*(cplx s, const AlgebraElement& x) {
  return AlgebraElement(Mat(s * x.m_), AlgebraElement::Unchecked{});
}

GroupElement::GroupElement(Mat m) : m_(std::move(m)) {
  check_square(m_, "group element");
  const double scale = std::max(1.0, std::pow(m_.norm(), static_cast<double>(m_.rows())));
  if (std::abs(m_.determinant() - 1.0) > kDetTol * scale) {
    throw input_error("NotUnimodular", "|det - 1| = " + std::to_string(std::abs(m_.determinant() - 1.0)));
  }
}

GroupElement GroupElement::identity(int n) { return GroupElement(Mat::Identity(n, n), Unchecked{}); }

GroupElement GroupElement::inverse() const { return GroupElement(Mat(m_.inverse()), Unchecked{}); }

GroupElement GroupElement::operator*(const GroupElement& o) const {
  check_same_size(m_, o.m_);
  return GroupElement(Mat(m_ * o.m_), Unchecked{});
}

// ---------------------------------------------------------------------------
// Basis and ad

std::vector<Mat> sl_basis(int n) {
  std::vector<Mat> basis;
  basis.reserve(static_cast<size_t>(n * n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(e);
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    Mat h = Mat::Zero(n, n);
    h(i, i) = 1.0;
    h(i + 1, i + 1) = -1.0;
    basis.push_back(h);
  }
  return basis;
}

Eigen::VectorXcd sl_coordinates(const Mat& x) {
  const int n = static_cast<int>(x.rows());
  Eigen::VectorXcd c(n * n - 1);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) c(k++) = x(i, j);
  // x_ii = c_i - c_{i-1} for the H_i coefficients c_i, so c_i is a partial sum.
  cplx partial = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    partial += x(i, i);
    c(k++) = partial;
  }
  return c;
}

Mat from_sl_coordinates(int n, const Eigen::VectorXcd& c) {
  const auto basis = sl_basis(n);
  Mat x = Mat::Zero(n, n);
  for (size_t k = 0; k < basis.size(); ++k) x += c(static_cast<Eigen::Index>(k)) * basis[k];
  return x;
}

AlgebraOperator ad_matrix(const Mat& x) {
  const int n = static_cast<int>(x.rows());
  const auto basis = sl_basis(n);
  AlgebraOperator ad(n * n - 1, n * n - 1);
  for (size_t k = 0; k < basis.size(); ++k) {
    ad.col(static_cast<Eigen::Index>(k)) = sl_coordinates(commutator(x, basis[k]));
  }
  return ad;
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  check_same_size(x.matrix(), y.matrix());
  return AlgebraElement::project(commutator(x.matrix(), y.matrix()));
}

cplx killing_form(const Mat& x, const Mat& y) {
  check_same_size(x, y);
  const double n = static_cast<double>(x.rows());
  return 2.0 * n * (x * y).trace();
}

cplx killing_form(const AlgebraElement& x, const AlgebraElement& y) {
  return killing_form(x.matrix(), y.matrix());
}

cplx killing_form_ad_trace(const AlgebraElement& x, const AlgebraElement& y) {
  check_same_size(x.matrix(), y.matrix());
  return (ad_matrix(x.matrix()) * ad_matrix(y.matrix())).trace();
}

std::vector<Mat> killing_dual_basis(int n) {
  const auto basis = sl_basis(n);
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd gram(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) gram(i, j) = killing_form(basis[i], basis[j]);
  // d_j = sum_k G^{-1}_{kj} b_k gives kappa(b_i, d_j) = (G G^{-1})_{ij}.
  const Eigen::MatrixXcd inv = gram.inverse();
  std::vector<Mat> dual;
  for (Eigen::Index j = 0; j < d; ++j) {
    Mat dj = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k < d; ++k) dj += inv(k, j) * basis[static_cast<size_t>(k)];
    dual.push_back(dj);
  }
  return dual;
}

// ---------------------------------------------------------------------------
// Exponential

namespace {

// Pade degrees and the 1-norm bounds below which they reach unit roundoff
// (Higham, scaling and squaring revisited).
constexpr std::array<int, 5> kPadeDegree{3, 5, 7, 9, 13};
constexpr std::array<double, 5> kPadeTheta{1.495585217958292e-2, 2.539398330063230e-1,
                                           9.504178996162932e-1, 2.097847961257068e0,
                                           5.371920351148152e0};

std::vector<double> pade_coefficients(int m) {
  switch (m) {
    case 3: return {120., 60., 12., 1.};
    case 5: return {30240., 15120., 3360., 420., 30., 1.};
    case 7: return {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
    case 9:
      return {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
              2162160.,     110880.,     3960.,       90.,         1.};
    default:
      return {64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
              129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
              1323241920.,        40840800.,          960960.,           16380.,
              182.,               1.};
  }
}

Mat pade(const Mat& a, int m) {
  const int n = static_cast<int>(a.rows());
  const auto b = pade_coefficients(m);
  const Mat id = identity(n);
  const Mat a2 = a * a;
  Mat u, v;
  if (m <= 9) {
    Mat power = id;
    Mat uu = b[1] * id;
    v = b[0] * id;
    for (int k = 2; k <= m; k += 2) {
      power = power * a2;
      v += b[static_cast<size_t>(k)] * power;
      if (k + 1 <= m) uu += b[static_cast<size_t>(k + 1)] * power;
    }
    u = a * uu;
  } else {
    const Mat a4 = a2 * a2;
    const Mat a6 = a4 * a2;
    u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  }
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Mat matrix_exp(const Mat& x) {
  check_square(x, "exponent");
  const double nrm = norm1(x);
  if (!std::isfinite(nrm) || nrm > 1e300) throw numerical_error("ExpOverflow", "exponent norm too large");
  for (size_t i = 0; i + 1 < kPadeDegree.size(); ++i) {
    if (nrm <= kPadeTheta[i]) return pade(x, kPadeDegree[i]);
  }
  int s = 0;
  if (nrm > kPadeTheta.back()) s = static_cast<int>(std::ceil(std::log2(nrm / kPadeTheta.back())));
  Mat r = pade(x / std::ldexp(1.0, s), 13);
  for (int i = 0; i < s; ++i) r = r * r;
  if (!r.allFinite()) throw numerical_error("ExpOverflow", "matrix exponential overflowed");
  return r;
}

GroupElement group_exp(const AlgebraElement& x) {
  Mat r = matrix_exp(x.matrix());
  // exp of a traceless matrix has det e^0 = 1; remove rounding drift.
  const cplx det = r.determinant();
  if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det))) {
    throw numerical_error("ExpOverflow", "exponential is numerically singular");
  }
  r *= std::pow(det, -1.0 / static_cast<double>(x.n()));
  return GroupElement(std::move(r));
}

Mat dexp_left(const Mat& x, const Mat& xdot) {
  check_same_size(x, xdot);
  int s = 0;
  const double nrm = x.norm();
  if (nrm > 2.0) s = static_cast<int>(std::ceil(std::log2(nrm / 2.0)));
  const double scale = std::ldexp(1.0, -s);
  const Mat y = scale * x;
  const Mat ydot = scale * xdot;

  // sum_{k>=0} (-1)^k / (k+1)! ad_y^k (ydot)
  Mat term = ydot;
  Mat acc = ydot;
  for (int k = 1; k < 80; ++k) {
    term = commutator(y, term) * (-1.0 / static_cast<double>(k + 1));
    acc += term;
    if (term.norm() < 1e-14 * std::max(acc.norm(), 1e-300)) break;
  }
  if (s == 0) return acc;

  // delta(E^2) = Ad(E)^{-1} delta(E) + delta(E)
  Mat e = matrix_exp(y);
  for (int i = 0; i < s; ++i) {
    acc = e.partialPivLu().solve(acc * e) + acc;
    e = e * e;
  }
  return acc;
}

Mat adjoint(const Mat& g, const Mat& x) {
  check_same_size(g, x);
  const auto lu = g.partialPivLu();
  const Mat ginv = lu.inverse();
  const double cond = g.norm() * ginv.norm();
  if (!std::isfinite(cond) || cond > 1e12) {
    throw numerical_error("SingularGroupElement", "condition number " + std::to_string(cond));
  }
  return g * x * ginv;
}

AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x) {
  return AlgebraElement::project(adjoint(g.matrix(), x.matrix()));
}

// ---------------------------------------------------------------------------
// Cartan projectors

std::vector<CartanProjector> cartan_projectors(const AlgebraElement& h) {
  const AlgebraOperator ad = ad_matrix(h.matrix());
  const auto d = ad.rows();
  const AlgebraOperator id = AlgebraOperator::Identity(d, d);
  const double ad_norm = ad.norm();
  if (ad_norm == 0.0) return {CartanProjector{0.0, id}};

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(ad, false);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("EigenFailure", "eigenvalues of ad(h) did not converge");
  }
  std::vector<cplx> raw(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
  std::sort(raw.begin(), raw.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });

  // Greedy clustering; each cluster represented by its mean.
  const double sep = 1e-6 * ad_norm;
  std::vector<std::vector<cplx>> clusters;
  for (cplx ev : raw) {
    bool placed = false;
    for (auto& c : clusters) {
      if (std::abs(c.front() - ev) < sep) {
        c.push_back(ev);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({ev});
  }
  std::vector<cplx> roots;
  for (const auto& c : clusters) {
    cplx sum = 0.0;
    for (cplx v : c) sum += v;
    roots.push_back(sum / static_cast<double>(c.size()));
  }

  // Square-free minimal polynomial: prod (ad - l_i) must vanish.
  AlgebraOperator prod = id;
  double scale = 1.0;
  for (cplx r : roots) {
    prod = prod * (ad - r * id);
    scale *= ad_norm + std::abs(r);
  }
  if (prod.norm() > 1e-7 * scale) {
    throw math_error("NonSemisimple", "ad(h) is not diagonalizable (residual " +
                                          std::to_string(prod.norm() / scale) + ")");
  }

  std::vector<CartanProjector> out;
  for (size_t i = 0; i < roots.size(); ++i) {
    AlgebraOperator q = id;
    cplx denom = 1.0;
    for (size_t j = 0; j < roots.size(); ++j) {
      if (j == i) continue;
      q = q * (ad - roots[j] * id);
      denom *= roots[i] - roots[j];
    }
    out.push_back(CartanProjector{roots[i], q / denom});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conjugacy invariants

std::vector<cplx> characteristic_polynomial(const Mat& m) {
  // Faddeev-LeVerrier.
  const int n = static_cast<int>(m.rows());
  std::vector<cplx> c(static_cast<size_t>(n + 1));
  c[0] = 1.0;
  Mat mk = Mat::Zero(n, n);
  const Mat id = identity(n);
  for (int k = 1; k <= n; ++k) {
    mk = m * mk + c[static_cast<size_t>(k - 1)] * id;
    c[static_cast<size_t>(k)] = -(m * mk).trace() / static_cast<double>(k);
  }
  return c;
}

namespace {

void check_tuple(std::span<const GroupElement> tuple) {
  if (tuple.empty()) throw input_error("EmptyTuple", "tuple must be nonempty");
  for (const auto& g : tuple) check_same_size(tuple.front().matrix(), g.matrix());
}

}  // namespace

ConjugacyInvariants trace_word_invariants(std::span<const GroupElement> tuple, int max_word_len) {
  check_tuple(tuple);
  if (max_word_len < 1) throw input_error("BadWordLength", "word length must be >= 1");
  const int n = tuple.front().n();
  ConjugacyInvariants inv;
  inv.n = n;
  inv.max_word_len = max_word_len;
  for (const auto& g : tuple) inv.char_polys.push_back(characteristic_polynomial(g.matrix()));

  std::vector<std::pair<Word, Mat>> level{{Word{}, identity(n)}};
  inv.word_traces[Word{}] = static_cast<double>(n);
  for (int len = 1; len <= max_word_len; ++len) {
    std::vector<std::pair<Word, Mat>> next;
    next.reserve(level.size() * tuple.size());
    for (const auto& [w, m] : level) {
      for (size_t i = 0; i < tuple.size(); ++i) {
        Word wi = w;
        wi.push_back(static_cast<int>(i));
        Mat mi = m * tuple[i].matrix();
        inv.word_traces[wi] = mi.trace();
        next.emplace_back(std::move(wi), std::move(mi));
      }
    }
    level = std::move(next);
  }
  return inv;
}

int word_span_dimension(std::span<const GroupElement> tuple, int max_word_len, double rel_tol) {
  check_tuple(tuple);
  const int n = tuple.front().n();
  const Eigen::Index full = n * n;
  std::vector<Eigen::VectorXcd> basis;

  auto try_add = [&](const Mat& m) {
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(m.data(), full);
    const double nrm = v.norm();
    if (nrm == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    if (v.norm() <= rel_tol * nrm) return false;
    basis.push_back(v / v.norm());
    return true;
  };

  // Only words that enlarged the span are extended; extensions of dependent
  // words stay in the span of extensions of shorter ones.
  std::deque<std::pair<int, Mat>> queue;
  if (try_add(identity(n))) queue.emplace_back(0, identity(n));
  while (!queue.empty() && static_cast<Eigen::Index>(basis.size()) < full) {
    auto [len, m] = queue.front();
    queue.pop_front();
    if (len >= max_word_len) continue;
    for (const auto& g : tuple) {
      Mat next = m * g.matrix();
      if (try_add(next)) queue.emplace_back(len + 1, std::move(next));
    }
  }
  return static_cast<int>(basis.size());
}

bool is_generic_tuple(std::span<const GroupElement> tuple) {
  check_tuple(tuple);
  const int n = tuple.front().n();
  return word_span_dimension(tuple, 2 * n * n) == n * n;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return "equivalent";
    case Verdict::Distinct: return "distinct";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

Verdict simultaneous_conjugacy_test(std::span<const GroupElement> a, std::span<const GroupElement> b,
                                    double tol, int max_word_len) {
  check_tuple(a);
  check_tuple(b);
  if (a.size() != b.size()) throw input_error("SizeMismatch", "tuples have different lengths");
  check_same_size(a.front().matrix(), b.front().matrix());

  auto differ = [tol](cplx x, cplx y) {
    return std::abs(x - y) > tol * std::max({1.0, std::abs(x), std::abs(y)});
  };
  const auto ia = trace_word_invariants(a, max_word_len);
  const auto ib = trace_word_invariants(b, max_word_len);
  for (size_t i = 0; i < ia.char_polys.size(); ++i)
    for (size_t k = 0; k < ia.char_polys[i].size(); ++k)
      if (differ(ia.char_polys[i][k], ib.char_polys[i][k])) return Verdict::Distinct;
  for (const auto& [w, t] : ia.word_traces)
    if (differ(t, ib.word_traces.at(w))) return Verdict::Distinct;
  return (is_generic_tuple(a) && is_generic_tuple(b)) ? Verdict::Equivalent : Verdict::Indeterminate;
}

}  // namespace holo::lie

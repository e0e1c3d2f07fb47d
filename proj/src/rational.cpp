#include "holo/rational.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "holo/error.hpp"

namespace holo {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

RationalFunction RationalFunction::constant(cplx c) { return monomial(0, c); }

RationalFunction RationalFunction::monomial(int degree, cplx c) {
  if (degree < 0) throw input_error("BadDegree", "monomial degree must be >= 0");
  RationalFunction f;
  f.add_poly_term(degree, c);
  f.trim();
  return f;
}

RationalFunction RationalFunction::pole(cplx location, int order, cplx c) {
  if (order < 0) throw input_error("BadOrder", "pole order must be >= 0");
  if (order == 0) return constant(c);
  RationalFunction f;
  f.add_pole_term(location, order, c);
  f.trim();
  return f;
}

void RationalFunction::add_pole_term(cplx location, int order, cplx c) {
  if (order > kMaxPoleOrder) throw input_error("PoleOrderTooLarge", "pole order exceeds " + std::to_string(kMaxPoleOrder));
  auto it = std::find_if(parts_.begin(), parts_.end(), [&](const PrincipalPart& p) { return p.location == location; });
  if (it == parts_.end()) {
    parts_.push_back({location, {}});
    it = std::prev(parts_.end());
  }
  if (static_cast<int>(it->coeffs.size()) < order) it->coeffs.resize(static_cast<size_t>(order), 0.0);
  it->coeffs[static_cast<size_t>(order - 1)] += c;
}

void RationalFunction::add_poly_term(int degree, cplx c) {
  if (degree > kMaxPolynomialDegree) {
    throw input_error("DegreeTooLarge", "polynomial degree exceeds " + std::to_string(kMaxPolynomialDegree));
  }
  if (static_cast<int>(poly_.size()) <= degree) poly_.resize(static_cast<size_t>(degree + 1), 0.0);
  poly_[static_cast<size_t>(degree)] += c;
}

void RationalFunction::trim() {
  while (!poly_.empty() && poly_.back() == 0.0) poly_.pop_back();
  for (auto& p : parts_)
    while (!p.coeffs.empty() && p.coeffs.back() == 0.0) p.coeffs.pop_back();
  std::erase_if(parts_, [](const PrincipalPart& p) { return p.coeffs.empty(); });
}

cplx RationalFunction::operator()(cplx z) const {
  cplx sum = 0.0;
  for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) sum = sum * z + *it;
  for (const auto& p : parts_) {
    const cplx w = z - p.location;
    if (std::abs(w) <= 1e-14 * std::max(1.0, std::abs(p.location))) {
      throw input_error("EvaluationAtPole", "evaluation at a pole");
    }
    const cplx inv = 1.0 / w;
    cplx local = 0.0;
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) local = (local + *it) * inv;
    sum += local;
  }
  return sum;
}

RationalFunction RationalFunction::derivative() const {
  RationalFunction d;
  for (size_t k = 1; k < poly_.size(); ++k) d.add_poly_term(static_cast<int>(k - 1), static_cast<double>(k) * poly_[k]);
  for (const auto& p : parts_) {
    for (size_t i = 0; i < p.coeffs.size(); ++i) {
      const int m = static_cast<int>(i) + 1;
      d.add_pole_term(p.location, m + 1, -static_cast<double>(m) * p.coeffs[i]);
    }
  }
  d.trim();
  return d;
}

cplx RationalFunction::residue(cplx p) const {
  for (const auto& part : parts_)
    if (part.location == p) return part.coeffs.empty() ? cplx{} : part.coeffs.front();
  return 0.0;
}

std::vector<cplx> RationalFunction::poles() const {
  std::vector<cplx> out;
  for (const auto& p : parts_) out.push_back(p.location);
  return out;
}

bool RationalFunction::poles_within(std::span<const cplx> allowed) const {
  return std::all_of(parts_.begin(), parts_.end(), [&](const PrincipalPart& p) {
    return std::find(allowed.begin(), allowed.end(), p.location) != allowed.end();
  });
}

int RationalFunction::polynomial_degree() const { return static_cast<int>(poly_.size()) - 1; }
bool RationalFunction::is_zero() const { return poly_.empty() && parts_.empty(); }
bool RationalFunction::is_constant() const { return parts_.empty() && poly_.size() <= 1; }

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  RationalFunction r = *this;
  for (size_t k = 0; k < o.poly_.size(); ++k) r.add_poly_term(static_cast<int>(k), o.poly_[k]);
  for (const auto& p : o.parts_)
    for (size_t i = 0; i < p.coeffs.size(); ++i) r.add_pole_term(p.location, static_cast<int>(i) + 1, p.coeffs[i]);
  r.trim();
  return r;
}

RationalFunction RationalFunction::operator-() const { return cplx(-1.0) * *this; }
RationalFunction RationalFunction::operator-(const RationalFunction& o) const { return *this + (-o); }

RationalFunction operator*(cplx s, const RationalFunction& f) {
  RationalFunction r = f;
  for (auto& c : r.poly_) c *= s;
  for (auto& p : r.parts_)
    for (auto& c : p.coeffs) c *= s;
  r.trim();
  return r;
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  RationalFunction r;
  // polynomial x polynomial
  for (size_t i = 0; i < poly_.size(); ++i)
    for (size_t j = 0; j < o.poly_.size(); ++j) r.add_poly_term(static_cast<int>(i + j), poly_[i] * o.poly_[j]);

  // (z-p)^{-m} * z^d: expand z^d = sum_k C(d,k) p^{d-k} (z-p)^k.
  auto pole_times_poly = [&r](const PrincipalPart& part, const std::vector<cplx>& poly) {
    const cplx p = part.location;
    for (size_t i = 0; i < part.coeffs.size(); ++i) {
      const int m = static_cast<int>(i) + 1;
      for (size_t d = 0; d < poly.size(); ++d) {
        const cplx c = part.coeffs[i] * poly[d];
        if (c == 0.0) continue;
        for (int k = 0; k <= static_cast<int>(d); ++k) {
          const cplx ck = c * binomial(static_cast<int>(d), k) * std::pow(p, static_cast<int>(d) - k);
          const int e = k - m;  // exponent of (z - p)
          if (e < 0) {
            r.add_pole_term(p, -e, ck);
          } else {
            // (z-p)^e = sum_q C(e,q) (-p)^{e-q} z^q
            for (int q = 0; q <= e; ++q) r.add_poly_term(q, ck * binomial(e, q) * std::pow(-p, e - q));
          }
        }
      }
    }
  };
  for (const auto& part : parts_) pole_times_poly(part, o.poly_);
  for (const auto& part : o.parts_) pole_times_poly(part, poly_);

  // pole x pole
  for (const auto& a : parts_) {
    for (const auto& b : o.parts_) {
      for (size_t i = 0; i < a.coeffs.size(); ++i) {
        for (size_t j = 0; j < b.coeffs.size(); ++j) {
          const cplx c = a.coeffs[i] * b.coeffs[j];
          if (c == 0.0) continue;
          const int m = static_cast<int>(i) + 1;
          const int n = static_cast<int>(j) + 1;
          if (a.location == b.location) {
            r.add_pole_term(a.location, m + n, c);
            continue;
          }
          // 1/((z-p)^m (z-q)^n) = sum_i A_i (z-p)^{-i} + sum_j B_j (z-q)^{-j},
          // A_i = (-1)^{m-i} C(n+m-i-1, m-i) (p-q)^{-(n+m-i)}.
          const cplx pq = a.location - b.location;
          for (int s = 1; s <= m; ++s) {
            const double sign = ((m - s) % 2 == 0) ? 1.0 : -1.0;
            r.add_pole_term(a.location, s, c * sign * binomial(n + m - s - 1, m - s) * std::pow(pq, -(n + m - s)));
          }
          for (int s = 1; s <= n; ++s) {
            const double sign = ((n - s) % 2 == 0) ? 1.0 : -1.0;
            r.add_pole_term(b.location, s, c * sign * binomial(n + m - s - 1, n - s) * std::pow(-pq, -(n + m - s)));
          }
        }
      }
    }
  }
  r.trim();
  return r;
}

}  // namespace holo

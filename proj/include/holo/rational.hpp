#pragma once

#include <complex>
#include <span>
#include <vector>

namespace holo {

using cplx = std::complex<double>;

inline constexpr int kMaxPolynomialDegree = 32;
inline constexpr int kMaxPoleOrder = 32;

/// Rational function with poles at finitely many points, stored in partial-fraction
/// form  sum_{j,m} c_{j,m} (z - p_j)^{-m} + sum_d a_d z^d.
/// Arithmetic is exact at the coefficient level.
class RationalFunction {
 public:
  struct PrincipalPart {
    cplx location;
    std::vector<cplx> coeffs;  ///< coeffs[m-1] multiplies (z - location)^{-m}
  };

  RationalFunction() = default;

  static RationalFunction constant(cplx c);
  /// c z^degree
  static RationalFunction monomial(int degree, cplx c = 1.0);
  /// c (z - location)^{-order}; order 0 gives the constant c.
  static RationalFunction pole(cplx location, int order, cplx c = 1.0);

  /// Throws Input/EvaluationAtPole at a pole.
  cplx operator()(cplx z) const;
  RationalFunction derivative() const;
  /// Coefficient of (z - p)^{-1}; zero when p is not a pole.
  cplx residue(cplx p) const;

  const std::vector<cplx>& polynomial() const noexcept { return poly_; }
  const std::vector<PrincipalPart>& principal_parts() const noexcept { return parts_; }
  /// Locations carrying a nonzero principal part.
  std::vector<cplx> poles() const;
  bool poles_within(std::span<const cplx> allowed) const;
  int polynomial_degree() const;
  bool is_zero() const;
  bool is_constant() const;

  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator-() const;
  friend RationalFunction operator*(cplx s, const RationalFunction& f);

 private:
  void add_pole_term(cplx location, int order, cplx c);
  void add_poly_term(int degree, cplx c);
  void trim();

  std::vector<cplx> poly_;
  std::vector<PrincipalPart> parts_;
};

}  // namespace holo

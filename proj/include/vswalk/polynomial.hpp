#pragma once

#include <string_view>
#include <vector>

#include "vswalk/types.hpp"

namespace vswalk {

// Sparse multivariate polynomial with exact value, gradient and Hessian.
// Used both for test functions and for the log-density weight h.
class Polynomial {
 public:
  struct Term {
    double coef = 0.0;
    std::vector<int> powers;
  };

  explicit Polynomial(int dim = 0);
  Polynomial(int dim, std::vector<Term> terms);

  static Polynomial constant(int dim, double value);
  static Polynomial coordinate(int dim, int index, double coef = 1.0);
  // offset + a.x
  static Polynomial linear(const Vec& a, double offset = 0.0);
  // offset + a.x + x^T M x / 2
  static Polynomial quadratic(const Vec& a, const Mat& m, double offset = 0.0);
  // Grammar: sums of products of numbers and variables x1..xn, z (= last coordinate), with ^k powers.
  static Polynomial parse(std::string_view text, int dim);

  int dim() const { return dim_; }
  int degree() const;
  // Degree counting the last coordinate twice (the Carnot dilation weight).
  int weighted_degree() const;
  bool is_constant() const { return degree() <= 0; }
  const std::vector<Term>& terms() const { return terms_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double s) const;

 private:
  void canonicalize();

  int dim_ = 0;
  std::vector<Term> terms_;
};

// Admissible weight family: polynomials of degree <= 2.
// Spec strings: const:v | linear:a1,...,an | quad:a1,...,an;m11,m12,...,mnn | poly:<expression>
Polynomial parse_weight(std::string_view spec, int dim);

// Upper bound of h over the closed ball B(center, radius) for a weight of degree <= 2.
double weight_upper_bound(const Polynomial& h, const Vec& center, double radius);

}  // namespace vswalk

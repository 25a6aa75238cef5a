#include "vswalk/polynomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "vswalk/errors.hpp"

namespace vswalk {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

class Parser {
 public:
  Parser(std::string_view s, int dim) : s_(s), dim_(dim) {}

  Polynomial run() {
    Polynomial acc = Polynomial::constant(dim_, 0.0);
    skip();
    bool first = true;
    while (pos_ < s_.size()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      acc = acc + term().scaled(sign);
      first = false;
      skip();
    }
    if (first) fail("empty expression");
    return acc;
  }

 private:
  Polynomial term() {
    Polynomial t = factor();
    skip();
    while (peek() == '*') {
      ++pos_;
      skip();
      t = t * factor();
      skip();
    }
    return t;
  }

  Polynomial factor() {
    char ch = peek();
    if (ch == 'x' || ch == 'z') {
      ++pos_;
      int index = dim_ - 1;
      if (ch == 'x') {
        int k = integer();
        if (k < 1 || k > dim_) fail("variable index out of range");
        index = k - 1;
      }
      skip();
      int power = 1;
      if (peek() == '^') {
        ++pos_;
        skip();
        power = integer();
        if (power < 0) fail("negative power");
      }
      std::vector<int> powers(dim_, 0);
      powers[index] = power;
      return Polynomial(dim_, {{1.0, powers}});
    }
    if (ch == '(') fail("parentheses are not supported");
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == begin) fail("expected number or variable");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return Polynomial::constant(dim_, v);
  }

  int integer() {
    int v = 0;
    const char* begin = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == begin) fail("expected integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("polynomial '" + std::string(s_) + "': " + what + " at position " +
                          std::to_string(pos_));
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty())
      throw ValidationError("invalid number '" + std::string(item) + "'");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

}  // namespace

Polynomial::Polynomial(int dim) : dim_(dim) {
  require(dim >= 0 && dim <= kMaxDim, "polynomial dimension out of range");
}

Polynomial::Polynomial(int dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {
  require(dim >= 0 && dim <= kMaxDim, "polynomial dimension out of range");
  for (const auto& t : terms_) {
    require(static_cast<int>(t.powers.size()) == dim, "term dimension mismatch");
    for (int p : t.powers) require(p >= 0, "negative exponent");
    require(std::isfinite(t.coef), "non-finite coefficient");
  }
  canonicalize();
}

Polynomial Polynomial::constant(int dim, double value) {
  return Polynomial(dim, {{value, std::vector<int>(dim, 0)}});
}

Polynomial Polynomial::coordinate(int dim, int index, double coef) {
  require(index >= 0 && index < dim, "coordinate index out of range");
  std::vector<int> p(dim, 0);
  p[index] = 1;
  return Polynomial(dim, {{coef, p}});
}

Polynomial Polynomial::linear(const Vec& a, double offset) {
  const int n = static_cast<int>(a.size());
  std::vector<Term> terms{{offset, std::vector<int>(n, 0)}};
  for (int i = 0; i < n; ++i) {
    std::vector<int> p(n, 0);
    p[i] = 1;
    terms.push_back({a[i], p});
  }
  return Polynomial(n, std::move(terms));
}

Polynomial Polynomial::quadratic(const Vec& a, const Mat& m, double offset) {
  const int n = static_cast<int>(a.size());
  require(m.rows() == n && m.cols() == n, "quadratic weight: matrix shape mismatch");
  Polynomial p = linear(a, offset);
  std::vector<Term> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<int> pw(n, 0);
      pw[i] += 1;
      pw[j] += 1;
      terms.push_back({0.5 * m(i, j), pw});
    }
  }
  return p + Polynomial(n, std::move(terms));
}

Polynomial Polynomial::parse(std::string_view text, int dim) { return Parser(text, dim).run(); }

void Polynomial::canonicalize() {
  std::map<std::vector<int>, double> merged;
  for (auto& t : terms_) merged[t.powers] += t.coef;
  terms_.clear();
  for (auto& [p, c] : merged)
    if (c != 0.0) terms_.push_back({c, p});
}

int Polynomial::degree() const {
  int deg = terms_.empty() ? -1 : 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int p : t.powers) s += p;
    deg = std::max(deg, s);
  }
  return deg;
}

int Polynomial::weighted_degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int i = 0; i < dim_; ++i) s += t.powers[i] * (i == dim_ - 1 ? 2 : 1);
    deg = std::max(deg, s);
  }
  return deg;
}

double Polynomial::value(const Vec& x) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (int i = 0; i < dim_; ++i)
      if (t.powers[i]) v *= ipow(x[i], t.powers[i]);
    sum += v;
  }
  return sum;
}

Vec Polynomial::gradient(const Vec& x) const {
  Vec g = Vec::Zero(dim_);
  for (const auto& t : terms_) {
    for (int k = 0; k < dim_; ++k) {
      if (t.powers[k] == 0) continue;
      double v = t.coef * t.powers[k];
      for (int i = 0; i < dim_; ++i) v *= ipow(x[i], t.powers[i] - (i == k ? 1 : 0));
      g[k] += v;
    }
  }
  return g;
}

Mat Polynomial::hessian(const Vec& x) const {
  Mat h = Mat::Zero(dim_, dim_);
  for (const auto& t : terms_) {
    for (int k = 0; k < dim_; ++k) {
      for (int l = k; l < dim_; ++l) {
        int pk = t.powers[k], pl = t.powers[l];
        double factor = (k == l) ? double(pk) * (pk - 1) : double(pk) * pl;
        if (factor == 0.0) continue;
        double v = t.coef * factor;
        for (int i = 0; i < dim_; ++i) v *= ipow(x[i], t.powers[i] - (i == k) - (i == l));
        h(k, l) += v;
        if (l != k) h(l, k) += v;
      }
    }
  }
  return h;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  require(dim_ == o.dim_, "polynomial dimension mismatch");
  std::vector<Term> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return Polynomial(dim_, std::move(t));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  require(dim_ == o.dim_, "polynomial dimension mismatch");
  std::vector<Term> out;
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      std::vector<int> p(dim_);
      for (int i = 0; i < dim_; ++i) p[i] = a.powers[i] + b.powers[i];
      out.push_back({a.coef * b.coef, p});
    }
  }
  return Polynomial(dim_, std::move(out));
}

Polynomial Polynomial::scaled(double s) const {
  std::vector<Term> t = terms_;
  for (auto& x : t) x.coef *= s;
  return Polynomial(dim_, std::move(t));
}

Polynomial parse_weight(std::string_view spec, int dim) {
  auto colon = spec.find(':');
  require(colon != std::string_view::npos, "weight spec needs a 'kind:' prefix");
  std::string_view kind = spec.substr(0, colon);
  std::string_view body = spec.substr(colon + 1);
  Polynomial h(dim);
  if (kind == "const") {
    auto v = parse_list(body);
    require(v.size() == 1, "const weight takes one value");
    h = Polynomial::constant(dim, v[0]);
  } else if (kind == "linear") {
    auto v = parse_list(body);
    require(static_cast<int>(v.size()) == dim, "linear weight needs one coefficient per coordinate");
    h = Polynomial::linear(Eigen::Map<const Eigen::VectorXd>(v.data(), dim));
  } else if (kind == "quad") {
    auto semi = body.find(';');
    require(semi != std::string_view::npos, "quad weight: expected 'a1,..,an;m11,..,mnn'");
    auto a = parse_list(body.substr(0, semi));
    auto m = parse_list(body.substr(semi + 1));
    require(static_cast<int>(a.size()) == dim, "quad weight: linear part size mismatch");
    require(static_cast<int>(m.size()) == dim * dim, "quad weight: matrix size mismatch");
    Mat mm = Eigen::Map<const Eigen::MatrixXd>(m.data(), dim, dim).transpose();
    require((mm - mm.transpose()).norm() <= 1e-12 * (1.0 + mm.norm()), "quad weight: matrix not symmetric");
    h = Polynomial::quadratic(Eigen::Map<const Eigen::VectorXd>(a.data(), dim), mm);
  } else if (kind == "poly") {
    h = Polynomial::parse(body, dim);
  } else {
    throw ValidationError("unknown weight kind '" + std::string(kind) + "'");
  }
  require(h.degree() <= 2, "weight must have degree <= 2");
  return h;
}

double weight_upper_bound(const Polynomial& h, const Vec& center, double radius) {
  require(h.degree() <= 2, "weight must have degree <= 2");
  return h.value(center) + h.gradient(center).norm() * radius +
         0.5 * h.hessian(center).norm() * radius * radius;
}

}  // namespace vswalk

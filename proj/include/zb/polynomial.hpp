#ifndef ZB_POLYNOMIAL_HPP
#define ZB_POLYNOMIAL_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace zb {

/// Exponent vector of a monomial over a fixed number of variables.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<int> exponents);

    static Monomial one(std::size_t num_vars);
    static Monomial variable(std::size_t num_vars, std::size_t index, int power = 1);

    std::size_t num_vars() const { return exps_.size(); }
    int degree() const { return degree_; }
    int operator[](std::size_t i) const { return exps_[i]; }
    const std::vector<int>& exponents() const { return exps_; }

    Monomial operator*(const Monomial& other) const;
    double eval(std::span<const double> x) const;

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

private:
    std::vector<int> exps_;
    int degree_ = 0;
};

/// Graded order: total degree ascending, then exponent vectors in
/// descending lexicographic order (1, x1, x2, x1^2, x1 x2, x2^2, ...).
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

/// All monomials in `num_vars` variables of total degree <= max_degree, in grlex order.
std::vector<Monomial> monomials_up_to(std::size_t num_vars, int max_degree);

/// C(n, k) as a double so that oversized counts never overflow.
double binomial(std::size_t n, std::size_t k);

/// Number of monomials of degree <= d in n variables, i.e. C(n + d, d).
double monomial_count(std::size_t num_vars, int max_degree);

/// Sparse multivariate polynomial with real coefficients.
///
/// Terms with an exactly zero coefficient are never stored.
class Polynomial {
public:
    using TermMap = std::map<Monomial, double, GrlexLess>;

    explicit Polynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}

    static Polynomial constant(std::size_t num_vars, double value);
    static Polynomial variable(std::size_t num_vars, std::size_t index);
    static Polynomial term(const Monomial& m, double coeff);

    std::size_t num_vars() const { return num_vars_; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    /// Maximum total degree; 0 for constants and the zero polynomial.
    int degree() const;
    double coeff(const Monomial& m) const;

    void add_term(const Monomial& m, double coeff);

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(double s);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial operator-() const;

    Polynomial pow(int k) const;

    double eval(std::span<const double> x) const;
    double eval(const Eigen::VectorXd& x) const { return eval(std::span<const double>(x.data(), x.size())); }

    /// Substitutes variable i by subs[i]; all substitutes share one variable count.
    Polynomial compose(std::span<const Polynomial> subs) const;

    /// Substitutes y = M z + v, giving a polynomial in z (M.cols() variables).
    Polynomial compose_affine(const Eigen::MatrixXd& M, const Eigen::VectorXd& v) const;

    /// Re-indexes into a larger variable space: variable i becomes positions[i].
    Polynomial embed(std::size_t new_num_vars, std::span<const std::size_t> positions) const;

private:
    std::size_t num_vars_ = 0;
    TermMap terms_;
};

/// Max over monomials of |coeff_a - coeff_b|.
double max_coeff_difference(const Polynomial& a, const Polynomial& b);

} // namespace zb

#endif

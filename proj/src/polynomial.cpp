#include "zb/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zb/error.hpp"

namespace zb {

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents))
{
    for (int e : exps_) {
        if (e < 0) throw InvalidInput("negative exponent in monomial");
        degree_ += e;
    }
}

Monomial Monomial::one(std::size_t num_vars) { return Monomial(std::vector<int>(num_vars, 0)); }

Monomial Monomial::variable(std::size_t num_vars, std::size_t index, int power)
{
    std::vector<int> e(num_vars, 0);
    e.at(index) = power;
    return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const
{
    require_dims(other.num_vars() == num_vars(), "monomial product: variable count mismatch");
    Monomial out;
    out.exps_.resize(exps_.size());
    for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] = exps_[i] + other.exps_[i];
    out.degree_ = degree_ + other.degree_;
    return out;
}

double Monomial::eval(std::span<const double> x) const
{
    double v = 1.0;
    for (std::size_t i = 0; i < exps_.size(); ++i)
        for (int k = 0; k < exps_[i]; ++k) v *= x[i];
    return v;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const
{
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    const auto& ea = a.exponents();
    const auto& eb = b.exponents();
    return std::lexicographical_compare(eb.begin(), eb.end(), ea.begin(), ea.end());
}

namespace {

void enumerate(std::size_t pos, int remaining, std::vector<int>& cur, std::vector<Monomial>& out)
{
    if (pos + 1 == cur.size()) {
        cur[pos] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[pos] = e;
        enumerate(pos + 1, remaining - e, cur, out);
    }
}

} // namespace

std::vector<Monomial> monomials_up_to(std::size_t num_vars, int max_degree)
{
    std::vector<Monomial> out;
    if (num_vars == 0) {
        out.push_back(Monomial::one(0));
        return out;
    }
    std::vector<int> cur(num_vars, 0);
    for (int d = 0; d <= max_degree; ++d) enumerate(0, d, cur, out);
    return out;
}

double binomial(std::size_t n, std::size_t k)
{
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

double monomial_count(std::size_t num_vars, int max_degree)
{
    return binomial(num_vars + static_cast<std::size_t>(max_degree), static_cast<std::size_t>(max_degree));
}

Polynomial Polynomial::constant(std::size_t num_vars, double value)
{
    Polynomial p(num_vars);
    p.add_term(Monomial::one(num_vars), value);
    return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index)
{
    Polynomial p(num_vars);
    p.add_term(Monomial::variable(num_vars, index), 1.0);
    return p;
}

Polynomial Polynomial::term(const Monomial& m, double coeff)
{
    Polynomial p(m.num_vars());
    p.add_term(m, coeff);
    return p;
}

int Polynomial::degree() const
{
    // terms are grlex-ordered, so the last one has maximal degree
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coeff(const Monomial& m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double coeff)
{
    require_dims(m.num_vars() == num_vars_, "polynomial term: variable count mismatch");
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(m, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& other)
{
    require_dims(other.num_vars_ == num_vars_, "polynomial sum: variable count mismatch");
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other)
{
    require_dims(other.num_vars_ == num_vars_, "polynomial difference: variable count mismatch");
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(double s)
{
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    require_dims(a.num_vars_ == b.num_vars_, "polynomial product: variable count mismatch");
    Polynomial out(a.num_vars_);
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
}

Polynomial Polynomial::operator-() const
{
    Polynomial out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
}

Polynomial Polynomial::pow(int k) const
{
    if (k < 0) throw InvalidInput("negative polynomial power");
    Polynomial result = constant(num_vars_, 1.0);
    Polynomial base = *this;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

double Polynomial::eval(std::span<const double> x) const
{
    require_dims(x.size() == num_vars_, "polynomial evaluation: point dimension mismatch");
    double v = 0.0;
    for (const auto& [m, c] : terms_) v += c * m.eval(x);
    return v;
}

Polynomial Polynomial::compose(std::span<const Polynomial> subs) const
{
    require_dims(subs.size() == num_vars_, "composition: one substitute per variable required");
    const std::size_t out_vars = subs.empty() ? 0 : subs[0].num_vars();
    for (const auto& s : subs) require_dims(s.num_vars() == out_vars, "composition: substitutes disagree on variable count");

    // powers[i][k] = subs[i]^k, built lazily
    std::vector<std::vector<Polynomial>> powers(num_vars_);
    auto power = [&](std::size_t i, int k) -> const Polynomial& {
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(constant(out_vars, 1.0));
        while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * subs[i]);
        return cache[static_cast<std::size_t>(k)];
    };

    Polynomial out(out_vars);
    for (const auto& [m, c] : terms_) {
        Polynomial t = constant(out_vars, c);
        for (std::size_t i = 0; i < num_vars_; ++i)
            if (m[i] > 0) t = t * power(i, m[i]);
        out += t;
    }
    return out;
}

Polynomial Polynomial::compose_affine(const Eigen::MatrixXd& M, const Eigen::VectorXd& v) const
{
    require_dims(static_cast<std::size_t>(M.rows()) == num_vars_ && v.size() == M.rows(),
                 "affine composition: map shape mismatch");
    const auto nz = static_cast<std::size_t>(M.cols());
    std::vector<Polynomial> subs;
    subs.reserve(num_vars_);
    for (std::size_t i = 0; i < num_vars_; ++i) {
        Polynomial s = constant(nz, v(static_cast<Eigen::Index>(i)));
        for (std::size_t j = 0; j < nz; ++j)
            s.add_term(Monomial::variable(nz, j), M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        subs.push_back(std::move(s));
    }
    return compose(subs);
}

Polynomial Polynomial::embed(std::size_t new_num_vars, std::span<const std::size_t> positions) const
{
    require_dims(positions.size() == num_vars_, "embed: one position per variable required");
    Polynomial out(new_num_vars);
    for (const auto& [m, c] : terms_) {
        std::vector<int> e(new_num_vars, 0);
        for (std::size_t i = 0; i < num_vars_; ++i) {
            require_dims(positions[i] < new_num_vars, "embed: position out of range");
            e[positions[i]] += m[i];
        }
        out.add_term(Monomial(std::move(e)), c);
    }
    return out;
}

double max_coeff_difference(const Polynomial& a, const Polynomial& b)
{
    double worst = 0.0;
    const Polynomial diff = a - b;
    for (const auto& [m, c] : diff.terms()) worst = std::max(worst, std::abs(c));
    return worst;
}

} // namespace zb

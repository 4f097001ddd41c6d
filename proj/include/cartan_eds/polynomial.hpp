#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace cartan {

// Exponent vector with trailing zeros trimmed, so monomials in different
// numbers of variables compare equal when they agree.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<std::uint32_t> e) : e_(std::move(e)) { trim(); }

    static Monomial variable(std::size_t var, std::uint32_t power = 1) {
        if (power == 0) return {};
        std::vector<std::uint32_t> e(var + 1, 0);
        e[var] = power;
        return Monomial(std::move(e));
    }

    std::uint32_t operator[](std::size_t i) const { return i < e_.size() ? e_[i] : 0; }
    std::size_t width() const { return e_.size(); }
    unsigned degree() const { return deg_; }
    bool is_one() const { return e_.empty(); }
    const std::vector<std::uint32_t>& exponents() const { return e_; }

    Monomial operator*(const Monomial& o) const {
        std::vector<std::uint32_t> e(std::max(e_.size(), o.e_.size()), 0);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = (*this)[i] + o[i];
        return Monomial(std::move(e));
    }

    bool divides(const Monomial& o) const {
        if (e_.size() > o.e_.size()) return false;
        for (std::size_t i = 0; i < e_.size(); ++i)
            if (e_[i] > o.e_[i]) return false;
        return true;
    }

    // Requires divisor.divides(*this).
    Monomial operator/(const Monomial& divisor) const {
        std::vector<std::uint32_t> e(e_);
        for (std::size_t i = 0; i < divisor.e_.size(); ++i) e[i] -= divisor.e_[i];
        return Monomial(std::move(e));
    }

    static Monomial gcd(const Monomial& a, const Monomial& b) {
        std::vector<std::uint32_t> e(std::min(a.e_.size(), b.e_.size()), 0);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::min(a.e_[i], b.e_[i]);
        return Monomial(std::move(e));
    }

    // Splits off the power of `var`.
    std::pair<std::uint32_t, Monomial> split(std::size_t var) const {
        if (var >= e_.size() || e_[var] == 0) return {0, *this};
        std::vector<std::uint32_t> e(e_);
        std::uint32_t p = e[var];
        e[var] = 0;
        return {p, Monomial(std::move(e))};
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }

    // Graded lexicographic comparison with x0 > x1 > ...
    friend int grlex_compare(const Monomial& a, const Monomial& b) {
        if (a.deg_ != b.deg_) return a.deg_ > b.deg_ ? 1 : -1;
        std::size_t w = std::max(a.e_.size(), b.e_.size());
        for (std::size_t i = 0; i < w; ++i) {
            if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
        }
        return 0;
    }

private:
    void trim() {
        while (!e_.empty() && e_.back() == 0) e_.pop_back();
        deg_ = 0;
        for (auto x : e_) deg_ += x;
    }

    std::vector<std::uint32_t> e_;
    unsigned deg_ = 0;
};

struct GrlexDescending {
    bool operator()(const Monomial& a, const Monomial& b) const { return grlex_compare(a, b) > 0; }
};

using VariableNamer = std::function<std::string(std::size_t)>;

inline std::string default_variable_name(std::size_t i) { return "_v" + std::to_string(i); }

// Sparse multivariate polynomial over Q, terms kept in graded-lex descending order.
class Polynomial {
public:
    using Terms = std::map<Monomial, Rational, GrlexDescending>;

    Polynomial() = default;
    Polynomial(const Rational& c) {  // NOLINT(google-explicit-constructor)
        if (c != 0) t_.emplace(Monomial{}, c);
    }
    Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)
    Polynomial(int c) : Polynomial(Rational(c)) {}   // NOLINT(google-explicit-constructor)

    static Polynomial variable(std::size_t var) { return term(Monomial::variable(var), 1); }

    static Polynomial term(const Monomial& m, const Rational& c) {
        Polynomial p;
        if (c != 0) p.t_.emplace(m, c);
        return p;
    }

    const Terms& terms() const { return t_; }
    std::size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }
    bool is_monomial() const { return t_.size() == 1; }
    bool is_one() const { return is_constant() && constant_value() == 1; }

    Rational constant_value() const {
        auto it = t_.find(Monomial{});
        return it == t_.end() ? Rational(0) : it->second;
    }

    const Monomial& leading_monomial() const { return t_.begin()->first; }
    const Rational& leading_coefficient() const { return t_.begin()->second; }

    std::size_t width() const {
        std::size_t w = 0;
        for (const auto& [m, c] : t_) w = std::max(w, m.width());
        return w;
    }

    bool uses(std::size_t var) const {
        for (const auto& [m, c] : t_)
            if (m[var] != 0) return true;
        return false;
    }

    std::set<std::size_t> variables() const {
        std::set<std::size_t> vs;
        for (const auto& [m, c] : t_)
            for (std::size_t i = 0; i < m.width(); ++i)
                if (m[i] != 0) vs.insert(i);
        return vs;
    }

    unsigned degree_in(std::size_t var) const {
        unsigned d = 0;
        for (const auto& [m, c] : t_) d = std::max<unsigned>(d, m[var]);
        return d;
    }

    unsigned total_degree() const { return t_.empty() ? 0 : t_.begin()->first.degree(); }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.t_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.t_) add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    Polynomial operator-() const {
        Polynomial r(*this);
        for (auto& [m, c] : r.t_) c = -c;
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (b.is_constant()) return a.scaled(b.constant_value());
        if (a.is_constant()) return b.scaled(a.constant_value());
        Polynomial r;
        for (const auto& [ma, ca] : a.t_)
            for (const auto& [mb, cb] : b.t_) r.add_term(ma * mb, ca * cb);
        return r;
    }

    Polynomial scaled(const Rational& s) const {
        if (s == 0) return {};
        Polynomial r(*this);
        for (auto& [m, c] : r.t_) c *= s;
        return r;
    }

    Polynomial pow(unsigned e) const {
        Polynomial result(1), base(*this);
        while (e) {
            if (e & 1u) result *= base;
            e >>= 1u;
            if (e) base *= base;
        }
        return result;
    }

    Polynomial derivative(std::size_t var) const {
        Polynomial r;
        for (const auto& [m, c] : t_) {
            auto p = m[var];
            if (p == 0) continue;
            std::vector<std::uint32_t> e(m.exponents());
            e[var] -= 1;
            r.add_term(Monomial(std::move(e)), c * p);
        }
        return r;
    }

    Rational evaluate(const std::vector<Rational>& point) const {
        Rational total = 0;
        for (const auto& [m, c] : t_) {
            if (m.width() > point.size()) throw DomainError("point has too few coordinates");
            Rational v = c;
            for (std::size_t i = 0; i < m.width(); ++i) {
                for (std::uint32_t k = 0; k < m[i]; ++k) v *= point[i];
            }
            total += v;
        }
        return total;
    }

    // Coefficients as polynomials in `var`; index = power of var.
    std::vector<Polynomial> coefficients_in(std::size_t var) const {
        std::vector<Polynomial> out(degree_in(var) + 1);
        for (const auto& [m, c] : t_) {
            auto [p, rest] = m.split(var);
            out[p].add_term(rest, c);
        }
        return out;
    }

    // Positive rational whose quotient has coprime integer coefficients, signed
    // so the quotient has a positive leading coefficient.
    Rational content() const {
        if (t_.empty()) return 1;
        Integer num = 0, den = 1;
        for (const auto& [m, c] : t_) {
            num = cartan::gcd(num, c.get_num());
            den = cartan::lcm(den, c.get_den());
        }
        Rational q(num, den);
        q.canonicalize();
        if (leading_coefficient() < 0) q = -q;
        return q;
    }

    Polynomial primitive() const {
        if (t_.empty()) return {};
        Rational c = content();
        if (c == 1) return *this;
        Rational inv = 1 / c;
        return scaled(inv);
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.t_ == b.t_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    std::string to_string(const VariableNamer& name = default_variable_name) const;

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = t_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) t_.erase(it);
        }
    }

private:
    Terms t_;
};

inline std::string monomial_to_string(const Monomial& m, const VariableNamer& name) {
    std::string s;
    for (std::size_t i = 0; i < m.width(); ++i) {
        if (m[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += name(i);
        if (m[i] > 1) s += "^" + std::to_string(m[i]);
    }
    return s;
}

inline std::string Polynomial::to_string(const VariableNamer& name) const {
    if (t_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : t_) {
        Rational a = abs(c);
        std::string body;
        if (m.is_one()) {
            body = cartan::to_string(a);
        } else if (a == 1) {
            body = monomial_to_string(m, name);
        } else {
            body = cartan::to_string(a) + "*" + monomial_to_string(m, name);
        }
        if (first) {
            out = (c < 0 ? "-" : "") + body;
            first = false;
        } else {
            out += (c < 0 ? " - " : " + ") + body;
        }
    }
    return out;
}

// Returns a / b when b divides a exactly, otherwise nullopt.
inline std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw PoleError("division by zero polynomial");
    if (b.is_constant()) return a.scaled(1 / b.constant_value());
    Polynomial q, r = a;
    const Monomial& lb = b.leading_monomial();
    const Rational& cb = b.leading_coefficient();
    while (!r.is_zero()) {
        const Monomial& lr = r.leading_monomial();
        if (!lb.divides(lr)) return std::nullopt;
        Polynomial t = Polynomial::term(lr / lb, r.leading_coefficient() / cb);
        q += t;
        r -= t * b;
    }
    return q;
}

Polynomial gcd(const Polynomial& a, const Polynomial& b);

namespace detail {

inline Polynomial content_in(const Polynomial& p, std::size_t var) {
    auto coeffs = p.coefficients_in(var);
    Polynomial g;
    for (const auto& c : coeffs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.primitive() : cartan::gcd(g, c);
        if (g.is_constant()) return Polynomial(1);
    }
    return g;
}

inline Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, std::size_t var) {
    unsigned db = b.degree_in(var);
    Polynomial lb = b.coefficients_in(var)[db];
    Polynomial r = a;
    while (!r.is_zero()) {
        unsigned dr = r.degree_in(var);
        if (dr < db) break;
        Polynomial lr = r.coefficients_in(var)[dr];
        r = lb * r - lr * Polynomial::term(Monomial::variable(var, dr - db), 1) * b;
    }
    return r;
}

}  // namespace detail

// Normalized gcd: primitive integer polynomial with positive leading coefficient.
inline Polynomial gcd(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero()) return b.primitive();
    if (b.is_zero()) return a.primitive();
    if (a.is_constant() || b.is_constant()) return Polynomial(1);
    Polynomial pa = a.primitive(), pb = b.primitive();
    if (pa == pb) return pa;
    if (pa.is_monomial() || pb.is_monomial()) {
        Monomial m = pa.leading_monomial();
        for (const auto& [t, c] : pa.terms()) m = Monomial::gcd(m, t);
        for (const auto& [t, c] : pb.terms()) m = Monomial::gcd(m, t);
        return Polynomial::term(m, 1);
    }
    if (pa.size() >= pb.size() && divide_exact(pa, pb)) return pb;
    if (pb.size() >= pa.size() && divide_exact(pb, pa)) return pa;

    auto va = pa.variables(), vb = pb.variables();
    for (auto v : va)
        if (!vb.count(v)) return gcd(detail::content_in(pa, v), pb);
    for (auto v : vb)
        if (!va.count(v)) return gcd(pa, detail::content_in(pb, v));

    std::size_t var = *va.begin();
    unsigned best = ~0u;
    for (auto v : va) {
        unsigned d = std::max(pa.degree_in(v), pb.degree_in(v));
        if (d < best) {
            best = d;
            var = v;
        }
    }

    Polynomial ca = detail::content_in(pa, var), cb = detail::content_in(pb, var);
    Polynomial gc = gcd(ca, cb);
    Polynomial x = *divide_exact(pa, ca), y = *divide_exact(pb, cb);
    if (x.degree_in(var) < y.degree_in(var)) std::swap(x, y);
    for (;;) {
        Polynomial r = detail::pseudo_remainder(x, y, var);
        if (r.is_zero()) break;
        if (r.degree_in(var) == 0) {
            y = Polynomial(1);
            break;
        }
        x = std::move(y);
        y = *divide_exact(r, detail::content_in(r, var));
    }
    return (gc * y).primitive();
}

}  // namespace cartan

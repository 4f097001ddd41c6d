#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polynomial.hpp"

namespace cartan {

// Element of Q(x_0, x_1, ...). Canonical form: gcd(num, den) = 1 and den has
// leading coefficient 1, so equal functions have equal representations.
class RationalFunction {
public:
    RationalFunction() : den_(1) {}
    RationalFunction(const Polynomial& p) : num_(p), den_(1) {}  // NOLINT(google-explicit-constructor)
    RationalFunction(const Rational& c) : num_(c), den_(1) {}    // NOLINT(google-explicit-constructor)
    RationalFunction(long c) : num_(c), den_(1) {}               // NOLINT(google-explicit-constructor)
    RationalFunction(int c) : num_(c), den_(1) {}                // NOLINT(google-explicit-constructor)

    RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw PoleError("rational function with zero denominator");
        normalize();
    }

    static RationalFunction variable(std::size_t var) { return {Polynomial::variable(var)}; }

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_one() const { return is_constant() && num_.constant_value() == 1; }
    Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
    std::size_t width() const { return std::max(num_.width(), den_.width()); }

    bool uses(std::size_t var) const { return num_.uses(var) || den_.uses(var); }

    RationalFunction operator-() const {
        RationalFunction r(*this);
        r.num_ = -r.num_;
        return r;
    }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.den_ == b.den_) {
            if (a.den_.is_one()) return from_normalized(a.num_ + b.num_, a.den_);
            return {a.num_ + b.num_, a.den_};
        }
        if (a.den_.is_one()) return from_normalized(a.num_ * b.den_ + b.num_, b.den_);
        if (b.den_.is_one()) return from_normalized(a.num_ + b.num_ * a.den_, a.den_);
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }

    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (a.den_.is_one() && b.den_.is_one()) return from_normalized(a.num_ * b.num_, a.den_);
        if (a.is_constant()) return from_normalized(b.num_.scaled(a.constant_value()), b.den_);
        if (b.is_constant()) return from_normalized(a.num_.scaled(b.constant_value()), a.den_);
        return {a.num_ * b.num_, a.den_ * b.den_};
    }

    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
        if (b.is_zero()) throw PoleError("division by zero");
        return a * b.inverse();
    }

    RationalFunction inverse() const {
        if (is_zero()) throw PoleError("inverse of zero");
        return {den_, num_};
    }

    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
    RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
    RationalFunction& operator/=(const RationalFunction& o) { return *this = *this / o; }

    RationalFunction pow(int e) const {
        if (e < 0) return inverse().pow(-e);
        return from_normalized(num_.pow(static_cast<unsigned>(e)), den_.pow(static_cast<unsigned>(e)));
    }

    RationalFunction derivative(std::size_t var) const {
        if (den_.is_one()) return from_normalized(num_.derivative(var), den_);
        if (!uses(var)) return {};
        return {num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_};
    }

    Rational evaluate(const std::vector<Rational>& point) const {
        Rational d = den_.evaluate(point);
        if (d == 0) throw PoleError("denominator vanishes at point");
        return num_.evaluate(point) / d;
    }

    // Replaces variable i by images[i]; variables beyond images.size() stay.
    RationalFunction substitute(const std::vector<RationalFunction>& images) const {
        return substitute_poly(num_, images) / substitute_poly(den_, images);
    }

    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

    std::string to_string(const VariableNamer& name = default_variable_name) const {
        if (den_.is_one()) return num_.to_string(name);
        std::string n = num_.to_string(name);
        if (num_.size() > 1) n = "(" + n + ")";
        std::string d = den_.to_string(name);
        const Monomial& m = den_.leading_monomial();
        bool single = den_.size() == 1 && den_.leading_coefficient() == 1 && m.degree() == m[m.width() - 1];
        if (!single) d = "(" + d + ")";
        return n + "/" + d;
    }

    static RationalFunction substitute_poly(const Polynomial& p, const std::vector<RationalFunction>& images) {
        RationalFunction total;
        for (const auto& [m, c] : p.terms()) {
            RationalFunction t(c);
            std::vector<std::uint32_t> keep;
            for (std::size_t i = 0; i < m.width(); ++i) {
                if (m[i] == 0) continue;
                if (i < images.size()) {
                    t *= images[i].pow(static_cast<int>(m[i]));
                } else {
                    keep.resize(i + 1, 0);
                    keep[i] = m[i];
                }
            }
            if (!keep.empty()) t *= RationalFunction(Polynomial::term(Monomial(keep), 1));
            total += t;
        }
        return total;
    }

private:
    static RationalFunction from_normalized(Polynomial num, Polynomial den) {
        RationalFunction r;
        r.num_ = std::move(num);
        r.den_ = r.num_.is_zero() ? Polynomial(1) : std::move(den);
        return r;
    }

    void normalize() {
        if (num_.is_zero()) {
            den_ = Polynomial(1);
            return;
        }
        if (!den_.is_constant()) {
            Polynomial g = gcd(num_, den_);
            if (!g.is_one()) {
                num_ = *divide_exact(num_, g);
                den_ = *divide_exact(den_, g);
            }
        }
        Rational lc = den_.leading_coefficient();
        if (lc != 1) {
            Rational inv = 1 / lc;
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    Polynomial num_;
    Polynomial den_;
};

}  // namespace cartan

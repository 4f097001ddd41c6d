#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chart.hpp"
#include "rational_function.hpp"

namespace cartan {

using MultiIndex = std::vector<std::uint16_t>;  // strictly increasing coordinate indices

class VectorField;

// Differential form of fixed degree on a chart, stored as a map from sorted
// multi-index to coefficient. The zero form keeps its degree.
class DifferentialForm {
public:
    using Terms = std::map<MultiIndex, RationalFunction>;

    DifferentialForm() = default;
    DifferentialForm(ChartPtr chart, unsigned degree) : chart_(std::move(chart)), degree_(degree) {}

    static DifferentialForm scalar(ChartPtr chart, const RationalFunction& f) {
        DifferentialForm w(std::move(chart), 0);
        w.add_term({}, f);
        return w;
    }

    static DifferentialForm differential(ChartPtr chart, std::size_t i) {
        if (i >= chart->dim()) throw DomainError("coordinate index out of range");
        DifferentialForm w(std::move(chart), 1);
        w.add_term({static_cast<std::uint16_t>(i)}, RationalFunction(1));
        return w;
    }

    static DifferentialForm one_form(ChartPtr chart, const std::vector<RationalFunction>& coeffs) {
        if (coeffs.size() != chart->dim()) throw DomainError("coefficient count does not match chart");
        DifferentialForm w(std::move(chart), 1);
        for (std::size_t i = 0; i < coeffs.size(); ++i) w.add_term({static_cast<std::uint16_t>(i)}, coeffs[i]);
        return w;
    }

    const ChartPtr& chart() const { return chart_; }
    unsigned degree() const { return degree_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    RationalFunction coefficient(const MultiIndex& idx) const {
        auto it = terms_.find(idx);
        return it == terms_.end() ? RationalFunction() : it->second;
    }

    // Scalar value of a 0-form.
    RationalFunction value() const { return coefficient({}); }

    std::vector<RationalFunction> one_form_coefficients() const {
        if (degree_ != 1) throw DomainError("expected a 1-form");
        std::vector<RationalFunction> c(chart_->dim());
        for (const auto& [idx, f] : terms_) c[idx[0]] = f;
        return c;
    }

    void add_term(const MultiIndex& idx, const RationalFunction& f) {
        if (f.is_zero()) return;
        auto [it, inserted] = terms_.emplace(idx, f);
        if (!inserted) {
            it->second += f;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    DifferentialForm& operator+=(const DifferentialForm& o) {
        check_compatible(o);
        for (const auto& [idx, f] : o.terms_) add_term(idx, f);
        return *this;
    }
    DifferentialForm& operator-=(const DifferentialForm& o) {
        check_compatible(o);
        for (const auto& [idx, f] : o.terms_) add_term(idx, -f);
        return *this;
    }
    friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
    friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
    DifferentialForm operator-() const { return scaled(RationalFunction(-1)); }

    DifferentialForm scaled(const RationalFunction& f) const {
        DifferentialForm r(chart_, degree_);
        if (f.is_zero()) return r;
        for (const auto& [idx, c] : terms_) r.terms_.emplace(idx, c * f);
        return r;
    }
    friend DifferentialForm operator*(const RationalFunction& f, const DifferentialForm& w) { return w.scaled(f); }

    friend DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
        require_same_chart(a.chart_, b.chart_);
        DifferentialForm r(a.chart_, a.degree_ + b.degree_);
        for (const auto& [ia, fa] : a.terms_) {
            for (const auto& [ib, fb] : b.terms_) {
                MultiIndex merged;
                int s = merge_sign(ia, ib, merged);
                if (s == 0) continue;
                RationalFunction c = fa * fb;
                r.add_term(merged, s > 0 ? c : -c);
            }
        }
        return r;
    }

    DifferentialForm exterior_derivative() const {
        DifferentialForm r(chart_, degree_ + 1);
        for (const auto& [idx, f] : terms_) {
            for (std::size_t v = 0; v < chart_->dim(); ++v) {
                if (!f.uses(v)) continue;
                MultiIndex merged;
                int s = merge_sign({static_cast<std::uint16_t>(v)}, idx, merged);
                if (s == 0) continue;
                RationalFunction c = f.derivative(v);
                r.add_term(merged, s > 0 ? c : -c);
            }
        }
        return r;
    }

    DifferentialForm interior(const VectorField& x) const;
    DifferentialForm lie_derivative(const VectorField& x) const;

    // Coefficients evaluated at a point; the result has constant coefficients.
    DifferentialForm evaluate(const std::vector<Rational>& point) const {
        DifferentialForm r(chart_, degree_);
        for (const auto& [idx, f] : terms_) r.add_term(idx, RationalFunction(f.evaluate(point)));
        return r;
    }

    // Coefficient substitution x_i -> images[i]; the differentials are unchanged.
    DifferentialForm substitute(const std::vector<RationalFunction>& images) const {
        DifferentialForm r(chart_, degree_);
        for (const auto& [idx, f] : terms_) r.add_term(idx, f.substitute(images));
        return r;
    }

    // Pullback along a map target -> this chart, given by the images of this
    // chart's coordinates as functions on the target chart.
    DifferentialForm pullback(const ChartPtr& target, const std::vector<RationalFunction>& images) const {
        if (images.size() != chart_->dim()) throw DomainError("pullback needs one image per coordinate");
        std::vector<DifferentialForm> d_images;
        for (const auto& g : images) d_images.push_back(scalar(target, g).exterior_derivative());
        return apply_cotangent_map(target, images, d_images);
    }

    // Replaces coefficients by their substitution and each dx_i by cotangent[i].
    DifferentialForm apply_cotangent_map(const ChartPtr& target, const std::vector<RationalFunction>& images,
                                         const std::vector<DifferentialForm>& cotangent) const {
        DifferentialForm r(target, degree_);
        for (const auto& [idx, f] : terms_) {
            DifferentialForm t = scalar(target, f.substitute(images));
            for (auto i : idx) t = wedge(t, cotangent.at(i));
            r += t;
        }
        return r;
    }

    // Replaces each dx_i by cotangent[i], keeping coefficients.
    DifferentialForm replace_differentials(const std::vector<DifferentialForm>& cotangent) const {
        DifferentialForm r(chart_, degree_);
        for (const auto& [idx, f] : terms_) {
            DifferentialForm t = scalar(chart_, f);
            for (auto i : idx) t = wedge(t, cotangent.at(i));
            r += t;
        }
        return r;
    }

    // Rescales a form by a nonzero function so its coefficients are coprime
    // polynomials and the first coefficient has positive leading coefficient.
    DifferentialForm primitive() const {
        if (terms_.empty()) return *this;
        Polynomial den(1);
        for (const auto& [idx, f] : terms_) {
            const Polynomial& d = f.denominator();
            if (!d.is_one()) den = *divide_exact(den * d, gcd(den, d));
        }
        Polynomial g;
        std::vector<std::pair<MultiIndex, Polynomial>> nums;
        for (const auto& [idx, f] : terms_) {
            Polynomial n = *divide_exact(f.numerator() * den, f.denominator());
            g = g.is_zero() ? n.primitive() : gcd(g, n);
            nums.emplace_back(idx, std::move(n));
        }
        DifferentialForm r(chart_, degree_);
        for (auto& [idx, n] : nums) r.terms_.emplace(idx, RationalFunction(*divide_exact(n, g)));
        if (r.terms_.begin()->second.numerator().leading_coefficient() < 0) return -r;
        return r;
    }

    friend bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
        return a.degree_ == b.degree_ && same_chart(a.chart_, b.chart_) && a.terms_ == b.terms_;
    }
    friend bool operator!=(const DifferentialForm& a, const DifferentialForm& b) { return !(a == b); }

    std::string to_string() const;

    // Sign of dx_a ^ dx_b reordered into merged; 0 on a repeated index.
    static int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex& merged) {
        merged.clear();
        merged.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        int inversions = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] == b[j]) return 0;
            if (a[i] < b[j]) {
                merged.push_back(a[i++]);
            } else {
                inversions += static_cast<int>(a.size() - i);
                merged.push_back(b[j++]);
            }
        }
        while (i < a.size()) merged.push_back(a[i++]);
        while (j < b.size()) merged.push_back(b[j++]);
        return (inversions % 2) ? -1 : 1;
    }

private:
    void check_compatible(const DifferentialForm& o) const {
        require_same_chart(chart_, o.chart_);
        if (degree_ != o.degree_) throw DomainError("degree mismatch");
    }

    ChartPtr chart_;
    unsigned degree_ = 0;
    Terms terms_;
};

// Vector field sum_i X^i d/dx_i.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(ChartPtr chart) : chart_(std::move(chart)), c_(chart_->dim()) {}
    VectorField(ChartPtr chart, std::vector<RationalFunction> comps) : chart_(std::move(chart)), c_(std::move(comps)) {
        if (c_.size() != chart_->dim()) throw DomainError("component count does not match chart");
    }

    static VectorField coordinate(ChartPtr chart, std::size_t i) {
        VectorField x(std::move(chart));
        x.c_.at(i) = RationalFunction(1);
        return x;
    }

    const ChartPtr& chart() const { return chart_; }
    const std::vector<RationalFunction>& components() const { return c_; }
    const RationalFunction& operator[](std::size_t i) const { return c_.at(i); }
    RationalFunction& operator[](std::size_t i) { return c_.at(i); }

    bool is_zero() const {
        for (const auto& f : c_)
            if (!f.is_zero()) return false;
        return true;
    }

    RationalFunction apply(const RationalFunction& f) const {
        RationalFunction r;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].is_zero() && f.uses(i)) r += c_[i] * f.derivative(i);
        return r;
    }

    friend VectorField operator+(const VectorField& a, const VectorField& b) {
        require_same_chart(a.chart_, b.chart_);
        VectorField r(a);
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    friend VectorField operator-(const VectorField& a, const VectorField& b) {
        require_same_chart(a.chart_, b.chart_);
        VectorField r(a);
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
        return r;
    }
    friend VectorField operator*(const RationalFunction& f, const VectorField& x) {
        VectorField r(x);
        for (auto& c : r.c_) c *= f;
        return r;
    }

    friend VectorField bracket(const VectorField& x, const VectorField& y) {
        require_same_chart(x.chart_, y.chart_);
        VectorField r(x.chart_);
        for (std::size_t j = 0; j < r.c_.size(); ++j) r.c_[j] = x.apply(y.c_[j]) - y.apply(x.c_[j]);
        return r;
    }

    VectorField substitute(const std::vector<RationalFunction>& images) const {
        VectorField r(*this);
        for (auto& c : r.c_) c = c.substitute(images);
        return r;
    }

    std::vector<Rational> evaluate(const std::vector<Rational>& point) const {
        std::vector<Rational> v;
        for (const auto& c : c_) v.push_back(c.evaluate(point));
        return v;
    }

    friend bool operator==(const VectorField& a, const VectorField& b) {
        return same_chart(a.chart_, b.chart_) && a.c_ == b.c_;
    }

    std::string to_string() const {
        std::string out;
        auto namer = chart_->namer();
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero()) continue;
            if (!out.empty()) out += ", ";
            out += chart_->name(i) + ": " + c_[i].to_string(namer);
        }
        return out.empty() ? "0" : out;
    }

private:
    ChartPtr chart_;
    std::vector<RationalFunction> c_;
};

inline DifferentialForm DifferentialForm::interior(const VectorField& x) const {
    require_same_chart(chart_, x.chart());
    if (degree_ == 0) return DifferentialForm(chart_, 0);
    DifferentialForm r(chart_, degree_ - 1);
    for (const auto& [idx, f] : terms_) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const RationalFunction& xi = x[idx[k]];
            if (xi.is_zero()) continue;
            MultiIndex rest(idx);
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
            RationalFunction c = xi * f;
            r.add_term(rest, (k % 2) ? -c : c);
        }
    }
    return r;
}

// Cartan's formula L_X = i(X) d + d i(X).
inline DifferentialForm DifferentialForm::lie_derivative(const VectorField& x) const {
    DifferentialForm a = exterior_derivative().interior(x);
    if (degree_ == 0) return a;
    return a + interior(x).exterior_derivative();
}

inline RationalFunction pairing(const DifferentialForm& w, const VectorField& x) {
    if (w.degree() != 1) throw DomainError("pairing needs a 1-form");
    return w.interior(x).value();
}

inline DifferentialForm d(const DifferentialForm& w) { return w.exterior_derivative(); }

namespace detail {

// "c1*b1 + c2*b2 - ..." with basis labels b (empty for a scalar term).
inline std::string render_terms(const std::vector<std::pair<std::string, RationalFunction>>& terms, const VariableNamer& namer) {
    if (terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [basis, f] : terms) {
        bool negative = false;
        std::string coef;
        if (f.is_constant()) {
            Rational c = f.constant_value();
            negative = c < 0;
            Rational a = abs(c);
            if (a != 1 || basis.empty()) coef = cartan::to_string(a);
        } else if (f.is_polynomial() && f.numerator().size() == 1) {
            negative = f.numerator().leading_coefficient() < 0;
            coef = (negative ? -f : f).to_string(namer);
        } else {
            coef = "(" + f.to_string(namer) + ")";
        }
        std::string body = coef.empty() ? basis : (basis.empty() ? coef : coef + "*" + basis);
        if (first) {
            out = (negative ? "-" : "") + body;
            first = false;
        } else {
            out += (negative ? " - " : " + ") + body;
        }
    }
    return out;
}

}  // namespace detail

inline std::string DifferentialForm::to_string() const {
    std::vector<std::pair<std::string, RationalFunction>> parts;
    for (const auto& [idx, f] : terms_) {
        std::string basis;
        for (auto i : idx) basis += (basis.empty() ? "d" : "^d") + chart_->name(i);
        parts.emplace_back(std::move(basis), f);
    }
    return detail::render_terms(parts, chart_->namer());
}

// Values of a constant-coefficient point in chart order.
struct PointAssignment {
    ChartPtr chart;
    std::vector<Rational> values;

    friend bool operator==(const PointAssignment& a, const PointAssignment& b) {
        return same_chart(a.chart, b.chart) && a.values == b.values;
    }
};

}  // namespace cartan

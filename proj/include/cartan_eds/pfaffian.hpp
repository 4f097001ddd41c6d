#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "exterior.hpp"

namespace cartan {

inline void check_stop(const std::stop_token& stop) {
    if (stop.stop_requested()) throw Cancelled();
}

// Finite list of 1-forms on one chart with cached generic rank. Generators may
// be dependent; operations that need a reduced list check independence.
class PfaffianSystem {
public:
    PfaffianSystem() = default;

    PfaffianSystem(ChartPtr chart, std::vector<DifferentialForm> generators)
        : chart_(std::move(chart)), gens_(std::move(generators)) {
        for (const auto& w : gens_) {
            require_same_chart(chart_, w.chart());
            if (w.degree() != 1) throw DomainError("Pfaffian system generators must be 1-forms");
        }
        matrix_ = one_form_matrix(gens_, chart_->dim());
        cert_ = generic_rank(matrix_);
        if (independent()) build_reduction();
    }

    const ChartPtr& chart() const { return chart_; }
    const std::vector<DifferentialForm>& generators() const { return gens_; }
    std::size_t size() const { return gens_.size(); }
    std::size_t rank() const { return cert_.rank; }
    std::size_t dim() const { return chart_->dim(); }
    const RankCertificate& certificate() const { return cert_; }
    const Matrix<RationalFunction>& matrix() const { return matrix_; }
    bool independent() const { return cert_.rank == gens_.size(); }

    void require_independent(const std::string& what = "system") const {
        if (!independent())
            throw RankDeficiency(what + ": generators are generically dependent (rank " + std::to_string(rank()) +
                                 " < " + std::to_string(size()) + " generators)");
    }

    // Greedy independent subfamily with the same span.
    PfaffianSystem reduced() const {
        if (independent()) return *this;
        std::vector<DifferentialForm> keep;
        for (auto i : independent_subset(gens_)) keep.push_back(gens_[i]);
        return PfaffianSystem(chart_, std::move(keep));
    }

    // Coordinates whose differentials are eliminated by the generators.
    const std::vector<std::size_t>& pivot_columns() const { return pivots_; }
    const std::vector<std::size_t>& complement_columns() const { return complement_; }

    // Normal form of a form modulo the algebraic ideal: each pivot dx_p is
    // replaced by its expression in the complement differentials.
    DifferentialForm reduce(const DifferentialForm& w) const {
        require_independent();
        require_same_chart(chart_, w.chart());
        return w.replace_differentials(cotangent_);
    }

    friend bool operator==(const PfaffianSystem& a, const PfaffianSystem& b) {
        return same_chart(a.chart_, b.chart_) && a.gens_ == b.gens_;
    }

private:
    void build_reduction() {
        const std::size_t n = chart_->dim();
        Matrix<RationalFunction> r = matrix_;
        pivots_ = gens_.empty() ? std::vector<std::size_t>{} : rref(r);
        std::vector<bool> is_pivot(n, false);
        for (auto p : pivots_) is_pivot[p] = true;
        for (std::size_t j = 0; j < n; ++j)
            if (!is_pivot[j]) complement_.push_back(j);
        cotangent_.clear();
        for (std::size_t j = 0; j < n; ++j) cotangent_.push_back(DifferentialForm::differential(chart_, j));
        for (std::size_t a = 0; a < pivots_.size(); ++a) {
            DifferentialForm img(chart_, 1);
            for (auto j : complement_)
                if (!r[a][j].is_zero()) img.add_term({static_cast<std::uint16_t>(j)}, -r[a][j]);
            cotangent_[pivots_[a]] = img;
        }
    }

    ChartPtr chart_;
    std::vector<DifferentialForm> gens_;
    Matrix<RationalFunction> matrix_;
    RankCertificate cert_;
    std::vector<std::size_t> pivots_, complement_;
    std::vector<DifferentialForm> cotangent_;
};

struct ReducedForm {
    DifferentialForm representative;
    bool zero = false;
};

inline ReducedForm reduce_mod_system(const DifferentialForm& w, const PfaffianSystem& p) {
    DifferentialForm rep = p.reduce(w);
    bool z = rep.is_zero();
    return {std::move(rep), z};
}

inline bool is_integrable_frobenius(const PfaffianSystem& p) {
    p.require_independent();
    for (const auto& w : p.generators())
        if (!p.reduce(d(w)).is_zero()) return false;
    return true;
}

struct DerivedResult {
    PfaffianSystem system;
    RankCertificate certificate;  // of f -> [sum f_i dw^i mod P]
};

inline DerivedResult derived_system_with_certificate(const PfaffianSystem& p, const std::stop_token& stop = {}) {
    p.require_independent("derived_system");
    const std::size_t r = p.size();
    std::vector<DifferentialForm> reps;
    for (const auto& w : p.generators()) {
        check_stop(stop);
        reps.push_back(p.reduce(d(w)));
    }
    Matrix<RationalFunction> a = coefficient_matrix(reps);
    DerivedResult out;
    std::vector<Vector<RationalFunction>> kernel;
    if (a.empty() || a[0].empty()) {
        kernel = kernel_basis(Matrix<RationalFunction>{}, r);
    } else {
        out.certificate = generic_rank(a);
        kernel = kernel_basis(transpose(a, a[0].size()), r);
    }
    std::vector<DifferentialForm> gens;
    for (const auto& f : kernel) {
        DifferentialForm s(p.chart(), 1);
        for (std::size_t i = 0; i < r; ++i)
            if (!f[i].is_zero()) s += p.generators()[i].scaled(f[i]);
        gens.push_back(s.primitive());
    }
    out.system = PfaffianSystem(p.chart(), std::move(gens));
    return out;
}

inline PfaffianSystem derived_system(const PfaffianSystem& p, const std::stop_token& stop = {}) {
    return derived_system_with_certificate(p, stop).system;
}

struct DerivedFlag {
    std::vector<PfaffianSystem> stages;  // P, P1, ...; the last stage repeats or is null
    bool terminal_integrable = false;    // last stage is a nonzero integrable system
    bool terminal_null = false;

    std::vector<std::size_t> ranks() const {
        std::vector<std::size_t> r;
        for (const auto& s : stages) r.push_back(s.rank());
        return r;
    }

    // Frobenius flag per stage: stage i is integrable iff it equals its derived system.
    std::vector<bool> integrable_stages() const {
        std::vector<bool> f;
        for (std::size_t i = 0; i < stages.size(); ++i)
            f.push_back(i + 1 < stages.size() ? stages[i + 1].rank() == stages[i].rank() : true);
        return f;
    }
};

inline DerivedFlag derived_flag(const PfaffianSystem& p, const std::stop_token& stop = {}) {
    DerivedFlag flag;
    flag.stages.push_back(p);
    for (;;) {
        check_stop(stop);
        const PfaffianSystem& last = flag.stages.back();
        if (last.rank() == 0) {
            flag.terminal_null = true;
            break;
        }
        PfaffianSystem next = derived_system(last, stop);
        bool same = next.rank() == last.rank();
        flag.stages.push_back(std::move(next));
        if (same) {
            flag.terminal_integrable = true;
            break;
        }
    }
    return flag;
}

struct CharacteristicResult {
    PfaffianSystem system;
    RankCertificate certificate;
    std::vector<VectorField> annihilator;  // function-field basis of the annihilator of P
};

// span{w^i} + {i(v) dw^i : v in the annihilator}, as an echelon basis.
inline CharacteristicResult cauchy_characteristic_system_full(const PfaffianSystem& p, const std::stop_token& stop = {}) {
    p.require_independent("cauchy_characteristic_system");
    CharacteristicResult out;
    out.annihilator = kernel_generic(p.generators(), p.chart());
    std::vector<DifferentialForm> rows = p.generators();
    for (const auto& w : p.generators()) {
        DifferentialForm dw = d(w);
        if (dw.is_zero()) continue;
        for (const auto& v : out.annihilator) {
            check_stop(stop);
            DifferentialForm c = dw.interior(v);
            if (!c.is_zero()) rows.push_back(std::move(c));
        }
    }
    if (!rows.empty()) out.certificate = generic_rank(one_form_matrix(rows, p.dim()));
    out.system = PfaffianSystem(p.chart(), echelon_basis(rows, p.chart()));
    return out;
}

inline PfaffianSystem cauchy_characteristic_system(const PfaffianSystem& p, const std::stop_token& stop = {}) {
    return cauchy_characteristic_system_full(p, stop).system;
}

inline std::size_t cartan_class(const PfaffianSystem& p, const std::stop_token& stop = {}) {
    return cauchy_characteristic_system_full(p, stop).system.rank();
}

inline std::size_t rank_at(const PfaffianSystem& p, const PointAssignment& x) {
    require_same_chart(p.chart(), x.chart);
    return rank(evaluate_matrix(p.matrix(), x.values));
}

// Class at a point, from the evaluated generators and differentials.
inline std::size_t cartan_class_at(const PfaffianSystem& p, const PointAssignment& x) {
    require_same_chart(p.chart(), x.chart);
    const std::size_t n = p.dim();
    Matrix<Rational> rows = evaluate_matrix(p.matrix(), x.values);
    auto sigma = kernel_basis(rows, n);
    for (const auto& w : p.generators()) {
        auto s = evaluate_matrix(skew_matrix(d(w)), x.values);
        for (const auto& v : sigma) {
            Vector<Rational> row(n, Rational(0));
            for (std::size_t i = 0; i < n; ++i) {
                if (v[i] == 0) continue;
                for (std::size_t j = 0; j < n; ++j) row[j] += v[i] * s[i][j];
            }
            rows.push_back(std::move(row));
        }
    }
    return rows.empty() ? 0 : rank(rows);
}

namespace detail {

inline std::size_t darboux_from(const DifferentialForm& w, const DifferentialForm& dw) {
    if (w.is_zero()) throw DomainError("darboux_class: the form vanishes");
    unsigned p = 0;
    DifferentialForm power = DifferentialForm::scalar(w.chart(), RationalFunction(1));  // (dw)^p
    for (;;) {
        DifferentialForm next = wedge(power, dw);
        if (wedge(w, next).is_zero()) break;
        power = std::move(next);
        ++p;
    }
    DifferentialForm top = wedge(power, dw);  // (dw)^{p+1}
    return top.is_zero() ? 2 * p + 1 : 2 * p + 2;
}

}  // namespace detail

// Darboux class of a single 1-form, generic or at a point.
inline std::size_t darboux_class(const DifferentialForm& w, const std::optional<PointAssignment>& at = std::nullopt) {
    if (w.degree() != 1) throw DomainError("darboux_class needs a 1-form");
    if (!at) return detail::darboux_from(w, d(w));
    require_same_chart(w.chart(), at->chart);
    DifferentialForm w0 = w.evaluate(at->values);
    if (w0.is_zero()) throw DomainError("darboux_class: the form vanishes at the point");
    return detail::darboux_from(w0, d(w).evaluate(at->values));
}

// Smallest h with (sum t_i dw^i)^{h+1} = 0 mod P, the t_i fresh parameters.
inline std::size_t gender(const PfaffianSystem& p, const std::stop_token& stop = {}) {
    p.require_independent("gender");
    std::vector<DifferentialForm> reps;
    std::size_t base = p.dim();
    for (const auto& w : p.generators()) {
        reps.push_back(p.reduce(d(w)));
        for (const auto& [idx, f] : reps.back().terms()) base = std::max(base, f.width());
    }
    DifferentialForm omega(p.chart(), 2);
    for (std::size_t i = 0; i < reps.size(); ++i) omega += reps[i].scaled(RationalFunction::variable(base + i));
    std::size_t h = 0;
    DifferentialForm power = omega;
    while (!power.is_zero()) {
        check_stop(stop);
        ++h;
        power = wedge(power, omega);
    }
    return h;
}

// Covariant system: P plus the 1-forms t with t ^ dw^i = 0 mod P for every i.
inline PfaffianSystem covariant_system(const PfaffianSystem& p) {
    p.require_independent("covariant_system");
    const auto& comp = p.complement_columns();
    std::vector<DifferentialForm> reps;
    for (const auto& w : p.generators()) reps.push_back(p.reduce(d(w)));
    // Unknown t = sum_k a_k dx_{comp[k]}; one row per (representative, 3-index).
    std::map<std::pair<std::size_t, MultiIndex>, std::size_t> rows;
    std::vector<std::map<std::pair<std::size_t, MultiIndex>, RationalFunction>> cols(comp.size());
    for (std::size_t k = 0; k < comp.size(); ++k) {
        DifferentialForm dxj = DifferentialForm::differential(p.chart(), comp[k]);
        for (std::size_t i = 0; i < reps.size(); ++i) {
            DifferentialForm prod = wedge(dxj, reps[i]);
            for (const auto& [idx, f] : prod.terms()) {
                rows.emplace(std::make_pair(i, idx), 0);
                cols[k][{i, idx}] = f;
            }
        }
    }
    std::size_t nr = 0;
    for (auto& [key, pos] : rows) pos = nr++;
    Matrix<RationalFunction> m(nr, Vector<RationalFunction>(comp.size()));
    for (std::size_t k = 0; k < comp.size(); ++k)
        for (const auto& [key, f] : cols[k]) m[rows.at(key)][k] = f;
    std::vector<DifferentialForm> gens = p.generators();
    for (const auto& a : kernel_basis(m, comp.size())) {
        DifferentialForm t(p.chart(), 1);
        for (std::size_t k = 0; k < comp.size(); ++k)
            if (!a[k].is_zero()) t.add_term({static_cast<std::uint16_t>(comp[k])}, a[k]);
        gens.push_back(t.primitive());
    }
    return PfaffianSystem(p.chart(), std::move(gens));
}

// Polar space of an integral element E at a point: the vectors of the
// annihilator in involution with every vector of E.
inline std::vector<Vector<Rational>> polar_space(const PfaffianSystem& p, const PointAssignment& x,
                                                 const std::vector<Vector<Rational>>& e) {
    require_same_chart(p.chart(), x.chart);
    const std::size_t n = p.dim();
    Matrix<Rational> gens = evaluate_matrix(p.matrix(), x.values);
    std::vector<Matrix<Rational>> skews;
    for (const auto& w : p.generators()) skews.push_back(evaluate_matrix(skew_matrix(d(w)), x.values));
    auto form_value = [&](const Matrix<Rational>& s, const Vector<Rational>& u, const Vector<Rational>& v) {
        Rational t = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (u[i] != 0 && v[j] != 0) t += u[i] * s[i][j] * v[j];
        return t;
    };
    for (const auto& v : e) {
        if (v.size() != n) throw UsageError("polar_space: vector has wrong dimension");
        for (const auto& row : gens) {
            Rational t = 0;
            for (std::size_t j = 0; j < n; ++j) t += row[j] * v[j];
            if (t != 0) throw DomainError("polar_space: E is not contained in the annihilator at the point");
        }
    }
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = a + 1; b < e.size(); ++b)
            for (const auto& s : skews)
                if (form_value(s, e[a], e[b]) != 0) throw DomainError("polar_space: E is not an integral element");
    Matrix<Rational> rows = gens;
    for (const auto& v : e)
        for (const auto& s : skews) {
            Vector<Rational> row(n, Rational(0));
            for (std::size_t i = 0; i < n; ++i) {
                if (v[i] == 0) continue;
                for (std::size_t j = 0; j < n; ++j) row[j] += v[i] * s[i][j];
            }
            rows.push_back(std::move(row));
        }
    return kernel_basis(rows, n);
}

}  // namespace cartan

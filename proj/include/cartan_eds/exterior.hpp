#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "forms.hpp"
#include "linalg.hpp"

namespace cartan {

// Rows of coefficients of equal-degree forms; columns are the multi-indices
// occurring in any row, in increasing order.
inline Matrix<RationalFunction> coefficient_matrix(const std::vector<DifferentialForm>& rows,
                                                   std::vector<MultiIndex>* columns_out = nullptr) {
    std::map<MultiIndex, std::size_t> cols;
    for (const auto& w : rows)
        for (const auto& [idx, f] : w.terms()) cols.emplace(idx, 0);
    std::size_t k = 0;
    for (auto& [idx, pos] : cols) pos = k++;
    Matrix<RationalFunction> m(rows.size(), Vector<RationalFunction>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [idx, f] : rows[i].terms()) m[i][cols.at(idx)] = f;
    if (columns_out) {
        columns_out->clear();
        for (const auto& [idx, pos] : cols) columns_out->push_back(idx);
    }
    return m;
}

// Coefficient matrix of 1-forms with one column per chart coordinate.
inline Matrix<RationalFunction> one_form_matrix(const std::vector<DifferentialForm>& rows, std::size_t n) {
    Matrix<RationalFunction> m;
    for (const auto& w : rows) {
        if (w.degree() != 1) throw DomainError("expected 1-forms");
        auto c = w.one_form_coefficients();
        if (c.size() != n) throw DomainError("chart mismatch");
        m.push_back(std::move(c));
    }
    return m;
}

inline void check_rows(const std::vector<DifferentialForm>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        require_same_chart(rows[0].chart(), rows[i].chart());
        if (rows[i].degree() != rows[0].degree()) throw DomainError("rows have different degrees");
    }
}

inline RankCertificate generic_rank(const std::vector<DifferentialForm>& rows) {
    check_rows(rows);
    return generic_rank(coefficient_matrix(rows));
}

inline std::size_t pointwise_rank(const std::vector<DifferentialForm>& rows, const std::vector<Rational>& point) {
    check_rows(rows);
    return rank(evaluate_matrix(coefficient_matrix(rows), point));
}

// Basis of {v : <v, w_p> = 0 for all rows w}.
inline std::vector<Vector<Rational>> kernel_at_point(const std::vector<DifferentialForm>& rows,
                                                     const PointAssignment& p) {
    check_rows(rows);
    const std::size_t n = p.chart->dim();
    if (!rows.empty()) require_same_chart(rows[0].chart(), p.chart);
    return kernel_basis(evaluate_matrix(one_form_matrix(rows, n), p.values), n);
}

// Function-field kernel of 1-forms, as vector fields.
inline std::vector<VectorField> kernel_generic(const std::vector<DifferentialForm>& rows, const ChartPtr& chart) {
    check_rows(rows);
    std::vector<VectorField> out;
    for (auto& v : kernel_basis(one_form_matrix(rows, chart->dim()), chart->dim())) out.emplace_back(chart, std::move(v));
    return out;
}

// Skew matrix S of a 2-form: w(u, v) = u^T S v.
inline Matrix<RationalFunction> skew_matrix(const DifferentialForm& w) {
    if (w.degree() != 2) throw DomainError("expected a 2-form");
    const std::size_t n = w.chart()->dim();
    Matrix<RationalFunction> s(n, Vector<RationalFunction>(n));
    for (const auto& [idx, f] : w.terms()) {
        s[idx[0]][idx[1]] = f;
        s[idx[1]][idx[0]] = -f;
    }
    return s;
}

inline DifferentialForm wedge_all(const std::vector<DifferentialForm>& forms, const ChartPtr& chart) {
    DifferentialForm acc = DifferentialForm::scalar(chart, RationalFunction(1));
    for (const auto& w : forms) acc = wedge(acc, w);
    return acc;
}

inline DifferentialForm wedge_power(const DifferentialForm& w, unsigned k) {
    DifferentialForm acc = DifferentialForm::scalar(w.chart(), RationalFunction(1));
    for (unsigned i = 0; i < k; ++i) acc = wedge(acc, w);
    return acc;
}

// Indices of a greedy maximal independent subfamily over the function field.
inline std::vector<std::size_t> independent_subset(const std::vector<DifferentialForm>& rows) {
    check_rows(rows);
    std::vector<std::size_t> keep;
    std::vector<DifferentialForm> chosen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        chosen.push_back(rows[i]);
        if (generic_rank(chosen).rank == chosen.size()) {
            keep.push_back(i);
        } else {
            chosen.pop_back();
        }
    }
    return keep;
}

// Reduced row echelon basis of the span of 1-forms, each row rescaled to
// coprime polynomial coefficients.
inline std::vector<DifferentialForm> echelon_basis(const std::vector<DifferentialForm>& rows, const ChartPtr& chart) {
    std::vector<DifferentialForm> out;
    if (rows.empty()) return out;
    auto m = one_form_matrix(rows, chart->dim());
    auto pivots = rref(m);
    for (std::size_t a = 0; a < pivots.size(); ++a) out.push_back(DifferentialForm::one_form(chart, m[a]).primitive());
    return out;
}

}  // namespace cartan

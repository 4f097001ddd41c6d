#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rational_function.hpp"

namespace cartan {

inline bool is_zero(const Rational& q) { return q == 0; }
inline bool is_zero(const RationalFunction& f) { return f.is_zero(); }

inline std::size_t complexity(const Rational&) { return 1; }
inline std::size_t complexity(const RationalFunction& f) {
    return f.numerator().size() + f.denominator().size();
}

template <class F>
using Matrix = std::vector<std::vector<F>>;

template <class F>
using Vector = std::vector<F>;

// Reduced row echelon form in place; returns the pivot columns. The RREF is
// unique, so the pivot choice only affects intermediate swell.
template <class F>
std::vector<std::size_t> rref(Matrix<F>& m) {
    std::vector<std::size_t> pivots;
    if (m.empty()) return pivots;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t best = rows;
        for (std::size_t i = r; i < rows; ++i) {
            if (is_zero(m[i][c])) continue;
            if (best == rows || complexity(m[i][c]) < complexity(m[best][c])) best = i;
        }
        if (best == rows) continue;
        std::swap(m[r], m[best]);
        F inv = F(1) / m[r][c];
        for (std::size_t j = c; j < cols; ++j)
            if (!is_zero(m[r][j])) m[r][j] = m[r][j] * inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || is_zero(m[i][c])) continue;
            F factor = m[i][c];
            for (std::size_t j = c; j < cols; ++j)
                if (!is_zero(m[r][j])) m[i][j] = m[i][j] - factor * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class F>
std::size_t rank(Matrix<F> m) {
    return rref(m).size();
}

// Basis of {v : m v = 0}, one vector per free column, read off the RREF.
template <class F>
std::vector<Vector<F>> kernel_basis(Matrix<F> m, std::size_t cols) {
    if (m.empty()) {
        std::vector<Vector<F>> basis;
        for (std::size_t j = 0; j < cols; ++j) {
            Vector<F> v(cols, F(0));
            v[j] = F(1);
            basis.push_back(std::move(v));
        }
        return basis;
    }
    auto pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<Vector<F>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        Vector<F> v(cols, F(0));
        v[f] = F(1);
        for (std::size_t a = 0; a < pivots.size(); ++a) v[pivots[a]] = -m[a][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

template <class F>
Matrix<F> transpose(const Matrix<F>& m, std::size_t cols) {
    Matrix<F> t(cols, Vector<F>(m.size(), F(0)));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
    return t;
}

// Solves x^T m = target^T when target lies in the row space; nullopt otherwise.
template <class F>
std::optional<Vector<F>> solve_in_row_space(const Matrix<F>& m, const Vector<F>& target) {
    const std::size_t rows = m.size(), cols = target.size();
    Matrix<F> aug(cols, Vector<F>(rows + 1, F(0)));
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) aug[j][i] = m[i][j];
        aug[j][rows] = target[j];
    }
    auto pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == rows) return std::nullopt;
    Vector<F> x(rows, F(0));
    for (std::size_t a = 0; a < pivots.size(); ++a) x[pivots[a]] = aug[a][rows];
    return x;
}

// Witness for a generic rank: the rank holds wherever the final pivot minor
// (the determinant of the selected rows and columns, after clearing row
// denominators) is nonzero.
struct RankCertificate {
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_rows;
    std::vector<std::size_t> pivot_columns;
    std::vector<Polynomial> pivots;  // Bareiss pivots; pivots[k] is a (k+1)-minor

    Polynomial minor() const { return pivots.empty() ? Polynomial(1) : pivots.back(); }
};

// Fraction-free Bareiss elimination over Q[x]. Pivot rule: leftmost column with
// a nonzero entry, first nonzero row in it.
inline RankCertificate generic_rank(const Matrix<RationalFunction>& m) {
    RankCertificate cert;
    if (m.empty()) return cert;
    const std::size_t rows = m.size(), cols = m[0].size();
    Matrix<Polynomial> a(rows, Vector<Polynomial>(cols));
    std::vector<std::size_t> origin(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        origin[i] = i;
        Polynomial den(1);
        for (const auto& f : m[i]) {
            const Polynomial& d = f.denominator();
            if (!d.is_one()) den = *divide_exact(den * d, gcd(den, d));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            const auto& f = m[i][j];
            if (f.is_zero()) continue;
            a[i][j] = f.denominator().is_one() ? f.numerator() * den : *divide_exact(f.numerator() * den, f.denominator());
        }
    }
    Polynomial prev(1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (!a[i][c].is_zero()) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        std::swap(a[r], a[piv]);
        std::swap(origin[r], origin[piv]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                Polynomial v = a[r][c] * a[i][j] - a[i][c] * a[r][j];
                a[i][j] = prev.is_one() ? std::move(v) : *divide_exact(v, prev);
            }
            a[i][c] = Polynomial();
        }
        prev = a[r][c];
        cert.pivot_rows.push_back(origin[r]);
        cert.pivot_columns.push_back(c);
        cert.pivots.push_back(prev);
        ++r;
    }
    cert.rank = r;
    return cert;
}

template <class F>
Matrix<Rational> evaluate_matrix(const Matrix<F>& m, const std::vector<Rational>& point) {
    Matrix<Rational> out;
    for (const auto& row : m) {
        Vector<Rational> r;
        for (const auto& f : row) r.push_back(f.evaluate(point));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace cartan

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stop_token>
#include <string>
#include <vector>

#include "pfaffian.hpp"

namespace cartan {

enum class ChainStrategy { Deterministic, FirstPivot, SeededRandom };

inline std::string to_string(ChainStrategy s) {
    switch (s) {
        case ChainStrategy::Deterministic: return "deterministic";
        case ChainStrategy::FirstPivot: return "first-pivot";
        case ChainStrategy::SeededRandom: return "seeded-random";
    }
    return "deterministic";
}

inline ChainStrategy parse_strategy(const std::string& s) {
    if (s == "deterministic") return ChainStrategy::Deterministic;
    if (s == "first-pivot") return ChainStrategy::FirstPivot;
    if (s == "seeded-random") return ChainStrategy::SeededRandom;
    throw UsageError("unknown strategy '" + s + "' (expected deterministic, first-pivot or seeded-random)");
}

struct ChainOptions {
    ChainStrategy strategy = ChainStrategy::Deterministic;
    std::optional<std::uint64_t> seed;
    std::stop_token stop;
};

// Ascending chain of integral elements E_1 < E_2 < ... built one vector at a time.
struct CharacterReport {
    std::optional<PointAssignment> point;  // empty for the generic chain
    ChainStrategy strategy = ChainStrategy::Deterministic;
    std::size_t n = 0, r = 0;
    std::vector<VectorField> chain;        // E_j = span of the first j vectors
    std::vector<std::size_t> polar_dims;   // dim of the polar space of E_0, E_1, ..., E_rho
    std::size_t rho = 0;
    std::size_t character = 0;             // n - r - rho
};

namespace detail {

inline RationalFunction lift(const Rational& q) { return RationalFunction(q); }
inline const RationalFunction& lift(const RationalFunction& f) { return f; }
inline std::size_t width_of(const Rational&) { return 0; }
inline std::size_t width_of(const RationalFunction& f) { return f.width(); }

template <class F>
Vector<F> row_times(const Vector<F>& u, const Matrix<F>& a) {
    Vector<F> out(a.empty() ? 0 : a[0].size(), F(0));
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (is_zero(u[i])) continue;
        for (std::size_t j = 0; j < out.size(); ++j)
            if (!is_zero(a[i][j])) out[j] = out[j] + u[i] * a[i][j];
    }
    return out;
}

// Compositions of `weight` into `parts` nonnegative parts, lexicographically
// descending, so unit vectors come first in their original order.
inline void compositions(std::size_t weight, std::size_t parts, std::vector<std::vector<long>>& out) {
    std::vector<long> c(parts, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
        if (i + 1 == parts) {
            c[i] = left;
            out.push_back(c);
            return;
        }
        for (long v = left; v >= 0; --v) {
            c[i] = v;
            rec(i + 1, left - v);
        }
    };
    if (parts > 0) rec(0, static_cast<long>(weight));
}

// Chain in the coordinates of an annihilator basis, with forms a[i] the
// restrictions of dw^i. Returns chain vectors and polar dimensions.
template <class F>
std::pair<std::vector<Vector<F>>, std::vector<std::size_t>> build_chain(const std::vector<Matrix<F>>& a, std::size_t s,
                                                                         const ChainOptions& opt) {
    std::vector<Vector<F>> e;
    std::vector<Vector<F>> polar;
    for (std::size_t j = 0; j < s; ++j) {
        Vector<F> v(s, F(0));
        v[j] = F(1);
        polar.push_back(std::move(v));
    }
    std::vector<std::size_t> dims{s};
    std::vector<Vector<F>> constraints;  // rows e^T a[i] for e in E
    std::mt19937_64 rng(opt.seed.value_or(0));

    std::size_t offset = 0;
    for (const auto& m : a)
        for (const auto& row : m)
            for (const auto& x : row) offset = std::max(offset, width_of(x));

    while (polar.size() > e.size()) {
        check_stop(opt.stop);
        // Complement of E inside the polar space, greedily from its echelon basis.
        std::vector<Vector<F>> basis = e, comp;
        for (const auto& u : polar) {
            basis.push_back(u);
            if (rank(Matrix<F>(basis)) == basis.size()) {
                comp.push_back(u);
            } else {
                basis.pop_back();
            }
        }
        const std::size_t m = comp.size();
        std::vector<std::vector<Vector<F>>> unit_rows(m);
        for (std::size_t k = 0; k < m; ++k)
            for (const auto& ai : a) unit_rows[k].push_back(row_times(comp[k], ai));

        auto candidate_rows = [&](const std::vector<F>& c) {
            Matrix<F> rows = constraints;
            for (std::size_t i = 0; i < a.size(); ++i) {
                Vector<F> row(s, F(0));
                for (std::size_t k = 0; k < m; ++k)
                    if (!is_zero(c[k]))
                        for (std::size_t j = 0; j < s; ++j) row[j] = row[j] + c[k] * unit_rows[k][i][j];
                rows.push_back(std::move(row));
            }
            return rows;
        };

        std::vector<F> choice(m, F(0));
        if (opt.strategy == ChainStrategy::FirstPivot || m == 1) {
            choice[0] = F(1);
        } else if (opt.strategy == ChainStrategy::SeededRandom) {
            std::uniform_int_distribution<long> num(-9, 9), den(1, 4);
            bool nonzero = false;
            while (!nonzero) {
                for (auto& c : choice) {
                    c = F(make_rational(num(rng), den(rng)));
                    if (!is_zero(c)) nonzero = true;
                }
            }
        } else {
            // Generic rank of the new constraints with symbolic coefficients,
            // then the first integer combination by weight that attains it.
            Matrix<RationalFunction> sym;
            for (const auto& row : constraints) {
                Vector<RationalFunction> lifted;
                for (const auto& x : row) lifted.push_back(lift(x));
                sym.push_back(std::move(lifted));
            }
            for (std::size_t i = 0; i < a.size(); ++i) {
                Vector<RationalFunction> row(s);
                for (std::size_t k = 0; k < m; ++k) {
                    RationalFunction ck = RationalFunction::variable(offset + k);
                    for (std::size_t j = 0; j < s; ++j)
                        if (!is_zero(unit_rows[k][i][j])) row[j] += ck * lift(unit_rows[k][i][j]);
                }
                sym.push_back(std::move(row));
            }
            const std::size_t target = generic_rank(sym).rank;
            bool found = false;
            for (std::size_t w = 1; w <= m + s + 2 && !found; ++w) {
                std::vector<std::vector<long>> cands;
                compositions(w, m, cands);
                for (const auto& c : cands) {
                    check_stop(opt.stop);
                    std::vector<F> cf;
                    for (auto x : c) cf.push_back(F(Rational(x)));
                    if (rank(candidate_rows(cf)) == target) {
                        choice = cf;
                        found = true;
                        break;
                    }
                }
            }
            if (!found) throw MathError("character chain: no integer combination attains the generic rank");
        }

        Vector<F> v(s, F(0));
        for (std::size_t k = 0; k < m; ++k)
            if (!is_zero(choice[k]))
                for (std::size_t j = 0; j < s; ++j) v[j] = v[j] + choice[k] * comp[k][j];
        for (const auto& ai : a) constraints.push_back(row_times(v, ai));
        e.push_back(std::move(v));
        polar = kernel_basis(constraints, s);
        dims.push_back(polar.size());
    }
    return {e, dims};
}

template <class F>
Matrix<F> restrict_form(const Matrix<F>& skew, const std::vector<Vector<F>>& basis) {
    const std::size_t s = basis.size(), n = skew.size();
    Matrix<F> out(s, Vector<F>(s, F(0)));
    for (std::size_t a = 0; a < s; ++a) {
        Vector<F> sa = row_times(basis[a], skew);
        for (std::size_t b = 0; b < s; ++b) {
            F t(0);
            for (std::size_t j = 0; j < n; ++j)
                if (!is_zero(sa[j]) && !is_zero(basis[b][j])) t = t + sa[j] * basis[b][j];
            out[a][b] = t;
        }
    }
    return out;
}

template <class F>
CharacterReport finish_report(const PfaffianSystem& p, const std::vector<Vector<F>>& sigma,
                              const std::vector<Matrix<F>>& restricted, const ChainOptions& opt) {
    auto [vecs, dims] = build_chain(restricted, sigma.size(), opt);
    CharacterReport rep;
    rep.strategy = opt.strategy;
    rep.n = p.dim();
    rep.r = p.rank();
    for (const auto& x : vecs) {
        std::vector<RationalFunction> comps(p.dim());
        for (std::size_t k = 0; k < x.size(); ++k)
            if (!is_zero(x[k]))
                for (std::size_t j = 0; j < p.dim(); ++j) comps[j] += lift(x[k]) * lift(sigma[k][j]);
        rep.chain.emplace_back(p.chart(), std::move(comps));
    }
    rep.polar_dims = dims;
    rep.rho = vecs.size();
    rep.character = rep.n - rep.r - rep.rho;
    return rep;
}

}  // namespace detail

inline CharacterReport character_chain(const PfaffianSystem& p, const PointAssignment& x, const ChainOptions& opt = {}) {
    p.require_independent("character_chain");
    require_same_chart(p.chart(), x.chart);
    if (opt.strategy == ChainStrategy::SeededRandom && !opt.seed) throw UsageError("seeded-random strategy needs a seed");
    Matrix<Rational> g = evaluate_matrix(p.matrix(), x.values);
    if (!g.empty() && rank(g) < p.size()) throw RankDeficiency("character_chain: generators are dependent at the point");
    auto sigma = kernel_basis(g, p.dim());
    std::vector<Matrix<Rational>> restricted;
    for (const auto& w : p.generators())
        restricted.push_back(detail::restrict_form(evaluate_matrix(skew_matrix(d(w)), x.values), sigma));
    CharacterReport rep = detail::finish_report(p, sigma, restricted, opt);
    rep.point = x;
    return rep;
}

// Chain over the function field: the character at a generic point.
inline CharacterReport generic_character_chain(const PfaffianSystem& p, const ChainOptions& opt = {}) {
    p.require_independent("character_chain");
    if (opt.strategy == ChainStrategy::SeededRandom && !opt.seed) throw UsageError("seeded-random strategy needs a seed");
    auto sigma = kernel_basis(p.matrix(), p.dim());
    std::vector<Matrix<RationalFunction>> restricted;
    for (const auto& w : p.generators()) restricted.push_back(detail::restrict_form(skew_matrix(d(w)), sigma));
    return detail::finish_report(p, sigma, restricted, opt);
}

}  // namespace cartan

#pragma once

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cartan_eds/catalog.hpp"
#include "cartan_eds/contact.hpp"
#include "cartan_eds/formlang.hpp"

namespace testing_support {

using namespace cartan;

inline RationalFunction fn(const ChartPtr& c, const std::string& text) { return parse_scalar(c, text); }
inline DifferentialForm form(const ChartPtr& c, const std::string& text) { return parse_form(c, text); }

inline PfaffianSystem sys(const ChartPtr& c, const std::vector<std::string>& gens) {
    std::vector<DifferentialForm> f;
    for (const auto& g : gens) f.push_back(form(c, g));
    return PfaffianSystem(c, f);
}

inline VectorField field(const ChartPtr& c, const std::vector<std::pair<std::string, std::string>>& comps) {
    VectorField v(c);
    for (const auto& [name, expr] : comps) v[*c->index(name)] = fn(c, expr);
    return v;
}

inline PointAssignment point(const ChartPtr& c, std::vector<Rational> values) { return {c, std::move(values)}; }
inline PointAssignment origin(const ChartPtr& c) { return {c, std::vector<Rational>(c->dim(), Rational(0))}; }

// Seeded generators for the property suites.
class Random {
public:
    explicit Random(std::uint64_t seed) : rng_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Rational rational() { return Rational(integer(-4, 4)) / Rational(integer(1, 3)); }

    Polynomial monomial(std::size_t vars, unsigned max_degree) {
        unsigned deg = static_cast<unsigned>(integer(0, max_degree));
        Polynomial m(1);
        for (unsigned k = 0; k < deg; ++k) m = m * Polynomial::variable(static_cast<std::size_t>(integer(0, vars - 1)));
        return m;
    }

    Polynomial polynomial(std::size_t vars, unsigned max_degree, int max_terms = 3) {
        Polynomial p;
        int terms = static_cast<int>(integer(1, max_terms));
        for (int t = 0; t < terms; ++t) {
            long c = integer(-3, 3);
            if (c == 0) c = 1;
            p = p + monomial(vars, max_degree).scaled(Rational(c));
        }
        return p;
    }

    // Polynomial in a chosen subset of variables.
    Polynomial polynomial_in(const std::vector<std::size_t>& vars, unsigned max_degree, int max_terms = 3) {
        Polynomial p;
        int terms = static_cast<int>(integer(1, max_terms));
        for (int t = 0; t < terms; ++t) {
            long c = integer(-3, 3);
            if (c == 0) c = 1;
            unsigned deg = static_cast<unsigned>(integer(0, max_degree));
            Polynomial m(1);
            for (unsigned k = 0; k < deg; ++k) m = m * Polynomial::variable(vars[static_cast<std::size_t>(integer(0, vars.size() - 1))]);
            p = p + m.scaled(Rational(c));
        }
        return p;
    }

    DifferentialForm form(const ChartPtr& c, unsigned degree, unsigned max_coeff_degree = 2, int max_terms = 3) {
        DifferentialForm w(c, degree);
        const std::size_t n = c->dim();
        if (degree > n) return w;
        int terms = static_cast<int>(integer(1, max_terms));
        for (int t = 0; t < terms; ++t) {
            std::vector<std::uint16_t> idx;
            std::vector<std::size_t> all(n);
            for (std::size_t i = 0; i < n; ++i) all[i] = i;
            std::shuffle(all.begin(), all.end(), rng_);
            for (unsigned k = 0; k < degree; ++k) idx.push_back(static_cast<std::uint16_t>(all[k]));
            std::sort(idx.begin(), idx.end());
            w.add_term(idx, RationalFunction(polynomial(n, max_coeff_degree)));
        }
        return w;
    }

    VectorField vector_field(const ChartPtr& c, unsigned max_degree = 2) {
        VectorField v(c);
        for (std::size_t i = 0; i < c->dim(); ++i)
            if (integer(0, 2) > 0) v[i] = RationalFunction(polynomial(c->dim(), max_degree, 2));
        return v;
    }

    std::vector<Rational> point(std::size_t n) {
        std::vector<Rational> p;
        for (std::size_t i = 0; i < n; ++i) p.push_back(rational());
        return p;
    }

    // Sparse system of 1-forms: each generator is dx_i plus a few monomial multiples of other differentials.
    PfaffianSystem sparse_system(const ChartPtr& c, std::size_t r) {
        const std::size_t n = c->dim();
        std::vector<std::size_t> lead(n);
        for (std::size_t i = 0; i < n; ++i) lead[i] = i;
        std::shuffle(lead.begin(), lead.end(), rng_);
        std::vector<DifferentialForm> gens;
        for (std::size_t a = 0; a < r; ++a) {
            DifferentialForm w = DifferentialForm::differential(c, lead[a]);
            int extra = r < n ? static_cast<int>(integer(0, 2)) : 0;
            for (int e = 0; e < extra; ++e) {
                std::size_t j = lead[static_cast<std::size_t>(integer(r, n - 1))];
                long coef = integer(-2, 2);
                if (coef == 0) coef = 1;
                w.add_term({static_cast<std::uint16_t>(j)}, RationalFunction(monomial(n, 1).scaled(Rational(coef))));
            }
            gens.push_back(w);
        }
        return PfaffianSystem(c, gens);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Random hamiltonian of degree <= max_degree on a first-order contact chart.
inline RationalFunction random_hamiltonian(Random& r, const ContactChart& c, unsigned max_degree = 2, bool with_y = true) {
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < c.dim(); ++i)
        if (with_y || i != c.y()) vars.push_back(i);
    return RationalFunction(r.polynomial_in(vars, max_degree));
}

inline std::string catalog_path() { return std::string(CARTAN_EDS_SOURCE_DIR) + "/data/catalog.eds"; }
inline std::string examples_dir() { return std::string(CARTAN_EDS_SOURCE_DIR) + "/data/examples"; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline Catalog shipped_catalog() { return parse_catalog(slurp(catalog_path())); }

}  // namespace testing_support

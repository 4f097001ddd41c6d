#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pfaffian.hpp"

namespace cartan {

// Jet chart of order k over n independent variables: x1..xn, y, then the
// p-coordinates p_J for nondecreasing index tuples J, ordered by length and
// then lexicographically. Coordinates of order k form a prefix of order k+1.
class ContactChart {
public:
    ContactChart(std::size_t n, std::size_t k) : n_(n), k_(k) {
        if (n == 0) throw UsageError("contact chart needs n >= 1");
        if (k == 0) throw UsageError("contact chart needs order >= 1");
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
        names.push_back("y");
        std::vector<std::vector<std::uint16_t>> level{{}};
        for (std::size_t j = 1; j <= k; ++j) {
            std::vector<std::vector<std::uint16_t>> next;
            for (const auto& J : level) {
                std::uint16_t start = J.empty() ? 0 : J.back();
                for (std::uint16_t m = start; m < n; ++m) {
                    auto K = J;
                    K.push_back(m);
                    next.push_back(K);
                }
            }
            for (const auto& J : next) {
                index_.emplace(J, names.size());
                jets_.push_back(J);
                names.push_back(p_name(J));
            }
            level = std::move(next);
        }
        chart_ = make_chart(std::move(names));
    }

    std::size_t n() const { return n_; }
    std::size_t order() const { return k_; }
    const ChartPtr& chart() const { return chart_; }
    std::size_t dim() const { return chart_->dim(); }

    std::size_t x(std::size_t i) const { return i; }
    std::size_t y() const { return n_; }
    std::size_t p(std::size_t i) const { return n_ + 1 + i; }

    // Index of p_J (J unsorted allowed); nullopt beyond the chart's order.
    std::optional<std::size_t> p(std::vector<std::uint16_t> J) const {
        std::sort(J.begin(), J.end());
        auto it = index_.find(J);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Multi-indices of the p-coordinates, in chart order.
    const std::vector<std::vector<std::uint16_t>>& jets() const { return jets_; }

    std::string p_name(const std::vector<std::uint16_t>& J) const {
        std::string s = "p";
        for (std::size_t a = 0; a < J.size(); ++a) {
            if (n_ >= 10 && a > 0) s += "_";
            s += std::to_string(J[a] + 1);
        }
        return s;
    }

    RationalFunction var(std::size_t i) const { return RationalFunction::variable(i); }

    // Recognizes a chart laid out as ContactChart(n, 1).
    static std::optional<ContactChart> order_one_from(const ChartPtr& c) {
        if (!c || c->dim() < 3 || (c->dim() - 1) % 2 != 0) return std::nullopt;
        ContactChart cc((c->dim() - 1) / 2, 1);
        if (*cc.chart() != *c) return std::nullopt;
        cc.chart_ = c;
        return cc;
    }

private:
    std::size_t n_, k_;
    ChartPtr chart_;
    std::map<std::vector<std::uint16_t>, std::size_t> index_;
    std::vector<std::vector<std::uint16_t>> jets_;
};

inline void require_order_one(const ContactChart& c, const std::string& what) {
    if (c.order() != 1) throw DomainError(what + " needs an order-1 contact chart");
}

// The contact form dy - sum p_i dx^i.
inline DifferentialForm contact_form(const ContactChart& c) {
    DifferentialForm w = DifferentialForm::differential(c.chart(), c.y());
    for (std::size_t i = 0; i < c.n(); ++i)
        w -= wedge(DifferentialForm::scalar(c.chart(), c.var(c.p(i))), DifferentialForm::differential(c.chart(), c.x(i)));
    return w;
}

inline PfaffianSystem build_contact_system(std::size_t n, std::size_t k) {
    ContactChart c(n, k);
    std::vector<DifferentialForm> gens{contact_form(c)};
    for (const auto& J : c.jets()) {
        if (J.size() >= k) continue;
        DifferentialForm w = DifferentialForm::differential(c.chart(), *c.p(J));
        for (std::uint16_t m = 0; m < n; ++m) {
            auto K = J;
            K.push_back(m);
            w -= wedge(DifferentialForm::scalar(c.chart(), c.var(*c.p(K))), DifferentialForm::differential(c.chart(), m));
        }
        gens.push_back(std::move(w));
    }
    return PfaffianSystem(c.chart(), std::move(gens));
}

// D_i f on ContactChart(n, k+1) for f on ContactChart(n, k); i is 0-based.
inline RationalFunction total_derivative(const ContactChart& c, const RationalFunction& f, std::size_t i) {
    if (i >= c.n()) throw DomainError("total_derivative: index out of range");
    if (f.width() > c.dim()) throw DomainError("total_derivative: function uses coordinates beyond the chart");
    ContactChart up(c.n(), c.order() + 1);
    RationalFunction r = f.derivative(c.x(i));
    if (f.uses(c.y())) r += f.derivative(c.y()) * up.var(up.p(i));
    for (const auto& J : c.jets()) {
        std::size_t v = *c.p(J);
        if (!f.uses(v)) continue;
        auto K = J;
        K.push_back(static_cast<std::uint16_t>(i));
        r += f.derivative(v) * up.var(*up.p(K));
    }
    return r;
}

// Lie field of a hamiltonian on an order-1 chart:
// -f_{p_i} d/dx^i + (f - p_i f_{p_i}) d/dy + (f_{x^i} + p_i f_y) d/dp_i.
inline VectorField lie_field_from_hamiltonian(const ContactChart& c, const RationalFunction& f) {
    require_order_one(c, "lie_field_from_hamiltonian");
    VectorField xi(c.chart());
    RationalFunction fy = f.derivative(c.y());
    RationalFunction ycomp = f;
    for (std::size_t i = 0; i < c.n(); ++i) {
        RationalFunction fp = f.derivative(c.p(i));
        xi[c.x(i)] = -fp;
        ycomp -= c.var(c.p(i)) * fp;
        xi[c.p(i)] = f.derivative(c.x(i)) + c.var(c.p(i)) * fy;
    }
    xi[c.y()] = ycomp;
    return xi;
}

struct HamiltonianOfField {
    RationalFunction f;
    bool is_lie = false;
};

inline HamiltonianOfField hamiltonian_of_field(const ContactChart& c, const VectorField& xi) {
    require_order_one(c, "hamiltonian_of_field");
    require_same_chart(c.chart(), xi.chart());
    DifferentialForm w = contact_form(c);
    return {pairing(w, xi), wedge(w.lie_derivative(xi), w).is_zero()};
}

// Lift of the base field sum a^i d/dx^i + b d/dy to the contact chart.
inline VectorField prolong_vector_field(const ContactChart& c, const std::vector<RationalFunction>& a,
                                        const RationalFunction& b) {
    require_order_one(c, "prolong_vector_field");
    if (a.size() != c.n()) throw DomainError("prolong_vector_field: expected one x-component per independent variable");
    auto base_only = [&](const RationalFunction& g) {
        if (g.width() > c.dim()) return false;
        for (std::size_t i = 0; i < c.n(); ++i)
            if (g.uses(c.p(i))) return false;
        return true;
    };
    if (!base_only(b)) throw DomainError("prolong_vector_field: y-component depends on p (not a base field)");
    RationalFunction f = b;
    for (std::size_t i = 0; i < c.n(); ++i) {
        if (!base_only(a[i])) throw DomainError("prolong_vector_field: x" + std::to_string(i + 1) + "-component depends on p (not a base field)");
        f -= c.var(c.p(i)) * a[i];
    }
    return lie_field_from_hamiltonian(c, f);
}

// Coordinate bracket sum f_{p_i}(g_{x^i} + p_i g_y) - g_{p_i}(f_{x^i} + p_i f_y).
inline RationalFunction jacobi_bracket(const ContactChart& c, const RationalFunction& f, const RationalFunction& g) {
    require_order_one(c, "jacobi_bracket");
    RationalFunction fy = f.derivative(c.y()), gy = g.derivative(c.y());
    RationalFunction r;
    for (std::size_t i = 0; i < c.n(); ++i) {
        RationalFunction pi = c.var(c.p(i));
        RationalFunction fp = f.derivative(c.p(i)), gp = g.derivative(c.p(i));
        if (!fp.is_zero()) r += fp * (g.derivative(c.x(i)) + pi * gy);
        if (!gp.is_zero()) r -= gp * (f.derivative(c.x(i)) + pi * fy);
    }
    return r;
}

// Hamiltonian of [xi_f, xi_g], i.e. xi_f(g) - g f_y.
inline RationalFunction lagrange_bracket(const ContactChart& c, const RationalFunction& f, const RationalFunction& g) {
    return -jacobi_bracket(c, f, g) + f * g.derivative(c.y()) - g * f.derivative(c.y());
}

// Characteristic field of F = 0 in the ratio form
// (F_{p_i}; sum p_i F_{p_i}; -(F_{x^i} + p_i F_y)).
inline VectorField cauchy_char_field(const ContactChart& c, const RationalFunction& F) {
    require_order_one(c, "cauchy_char_field");
    DifferentialForm dF = d(DifferentialForm::scalar(c.chart(), F));
    if (wedge(dF, contact_form(c)).is_zero()) throw DomainError("cauchy_char_field: dF ^ w vanishes identically (irregular equation)");
    VectorField v(c.chart());
    RationalFunction Fy = F.derivative(c.y()), ycomp;
    for (std::size_t i = 0; i < c.n(); ++i) {
        RationalFunction pi = c.var(c.p(i));
        RationalFunction Fp = F.derivative(c.p(i));
        v[c.x(i)] = Fp;
        ycomp += pi * Fp;
        v[c.p(i)] = -(F.derivative(c.x(i)) + pi * Fy);
    }
    v[c.y()] = ycomp;
    return v;
}

// First-order PDE system F_alpha = 0 on an order-1 contact chart. In graph
// form equation alpha reads p_{solved[alpha]} = rhs[alpha] and F_alpha = p - rhs.
class PDESystem {
public:
    struct Graph {
        std::vector<std::size_t> solved;  // 0-based p indices
        std::vector<RationalFunction> rhs;
    };

    PDESystem(std::size_t n, std::vector<RationalFunction> equations)
        : chart_(std::make_shared<ContactChart>(n, 1)), eqs_(std::move(equations)) {
        validate();
    }

    static PDESystem graph_form(std::size_t n, std::vector<std::size_t> solved, std::vector<RationalFunction> rhs) {
        if (solved.size() != rhs.size()) throw UsageError("graph form: solved indices and right sides differ in count");
        ContactChart c(n, 1);
        std::vector<RationalFunction> eqs;
        for (std::size_t a = 0; a < solved.size(); ++a) {
            if (solved[a] >= n) throw DomainError("graph form: p" + std::to_string(solved[a] + 1) + " is not a coordinate");
            for (std::size_t b = 0; b < a; ++b)
                if (solved[b] == solved[a]) throw DomainError("graph form: p" + std::to_string(solved[a] + 1) + " solved twice");
        }
        for (std::size_t a = 0; a < solved.size(); ++a) {
            for (auto s : solved)
                if (rhs[a].uses(c.p(s)))
                    throw DomainError("graph form: right side of p" + std::to_string(solved[a] + 1) + " uses solved coordinate p" +
                                      std::to_string(s + 1));
            eqs.push_back(c.var(c.p(solved[a])) - rhs[a]);
        }
        PDESystem s(n, std::move(eqs));
        s.graph_ = Graph{std::move(solved), std::move(rhs)};
        return s;
    }

    const ContactChart& contact() const { return *chart_; }
    const ChartPtr& chart() const { return chart_->chart(); }
    std::size_t n() const { return chart_->n(); }
    const std::vector<RationalFunction>& equations() const { return eqs_; }
    std::size_t size() const { return eqs_.size(); }
    const std::optional<Graph>& graph() const { return graph_; }

    // Images of the chart coordinates under the graph substitution, still on
    // the full chart.
    std::vector<RationalFunction> graph_images() const {
        if (!graph_) throw UsageError("system is not in graph form");
        std::vector<RationalFunction> img;
        for (std::size_t i = 0; i < chart_->dim(); ++i) img.push_back(chart_->var(i));
        for (std::size_t a = 0; a < graph_->solved.size(); ++a) img[chart_->p(graph_->solved[a])] = graph_->rhs[a];
        return img;
    }

    RationalFunction restrict(const RationalFunction& f) const { return f.substitute(graph_images()); }

private:
    void validate() const {
        if (eqs_.size() > n() + 1) throw DomainError("PDE system has more than n + 1 equations");
        for (std::size_t a = 0; a < eqs_.size(); ++a)
            if (eqs_[a].width() > chart_->dim()) throw DomainError("equation " + std::to_string(a + 1) + " uses coordinates beyond the chart");
        std::vector<DifferentialForm> rows;
        for (const auto& F : eqs_) rows.push_back(d(DifferentialForm::scalar(chart(), F)));
        if (!rows.empty() && generic_rank(rows).rank != eqs_.size())
            throw RankDeficiency("PDE system: the differentials dF are dependent");
    }

    std::shared_ptr<const ContactChart> chart_;
    std::vector<RationalFunction> eqs_;
    std::optional<Graph> graph_;
};

struct Obstruction {
    std::size_t alpha = 0, beta = 0;          // 0-based equation indices
    RationalFunction jacobi_residue;          // {F_a, F_b}|S by the coordinate formula
    RationalFunction lagrange_residue;        // [F_a, F_b]|S, the commutator hamiltonian
    std::optional<PointAssignment> point;     // set for sampled verdicts
};

enum class IntegrabilityVerdict { Integrable, NoObstructionAtSamples, Obstructed };

inline std::string to_string(IntegrabilityVerdict v) {
    switch (v) {
        case IntegrabilityVerdict::Integrable: return "integrable";
        case IntegrabilityVerdict::NoObstructionAtSamples: return "no obstruction found at sampled points";
        case IntegrabilityVerdict::Obstructed: return "obstructed";
    }
    return "obstructed";
}

struct IntegrabilityReport {
    IntegrabilityVerdict verdict = IntegrabilityVerdict::Integrable;
    bool exact = true;
    std::vector<Obstruction> obstructions;
    std::vector<PointAssignment> samples;
};

struct IntegrabilityOptions {
    bool force_sampling = false;
    std::vector<PointAssignment> points;  // points of S supplied by the caller
    std::size_t samples = 8;
    std::optional<std::uint64_t> seed;
    std::stop_token stop;
};

// Random points of S: small rationals on the free coordinates, solved p's
// from the graph form. Points where a right side has a pole are redrawn.
inline std::vector<PointAssignment> sample_points(const PDESystem& s, std::size_t count, std::uint64_t seed) {
    const auto& g = s.graph();
    if (!g) throw UsageError("sample_points: system is not in graph form");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-5, 5), den(1, 3);
    std::vector<PointAssignment> out;
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 64 * (count + 1)) throw PoleError("sample_points: right sides have poles at every drawn point");
        std::vector<Rational> v(s.contact().dim());
        for (auto& x : v) x = make_rational(num(rng), den(rng));
        try {
            for (std::size_t a = 0; a < g->solved.size(); ++a) v[s.contact().p(g->solved[a])] = g->rhs[a].evaluate(v);
        } catch (const PoleError&) {
            continue;
        }
        out.push_back({s.chart(), std::move(v)});
    }
    return out;
}

inline IntegrabilityReport integrability_check(const PDESystem& s, const IntegrabilityOptions& opt = {}) {
    const ContactChart& c = s.contact();
    IntegrabilityReport rep;
    const auto& F = s.equations();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < F.size(); ++a)
        for (std::size_t b = a + 1; b < F.size(); ++b) pairs.emplace_back(a, b);

    const bool sampled = opt.force_sampling || !s.graph();
    if (!sampled) {
        for (auto [a, b] : pairs) {
            check_stop(opt.stop);
            RationalFunction jr = s.restrict(jacobi_bracket(c, F[a], F[b]));
            RationalFunction lr = s.restrict(lagrange_bracket(c, F[a], F[b]));
            if (!jr.is_zero() || !lr.is_zero()) rep.obstructions.push_back({a, b, jr, lr, std::nullopt});
        }
        rep.verdict = rep.obstructions.empty() ? IntegrabilityVerdict::Integrable : IntegrabilityVerdict::Obstructed;
        return rep;
    }

    rep.exact = false;
    if (!opt.points.empty()) {
        rep.samples = opt.points;
    } else if (s.graph()) {
        if (!opt.seed) throw UsageError("sampled integrability check needs a seed");
        rep.samples = sample_points(s, opt.samples, *opt.seed);
    } else {
        throw UsageError("integrability check needs a graph form or sample points on S");
    }
    for (const auto& pt : rep.samples) {
        require_same_chart(s.chart(), pt.chart);
        for (std::size_t a = 0; a < F.size(); ++a)
            if (F[a].evaluate(pt.values) != 0)
                throw DomainError("sample point does not lie on S (equation " + std::to_string(a + 1) + ")");
    }
    for (auto [a, b] : pairs) {
        RationalFunction J = jacobi_bracket(c, F[a], F[b]);
        RationalFunction L = lagrange_bracket(c, F[a], F[b]);
        for (const auto& pt : rep.samples) {
            check_stop(opt.stop);
            Rational jv = J.evaluate(pt.values), lv = L.evaluate(pt.values);
            if (jv != 0 || lv != 0) {
                rep.obstructions.push_back({a, b, RationalFunction(jv), RationalFunction(lv), pt});
                break;
            }
        }
    }
    rep.verdict = rep.obstructions.empty() ? IntegrabilityVerdict::NoObstructionAtSamples : IntegrabilityVerdict::Obstructed;
    return rep;
}

struct RestrictedSystem {
    ChartPtr chart;                       // chart minus the solved p's
    std::vector<std::size_t> kept;        // full-chart index of each reduced coordinate
    PfaffianSystem system;
};

inline RestrictedSystem restrict_system(const PDESystem& s) {
    const auto& g = s.graph();
    if (!g) throw UsageError("restrict_system needs a graph form");
    const ContactChart& c = s.contact();
    std::vector<bool> solved(c.dim(), false);
    for (auto i : g->solved) solved[c.p(i)] = true;
    RestrictedSystem out;
    std::vector<std::string> names;
    std::vector<RationalFunction> rename(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) {
        if (solved[i]) continue;
        rename[i] = RationalFunction::variable(out.kept.size());
        out.kept.push_back(i);
        names.push_back(c.chart()->name(i));
    }
    out.chart = make_chart(std::move(names));
    std::vector<RationalFunction> images(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) images[i] = solved[i] ? RationalFunction() : rename[i];
    for (std::size_t a = 0; a < g->solved.size(); ++a) images[c.p(g->solved[a])] = g->rhs[a].substitute(rename);
    DifferentialForm w = contact_form(c).pullback(out.chart, images);
    std::vector<DifferentialForm> gens;
    if (!w.is_zero()) gens.push_back(w);
    out.system = PfaffianSystem(out.chart, std::move(gens));
    return out;
}

struct CompleteSystemReport {
    bool complete = true;
    std::vector<VectorField> fields;                          // xi_{f_i} - f_i d/dy
    std::vector<std::pair<std::size_t, std::size_t>> failing;  // pairs whose commutator leaves the span
};

inline CompleteSystemReport complete_system_check(const ContactChart& c, const std::vector<RationalFunction>& fs,
                                                  const std::stop_token& stop = {}) {
    require_order_one(c, "complete_system_check");
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            RationalFunction b = jacobi_bracket(c, fs[i], fs[j]);
            if (!b.is_zero())
                throw MathError("complete_system_check: bracket of functions " + std::to_string(i + 1) + " and " +
                                std::to_string(j + 1) + " is " + b.to_string(c.chart()->namer()) + ", not 0");
        }
    CompleteSystemReport rep;
    for (const auto& f : fs) {
        VectorField v = lie_field_from_hamiltonian(c, f);
        v[c.y()] -= f;
        rep.fields.push_back(std::move(v));
    }
    Matrix<RationalFunction> base;
    for (const auto& v : rep.fields) base.push_back(v.components());
    const std::size_t r = base.empty() ? 0 : generic_rank(base).rank;
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            check_stop(stop);
            Matrix<RationalFunction> aug = base;
            aug.push_back(bracket(rep.fields[i], rep.fields[j]).components());
            if (generic_rank(aug).rank > r) rep.failing.emplace_back(i, j);
        }
    rep.complete = rep.failing.empty();
    return rep;
}

// d(w^i) written in the wedge basis of the coframe (generators, then the
// supplied complement forms), terms containing a `modulo` generator dropped.
struct CongruenceTerm {
    RationalFunction coefficient;
    std::size_t first = 0, second = 0;  // coframe positions, first < second
};

struct CongruenceTable {
    std::vector<std::string> labels;  // one per coframe element
    std::vector<std::vector<CongruenceTerm>> rows;
    ChartPtr chart;

    std::string row_to_string(std::size_t i) const {
        std::vector<std::pair<std::string, RationalFunction>> parts;
        for (const auto& t : rows.at(i)) parts.emplace_back(labels[t.first] + "^" + labels[t.second], t.coefficient);
        return detail::render_terms(parts, chart->namer());
    }
};

inline CongruenceTable structure_congruences(const PfaffianSystem& p, const std::vector<std::size_t>& modulo,
                                             const std::vector<DifferentialForm>& coframe) {
    const std::size_t n = p.dim();
    std::vector<DifferentialForm> frame = p.generators();
    for (const auto& t : coframe) {
        require_same_chart(p.chart(), t.chart());
        if (t.degree() != 1) throw DomainError("coframe element is not a 1-form");
        frame.push_back(t);
    }
    for (auto m : modulo)
        if (m >= p.size()) throw UsageError("modulo index " + std::to_string(m + 1) + " is not a generator");
    if (frame.size() != n) throw RankDeficiency("generators and coframe have " + std::to_string(frame.size()) + " forms, need " + std::to_string(n));
    Matrix<RationalFunction> m = one_form_matrix(frame, n);
    auto cert = generic_rank(m);
    if (cert.rank != n) throw RankDeficiency("generators and coframe are not a coframe (generic rank " + std::to_string(cert.rank) + ")");
    // theta = m dx, so dx = m^{-1} theta; invert by reducing [m | I].
    Matrix<RationalFunction> aug(n, Vector<RationalFunction>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
        aug[i][n + i] = RationalFunction(1);
    }
    rref(aug);
    Matrix<RationalFunction> inv(n, Vector<RationalFunction>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) inv[j][k] = aug[j][n + k];

    CongruenceTable table;
    table.chart = p.chart();
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < p.size(); ++i) labels.push_back("w" + std::to_string(i + 1));
    for (std::size_t k = 0; k < coframe.size(); ++k) {
        const auto& t = coframe[k];
        std::string label = "t" + std::to_string(k + 1);
        if (t.terms().size() == 1 && t.terms().begin()->second.is_one())
            label = "d" + p.chart()->name(t.terms().begin()->first[0]);
        labels.push_back(label);
    }
    table.labels = labels;

    std::vector<bool> dropped(n, false);
    for (auto i : modulo) dropped[i] = true;
    for (const auto& w : p.generators()) {
        std::map<std::pair<std::size_t, std::size_t>, RationalFunction> acc;
        const DifferentialForm dw = d(w);
        for (const auto& [idx, f] : dw.terms()) {
            const auto a = idx[0], b = idx[1];
            for (std::size_t k = 0; k < n; ++k) {
                if (inv[a][k].is_zero()) continue;
                for (std::size_t l = 0; l < n; ++l) {
                    if (k == l || inv[b][l].is_zero()) continue;
                    RationalFunction c = f * inv[a][k] * inv[b][l];
                    if (k < l) acc[{k, l}] += c;
                    else acc[{l, k}] -= c;
                }
            }
        }
        std::vector<CongruenceTerm> row;
        for (const auto& [kl, c] : acc)
            if (!c.is_zero() && !dropped[kl.first] && !dropped[kl.second]) row.push_back({c, kl.first, kl.second});
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace cartan

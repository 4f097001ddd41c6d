#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "contact.hpp"

namespace cartan {

struct NamedSystem {
    std::string name;
    std::vector<DifferentialForm> forms;
};

struct NamedFunction {
    std::string name;
    RationalFunction value;
};

struct NamedField {
    std::string name;
    VectorField field;
};

struct NamedPoint {
    std::string name;
    PointAssignment point;
};

// One equation of a pde block: either graph-like "p_i = rhs" or "lhs = rhs".
struct PdeEquation {
    std::optional<std::size_t> solved;  // 0-based p index when the left side is a lone p
    RationalFunction lhs, rhs;
};

struct NamedPde {
    std::string name;
    std::size_t n = 1;
    std::vector<PdeEquation> equations;

    // Graph form when every left side is a distinct lone p and no right side
    // uses a solved p; otherwise the implicit system lhs - rhs = 0.
    PDESystem system() const {
        ContactChart c(n, 1);
        bool graph = !equations.empty();
        std::vector<std::size_t> solved;
        for (const auto& e : equations) {
            if (!e.solved) graph = false;
            else solved.push_back(*e.solved);
        }
        if (graph) {
            for (const auto& e : equations)
                for (auto s : solved)
                    if (e.rhs.uses(c.p(s))) graph = false;
            for (std::size_t a = 0; a < solved.size() && graph; ++a)
                for (std::size_t b = 0; b < a; ++b)
                    if (solved[a] == solved[b]) graph = false;
        }
        if (graph) {
            std::vector<RationalFunction> rhs;
            for (const auto& e : equations) rhs.push_back(e.rhs);
            return PDESystem::graph_form(n, solved, rhs);
        }
        std::vector<RationalFunction> eqs;
        for (const auto& e : equations) eqs.push_back(e.lhs - e.rhs);
        return PDESystem(n, std::move(eqs));
    }
};

struct SystemDocument {
    ChartPtr chart;                      // null when the document only holds pde blocks
    std::optional<std::size_t> contact;  // set when declared as `contact n=...`
    std::size_t contact_order = 1;
    std::vector<NamedSystem> systems;
    std::vector<NamedFunction> functions;
    std::vector<NamedField> fields;
    std::vector<NamedPoint> points;
    std::vector<NamedPde> pdes;

    template <class T>
    static const T* find_in(const std::vector<T>& v, const std::string& name) {
        for (const auto& x : v)
            if (x.name == name) return &x;
        return nullptr;
    }

    const NamedSystem& system(const std::string& name) const { return require(systems, name, "system"); }
    const NamedFunction& function(const std::string& name) const { return require(functions, name, "function"); }
    const NamedField& field(const std::string& name) const { return require(fields, name, "field"); }
    const NamedPoint& point(const std::string& name) const { return require(points, name, "point"); }
    const NamedPde& pde(const std::string& name) const { return require(pdes, name, "pde"); }

    std::optional<ContactChart> contact_chart() const {
        if (contact) {
            ContactChart c(*contact, contact_order);
            if (same_chart(c.chart(), chart)) return c;
        }
        return ContactChart::order_one_from(chart);
    }

private:
    template <class T>
    static const T& require(const std::vector<T>& v, const std::string& name, const char* kind) {
        if (const T* x = find_in(v, name)) return *x;
        std::string known;
        for (const auto& y : v) known += (known.empty() ? "" : ", ") + y.name;
        throw UsageError(std::string("no ") + kind + " named '" + name + "'" +
                         (known.empty() ? std::string(" (document has none)") : " (available: " + known + ")"));
    }
};

inline bool operator==(const NamedSystem& a, const NamedSystem& b) { return a.name == b.name && a.forms == b.forms; }
inline bool operator==(const NamedFunction& a, const NamedFunction& b) { return a.name == b.name && a.value == b.value; }
inline bool operator==(const NamedField& a, const NamedField& b) { return a.name == b.name && a.field == b.field; }
inline bool operator==(const NamedPoint& a, const NamedPoint& b) { return a.name == b.name && a.point == b.point; }
inline bool operator==(const PdeEquation& a, const PdeEquation& b) {
    return a.solved == b.solved && a.lhs == b.lhs && a.rhs == b.rhs;
}
inline bool operator==(const NamedPde& a, const NamedPde& b) {
    return a.name == b.name && a.n == b.n && a.equations == b.equations;
}
inline bool operator==(const SystemDocument& a, const SystemDocument& b) {
    bool charts = (!a.chart && !b.chart) || (a.chart && b.chart && *a.chart == *b.chart);
    return charts && a.contact == b.contact && a.contact_order == b.contact_order && a.systems == b.systems &&
           a.functions == b.functions && a.fields == b.fields && a.points == b.points && a.pdes == b.pdes;
}

namespace formlang {

struct Token {
    enum Kind { Ident, Int, Op, End } kind = End;
    std::string text;
    std::size_t column = 0;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& s, std::size_t line, std::size_t col0) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char ch = static_cast<unsigned char>(s[i]);
        if (std::isspace(ch)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isalpha(ch)) {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({Token::Ident, s.substr(start, i - start), col0 + start});
        } else if (std::isdigit(ch)) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back({Token::Int, s.substr(start, i - start), col0 + start});
        } else if (std::string("+-*/^()").find(s[i]) != std::string::npos) {
            out.push_back({Token::Op, std::string(1, s[i]), col0 + start});
            ++i;
        } else {
            throw ParseError(line, col0 + start, std::string("unexpected character '") + s[i] + "'");
        }
    }
    out.push_back({Token::End, "", col0 + s.size()});
    return out;
}

// A parsed value: a scalar function or a homogeneous differential form.
struct Value {
    bool is_form = false;
    RationalFunction scalar;
    DifferentialForm form;
};

class ExpressionParser {
public:
    ExpressionParser(const ChartPtr& chart, const std::string& text, std::size_t line, std::size_t col0)
        : chart_(chart), line_(line), toks_(tokenize(text, line, col0)) {}

    Value parse_all() {
        Value v = expr();
        if (peek().kind != Token::End) fail(peek(), "expected operator or end of expression");
        return v;
    }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        std::string got = t.kind == Token::End ? "end of expression" : "'" + t.text + "'";
        throw ParseError(line_, t.column, msg + ", found " + got);
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool at_op(const char* op) const { return peek().kind == Token::Op && peek().text == op; }

    Value expr() {
        Value v = term();
        while (at_op("+") || at_op("-")) {
            const Token& op = next();
            Value r = term();
            v = add(v, r, op, op.text == "-");
        }
        return v;
    }

    Value term() {
        Value v = unary();
        while (at_op("*") || at_op("/")) {
            const Token& op = next();
            Value r = unary();
            if (op.text == "*") {
                if (v.is_form && r.is_form) throw ParseError(line_, op.column, "product of two forms: use ^ for the wedge product");
                if (v.is_form) v.form = v.form.scaled(r.scalar);
                else if (r.is_form) v = form_value(r.form.scaled(v.scalar));
                else v.scalar *= r.scalar;
            } else {
                if (r.is_form) throw ParseError(line_, op.column, "division by a form");
                if (r.scalar.is_zero()) throw ParseError(line_, op.column, "division by zero");
                if (v.is_form) v.form = v.form.scaled(r.scalar.inverse());
                else v.scalar /= r.scalar;
            }
        }
        return v;
    }

    Value unary() {
        if (at_op("-")) {
            next();
            Value v = unary();
            if (v.is_form) v.form = -v.form;
            else v.scalar = -v.scalar;
            return v;
        }
        if (at_op("+")) {
            next();
            return unary();
        }
        return power();
    }

    Value power() {
        Value v = primary();
        while (at_op("^")) {
            const Token& op = next();
            if (!v.is_form) {
                bool neg = false;
                if (at_op("-")) {
                    next();
                    neg = true;
                }
                if (peek().kind != Token::Int) fail(peek(), "expected an integer exponent");
                const Token& e = next();
                if (e.text.size() > 6) throw ParseError(line_, e.column, "exponent too large");
                int k = std::stoi(e.text);
                if (neg && v.scalar.is_zero()) throw ParseError(line_, op.column, "division by zero");
                v.scalar = v.scalar.pow(neg ? -k : k);
            } else {
                Value r = primary();
                if (!r.is_form) throw ParseError(line_, op.column, "^ after a form needs a form (wedge product)");
                v.form = wedge(v.form, r.form);
            }
        }
        return v;
    }

    Value primary() {
        const Token& t = peek();
        if (t.kind == Token::Int) {
            next();
            Rational q;
            q.set_str(t.text, 10);
            return scalar_value(RationalFunction(q));
        }
        if (at_op("(")) {
            next();
            Value v = expr();
            if (!at_op(")")) fail(peek(), "expected ')'");
            next();
            return v;
        }
        if (t.kind == Token::Ident) {
            next();
            if (auto i = chart_->index(t.text)) return scalar_value(RationalFunction::variable(*i));
            if (t.text == "d" && at_op("(")) {
                next();
                Value v = expr();
                if (!at_op(")")) fail(peek(), "expected ')'");
                next();
                return form_value(v.is_form ? d(v.form) : d(DifferentialForm::scalar(chart_, v.scalar)));
            }
            if (t.text.size() > 1 && t.text[0] == 'd') {
                std::string base = t.text.substr(1);
                if (auto i = chart_->index(base)) return form_value(DifferentialForm::differential(chart_, *i));
                throw ParseError(line_, t.column + 1, "unknown coordinate " + base);
            }
            throw ParseError(line_, t.column, "unknown coordinate " + t.text);
        }
        fail(t, "expected a number, coordinate, differential or '('");
    }

    Value add(Value a, const Value& b, const Token& op, bool minus) {
        if (a.is_form != b.is_form) {
            // The scalar 0 is the zero form of any degree.
            if (a.is_form && b.scalar.is_zero()) return a;
            if (b.is_form && a.scalar.is_zero()) return form_value(minus ? -b.form : b.form);
            throw ParseError(line_, op.column, "cannot add a function and a form");
        }
        if (!a.is_form) {
            a.scalar = minus ? a.scalar - b.scalar : a.scalar + b.scalar;
            return a;
        }
        if (a.form.degree() != b.form.degree())
            throw ParseError(line_, op.column, "cannot add forms of degrees " + std::to_string(a.form.degree()) + " and " +
                                                   std::to_string(b.form.degree()));
        a.form = minus ? a.form - b.form : a.form + b.form;
        return a;
    }

    Value scalar_value(RationalFunction f) const {
        Value v;
        v.scalar = std::move(f);
        return v;
    }
    static Value form_value(DifferentialForm w) {
        Value v;
        v.is_form = true;
        v.form = std::move(w);
        return v;
    }

    ChartPtr chart_;
    std::size_t line_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

inline Value parse_value(const ChartPtr& chart, const std::string& text, std::size_t line = 1, std::size_t col0 = 1) {
    return ExpressionParser(chart, text, line, col0).parse_all();
}

inline std::size_t first_non_space(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return i;
}

inline std::string trim(const std::string& s) {
    std::size_t a = first_non_space(s), b = s.size();
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::pair<std::string, std::size_t>> words(const std::string& s) {
    std::vector<std::pair<std::string, std::size_t>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t a = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > a) out.emplace_back(s.substr(a, i - a), a + 1);
    }
    return out;
}

}  // namespace formlang

// Scalar at a source position; forms are rejected with the position kept.
inline RationalFunction parse_scalar_at(const ChartPtr& chart, const std::string& text, std::size_t line, std::size_t col0) {
    auto v = formlang::parse_value(chart, text, line, col0);
    if (v.is_form) throw ParseError(line, col0, "expected a function, found a " + std::to_string(v.form.degree()) + "-form");
    return v.scalar;
}

inline RationalFunction parse_scalar(const ChartPtr& chart, const std::string& text) {
    return parse_scalar_at(chart, text, 1, 1);
}

inline DifferentialForm parse_form(const ChartPtr& chart, const std::string& text) {
    auto v = formlang::parse_value(chart, text);
    if (!v.is_form) {
        if (v.scalar.is_zero()) return DifferentialForm(chart, 1);
        throw ParseError(1, 1, "expected a form, found a function");
    }
    return v.form;
}

// Line-based document parser. Headers start in column 1; block bodies are
// indented. '#' starts a comment.
inline SystemDocument parse_document(const std::string& text) {
    using namespace formlang;
    SystemDocument doc;
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }
    for (auto& l : lines) {
        auto h = l.find('#');
        if (h != std::string::npos) l = l.substr(0, h);
    }

    enum class Block { None, System, Field, Point, Pde } block = Block::None;
    std::map<std::string, std::size_t> names;  // object name -> declaring line
    std::optional<ContactChart> pde_chart;

    auto need_chart = [&](std::size_t ln, const std::string& kind) {
        if (!doc.chart) throw ParseError(ln, 1, kind + " declared before coords");
    };
    auto declare = [&](const std::string& name, std::size_t ln, std::size_t col) {
        if (!is_identifier(name)) throw ParseError(ln, col, "invalid name '" + name + "'");
        auto [it, fresh] = names.emplace(name, ln);
        if (!fresh) throw ParseError(ln, col, "name '" + name + "' already declared on line " + std::to_string(it->second));
    };

    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::size_t ln = k + 1;
        const std::string& raw = lines[k];
        std::size_t indent = first_non_space(raw);
        if (indent == raw.size()) continue;
        if (indent > 0) {
            const std::string body = raw.substr(indent);
            const std::size_t col0 = indent + 1;
            switch (block) {
                case Block::None:
                    throw ParseError(ln, col0, "indented line outside a block");
                case Block::System: {
                    Value v = parse_value(doc.chart, trim(body), ln, col0);
                    if (!v.is_form && v.scalar.is_zero()) v = Value{true, {}, DifferentialForm(doc.chart, 1)};
                    if (!v.is_form) throw ParseError(ln, col0, "degree mismatch: expected a 1-form, found a function");
                    if (v.form.degree() != 1)
                        throw ParseError(ln, col0, "degree mismatch: expected a 1-form, found a " + std::to_string(v.form.degree()) + "-form");
                    doc.systems.back().forms.push_back(std::move(v.form));
                    break;
                }
                case Block::Field: {
                    auto colon = body.find(':');
                    if (colon == std::string::npos) throw ParseError(ln, col0, "expected 'coordinate: expression'");
                    std::string coord = trim(body.substr(0, colon));
                    auto idx = doc.chart->index(coord);
                    if (!idx) throw ParseError(ln, col0, "unknown coordinate " + coord);
                    Value v = parse_value(doc.chart, body.substr(colon + 1), ln, col0 + colon + 1);
                    if (v.is_form) throw ParseError(ln, col0 + colon + 1, "field component must be a function");
                    auto& f = doc.fields.back().field;
                    if (!f[*idx].is_zero()) throw ParseError(ln, col0, "component " + coord + " given twice");
                    f[*idx] = v.scalar;
                    break;
                }
                case Block::Point: {
                    auto eq = body.find('=');
                    if (eq == std::string::npos) throw ParseError(ln, col0, "expected 'coordinate = rational'");
                    std::string coord = trim(body.substr(0, eq));
                    std::string val = trim(body.substr(eq + 1));
                    Rational q;
                    try {
                        q = parse_rational(val);
                    } catch (const Error&) {
                        throw ParseError(ln, col0 + eq + 1 + first_non_space(body.substr(eq + 1)),
                                         "expected an exact rational such as 3, -1/2, found '" + val + "'");
                    }
                    auto& pt = doc.points.back().point;
                    if (coord == "*") {
                        for (auto& x : pt.values) x = q;
                    } else {
                        auto idx = doc.chart->index(coord);
                        if (!idx) throw ParseError(ln, col0, "unknown coordinate " + coord);
                        pt.values[*idx] = q;
                    }
                    break;
                }
                case Block::Pde: {
                    auto eq = body.find('=');
                    PdeEquation e;
                    const ChartPtr& c = pde_chart->chart();
                    if (eq == std::string::npos) {
                        e.lhs = parse_scalar_at(c, body, ln, col0);
                    } else {
                        std::string lhs = trim(body.substr(0, eq));
                        e.lhs = parse_scalar_at(c, body.substr(0, eq), ln, col0);
                        e.rhs = parse_scalar_at(c, body.substr(eq + 1), ln, col0 + eq + 1);
                        for (std::size_t i = 0; i < pde_chart->n(); ++i)
                            if (lhs == c->name(pde_chart->p(i))) e.solved = i;
                    }
                    doc.pdes.back().equations.push_back(std::move(e));
                    break;
                }
            }
            continue;
        }

        auto w = words(raw);
        const std::string& kw = w[0].first;
        block = Block::None;
        if (kw == "coords" || kw == "contact") {
            if (doc.chart) throw ParseError(ln, 1, "chart already declared on an earlier line");
            if (kw == "coords") {
                std::vector<std::string> coords;
                std::map<std::string, bool> seen;
                for (std::size_t i = 1; i < w.size(); ++i) {
                    if (!is_identifier(w[i].first)) throw ParseError(ln, w[i].second, "invalid coordinate name '" + w[i].first + "'");
                    if (!seen.emplace(w[i].first, true).second) throw ParseError(ln, w[i].second, "duplicate coordinate " + w[i].first);
                    coords.push_back(w[i].first);
                }
                if (coords.empty()) throw ParseError(ln, raw.size() + 1, "coords needs at least one coordinate name");
                doc.chart = make_chart(std::move(coords));
            } else {
                std::optional<std::size_t> n;
                std::size_t order = 1;
                for (std::size_t i = 1; i < w.size(); ++i) {
                    const auto& [word, col] = w[i];
                    auto eq = word.find('=');
                    std::string key = word.substr(0, eq);
                    std::string val = eq == std::string::npos ? "" : word.substr(eq + 1);
                    if ((key != "n" && key != "order") || val.empty() || val.find_first_not_of("0123456789") != std::string::npos ||
                        val.size() > 3)
                        throw ParseError(ln, col, "expected n=<count> or order=<count>, found '" + word + "'");
                    if (key == "n") n = std::stoul(val);
                    else order = std::stoul(val);
                }
                if (!n || *n == 0) throw ParseError(ln, raw.size() + 1, "contact needs n=<count> with n >= 1");
                if (order == 0) throw ParseError(ln, 1, "contact order must be at least 1");
                doc.contact = n;
                doc.contact_order = order;
                doc.chart = ContactChart(*n, order).chart();
            }
        } else if (kw == "system") {
            need_chart(ln, "system");
            if (w.size() != 2) throw ParseError(ln, 1, "expected 'system <name>'");
            declare(w[1].first, ln, w[1].second);
            doc.systems.push_back({w[1].first, {}});
            block = Block::System;
        } else if (kw == "field") {
            need_chart(ln, "field");
            if (w.size() != 2) throw ParseError(ln, 1, "expected 'field <name>'");
            declare(w[1].first, ln, w[1].second);
            doc.fields.push_back({w[1].first, VectorField(doc.chart)});
            block = Block::Field;
        } else if (kw == "point") {
            need_chart(ln, "point");
            if (w.size() != 2) throw ParseError(ln, 1, "expected 'point <name>'");
            declare(w[1].first, ln, w[1].second);
            doc.points.push_back({w[1].first, {doc.chart, std::vector<Rational>(doc.chart->dim(), Rational(0))}});
            block = Block::Point;
        } else if (kw == "function") {
            need_chart(ln, "function");
            auto eq = raw.find('=');
            if (w.size() < 2 || eq == std::string::npos) throw ParseError(ln, 1, "expected 'function <name> = <expression>'");
            std::string name = trim(raw.substr(8, eq - 8));
            declare(name, ln, 10);
            doc.functions.push_back({name, parse_scalar_at(doc.chart, raw.substr(eq + 1), ln, eq + 2)});
        } else if (kw == "pde") {
            // pde <name> on n=<count>
            if (w.size() != 4 || w[2].first != "on" || w[3].first.rfind("n=", 0) != 0)
                throw ParseError(ln, 1, "expected 'pde <name> on n=<count>'");
            declare(w[1].first, ln, w[1].second);
            std::string val = w[3].first.substr(2);
            if (val.empty() || val.find_first_not_of("0123456789") != std::string::npos || val.size() > 3 || std::stoul(val) == 0)
                throw ParseError(ln, w[3].second, "expected n=<count> with n >= 1");
            NamedPde p;
            p.name = w[1].first;
            p.n = std::stoul(val);
            pde_chart.emplace(p.n, 1);
            doc.pdes.push_back(std::move(p));
            block = Block::Pde;
        } else {
            throw ParseError(ln, 1, "unknown keyword '" + kw + "' (expected coords, contact, system, function, field, point or pde)");
        }
    }
    return doc;
}

inline std::string render_document(const SystemDocument& doc) {
    std::ostringstream out;
    if (doc.chart) {
        if (doc.contact) {
            out << "contact n=" << *doc.contact;
            if (doc.contact_order != 1) out << " order=" << doc.contact_order;
            out << "\n";
        } else {
            out << "coords";
            for (const auto& n : doc.chart->names()) out << " " << n;
            out << "\n";
        }
    }
    auto namer = doc.chart ? doc.chart->namer() : VariableNamer(default_variable_name);
    for (const auto& f : doc.functions) out << "function " << f.name << " = " << f.value.to_string(namer) << "\n";
    for (const auto& s : doc.systems) {
        out << "system " << s.name << "\n";
        for (const auto& w : s.forms) out << " " << w.to_string() << "\n";
    }
    for (const auto& f : doc.fields) {
        out << "field " << f.name << "\n";
        for (std::size_t i = 0; i < doc.chart->dim(); ++i)
            if (!f.field[i].is_zero()) out << " " << doc.chart->name(i) << ": " << f.field[i].to_string(namer) << "\n";
    }
    for (const auto& p : doc.points) {
        out << "point " << p.name << "\n";
        for (std::size_t i = 0; i < doc.chart->dim(); ++i) out << " " << doc.chart->name(i) << " = " << to_string(p.point.values[i]) << "\n";
    }
    for (const auto& p : doc.pdes) {
        out << "pde " << p.name << " on n=" << p.n << "\n";
        ContactChart c(p.n, 1);
        auto pn = c.chart()->namer();
        for (const auto& e : p.equations) out << " " << e.lhs.to_string(pn) << " = " << e.rhs.to_string(pn) << "\n";
    }
    return out.str();
}

}  // namespace cartan

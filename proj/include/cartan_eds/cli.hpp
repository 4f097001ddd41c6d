#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "contact.hpp"
#include "formlang.hpp"
#include "report.hpp"

namespace cartan::cli {

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {
        "derived",  "flag",        "characteristic", "class",   "darboux-class",     "gender",  "character",
        "polar",    "frobenius",   "identify",       "scan",    "contact-build",     "bracket", "hamiltonian-field",
        "prolong",  "char-field",  "pde-check",      "restrict", "congruences",      "catalog-selftest"};
    return names;
}

struct CommandRequest {
    std::string command;
    std::optional<std::string> input;  // path; "-" reads stdin_text
    std::optional<std::string> text;   // inline document, wins over input
    std::string stdin_text;

    std::optional<std::string> system, pde, field, function, coframe, strategy, seed, env_seed;
    std::vector<std::string> points, elements, functions;
    std::vector<std::size_t> modulo;  // 1-based generator positions
    std::optional<std::size_t> form;  // 1-based generator position
    std::optional<std::size_t> n, order;
    bool jacobi = false, lagrange = false;
    bool sampled = false;
    std::size_t samples = 8;
    bool json = false;

    std::optional<std::string> catalog_path;
    std::optional<std::string> builtin_catalog;
    std::stop_token stop;
};

struct CommandResult {
    int exit_code = 0;
    std::string out, err;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read file '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string join(const std::vector<std::size_t>& v, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
    return s;
}

inline std::uint64_t parse_seed(const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("seed '" + s + "' is not a nonnegative integer");
    return v;
}

inline std::string field_lines(const VectorField& v) {
    std::string s;
    auto namer = v.chart()->namer();
    for (std::size_t i = 0; i < v.chart()->dim(); ++i)
        if (!v[i].is_zero()) s += " " + v.chart()->name(i) + ": " + v[i].to_string(namer) + "\n";
    return s.empty() ? " 0\n" : s;
}

inline std::string vector_text(const Vector<Rational>& v, const ChartPtr& c) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) s += std::string(s.empty() ? "" : ", ") + c->name(i) + ": " + to_string(v[i]);
    return "{" + (s.empty() ? std::string("0") : s) + "}";
}

inline std::string form_lines(const std::vector<DifferentialForm>& forms) {
    std::string s;
    for (const auto& w : forms) s += " " + w.to_string() + "\n";
    return s.empty() ? " (none)\n" : s;
}

class Runner {
public:
    explicit Runner(const CommandRequest& req) : req_(req) {}

    Json run(std::string& human) {
        const std::string& c = req_.command;
        if (c == "contact-build") return contact_build(human);
        if (c == "catalog-selftest") return selftest(human);
        load_document();
        if (c == "derived") return derived(human);
        if (c == "flag") return flag(human);
        if (c == "characteristic") return characteristic(human);
        if (c == "class") return klass(human);
        if (c == "darboux-class") return darboux(human);
        if (c == "gender") return gen(human);
        if (c == "character") return character(human);
        if (c == "polar") return polar(human);
        if (c == "frobenius") return frobenius(human);
        if (c == "identify") return identify(human);
        if (c == "scan") return scan(human);
        if (c == "bracket") return bracket(human);
        if (c == "hamiltonian-field") return hamiltonian(human);
        if (c == "prolong") return prolong(human);
        if (c == "char-field") return char_field(human);
        if (c == "pde-check") return pde_check(human);
        if (c == "restrict") return restrict_cmd(human);
        if (c == "congruences") return congruences(human);
        throw UsageError("unknown command '" + c + "'");
    }

    const std::optional<std::string>& input_text() const { return input_; }
    const std::string& subject() const { return subject_; }
    std::vector<Diagnostic> diagnostics;

private:
    const CommandRequest& req_;
    std::optional<std::string> input_;
    SystemDocument doc_;
    std::string subject_, name_;

    void load_document() {
        if (req_.text) input_ = *req_.text;
        else if (req_.input && *req_.input == "-") input_ = req_.stdin_text;
        else if (req_.input) input_ = read_file(*req_.input);
        else throw UsageError(req_.command + ": no input document (give a file, '-' or --text)");
        doc_ = parse_document(*input_);
    }

    template <class T>
    const T& pick(const std::vector<T>& v, const std::optional<std::string>& name, const char* kind, const char* flag) {
        if (name) {
            for (const auto& x : v)
                if (x.name == *name) return x;
            std::string known;
            for (const auto& x : v) known += (known.empty() ? "" : ", ") + x.name;
            throw UsageError(std::string("no ") + kind + " named '" + *name + "'" +
                             (known.empty() ? std::string(" (document has none)") : " (available: " + known + ")"));
        }
        if (v.size() == 1) return v.front();
        if (v.empty()) throw UsageError(std::string("document has no ") + kind);
        throw UsageError("document has " + std::to_string(v.size()) + " " + kind + "s; choose one with " + flag);
    }

    PfaffianSystem system() {
        const auto& s = pick(doc_.systems, req_.system, "system", "--system");
        subject_ = "system " + s.name;
        name_ = s.name;
        return PfaffianSystem(doc_.chart, s.forms);
    }

    const NamedPde& named_pde() {
        const auto& p = pick(doc_.pdes, req_.pde, "pde", "--pde");
        subject_ = "pde " + p.name;
        return p;
    }

    std::optional<std::pair<std::string, PointAssignment>> single_point() {
        if (req_.points.empty()) return std::nullopt;
        if (req_.points.size() > 1) throw UsageError(req_.command + " takes at most one --point");
        return std::make_pair(req_.points[0], doc_.point(req_.points[0]).point);
    }

    ContactChart contact() {
        if (!doc_.chart) throw UsageError("document declares no chart; start it with `contact n=...`");
        auto c = doc_.contact_chart();
        if (!c) throw UsageError("document chart is not a contact chart x1..xn y p1..pn");
        require_order_one(*c, req_.command);
        return *c;
    }

    std::optional<std::uint64_t> seed() const {
        if (req_.seed) return parse_seed(*req_.seed);
        if (req_.env_seed && !req_.env_seed->empty()) return parse_seed(*req_.env_seed);
        return std::nullopt;
    }

    ChainOptions chain_options() const {
        ChainOptions o;
        if (req_.strategy) o.strategy = parse_strategy(*req_.strategy);
        o.seed = seed();
        o.stop = req_.stop;
        if (o.strategy == ChainStrategy::SeededRandom && !o.seed)
            throw UsageError("strategy seeded-random needs --seed or CARTAN_EDS_SEED");
        return o;
    }

    std::string title() const { return subject_.empty() ? std::string() : subject_ + "\n"; }

    Json derived(std::string& h) {
        PfaffianSystem p = system();
        p.require_independent(subject_);
        auto res = derived_system_with_certificate(p, req_.stop);
        bool integ = is_integrable_frobenius(res.system);
        h = "derived system of " + name_ + "\n" + form_lines(res.system.generators()) +
            "rank: " + std::to_string(res.system.rank()) + "\nintegrable: " + yes_no(integ) + "\n";
        return {{"generators", forms_json(res.system.generators())},
                {"rank", res.system.rank()},
                {"input_rank", p.rank()},
                {"integrable", integ},
                {"certificate", certificate_json(res.certificate, p.chart())}};
    }

    Json flag(std::string& h) {
        PfaffianSystem p = system();
        auto f = derived_flag(p, req_.stop);
        auto integ = f.integrable_stages();
        Json stages = Json::array();
        h = "derived flag of " + name_ + "\n";
        for (std::size_t i = 0; i < f.stages.size(); ++i) {
            stages.push_back({{"rank", f.stages[i].rank()},
                              {"generators", forms_json(f.stages[i].generators())},
                              {"integrable", bool(integ[i])}});
            h += "stage " + std::to_string(i) + ": rank " + std::to_string(f.stages[i].rank()) +
                 ", integrable: " + yes_no(integ[i]) + "\n" + form_lines(f.stages[i].generators());
        }
        std::string terminal = f.terminal_null ? "null" : "integrable";
        h += "ranks: " + join(f.ranks()) + "\nterminal: " + terminal + "\n";
        return {{"stages", stages}, {"ranks", f.ranks()}, {"terminal", terminal}};
    }

    Json characteristic(std::string& h) {
        PfaffianSystem p = system();
        auto res = cauchy_characteristic_system_full(p, req_.stop);
        Json ann = Json::array();
        for (const auto& v : res.annihilator) ann.push_back(field_json(v));
        h = "characteristic system of " + name_ + "\n" + form_lines(res.system.generators()) +
            "class: " + std::to_string(res.system.rank()) + "\n";
        return {{"generators", forms_json(res.system.generators())},
                {"class", res.system.rank()},
                {"annihilator", ann},
                {"certificate", certificate_json(res.certificate, p.chart())}};
    }

    Json klass(std::string& h) {
        PfaffianSystem p = system();
        if (auto pt = single_point()) {
            std::size_t c = cartan_class_at(p.reduced(), pt->second);
            h = title() + "class at " + pt->first + ": " + std::to_string(c) + "\n";
            return {{"class", c}, {"point", pt->first}};
        }
        std::size_t c = cartan_class(p.reduced(), req_.stop);
        h = title() + "class: " + std::to_string(c) + "\n";
        return {{"class", c}, {"point", nullptr}};
    }

    Json darboux(std::string& h) {
        PfaffianSystem p = system();
        std::size_t k = req_.form.value_or(1);
        if (!req_.form && p.size() != 1) throw UsageError(subject_ + " has " + std::to_string(p.size()) + " generators; choose one with --form");
        if (k < 1 || k > p.size()) throw UsageError(subject_ + " has no generator " + std::to_string(k));
        const DifferentialForm& w = p.generators()[k - 1];
        auto pt = single_point();
        std::size_t c = darboux_class(w, pt ? std::optional<PointAssignment>(pt->second) : std::nullopt);
        h = title() + "form: " + w.to_string() + "\ndarboux class" + (pt ? " at " + pt->first : std::string()) + ": " +
            std::to_string(c) + "\n";
        return {{"form", w.to_string()}, {"darboux_class", c}, {"point", pt ? Json(pt->first) : Json(nullptr)}};
    }

    Json gen(std::string& h) {
        PfaffianSystem p = system();
        p.require_independent(subject_);
        std::size_t g = gender(p, req_.stop);
        h = title() + "gender: " + std::to_string(g) + "\n";
        return {{"gender", g}};
    }

    Json character(std::string& h) {
        PfaffianSystem p = system();
        auto opt = chain_options();
        auto pt = single_point();
        CharacterReport rep = pt ? character_chain(p, pt->second, opt) : generic_character_chain(p, opt);
        Json chain = Json::array();
        h = title() + "strategy: " + to_string(rep.strategy) + "\npoint: " + (pt ? pt->first : "generic") + "\nchain:\n";
        for (std::size_t j = 0; j < rep.chain.size(); ++j) {
            chain.push_back(field_json(rep.chain[j]));
            h += " v" + std::to_string(j + 1) + " = {" + rep.chain[j].to_string() + "}\n";
        }
        h += "polar dimensions: " + join(rep.polar_dims) + "\nrho: " + std::to_string(rep.rho) +
             "\ncharacter: " + std::to_string(rep.character) + "\n";
        return {{"point", pt ? Json(pt->first) : Json(nullptr)},
                {"strategy", to_string(rep.strategy)},
                {"n", rep.n},
                {"r", rep.r},
                {"chain", chain},
                {"polar_dims", rep.polar_dims},
                {"rho", rep.rho},
                {"character", rep.character}};
    }

    Json polar(std::string& h) {
        PfaffianSystem p = system();
        auto pt = single_point();
        if (!pt) throw UsageError("polar needs --point");
        std::vector<Vector<Rational>> e;
        for (const auto& name : req_.elements) e.push_back(doc_.field(name).field.evaluate(pt->second.values));
        auto basis = polar_space(p, pt->second, e);
        Json b = Json::array();
        h = title() + "polar space at " + pt->first + " (dimension " + std::to_string(basis.size()) + ")\n";
        for (const auto& v : basis) {
            b.push_back(vector_json(v, p.chart()));
            h += " " + vector_text(v, p.chart()) + "\n";
        }
        return {{"point", pt->first}, {"element", req_.elements}, {"dimension", basis.size()}, {"basis", b}};
    }

    Json frobenius(std::string& h) {
        PfaffianSystem p = system().reduced();
        Json res = Json::array();
        bool integ = true;
        h = title();
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto r = reduce_mod_system(d(p.generators()[i]), p);
            integ = integ && r.zero;
            res.push_back(r.representative.to_string());
            h += " d(w" + std::to_string(i + 1) + ") = " + r.representative.to_string() + " mod P\n";
        }
        h += "integrable: " + yes_no(integ) + "\n";
        return {{"integrable", integ}, {"residues", res}};
    }

    Catalog catalog(std::optional<std::string>* text_out = nullptr) {
        std::string text;
        if (req_.catalog_path) text = read_file(*req_.catalog_path);
        else if (req_.builtin_catalog) text = *req_.builtin_catalog;
        else throw UsageError("no catalog available; pass --catalog");
        if (text_out) *text_out = text;
        return parse_catalog(text);
    }

    Json identify(std::string& h) {
        PfaffianSystem p = system();
        Catalog cat = catalog();
        auto r = identify_catalog(p, cat, req_.stop);
        Json aliases = Json::array();
        for (const auto* a : r.aliases) aliases.push_back(a->id);
        Json match = nullptr;
        if (r.match) {
            match = {{"id", r.match->id}, {"title", r.match->title}};
            h = r.match->title + " (signature match)\nmodel: " + r.match->id + "\n";
            if (!r.aliases.empty()) {
                h += "aliases:";
                for (const auto* a : r.aliases) h += " " + a->id;
                h += "\n";
            }
        } else {
            h = "no discrete match\n";
        }
        h += "signature: " + r.signature.to_string() + "\n";
        return {{"signature", signature_json(r.signature)}, {"match", match}, {"aliases", aliases}};
    }

    Json scan(std::string& h) {
        PfaffianSystem p = system();
        std::vector<std::pair<std::string, PointAssignment>> pts;
        if (req_.points.empty()) {
            for (const auto& x : doc_.points) pts.emplace_back(x.name, x.point);
        } else {
            for (const auto& name : req_.points) pts.emplace_back(name, doc_.point(name).point);
        }
        ScanReport rep = singularity_scan(p, pts, req_.stop);
        Json rows = Json::array();
        h = title() + "generic: rank " + std::to_string(rep.generic_rank) + ", class " + std::to_string(rep.generic_class) +
            ", character " + std::to_string(rep.generic_character) + "\n";
        for (const auto& row : rep.rows) {
            Json j{{"point", row.label}, {"flags", row.flags}};
            if (row.error) {
                j["error"] = *row.error;
                h += row.label + ": error: " + *row.error + "\n";
                diagnostics.push_back({"warning", "pole", "point " + row.label + ": " + *row.error, {}, {}});
            } else {
                j["rank"] = row.rank;
                j["class"] = row.cartan_class;
                j["character"] = row.character ? Json(*row.character) : Json(nullptr);
                h += row.label + ": rank " + std::to_string(row.rank) + ", class " + std::to_string(row.cartan_class) +
                     ", character " + (row.character ? std::to_string(*row.character) : std::string("-"));
                for (const auto& f : row.flags) h += "  [" + f + "]";
                h += "\n";
            }
            rows.push_back(j);
        }
        return {{"generic", {{"rank", rep.generic_rank}, {"class", rep.generic_class}, {"character", rep.generic_character}}},
                {"certificate", certificate_json(rep.certificate, p.chart())},
                {"rows", rows}};
    }

    Json contact_build(std::string& h) {
        if (!req_.n) throw UsageError("contact-build needs --n");
        std::size_t k = req_.order.value_or(1);
        if (*req_.n < 1 || k < 1) throw UsageError("contact-build needs n >= 1 and order >= 1");
        PfaffianSystem p = build_contact_system(*req_.n, k);
        SystemDocument doc;
        doc.chart = p.chart();
        doc.contact = *req_.n;
        doc.contact_order = k;
        doc.systems.push_back({"P", p.generators()});
        h = render_document(doc);
        return {{"n", *req_.n}, {"order", k}, {"chart", p.chart()->names()}, {"generators", forms_json(p.generators())}};
    }

    RationalFunction function_named(const std::string& name) { return doc_.function(name).value; }

    Json bracket(std::string& h) {
        ContactChart c = contact();
        if (req_.jacobi == req_.lagrange) throw UsageError("bracket needs exactly one of --jacobi or --lagrange");
        if (req_.functions.size() != 2) throw UsageError("bracket needs --functions f,g");
        subject_ = "functions " + req_.functions[0] + ", " + req_.functions[1];
        RationalFunction f = function_named(req_.functions[0]), g = function_named(req_.functions[1]);
        RationalFunction b = req_.jacobi ? jacobi_bracket(c, f, g) : lagrange_bracket(c, f, g);
        std::string kind = req_.jacobi ? "jacobi" : "lagrange";
        std::string open = req_.jacobi ? "{" : "[", close = req_.jacobi ? "}" : "]";
        h = open + req_.functions[0] + ", " + req_.functions[1] + close + " = " + render(b, c.chart()) + "\n";
        return {{"kind", kind}, {"functions", req_.functions}, {"value", render(b, c.chart())}};
    }

    Json hamiltonian(std::string& h) {
        ContactChart c = contact();
        if (req_.function && req_.field) throw UsageError("hamiltonian-field takes --function or --field, not both");
        if (req_.function) {
            subject_ = "function " + *req_.function;
            VectorField xi = lie_field_from_hamiltonian(c, function_named(*req_.function));
            h = "field of " + *req_.function + "\n" + field_lines(xi);
            return {{"function", *req_.function}, {"field", field_json(xi)}};
        }
        if (req_.field) {
            subject_ = "field " + *req_.field;
            auto r = hamiltonian_of_field(c, doc_.field(*req_.field).field);
            h = "hamiltonian: " + render(r.f, c.chart()) + "\nlie field: " + yes_no(r.is_lie) + "\n";
            return {{"field", *req_.field}, {"hamiltonian", render(r.f, c.chart())}, {"is_lie", r.is_lie}};
        }
        throw UsageError("hamiltonian-field needs --function or --field");
    }

    Json prolong(std::string& h) {
        ContactChart c = contact();
        if (!req_.field) throw UsageError("prolong needs --field");
        subject_ = "field " + *req_.field;
        const VectorField& base = doc_.field(*req_.field).field;
        for (std::size_t i = 0; i < c.n(); ++i)
            if (!base[c.p(i)].is_zero()) throw DomainError("base field has a " + c.chart()->name(c.p(i)) + " component");
        std::vector<RationalFunction> a;
        for (std::size_t i = 0; i < c.n(); ++i) a.push_back(base[c.x(i)]);
        VectorField xi = prolong_vector_field(c, a, base[c.y()]);
        RationalFunction f = hamiltonian_of_field(c, xi).f;
        h = "prolongation of " + *req_.field + "\n" + field_lines(xi) + "hamiltonian: " + render(f, c.chart()) + "\n";
        return {{"field", field_json(xi)}, {"hamiltonian", render(f, c.chart())}};
    }

    Json char_field(std::string& h) {
        RationalFunction F;
        ContactChart c(1, 1);
        if (req_.function) {
            c = contact();
            subject_ = "function " + *req_.function;
            F = function_named(*req_.function);
        } else {
            const NamedPde& np = named_pde();
            if (np.equations.size() != 1) throw UsageError(subject_ + " has " + std::to_string(np.equations.size()) + " equations; char-field needs one");
            c = ContactChart(np.n, 1);
            F = np.equations[0].lhs - np.equations[0].rhs;
        }
        VectorField xi = cauchy_char_field(c, F);
        h = "characteristic field of " + render(F, c.chart()) + "\n" + field_lines(xi);
        return {{"equation", render(F, c.chart())}, {"field", field_json(xi)}};
    }

    Json pde_check(std::string& h) {
        const NamedPde& np = named_pde();
        PDESystem s = np.system();
        IntegrabilityOptions opt;
        opt.force_sampling = req_.sampled;
        opt.samples = req_.samples;
        opt.seed = seed();
        opt.stop = req_.stop;
        for (const auto& name : req_.points) {
            const auto& pt = doc_.point(name).point;
            if (!same_chart(pt.chart, s.chart())) throw UsageError("point " + name + " is not on the chart of " + subject_);
            opt.points.push_back(pt);
        }
        if (!req_.points.empty()) opt.force_sampling = true;
        IntegrabilityReport rep = integrability_check(s, opt);
        auto namer = s.chart()->namer();
        Json obs = Json::array();
        h = subject_ + " (n=" + std::to_string(np.n) + ", " + std::to_string(s.size()) + " equations, " +
            (s.graph() ? "graph form" : "implicit") + ")\nverdict: " + to_string(rep.verdict) + "\n";
        for (const auto& o : rep.obstructions) {
            Json j{{"pair", {o.alpha + 1, o.beta + 1}},
                   {"jacobi_residue", o.jacobi_residue.to_string(namer)},
                   {"lagrange_residue", o.lagrange_residue.to_string(namer)}};
            if (o.point) j["point"] = point_json(*o.point);
            obs.push_back(j);
            std::string a = std::to_string(o.alpha + 1), b = std::to_string(o.beta + 1);
            h += "obstruction: {F" + a + ", F" + b + "}|S = " + o.jacobi_residue.to_string(namer) + ", [F" + a + ", F" + b +
                 "]|S = " + o.lagrange_residue.to_string(namer) + "\n";
        }
        if (!rep.exact) {
            h += "samples: " + std::to_string(rep.samples.size()) + "\n";
            if (rep.verdict == IntegrabilityVerdict::NoObstructionAtSamples)
                diagnostics.push_back({"note", "result", "sampled check is sound for refutation only", {}, {}});
        }
        Json eqs = Json::array();
        for (const auto& f : s.equations()) eqs.push_back(f.to_string(namer));
        return {{"equations", eqs},
                {"graph_form", s.graph().has_value()},
                {"verdict", to_string(rep.verdict)},
                {"exact", rep.exact},
                {"samples", rep.samples.size()},
                {"obstructions", obs}};
    }

    Json restrict_cmd(std::string& h) {
        const NamedPde& np = named_pde();
        PDESystem s = np.system();
        RestrictedSystem r = restrict_system(s);
        std::size_t cls = r.system.rank() ? cartan_class(r.system, req_.stop) : 0;
        bool integ = is_integrable_frobenius(r.system);
        h = "restriction of " + subject_ + " to coords";
        for (const auto& name : r.chart->names()) h += " " + name;
        h += "\n" + form_lines(r.system.generators()) + "class: " + std::to_string(cls) + "\nintegrable: " + yes_no(integ) + "\n";
        return {{"chart", r.chart->names()}, {"generators", forms_json(r.system.generators())}, {"class", cls}, {"integrable", integ}};
    }

    Json congruences(std::string& h) {
        PfaffianSystem p = system();
        std::vector<DifferentialForm> frame;
        if (req_.coframe) frame = doc_.system(*req_.coframe).forms;
        std::vector<std::size_t> mod;
        for (auto m : req_.modulo) {
            if (m == 0) throw UsageError("--modulo positions start at 1");
            mod.push_back(m - 1);
        }
        CongruenceTable t = structure_congruences(p, mod, frame);
        std::string modtxt;
        for (auto m : req_.modulo) modtxt += (modtxt.empty() ? "" : ", ") + std::string("w") + std::to_string(m);
        Json rows = Json::array(), labels = Json::array();
        h = title();
        for (std::size_t i = 0; i < t.labels.size(); ++i) {
            const DifferentialForm& w = i < p.size() ? p.generators()[i] : frame[i - p.size()];
            labels.push_back({{"label", t.labels[i]}, {"form", w.to_string()}});
            if (t.labels[i] != w.to_string()) h += " " + t.labels[i] + " = " + w.to_string() + "\n";
        }
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            rows.push_back(t.row_to_string(i));
            h += "d" + t.labels[i] + " = " + t.row_to_string(i) + (modtxt.empty() ? "" : " mod " + modtxt) + "\n";
        }
        return {{"labels", labels}, {"modulo", req_.modulo}, {"rows", rows}};
    }

    Json selftest(std::string& h) {
        std::string text;
        if (req_.catalog_path) text = read_file(*req_.catalog_path);
        else if (req_.text) text = *req_.text;
        else if (req_.input && *req_.input == "-") text = req_.stdin_text;
        else if (req_.input) text = read_file(*req_.input);
        else if (req_.builtin_catalog) text = *req_.builtin_catalog;
        else throw UsageError("no catalog available; pass --catalog");
        input_ = text;
        Catalog cat = parse_catalog(text);
        SelftestReport rep = catalog_selftest(cat, req_.stop);
        Json rows = Json::array();
        std::vector<std::string> failed;
        for (const auto& r : rep.rows) {
            rows.push_back({{"id", r.id}, {"pass", r.pass}, {"computed", r.computed.to_string()}, {"differences", r.differences}});
            h += std::string(r.pass ? "PASS " : "FAIL ") + r.id + "\n";
            for (const auto& d : r.differences) h += "  " + d + "\n";
            if (!r.pass) failed.push_back(r.id);
        }
        for (const auto& w : rep.warnings) diagnostics.push_back({"warning", "result", w, {}, {}});
        h += std::to_string(rep.rows.size()) + " entries, " + std::to_string(failed.size()) + " failed\n";
        if (!failed.empty()) {
            std::string ids;
            for (const auto& f : failed) ids += (ids.empty() ? "" : ", ") + f;
            diagnostics.push_back({"error", "result", "catalog self-test failed for: " + ids, {}, {}});
        }
        return {{"entries", rep.rows.size()}, {"failed", failed}, {"pass", rep.pass()}, {"rows", rows}};
    }
};

inline std::string kind_of(const MathError& e) {
    if (dynamic_cast<const PoleError*>(&e)) return "pole";
    if (dynamic_cast<const RankDeficiency*>(&e)) return "rank";
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    return "math";
}

}  // namespace detail

inline CommandResult run(const CommandRequest& req) {
    CommandResult res;
    detail::Runner runner(req);
    std::string human;
    Json result = nullptr;
    std::vector<Diagnostic> diags;
    auto named = [&](const std::string& msg) { return runner.subject().empty() ? msg : runner.subject() + ": " + msg; };
    try {
        result = runner.run(human);
        diags = runner.diagnostics;
    } catch (const ParseError& e) {
        diags = runner.diagnostics;
        diags.push_back({"error", "parse", e.what(), e.line(), e.column()});
        res.exit_code = 2;
    } catch (const UsageError& e) {
        diags = runner.diagnostics;
        diags.push_back({"error", "usage", e.what(), {}, {}});
        res.exit_code = 2;
    } catch (const MathError& e) {
        diags = runner.diagnostics;
        diags.push_back({"error", detail::kind_of(e), named(e.what()), {}, {}});
        res.exit_code = 1;
    } catch (const Cancelled& e) {
        diags = runner.diagnostics;
        diags.push_back({"error", "cancelled", e.what(), {}, {}});
        res.exit_code = 1;
    }
    for (const auto& d : diags)
        if (d.severity == "error" && res.exit_code == 0) res.exit_code = 1;

    if (req.json) {
        res.out = make_report(req.command, runner.input_text(), result, diags).dump(2) + "\n";
    } else {
        res.out = human;
        for (const auto& d : diags) res.err += d.severity + ": " + d.message + "\n";
    }
    return res;
}

}  // namespace cartan::cli

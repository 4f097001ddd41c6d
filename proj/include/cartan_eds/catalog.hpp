#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "character.hpp"
#include "formlang.hpp"

namespace cartan {

// Invariants compared by catalog identification. Equal signatures mean a
// signature match, not a proven local equivalence.
struct Signature {
    std::size_t n = 0, rank = 0;
    std::vector<std::size_t> flag;
    std::size_t cartan_class = 0, character = 0, gender = 0;
    std::vector<bool> frobenius;
    std::size_t covariant_rank = 0;
    bool covariant_integrable = false;

    friend bool operator==(const Signature&, const Signature&) = default;

    std::string to_string() const {
        auto list = [](const auto& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(static_cast<std::size_t>(v[i]));
            return s;
        };
        std::ostringstream o;
        o << "n=" << n << " rank=" << rank << " flag=" << list(flag) << " class=" << cartan_class << " character=" << character
          << " gender=" << gender << " frobenius=" << list(frobenius) << " covariant=" << covariant_rank
          << " covariant-integrable=" << (covariant_integrable ? 1 : 0);
        return o.str();
    }

    // Field-by-field differences against an expected signature.
    std::vector<std::string> diff(const Signature& expected) const {
        std::vector<std::string> out;
        std::istringstream a(to_string()), b(expected.to_string());
        std::string x, y;
        while (a >> x && b >> y)
            if (x != y) out.push_back(y.substr(0, y.find('=')) + ": expected " + y.substr(y.find('=') + 1) + ", got " + x.substr(x.find('=') + 1));
        return out;
    }
};

inline Signature parse_signature(const std::string& text, std::size_t line) {
    Signature s;
    std::istringstream in(text);
    std::string word;
    std::vector<std::string> seen;
    auto number = [&](const std::string& v) -> std::size_t {
        if (v.empty() || v.size() > 4 || v.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError(line, 1, "signature: expected a count, found '" + v + "'");
        return std::stoul(v);
    };
    auto numbers = [&](const std::string& v) {
        std::vector<std::size_t> out;
        std::string part;
        std::istringstream p(v);
        while (std::getline(p, part, ',')) out.push_back(number(part));
        return out;
    };
    while (in >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) throw ParseError(line, 1, "signature: expected key=value, found '" + word + "'");
        std::string k = word.substr(0, eq), v = word.substr(eq + 1);
        seen.push_back(k);
        if (k == "n") s.n = number(v);
        else if (k == "rank") s.rank = number(v);
        else if (k == "flag") s.flag = numbers(v);
        else if (k == "class") s.cartan_class = number(v);
        else if (k == "character") s.character = number(v);
        else if (k == "gender") s.gender = number(v);
        else if (k == "frobenius") {
            for (auto b : numbers(v)) {
                if (b > 1) throw ParseError(line, 1, "signature: frobenius flags are 0 or 1");
                s.frobenius.push_back(b == 1);
            }
        } else if (k == "covariant") s.covariant_rank = number(v);
        else if (k == "covariant-integrable") {
            auto b = number(v);
            if (b > 1) throw ParseError(line, 1, "signature: covariant-integrable is 0 or 1");
            s.covariant_integrable = b == 1;
        } else {
            throw ParseError(line, 1, "signature: unknown key '" + k + "'");
        }
    }
    for (const char* k : {"n", "rank", "flag", "class", "character", "gender", "frobenius", "covariant", "covariant-integrable"})
        if (std::find(seen.begin(), seen.end(), k) == seen.end()) throw ParseError(line, 1, std::string("signature: missing ") + k);
    return s;
}

inline Signature compute_signature(const PfaffianSystem& input, const std::stop_token& stop = {}) {
    PfaffianSystem p = input.reduced();
    Signature s;
    s.n = p.dim();
    s.rank = p.rank();
    DerivedFlag flag = derived_flag(p, stop);
    s.flag = flag.ranks();
    s.frobenius = flag.integrable_stages();
    s.cartan_class = p.rank() ? cartan_class(p, stop) : 0;
    ChainOptions opt;
    opt.stop = stop;
    s.character = generic_character_chain(p, opt).character;
    s.gender = p.rank() ? gender(p, stop) : 0;
    if (p.rank()) {
        PfaffianSystem cov = covariant_system(p);
        s.covariant_rank = cov.rank();
        s.covariant_integrable = is_integrable_frobenius(cov);
    } else {
        s.covariant_integrable = true;
    }
    return s;
}

struct CatalogEntry {
    std::string id;
    std::string title;
    std::string alias_of;  // empty for a primary entry
    std::vector<std::string> notes;
    Signature signature;
    PfaffianSystem model;
    std::size_t line = 0;
};

struct Catalog {
    std::vector<CatalogEntry> entries;

    const CatalogEntry* find(const std::string& id) const {
        for (const auto& e : entries)
            if (e.id == id) return &e;
        return nullptr;
    }
};

// Catalog text: each entry opens with `model <id> "<title>"`, followed by
// `signature ...`, optional `alias-of <id>` and `note ...` lines, and a
// formlang body declaring the chart and `system P`.
inline Catalog parse_catalog(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string l;
        while (std::getline(in, l)) lines.push_back(l);
    }
    Catalog cat;
    struct Pending {
        std::size_t start = 0, end = 0;
        CatalogEntry entry;
        bool has_signature = false;
    };
    std::vector<Pending> pend;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::string& l = lines[k];
        const std::size_t ln = k + 1;
        if (l.rfind("model", 0) == 0 && (l.size() == 5 || std::isspace(static_cast<unsigned char>(l[5])))) {
            if (!pend.empty()) pend.back().end = k;
            Pending p;
            p.start = k + 1;
            p.entry.line = ln;
            std::string rest = formlang::trim(l.substr(5));
            auto q = rest.find('"');
            std::string id = formlang::trim(rest.substr(0, q));
            if (id.empty() || id.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-") != std::string::npos)
                throw ParseError(ln, 7, "catalog: model id must be lowercase letters, digits and '-', found '" + id + "'");
            if (q == std::string::npos || rest.back() != '"' || rest.size() - q < 2)
                throw ParseError(ln, 1, "catalog: expected model <id> \"<title>\"");
            p.entry.id = id;
            p.entry.title = rest.substr(q + 1, rest.size() - q - 2);
            pend.push_back(std::move(p));
        } else if (!pend.empty() && l.rfind("signature ", 0) == 0) {
            pend.back().entry.signature = parse_signature(l.substr(10), ln);
            pend.back().has_signature = true;
            lines[k].clear();
        } else if (!pend.empty() && l.rfind("alias-of ", 0) == 0) {
            pend.back().entry.alias_of = formlang::trim(l.substr(9));
            lines[k].clear();
        } else if (!pend.empty() && l.rfind("note ", 0) == 0) {
            pend.back().entry.notes.push_back(formlang::trim(l.substr(5)));
            lines[k].clear();
        } else if (pend.empty() && !formlang::trim(l).empty() && formlang::trim(l)[0] != '#') {
            throw ParseError(ln, 1, "catalog: content before the first model line");
        }
    }
    if (!pend.empty()) pend.back().end = lines.size();
    for (auto& p : pend) {
        // Blank every line outside the body so diagnostics keep file line numbers.
        std::string body;
        for (std::size_t k = 0; k < lines.size(); ++k) body += (k >= p.start && k < p.end ? lines[k] : std::string()) + "\n";
        SystemDocument doc = parse_document(body);
        if (!p.has_signature) throw ParseError(p.entry.line, 1, "catalog: model " + p.entry.id + " has no signature line");
        const NamedSystem* s = SystemDocument::find_in(doc.systems, "P");
        if (!s) throw ParseError(p.entry.line, 1, "catalog: model " + p.entry.id + " has no system P");
        if (cat.find(p.entry.id)) throw ParseError(p.entry.line, 7, "catalog: duplicate model id " + p.entry.id);
        p.entry.model = PfaffianSystem(doc.chart, s->forms);
        cat.entries.push_back(std::move(p.entry));
    }
    for (const auto& e : cat.entries)
        if (!e.alias_of.empty() && !cat.find(e.alias_of))
            throw ParseError(e.line, 1, "catalog: " + e.id + " is an alias of unknown model " + e.alias_of);
    return cat;
}

struct IdentifyResult {
    Signature signature;
    const CatalogEntry* match = nullptr;      // primary entry with an equal signature
    std::vector<const CatalogEntry*> aliases;  // alias entries with an equal signature
};

inline IdentifyResult identify_catalog(const PfaffianSystem& p, const Catalog& cat, const std::stop_token& stop = {}) {
    IdentifyResult r;
    r.signature = compute_signature(p, stop);
    for (const auto& e : cat.entries) {
        if (!(e.signature == r.signature)) continue;
        if (e.alias_of.empty()) {
            if (!r.match) r.match = &e;
        } else {
            r.aliases.push_back(&e);
        }
    }
    if (!r.match && !r.aliases.empty()) r.match = cat.find(r.aliases.front()->alias_of);
    return r;
}

struct SelftestRow {
    std::string id;
    bool pass = false;
    Signature computed;
    std::vector<std::string> differences;
};

struct SelftestReport {
    std::vector<SelftestRow> rows;
    std::vector<std::string> warnings;
    bool pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

// Recomputes every entry; also fails two primary entries sharing a signature
// and an alias whose signature differs from its primary.
inline SelftestReport catalog_selftest(const Catalog& cat, const std::stop_token& stop = {}) {
    SelftestReport rep;
    if (cat.entries.empty()) rep.warnings.push_back("catalog is empty; nothing to check");
    for (const auto& e : cat.entries) {
        SelftestRow row;
        row.id = e.id;
        row.computed = compute_signature(e.model, stop);
        row.differences = row.computed.diff(e.signature);
        if (!e.alias_of.empty()) {
            const CatalogEntry* primary = cat.find(e.alias_of);
            if (!(primary->signature == e.signature)) row.differences.push_back("alias signature differs from " + e.alias_of);
        } else {
            for (const auto& o : cat.entries)
                if (&o != &e && o.alias_of.empty() && o.signature == e.signature)
                    row.differences.push_back("signature shared with primary entry " + o.id);
        }
        row.pass = row.differences.empty();
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// Pointwise invariants against the generic ones.
struct ScanRow {
    PointAssignment point;
    std::string label;
    std::optional<std::string> error;  // pole or other failure at this point
    std::size_t rank = 0, cartan_class = 0;
    std::optional<std::size_t> character;  // absent where the generators are dependent
    std::vector<std::string> flags;        // invariants that differ from the generic value
};

struct ScanReport {
    std::size_t generic_rank = 0, generic_class = 0, generic_character = 0;
    RankCertificate certificate;
    std::vector<ScanRow> rows;
};

inline ScanReport singularity_scan(const PfaffianSystem& p, const std::vector<std::pair<std::string, PointAssignment>>& points,
                                   const std::stop_token& stop = {}) {
    ScanReport rep;
    rep.generic_rank = p.rank();
    rep.certificate = p.certificate();
    PfaffianSystem red = p.reduced();
    rep.generic_class = red.rank() ? cartan_class(red, stop) : 0;
    ChainOptions opt;
    opt.stop = stop;
    rep.generic_character = generic_character_chain(red, opt).character;
    for (const auto& [label, x] : points) {
        check_stop(stop);
        ScanRow row;
        row.point = x;
        row.label = label;
        try {
            row.rank = rank_at(red, x);
            row.cartan_class = cartan_class_at(red, x);
            if (row.rank == red.size()) row.character = character_chain(red, x, opt).character;
            if (row.rank != rep.generic_rank)
                row.flags.push_back("rank " + std::to_string(rep.generic_rank) + " -> " + std::to_string(row.rank));
            if (row.cartan_class != rep.generic_class)
                row.flags.push_back("class " + std::to_string(rep.generic_class) + " -> " + std::to_string(row.cartan_class));
            if (row.character && *row.character != rep.generic_character)
                row.flags.push_back("character " + std::to_string(rep.generic_character) + " -> " + std::to_string(*row.character));
            if (!row.character) row.flags.push_back("generators dependent at the point; character not defined");
        } catch (const MathError& e) {
            row.error = e.what();
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace cartan

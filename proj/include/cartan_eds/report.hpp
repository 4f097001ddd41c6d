#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"

namespace cartan {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "cartan-eds/1";

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

struct Diagnostic {
    std::string severity;  // "error", "warning" or "note"
    std::string kind;      // "parse", "usage", "math", "pole", "rank", "domain", "cancelled", "result"
    std::string message;
    std::optional<std::size_t> line, column;
};

inline Json to_json(const Diagnostic& d) {
    Json j{{"severity", d.severity}, {"kind", d.kind}, {"message", d.message}};
    if (d.line) j["line"] = *d.line;
    if (d.column) j["column"] = *d.column;
    return j;
}

inline Json make_report(const std::string& command, const std::optional<std::string>& input, const Json& result,
                        const std::vector<Diagnostic>& diags) {
    Json j;
    j["schema"] = kReportSchema;
    j["command"] = command;
    j["input_digest"] = input ? Json("sha256:" + sha256_hex(*input)) : Json(nullptr);
    j["result"] = result;
    j["diagnostics"] = Json::array();
    for (const auto& d : diags) j["diagnostics"].push_back(to_json(d));
    return j;
}

// Formlang renderings used in reports.
inline std::string render(const RationalFunction& f, const ChartPtr& c) { return f.to_string(c->namer()); }

inline Json forms_json(const std::vector<DifferentialForm>& forms) {
    Json a = Json::array();
    for (const auto& w : forms) a.push_back(w.to_string());
    return a;
}

inline Json field_json(const VectorField& v) {
    Json j = Json::object();
    for (std::size_t i = 0; i < v.chart()->dim(); ++i)
        if (!v[i].is_zero()) j[v.chart()->name(i)] = render(v[i], v.chart());
    return j;
}

inline Json point_json(const PointAssignment& p) {
    Json j = Json::object();
    for (std::size_t i = 0; i < p.chart->dim(); ++i) j[p.chart->name(i)] = to_string(p.values[i]);
    return j;
}

inline Json vector_json(const Vector<Rational>& v, const ChartPtr& c) {
    Json j = Json::object();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) j[c->name(i)] = to_string(v[i]);
    return j;
}

inline Json certificate_json(const RankCertificate& cert, const ChartPtr& c) {
    Json pr = Json::array(), pc = Json::array();
    for (auto r : cert.pivot_rows) pr.push_back(r + 1);
    for (auto col : cert.pivot_columns) pc.push_back(col < c->dim() ? "d" + c->name(col) : std::to_string(col));
    return {{"rank", cert.rank}, {"pivot_rows", pr}, {"pivot_columns", pc}, {"minor", cert.minor().to_string(c->namer())}};
}

inline Json system_json(const PfaffianSystem& p) {
    return {{"generators", forms_json(p.generators())}, {"rank", p.rank()}};
}

inline Json signature_json(const Signature& s) {
    Json fr = Json::array();
    for (bool b : s.frobenius) fr.push_back(b);
    return {{"n", s.n},
            {"rank", s.rank},
            {"flag", s.flag},
            {"class", s.cartan_class},
            {"character", s.character},
            {"gender", s.gender},
            {"frobenius", fr},
            {"covariant_rank", s.covariant_rank},
            {"covariant_integrable", s.covariant_integrable}};
}

}  // namespace cartan

#include <catch2/catch_amalgamated.hpp>

#include "cartan_eds/cli.hpp"
#include "support.hpp"

using namespace cartan;
using namespace testing_support;

namespace {

cli::CommandResult run_cli(std::string command, std::vector<std::string> args = {}, bool json = true) {
    cli::CommandRequest req;
    req.command = std::move(command);
    req.json = json;
    req.builtin_catalog = slurp(catalog_path());
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto next = [&]() { return args.at(++i); };
        if (a == "--system") req.system = next();
        else if (a == "--pde") req.pde = next();
        else if (a == "--point") req.points.push_back(next());
        else if (a == "--field") req.field = next();
        else if (a == "--element") req.elements.push_back(next());
        else if (a == "--function") req.function = next();
        else if (a == "--functions") req.functions.push_back(next());
        else if (a == "--modulo") req.modulo.push_back(std::stoul(next()));
        else if (a == "--coframe") req.coframe = next();
        else if (a == "--strategy") req.strategy = next();
        else if (a == "--seed") req.seed = next();
        else if (a == "--n") req.n = std::stoul(next());
        else if (a == "--order") req.order = std::stoul(next());
        else if (a == "--text") req.text = next();
        else if (a == "--catalog") req.catalog_path = next();
        else if (a == "--jacobi") req.jacobi = true;
        else if (a == "--lagrange") req.lagrange = true;
        else if (a == "--sampled") req.sampled = true;
        else req.input = a.rfind("/", 0) == 0 ? a : examples_dir() + "/" + a;
    }
    return cli::run(req);
}

bool has_error(const Json& report) {
    for (const auto& d : report.at("diagnostics"))
        if (d.at("severity") == "error") return true;
    return false;
}

// Random document for the round-trip property.
SystemDocument random_document(Random& r) {
    SystemDocument doc;
    const std::size_t n = static_cast<std::size_t>(r.integer(1, 4));
    std::vector<std::string> names;
    const char* stems[] = {"x", "u", "q_", "t"};
    const char* stem = stems[r.integer(0, 3)];
    for (std::size_t i = 0; i < n; ++i) names.push_back(stem + std::to_string(i + 1));
    doc.chart = make_chart(names);
    const long systems = r.integer(0, 2);
    for (long s = 0; s < systems; ++s) {
        NamedSystem ns{"S" + std::to_string(s), {}};
        const long forms = r.integer(1, 3);
        for (long k = 0; k < forms; ++k) {
            auto w = r.form(doc.chart, 1, 2, 3);
            if (r.coin() && !w.is_zero()) {
                RationalFunction den(r.polynomial(n, 1, 2));
                if (!den.is_zero()) w = w.scaled(RationalFunction(1) / den);
            }
            ns.forms.push_back(w);
        }
        doc.systems.push_back(ns);
    }
    const long functions = r.integer(0, 2);
    for (long k = 0; k < functions; ++k) doc.functions.push_back({"f" + std::to_string(k), RationalFunction(r.polynomial(n, 3))});
    if (r.coin()) doc.fields.push_back({"v", r.vector_field(doc.chart)});
    if (r.coin()) doc.points.push_back({"p", PointAssignment{doc.chart, r.point(n)}});
    return doc;
}

}  // namespace

TEST_CASE("document parsing examples") {
    auto doc = parse_document("coords x1 x2\nsystem P\n dx1\n dx2\n");
    CHECK(doc.chart->names() == std::vector<std::string>{"x1", "x2"});
    REQUIRE(doc.systems.size() == 1);
    CHECK(doc.system("P").forms == std::vector<DifferentialForm>{form(doc.chart, "dx1"), form(doc.chart, "dx2")});

    auto s30 = parse_document("coords x1 x2 x3 x4 x5\nsystem P\n dx1 + x4*dx5\n dx2\n dx3\n");
    const auto& f = s30.system("P").forms;
    REQUIRE(f.size() == 3);
    CHECK(f[0].coefficient({0}) == RationalFunction(1));
    CHECK(f[0].coefficient({4}) == fn(s30.chart, "x4"));
    CHECK(f[2] == DifferentialForm::differential(s30.chart, 2));

    auto pde = parse_document("pde S on n=2\n p1 = x2\n p2 = 0\n");
    CHECK_FALSE(pde.chart);
    auto sys = pde.pde("S").system();
    REQUIRE(sys.graph());
    CHECK(sys.graph()->solved == std::vector<std::size_t>{0, 1});
}

TEST_CASE("parse errors carry positions") {
    auto fails = [](const std::string& text, std::size_t line, const std::string& needle) {
        try {
            parse_document(text);
            FAIL("no error for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            CHECK(e.column() >= 1);
            std::size_t start = 0;
            for (std::size_t l = 1; l < e.line(); ++l) start = text.find('\n', start) + 1;
            std::size_t end = text.find('\n', start);
            if (end == std::string::npos) end = text.size();
            CHECK(e.column() <= end - start + 1);
            CHECK_THAT(e.detail(), Catch::Matchers::ContainsSubstring(needle));
        }
    };
    fails("coords x1\nsystem P\n dx9\n", 3, "x9");
    fails("coords x1 x2\nsystem P\n x1*dx1^dx2\n", 3, "");
    fails("coords x1 x2\nsystem P\n dx1 + \n", 3, "");
    fails("coords x1 x1\n", 1, "x1");
    fails("coords x1\nsystem P\n dx1 * (x1\n", 3, "");
    fails("coords x1\npoint a\n x1 = 0.5\n", 3, "");
    fails("coords x1\nwidget\n", 2, "");
}

TEST_CASE("render examples") {
    SystemDocument doc;
    doc.chart = make_chart({"x1", "x2"});
    CHECK(render_document(doc) == "coords x1 x2\n");
    doc.systems.push_back({"P", {form(doc.chart, "dx1")}});
    CHECK(render_document(doc) == "coords x1 x2\nsystem P\n dx1\n");
    auto s30 = parse_document("coords x1 x2 x3 x4 x5\nsystem P\n dx1 + x4*dx5\n dx2\n dx3\n");
    CHECK(parse_document(render_document(s30)) == s30);
}

TEST_CASE("property: parse of render is the identity", "[property]") {
    Random r(8080);
    for (int k = 0; k < 200; ++k) {
        auto doc = random_document(r);
        const std::string text = render_document(doc);
        INFO(text);
        auto back = parse_document(text);
        REQUIRE(back == doc);
        REQUIRE(render_document(back) == text);
        REQUIRE(render_document(doc) == text);
    }
}

TEST_CASE("every shipped example parses and round-trips") {
    const char* files[] = {"pfaff5_a.eds", "pfaff5_b.eds", "pfaff6_a.eds", "pfaff6_b.eds", "pfaff6_c.eds", "engel.eds",
                           "homogeneous_flag.eds", "darboux_d1.eds", "darboux_d2.eds", "singular.eds", "grassmann.eds",
                           "liouville.eds", "pde_flat.eds", "pde_obstructed.eds", "pde_compatible.eds", "eikonal.eds"};
    for (const char* f : files) {
        INFO(f);
        auto doc = parse_document(slurp(examples_dir() + "/" + f));
        CHECK(parse_document(render_document(doc)) == doc);
    }
}

TEST_CASE("sha256 digest") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("CLI reports and exit codes") {
    auto r = run_cli("derived", {"pfaff5_a.eds", "--system", "P"});
    REQUIRE(r.exit_code == 0);
    auto j = Json::parse(r.out);
    CHECK(j.at("schema") == "cartan-eds/1");
    CHECK(j.at("command") == "derived");
    CHECK(j.at("input_digest") == "sha256:" + sha256_hex(slurp(examples_dir() + "/pfaff5_a.eds")));
    CHECK(j.at("result").at("rank") == 2);
    CHECK(j.at("result").at("generators") == Json::array({"dx2", "dx3"}));
    CHECK(j.at("result").at("integrable") == true);

    auto human = run_cli("derived", {"pfaff5_a.eds"}, false);
    CHECK(human.exit_code == 0);
    CHECK_THAT(human.out, Catch::Matchers::ContainsSubstring("dx2"));

    CHECK(run_cli("derived", {"no-such-file.eds"}).exit_code == 2);
    CHECK(run_cli("derived", {"--text", "coords x1\nsystem P\n dx9\n"}).exit_code == 2);
    CHECK(run_cli("derived", {"pfaff5_a.eds", "--system", "Q"}).exit_code == 2);
    CHECK(run_cli("character", {"pfaff5_a.eds", "--point", "nowhere"}).exit_code == 2);
    CHECK(run_cli("character", {"pfaff5_a.eds", "--point", "origin", "--strategy", "seeded-random"}).exit_code == 2);
    CHECK(run_cli("darboux-class", {"--text", "coords x1\nsystem P\n dx1/x1\npoint o\n x1 = 0\n", "--point", "o"}).exit_code == 1);
    CHECK(run_cli("derived", {"--text", "coords x1 x2\nsystem P\n dx1\n x1*dx1\n"}).exit_code == 1);
    CHECK(run_cli("pde-check", {"pde_compatible.eds", "--sampled"}).exit_code == 2);

    auto perr = Json::parse(run_cli("derived", {"--text", "coords x1\nsystem P\n dx9\n"}).out);
    REQUIRE(perr.at("diagnostics").size() == 1);
    CHECK(perr.at("diagnostics")[0].at("kind") == "parse");
    CHECK(perr.at("diagnostics")[0].at("line") == 3);
}

TEST_CASE("CLI worked examples") {
    auto ch = Json::parse(run_cli("character", {"pfaff6_a.eds", "--system", "P", "--point", "origin"}).out);
    CHECK(ch.at("result").at("character") == 2);
    auto id = run_cli("identify", {"engel.eds", "--system", "P"}, false);
    CHECK_THAT(id.out, Catch::Matchers::ContainsSubstring("Engel flag (signature match)"));
    auto pde = Json::parse(run_cli("pde-check", {"pde_obstructed.eds"}).out);
    CHECK(pde.at("result").at("verdict") == "obstructed");
    auto br = run_cli("bracket", {"grassmann.eds", "--jacobi", "--functions", "f", "--functions", "g"}, false);
    CHECK(br.exit_code == 0);
    CHECK_THAT(br.out, Catch::Matchers::ContainsSubstring("1"));
}

TEST_CASE("property: CLI output is deterministic and exit 0 means no errors", "[property]") {
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
        {"derived", {"pfaff5_a.eds"}},
        {"flag", {"pfaff6_a.eds"}},
        {"characteristic", {"pfaff5_a.eds"}},
        {"class", {"grassmann.eds"}},
        {"darboux-class", {"liouville.eds"}},
        {"gender", {"darboux_d2.eds", "--system", "P"}},
        {"character", {"pfaff5_a.eds", "--point", "origin"}},
        {"character", {"pfaff6_a.eds", "--point", "origin", "--strategy", "seeded-random", "--seed", "11"}},
        {"polar", {"pfaff5_a.eds", "--point", "origin", "--element", "v4"}},
        {"frobenius", {"pfaff5_b.eds"}},
        {"identify", {"engel.eds", "--system", "P"}},
        {"scan", {"singular.eds"}},
        {"contact-build", {"--n", "2", "--order", "2"}},
        {"bracket", {"grassmann.eds", "--lagrange", "--functions", "f", "--functions", "g"}},
        {"hamiltonian-field", {"grassmann.eds", "--function", "eik"}},
        {"prolong", {"grassmann.eds", "--field", "scale"}},
        {"char-field", {"eikonal.eds"}},
        {"pde-check", {"pde_obstructed.eds"}},
        {"pde-check", {"pde_compatible.eds", "--sampled", "--seed", "3"}},
        {"restrict", {"pde_compatible.eds"}},
        {"congruences", {"darboux_d2.eds", "--system", "P", "--coframe", "C", "--modulo", "1"}},
        {"catalog-selftest", {}},
        {"derived", {"no-such-file.eds"}},
        {"darboux-class", {"singular.eds", "--point", "zero"}},
    };
    for (const auto& [cmd, args] : runs) {
        std::vector<std::string> a = args;
        INFO(cmd);
        auto first = run_cli(cmd, a), second = run_cli(cmd, a);
        CHECK(first.out == second.out);
        CHECK(first.exit_code == second.exit_code);
        auto j = Json::parse(first.out);
        CHECK(j.at("schema") == "cartan-eds/1");
        if (first.exit_code == 0) CHECK_FALSE(has_error(j));
        else CHECK(has_error(j));
    }
}

TEST_CASE("catalog self-test through the CLI") {
    auto all = Json::parse(run_cli("catalog-selftest").out);
    CHECK(all.at("result").at("pass") == true);

    const std::string tmp = std::string(CARTAN_EDS_BINARY_DIR) + "/tampered_catalog.eds";
    std::string text = slurp(catalog_path());
    const std::string from = "signature n=4 rank=2 flag=2,1,0";
    auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    text.replace(at, from.size(), "signature n=4 rank=3 flag=2,1,0");
    { std::ofstream(tmp, std::ios::binary) << text; }
    auto bad = run_cli("catalog-selftest", {"--catalog", tmp});
    CHECK(bad.exit_code == 1);
    auto jb = Json::parse(bad.out);
    int failed = 0;
    for (const auto& row : jb.at("result").at("rows"))
        if (row.at("pass") == false) {
            ++failed;
            CHECK(row.at("id") == "engel");
        }
    CHECK(failed == 1);

    const std::string empty = std::string(CARTAN_EDS_BINARY_DIR) + "/empty_catalog.eds";
    { std::ofstream(empty, std::ios::binary) << ""; }
    auto vac = run_cli("catalog-selftest", {"--catalog", empty});
    CHECK(vac.exit_code == 0);
    auto jv = Json::parse(vac.out);
    REQUIRE(jv.at("diagnostics").size() == 1);
    CHECK(jv.at("diagnostics")[0].at("severity") == "warning");
}

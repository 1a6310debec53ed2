#include "doctest.h"

#include "subopt/cli.hpp"
#include "subopt/document.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace subopt;
namespace fs = std::filesystem;

namespace {

bool same_constants(const LieAlgebra& a, const LieAlgebra& b) {
    if (a.dim() != b.dim()) return false;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            for (int k = 0; k < a.dim(); ++k)
                if (!a.c(i, j, k).same(b.c(i, j, k))) return false;
    return true;
}

ParseError parse_error(const std::string& text) {
    try {
        parse_algebra(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("no ParseError for: " << text);
    throw;
}

int count_lines(const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    int n = 0;
    for (std::string l; std::getline(in, l);)
        if (l.find(needle) != std::string::npos) ++n;
    return n;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Fixture {
    fs::path dir;
    Fixture() {
        dir = fs::temp_directory_path() / ("subopt_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Fixture() { fs::remove_all(dir); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }
};

const char* cli() { return std::getenv("SUBOPT_CLI"); }

int run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " \"" + std::string(cli()) + "\" " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

struct Computed {
    LieAlgebra alg;
    OptimalSystem sys;
    Report rep;
};

std::unique_ptr<Computed> compute(const std::string& label, std::uint64_t seed = 0x5EED) {
    auto c = std::make_unique<Computed>();
    c->alg = lookup(label).algebra();
    c->rep.options.seed = seed;
    c->sys = optimal_system(c->alg, c->rep.options);
    c->rep.algebra = &c->alg;
    c->rep.system = &c->sys;
    check_edges(c->rep);
    compare_with(c->rep, lookup(label));
    return c;
}

}  // namespace

TEST_CASE("parse_algebra: worked examples") {
    CHECK(same_constants(parse_algebra("dim 3; [e1,e2]=e1; [e1,e3]=-2 e2; [e2,e3]=e3"), lookup("A_{3,8}").algebra()));
    LieAlgebra a46 =
        parse_algebra("dim 4; param a (a!=0); param b (b>=0); [e1,e4]=a e1; [e2,e4]=b e2 - e3; [e3,e4]=e2 + b e3");
    CHECK(same_constants(a46, lookup("A_{4,6}").algebra()));
    CHECK(a46.params().size() == 2);
    CHECK_FALSE(a46.admissible({{"a", 0}, {"b", 1}}));
    CHECK_FALSE(a46.admissible({{"a", 1}, {"b", -1}}));
    LieAlgebra ab = parse_algebra("dim 2");
    CHECK(ab.dim() == 2);
    CHECK(same_constants(ab, from_structure_constants(2, StructureConstants(2, std::vector<std::vector<Expr>>(2, std::vector<Expr>(2))))));
}

TEST_CASE("parse_algebra: grammar details") {
    LieAlgebra a = parse_algebra(
        "# comment line\n"
        "name demo\n"
        "dim 3\n"
        "basis X Y Z\n"
        "[X,Y] = 1/2 X   # trailing comment\n");
    CHECK(a.name() == "demo");
    CHECK(a.basis() == std::vector<std::string>{"X", "Y", "Z"});
    CHECK(a.c(0, 1, 0).same(Expr(Rational(1, 2))));
    CHECK(a.c(1, 0, 0).same(Expr(Rational(-1, 2))));
}

TEST_CASE("parse_algebra: positioned errors") {
    auto e = parse_error("dim 3\n[e1,e2] = e1 +* e3\n");
    CHECK(e.line == 2);
    CHECK(e.column == 15);  // the '*'
    CHECK(std::string(e.what()).rfind("line 2, column 15:", 0) == 0);

    auto u = parse_error("dim 3; [e1,e2] = c e2");
    CHECK(u.line == 1);
    CHECK(u.column > 7);

    auto k = parse_error("dim 3\nfrobnicate 2\n");
    CHECK(k.line == 2);
    CHECK(k.column == 1);

    CHECK(parse_error("[e1,e2] = e1").line == 1);          // missing dim
    CHECK(parse_error("dim 3; [e1,e9] = e1").line == 1);   // unknown basis name
    CHECK(parse_error("dim 3; [e1,e2] = e1 e2").line == 1);  // not linear
    CHECK(parse_error("dim 2; exp 1 = ((1,0))").line == 1);  // wrong shape
    CHECK_THROWS_AS(parse_algebra("dim 3; [e1,e2] = e3; [e1,e3] = e1"), JacobiViolation);
}

TEST_CASE("serialize_algebra round trip for written documents") {
    for (std::string doc : {"dim 3; [e1,e2]=e1; [e1,e3]=-2 e2; [e2,e3]=e3",
                            "dim 4; param a (a!=0); param b (b>=0); [e1,e4]=a e1; [e2,e4]=b e2 - e3; [e3,e4]=e2 + b e3",
                            "dim 3; [e1,e2] = e3; [e1,e3] = e2; exp 1 = ((1,0,0),(0,(exp(t1)+exp(-t1))/2,"
                            "-(exp(t1)-exp(-t1))/2),(0,-(exp(t1)-exp(-t1))/2,(exp(t1)+exp(-t1))/2))"}) {
        INFO(doc);
        LieAlgebra a = parse_algebra(doc);
        LieAlgebra b = parse_algebra(serialize_algebra(a));
        CHECK(same_constants(a, b));
        CHECK(b.overrides().size() == a.overrides().size());
        CHECK(serialize_algebra(b) == serialize_algebra(a));
    }
}

TEST_CASE("export_dot: worked examples") {
    LieAlgebra ab = lookup("3A_1").algebra();
    auto g = build_graph(ab, 1, generators(ab));
    std::string dot = export_dot(g, legend_of(g));
    int nodes = 0;
    for (int i = 1; i <= 7; ++i) nodes += count_lines(dot, "  " + std::to_string(i) + ";");
    CHECK(nodes == 7);
    CHECK(count_lines(dot, "->") == 7);  // legend lines only

    LieAlgebra a36 = lookup("A_{3,6}+A_1").algebra();
    auto g36 = build_graph(a36, 2, generators(a36));
    std::string d36 = export_dot(g36, legend_of(g36));
    CHECK((count_lines(d36, "  5 -> 9") + count_lines(d36, "  9 -> 5")) == 1);
    CHECK(count_lines(d36, "5 -> 9 [dir=both]") == 1);  // mutual, drawn once

    LieAlgebra two = lookup("2A_2").algebra();
    auto g2 = build_graph(two, 1, generators(two));
    CHECK(count_lines(export_dot(g2, legend_of(g2)), "//   15 -> {Xi1+a1 Xi2+a2 Xi3+a3 Xi4}") == 1);
}

TEST_CASE("report_json: representatives survive a round trip, output is byte-stable") {
    auto a = compute("A_2+2A_1");
    std::string text = report_json(a->rep).dump(2);
    auto back = parse_report(text);
    auto& want = lookup("A_2+2A_1").expected;
    for (auto& [d, fams] : want) {
        REQUIRE(back.count(d));
        std::vector<std::pair<Codes, std::string>> x, y;
        for (auto& f : fams) x.push_back({f.codes, f.kinds});
        for (auto& f : back.at(d)) y.push_back({f.codes, f.kinds});
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        CHECK(x == y);
    }
    auto b = compute("A_2+2A_1");
    CHECK(report_json(b->rep).dump(2) == text);

    auto j = nlohmann::json::parse(text);
    CHECK(j["schema"] == "subopt-report/1");
    CHECK(j["dimensions"].size() == 3);
    CHECK_FALSE(j.dump().find("seconds") != std::string::npos);
}

TEST_CASE("report: flagged exclusion and warnings") {
    auto two = compute("2A_2");
    CHECK(two->rep.flagged.at(2) == std::vector<std::string>{"(5,10)"});
    auto j = report_json(two->rep);
    bool flagged = false;
    for (auto& d : j["dimensions"])
        for (auto& x : d["excluded"])
            if (x["flagged"] == true) flagged = true;
    CHECK(flagged);

    auto ab = compute("3A_1");
    bool warned = false;
    for (auto& w : ab->rep.warnings) warned |= w.find("(6)") != std::string::npos || w.find("Xi2") != std::string::npos;
    CHECK(warned);
    CHECK(report_text(ab->rep).find("Psi") != std::string::npos);
}

TEST_CASE("process: exit codes") {
    if (!cli()) {
        MESSAGE("SUBOPT_CLI not set; skipping process tests");
        return;
    }
    Fixture fx;
    CHECK(run("--catalog A_{3,8} --quiet") == 0);
    CHECK(run("--list") == 0);
    CHECK(run("--catalog A_{9,9} --quiet") == 2);
    CHECK(run("--quiet") == 2);                                   // no source
    CHECK(run("--catalog A_{3,8} --algebra x --quiet") == 2);     // two sources
    CHECK(run("--catalog A_{3,8} --bogus") == 2);
    CHECK(run("--catalog A_{3,8} --dims 3 --quiet") == 2);
    CHECK(run("--algebra " + (fx.dir / "missing.txt").string() + " --quiet") == 2);
    CHECK(run("--algebra " + fx.write("bad.txt", "dim 3\n[e1,e2] = e1 +* e3\n").string() + " --quiet") == 2);
    CHECK(run("--algebra " + fx.write("jac.txt", "dim 3; [e1,e2] = e3; [e1,e3] = e1").string() + " --quiet") == 2);
    CHECK(run("--algebra " + fx.write("cyc.txt", "dim 4; [e1,e4]=e2; [e2,e4]=e3; [e3,e4]=e1").string() + " --quiet") == 3);
    CHECK(run("--algebra " + fx.write("ok.txt", "dim 3; [e1,e2]=e1; [e1,e3]=-2 e2; [e2,e3]=e3").string() + " --quiet") == 0);
    CHECK(run("--catalog A_{3,5} --set a=1/2 --quiet") == 0);
    CHECK(run("--catalog A_{3,5} --set a=2 --quiet") == 2);       // violates 0<|a|<1
    CHECK(run("--catalog A_{3,8} --quiet", "SUBOPT_SEED=nope") == 2);
}

TEST_CASE("process: reports, seeds and DOT files") {
    if (!cli()) return;
    Fixture fx;
    auto r1 = fx.dir / "r1.json", r2 = fx.dir / "r2.json", r3 = fx.dir / "r3.json";
    REQUIRE(run("--catalog A_{3,8} --quiet --report " + r1.string()) == 0);
    REQUIRE(run("--catalog A_{3,8} --quiet --report " + r2.string()) == 0);
    CHECK(slurp(r1) == slurp(r2));
    auto rep = parse_report(slurp(r1));
    REQUIRE(rep.count(1));
    std::vector<std::pair<Codes, std::string>> psi1;
    for (auto& f : rep.at(1)) psi1.push_back({f.codes, f.kinds});
    std::sort(psi1.begin(), psi1.end());
    CHECK(psi1 == std::vector<std::pair<Codes, std::string>>{{{1}, ""}, {{2}, ""}, {{5}, "g"}});
    CHECK(rep.at(2).size() == 1);

    // SUBOPT_SEED overrides --seed
    REQUIRE(run("--catalog A_{3,8} --quiet --seed 1 --report " + r3.string(), "SUBOPT_SEED=7") == 0);
    CHECK(nlohmann::json::parse(slurp(r3))["options"]["seed"] == "0x7");

    auto text = fx.dir / "a38.txt";
    REQUIRE(run("--catalog A_{3,8} --text " + text.string()) == 0);
    CHECK(slurp(text).find("Xi1+alpha1 Xi3") != std::string::npos);

    auto dots = fx.dir / "dots";
    REQUIRE(run("--catalog A_{4,6} --dims 1 --quiet --dot " + dots.string()) == 0);
    std::string d1 = slurp(dots / "a46ab_d1.dot");
    int nodes = 0;
    for (int i = 1; i <= 15; ++i) nodes += count_lines(d1, "  " + std::to_string(i) + ";");
    CHECK(nodes == 15);
    CHECK(count_lines(d1, "//   1 -> {Xi1}") == 1);
    CHECK(count_lines(d1, "//   15 -> {Xi1+a1 Xi2+a2 Xi3+a3 Xi4}") == 1);

    REQUIRE(run("--catalog 3A_1 --quiet --dot " + dots.string()) == 0);
    for (auto f : {"3a1_d1.dot", "3a1_d2.dot"}) {
        std::string d = slurp(dots / f);
        CHECK_FALSE(d.empty());
        CHECK(count_lines(d, "->") == 7);  // legend only, no edges
    }
}

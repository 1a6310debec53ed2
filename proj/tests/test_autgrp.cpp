#include "doctest.h"

#include "subopt/autgrp.hpp"
#include "subopt/catalog.hpp"
#include "subopt/document.hpp"

#include <Eigen/Dense>

using namespace subopt;

namespace {

Expr t(int k) { return Expr::param(time_name(k), ParamKind::time); }
Expr pa(const char* n) { return Expr::param(n, ParamKind::algebra); }

void check_matrix(const Matrix& got, const Matrix& want) {
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i)
        for (size_t j = 0; j < got.size(); ++j) {
            INFO("entry (" << i + 1 << "," << j + 1 << "): got " << got[i][j].str() << ", want " << want[i][j].str());
            CHECK(is_zero(got[i][j] - want[i][j]));
        }
}

Matrix diag(std::vector<Expr> d) {
    Matrix m = identity_matrix(d.size());
    for (size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
    return m;
}

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& m) {
    Eigen::MatrixXd out(m.size(), m.size());
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m.size(); ++j) out(i, j) = m[i][j];
    return out;
}

struct Instance {
    std::string label;
    LieAlgebra alg;
};

// every catalog algebra, parametric ones at their concrete values too
std::vector<Instance> instances() {
    std::vector<Instance> out;
    for (auto& e : entries()) {
        out.push_back({e.label, e.algebra()});
        for (auto& c : e.concrete) out.push_back({e.label + " (concrete)", e.algebra().instantiate(c)});
    }
    return out;
}

}  // namespace

TEST_CASE("exponentiate: A_{3,8}, k=2 is diag(e^t, 1, e^-t)") {
    auto g = exponentiate(lookup("A_{3,8}").algebra(), 2);
    CHECK(g.time == "t2");
    CHECK_FALSE(g.trivial);
    check_matrix(g.matrix, diag({exp(t(2)), Expr(1), exp(-t(2))}));
}

TEST_CASE("exponentiate: nilpotent4, k=4 is the corrected unipotent form") {
    auto g = exponentiate(lookup("nilpotent4").algebra(), 4);
    CHECK(g.method == "nilpotent");
    Matrix want = identity_matrix(4);
    want[0][1] = t(4);
    want[0][2] = t(4) * t(4) / Expr(2);
    want[1][2] = t(4);
    check_matrix(g.matrix, want);
}

TEST_CASE("verify_exponential rejects the nilpotent4 A4 with the stray 1 at (3,1)") {
    LieAlgebra alg = lookup("nilpotent4").algebra();
    GeneratorAutomorphism printed;
    printed.k = 4;
    printed.time = "t4";
    printed.matrix = identity_matrix(4);
    printed.matrix[0][1] = t(4);
    printed.matrix[0][2] = t(4) * t(4) / Expr(2);
    printed.matrix[1][2] = t(4);
    printed.matrix[2][0] = Expr(1);
    auto v = verify_exponential(alg, printed);
    CHECK_FALSE(v.ok);
    CHECK(v.row == 2);
    CHECK(v.col == 0);
}

TEST_CASE("exponentiate: A_{4,6}, k=4 is exp(a t) plus a scaled rotation block") {
    auto g = exponentiate(lookup("A_{4,6}").algebra(), 4);
    Expr eb = exp(pa("b") * t(4));
    Matrix want = identity_matrix(4);
    want[0][0] = exp(pa("a") * t(4));
    want[1][1] = eb * cos(t(4));
    want[1][2] = eb * sin(t(4));
    want[2][1] = -eb * sin(t(4));
    want[2][2] = eb * cos(t(4));
    check_matrix(g.matrix, want);
}

TEST_CASE("verify_exponential: identity of a trivial ad, and the A_{3,6}+A_1 rotation") {
    LieAlgebra ab = lookup("3A_1").algebra();
    auto g = exponentiate(ab, 2);
    CHECK(g.trivial);
    CHECK(g.method == "identity");
    CHECK(verify_exponential(ab, g).ok);

    LieAlgebra a36 = lookup("A_{3,6}+A_1").algebra();
    GeneratorAutomorphism rot;
    rot.k = 3;
    rot.time = "t3";
    rot.matrix = identity_matrix(4);
    rot.matrix[0][0] = cos(t(3));
    rot.matrix[0][1] = sin(t(3));
    rot.matrix[1][0] = -sin(t(3));
    rot.matrix[1][1] = cos(t(3));
    CHECK(verify_exponential(a36, rot).ok);
    check_matrix(exponentiate(a36, 3).matrix, rot.matrix);
}

TEST_CASE("generators: abelian has none, A_2+2A_1 and A_{4,5}") {
    std::vector<int> trivial;
    CHECK(generators(lookup("3A_1").algebra(), &trivial).empty());
    CHECK(trivial == std::vector<int>{1, 2, 3});

    trivial.clear();
    auto gs = generators(lookup("A_2+2A_1").algebra(), &trivial);
    REQUIRE(gs.size() == 2);
    CHECK(trivial == std::vector<int>{3, 4});
    check_matrix(gs[0].matrix, diag({Expr(1), exp(-t(1)), Expr(1), Expr(1)}));
    Matrix a2 = identity_matrix(4);
    a2[1][0] = t(2);  // the one off-diagonal entry; sign follows exp(-t ad)
    check_matrix(gs[1].matrix, a2);

    auto g45 = generators(lookup("A_{4,5}").algebra());
    REQUIRE(g45.size() == 4);
    check_matrix(g45[3].matrix, diag({exp(t(4)), exp(pa("a") * t(4)), exp(pa("b") * t(4)), Expr(1)}));
}

TEST_CASE("override path: used only after verification") {
    // ad(e1) swaps e2 and e3: not triangular, not a rotation block
    const std::string base = "dim 3; [e1,e2] = e3; [e1,e3] = e2";
    CHECK_THROWS_AS(exponentiate(parse_algebra(base), 1), ExponentialUnavailable);

    const std::string ch = "(exp(t1) + exp(-t1))/2", sh = "(exp(t1) - exp(-t1))/2";
    LieAlgebra good = parse_algebra(base + "; exp 1 = ((1,0,0),(0," + ch + ",-" + sh + "),(0,-" + sh + "," + ch + "))");
    auto g = exponentiate(good, 1);
    CHECK(g.method == "override");
    CHECK(verify_exponential(good, g).ok);

    LieAlgebra bad = parse_algebra(base + "; exp 1 = ((1,0,0),(0," + ch + "," + sh + "),(0," + sh + "," + ch + "))");
    CHECK_THROWS_AS(exponentiate(bad, 1), VerificationFailed);
}

TEST_CASE("ExponentialUnavailable for a cyclic derivation") {
    LieAlgebra alg = parse_algebra("dim 4; [e1,e4]=e2; [e2,e4]=e3; [e3,e4]=e1");
    CHECK_THROWS_AS(exponentiate(alg, 4), ExponentialUnavailable);
    CHECK_THROWS_AS(generators(alg), ExponentialUnavailable);
}

TEST_CASE("property: every catalog generator verifies, obeys the group law and det = exp(-trace ad t)") {
    for (auto& [label, alg] : instances()) {
        INFO(label);
        std::vector<int> trivial;
        auto gens = generators(alg, &trivial);
        CHECK(gens.size() + trivial.size() == (size_t)alg.dim());
        Sampler s(7, alg.predicate());
        std::vector<Parameter> ps;
        for (auto& p : alg.params()) ps.push_back({p.name, ParamKind::algebra});
        for (auto& g : gens) {
            INFO("generator " << g.k);
            CHECK(verify_exponential(alg, g).ok);

            // identity at zero
            Matrix at0 = g.matrix;
            for (auto& row : at0)
                for (auto& x : row) x = substitute(x, g.time, Expr(0));
            check_matrix(at0, identity_matrix(alg.dim()));

            // A(s) A(u) = A(s + u): symbolically where possible, numerically always
            Expr sv = Expr::param("t8", ParamKind::time), uv = Expr::param("t9", ParamKind::time);
            Matrix As = g.matrix, Au = g.matrix, Asu = g.matrix;
            for (auto& row : As)
                for (auto& x : row) x = substitute(x, g.time, sv);
            for (auto& row : Au)
                for (auto& x : row) x = substitute(x, g.time, uv);
            for (auto& row : Asu)
                for (auto& x : row) x = substitute(x, g.time, sv + uv);
            Matrix prod = matmul(As, Au);
            double trace = 0;
            for (int trial = 0; trial < 5; ++trial) {
                auto env = s.point(ps);
                env["t8"] = s.draw(ParamKind::time);
                env["t9"] = s.draw(ParamKind::time);
                env[g.time] = env["t8"];
                auto P = evaluate_matrix(prod, env), Q = evaluate_matrix(Asu, env);
                for (int i = 0; i < alg.dim(); ++i)
                    for (int j = 0; j < alg.dim(); ++j) CHECK(P[i][j] == doctest::Approx(Q[i][j]).epsilon(1e-9));

                auto ad = evaluate_matrix(adjoint_matrix(alg, g.k), env);
                trace = 0;
                for (int i = 0; i < alg.dim(); ++i) trace += ad[i][i];
                double det = to_eigen(evaluate_matrix(g.matrix, env)).determinant();
                CHECK(det == doctest::Approx(std::exp(-trace * env[g.time])).epsilon(1e-9));
            }
        }
    }
}

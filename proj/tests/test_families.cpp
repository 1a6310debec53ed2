#include "doctest.h"

#include "subopt/catalog.hpp"
#include "subopt/document.hpp"
#include "subopt/families.hpp"

#include <Eigen/Dense>

using namespace subopt;

namespace {

std::vector<Codes> codes(const std::vector<PFamily>& fs) {
    std::vector<Codes> out;
    for (auto& f : fs) out.push_back(f.codes);
    return out;
}

LieAlgebra abelian(int r) { return parse_algebra("dim " + std::to_string(r)); }

std::map<std::string, double> sample_env(const LieAlgebra& alg, const PFamily& f, Sampler& s) {
    std::vector<Parameter> ps;
    for (auto& p : alg.params()) ps.push_back({p.name, ParamKind::algebra});
    for (auto& c : f.coeffs) ps.push_back({c, ParamKind::coefficient});
    return s.point(ps);
}

// brute force: the numeric row space is closed under the numeric bracket
double closure_residual(const LieAlgebra& alg, const PFamily& f, const std::map<std::string, double>& env) {
    int r = alg.dim(), d = f.d;
    Eigen::MatrixXd rows(r, d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < r; ++k) rows(k, i) = evaluate(f.matrix[i][k], env);
    std::vector<std::vector<std::vector<double>>> C(r, std::vector<std::vector<double>>(r, std::vector<double>(r)));
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            for (int g = 0; g < r; ++g) C[a][b][g] = evaluate(alg.c(a, b, g), env);
    double worst = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            Eigen::VectorXd br = Eigen::VectorXd::Zero(r);
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b)
                    for (int g = 0; g < r; ++g) br(g) += rows(a, i) * rows(b, j) * C[a][b][g];
            Eigen::VectorXd x = rows.colPivHouseholderQr().solve(br);
            worst = std::max(worst, (rows * x - br).norm() / std::max(1.0, br.norm()));
        }
    return worst;
}

}  // namespace

TEST_CASE("enumerate_1d: order and counts") {
    auto f3 = enumerate_1d(abelian(3));
    CHECK(codes(f3) == std::vector<Codes>{{1}, {2}, {4}, {3}, {5}, {6}, {7}});
    CHECK(render(f3[4]) == "Xi1+a1 Xi3");
    CHECK(render(f3[6]) == "Xi1+a1 Xi2+a2 Xi3");
    auto f4 = enumerate_1d(abelian(4));
    REQUIRE(f4.size() == 15);
    CHECK(f4[14].codes == Codes{15});
    CHECK(render(f4[14]) == "Xi1+a1 Xi2+a2 Xi3+a3 Xi4");
    CHECK(enumerate_1d(abelian(2)).size() == 3);
}

TEST_CASE("slex_compare") {
    auto x3 = family_from_codes(3, {4}), x12 = family_from_codes(3, {3}), x13 = family_from_codes(3, {5});
    CHECK(slex_compare(x3, x12) < 0);
    CHECK(slex_compare(x12, x13) < 0);
    CHECK(slex_compare(x13, x12) > 0);
    CHECK(slex_compare(x12, x12) == 0);
    // d > 1: p first, then row codes at the first difference
    CHECK(slex_compare(family_from_codes(4, {1, 6}), family_from_codes(4, {3, 4})) < 0);
    CHECK(slex_compare(family_from_codes(4, {2, 4}), family_from_codes(4, {1, 6})) < 0);
}

TEST_CASE("supports and p") {
    for (unsigned c = 1; c < 16; ++c) {
        auto f = family_from_codes(4, {c});
        CHECK(f.p() == popcount(c));
        CHECK(f.free_count() == popcount(c) - 1);
        CHECK(f.matrix[0][f.pivots[0]].same(Expr(1)));
    }
    auto f = family_from_codes(4, {5, 10});
    CHECK(f.p() == 4);
    CHECK(codes_str(f.codes) == "(5,10)");
    CHECK(render(f) == "Xi1+a1 Xi3, Xi2+a2 Xi4");
}

TEST_CASE("closure_check: worked examples") {
    auto a2 = lookup("A_2+2A_1").algebra();
    auto cl = closure_check(a2, family_from_codes(4, {1, 2}));
    REQUIRE(cl.ok);
    CHECK(cl.lambda[0][1][0].is_structurally_zero());
    CHECK(cl.lambda[0][1][1].same(Expr(1)));

    auto two = lookup("2A_2").algebra();
    auto bad = closure_check(two, family_from_codes(4, {5, 10}));
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.witness.empty());

    auto ab = abelian(4);
    for (int d = 2; d < 4; ++d)
        for (auto& f : candidate_shapes(ab, d).accepted)
            for (auto& m : closure_check(ab, f).lambda)
                for (auto& row : m)
                    for (auto& x : row) CHECK(x.is_structurally_zero());
    CHECK(candidate_shapes(ab, 2).rejected.empty());
}

TEST_CASE("candidates_nd: worked examples") {
    CHECK(candidates_nd(lookup("A_{3,9}").algebra(), 2).empty());
    auto a38 = codes(candidates_nd(lookup("A_{3,8}").algebra(), 2));
    CHECK(std::find(a38.begin(), a38.end(), Codes{1, 2}) != a38.end());
    CHECK(codes(candidates_nd(abelian(3), 2)) ==
          std::vector<Codes>{{1, 2}, {1, 4}, {2, 4}, {1, 6}, {3, 4}, {5, 2}, {5, 6}});
    CHECK(families_of_dimension(abelian(3), 1).size() == 7);
}

TEST_CASE("rref_symbolic: worked examples") {
    auto id = rref_symbolic(identity_matrix(3));
    CHECK(id.conditions.empty());
    CHECK(id.rank == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(id.matrix[i][j].same(Expr(i == j ? 1 : 0)));

    Expr f1 = Expr::param("f1"), f2 = Expr::param("f2");
    auto prop = rref_symbolic({{f1, f2}, {Expr(2) * f1, Expr(2) * f2}});
    CHECK(prop.rank == 1);
    CHECK(prop.matrix[1][0].is_structurally_zero());
    CHECK(prop.matrix[1][1].is_structurally_zero());
    REQUIRE(prop.conditions.size() == 1);
    CHECK(prop.conditions[0].same(f1));

    // {Xi1 + x cos(phi) Xi3 + x sin(phi) Xi4, sin(phi) Xi3 - cos(phi) Xi4}
    Expr x = Expr::param("f3"), phi = Expr::param("f4");
    Matrix m{{Expr(1), Expr(0), x * cos(phi), x * sin(phi)}, {Expr(0), Expr(0), sin(phi), -cos(phi)}};
    auto rr = rref_symbolic(m);
    CHECK(rr.pivots == std::vector<int>{0, 2});
    REQUIRE(rr.conditions.size() == 1);
    CHECK(rr.conditions[0].same(sin(phi)));
    CHECK(rr.matrix[0][2].is_structurally_zero());
    CHECK(rr.matrix[1][2].same(Expr(1)));
    // x csc(phi) and -cot(phi) need sin^2 + cos^2 = 1, so compare numerically
    Sampler s(3);
    for (int i = 0; i < 10; ++i) {
        auto env = s.point({{"f3", ParamKind::coefficient}, {"f4", ParamKind::coefficient}});
        double xv = env["f3"], pv = env["f4"];
        CHECK(evaluate(rr.matrix[0][3], env) == doctest::Approx(xv / std::sin(pv)).epsilon(1e-9));
        CHECK(evaluate(rr.matrix[1][3], env) == doctest::Approx(-std::cos(pv) / std::sin(pv)).epsilon(1e-9));
    }
}

TEST_CASE("property: rref_symbolic is idempotent") {
    Sampler s(11);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> u(-3, 3);
    for (int trial = 0; trial < 60; ++trial) {
        int rows = 1 + rng() % 3, cols = rows + rng() % 3;
        Matrix m(rows, std::vector<Expr>(cols));
        int n = 0;
        for (auto& row : m)
            for (auto& x : row) {
                int kind = rng() % 3;
                if (kind == 0) x = Expr(u(rng));
                else if (kind == 1) x = Expr::param("f" + std::to_string(++n));
                else x = Expr(u(rng)) + Expr::param("f" + std::to_string(++n));
            }
        auto once = rref_symbolic(m, &s);
        auto twice = rref_symbolic(once.matrix, &s);
        CHECK(twice.conditions.empty());
        CHECK(twice.rank == once.rank);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) CHECK(is_zero(twice.matrix[i][j] - once.matrix[i][j], &s));
    }
}

TEST_CASE("property: candidates are RREF, rank d, independent, closed (numeric oracle)") {
    for (auto& e : entries()) {
        LieAlgebra alg = e.algebra();
        Sampler s(5, alg.predicate());
        for (int d = 1; d < alg.dim(); ++d) {
            auto fams = families_of_dimension(alg, d);
            if (d == 1) CHECK(fams.size() == (size_t)((1 << alg.dim()) - 1));
            for (size_t i = 0; i + 1 < fams.size(); ++i) CHECK(slex_compare(fams[i], fams[i + 1]) < 0);
            for (auto& f : fams) {
                INFO(e.label << " d=" << d << " " << codes_str(f.codes));
                CHECK(f.d == d);
                // RREF: pivots 1, zero elsewhere in pivot columns, strictly increasing
                for (int i = 0; i < d; ++i) {
                    if (i) CHECK(f.pivots[i] > f.pivots[i - 1]);
                    for (int k = 0; k < d; ++k) CHECK(f.matrix[k][f.pivots[i]].same(Expr(k == i ? 1 : 0)));
                    for (int c = 0; c < f.pivots[i]; ++c) CHECK(f.matrix[i][c].is_structurally_zero());
                }
                std::vector<Expr> free;
                for (auto& [row, c] : f.slots) free.push_back(f.matrix[row][c]);
                if (!free.empty()) CHECK(generic_rank(free, f.coeffs) == (int)free.size());
                if (d > 1)
                    for (int k = 0; k < 5; ++k) CHECK(closure_residual(alg, f, sample_env(alg, f, s)) < 1e-9);
            }
            // every rejected shape fails the oracle or is dependent
            for (auto& rj : candidate_shapes(alg, d).rejected) {
                if (rj.reason.rfind("not closed", 0) != 0) continue;
                double worst = 0;
                for (int k = 0; k < 5; ++k) worst = std::max(worst, closure_residual(alg, rj.family, sample_env(alg, rj.family, s)));
                INFO(e.label << " rejected " << codes_str(rj.family.codes));
                CHECK(worst > 1e-9);
            }
        }
    }
}

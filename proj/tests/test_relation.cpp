#include "doctest.h"

#include "subopt/catalog.hpp"
#include "subopt/document.hpp"
#include "subopt/relation.hpp"

using namespace subopt;

namespace {

const GeneratorAutomorphism& gen(const std::vector<GeneratorAutomorphism>& gs, int k) {
    for (auto& g : gs)
        if (g.k == k) return g;
    FAIL("no generator " << k);
    throw;
}

const Edge* find_edge(const RelationGraph& g, const Codes& from, const Codes& to, std::vector<int> word) {
    int s = g.index_of(from), t = g.index_of(to);
    for (auto& e : g.edges)
        if (e.source == s && e.target == t && e.witness.word == word) return &e;
    return nullptr;
}

const ImageBranch* branch_to(const std::vector<ImageBranch>& bs, const Codes& c) {
    for (auto& b : bs)
        if (b.codes == c) return &b;
    return nullptr;
}

std::vector<Codes> rep_codes(const DimensionResult& dr) {
    std::vector<Codes> out;
    for (auto& r : dr.reps) out.push_back(dr.graph.vertices[r.vertex].codes);
    std::sort(out.begin(), out.end());
    return out;
}

struct Instance {
    std::string label;
    LieAlgebra alg;
};

std::vector<Instance> instances() {
    std::vector<Instance> out;
    for (auto& e : entries()) {
        if (e.concrete.empty()) out.push_back({e.label, e.algebra()});
        for (auto& c : e.concrete) out.push_back({e.label, e.algebra().instantiate(c)});
    }
    return out;
}

}  // namespace

TEST_CASE("image_patterns: nilpotent4, A4 on {Xi2+a1 Xi3}") {
    LieAlgebra alg = lookup("nilpotent4").algebra();
    auto gs = generators(alg);
    auto bs = image_patterns(alg, gen(gs, 4), family_from_codes(4, {6}));
    auto generic = branch_to(bs, {7});
    REQUIRE(generic);
    CHECK(generic->witness.generic());
    auto special = branch_to(bs, {5});
    REQUIRE(special);
    REQUIRE(special->witness.steps.size() == 1);
    CHECK(special->witness.steps[0].time == "t4");
    REQUIRE(special->witness.steps[0].root.value);
    // t4 = -f2/f3 with the pivot normalised to 1
    CHECK(special->witness.steps[0].root.value->same(Expr(-1) / Expr::param("f1")));
    CHECK_FALSE(branch_to(bs, {6}) == nullptr);  // t = 0 keeps the family

    // the 3-family can never be pushed back
    auto back = image_patterns(alg, gen(gs, 4), family_from_codes(4, {7}));
    CHECK(branch_to(back, {6}) == nullptr);
    CHECK(branch_to(back, {5}) != nullptr);  // t4 = -f1/f2 kills the Xi2 slot instead
}

TEST_CASE("image_patterns: A_{4,6}, A4 rotates {Xi2} into {Xi3} at pi/2") {
    LieAlgebra alg = lookup("A_{4,6}").algebra();
    auto gs = generators(alg);
    auto bs = image_patterns(alg, gen(gs, 4), family_from_codes(4, {2}));
    auto b = branch_to(bs, {4});
    REQUIRE(b);
    REQUIRE(b->witness.steps.size() == 1);
    const Solution& root = b->witness.steps[0].root;
    CHECK(root.kind == RootKind::trig);
    Evaluator<double> ev({{"a", 2.0}, {"b", 0.5}});
    double t = root.evaluate(ev);
    CHECK(std::abs(std::cos(t)) < 1e-12);
}

TEST_CASE("words are single generators then ordered pairs of distinct ones") {
    auto gs = generators(lookup("A_2+2A_1").algebra());
    REQUIRE(gs.size() == 2);
    CHECK(words(gs, 1).size() == 2);
    auto w2 = words(gs, 2);
    REQUIRE(w2.size() == 4);
    CHECK(w2[2].size() == 2);
    CHECK(w2[2][0] != w2[2][1]);
}

TEST_CASE("build_graph: abelian has no edges, singletons") {
    LieAlgebra alg = lookup("3A_1").algebra();
    auto g = build_graph(alg, 1, generators(alg));
    CHECK(g.vertices.size() == 7);
    CHECK(g.edges.empty());
    CHECK(weak_components(g).size() == 7);
    CHECK(strong_components(g).size() == 7);
    auto sel = select_representatives(g, weak_components(g), indegree_raw(g));
    REQUIRE(sel.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(sel[i].vertex == i);
}

TEST_CASE("nilpotent4: the 6 -> 5 edge, its oracle and a corrupted witness") {
    LieAlgebra alg = lookup("nilpotent4").algebra();
    auto gs = generators(alg);
    auto g = build_graph(alg, 1, gs);
    const Edge* e = find_edge(g, {6}, {5}, {4});
    REQUIRE(e);
    CHECK(orbit_oracle(alg, gs, g, *e));

    Edge bad = *e;
    bad.witness.steps[0].root.value = Expr(1) / Expr::param("f1");
    auto res = orbit_oracle_detail(alg, gs, g, bad);
    CHECK_FALSE(res.ok);
    CHECK(res.passed == 0);

    // asymmetry: 6 reaches 7, 7 never reaches 6
    int v6 = g.index_of({6}), v7 = g.index_of({7}), v5 = g.index_of({5});
    CHECK(g.adj[v6][v7] == 1);
    CHECK(g.adj[v7][v6] == 0);
    auto R = g.reach();
    CHECK_FALSE(R[v7][v6]);
    CHECK_FALSE(R[v5][v6]);
}

TEST_CASE("A_{3,6}+A_1 d=2: vertices 5 and 9 share a component, t3 = pi/2 edge") {
    LieAlgebra alg = lookup("A_{3,6}+A_1").algebra();
    auto gs = generators(alg);
    auto g = build_graph(alg, 2, gs);
    REQUIRE(g.vertices.size() == 11);
    int v5 = g.index_of({1, 10}), v9 = g.index_of({9, 2});
    CHECK(v5 == 4);
    CHECK(v9 == 8);
    for (auto comps : {weak_components(g), strong_components(g)}) {
        bool together = false;
        for (auto& c : comps)
            together |= std::count(c.begin(), c.end(), v5) && std::count(c.begin(), c.end(), v9);
        CHECK(together);
    }
    const Edge* e = find_edge(g, {1, 10}, {9, 2}, {3});
    REQUIRE(e);
    REQUIRE(e->witness.steps.size() == 1);
    CHECK(e->witness.steps[0].root.kind == RootKind::trig);
    CHECK(orbit_oracle(alg, gs, g, *e));
}

TEST_CASE("A_{4,6} d=2: vertices 8 and 9 share a component") {
    LieAlgebra alg = lookup("A_{4,6}").algebra();
    auto g = build_graph(alg, 2, generators(alg));
    int v8 = g.index_of({3, 4}), v9 = g.index_of({5, 2});
    CHECK(v8 == 7);
    CHECK(v9 == 8);
    auto R = g.reach();
    CHECK(R[v8][v9]);
    CHECK(R[v9][v8]);
}

TEST_CASE("optimal_system: representatives") {
    auto a38 = optimal_system(lookup("A_{3,8}").algebra());
    CHECK(rep_codes(a38.dims[0]) == std::vector<Codes>{{1}, {2}, {5}});
    CHECK(rep_codes(a38.dims[1]) == std::vector<Codes>{{1, 2}});

    auto a46 = optimal_system(lookup("A_{4,6}").algebra(), {{1}});
    CHECK(rep_codes(a46.dims[0]) == std::vector<Codes>{{1}, {2}, {3}, {8}});

    auto a39 = optimal_system(lookup("A_{3,9}").algebra());
    CHECK(rep_codes(a39.dims[0]) == std::vector<Codes>{{1}});
    CHECK(a39.dims[1].reps.empty());

    auto a2 = optimal_system(lookup("A_2+2A_1").algebra());
    CHECK(a2.dims[0].reps.size() == 11);
    CHECK(a2.dims[1].reps.size() == 17);
    CHECK(a2.dims[2].reps.size() == 8);

    auto two = optimal_system(lookup("2A_2").algebra(), {{3}});
    auto c3 = rep_codes(two.dims[0]);
    CHECK(c3.size() == 5);
    CHECK(std::count(c3.begin(), c3.end(), Codes{5, 2, 8}) == 1);
}

TEST_CASE("rescale: Greek and Latin") {
    auto check = [](const char* label, const Codes& c, std::vector<bool> want) {
        LieAlgebra alg = lookup(label).algebra();
        CHECK(rescale(alg, generators(alg), family_from_codes(alg.dim(), c)) == want);
    };
    check("A_{3,8}", {5}, {true});
    check("A_2+2A_1", {6}, {true});
    check("3A_1", {3}, {false});
    check("A_2+2A_1", {13}, {false, false});  // {Xi1+a1 Xi3+a2 Xi4}
}

TEST_CASE("property: reflexivity, transitivity, selection and oracle over the catalog") {
    for (auto& [label, alg] : instances()) {
        auto sys = optimal_system(alg);
        for (auto& dr : sys.dims) {
            INFO(label << " d=" << dr.d);
            auto& g = dr.graph;
            int n = g.vertices.size();
            Sampler s(9, alg.predicate());

            // every generator at t = 0 keeps every family
            for (auto& gen : sys.gens)
                for (auto& v : g.vertices) {
                    std::vector<Parameter> ps;
                    for (auto& f : v.coeffs) ps.push_back({f, ParamKind::coefficient});
                    for (auto& p : alg.params()) ps.push_back({p.name, ParamKind::algebra});
                    auto env = s.point(ps);
                    env[gen.time] = 0;
                    auto F = evaluate_matrix(v.matrix, env), A = evaluate_matrix(gen.matrix, env);
                    std::vector<std::vector<double>> img(F.size(), std::vector<double>(A.size()));
                    for (size_t i = 0; i < F.size(); ++i)
                        for (size_t j = 0; j < A.size(); ++j)
                            for (size_t l = 0; l < A.size(); ++l) img[i][j] += F[i][l] * A[j][l];
                    CHECK(numeric_support(img) == v.codes);
                }

            // adjacency agrees with the edge list, no self-loops stored
            std::vector<std::vector<int>> adj(n, std::vector<int>(n));
            for (auto& e : g.edges) adj[e.source][e.target] = 1;
            CHECK(adj == g.adj);
            for (int i = 0; i < n; ++i) CHECK(g.adj[i][i] == 0);

            // path-connected vertices share components
            auto R = g.reach();
            std::vector<int> strong(n), weak(n);
            auto sc = strong_components(g), wc = weak_components(g);
            for (size_t c = 0; c < sc.size(); ++c)
                for (int v : sc[c]) strong[v] = c;
            for (size_t c = 0; c < wc.size(); ++c)
                for (int v : wc[c]) weak[v] = c;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    for (int k = 0; k < n; ++k)
                        if (R[i][j] && R[j][k]) CHECK(R[i][k]);
                    if (R[i][j]) CHECK(weak[i] == weak[j]);
                    CHECK((R[i][j] && R[j][i]) == (strong[i] == strong[j]));
                }

            // one representative per component, pairwise inequivalent, code kept by rescaling
            CHECK(dr.reps.size() == dr.components.size());
            for (auto& a : dr.reps) {
                CHECK(a.greek.size() == (size_t)g.vertices[a.vertex].free_count());
                for (auto& b : dr.reps)
                    if (a.vertex != b.vertex) CHECK_FALSE((R[a.vertex][b.vertex] && R[b.vertex][a.vertex]));
                // maximal indegree, slex-smallest among ties
                auto& comp = dr.components[a.component];
                for (int v : comp) {
                    CHECK(dr.indeg_reach[v] <= dr.indeg_reach[a.vertex]);
                    if (dr.indeg_reach[v] == dr.indeg_reach[a.vertex]) CHECK(v >= a.vertex);
                }
            }

            for (auto& e : g.edges) {
                auto res = orbit_oracle_detail(alg, sys.gens, g, e);
                INFO(codes_str(g.vertices[e.source].codes) << " -> " << codes_str(g.vertices[e.target].codes) << " "
                                                           << e.witness.describe() << ": " << res.failure);
                CHECK(res.ok);
            }
        }
    }
}

TEST_CASE("property: parallel edge discovery is deterministic") {
    LieAlgebra alg = lookup("A_2+2A_1").algebra();
    SystemOptions one, four;
    four.jobs = 4;
    auto a = optimal_system(alg, one), b = optimal_system(alg, four);
    for (size_t d = 0; d < a.dims.size(); ++d) {
        auto &ga = a.dims[d].graph, &gb = b.dims[d].graph;
        REQUIRE(ga.edges.size() == gb.edges.size());
        for (size_t i = 0; i < ga.edges.size(); ++i) {
            CHECK(ga.edges[i].source == gb.edges[i].source);
            CHECK(ga.edges[i].target == gb.edges[i].target);
            CHECK(ga.edges[i].witness.describe() == gb.edges[i].witness.describe());
        }
    }
}

#include "subopt/relation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <thread>

namespace subopt {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    // splitmix64 over the three words
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ (b + 0x1234567ull));
}

std::string Witness::describe() const {
    std::string s;
    for (size_t i = 0; i < word.size(); ++i) s += (i ? " then A" : "A") + std::to_string(word[i]);
    if (steps.empty()) return s + " at generic t";
    s += " with ";
    for (size_t i = 0; i < steps.size(); ++i) s += (i ? ", " : "") + steps[i].root.describe();
    return s;
}

namespace {

template <class T>
double mag(const T& x) {
    return std::abs(value_of(x));
}

// Gauss-Jordan with partial pivoting; returns pivot columns
template <class T>
std::vector<int> rref_numeric(std::vector<std::vector<T>>& a, double tol) {
    int rows = a.size(), cols = rows ? a[0].size() : 0;
    double scale = 0;
    for (auto& row : a)
        for (auto& x : row) scale = std::max(scale, mag(x));
    scale = std::max(scale, 1.0);
    std::vector<int> piv;
    int row = 0;
    for (int c = 0; c < cols && row < rows; ++c) {
        int best = row;
        for (int i = row + 1; i < rows; ++i)
            if (mag(a[i][c]) > mag(a[best][c])) best = i;
        if (mag(a[best][c]) <= tol * scale) continue;
        std::swap(a[best], a[row]);
        T p = a[row][c];
        for (int k = 0; k < cols; ++k) a[row][k] = a[row][k] / p;
        for (int i = 0; i < rows; ++i) {
            if (i == row) continue;
            T f = a[i][c];
            if (value_of(f) == 0.0) continue;
            for (int k = 0; k < cols; ++k) a[i][k] = a[i][k] - f * a[row][k];
        }
        piv.push_back(c);
        ++row;
    }
    return piv;
}

int svd_rank(const Eigen::MatrixXd& m, double rel) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    auto sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0)) return 0;
    int r = 0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > rel * sv(0)) ++r;
    return r;
}

Expr det(const Matrix& m, const std::vector<int>& cols, int row = 0) {
    int n = cols.size();
    if (n == 1) return m[row][cols[0]];
    Expr out;
    for (int j = 0; j < n; ++j) {
        if (m[row][cols[j]].is_structurally_zero()) continue;
        std::vector<int> rest;
        for (int k = 0; k < n; ++k)
            if (k != j) rest.push_back(cols[k]);
        Expr minor = det(m, rest, row + 1);
        if (minor.is_structurally_zero()) continue;
        Expr term = m[row][cols[j]] * minor;
        out = (j % 2) ? out - term : out + term;
    }
    return out;
}

std::vector<Expr> equations(const Matrix& M) {
    int d = M.size(), r = M[0].size();
    if (d == 1) return M[0];
    std::vector<Expr> out;
    std::vector<int> cols(d);
    std::function<void(int, int)> rec = [&](int i, int from) {
        if (i == d) {
            out.push_back(det(M, cols));
            return;
        }
        for (int c = from; c < r; ++c) {
            cols[i] = c;
            rec(i + 1, c + 1);
        }
    };
    rec(0, 0);
    return out;
}

struct Analysis {
    Codes codes;
    bool valid;
};

struct Search {
    const LieAlgebra& alg;
    const std::vector<std::string>& fvars;
    Sampler sampler;
    std::vector<ImageBranch> out;
    std::vector<int> word;

    std::optional<Analysis> analyze(const Matrix& M, const std::vector<std::string>& taus,
                                    const std::vector<WitnessStep>& bound) {
        int d = M.size(), r = M[0].size();
        std::vector<std::string> vars = fvars;
        vars.insert(vars.end(), taus.begin(), taus.end());
        int n = vars.size();
        if (n > Dual::N) throw std::runtime_error("too many variables for the Jacobian");
        std::vector<Parameter> ps;
        for (auto& f : fvars) ps.push_back({f, ParamKind::coefficient});
        for (auto& t : taus) ps.push_back({t, ParamKind::time});
        for (auto& p : alg.params()) ps.push_back({p.name, ParamKind::algebra});
        std::optional<std::vector<std::vector<bool>>> pattern;
        std::vector<int> pivots;
        bool valid = false;
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<std::vector<Dual>> A;
            bool finite = false;
            for (int attempt = 0; attempt < 20 && !finite; ++attempt) {
                auto pt = sampler.point(ps);
                std::map<std::string, Dual> env;
                for (auto& [k, v] : pt) env[k] = Dual(v);
                for (int j = 0; j < n; ++j) env[vars[j]] = Dual::variable(pt[vars[j]], j, n);
                for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
                    Evaluator<Dual> ev(env);
                    env[it->time] = it->root.evaluate(ev);
                }
                Evaluator<Dual> ev(env);
                A.assign(d, std::vector<Dual>(r));
                finite = true;
                for (int i = 0; i < d; ++i)
                    for (int c = 0; c < r; ++c) {
                        A[i][c] = ev(M[i][c]);
                        if (!std::isfinite(A[i][c].v)) finite = false;
                        for (int j = 0; j < n && finite; ++j)
                            if (!std::isfinite(A[i][c].g[j])) finite = false;
                    }
            }
            if (!finite) return std::nullopt;
            auto piv = rref_numeric(A, 1e-9);
            if ((int)piv.size() < d) return std::nullopt;
            double scale = 1.0;
            for (auto& row : A)
                for (auto& x : row) scale = std::max(scale, std::abs(x.v));
            std::vector<std::vector<bool>> pat(d, std::vector<bool>(r));
            for (int i = 0; i < d; ++i)
                for (int c = 0; c < r; ++c) pat[i][c] = std::abs(A[i][c].v) > 1e-8 * scale;
            if (pattern && (*pattern != pat || pivots != piv)) return std::nullopt;
            pattern = pat;
            pivots = piv;
            std::vector<std::pair<int, int>> free;
            for (int i = 0; i < d; ++i)
                for (int c = 0; c < r; ++c)
                    if (pat[i][c] && std::find(piv.begin(), piv.end(), c) == piv.end()) free.emplace_back(i, c);
            Eigen::MatrixXd J(free.size(), n);
            for (size_t q = 0; q < free.size(); ++q)
                for (int j = 0; j < n; ++j) J(q, j) = A[free[q].first][free[q].second].g[j];
            if (svd_rank(J, 1e-8) == (int)free.size()) valid = true;
        }
        Analysis a;
        a.valid = valid;
        for (int i = 0; i < d; ++i) {
            unsigned code = 0;
            for (int c = 0; c < r; ++c)
                if ((*pattern)[i][c]) code |= 1u << c;
            a.codes.push_back(code);
        }
        return a;
    }

    void emit(const Codes& codes, const std::vector<WitnessStep>& trail) {
        for (auto& b : out)
            if (b.codes == codes) return;
        out.push_back({codes, Witness{word, trail}});
    }

    bool vanishes(const Expr& e) {
        if (e.is_structurally_zero()) return true;
        try {
            return is_zero(e, &sampler);
        } catch (const SymxError&) {
            return true;  // identity outside the rewrite rules: numerically zero
        }
    }

    void run(const Matrix& M, const std::vector<std::string>& taus, const std::vector<WitnessStep>& trail) {
        if (auto a = analyze(M, taus, {}); a && a->valid) emit(a->codes, trail);
        if (taus.empty()) return;
        std::set<std::pair<std::string, std::string>> seen;
        for (auto& e : equations(M)) {
            if (vanishes(e)) continue;
            for (auto& tau : taus) {
                if (!e.depends_on(tau)) continue;
                SolveResult sr = solve_for(e, tau);
                if (sr.unsupported) continue;
                for (auto& root : sr.roots) {
                    if (root.kind == RootKind::rational && root.value->is_structurally_zero()) continue;
                    if (!seen.insert({tau, root.describe()}).second) continue;
                    std::vector<std::string> rest;
                    for (auto& t : taus)
                        if (t != tau) rest.push_back(t);
                    auto next = trail;
                    next.push_back({tau, root});
                    if (root.kind == RootKind::rational) {
                        // earlier roots may mention tau; keep the trail explicit, drop it where they blow up
                        try {
                            for (size_t q = 0; q + 1 < next.size(); ++q)
                                if (next[q].root.value && next[q].root.value->depends_on(tau))
                                    next[q].root.value = substitute(*next[q].root.value, tau, *root.value);
                        } catch (const SymxError&) {
                            continue;
                        }
                        Matrix M2 = M;
                        bool symbolic = true;
                        try {
                            for (auto& row : M2)
                                for (auto& x : row) x = substitute(x, tau, *root.value);
                        } catch (const SymxError&) {
                            symbolic = false;  // e.g. exp(-1/f1): outside the class, finish numerically
                        }
                        if (symbolic) {
                            run(M2, rest, next);
                            continue;
                        }
                    }
                    if (auto a = analyze(M, rest, {next.back()}); a && a->valid) emit(a->codes, next);
                }
            }
        }
    }
};

const GeneratorAutomorphism& gen_of(const std::vector<GeneratorAutomorphism>& gens, int k) {
    for (auto& g : gens)
        if (g.k == k) return g;
    throw std::invalid_argument("no generator " + std::to_string(k));
}

}  // namespace

std::vector<ImageBranch> image_patterns(const LieAlgebra& alg, const Word& word, const PFamily& fam,
                                        std::uint64_t seed) {
    Matrix img = fam.matrix;
    std::vector<std::string> taus;
    std::vector<int> ks;
    for (auto* g : word) {
        img = matmul(img, transpose(g->matrix));
        taus.push_back(g->time);
        ks.push_back(g->k);
    }
    Search s{alg, fam.coeffs, alg.sampler(seed), {}, ks};
    s.run(img, taus, {});
    return s.out;
}

std::vector<ImageBranch> image_patterns(const LieAlgebra& alg, const GeneratorAutomorphism& gen,
                                        const PFamily& fam, std::uint64_t seed) {
    return image_patterns(alg, Word{&gen}, fam, seed);
}

std::vector<Word> words(const std::vector<GeneratorAutomorphism>& gens, int length) {
    std::vector<Word> out;
    Word cur;
    for (int len = 1; len <= length; ++len) {
        std::function<void()> rec = [&]() {
            if ((int)cur.size() == len) {
                out.push_back(cur);
                return;
            }
            for (auto& g : gens) {
                if (std::find(cur.begin(), cur.end(), &g) != cur.end()) continue;
                cur.push_back(&g);
                rec();
                cur.pop_back();
            }
        };
        rec();
    }
    return out;
}

std::vector<std::vector<bool>> RelationGraph::reach() const {
    int n = vertices.size();
    std::vector<std::vector<bool>> R(n, std::vector<bool>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R[i][j] = i == j || adj[i][j];
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (R[i][k])
                for (int j = 0; j < n; ++j)
                    if (R[k][j]) R[i][j] = true;
    return R;
}

int RelationGraph::index_of(const Codes& c) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].codes == c) return i;
    return -1;
}

RelationGraph build_graph(const LieAlgebra& alg, std::vector<PFamily> vertices,
                          const std::vector<GeneratorAutomorphism>& gens, const BuildOptions& opt) {
    RelationGraph g;
    g.d = vertices.empty() ? 0 : vertices[0].d;
    std::sort(vertices.begin(), vertices.end(),
              [](const PFamily& a, const PFamily& b) { return slex_compare(a, b) < 0; });
    g.vertices = std::move(vertices);
    int n = g.vertices.size();
    g.adj.assign(n, std::vector<int>(n));
    auto ws = words(gens, opt.word_length);
    std::vector<std::vector<Edge>> found(n);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex fail_mutex;
    auto worker = [&]() {
        for (int v; (v = next++) < n;) {
            try {
                for (size_t wi = 0; wi < ws.size(); ++wi) {
                    for (auto& b : image_patterns(alg, ws[wi], g.vertices[v], mix_seed(opt.seed, v, wi))) {
                        int j = g.index_of(b.codes);
                        if (j < 0 || j == v) continue;
                        found[v].push_back({v, j, b.witness});
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    int jobs = std::max(1, std::min(opt.jobs, n));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (int v = 0; v < n; ++v)
        for (auto& e : found[v]) {
            g.adj[e.source][e.target] = 1;
            g.edges.push_back(e);
        }
    return g;
}

RelationGraph build_graph(const LieAlgebra& alg, int d, const std::vector<GeneratorAutomorphism>& gens,
                          const BuildOptions& opt) {
    return build_graph(alg, families_of_dimension(alg, d), gens, opt);
}

std::vector<std::vector<int>> strong_components(const RelationGraph& g) {
    auto R = g.reach();
    int n = R.size();
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(n);
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<int> c;
        for (int j = 0; j < n; ++j)
            if (R[i][j] && R[j][i]) {
                c.push_back(j);
                seen[j] = true;
            }
        out.push_back(c);
    }
    return out;
}

std::vector<std::vector<int>> weak_components(const RelationGraph& g) {
    int n = g.vertices.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g.adj[i][j]) parent[find(i)] = find(j);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [k, v] : groups) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> indegree_raw(const RelationGraph& g) {
    int n = g.vertices.size();
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && g.adj[i][j]) ++out[j];
    return out;
}

std::vector<int> indegree_reach(const RelationGraph& g) {
    auto R = g.reach();
    int n = R.size();
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && R[i][j]) ++out[j];
    return out;
}

std::vector<Selected> select_representatives(const RelationGraph& g, const std::vector<std::vector<int>>& comps,
                                             const std::vector<int>& indegree) {
    std::vector<Selected> out;
    for (size_t c = 0; c < comps.size(); ++c) {
        int best = -1;
        for (int v : comps[c])
            if (best < 0 || indegree[v] > indegree[best] ||
                (indegree[v] == indegree[best] && slex_compare(g.vertices[v], g.vertices[best]) < 0))
                best = v;
        out.push_back({(int)c, best});
    }
    return out;
}

std::vector<bool> rescale(const LieAlgebra& alg, const std::vector<GeneratorAutomorphism>& gens,
                          const PFamily& rep, std::uint64_t seed) {
    int r = alg.dim();
    // diagonal generators with entries exp(lambda_c t)
    std::vector<std::vector<Expr>> rates;
    for (auto& g : gens) {
        bool diag = true;
        std::vector<Expr> lam(r);
        Expr t = Expr::param(g.time, ParamKind::time);
        for (int i = 0; i < r && diag; ++i)
            for (int j = 0; j < r && diag; ++j) {
                const Expr& e = g.matrix[i][j];
                if (i != j) {
                    diag = e.is_structurally_zero();
                    continue;
                }
                if (e.is_structurally_zero()) {
                    diag = false;
                    continue;
                }
                Expr l = differentiate(e, g.time) / e;
                if (l.depends_on(g.time) || !(e - exp(l * t)).is_structurally_zero()) diag = false;
                lam[i] = l;
            }
        if (diag) rates.push_back(lam);
    }
    std::vector<bool> greek(rep.slots.size());
    if (rates.empty()) return greek;
    Sampler s = alg.sampler(seed);
    std::vector<Parameter> ps;
    for (auto& p : alg.params()) ps.push_back({p.name, ParamKind::algebra});
    auto pt = s.point(ps);
    std::vector<std::vector<double>> rows;
    int rank = 0;
    for (size_t n = 0; n < rep.slots.size(); ++n) {
        auto [i, c] = rep.slots[n];
        std::vector<double> row;
        for (auto& lam : rates) row.push_back(evaluate(lam[c] - lam[rep.pivots[i]], pt));
        rows.push_back(row);
        Eigen::MatrixXd m(rows.size(), rates.size());
        for (size_t a = 0; a < rows.size(); ++a)
            for (size_t b = 0; b < rates.size(); ++b) m(a, b) = rows[a][b];
        int nr = svd_rank(m, 1e-9);
        if (nr > rank) {
            greek[n] = true;
            rank = nr;
        } else {
            rows.pop_back();
        }
    }
    return greek;
}

OptimalSystem optimal_system(const LieAlgebra& alg, const SystemOptions& opt) {
    OptimalSystem sys;
    sys.gens = generators(alg, &sys.trivial);
    std::vector<int> dims = opt.dims;
    if (dims.empty())
        for (int d = 1; d < alg.dim(); ++d) dims.push_back(d);
    for (int d : dims) {
        auto t0 = std::chrono::steady_clock::now();
        DimensionResult res;
        res.d = d;
        std::vector<PFamily> verts;
        if (d == 1) {
            verts = enumerate_1d(alg);
        } else {
            auto cs = candidate_shapes(alg, d);
            verts = cs.accepted;
            res.excluded = cs.rejected;
        }
        BuildOptions bo{opt.word_length, mix_seed(opt.seed, 1000 + d), opt.jobs};
        res.graph = build_graph(alg, verts, sys.gens, bo);
        res.graph.d = d;
        res.components =
            opt.components == ComponentMode::strong ? strong_components(res.graph) : weak_components(res.graph);
        res.indeg_raw = indegree_raw(res.graph);
        res.indeg_reach = indegree_reach(res.graph);
        auto sel = select_representatives(res.graph, res.components,
                                          opt.indegree == IndegreeMode::reach ? res.indeg_reach : res.indeg_raw);
        for (auto& s : sel)
            res.reps.push_back({s.vertex, s.component, rescale(alg, sys.gens, res.graph.vertices[s.vertex], opt.seed)});
        std::sort(res.reps.begin(), res.reps.end(),
                  [](const Representative& a, const Representative& b) { return a.vertex < b.vertex; });
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        sys.dims.push_back(std::move(res));
    }
    return sys;
}

Codes numeric_support(std::vector<std::vector<double>> m, double zero_tol) {
    int d = m.size();
    auto piv = rref_numeric(m, 1e-10);
    if ((int)piv.size() < d) return {};
    Codes out;
    for (auto& row : m) {
        unsigned code = 0;
        for (size_t c = 0; c < row.size(); ++c)
            if (std::abs(row[c]) >= zero_tol) code |= 1u << c;
        out.push_back(code);
    }
    return out;
}

OracleResult orbit_oracle_detail(const LieAlgebra& alg, const std::vector<GeneratorAutomorphism>& gens,
                                 const RelationGraph& g, const Edge& e, int trials, std::uint64_t seed) {
    OracleResult res;
    res.trials = trials;
    const PFamily& src = g.vertices[e.source];
    const Codes& want = g.vertices[e.target].codes;
    Sampler s(mix_seed(seed, e.source, e.target), alg.predicate());
    std::set<std::string> bound;
    for (auto& st : e.witness.steps) bound.insert(st.time);
    std::vector<Parameter> ps;
    for (auto& f : src.coeffs) ps.push_back({f, ParamKind::coefficient});
    for (int k : e.witness.word)
        if (!bound.count(time_name(k))) ps.push_back({time_name(k), ParamKind::time});
    for (auto& p : alg.params()) ps.push_back({p.name, ParamKind::algebra});
    for (int trial = 0; trial < trials; ++trial) {
        Codes got;
        bool finite = false;
        for (int attempt = 0; attempt < 50 && !finite; ++attempt) {
            auto env = s.point(ps);
            for (auto it = e.witness.steps.rbegin(); it != e.witness.steps.rend(); ++it) {
                Evaluator<double> ev(env);
                env[it->time] = it->root.evaluate(ev);
            }
            auto F = evaluate_matrix(src.matrix, env);
            for (int k : e.witness.word) {
                auto A = evaluate_matrix(gen_of(gens, k).matrix, env);
                std::vector<std::vector<double>> next(F.size(), std::vector<double>(A.size()));
                for (size_t i = 0; i < F.size(); ++i)
                    for (size_t j = 0; j < A.size(); ++j)
                        for (size_t l = 0; l < A.size(); ++l) next[i][j] += F[i][l] * A[j][l];
                F = next;
            }
            finite = true;
            for (auto& row : F)
                for (double x : row)
                    if (!std::isfinite(x)) finite = false;
            if (finite) got = numeric_support(F);
        }
        if (got == want) {
            ++res.passed;
        } else if (res.ok) {
            res.ok = false;
            res.failure = "trial " + std::to_string(trial) + " reached " + codes_str(got) + " instead of " +
                          codes_str(want);
        }
    }
    return res;
}

bool orbit_oracle(const LieAlgebra& alg, const std::vector<GeneratorAutomorphism>& gens, const RelationGraph& g,
                  const Edge& e, int trials, std::uint64_t seed) {
    return orbit_oracle_detail(alg, gens, g, e, trials, seed).ok;
}

}  // namespace subopt

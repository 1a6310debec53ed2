#include "subopt/families.hpp"

#include <algorithm>
#include <bit>

namespace subopt {

int popcount(unsigned c) { return std::popcount(c); }

int weight(const Codes& codes) {
    int p = 0;
    for (auto c : codes) p += popcount(c);
    return p;
}

int slex_compare(const Codes& x, const Codes& y) {
    int px = weight(x), py = weight(y);
    if (px != py) return px < py ? -1 : 1;
    if (x == y) return 0;
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end()) ? -1 : 1;
}

int slex_compare(const PFamily& x, const PFamily& y) { return slex_compare(x.codes, y.codes); }

std::string codes_str(const Codes& c) {
    if (c.size() == 1) return std::to_string(c[0]);
    std::string s = "(";
    for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + ")";
}

PFamily make_family(int r, std::vector<int> pivots, std::vector<std::pair<int, int>> slots) {
    PFamily f;
    f.r = r;
    f.d = pivots.size();
    f.pivots = std::move(pivots);
    f.slots = std::move(slots);
    f.matrix.assign(f.d, std::vector<Expr>(r));
    f.codes.assign(f.d, 0);
    for (int i = 0; i < f.d; ++i) {
        f.matrix[i][f.pivots[i]] = Expr(1);
        f.codes[i] |= 1u << f.pivots[i];
    }
    for (size_t n = 0; n < f.slots.size(); ++n) {
        auto [i, c] = f.slots[n];
        std::string name = "f" + std::to_string(n + 1);
        f.coeffs.push_back(name);
        f.matrix[i][c] = Expr::param(name, ParamKind::coefficient);
        f.codes[i] |= 1u << c;
    }
    return f;
}

PFamily family_from_codes(int r, const Codes& codes) {
    std::vector<int> piv;
    std::vector<std::pair<int, int>> slots;
    for (auto c : codes) {
        if (c == 0 || c >= (1u << r)) throw std::invalid_argument("code out of range: " + codes_str(codes));
        piv.push_back(std::countr_zero(c));
    }
    for (size_t i = 0; i < codes.size(); ++i) {
        if (i && piv[i] <= piv[i - 1]) throw std::invalid_argument("rows not in echelon order: " + codes_str(codes));
        for (int c = piv[i] + 1; c < r; ++c) {
            if (!(codes[i] >> c & 1)) continue;
            if (std::find(piv.begin(), piv.end(), c) != piv.end())
                throw std::invalid_argument("entry above a pivot: " + codes_str(codes));
            slots.emplace_back(i, c);
        }
    }
    return make_family(r, piv, slots);
}

std::vector<PFamily> enumerate_1d(const LieAlgebra& alg) {
    int r = alg.dim();
    std::vector<PFamily> out;
    for (unsigned c = 1; c < (1u << r); ++c) out.push_back(family_from_codes(r, {c}));
    std::sort(out.begin(), out.end(), [](const PFamily& a, const PFamily& b) { return slex_compare(a, b) < 0; });
    for (auto& f : out) f.lambda.clear();
    return out;
}

ClosureResult closure_check(const LieAlgebra& alg, const PFamily& fam) {
    ClosureResult res;
    int d = fam.d, r = fam.r;
    Sampler s = alg.sampler(0x5EED);
    res.lambda.assign(d, std::vector<std::vector<Expr>>(d, std::vector<Expr>(d)));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            Vector br = bracket(alg, fam.matrix[i], fam.matrix[j]);
            std::vector<Expr> lam(d);
            for (int k = 0; k < d; ++k) lam[k] = br[fam.pivots[k]];
            for (int g = 0; g < r; ++g) {
                Expr resid = br[g];
                for (int k = 0; k < d; ++k)
                    if (!fam.matrix[k][g].is_structurally_zero()) resid -= lam[k] * fam.matrix[k][g];
                if (!is_zero(resid, &s)) {
                    res.ok = false;
                    res.witness = "[row " + std::to_string(i + 1) + ", row " + std::to_string(j + 1) +
                                  "] leaves " + resid.str() + " on Xi" + std::to_string(g + 1);
                    return res;
                }
            }
            for (int k = 0; k < d; ++k) {
                res.lambda[i][j][k] = lam[k];
                res.lambda[j][i][k] = -lam[k];
            }
        }
    return res;
}

CandidateSet candidate_shapes(const LieAlgebra& alg, int d) {
    int r = alg.dim();
    CandidateSet out;
    if (d < 1 || d >= r) return out;
    std::vector<int> piv(d);
    // pivot sets in lexicographic order
    std::function<void(int, int)> rec = [&](int i, int from) {
        if (i == d) {
            std::vector<std::pair<int, int>> slots;
            for (int row = 0; row < d; ++row)
                for (int c = piv[row] + 1; c < r; ++c)
                    if (std::find(piv.begin(), piv.end(), c) == piv.end()) slots.emplace_back(row, c);
            for (unsigned mask = 0; mask < (1u << slots.size()); ++mask) {
                std::vector<std::pair<int, int>> chosen;
                for (size_t q = 0; q < slots.size(); ++q)
                    if (mask >> q & 1) chosen.push_back(slots[q]);
                PFamily f = make_family(r, piv, chosen);
                if (d == 1) {
                    out.accepted.push_back(f);
                    continue;
                }
                auto cl = closure_check(alg, f);
                if (!cl.ok) {
                    out.rejected.push_back({f, "not closed under the bracket: " + cl.witness});
                    continue;
                }
                f.lambda = cl.lambda;
                std::vector<Expr> free;
                for (auto& [row, c] : f.slots) free.push_back(f.matrix[row][c]);
                if (!free.empty() && generic_rank(free, f.coeffs) != (int)free.size()) {
                    out.rejected.push_back({f, "free coefficients are dependent"});
                    continue;
                }
                out.accepted.push_back(f);
            }
            return;
        }
        for (int c = from; c < r; ++c) {
            piv[i] = c;
            rec(i + 1, c + 1);
        }
    };
    rec(0, 0);
    auto less = [](const PFamily& a, const PFamily& b) { return slex_compare(a, b) < 0; };
    std::sort(out.accepted.begin(), out.accepted.end(), less);
    std::sort(out.rejected.begin(), out.rejected.end(),
              [&](const Rejected& a, const Rejected& b) { return less(a.family, b.family); });
    return out;
}

std::vector<PFamily> candidates_nd(const LieAlgebra& alg, int d) { return candidate_shapes(alg, d).accepted; }

std::vector<PFamily> families_of_dimension(const LieAlgebra& alg, int d) {
    return d == 1 ? enumerate_1d(alg) : candidates_nd(alg, d);
}

RrefResult rref_symbolic(const Matrix& m, Sampler* sampler) {
    RrefResult res;
    res.matrix = m;
    Matrix& a = res.matrix;
    int rows = a.size(), cols = rows ? a[0].size() : 0;
    int row = 0;
    for (int c = 0; c < cols && row < rows; ++c) {
        int piv = -1;
        for (int i = row; i < rows; ++i)
            if (!is_zero(a[i][c], sampler)) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[piv], a[row]);
        Expr p = a[row][c];
        if (!p.is_constant()) res.conditions.push_back(p);
        for (int k = 0; k < cols; ++k) a[row][k] = a[row][k] / p;
        for (int i = 0; i < rows; ++i) {
            if (i == row || a[i][c].is_structurally_zero()) continue;
            Expr f = a[i][c];
            for (int k = 0; k < cols; ++k) a[i][k] = a[i][k] - f * a[row][k];
        }
        res.pivots.push_back(c);
        ++row;
    }
    res.rank = row;
    return res;
}

std::string render(const PFamily& fam, const std::vector<bool>* greek) {
    std::string s;
    int latin = 0, gr = 0;
    for (int i = 0; i < fam.d; ++i) {
        if (i) s += ", ";
        s += "Xi" + std::to_string(fam.pivots[i] + 1);
        for (size_t n = 0; n < fam.slots.size(); ++n) {
            if (fam.slots[n].first != i) continue;
            bool g = greek && n < greek->size() && (*greek)[n];
            std::string name = g ? "alpha" + std::to_string(++gr) : "a" + std::to_string(++latin);
            s += "+" + name + " Xi" + std::to_string(fam.slots[n].second + 1);
        }
    }
    return s;
}

}  // namespace subopt

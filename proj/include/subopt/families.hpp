#pragma once

#include "subopt/algebra.hpp"

namespace subopt {

using Codes = std::vector<unsigned>;  // one support code per RREF row

int popcount(unsigned c);
int weight(const Codes& codes);  // p: total number of nonzero slots
// short-lex: p first, then row codes lexicographically
int slex_compare(const Codes& x, const Codes& y);
std::string codes_str(const Codes& c);  // "(5,2)" or "3"

struct PFamily {
    int r = 0, d = 0;
    std::vector<int> pivots;                     // 0-based pivot column per row
    std::vector<std::pair<int, int>> slots;      // (row, col) of each free coefficient
    std::vector<std::string> coeffs;             // f1, f2, ... parallel to slots
    Matrix matrix;                               // d x r, pivots literal 1
    Codes codes;
    // closure constants lambda[i][j][k], possibly coefficient dependent
    std::vector<std::vector<std::vector<Expr>>> lambda;

    int p() const { return weight(codes); }
    int free_count() const { return coeffs.size(); }
};

int slex_compare(const PFamily& x, const PFamily& y);

PFamily make_family(int r, std::vector<int> pivots, std::vector<std::pair<int, int>> slots);
// the family whose rows have exactly these supports (pivot = lowest set bit)
PFamily family_from_codes(int r, const Codes& codes);

std::vector<PFamily> enumerate_1d(const LieAlgebra& alg);

struct ClosureResult {
    bool ok = true;
    std::vector<std::vector<std::vector<Expr>>> lambda;
    std::string witness;
};
ClosureResult closure_check(const LieAlgebra& alg, const PFamily& fam);

struct Rejected {
    PFamily family;
    std::string reason;
};

struct CandidateSet {
    std::vector<PFamily> accepted;
    std::vector<Rejected> rejected;
};

// every RREF shape of dimension d, split by closure and independence rank
CandidateSet candidate_shapes(const LieAlgebra& alg, int d);
std::vector<PFamily> candidates_nd(const LieAlgebra& alg, int d);
// enumerate_1d for d == 1, candidates_nd otherwise
std::vector<PFamily> families_of_dimension(const LieAlgebra& alg, int d);

struct RrefResult {
    Matrix matrix;
    std::vector<int> pivots;
    std::vector<Expr> conditions;  // pivots assumed nonzero
    int rank = 0;
};
RrefResult rref_symbolic(const Matrix& m, Sampler* sampler = nullptr);

// "Xi1+a1 Xi3, Xi2"; greek[n] marks coefficient n as rescalable to +-1
std::string render(const PFamily& fam, const std::vector<bool>* greek = nullptr);

}  // namespace subopt

#pragma once

#include "subopt/algebra.hpp"

namespace subopt {

struct EigenValue {
    Expr re, im;
};

// A_k(t) = exp(-t ad_k): acts on coordinate columns, as in the displayed mappings
struct GeneratorAutomorphism {
    int k = 0;  // 1-based basis index
    std::string time;
    Matrix matrix;
    std::vector<EigenValue> eigen;
    bool trivial = false;
    std::string method;  // identity | nilpotent | diagonal | putzer | override
};

struct ExponentialUnavailable : std::runtime_error {
    explicit ExponentialUnavailable(int k)
        : std::runtime_error("no closed-form exponential for generator " + std::to_string(k)), k(k) {}
    int k;
};

struct VerificationFailed : std::runtime_error {
    VerificationFailed(int k, int row, int col, const std::string& why)
        : std::runtime_error("exponential of generator " + std::to_string(k) + " fails verification at (" +
                             std::to_string(row + 1) + "," + std::to_string(col + 1) + "): " + why),
          k(k), row(row), col(col) {}
    int k, row, col;
};

struct Verification {
    bool ok = true;
    int row = -1, col = -1;
    std::string reason;
    explicit operator bool() const { return ok; }
};

std::string time_name(int k);

// the derivation the generator integrates: X = -ad_k
Matrix generator_derivation(const LieAlgebra& alg, int k);

GeneratorAutomorphism exponentiate(const LieAlgebra& alg, int k);
Verification verify_exponential(const LieAlgebra& alg, const GeneratorAutomorphism& gen);

// non-trivial generators ordered by k; trivial ones are appended to *trivial when given
std::vector<GeneratorAutomorphism> generators(const LieAlgebra& alg, std::vector<int>* trivial = nullptr);

// numeric value of a generator at time t with algebra parameters from env
std::vector<std::vector<double>> evaluate_matrix(const Matrix& m, const std::map<std::string, double>& env);

}  // namespace subopt

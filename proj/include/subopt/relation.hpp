#pragma once

#include "subopt/autgrp.hpp"
#include "subopt/families.hpp"

namespace subopt {

struct WitnessStep {
    std::string time;
    Solution root;
};

// how a generic member of the source reaches the target
struct Witness {
    std::vector<int> word;            // generator indices, first applied first
    std::vector<WitnessStep> steps;   // specialisations in the order they were solved; empty = generic t
    bool generic() const { return steps.empty(); }
    std::string describe() const;
};

struct ImageBranch {
    Codes codes;
    Witness witness;
};

using Word = std::vector<const GeneratorAutomorphism*>;

// image of a generic member of fam under the word, with every special branch found by elimination
std::vector<ImageBranch> image_patterns(const LieAlgebra& alg, const Word& word, const PFamily& fam,
                                        std::uint64_t seed = 0x5EED);
std::vector<ImageBranch> image_patterns(const LieAlgebra& alg, const GeneratorAutomorphism& gen,
                                        const PFamily& fam, std::uint64_t seed = 0x5EED);

// single generators, then ordered tuples of distinct generators up to length
std::vector<Word> words(const std::vector<GeneratorAutomorphism>& gens, int length);

struct Edge {
    int source = 0, target = 0;  // 0-based vertex indices
    Witness witness;
};

struct RelationGraph {
    int d = 0;
    std::vector<PFamily> vertices;  // slex ordered
    std::vector<std::vector<int>> adj;
    std::vector<Edge> edges;        // one per (source, word, target)
    std::vector<std::vector<bool>> reach() const;  // reflexive-transitive closure
    int index_of(const Codes& c) const;
};

struct BuildOptions {
    int word_length = 2;
    std::uint64_t seed = 0x5EED;
    int jobs = 1;
};

RelationGraph build_graph(const LieAlgebra& alg, int d, const std::vector<GeneratorAutomorphism>& gens,
                          const BuildOptions& opt = {});
RelationGraph build_graph(const LieAlgebra& alg, std::vector<PFamily> vertices,
                          const std::vector<GeneratorAutomorphism>& gens, const BuildOptions& opt = {});

// both ordered by smallest member, members ascending
std::vector<std::vector<int>> weak_components(const RelationGraph& g);
std::vector<std::vector<int>> strong_components(const RelationGraph& g);

std::vector<int> indegree_raw(const RelationGraph& g);
std::vector<int> indegree_reach(const RelationGraph& g);

struct Selected {
    int component;
    int vertex;
};
// per component: maximal indegree, then slex-smallest
std::vector<Selected> select_representatives(const RelationGraph& g, const std::vector<std::vector<int>>& comps,
                                             const std::vector<int>& indegree);

// true marks a coefficient rescalable to +-1
std::vector<bool> rescale(const LieAlgebra& alg, const std::vector<GeneratorAutomorphism>& gens,
                          const PFamily& rep, std::uint64_t seed = 0x5EED);

enum class ComponentMode { strong, weak };
enum class IndegreeMode { reach, raw };

struct SystemOptions {
    std::vector<int> dims;  // empty = 1..r-1
    int word_length = 2;
    std::uint64_t seed = 0x5EED;
    int jobs = 1;
    ComponentMode components = ComponentMode::strong;
    IndegreeMode indegree = IndegreeMode::reach;
};

struct Representative {
    int vertex;
    int component;
    std::vector<bool> greek;
};

struct DimensionResult {
    int d = 0;
    RelationGraph graph;
    std::vector<std::vector<int>> components;
    std::vector<int> indeg_raw, indeg_reach;
    std::vector<Representative> reps;
    std::vector<Rejected> excluded;
    double seconds = 0;
};

struct OptimalSystem {
    std::vector<GeneratorAutomorphism> gens;
    std::vector<int> trivial;
    std::vector<DimensionResult> dims;
};

OptimalSystem optimal_system(const LieAlgebra& alg, const SystemOptions& opt = {});

struct OracleResult {
    bool ok = true;
    int trials = 0, passed = 0;
    std::string failure;
};

// numeric replay of the witness with sampled coefficients
OracleResult orbit_oracle_detail(const LieAlgebra& alg, const std::vector<GeneratorAutomorphism>& gens,
                                 const RelationGraph& g, const Edge& e, int trials = 32,
                                 std::uint64_t seed = 0x5EED);
bool orbit_oracle(const LieAlgebra& alg, const std::vector<GeneratorAutomorphism>& gens, const RelationGraph& g,
                  const Edge& e, int trials = 32, std::uint64_t seed = 0x5EED);

// support of the numeric RREF of a numeric matrix; empty when rank deficient
Codes numeric_support(std::vector<std::vector<double>> m, double zero_tol = 1e-9);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace subopt

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subopt/catalog.hpp"
#include "subopt/cli.hpp"
#include "subopt/document.hpp"

namespace py = pybind11;
using namespace subopt;

namespace {

LieAlgebra resolve(const std::string& source, const CatalogEntry** entry) {
    // labels are one line; documents have several or start with "dim"
    if (source.find('\n') != std::string::npos || source.rfind("dim", 0) == 0) return parse_algebra(source);
    *entry = &lookup(source);
    return (*entry)->algebra();
}

std::map<std::string, Rational> to_rationals(const std::map<std::string, std::string>& values) {
    std::map<std::string, Rational> out;
    for (auto& [k, s] : values) {
        Rational v;
        if (v.set_str(s, 10) != 0) throw std::invalid_argument("bad rational for " + k + ": '" + s + "'");
        v.canonicalize();
        out[k] = v;
    }
    return out;
}

struct Run {
    LieAlgebra alg;
    OptimalSystem sys;
    Report rep;
};

std::unique_ptr<Run> run(const std::string& source, std::vector<int> dims, int word_length, std::uint64_t seed,
                         int jobs, const std::string& components, const std::string& indegree, int oracle_trials,
                         const std::map<std::string, std::string>& values) {
    if (components != "strong" && components != "weak") throw std::invalid_argument("components: strong or weak");
    if (indegree != "reach" && indegree != "raw") throw std::invalid_argument("indegree: reach or raw");
    auto r = std::make_unique<Run>();
    const CatalogEntry* entry = nullptr;
    r->alg = resolve(source, &entry);
    if (!values.empty()) r->alg = r->alg.instantiate(to_rationals(values));
    for (int d : dims)
        if (d < 1 || d >= r->alg.dim()) throw std::invalid_argument("dims must lie in 1.." + std::to_string(r->alg.dim() - 1));
    SystemOptions opt;
    opt.dims = dims;
    opt.word_length = word_length;
    opt.seed = seed;
    opt.jobs = jobs;
    opt.components = components == "weak" ? ComponentMode::weak : ComponentMode::strong;
    opt.indegree = indegree == "raw" ? IndegreeMode::raw : IndegreeMode::reach;
    {
        py::gil_scoped_release nogil;
        r->sys = optimal_system(r->alg, opt);
    }
    r->rep.algebra = &r->alg;
    r->rep.system = &r->sys;
    r->rep.options = opt;
    r->rep.oracle_trials = oracle_trials;
    {
        py::gil_scoped_release nogil;
        check_edges(r->rep);
    }
    if (entry) {
        compare_with(r->rep, *entry);
        for (auto& n : entry->notes) r->rep.warnings.push_back("note: " + n);
    }
    return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "optimal systems of p-families of Lie subalgebras";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<AlgebraError>(m, "AlgebraError", PyExc_ValueError);
    py::register_exception<UnknownLabel>(m, "UnknownLabel", PyExc_KeyError);
    py::register_exception<ExponentialUnavailable>(m, "ExponentialUnavailable", PyExc_RuntimeError);

    m.def("labels", [] {
        std::vector<std::string> out;
        for (auto& e : entries()) out.push_back(e.label);
        return out;
    }, "catalog labels in table order");
    m.def("normalize_label", &normalize_label);
    m.def("canonical_label", [](const std::string& s) { return lookup(s).label; });
    m.def("catalog_document", [](const std::string& label) { return serialize_algebra(lookup(label).algebra()); },
          "the catalog algebra as a document");
    m.def("normalize_document", [](const std::string& text) { return serialize_algebra(parse_algebra(text)); },
          "parse and re-serialize; raises on invalid input");

    m.def("report_json",
          [](const std::string& source, std::vector<int> dims, int word_length, std::uint64_t seed, int jobs,
             const std::string& components, const std::string& indegree, int oracle_trials,
             const std::map<std::string, std::string>& values) {
              auto r = run(source, dims, word_length, seed, jobs, components, indegree, oracle_trials, values);
              return report_json(r->rep).dump(2);
          },
          py::arg("source"), py::arg("dims") = std::vector<int>{}, py::arg("word_length") = 2,
          py::arg("seed") = 0x5EED, py::arg("jobs") = 1, py::arg("components") = "strong",
          py::arg("indegree") = "reach", py::arg("oracle_trials") = 32,
          py::arg("values") = std::map<std::string, std::string>{});

    m.def("dot",
          [](const std::string& source, int d, int word_length, std::uint64_t seed) {
              auto r = run(source, {d}, word_length, seed, 1, "strong", "reach", 0, {});
              auto& dr = r->sys.dims.at(0);
              return export_dot(dr.graph, legend_of(dr.graph),
                                r->alg.name() + ", subalgebras of dimension " + std::to_string(d));
          },
          py::arg("source"), py::arg("d"), py::arg("word_length") = 2, py::arg("seed") = 0x5EED);
}

#include "subopt/cli.hpp"

#include "subopt/document.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace subopt {

namespace {

const char* kSchema = "subopt-report/1";

std::string kinds_of(const Representative& r) {
    std::string s;
    for (bool g : r.greek) s += g ? 'g' : 'l';
    return s;
}

std::string braced(const std::string& s) { return "{" + s + "}"; }

std::string component_name(ComponentMode m) { return m == ComponentMode::strong ? "strong" : "weak"; }
std::string indegree_name(IndegreeMode m) { return m == IndegreeMode::reach ? "reach" : "raw"; }

std::string seed_str(std::uint64_t s) {
    std::ostringstream o;
    o << "0x" << std::hex << std::uppercase << s;
    return o.str();
}

}  // namespace

void check_edges(Report& report) {
    const auto& sys = *report.system;
    for (auto& dr : sys.dims) {
        OracleStats& st = report.oracle[dr.d];
        st.edges = dr.graph.edges.size();
        st.trials = report.oracle_trials;
        if (report.oracle_trials <= 0) continue;
        for (auto& e : dr.graph.edges) {
            auto res = orbit_oracle_detail(*report.algebra, sys.gens, dr.graph, e, report.oracle_trials,
                                           report.options.seed);
            ++st.checked;
            if (!res.ok) {
                ++st.failed;
                st.failures.push_back(std::to_string(e.source + 1) + " -> " + std::to_string(e.target + 1) + " (" +
                                      e.witness.describe() + "): " + res.failure);
            }
        }
    }
}

void compare_with(Report& report, const CatalogEntry& entry) {
    for (auto& dr : report.system->dims) {
        const auto& g = dr.graph;
        std::string psi = "Psi^" + std::to_string(dr.d);
        std::map<Codes, std::string> got;
        for (auto& r : dr.reps) got[g.vertices[r.vertex].codes] = kinds_of(r);

        if (auto it = entry.expected.find(dr.d); it != entry.expected.end()) {
            std::set<Codes> want;
            for (auto& f : it->second) want.insert(f.codes);
            std::string missing, extra;
            for (auto& c : want)
                if (!got.count(c)) missing += " " + codes_str(c);
            for (auto& [c, k] : got)
                if (!want.count(c)) extra += " " + codes_str(c);
            if (!missing.empty() || !extra.empty()) {
                report.warnings.push_back(psi + " differs from the reference: missing" +
                                          (missing.empty() ? " none" : missing) + "; extra" +
                                          (extra.empty() ? " none" : extra));
            }
            for (auto& f : it->second) {
                auto gi = got.find(f.codes);
                if (gi == got.end() || f.kinds == "?" || f.kinds == gi->second) continue;
                PFamily fam = family_from_codes(g.vertices[0].r, f.codes);
                report.warnings.push_back(psi + " " + codes_str(f.codes) + " " + braced(render(fam)) +
                                          ": reference coefficient kinds '" + f.kinds + "', computed '" +
                                          gi->second + "' (g = rescalable to +-1, l = arbitrary)");
            }
        }
        if (auto it = entry.required.find(dr.d); it != entry.required.end())
            for (auto& f : it->second) {
                auto gi = got.find(f.codes);
                if (gi == got.end())
                    report.warnings.push_back(psi + " lacks the reference family " + codes_str(f.codes));
                else if (f.kinds != gi->second)
                    report.warnings.push_back(psi + " " + codes_str(f.codes) + ": reference kinds '" + f.kinds +
                                              "', computed '" + gi->second + "'");
            }
        if (auto it = entry.exclusions.find(dr.d); it != entry.exclusions.end())
            for (auto& code : it->second) {
                bool found = false;
                for (auto& rj : dr.excluded)
                    if (codes_str(rj.family.codes) == code) {
                        found = true;
                        report.flagged[dr.d].push_back(code);
                        report.warnings.push_back("excluded " + psi + " shape " + code + " " +
                                                  braced(render(rj.family)) +
                                                  " is not a p-family; the reference's subalgebra of this shape "
                                                  "cannot be represented (" +
                                                  rj.reason + ")");
                    }
                if (!found)
                    report.warnings.push_back("reference exclusion " + code + " was not among the rejected shapes");
            }
        if (auto it = entry.legend.find(dr.d); it != entry.legend.end()) {
            std::vector<Codes> have;
            for (auto& v : g.vertices) have.push_back(v.codes);
            if (have != it->second) report.warnings.push_back(psi + " vertex legend differs from the reference");
        }
    }
}

nlohmann::json report_json(const Report& report) {
    using nlohmann::json;
    const LieAlgebra& alg = *report.algebra;
    const OptimalSystem& sys = *report.system;
    json j;
    j["schema"] = kSchema;
    json a;
    a["name"] = alg.name();
    a["dim"] = alg.dim();
    a["document"] = serialize_algebra(alg);
    j["algebra"] = a;
    j["options"] = {{"word_length", report.options.word_length},
                    {"seed", seed_str(report.options.seed)},
                    {"components", component_name(report.options.components)},
                    {"indegree", indegree_name(report.options.indegree)},
                    {"oracle_trials", report.oracle_trials}};
    json gens = json::array();
    for (auto& g : sys.gens) gens.push_back({{"k", g.k}, {"time", g.time}, {"method", g.method}});
    j["generators"] = gens;
    j["trivial_generators"] = sys.trivial;

    json dims = json::array();
    for (auto& dr : sys.dims) {
        const auto& g = dr.graph;
        json d;
        d["d"] = dr.d;
        json verts = json::array();
        for (size_t i = 0; i < g.vertices.size(); ++i) {
            auto& v = g.vertices[i];
            verts.push_back({{"position", i + 1}, {"code_tuple", v.codes}, {"p", v.p()},
                             {"free", v.free_count()}, {"family", render(v)}});
        }
        d["vertices"] = verts;
        json edges = json::array();
        for (auto& e : g.edges)
            edges.push_back({{"source", e.source + 1}, {"target", e.target + 1}, {"word", e.witness.word},
                             {"witness", e.witness.describe()}});
        d["edges"] = edges;
        json comps = json::array();
        for (auto& c : dr.components) {
            json m = json::array();
            for (int v : c) m.push_back(v + 1);
            comps.push_back(m);
        }
        d["components"] = comps;
        d["indegree_raw"] = dr.indeg_raw;
        d["indegree_reach"] = dr.indeg_reach;
        json reps = json::array();
        for (auto& r : dr.reps) {
            auto& v = g.vertices[r.vertex];
            json coeffs = json::array();
            for (size_t n = 0; n < r.greek.size(); ++n)
                coeffs.push_back({{"index", n + 1}, {"kind", r.greek[n] ? "greek" : "latin"}});
            reps.push_back({{"code_tuple", v.codes}, {"coefficients", coeffs}, {"component_id", r.component},
                            {"position", r.vertex + 1}, {"family", render(v, &r.greek)}});
        }
        d["representatives"] = reps;
        json excl = json::array();
        std::set<std::string> flagged;
        if (auto it = report.flagged.find(dr.d); it != report.flagged.end()) flagged.insert(it->second.begin(), it->second.end());
        for (auto& rj : dr.excluded)
            excl.push_back({{"code_tuple", rj.family.codes}, {"family", render(rj.family)}, {"reason", rj.reason},
                            {"flagged", flagged.count(codes_str(rj.family.codes)) > 0}});
        d["excluded"] = excl;
        if (auto it = report.oracle.find(dr.d); it != report.oracle.end())
            d["oracle"] = {{"edges", it->second.edges}, {"checked", it->second.checked},
                           {"failed", it->second.failed}, {"trials", it->second.trials},
                           {"failures", it->second.failures}};
        dims.push_back(d);
    }
    j["dimensions"] = dims;
    j["warnings"] = report.warnings;
    return j;
}

std::map<int, std::vector<ExpectedFamily>> parse_report(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    if (j.value("schema", "") != kSchema) throw std::runtime_error("not a " + std::string(kSchema) + " document");
    std::map<int, std::vector<ExpectedFamily>> out;
    for (auto& d : j.at("dimensions")) {
        auto& list = out[d.at("d").get<int>()];
        for (auto& r : d.at("representatives")) {
            ExpectedFamily f;
            f.codes = r.at("code_tuple").get<Codes>();
            for (auto& c : r.at("coefficients")) f.kinds += c.at("kind") == "greek" ? 'g' : 'l';
            list.push_back(f);
        }
    }
    return out;
}

std::string report_text(const Report& report) {
    const LieAlgebra& alg = *report.algebra;
    const OptimalSystem& sys = *report.system;
    std::ostringstream o;
    o << std::fixed << std::setprecision(3);
    o << "algebra " << (alg.name().empty() ? "(unnamed)" : alg.name()) << ", dimension " << alg.dim() << "\n";
    std::istringstream doc(serialize_algebra(alg));
    for (std::string line; std::getline(doc, line);)
        if (line.rfind("name ", 0) != 0) o << "  " << line << "\n";
    o << "generators:";
    for (auto& g : sys.gens) o << " A" << g.k << "(" << g.method << ")";
    if (!sys.trivial.empty()) {
        o << "; trivial:";
        for (int k : sys.trivial) o << " A" << k;
    }
    o << "\noptions: word length " << report.options.word_length << ", " << component_name(report.options.components)
      << " components, " << indegree_name(report.options.indegree) << " indegree, seed "
      << seed_str(report.options.seed) << "\n";

    for (auto& dr : sys.dims) {
        const auto& g = dr.graph;
        o << "\nPsi^" << dr.d << " (" << dr.reps.size() << " representatives; " << g.vertices.size() << " families, "
          << g.edges.size() << " edges, " << dr.seconds << " s)\n";
        for (auto& r : dr.reps)
            o << "  " << braced(render(g.vertices[r.vertex], &r.greek)) << "   " << codes_str(g.vertices[r.vertex].codes)
              << "\n";
        o << "  families (position, code, p, raw/reach indegree, component):\n";
        std::vector<int> comp_of(g.vertices.size());
        for (size_t c = 0; c < dr.components.size(); ++c)
            for (int v : dr.components[c]) comp_of[v] = c;
        for (size_t i = 0; i < g.vertices.size(); ++i) {
            auto& v = g.vertices[i];
            o << "    " << std::setw(3) << i + 1 << "  " << std::setw(12) << std::left << codes_str(v.codes)
              << std::right << " p=" << v.p() << "  " << dr.indeg_raw[i] << "/" << dr.indeg_reach[i] << "  c"
              << comp_of[i] << "  " << braced(render(v)) << "\n";
        }
        if (!g.edges.empty()) {
            o << "  edges:\n";
            for (auto& e : g.edges)
                o << "    " << e.source + 1 << " -> " << e.target + 1 << "  " << e.witness.describe() << "\n";
        }
        if (!dr.excluded.empty()) {
            std::set<std::string> flagged;
            if (auto it = report.flagged.find(dr.d); it != report.flagged.end())
                flagged.insert(it->second.begin(), it->second.end());
            o << "  excluded shapes:\n";
            for (auto& rj : dr.excluded)
                o << "    " << codes_str(rj.family.codes) << " " << braced(render(rj.family)) << ": " << rj.reason
                  << (flagged.count(codes_str(rj.family.codes)) ? "  [FLAGGED: listed by the reference]" : "")
                  << "\n";
        }
        if (auto it = report.oracle.find(dr.d); it != report.oracle.end()) {
            auto& st = it->second;
            if (st.trials > 0)
                o << "  oracle: " << st.checked - st.failed << "/" << st.checked << " edges confirmed (" << st.trials
                  << " trials each)\n";
            else
                o << "  oracle: disabled\n";
            for (auto& f : st.failures) o << "    FAIL " << f << "\n";
        }
    }
    if (!report.warnings.empty()) {
        o << "\nwarnings:\n";
        for (auto& w : report.warnings) o << "  - " << w << "\n";
    }
    o << "\ntotal " << report.seconds << " s\n";
    return o.str();
}

std::vector<std::string> legend_of(const RelationGraph& g) {
    std::vector<std::string> out;
    for (auto& v : g.vertices) out.push_back(render(v));
    return out;
}

std::string export_dot(const RelationGraph& g, const std::vector<std::string>& legend, const std::string& title) {
    std::ostringstream o;
    if (!title.empty()) o << "// " << title << "\n";
    o << "// legend\n";
    for (size_t i = 0; i < legend.size(); ++i) o << "//   " << i + 1 << " -> {" << legend[i] << "}\n";
    o << "digraph G {\n";
    int n = g.vertices.size();
    for (int i = 0; i < n; ++i) o << "  " << i + 1 << ";\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || !g.adj[i][j]) continue;
            if (g.adj[j][i]) {
                if (i < j) o << "  " << i + 1 << " -> " << j + 1 << " [dir=both];\n";
            } else {
                o << "  " << i + 1 << " -> " << j + 1 << ";\n";
            }
        }
    o << "}\n";
    return o.str();
}

namespace {

std::string slug(const std::string& name) {
    std::string s = normalize_label(name.empty() ? "algebra" : name), out;
    for (char c : s) out += std::isalnum((unsigned char)c) ? c : (c == '+' ? 'p' : '_');
    return out;
}

std::map<std::string, Rational> parse_assignments(const std::vector<std::string>& items) {
    std::map<std::string, Rational> out;
    for (auto& it : items) {
        auto eq = it.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected NAME=VALUE, got '" + it + "'");
        Rational v;
        if (v.set_str(it.substr(eq + 1), 10) != 0) throw std::invalid_argument("bad rational in '" + it + "'");
        v.canonicalize();
        out[it.substr(0, eq)] = v;
    }
    return out;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"optimal systems of p-families of Lie subalgebras"};
    std::string catalog, algebra_path, dot_dir, report_path, text_path, components = "strong", indegree = "reach";
    std::vector<int> dims;
    std::vector<std::string> sets;
    int word_length = 2, oracle_trials = 32, jobs = 1;
    std::uint64_t seed = 0x5EED;
    bool list = false, quiet = false;
    auto* src = app.add_option_group("source");
    src->add_option("--catalog", catalog, "built-in algebra label, e.g. A_{3,8}");
    src->add_option("--algebra", algebra_path, "algebra document file");
    src->add_flag("--list", list, "list catalog labels");
    src->require_option(1);
    app.add_option("--dims", dims, "subalgebra dimensions (default 1..r-1)")->delimiter(',');
    app.add_option("--word-length", word_length, "longest automorphism word")->check(CLI::Range(1, 8));
    app.add_option("--seed", seed, "sampling seed (SUBOPT_SEED overrides)");
    app.add_option("--set", sets, "instantiate a parameter, NAME=p/q")->delimiter(',');
    app.add_option("--dot", dot_dir, "write one DOT graph per dimension into this directory");
    app.add_option("--report", report_path, "write the JSON report here");
    app.add_option("--text", text_path, "write the text report here instead of stdout");
    app.add_option("--oracle-trials", oracle_trials, "numeric replays per edge (0 disables)")->check(CLI::NonNegativeNumber);
    app.add_option("--jobs", jobs, "parallel edge discovery")->check(CLI::Range(1, 256));
    app.add_option("--components", components, "strong or weak")->check(CLI::IsMember({"strong", "weak"}));
    app.add_option("--indegree", indegree, "reach or raw")->check(CLI::IsMember({"reach", "raw"}));
    app.add_flag("--quiet", quiet, "no text report on stdout");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (const char* env = std::getenv("SUBOPT_SEED")) {
        try {
            seed = std::stoull(env, nullptr, 0);
        } catch (const std::exception&) {
            std::cerr << "error: SUBOPT_SEED is not an integer: " << env << "\n";
            return 2;
        }
    }
    if (list) {
        for (auto& e : entries()) std::cout << e.label << "\n";
        return 0;
    }

    try {
        auto t0 = std::chrono::steady_clock::now();
        const CatalogEntry* entry = nullptr;
        LieAlgebra alg;
        if (!catalog.empty()) {
            entry = &lookup(catalog);
            alg = entry->algebra();
        } else {
            std::ifstream in(algebra_path);
            if (!in) {
                std::cerr << "error: cannot read " << algebra_path << "\n";
                return 2;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            alg = parse_algebra(ss.str());
            if (alg.name().empty()) alg.set_name(std::filesystem::path(algebra_path).stem().string());
        }
        if (!sets.empty()) alg = alg.instantiate(parse_assignments(sets));
        for (int d : dims)
            if (d < 1 || d >= alg.dim()) {
                std::cerr << "error: --dims must lie in 1.." << alg.dim() - 1 << "\n";
                return 2;
            }

        SystemOptions opt;
        opt.dims = dims;
        opt.word_length = word_length;
        opt.seed = seed;
        opt.jobs = jobs;
        opt.components = components == "weak" ? ComponentMode::weak : ComponentMode::strong;
        opt.indegree = indegree == "raw" ? IndegreeMode::raw : IndegreeMode::reach;
        OptimalSystem sys = optimal_system(alg, opt);

        Report rep;
        rep.algebra = &alg;
        rep.system = &sys;
        rep.options = opt;
        rep.oracle_trials = oracle_trials;
        check_edges(rep);
        if (entry) {
            compare_with(rep, *entry);
            for (auto& n : entry->notes) rep.warnings.push_back("note: " + n);
        }
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (!dot_dir.empty()) {
            std::filesystem::create_directories(dot_dir);
            for (auto& dr : sys.dims) {
                auto path = std::filesystem::path(dot_dir) / (slug(alg.name()) + "_d" + std::to_string(dr.d) + ".dot");
                std::ofstream(path) << export_dot(dr.graph, legend_of(dr.graph),
                                                  alg.name() + ", subalgebras of dimension " + std::to_string(dr.d));
            }
        }
        if (!report_path.empty()) {
            auto parent = std::filesystem::path(report_path).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            std::ofstream(report_path) << report_json(rep).dump(2) << "\n";
        }
        std::string text = report_text(rep);
        if (!text_path.empty())
            std::ofstream(text_path) << text;
        else if (!quiet)
            std::cout << text;

        int failed = 0;
        for (auto& [d, st] : rep.oracle) failed += st.failed;
        if (failed) {
            std::cerr << "error: " << failed << " edge(s) failed the numeric oracle\n";
            return 1;
        }
        return 0;
    } catch (const ExponentialUnavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const JacobiViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const AlgebraError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownLabel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace subopt

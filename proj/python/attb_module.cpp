#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "attb/cli.hpp"
#include "attb/deviations.hpp"
#include "attb/hori.hpp"
#include "attb/ktheory.hpp"

namespace py = pybind11;
using namespace attb;

namespace {

IntMatrix matrix_from_py(const std::vector<std::vector<long>>& rows) {
    if (rows.empty()) return IntMatrix(0, 0);
    IntMatrix m(int(rows.size()), int(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw std::invalid_argument("ragged matrix");
        for (size_t j = 0; j < rows[i].size(); ++j) m.at(int(i), int(j)) = Int(rows[i][j]);
    }
    return m;
}

std::vector<std::vector<long>> matrix_to_py(const IntMatrix& m) {
    std::vector<std::vector<long>> out(m.rows(), std::vector<long>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[i][j] = m.at(i, j).get_si();
    return out;
}

py::dict group_to_py(const FgAbGroup& g) {
    py::dict d;
    d["free_rank"] = g.free_rank;
    std::vector<long> fac;
    for (const Int& f : g.invariant_factors) fac.push_back(f.get_si());
    d["invariant_factors"] = fac;
    d["canonical"] = g.to_string();
    return d;
}

LocalSystem system_from_py(const std::string& base_kind, int dim,
                           const std::vector<std::vector<std::vector<long>>>& monodromies,
                           long fiber_degree) {
    BaseSpace base;
    if (base_kind == "torus") base = Torus{dim};
    else if (base_kind == "mapping_torus") base = MappingTorus{FiberModel::sphere(dim, fiber_degree)};
    else throw std::invalid_argument("base_kind must be 'torus' or 'mapping_torus'");
    std::vector<IntMatrix> mono;
    for (const auto& m : monodromies) mono.push_back(matrix_from_py(m));
    if (mono.empty()) throw std::invalid_argument("need at least one monodromy matrix");
    LocalSystem sys{mono[0].rows(), base, mono};
    auto diag = validate(sys);
    if (!diag.ok) throw std::invalid_argument("invalid local system: " + diag.issues.front());
    return sys;
}

}  // namespace

PYBIND11_MODULE(_attb, m) {
    m.doc() = "affine torus bundle workbench: exact cohomology, spectral sequences, "
              "T-duality and twisted K-theory";

    m.def("smith_normal_form",
          [](const std::vector<std::vector<long>>& rows) {
              SmithResult s = smith_normal_form(matrix_from_py(rows));
              py::dict d;
              d["U"] = matrix_to_py(s.U);
              d["D"] = matrix_to_py(s.D);
              d["V"] = matrix_to_py(s.V);
              d["rank"] = s.rank;
              return d;
          },
          py::arg("matrix"), "U*A*V = D with U, V unimodular and D in divisibility order");

    m.def("cokernel",
          [](const std::vector<std::vector<long>>& rows) {
              return group_to_py(cokernel(matrix_from_py(rows)));
          },
          py::arg("matrix"));

    m.def("kernel_lattice",
          [](const std::vector<std::vector<long>>& rows) {
              return matrix_to_py(kernel_lattice(matrix_from_py(rows)));
          },
          py::arg("matrix"));

    m.def("cohomology",
          [](const std::string& base_kind, int dim,
             const std::vector<std::vector<std::vector<long>>>& monodromies, long fiber_degree) {
              LocalSystem sys = system_from_py(base_kind, dim, monodromies, fiber_degree);
              py::list out;
              for (const auto& g : cohomology_groups(sys)) out.append(group_to_py(g));
              return out;
          },
          py::arg("base_kind"), py::arg("dim"), py::arg("monodromies"),
          py::arg("fiber_degree") = -1,
          "H^*(M, Lambda) for a local system over a torus or sphere mapping torus");

    m.def("total_cohomology",
          [](const std::string& family, long j) {
              auto fam = catalog::family_by_name(family);
              auto tot = total_cohomology(final_page(fam.bundle(j)), ExtensionPolicy::Split);
              py::list out;
              for (const auto& g : tot.assembled) out.append(group_to_py(g));
              return out;
          },
          py::arg("family"), py::arg("j"));

    m.def("dualize_pair",
          [](const std::string& family, long j, long k) {
              auto fam = catalog::family_by_name(family);
              AffineBundle b = fam.bundle(j);
              DualPair p = dualize(b, fam.flux(b, k));
              LocalSystem dual_sys = dual(b.lambda);
              BaseModel dual_mod(b.base(), dual_sys.rank, dual_sys.monodromies);
              BaseModel lam_mod(b.base(), b.lambda.rank, b.lambda.monodromies);
              py::dict d;
              d["dual_chern"] = dual_mod.cohomology(2).coordinates(p.dual_bundle.chern_rep)[0].get_si();
              d["dual_flux"] = lam_mod.cohomology(2).coordinates(p.dual_flux.k_rep)[0].get_si();
              d["relations_pass"] = p.report.all_pass();
              return d;
          },
          py::arg("family"), py::arg("j"), py::arg("k"));

    m.def("normal_form",
          [](long j, long k) {
              NormalFormResult r = normal_form({j, k});
              py::dict d;
              d["pair"] = py::make_tuple(r.pair.j, r.pair.k);
              d["moves"] = long(r.moves.size());
              return d;
          },
          py::arg("j"), py::arg("k"), "Euclidean reduction of (j, k) by swap/shift moves");

    m.def("twisted_k",
          [](const std::string& family, long j, long k) {
              auto fam = catalog::family_by_name(family);
              KTableCell cell = ktable_cell(fam, j, k);
              py::dict d;
              d["undetermined"] = cell.undetermined;
              if (!cell.undetermined) {
                  d["K0"] = group_to_py(cell.resolved.k0);
                  d["K1"] = group_to_py(cell.resolved.k1);
                  d["K0_split"] = group_to_py(cell.raw.k0);
                  d["K1_split"] = group_to_py(cell.raw.k1);
                  d["resolved_by_moves"] = cell.resolved_by_moves;
              }
              return d;
          },
          py::arg("family"), py::arg("j"), py::arg("k"));

    m.def("hori_selftest",
          [](unsigned seed, long models, long pairs) {
              HoriSelfTestOptions opt;
              opt.seed = seed;
              opt.min_models = models;
              opt.mukai_pairs = pairs;
              HoriSelfTestReport r = hori_selftest(opt);
              py::dict d;
              d["all_pass"] = r.all_pass();
              d["models_tested"] = r.models_tested;
              d["mukai_pairs_tested"] = r.mukai_pairs_tested;
              return d;
          },
          py::arg("seed") = 2024, py::arg("models") = 24, py::arg("pairs") = 120);

    m.def("deviations",
          [](const std::string& ledger_path) {
              DeviationReport rep =
                  check_deviations(ledger_path.empty() ? default_ledger_path() : ledger_path);
              py::list out;
              for (const auto& d : rep.deviations) {
                  py::dict e;
                  e["object"] = d.cell.object;
                  e["printed"] = d.cell.printed;
                  e["derived"] = d.derived;
                  e["justification"] = d.cell.justification;
                  out.append(e);
              }
              py::dict top;
              top["deviations"] = out;
              top["errors"] = rep.errors;
              top["ok"] = rep.ok();
              return top;
          },
          py::arg("ledger_path") = std::string());

    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              auto r = cli::run(args);
              return py::make_tuple(r.exit_code, r.output);
          },
          py::arg("args"), "drive the command-line front end in-process");
}

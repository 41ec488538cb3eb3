#include "attb/cli.hpp"

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "attb/deviations.hpp"
#include "attb/hori.hpp"
#include "attb/ktheory.hpp"

namespace attb::cli {

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& w) : std::runtime_error(w) {}
};

struct FluxParts {
    std::vector<int> xi;
    std::vector<Int> k, h3;
};

struct WorkbenchConfig {
    std::optional<LocalSystem> system;
    std::optional<std::vector<Int>> chern;
    std::optional<FluxParts> flux;
    std::optional<std::string> family;
    std::optional<std::pair<long, long>> pair;
    std::array<long, 2> jrange{0, 6};
    std::array<long, 2> krange{0, 6};
    json raw;  // effective config echoed into JSON output
};

struct Options {
    std::string format = "text";
    bool strict = false;
    bool quiet = false;
    unsigned seed = 2024;
    long models = 200;
    long pairs = 1000;
    std::string out_path;
    std::string config_path;
    std::string orbit;
    std::string pair_arg;
    std::string family_arg;
    std::string ledger_path;
};

[[noreturn]] void cfg_fail(const std::string& field, const std::string& what) {
    throw ConfigError("config." + field + ": " + what);
}

IntMatrix parse_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) cfg_fail(field, "expected a matrix");
    int rows = int(j.size()), cols = int(j[0].size());
    IntMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (!j[r].is_array() || int(j[r].size()) != cols) cfg_fail(field, "ragged matrix");
        for (int c = 0; c < cols; ++c) {
            if (!j[r][c].is_number_integer()) cfg_fail(field, "matrix entries must be integers");
            m.at(r, c) = Int(j[r][c].get<long>());
        }
    }
    return m;
}

std::vector<Int> parse_int_vector(const json& j, const std::string& field) {
    if (!j.is_array()) cfg_fail(field, "expected an array of integers");
    std::vector<Int> v;
    for (const auto& x : j) {
        if (!x.is_number_integer()) cfg_fail(field, "expected integers");
        v.emplace_back(x.get<long>());
    }
    return v;
}

BaseSpace parse_base(const json& j) {
    if (!j.is_object()) cfg_fail("base", "expected an object");
    std::string type = j.value("type", "");
    if (type == "torus") {
        int dim = j.value("dim", 0);
        if (dim < 1) cfg_fail("base.dim", "expected a positive integer");
        return Torus{dim};
    }
    if (type == "mapping_torus") {
        if (!j.contains("fiber")) cfg_fail("base.fiber", "missing");
        const json& f = j["fiber"];
        std::string kind = f.value("kind", "");
        if (kind != "sphere") cfg_fail("base.fiber.kind", "only 'sphere' fibers are supported");
        int dim = f.value("dim", 0);
        if (dim < 1) cfg_fail("base.fiber.dim", "expected a positive integer");
        long degree = f.value("degree", 1);
        if (degree != 1 && degree != -1)
            cfg_fail("base.fiber.degree", "a sphere endomorphism acts by +1 or -1 on top degree");
        return MappingTorus{FiberModel::sphere(dim, degree)};
    }
    cfg_fail("base.type", "expected 'torus' or 'mapping_torus'");
}

WorkbenchConfig parse_config(const json& j) {
    WorkbenchConfig cfg;
    cfg.raw = j;
    if (j.contains("family")) {
        if (!j["family"].is_string()) cfg_fail("family", "expected a string");
        cfg.family = j["family"].get<std::string>();
        try {
            catalog::family_by_name(*cfg.family);
        } catch (const std::exception&) {
            cfg_fail("family", "unknown family '" + *cfg.family + "'");
        }
    }
    if (j.contains("base") || j.contains("monodromies")) {
        if (!j.contains("base")) cfg_fail("base", "missing (monodromies given)");
        if (!j.contains("monodromies")) cfg_fail("monodromies", "missing (base given)");
        BaseSpace base = parse_base(j["base"]);
        const json& ms = j["monodromies"];
        if (!ms.is_array() || ms.empty()) cfg_fail("monodromies", "expected a nonempty array");
        std::vector<IntMatrix> mono;
        for (size_t i = 0; i < ms.size(); ++i)
            mono.push_back(parse_matrix(ms[i], "monodromies[" + std::to_string(i) + "]"));
        int rank = mono[0].rows();
        for (const auto& m : mono)
            if (m.rows() != rank || m.cols() != rank)
                cfg_fail("monodromies", "all matrices must be square of equal size");
        if (int(mono.size()) != base_generator_count(base))
            cfg_fail("monodromies", "expected " + std::to_string(base_generator_count(base)) +
                                        " matrices for this base");
        LocalSystem sys{rank, base, mono};
        auto diag = validate(sys);
        if (!diag.ok) cfg_fail("monodromies", diag.issues.front());
        cfg.system = sys;
    }
    if (j.contains("chern")) cfg.chern = parse_int_vector(j["chern"], "chern");
    if (j.contains("flux")) {
        const json& f = j["flux"];
        if (!f.is_object()) cfg_fail("flux", "expected an object");
        FluxParts parts;
        if (f.contains("xi")) {
            for (const auto& b : f["xi"]) {
                if (!b.is_number_integer()) cfg_fail("flux.xi", "expected 0/1 entries");
                parts.xi.push_back(int(b.get<long>()) % 2);
            }
        }
        parts.k = parse_int_vector(f.value("k", json::array()), "flux.k");
        parts.h3 = parse_int_vector(f.value("h3", json::array()), "flux.h3");
        cfg.flux = parts;
    }
    if (j.contains("pair")) {
        auto v = parse_int_vector(j["pair"], "pair");
        if (v.size() != 2) cfg_fail("pair", "expected [j, k]");
        cfg.pair = {v[0].get_si(), v[1].get_si()};
    }
    for (const char* key : {"jrange", "krange"}) {
        if (!j.contains(key)) continue;
        auto v = parse_int_vector(j[key], key);
        if (v.size() != 2) cfg_fail(key, "expected [lo, hi]");
        if (std::string(key) == "jrange") cfg.jrange = {v[0].get_si(), v[1].get_si()};
        else cfg.krange = {v[0].get_si(), v[1].get_si()};
    }
    return cfg;
}

WorkbenchConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

LocalSystem system_of(const WorkbenchConfig& cfg) {
    if (cfg.system) return *cfg.system;
    if (cfg.family) return catalog::family_by_name(*cfg.family).lambda;
    throw ConfigError("config: need either base+monodromies or a family");
}

AffineBundle bundle_of(const WorkbenchConfig& cfg) {
    LocalSystem sys = system_of(cfg);
    if (cfg.chern) return make_bundle(sys, *cfg.chern);
    if (cfg.pair) return make_bundle(sys, {Int(cfg.pair->first)});
    throw ConfigError("config.chern: missing");
}

FluxDatum flux_of(const WorkbenchConfig& cfg, const AffineBundle& b) {
    int gens = base_generator_count(b.base());
    if (cfg.flux) {
        Z2Class xi = Z2Class::zero(gens);
        if (!cfg.flux->xi.empty()) {
            if (int(cfg.flux->xi.size()) != gens)
                throw ConfigError("config.flux.xi: expected " + std::to_string(gens) + " bits");
            xi.bits = cfg.flux->xi;
        }
        return make_flux(b, xi, cfg.flux->k, cfg.flux->h3);
    }
    if (cfg.pair) {
        std::vector<Int> h3;
        if (base_dim(b.base()) >= 3) {
            BaseModel triv(b.base(), 1, trivial_system(b.base(), 1).monodromies);
            size_t n = size_t(triv.cohomology(3).group().free_rank) +
                       triv.cohomology(3).group().invariant_factors.size();
            h3.assign(n, Int(0));
        }
        return make_flux(b, Z2Class::zero(gens), {Int(cfg.pair->second)}, h3);
    }
    throw ConfigError("config.flux: missing");
}

/* ---------- output helpers ---------- */

struct TextTable {
    std::string title;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

void render_text(std::ostream& os, const TextTable& t) {
    os << t.title << "\n";
    std::vector<size_t> width(t.headers.size(), 0);
    for (size_t c = 0; c < t.headers.size(); ++c) width[c] = t.headers[c].size();
    for (const auto& row : t.rows)
        for (size_t c = 0; c < row.size() && c < width.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    auto line = [&](const std::vector<std::string>& cells) {
        os << "  ";
        for (size_t c = 0; c < cells.size(); ++c) {
            os << cells[c];
            if (c + 1 < cells.size()) os << std::string(width[c] - cells[c].size() + 2, ' ');
        }
        os << "\n";
    };
    line(t.headers);
    for (const auto& row : t.rows) line(row);
}

void render_csv(std::ostream& os, const TextTable& t) {
    auto esc = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char ch : s) out += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
        return out + "\"";
    };
    os << "# " << t.title << "\n";
    for (size_t c = 0; c < t.headers.size(); ++c)
        os << esc(t.headers[c]) << (c + 1 < t.headers.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (size_t c = 0; c < row.size(); ++c) os << esc(row[c]) << (c + 1 < row.size() ? "," : "\n");
}

json group_json(const FgAbGroup& g) {
    json j;
    j["free_rank"] = g.free_rank;
    j["invariant_factors"] = json::array();
    for (const Int& d : g.invariant_factors) j["invariant_factors"].push_back(d.get_si());
    j["canonical"] = g.to_string();
    return j;
}

struct CommandOutput {
    std::vector<TextTable> tables;
    std::vector<std::string> notes;
    json body;  // structured result
    bool undetermined = false;
};

std::string finalize(const CommandOutput& out, const Options& opt, const std::string& command,
                     const json& config_echo) {
    std::ostringstream os;
    if (opt.format == "json") {
        json j;
        j["command"] = command;
        j["config"] = config_echo;
        j["result"] = out.body;
        if (!out.notes.empty()) j["notes"] = out.notes;
        os << j.dump(2) << "\n";
    } else if (opt.format == "csv") {
        for (const auto& t : out.tables) render_csv(os, t);
        if (!opt.quiet)
            for (const auto& n : out.notes) os << "# " << n << "\n";
    } else {
        for (const auto& t : out.tables) {
            render_text(os, t);
            os << "\n";
        }
        if (!opt.quiet)
            for (const auto& n : out.notes) os << "note: " << n << "\n";
    }
    return os.str();
}

/* deviation-ledger annotations for a set of evaluator keys */
void annotate_deviations(CommandOutput& out, const Options& opt,
                         const std::vector<std::string>& prefixes) {
    if (opt.quiet) return;
    std::string path = opt.ledger_path.empty() ? default_ledger_path() : opt.ledger_path;
    std::vector<DeviationCell> cells;
    try {
        cells = load_ledger(path);
    } catch (const std::exception& e) {
        out.notes.push_back(std::string("deviation ledger unavailable: ") + e.what());
        return;
    }
    for (const auto& cell : cells) {
        if (!cell.expect_deviation) continue;
        bool relevant = false;
        for (const auto& p : prefixes)
            if (cell.object.rfind(p, 0) == 0) relevant = true;
        if (!relevant) continue;
        out.notes.push_back("deviation vs published table [" + cell.object + ", " +
                            cell.location + "]: printed " + cell.printed + "; derived " +
                            evaluate_object(cell.object) + ". " + cell.justification);
    }
}

/* ---------- commands ---------- */

CommandOutput cmd_cohomology(const WorkbenchConfig& cfg, const Options& opt) {
    CommandOutput out;
    LocalSystem sys = system_of(cfg);
    LocalSystem dual_sys = dual(sys);
    int dim = base_dim(sys.base);

    TextTable t;
    t.title = "cohomology of " + base_name(sys.base) + " (system rank " +
              std::to_string(sys.rank) + ")";
    t.headers = {"i", "H^i(M,Z)", "H^i(M,Lambda)", "H^i(M,Lambda*)"};
    auto gz = cohomology_groups(trivial_system(sys.base, 1));
    auto gl = cohomology_groups(sys);
    auto gd = cohomology_groups(dual_sys);
    json rows = json::array();
    for (int i = 0; i <= dim; ++i) {
        t.rows.push_back({std::to_string(i), gz[i].to_string(), gl[i].to_string(),
                          gd[i].to_string()});
        json r;
        r["i"] = i;
        r["HZ"] = group_json(gz[i]);
        r["HL"] = group_json(gl[i]);
        r["HLdual"] = group_json(gd[i]);
        rows.push_back(r);
    }
    out.tables.push_back(t);
    out.body["degrees"] = rows;
    out.body["euler_characteristic"] = euler_characteristic(gl);

    if (cfg.family) annotate_deviations(out, opt, {*cfg.family + ".HM"});
    return out;
}

CommandOutput cmd_bundle(const WorkbenchConfig& cfg, const Options& opt) {
    CommandOutput out;
    AffineBundle b = bundle_of(cfg);
    SpectralPage p2 = e2_page(b);
    SpectralPage fin = e_infinity(b, apply_d2(b, p2));
    auto od = orientation_data(b);
    TotalCohomology tot =
        total_cohomology(fin, ExtensionPolicy::Split, od.total_orientable);
    out.undetermined = tot.undetermined;

    TextTable pages;
    pages.title = "E2 and E-infinity pages (p across, q down)";
    pages.headers = {"q\\p"};
    for (int p = 0; p <= p2.pmax; ++p) pages.headers.push_back(std::to_string(p));
    for (int q = p2.qmax; q >= 0; --q) {
        std::vector<std::string> row{std::to_string(q)};
        for (int p = 0; p <= p2.pmax; ++p) {
            std::string cell = p2.group(p, q).to_string() + " -> " + fin.group(p, q).to_string();
            if (fin.at(p, q).undetermined) cell += " (?)";
            row.push_back(cell);
        }
        pages.rows.push_back(row);
    }
    out.tables.push_back(pages);

    TextTable ht;
    ht.title = "total-space cohomology (Split policy)";
    ht.headers = {"i", "H^i(X)", "pieces (deepest first)", "flags"};
    json degrees = json::array();
    for (size_t i = 0; i < tot.assembled.size(); ++i) {
        std::string pieces;
        json jp = json::array();
        for (const auto& piece : tot.pieces[i]) {
            pieces += (pieces.empty() ? "" : " | ") + piece.group.to_string();
            json pj;
            pj["p"] = piece.p;
            pj["q"] = piece.q;
            pj["group"] = group_json(piece.group);
            jp.push_back(pj);
        }
        std::string flags = tot.extension_ambiguous[i] ? "extension-ambiguous" : "";
        ht.rows.push_back({std::to_string(i), tot.assembled[i].to_string(),
                           pieces.empty() ? "-" : pieces, flags.empty() ? "-" : flags});
        json dj;
        dj["i"] = int(i);
        dj["assembled"] = group_json(tot.assembled[i]);
        dj["pieces"] = jp;
        dj["extension_ambiguous"] = bool(tot.extension_ambiguous[i]);
        degrees.push_back(dj);
    }
    out.tables.push_back(ht);
    out.body["total_cohomology"] = degrees;
    out.body["undetermined"] = tot.undetermined;
    out.body["orientation"] = {{"w1_vertical", od.w1_vertical.to_string()},
                               {"w1_base", od.w1_base.to_string()},
                               {"total_orientable", od.total_orientable}};
    if (tot.undetermined)
        out.notes.push_back(
            "page carries an Undetermined flag: a higher differential has no prescription");
    if (cfg.family) annotate_deviations(out, opt, {*cfg.family + ".HX"});
    return out;
}

CommandOutput cmd_dualize(const WorkbenchConfig& cfg, const Options& opt) {
    CommandOutput out;
    AffineBundle b = bundle_of(cfg);
    FluxDatum f = flux_of(cfg, b);
    DualPair pair = dualize(b, f, opt.strict);

    BaseModel lam_mod(b.base(), b.lambda.rank, b.lambda.monodromies);
    BaseModel dual_mod(b.base(), b.lambda.rank, pair.dual_bundle.lambda.monodromies);
    auto chern_coords = lam_mod.cohomology(2).coordinates(b.chern_rep);
    auto chat_coords = dual_mod.cohomology(2).coordinates(pair.dual_bundle.chern_rep);
    auto khat_coords = lam_mod.cohomology(2).coordinates(pair.dual_flux.k_rep);

    auto coords_str = [](const std::vector<Int>& v) {
        std::string s = "(";
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
        return s + ")";
    };
    TextTable t;
    t.title = "T-dual pair";
    t.headers = {"side", "chern", "flux k", "certificate", "xi", "h3"};
    auto h3s = coords_str(f.h3_coords);
    auto cert = is_dualizable(b, f);
    auto dual_mod2 = flux_certificate_space(pair.dual_bundle);
    t.rows.push_back({"primal", coords_str(chern_coords),
                      coords_str(BaseModel(b.base(), b.lambda.rank,
                                           dual(b.lambda).monodromies)
                                     .cohomology(2)
                                     .coordinates(f.k_rep)),
                      coords_str(cert.certificate), f.xi.to_string(), h3s});
    t.rows.push_back({"dual", coords_str(chat_coords), coords_str(khat_coords),
                      coords_str(dual_mod2.coordinates(pair.dual_flux.k_rep)),
                      pair.dual_flux.xi.to_string(), coords_str(pair.dual_flux.h3_coords)});
    out.tables.push_back(t);

    TextTable rel;
    rel.title = "exchange relations";
    rel.headers = {"relation", "status"};
    auto pf = [](bool b2) { return b2 ? std::string("pass") : std::string("FAIL"); };
    rel.rows.push_back({"xi-hat = xi + w1", pf(pair.report.xi_transport)});
    rel.rows.push_back({"c cup c-hat = 0", pf(pair.report.c_cup_chat_zero)});
    rel.rows.push_back({"[h] = [c-hat]", pf(pair.report.h_equals_chat)});
    rel.rows.push_back({"[h-hat] = [c]", pf(pair.report.hhat_equals_c)});
    out.tables.push_back(rel);

    out.body["dualizable"] = cert.dualizable;
    json cj = json::array();
    for (const auto& v : cert.certificate) cj.push_back(v.get_si());
    out.body["certificate"] = cj;
    out.body["relations"] = {{"xi_transport", pair.report.xi_transport},
                             {"c_cup_chat_zero", pair.report.c_cup_chat_zero},
                             {"h_equals_chat", pair.report.h_equals_chat},
                             {"hhat_equals_c", pair.report.hhat_equals_c},
                             {"all_pass", pair.report.all_pass()}};
    out.body["involution"] = involution_check(b, f);
    for (const auto& n : pair.report.notes) out.notes.push_back(n);
    return out;
}

CommandOutput cmd_hori_selftest(const Options& opt) {
    CommandOutput out;
    HoriSelfTestOptions ho;
    ho.seed = opt.seed;
    ho.min_models = opt.models;
    ho.mukai_pairs = opt.pairs;
    HoriSelfTestReport rep = hori_selftest(ho);

    TextTable t;
    t.title = "transform self-test (seed " + std::to_string(opt.seed) + ")";
    t.headers = {"property", "status"};
    auto pf = [](bool b) { return b ? std::string("pass") : std::string("FAIL"); };
    t.rows.push_back({"closed form = integral formula (n<=4, m<=3, full basis)",
                      pf(rep.closed_form_ok)});
    t.rows.push_back({"transform is bijective", pf(rep.bijective_ok)});
    t.rows.push_back({"parity shift by n", pf(rep.parity_ok)});
    t.rows.push_back({"chain map T d_H = d_Hhat T (" + std::to_string(rep.models_tested) +
                          " models)",
                      pf(rep.chain_map_ok)});
    t.rows.push_back({"mukai sign (-1)^{nm} (" + std::to_string(rep.mukai_pairs_tested) +
                          " pairs)",
                      pf(rep.mukai_sign_ok)});
    t.rows.push_back({"sigma involution", pf(rep.sigma_involution_ok)});
    t.rows.push_back({"kernel closed form = exponential series", pf(rep.exponential_ok)});
    out.tables.push_back(t);

    TextTable signs;
    signs.title = "measured sign of That o T by (n, degree)";
    signs.headers = {"n", "degree", "sign"};
    json signs_json = json::array();
    for (const auto& [key, s] : rep.double_transform_sign) {
        signs.rows.push_back({std::to_string(key.first), std::to_string(key.second),
                              s == 0 ? "NOT CONSTANT" : std::to_string(s)});
        signs_json.push_back({{"n", key.first}, {"degree", key.second}, {"sign", s}});
    }
    out.tables.push_back(signs);

    out.body["all_pass"] = rep.all_pass();
    out.body["models_tested"] = rep.models_tested;
    out.body["mukai_pairs_tested"] = rep.mukai_pairs_tested;
    out.body["double_transform_signs"] = signs_json;
    if (!rep.all_pass()) out.notes.push_back("self-test FAILED: internal invariant violation");
    out.undetermined = false;
    if (!rep.all_pass()) throw std::logic_error("hori self-test failed");
    return out;
}

json kresult_json(const KResult& r) {
    json j;
    auto pieces = [](const std::vector<KPiece>& ps) {
        json a = json::array();
        for (const auto& p : ps) a.push_back({{"degree", p.degree}, {"group", group_json(p.group)}});
        return a;
    };
    j["even_pieces"] = pieces(r.even_pieces);
    j["odd_pieces"] = pieces(r.odd_pieces);
    j["K0"] = group_json(r.k0);
    j["K1"] = group_json(r.k1);
    j["K0_ambiguous"] = r.k0_ambiguous;
    j["K1_ambiguous"] = r.k1_ambiguous;
    j["notes"] = r.notes;
    return j;
}

CommandOutput cmd_ktheory(const WorkbenchConfig& cfg, const Options& opt) {
    CommandOutput out;
    std::string fam_name = cfg.family ? *cfg.family : opt.family_arg;
    if (fam_name.empty()) throw ConfigError("config.family: missing for ktheory");
    catalog::Family fam = catalog::family_by_name(fam_name);

    auto parse_pair_str = [](const std::string& s) {
        auto comma = s.find(',');
        if (comma == std::string::npos) throw ConfigError("pair/orbit: expected 'j,k'");
        return std::pair<long, long>{std::stol(s.substr(0, comma)), std::stol(s.substr(comma + 1))};
    };

    std::optional<std::pair<long, long>> pair = cfg.pair;
    if (!opt.pair_arg.empty()) pair = parse_pair_str(opt.pair_arg);

    if (!opt.orbit.empty()) {
        auto [j, k] = parse_pair_str(opt.orbit);
        NormalFormResult nf = normal_form({j, k});
        std::vector<TwistPair> orbit_pairs{{j, k}};
        TwistPair cur{j, k};
        for (const Move& m : nf.moves) {
            cur = m.kind == Move::Swap ? swap_pair(cur) : shift_pair(cur, m.t);
            orbit_pairs.push_back(cur);
        }
        auto rep = move_invariance_check(fam, orbit_pairs);
        TextTable t;
        t.title = "move orbit of (" + std::to_string(j) + "," + std::to_string(k) +
                  ") with normal form (" + std::to_string(nf.pair.j) + "," +
                  std::to_string(nf.pair.k) + ")";
        t.headers = {"pair", "K^0", "K^1", "flags"};
        json cells = json::array();
        for (const auto& p : orbit_pairs) {
            KTableCell cell = ktable_cell(fam, p.j, p.k);
            std::string flags = cell.undetermined ? "undetermined"
                                : cell.resolved_by_moves ? "resolved-by-moves"
                                                         : "";
            t.rows.push_back({"(" + std::to_string(p.j) + "," + std::to_string(p.k) + ")",
                              cell.undetermined ? "?" : cell.resolved.k0.to_string(),
                              cell.undetermined ? "?" : cell.resolved.k1.to_string(),
                              flags.empty() ? "-" : flags});
            json cj;
            cj["pair"] = {p.j, p.k};
            cj["undetermined"] = cell.undetermined;
            if (!cell.undetermined) cj["resolved"] = kresult_json(cell.resolved);
            cells.push_back(cj);
        }
        out.tables.push_back(t);
        out.body["orbit_cells"] = cells;
        out.body["normal_form"] = {nf.pair.j, nf.pair.k};
        out.body["invariant"] = rep.ok;
        if (!rep.ok)
            for (const auto& v : rep.violations) out.notes.push_back("violation: " + v);
        annotate_deviations(out, opt, {fam_name + ".K"});
        return out;
    }

    if (pair) {
        auto [j, k] = *pair;
        KTableCell cell = ktable_cell(fam, j, k);
        out.undetermined = cell.undetermined;
        TextTable t;
        t.title = fam_name + " twisted K-theory at (j,k) = (" + std::to_string(j) + "," +
                  std::to_string(k) + ")";
        t.headers = {"object", "value"};
        if (cell.undetermined) {
            t.rows.push_back({"status", "undetermined (no prescription for the base d3)"});
        } else {
            auto piece_str = [](const std::vector<KPiece>& ps) {
                std::string s;
                for (const auto& p : ps)
                    s += (s.empty() ? "" : " | ") + ("H" + std::to_string(p.degree) + ": ") +
                         p.group.to_string();
                return s.empty() ? std::string("-") : s;
            };
            t.rows.push_back({"even pieces", piece_str(cell.raw.even_pieces)});
            t.rows.push_back({"odd pieces", piece_str(cell.raw.odd_pieces)});
            t.rows.push_back({"K^0 (split)", cell.raw.k0.to_string() +
                                                 (cell.raw.k0_ambiguous ? " *" : "")});
            t.rows.push_back({"K^1 (split)", cell.raw.k1.to_string() +
                                                 (cell.raw.k1_ambiguous ? " *" : "")});
            t.rows.push_back({"K^0 (resolved)", cell.resolved.k0.to_string()});
            t.rows.push_back({"K^1 (resolved)", cell.resolved.k1.to_string()});
            t.rows.push_back({"orbit normal form", "(" + std::to_string(cell.orbit.pair.j) + "," +
                                                       std::to_string(cell.orbit.pair.k) + ")"});
            out.body["raw"] = kresult_json(cell.raw);
            out.body["resolved"] = kresult_json(cell.resolved);
            out.body["normal_form"] = {cell.orbit.pair.j, cell.orbit.pair.k};
            for (const auto& n : cell.resolved.notes) out.notes.push_back(n);
        }
        out.tables.push_back(t);
        out.body["undetermined"] = cell.undetermined;
        annotate_deviations(out, opt, {fam_name + ".K"});
        return out;
    }

    /* grid */
    KTable table = ktable(fam, cfg.jrange[0], cfg.jrange[1], cfg.krange[0], cfg.krange[1]);
    TextTable t;
    t.title = fam_name + " twisted K-theory grid";
    t.headers = {"j", "k", "K^0", "K^1", "flags"};
    json cells = json::array();
    for (const auto& cell : table.cells) {
        std::string flags = cell.undetermined ? "undetermined"
                            : cell.resolved_by_moves ? "resolved-by-moves"
                                                     : "";
        t.rows.push_back({std::to_string(cell.pair.j), std::to_string(cell.pair.k),
                          cell.undetermined ? "?" : cell.resolved.k0.to_string(),
                          cell.undetermined ? "?" : cell.resolved.k1.to_string(),
                          flags.empty() ? "-" : flags});
        json cj;
        cj["pair"] = {cell.pair.j, cell.pair.k};
        cj["undetermined"] = cell.undetermined;
        if (!cell.undetermined) {
            cj["resolved"] = kresult_json(cell.resolved);
            cj["normal_form"] = {cell.orbit.pair.j, cell.orbit.pair.k};
        }
        cells.push_back(cj);
    }
    out.tables.push_back(t);
    out.body["cells"] = cells;
    for (const auto& cell : table.cells)
        if (cell.undetermined) out.undetermined = true;
    annotate_deviations(out, opt, {fam_name + ".K"});
    return out;
}

CommandOutput cmd_tables(const Options& opt) {
    CommandOutput out;
    DeviationReport rep = check_deviations(opt.ledger_path.empty() ? default_ledger_path()
                                                                    : opt.ledger_path);
    std::map<std::string, TextTable> tables;
    json records = json::array();
    for (const auto& rec : rep.records) {
        TextTable& t = tables[rec.cell.table_id];
        if (t.headers.empty()) {
            t.title = rec.cell.table_id + " -- " + rec.cell.location;
            t.headers = {"object", "printed", "derived", "status"};
        }
        t.rows.push_back({rec.cell.object, rec.cell.printed, rec.derived,
                          rec.deviates ? "DEVIATES" : "agrees"});
        json rj;
        rj["object"] = rec.cell.object;
        rj["printed"] = rec.cell.printed;
        rj["derived"] = rec.derived;
        rj["deviates"] = rec.deviates;
        records.push_back(rj);
    }
    for (auto& [id, t] : tables) out.tables.push_back(t);
    out.body["records"] = records;
    out.body["deviation_count"] = rep.deviations.size();
    out.body["errors"] = rep.errors;
    if (!opt.quiet)
        for (const auto& d : rep.deviations)
            out.notes.push_back("deviation [" + d.cell.object + "]: printed " + d.cell.printed +
                                ", derived " + d.derived + ". " + d.cell.justification);
    for (const auto& e : rep.errors) out.notes.push_back("ERROR: " + e);
    if (!rep.errors.empty()) throw std::logic_error("deviation ledger check failed");
    return out;
}

}  // namespace

RunResult run(const std::vector<std::string>& args) {
    RunResult res;
    Options opt;
    std::string command;

    std::vector<std::string> rest;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto need_value = [&](const char* name) -> std::string {
            if (i + 1 >= args.size()) throw ConfigError(std::string(name) + ": missing value");
            return args[++i];
        };
        if (a == "--config") opt.config_path = need_value("--config");
        else if (a == "--format") opt.format = need_value("--format");
        else if (a == "--strict") opt.strict = true;
        else if (a == "--quiet") opt.quiet = true;
        else if (a == "--seed") opt.seed = unsigned(std::stoul(need_value("--seed")));
        else if (a == "--models") opt.models = std::stol(need_value("--models"));
        else if (a == "--pairs") opt.pairs = std::stol(need_value("--pairs"));
        else if (a == "--out") opt.out_path = need_value("--out");
        else if (a == "--orbit") opt.orbit = need_value("--orbit");
        else if (a == "--pair") opt.pair_arg = need_value("--pair");
        else if (a == "--family") opt.family_arg = need_value("--family");
        else if (a == "--ledger") opt.ledger_path = need_value("--ledger");
        else if (a == "--help" || a == "-h") {
            res.output =
                "usage: tdual <command> [--config <path>] [--format text|json|csv] [--strict]\n"
                "             [--seed N] [--out <path>] [--quiet] [--pair j,k] [--orbit j,k]\n"
                "             [--family sec61|sec62] [--models N] [--pairs N] [--ledger <path>]\n"
                "commands: cohomology bundle dualize hori-selftest ktheory tables\n";
            return res;
        } else if (!a.empty() && a[0] == '-') {
            res.exit_code = 1;
            res.output = "unknown option: " + a + "\n";
            return res;
        } else if (command.empty()) {
            command = a;
        } else {
            rest.push_back(a);
        }
    }

    if (command.empty()) {
        res.exit_code = 1;
        res.output = "no command given (try --help)\n";
        return res;
    }
    if (opt.format != "text" && opt.format != "json" && opt.format != "csv") {
        res.exit_code = 1;
        res.output = "unknown format: " + opt.format + "\n";
        return res;
    }

    try {
        WorkbenchConfig cfg;
        if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
        else if (!opt.family_arg.empty()) {
            json j;
            j["family"] = opt.family_arg;
            cfg = parse_config(j);
        } else {
            cfg.raw = json::object();
        }

        CommandOutput out;
        if (command == "cohomology") out = cmd_cohomology(cfg, opt);
        else if (command == "bundle") out = cmd_bundle(cfg, opt);
        else if (command == "dualize") out = cmd_dualize(cfg, opt);
        else if (command == "hori-selftest") out = cmd_hori_selftest(opt);
        else if (command == "ktheory") out = cmd_ktheory(cfg, opt);
        else if (command == "tables") out = cmd_tables(opt);
        else {
            res.exit_code = 1;
            res.output = "unknown command: " + command + "\n";
            return res;
        }

        res.output = finalize(out, opt, command, cfg.raw);
        if (out.undetermined && opt.strict) res.exit_code = 2;
    } catch (const ConfigError& e) {
        res.exit_code = 1;
        res.output = std::string(e.what()) + "\n";
    } catch (const CoefficientMismatch& e) {
        res.exit_code = 1;
        res.output = std::string("flux/coefficient error: ") + e.what() + "\n";
    } catch (const UnsupportedNonOrientableVertical& e) {
        res.exit_code = 1;
        res.output = std::string(e.what()) + "\n";
    } catch (const DegreeOutOfRange& e) {
        res.exit_code = 1;
        res.output = std::string(e.what()) + "\n";
    } catch (const std::invalid_argument& e) {
        res.exit_code = 1;
        res.output = std::string(e.what()) + "\n";
    } catch (const std::logic_error& e) {
        res.exit_code = 3;
        res.output = std::string("internal invariant violation: ") + e.what() + "\n";
    } catch (const std::exception& e) {
        res.exit_code = 3;
        res.output = std::string("internal error: ") + e.what() + "\n";
    }

    if (!opt.out_path.empty() && res.exit_code == 0) {
        std::ofstream f(opt.out_path);
        if (!f) {
            res.exit_code = 1;
            res.output += "cannot write output file: " + opt.out_path + "\n";
        } else {
            f << res.output;
        }
    }

    return res;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    RunResult r = run(args);
    std::cout << r.output;
    return r.exit_code;
}

}  // namespace attb::cli

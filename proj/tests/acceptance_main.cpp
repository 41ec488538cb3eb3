/* Acceptance suite: one line per criterion, pinned expected values, exit
 * nonzero if any criterion fails. Criterion 2 asserts the published
 * total-space table for the mapping-torus family verbatim; the exact
 * pipeline derives a different (structurally forced) table, so that
 * criterion reports its per-cell failures and points at the deviation
 * ledger rather than weakening the assertion. */

#include <chrono>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "attb/deviations.hpp"
#include "attb/hori.hpp"
#include "attb/ktheory.hpp"

using namespace attb;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass = false;
    double seconds = 0;
    std::vector<std::string> details;
};

FgAbGroup Z(long r) { return FgAbGroup{r, {}}; }
FgAbGroup Zmod(long n) { return canonical_group(0, {Int(n)}); }

std::mt19937 rng(271828);

IntMatrix random_gl2(int ops) {
    std::uniform_int_distribution<int> kind(0, 2), qd(-1, 1);
    IntMatrix m = IntMatrix::identity(2);
    for (int i = 0; i < ops; ++i) {
        switch (kind(rng)) {
            case 0: m.add_row_multiple(0, 1, Int(qd(rng))); break;
            case 1: m.add_row_multiple(1, 0, Int(qd(rng))); break;
            default: m.swap_rows(0, 1); break;
        }
    }
    return m;
}

bool entries_small(const IntMatrix& m, long bound) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (abs(m.at(i, j)) > bound) return false;
    return true;
}

std::pair<IntMatrix, IntMatrix> random_commuting_pair(bool require_sl) {
    for (;;) {
        IntMatrix a = random_gl2(4);
        std::uniform_int_distribution<int> pw(0, 2), sg(0, 1);
        IntMatrix b = IntMatrix::identity(2);
        int p = pw(rng);
        for (int i = 0; i < p; ++i) b = b * a;
        if (sg(rng)) {
            b.negate_row(0);
            b.negate_row(1);
        }
        if (!entries_small(a, 3) || !entries_small(b, 3)) continue;
        if (require_sl && (a.det() != 1 || b.det() != 1)) continue;
        return {a, b};
    }
}

std::vector<Int> random_coords(const FgAbGroup& g) {
    std::uniform_int_distribution<int> cd(-3, 3);
    std::vector<Int> coords;
    for (long i = 0; i < g.free_rank; ++i) coords.push_back(cd(rng));
    for (const Int& d : g.invariant_factors) {
        Int r = cd(rng);
        mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), d.get_mpz_t());
        coords.push_back(r);
    }
    return coords;
}

void criterion1(Criterion& c) {
    catalog::Family fam = catalog::sec62();
    auto hz = cohomology_groups(trivial_system(fam.lambda.base, 1));
    auto hl = cohomology_groups(fam.lambda);
    std::vector<FgAbGroup> want_z{Z(1), Z(1), Z(0), Zmod(2)};
    std::vector<FgAbGroup> want_l{Z(0), Zmod(4), Z(1), Z(1)};
    c.pass = (hz == want_z) && (hl == want_l);
    if (!c.pass) c.details.push_back("base tables do not match the published values");
}

void criterion2(Criterion& c) {
    catalog::Family fam = catalog::sec62();
    c.pass = true;
    for (long j : {1L, 3L, 5L}) {
        std::vector<FgAbGroup> pinned{Z(1), Z(1), Z(0), Zmod(j), Zmod(j), Zmod(2)};
        auto tot = total_cohomology(final_page(fam.bundle(j)), ExtensionPolicy::Split);
        for (int i = 0; i <= 5; ++i) {
            if (tot.assembled[i] == pinned[i]) continue;
            c.pass = false;
            std::ostringstream os;
            os << "H^" << i << "(X_" << j << "): pinned " << pinned[i].to_string()
               << ", derived " << tot.assembled[i].to_string();
            c.details.push_back(os.str());
        }
    }
    if (!c.pass) {
        c.details.push_back(
            "the derived table (Z, Z, Z/2, Z + Z/j, Z, Z/2) is forced by H_1(X_j) = Z + Z/2 "
            "(universal coefficients), the Wang sequence of the total space, and mod-2 "
            "Poincare duality; see data/printed_tables.json (sec62.total.j3)");
    }
}

void criterion3(Criterion& c) {
    catalog::Family fam = catalog::sec61();
    c.pass = true;
    BaseModel lam_mod(fam.lambda.base, 2, fam.lambda.monodromies);
    LocalSystem dual_sys = dual(fam.lambda);
    BaseModel dual_mod(fam.lambda.base, 2, dual_sys.monodromies);
    for (long j = 0; j <= 12 && c.pass; ++j)
        for (long k = 0; k <= 12 && c.pass; ++k) {
            AffineBundle b = fam.bundle(j);
            FluxDatum f = fam.flux(b, k);
            DualPair p = dualize(b, f);
            auto chat = dual_mod.cohomology(2).coordinates(p.dual_bundle.chern_rep);
            auto khat = lam_mod.cohomology(2).coordinates(p.dual_flux.k_rep);
            bool swap_ok = abs(chat[0]) == k && abs(khat[0]) == j;
            bool inv_ok = involution_check(b, f);
            bool rel_ok = p.report.all_pass();
            if (!(swap_ok && inv_ok && rel_ok)) {
                c.pass = false;
                std::ostringstream os;
                os << "(" << j << "," << k << "): swap=" << swap_ok << " involution=" << inv_ok
                   << " relations=" << rel_ok;
                c.details.push_back(os.str());
            }
        }
}

void criterion4(Criterion& c) {
    c.pass = true;
    for (long j = -200; j <= 200 && c.pass; ++j)
        for (long k = -200; k <= 200; ++k) {
            NormalFormResult r = normal_form({j, k});
            if (r.pair.j != std::gcd(j, k) || r.pair.k != 0 ||
                !(normal_form(r.pair).pair == r.pair)) {
                c.pass = false;
                c.details.push_back("normal form failed at (" + std::to_string(j) + "," +
                                    std::to_string(k) + ")");
                break;
            }
        }
}

void criterion5(Criterion& c) {
    catalog::Family fam = catalog::sec61();
    c.pass = true;
    std::vector<TwistPair> pairs;
    for (long j = 0; j <= 12; ++j)
        for (long k = 0; k <= 12; ++k) pairs.push_back({j, k});
    auto rep = move_invariance_check(fam, pairs);
    if (!rep.ok) {
        c.pass = false;
        for (const auto& v : rep.violations) c.details.push_back(v);
    }
    for (const auto& p : pairs) {
        KTableCell cell = ktable_cell(fam, p.j, p.k);
        long d = std::gcd(p.j, p.k);
        FgAbGroup want = (d == 0 || d == 1) ? FgAbGroup{} : Zmod(d);
        if (!(cell.resolved.k0.torsion() == want) || !(cell.resolved.k1.torsion() == want)) {
            c.pass = false;
            c.details.push_back("gcd torsion failed at (" + std::to_string(p.j) + "," +
                                std::to_string(p.k) + ")");
        }
    }
}

void criterion6(Criterion& c) {
    HoriSelfTestOptions opt;
    opt.max_n = 3;
    opt.max_m = 3;
    opt.min_models = 200;
    opt.mukai_pairs = 12000;  // >= 1000 per (n, m) shape
    opt.seed = 314159;
    HoriSelfTestReport rep = hori_selftest(opt);
    c.pass = rep.all_pass();
    if (!rep.closed_form_ok) c.details.push_back("closed form != integral formula");
    if (!rep.bijective_ok) c.details.push_back("transform not bijective");
    if (!rep.parity_ok) c.details.push_back("parity shift violated");
    if (!rep.chain_map_ok) c.details.push_back("chain map identity violated");
    if (!rep.mukai_sign_ok) c.details.push_back("mukai sign violated");
    if (!rep.exponential_ok) c.details.push_back("kernel closed form != series");
    std::ostringstream os;
    os << rep.models_tested << " flat models, " << rep.mukai_pairs_tested << " mukai pairs";
    c.details.push_back(os.str());
    for (const auto& [key, s] : rep.double_transform_sign)
        if (s == 0) {
            c.pass = false;
            c.details.push_back("double transform sign not constant at n=" +
                                std::to_string(key.first) +
                                " degree=" + std::to_string(key.second));
        }
}

struct RandomBundleSuite {
    std::vector<AffineBundle> bundles;
};

RandomBundleSuite build_random_suite(int count) {
    RandomBundleSuite s;
    while (int(s.bundles.size()) < count) {
        auto [a, b] = random_commuting_pair(/*require_sl=*/true);
        LocalSystem lam{2, Torus{2}, {a, b}};
        BaseModel m(lam.base, lam.rank, lam.monodromies);
        s.bundles.push_back(make_bundle(lam, random_coords(m.cohomology(2).group())));
    }
    return s;
}

void criterion7(Criterion& c, const RandomBundleSuite& suite) {
    c.pass = true;
    long checked = 0;
    for (const auto& b : suite.bundles) {
        auto od = orientation_data(b);
        auto tot = total_cohomology(final_page(b), ExtensionPolicy::Split, od.total_orientable);
        bool chi_ok = euler_characteristic(tot.assembled) == 0;
        bool betti_ok = true;
        if (od.total_orientable)
            for (int i = 0; i <= 4; ++i)
                if (tot.assembled[i].free_rank != tot.assembled[4 - i].free_rank)
                    betti_ok = false;
        bool h0_ok = tot.assembled[0] == Z(1);
        if (!(chi_ok && betti_ok && h0_ok)) {
            c.pass = false;
            c.details.push_back("violation in random bundle #" + std::to_string(checked));
        }
        ++checked;
    }
    c.details.push_back(std::to_string(checked) + " random bundles checked");
}

void criterion8(Criterion& c, const RandomBundleSuite& suite) {
    c.pass = true;
    long idx = 0;
    for (const auto& b : suite.bundles) {
        LocalSystem dual_sys = dual(b.lambda);
        BaseModel dual_mod(b.base(), dual_sys.rank, dual_sys.monodromies);
        std::uniform_int_distribution<int> bit(0, 1);
        Z2Class xi{std::vector<int>{bit(rng), bit(rng)}};
        FluxDatum f = make_flux(b, xi, random_coords(dual_mod.cohomology(2).group()), {});
        auto d = is_dualizable(b, f);
        if (!d.dualizable) {
            c.pass = false;
            c.details.push_back("random flux not dualizable at bundle #" + std::to_string(idx));
            continue;
        }
        DualPair p = dualize(b, f);
        if (!p.report.all_pass() || !involution_check(b, f)) {
            c.pass = false;
            c.details.push_back("relations failed at bundle #" + std::to_string(idx));
        }
        ++idx;
    }
}

void criterion9(Criterion& c) {
    DeviationReport rep = check_deviations();
    c.pass = rep.ok();
    if (rep.deviations.empty()) {
        c.pass = false;
        c.details.push_back("ledger is empty: the expected discrepancies are missing");
    }
    for (const auto& e : rep.errors) c.details.push_back(e);
    auto flagged = [&](const std::string& obj) {
        for (const auto& d : rep.deviations)
            if (d.cell.object == obj) return true;
        return false;
    };
    for (const char* obj :
         {"sec61.HM.1", "sec61.HX.4.2", "sec61.HX.0.2", "sec62.K.3.1.0", "sec62.K.3.1.1"})
        if (!flagged(obj)) {
            c.pass = false;
            c.details.push_back(std::string("required deviation not flagged: ") + obj);
        }
    std::ostringstream os;
    os << rep.deviations.size() << " documented deviations, " << rep.records.size()
       << " ledger cells";
    c.details.push_back(os.str());
}

}  // namespace

int main() {
    std::vector<Criterion> cs;
    auto run_one = [&](int id, const std::string& name, auto&& fn) {
        Criterion c;
        c.id = id;
        c.name = name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.pass = false;
            c.details.push_back(std::string("exception: ") + e.what());
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cs.push_back(c);
    };

    run_one(1, "mapping-torus base tables reproduced exactly", criterion1);
    run_one(2, "mapping-torus total-space table as published (j = 1, 3, 5)", criterion2);
    run_one(3, "shear-family swap law (j,k) -> (k,j) and involution on [0,12]^2", criterion3);
    run_one(4, "euclidean reduction matches gcd for |j|,|k| <= 200", criterion4);
    run_one(5, "move invariance and gcd torsion of twisted K on [0,12]^2", criterion5);
    run_one(6, "transform suite: closed form, bijectivity, parity, chain map, mukai sign",
            criterion6);

    RandomBundleSuite suite = build_random_suite(500);
    run_one(7, "chi = 0 and Betti symmetry for 500 random bundles over T^2",
            [&](Criterion& c) { criterion7(c, suite); });
    run_one(8, "exchange relations pass for every dualizable random configuration",
            [&](Criterion& c) { criterion8(c, suite); });
    run_one(9, "deviation ledger is populated and has no unexplained entries", criterion9);

    bool all = true;
    for (const auto& c : cs) {
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(2);
        os << "criterion " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << "  [" << c.seconds
           << "s]  " << c.name;
        std::cout << os.str() << "\n";
        for (const auto& d : c.details) std::cout << "    " << d << "\n";
        all = all && c.pass;
    }
    std::cout << (all ? "ACCEPTANCE: all criteria passed\n"
                      : "ACCEPTANCE: some criteria failed\n");
    return all ? 0 : 1;
}

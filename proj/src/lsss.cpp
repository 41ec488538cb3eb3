#include "attb/lsss.hpp"

#include <sstream>

namespace attb {

namespace {

/* Models for every wedge power Wedge^q Lambda*, q = 0..n, plus Lambda. */
struct BundleModels {
    LocalSystem lambda;
    std::vector<LocalSystem> wedge;    // exterior_power(dual(lambda), q)
    std::vector<BaseModel> wedge_mod;  // per q
    BaseModel lambda_mod;

    explicit BundleModels(const AffineBundle& b) : lambda(b.lambda) {
        LocalSystem d = dual(lambda);
        for (int q = 0; q <= lambda.rank; ++q) {
            wedge.push_back(exterior_power(d, q));
            wedge_mod.emplace_back(lambda.base, wedge[q].rank, wedge[q].monodromies);
        }
        lambda_mod = BaseModel(lambda.base, lambda.rank, lambda.monodromies);
    }
};

/* Ambient matrix of "contract with c" : C^p(M, Wedge^q) -> C^{p+2}(M, Wedge^{q-1}). */
IntMatrix d2_ambient_matrix(const AffineBundle& b, const BundleModels& models, int p, int q) {
    int src = models.wedge_mod[q].cochain_rank(p);
    int tgt = models.wedge_mod[q - 1].cochain_rank(p + 2);
    IntMatrix f(tgt, src);
    bool zero_chern = true;
    for (const Int& v : b.chern_rep)
        if (v != 0) zero_chern = false;
    if (zero_chern) return f;
    for (int j = 0; j < src; ++j) {
        std::vector<Int> e(src, Int(0));
        e[j] = 1;
        auto img = contract_with_chern(b.lambda, b.chern_rep, p, q, e);
        if (img.empty()) img.assign(tgt, Int(0));
        for (int i = 0; i < tgt; ++i) f.at(i, j) = img[i];
    }
    return f;
}

}  // namespace

AffineBundle make_bundle(const LocalSystem& lambda, const std::vector<Int>& chern_coords) {
    if (base_dim(lambda.base) < 2) {
        if (!chern_coords.empty())
            throw std::invalid_argument("H^2(M, Lambda) is trivial on this base");
        return AffineBundle{lambda, {}};
    }
    BaseModel m(lambda.base, lambda.rank, lambda.monodromies);
    const auto& h2 = m.cohomology(2);
    const FgAbGroup& g = h2.group();
    size_t ngen = size_t(g.free_rank) + g.invariant_factors.size();
    if (chern_coords.size() != ngen)
        throw std::invalid_argument("chern coordinate count does not match H^2(M, Lambda)");
    std::vector<Int> rep(m.cochain_rank(2), Int(0));
    for (size_t i = 0; i < ngen; ++i) {
        auto gen = h2.generator_rep(int(i));
        for (size_t k = 0; k < rep.size(); ++k) rep[k] += chern_coords[i] * gen[k];
    }
    return AffineBundle{lambda, rep};
}

bool SpectralPage::has_undetermined() const {
    for (const auto& col : entries)
        for (const auto& e : col)
            if (e.undetermined) return true;
    return false;
}

SpectralPage e2_page(const AffineBundle& bundle) {
    auto diag = validate(bundle.lambda);
    if (!diag.ok) throw std::invalid_argument("invalid local system: " + diag.issues.front());
    BundleModels models(bundle);
    /* the chern representative must be a cocycle */
    auto dc = mat_vec(models.lambda_mod.differential(2), bundle.chern_rep);
    for (const Int& v : dc)
        if (v != 0) throw std::invalid_argument("chern representative is not a cocycle");

    SpectralPage page;
    page.stage = 2;
    page.pmax = base_dim(bundle.base());
    page.qmax = bundle.fiber_rank();
    page.entries.assign(page.pmax + 1, std::vector<PageEntry>(page.qmax + 1));
    for (int p = 0; p <= page.pmax; ++p)
        for (int q = 0; q <= page.qmax; ++q)
            page.entries[p][q].sub = models.wedge_mod[q].cohomology(p);
    return page;
}

SpectralPage apply_d2(const AffineBundle& bundle, const SpectralPage& page2) {
    if (page2.stage != 2) throw std::invalid_argument("apply_d2 expects a stage-2 page");
    BundleModels models(bundle);
    int pmax = page2.pmax, qmax = page2.qmax;

    /* Ambient d2 matrices from every source position. */
    std::map<std::pair<int, int>, IntMatrix> amb;
    for (int p = 0; p + 2 <= pmax; ++p)
        for (int q = 1; q <= qmax; ++q) amb[{p, q}] = d2_ambient_matrix(bundle, models, p, q);

    SpectralPage page3;
    page3.stage = 3;
    page3.pmax = pmax;
    page3.qmax = qmax;
    page3.entries.assign(pmax + 1, std::vector<PageEntry>(qmax + 1));

    for (int p = 0; p <= pmax; ++p)
        for (int q = 0; q <= qmax; ++q) {
            const PresentedSubquotient& e2 = page2.at(p, q).sub;
            IntMatrix cycles = e2.cycle_basis();
            IntMatrix boundaries = e2.boundary_basis();
            /* outgoing d2 cuts cycles down */
            if (auto it = amb.find({p, q}); it != amb.end()) {
                const PresentedSubquotient& tgt = page2.at(p + 2, q - 1).sub;
                IntMatrix fz = it->second * cycles;
                IntMatrix y = lattice_preimage(fz, tgt.boundary_basis());
                cycles = hermite_column_basis(cycles * y);
            }
            /* incoming d2 enlarges boundaries */
            if (p >= 2 && q + 1 <= qmax) {
                if (auto it = amb.find({p - 2, q + 1}); it != amb.end()) {
                    const PresentedSubquotient& src = page2.at(p - 2, q + 1).sub;
                    boundaries = lattice_sum(boundaries, it->second * src.cycle_basis());
                }
            }
            page3.entries[p][q].sub = PresentedSubquotient::quotient(cycles, boundaries);
        }

    /* canonical-coordinate d2 maps, recorded for reports and tests */
    for (auto& [pos, f] : amb) {
        auto [p, q] = pos;
        page3.d2_maps.emplace(pos, induced_map(f, page2.at(p, q).sub, page2.at(p + 2, q - 1).sub));
    }

    /* d2 o d2 = 0 wherever composable */
    for (auto& [pos, f] : amb) {
        auto [p, q] = pos;
        auto next = amb.find({p + 2, q - 1});
        if (next == amb.end()) continue;
        if (!(next->second * f).is_zero())
            throw std::logic_error("d2 composed with d2 is nonzero");
    }
    return page3;
}

SpectralPage e_infinity(const AffineBundle& bundle, const SpectralPage& page3) {
    if (page3.stage < 3) throw std::invalid_argument("e_infinity expects stage >= 3");
    SpectralPage out = page3;
    int dim = base_dim(bundle.base());
    if (dim <= 2) {
        out.final_page = true;
        return out;
    }
    bool blocked = false;
    for (int r = 3; r <= dim; ++r)
        for (int p = 0; p + r <= out.pmax; ++p)
            for (int q = r - 1; q <= out.qmax; ++q) {
                /* potential d_r : (p, q) -> (p + r, q - r + 1) */
                const auto& src = out.at(p, q).sub.group();
                const auto& tgt = out.at(p + r, q - r + 1).sub.group();
                if (!src.is_trivial() && !tgt.is_trivial()) {
                    out.entries[p][q].undetermined = true;
                    out.entries[p + r][q - r + 1].undetermined = true;
                    blocked = true;
                }
            }
    out.final_page = !blocked;
    return out;
}

TotalCohomology total_cohomology(const SpectralPage& page, ExtensionPolicy policy,
                                 bool total_space_orientable) {
    if (!page.final_page && !page.has_undetermined())
        throw std::invalid_argument("total_cohomology expects a final page");
    int dim_total = page.pmax + page.qmax;
    TotalCohomology t;
    t.undetermined = page.has_undetermined();
    t.pieces.resize(dim_total + 1);
    t.assembled.resize(dim_total + 1);
    t.extension_ambiguous.assign(dim_total + 1, false);
    t.notes.resize(dim_total + 1);

    for (int i = 0; i <= dim_total; ++i) {
        for (int p = std::min(i, page.pmax); p >= 0 && i - p <= page.qmax; --p) {
            int q = i - p;
            if (q < 0) break;
            const auto& g = page.at(p, q).sub.group();
            if (!g.is_trivial()) t.pieces[i].push_back(GradedPiece{p, q, g});
        }
        /* assemble deepest-first; a torsion piece over a nonzero part of the
         * filtration with Ext != 0 makes the extension ambiguous */
        FgAbGroup acc;
        bool ambiguous = false;
        for (const auto& piece : t.pieces[i]) {
            if (!piece.group.invariant_factors.empty() && !acc.is_trivial() &&
                !ext_group(piece.group.torsion(), acc).is_trivial())
                ambiguous = true;
            acc = acc.direct_sum(piece.group);
        }
        t.assembled[i] = acc;
        t.extension_ambiguous[i] = ambiguous;
        if (ambiguous) t.notes[i] = "extension ambiguous; direct-sum value reported";
    }

    if (policy == ExtensionPolicy::PDAssisted && total_space_orientable) {
        /* Torsion duality for closed oriented total spaces:
         * T(H^i) = T(H^{d+1-i}). Resolve a flagged degree from its
         * unflagged mirror. */
        for (int i = 0; i <= dim_total; ++i) {
            int mirror = dim_total + 1 - i;
            if (!t.extension_ambiguous[i]) continue;
            if (mirror < 0 || mirror > dim_total || t.extension_ambiguous[mirror]) continue;
            FgAbGroup fixed{t.assembled[i].free_rank, t.assembled[mirror].invariant_factors};
            t.assembled[i] = canonical_group(fixed.free_rank, fixed.invariant_factors);
            t.extension_ambiguous[i] = false;
            t.notes[i] = "torsion resolved by duality with degree " + std::to_string(mirror);
        }
    }
    return t;
}

OrientationData orientation_data(const AffineBundle& bundle) {
    OrientationData o;
    o.w1_vertical = w1(bundle.lambda);
    o.w1_base = base_w1(bundle.base());
    o.total_orientable = (o.w1_vertical + o.w1_base).is_trivial();
    return o;
}

SpectralPage final_page(const AffineBundle& bundle) {
    return e_infinity(bundle, apply_d2(bundle, e2_page(bundle)));
}

PresentedSubquotient flux_certificate_space(const AffineBundle& bundle) {
    SpectralPage p3 = apply_d2(bundle, e2_page(bundle));
    if (p3.pmax < 2 || p3.qmax < 1)
        throw std::invalid_argument("no E^{2,1} entry for this bundle");
    return p3.at(2, 1).sub;
}

bool map_is_surjective(const SubquotientMap& m) {
    /* surjective iff the columns together with the target relations span
     * the full coordinate lattice */
    int rows = m.matrix.rows();
    long nfree = m.target.free_rank;
    IntMatrix rel(rows, int(m.target.invariant_factors.size()));
    for (size_t t = 0; t < m.target.invariant_factors.size(); ++t)
        rel.at(int(nfree + long(t)), int(t)) = m.target.invariant_factors[t];
    return cokernel(m.matrix.hcat(rel)).is_trivial();
}

}  // namespace attb

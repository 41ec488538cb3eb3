#include "attb/tdual.hpp"

namespace attb {

namespace {

std::vector<Int> rep_from_coords(const PresentedSubquotient& h, const std::vector<Int>& coords,
                                 int ambient_rank) {
    const FgAbGroup& g = h.group();
    size_t ngen = size_t(g.free_rank) + g.invariant_factors.size();
    if (coords.size() != ngen) throw CoefficientMismatch("coordinate count mismatch");
    std::vector<Int> rep(ambient_rank, Int(0));
    for (size_t i = 0; i < ngen; ++i) {
        auto gen = h.generator_rep(int(i));
        for (size_t k = 0; k < rep.size(); ++k) rep[k] += coords[i] * gen[k];
    }
    return rep;
}

bool is_zero_vec(const std::vector<Int>& v) {
    for (const Int& x : v)
        if (x != 0) return false;
    return true;
}

/* c cup k via coefficient contraction Lambda (x) Lambda* -> Z, landing in
 * C^4(M, Z); identically zero on bases of dimension <= 3. */
std::vector<Int> obstruction_rep(const AffineBundle& bundle, const std::vector<Int>& k_rep) {
    return contract_with_chern(bundle.lambda, bundle.chern_rep, 2, 1, k_rep);
}

}  // namespace

FluxDatum make_flux(const AffineBundle& bundle, const Z2Class& xi,
                    const std::vector<Int>& k_coords, const std::vector<Int>& h3_coords) {
    const LocalSystem& lam = bundle.lambda;
    if (int(xi.bits.size()) != base_generator_count(lam.base))
        throw CoefficientMismatch("xi bit count does not match the base");
    LocalSystem dual_sys = dual(lam);
    BaseModel dual_mod(lam.base, dual_sys.rank, dual_sys.monodromies);
    FluxDatum f;
    f.xi = xi;
    f.k_rep = rep_from_coords(dual_mod.cohomology(2), k_coords, dual_mod.cochain_rank(2));
    if (base_dim(lam.base) >= 3) {
        BaseModel triv(lam.base, 1, trivial_system(lam.base, 1).monodromies);
        const auto& h3 = triv.cohomology(3);
        size_t ngen = size_t(h3.group().free_rank) + h3.group().invariant_factors.size();
        if (h3_coords.size() != ngen) throw CoefficientMismatch("h3 coordinate count mismatch");
        f.h3_coords = h3_coords;
        for (size_t i = 0; i < f.h3_coords.size(); ++i) {
            const auto& facs = h3.group().invariant_factors;
            size_t nfree = size_t(h3.group().free_rank);
            if (i >= nfree) {
                Int d = facs[i - nfree];
                mpz_fdiv_r(f.h3_coords[i].get_mpz_t(), f.h3_coords[i].get_mpz_t(), d.get_mpz_t());
            }
        }
    } else if (!h3_coords.empty()) {
        throw CoefficientMismatch("H^3(M, Z) is trivial on this base");
    }
    return f;
}

DualizabilityResult is_dualizable(const AffineBundle& bundle, const FluxDatum& flux) {
    DualizabilityResult r;
    if (int(flux.xi.bits.size()) != base_generator_count(bundle.base())) {
        r.obstruction = "CoefficientMismatch: xi";
        return r;
    }
    LocalSystem dual_sys = dual(bundle.lambda);
    BaseModel dual_mod(bundle.base(), dual_sys.rank, dual_sys.monodromies);
    if (int(flux.k_rep.size()) != dual_mod.cochain_rank(2)) {
        r.obstruction = "CoefficientMismatch: k";
        return r;
    }
    if (!is_zero_vec(mat_vec(dual_mod.differential(2), flux.k_rep))) {
        r.obstruction = "CoefficientMismatch: k is not a cocycle";
        return r;
    }
    /* d2-closure of k: the obstruction c cup k must vanish in H^4(M, Z);
     * automatic when dim M <= 3 but computed regardless. */
    auto obs = obstruction_rep(bundle, flux.k_rep);
    if (!obs.empty() && !is_zero_vec(obs)) {
        BaseModel triv(bundle.base(), 1, trivial_system(bundle.base(), 1).monodromies);
        if (!triv.cohomology(4).is_zero_class(obs)) {
            r.obstruction = "d2-obstruction c cup k is nonzero in H^4(M, Z)";
            return r;
        }
    }
    r.dualizable = true;
    r.certificate = flux_certificate_space(bundle).coordinates(flux.k_rep);
    return r;
}

DualPair dualize(const AffineBundle& bundle, const FluxDatum& flux, bool strict) {
    auto d = is_dualizable(bundle, flux);
    if (!d.dualizable) throw CoefficientMismatch(d.obstruction);

    DualPair pair;
    pair.bundle = bundle;
    pair.flux = flux;

    Z2Class w1v = w1(bundle.lambda);
    if (!w1v.is_trivial()) {
        if (strict)
            throw UnsupportedNonOrientableVertical(
                "w1(Lambda) != 0: the W3/Bockstein correction is not computed");
        pair.report.notes.push_back(
            "non-orientable vertical bundle: xi transported, W3 correction not computed");
    }

    /* dual bundle: monodromy Lambda* with c-hat given by the same ambient
     * representative as k (the model of Lambda-hat is the model of
     * Lambda*), and dual flux (xi + w1, k-hat = c, same h3). */
    pair.dual_bundle = AffineBundle{dual(bundle.lambda), flux.k_rep};
    pair.dual_flux = FluxDatum{flux.xi + w1v, bundle.chern_rep, flux.h3_coords};
    auto notes = pair.report.notes;
    pair.report = check_relations(pair);
    pair.report.notes = std::move(notes);
    return pair;
}

RelationReport check_relations(const DualPair& pair) {
    RelationReport rep;

    Z2Class w1v = w1(pair.bundle.lambda);
    rep.xi_transport = (pair.dual_flux.xi == pair.flux.xi + w1v);

    /* c cup c-hat = 0 in H^4(M, Z) (trivially zero in dimension <= 3, but
     * evaluated, not assumed). */
    auto obs = obstruction_rep(pair.bundle, pair.dual_bundle.chern_rep);
    if (obs.empty() || is_zero_vec(obs)) {
        rep.c_cup_chat_zero = true;
    } else {
        BaseModel triv(pair.bundle.base(), 1,
                       trivial_system(pair.bundle.base(), 1).monodromies);
        rep.c_cup_chat_zero = triv.cohomology(4).is_zero_class(obs);
    }

    /* [h] = [c-hat] in E_inf^{2,1}(pi). */
    auto cert = flux_certificate_space(pair.bundle);
    rep.h_equals_chat =
        (cert.coordinates(pair.flux.k_rep) == cert.coordinates(pair.dual_bundle.chern_rep));

    /* [h-hat] = [c] in E_inf^{2,1}(pi-hat). */
    auto cert_dual = flux_certificate_space(pair.dual_bundle);
    rep.hhat_equals_c =
        (cert_dual.coordinates(pair.dual_flux.k_rep) ==
         cert_dual.coordinates(pair.bundle.chern_rep));
    return rep;
}

bool involution_check(const AffineBundle& bundle, const FluxDatum& flux) {
    DualPair once = dualize(bundle, flux);
    DualPair twice = dualize(once.dual_bundle, once.dual_flux);
    bool mono_eq = twice.dual_bundle.lambda.monodromies == bundle.lambda.monodromies;
    bool chern_eq = twice.dual_bundle.chern_rep == bundle.chern_rep;
    bool flux_eq = twice.dual_flux.xi == flux.xi && twice.dual_flux.k_rep == flux.k_rep &&
                   twice.dual_flux.h3_coords == flux.h3_coords;
    return mono_eq && chern_eq && flux_eq;
}

}  // namespace attb

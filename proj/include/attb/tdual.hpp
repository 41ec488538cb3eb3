#pragma once

#include "attb/lsss.hpp"

/* T-dualizability testing and construction of the topological T-dual pair
 * at the level of classification data (monodromy, Chern class, flux),
 * with verification of the exchange relations. */

namespace attb {

struct CoefficientMismatch : std::runtime_error {
    explicit CoefficientMismatch(const std::string& w) : std::runtime_error(w) {}
};

struct UnsupportedNonOrientableVertical : std::runtime_error {
    explicit UnsupportedNonOrientableVertical(const std::string& w) : std::runtime_error(w) {}
};

/* The T-dualizable flux datum (xi, k, h3): grading class pulled from the
 * base, fiberwise flux component in H^2(M, Lambda*), base flux component
 * in H^3(M, Z). */
struct FluxDatum {
    Z2Class xi;
    std::vector<Int> k_rep;       // cocycle in C^2(M, Lambda*)
    std::vector<Int> h3_coords;   // canonical coordinates in H^3(M, Z)
};

FluxDatum make_flux(const AffineBundle& bundle, const Z2Class& xi,
                    const std::vector<Int>& k_coords, const std::vector<Int>& h3_coords);

struct DualizabilityResult {
    bool dualizable = false;
    std::vector<Int> certificate;  // class of k in E3^{2,1}(pi)
    std::string obstruction;       // empty when dualizable
};

DualizabilityResult is_dualizable(const AffineBundle& bundle, const FluxDatum& flux);

struct RelationReport {
    bool xi_transport = false;      // xi-hat = xi + w1
    bool c_cup_chat_zero = false;   // c cup c-hat = 0 in H^4(M, Z)
    bool h_equals_chat = false;     // [h] = [c-hat] in E_inf^{2,1}(pi)
    bool hhat_equals_c = false;     // [h-hat] = [c] in E_inf^{2,1}(pi-hat)
    std::vector<std::string> notes;

    bool all_pass() const {
        return xi_transport && c_cup_chat_zero && h_equals_chat && hhat_equals_c;
    }
};

struct DualPair {
    AffineBundle bundle;
    FluxDatum flux;
    AffineBundle dual_bundle;
    FluxDatum dual_flux;
    RelationReport report;
};

/* Construct the T-dual: (dual monodromy, c-hat = [k]) with dual flux
 * (xi + w1, k-hat = c, h3). Strict mode rejects non-orientable vertical
 * bundles (w1(Lambda) != 0), permissive mode annotates the report. */
DualPair dualize(const AffineBundle& bundle, const FluxDatum& flux, bool strict = false);

RelationReport check_relations(const DualPair& pair);

/* dualize(dualize(.)) returns the original data entrywise under the
 * canonical identification (Lambda*)* = Lambda. */
bool involution_check(const AffineBundle& bundle, const FluxDatum& flux);

}  // namespace attb

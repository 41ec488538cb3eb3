#pragma once

#include <map>
#include <optional>

#include "attb/localsys.hpp"

/* Leray-Serre spectral sequence of an affine torus bundle: E2 page with
 * E2^{p,q} = H^p(M, Wedge^q Lambda*), d2 = contraction with the twisted
 * Chern class, E-infinity for the catalog bases, and assembly of the
 * total-space cohomology with extension-ambiguity flags. */

namespace attb {

struct AffineBundle {
    LocalSystem lambda;
    std::vector<Int> chern_rep;  // cocycle in C^2(M, Lambda)

    int fiber_rank() const { return lambda.rank; }
    const BaseSpace& base() const { return lambda.base; }
};

/* Build a bundle from canonical coordinates of c in H^2(M, Lambda). */
AffineBundle make_bundle(const LocalSystem& lambda, const std::vector<Int>& chern_coords);

struct PageEntry {
    PresentedSubquotient sub;  // subquotient of the ambient C^p(M, Wedge^q Lambda*)
    bool undetermined = false;
};

struct SpectralPage {
    int stage = 2;
    int pmax = 0, qmax = 0;
    std::vector<std::vector<PageEntry>> entries;  // [p][q]
    /* d2 maps in canonical coordinates, recorded when the page advances. */
    std::map<std::pair<int, int>, SubquotientMap> d2_maps;
    bool final_page = false;

    const PageEntry& at(int p, int q) const { return entries[p][q]; }
    FgAbGroup group(int p, int q) const { return entries[p][q].sub.group(); }
    bool has_undetermined() const;
};

SpectralPage e2_page(const AffineBundle& bundle);

/* Realize all d2 maps via contraction with the Chern class and turn the
 * page. Throws BoundaryNotInCycles on a sign-convention bug. */
SpectralPage apply_d2(const AffineBundle& bundle, const SpectralPage& page2);

/* For dim M <= 2 the E3 page is final. For dim M = 3 it is final exactly
 * when every potential d3 : E3^{0,q} -> E3^{3,q-2} has zero source or zero
 * target; otherwise the affected entries are flagged Undetermined. */
SpectralPage e_infinity(const AffineBundle& bundle, const SpectralPage& page3);

enum class ExtensionPolicy { Split, PDAssisted };

struct GradedPiece {
    int p = 0, q = 0;
    FgAbGroup group;
};

struct TotalCohomology {
    /* pieces[i] lists surviving E-infinity entries of total degree i,
     * deepest filtration step (largest p) first. */
    std::vector<std::vector<GradedPiece>> pieces;
    std::vector<FgAbGroup> assembled;
    std::vector<bool> extension_ambiguous;
    std::vector<std::string> notes;  // per-degree assembly notes
    bool undetermined = false;       // propagated from the page
};

TotalCohomology total_cohomology(const SpectralPage& final_page, ExtensionPolicy policy,
                                 bool total_space_orientable = false);

struct OrientationData {
    Z2Class w1_vertical;
    Z2Class w1_base;
    bool total_orientable = false;
};

OrientationData orientation_data(const AffineBundle& bundle);

/* Run e2 -> d2 -> e-infinity in one call. */
SpectralPage final_page(const AffineBundle& bundle);

/* The subquotient E3^{2,1} = H^2(M, Lambda*)/im(d2), home of the flux
 * certificate class used by T-dualization. */
PresentedSubquotient flux_certificate_space(const AffineBundle& bundle);

/* Structural helpers for edge-map checks. */
bool map_is_surjective(const SubquotientMap& m);

}  // namespace attb

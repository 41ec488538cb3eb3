#pragma once

#include "attb/catalog.hpp"

/* Twisted K-theory at desk scale: the Atiyah-Hirzebruch machine with
 * d3 = -(h cup .), and the flux-move machine (swap, shift, Euclidean
 * reduction) on catalog families. */

namespace attb {

struct ShiftUndefined : std::runtime_error {
    explicit ShiftUndefined(const std::string& w) : std::runtime_error(w) {}
};

struct Sq3Unjustified : std::runtime_error {
    explicit Sq3Unjustified(const std::string& w) : std::runtime_error(w) {}
};

struct TwistPair {
    long j = 0, k = 0;
    bool operator==(const TwistPair&) const = default;
};

struct Move {
    enum Kind { Swap, Shift } kind;
    long t = 0;  // shift multiplier (k -> k + t*j)
};

TwistPair swap_pair(const TwistPair& p);
TwistPair shift_pair(const TwistPair& p, long t = 1);  // ShiftUndefined when j = 0

struct NormalFormResult {
    TwistPair pair;           // (gcd(j,k), 0)
    std::vector<Move> moves;  // recorded path
};

NormalFormResult normal_form(const TwistPair& p);

/* Input to the AHSS: the graded cohomology of the total space together
 * with the d3 maps. moduli[p] lists the coordinate moduli of H^p (0 for a
 * free coordinate); for pipeline-built data the coordinates concatenate
 * the filtration pieces, deepest first. */
struct TwistedCohDatum {
    std::vector<FgAbGroup> h;             // H^0..H^d, canonical form
    std::vector<std::vector<Int>> moduli; // coordinate moduli per degree
    /* d3[p] : H^p -> H^{p+3} in the moduli coordinates; absent means zero. */
    std::map<int, IntMatrix> d3;
    bool sq3_assumed_zero = false;
    std::string sq3_justification;
    bool untwisted = false;    // the twist class vanishes (all d3 zero)
    bool h4_torsion_free = false;

    static TwistedCohDatum from_groups(std::vector<FgAbGroup> groups, bool untwisted);
};

struct KPiece {
    int degree = 0;
    FgAbGroup group;
};

struct KResult {
    std::vector<KPiece> even_pieces, odd_pieces;  // E4 survivors, deepest first
    FgAbGroup k0, k1;
    bool k0_ambiguous = false, k1_ambiguous = false;
    std::vector<std::string> notes;
};

/* Run the AHSS: E4^p = ker(d3 at p)/im(d3 into p), split assembly with
 * extension flags. Degrees >= 6 require an explicit Sq^3 justification.
 * Extensions that are provably split (free quotients; Ext = 0; the
 * untwisted line-bundle order argument in low dimension) are not
 * flagged. */
KResult ahss(const TwistedCohDatum& datum);

/* Build the datum for a catalog cell from the spectral-sequence pipeline:
 * graded groups from the final page, d3 blocks from page-level cup with
 * the flux representative. Fails (returns nullopt) when the page carries
 * an Undetermined flag. */
std::optional<TwistedCohDatum> catalog_datum(const catalog::Family& family, long j, long k);

struct KTableCell {
    TwistPair pair;
    NormalFormResult orbit;
    bool undetermined = false;  // page not final (d3 of the base sequence unknown)
    KResult raw;                // split-policy AHSS output
    KResult resolved;           // extensions resolved by move transport
    bool resolved_by_moves = false;
};

/* Compute one cell, resolving flagged extensions by transporting the
 * value along swap/shift moves to the orbit normal form (gcd, 0), where
 * the twist vanishes and the assembly is provably split. */
KTableCell ktable_cell(const catalog::Family& family, long j, long k);

struct KTable {
    std::string family;
    std::vector<KTableCell> cells;
};

KTable ktable(const catalog::Family& family, long jmin, long jmax, long kmin, long kmax);

struct MoveInvarianceReport {
    bool ok = true;
    bool used_override = false;  // hand-entered d3 data, marked in reports
    std::vector<std::string> violations;
    long orbits_checked = 0;
};

/* Assert that resolved K-groups agree across each swap/shift move orbit
 * (and that flag-free raw parities agree on the nose). An optional
 * override replaces the d3 matrix at one degree, for negative controls;
 * overridden data are marked in the report. */
MoveInvarianceReport move_invariance_check(const catalog::Family& family,
                                           const std::vector<TwistPair>& pairs,
                                           const std::map<int, IntMatrix>* d3_override = nullptr);

}  // namespace attb

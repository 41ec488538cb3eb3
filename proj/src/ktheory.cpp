#include "attb/ktheory.hpp"

#include <numeric>
#include <sstream>

namespace attb {

TwistPair swap_pair(const TwistPair& p) { return TwistPair{p.k, p.j}; }

TwistPair shift_pair(const TwistPair& p, long t) {
    if (p.j == 0) throw ShiftUndefined("the identification h_k = h_{k+j} needs j != 0");
    return TwistPair{p.j, p.k + t * p.j};
}

NormalFormResult normal_form(const TwistPair& start) {
    NormalFormResult r;
    r.pair = start;
    for (int guard = 0; guard < 256; ++guard) {
        long j = r.pair.j, k = r.pair.k;
        if (k == 0 && j >= 0) return r;
        if (k == 0 && j < 0) {
            /* (j,0) -> (j,-j) -> (-j,j) -> ... makes the lead positive */
            r.pair = shift_pair(r.pair, -1);
            r.moves.push_back(Move{Move::Shift, -1});
            r.pair = swap_pair(r.pair);
            r.moves.push_back(Move{Move::Swap, 0});
            continue;
        }
        if (j == 0) {
            r.pair = swap_pair(r.pair);
            r.moves.push_back(Move{Move::Swap, 0});
            continue;
        }
        /* reduce k into [0, |j|) by shifts, then swap */
        long aj = j < 0 ? -j : j;
        long rem = ((k % aj) + aj) % aj;
        long t = (rem - k) / j;
        if (t != 0) {
            r.pair = shift_pair(r.pair, t);
            r.moves.push_back(Move{Move::Shift, t});
        }
        r.pair = swap_pair(r.pair);
        r.moves.push_back(Move{Move::Swap, 0});
    }
    throw std::logic_error("normal_form did not terminate");
}

namespace {

/* coordinate moduli of a group in canonical order (free first) */
std::vector<Int> coord_moduli(const FgAbGroup& g) {
    std::vector<Int> m(size_t(g.free_rank), Int(0));
    for (const Int& d : g.invariant_factors) m.push_back(d);
    return m;
}

IntMatrix relation_lattice(const std::vector<Int>& moduli) {
    int n = int(moduli.size());
    int cnt = 0;
    for (const Int& d : moduli)
        if (d != 0) ++cnt;
    IntMatrix rel(n, cnt);
    int c = 0;
    for (int i = 0; i < n; ++i)
        if (moduli[i] != 0) {
            rel.at(i, c) = moduli[i];
            ++c;
        }
    return rel;
}

long coord_count(const FgAbGroup& g) {
    return g.free_rank + long(g.invariant_factors.size());
}

/* Assemble a parity from pieces ordered deepest-first; flags extensions
 * that are not provably split. */
void assemble(const std::vector<KPiece>& pieces, bool untwisted_split_ok, FgAbGroup& out,
              bool& ambiguous, std::vector<std::string>& notes, const char* parity) {
    FgAbGroup acc;
    ambiguous = false;
    for (const auto& piece : pieces) {
        bool torsion = !piece.group.invariant_factors.empty();
        if (torsion && !acc.is_trivial() && !ext_group(piece.group.torsion(), acc).is_trivial()) {
            if (untwisted_split_ok) {
                notes.push_back(std::string(parity) +
                                ": torsion lifts split (untwisted datum, low dimension: torsion "
                                "classes lift to line-bundle classes of the same order)");
            } else {
                ambiguous = true;
            }
        }
        acc = acc.direct_sum(piece.group);
    }
    out = acc;
}

}  // namespace

TwistedCohDatum TwistedCohDatum::from_groups(std::vector<FgAbGroup> groups, bool untwisted_in) {
    TwistedCohDatum d;
    d.h = std::move(groups);
    for (const auto& g : d.h) d.moduli.push_back(coord_moduli(g));
    int dim = int(d.h.size()) - 1;
    d.sq3_assumed_zero = dim <= 5;
    d.sq3_justification =
        dim <= 5 ? "total dimension <= 5: the integral Steenrod operation vanishes on degrees <= 2"
                 : "";
    d.untwisted = untwisted_in;
    d.h4_torsion_free = dim < 4 || d.h[4].invariant_factors.empty();
    return d;
}

KResult ahss(const TwistedCohDatum& datum) {
    int d = int(datum.h.size()) - 1;
    if (d >= 6 && !datum.sq3_assumed_zero)
        throw Sq3Unjustified("total dimension >= 6: supply a Sq^3 justification");
    if (datum.moduli.size() != datum.h.size())
        throw std::invalid_argument("datum moduli/groups size mismatch");

    /* E4^p as a subquotient of the coordinate lattice of H^p */
    std::vector<FgAbGroup> e4(d + 1);
    for (int p = 0; p <= d; ++p) {
        IntMatrix rel = relation_lattice(datum.moduli[p]);
        int n = int(datum.moduli[p].size());
        IntMatrix cycles = IntMatrix::identity(n);
        if (auto it = datum.d3.find(p); it != datum.d3.end() && p + 3 <= d) {
            const IntMatrix& out = it->second;
            if (out.cols() != n || out.rows() != int(datum.moduli[p + 3].size()))
                throw std::invalid_argument("d3 matrix shape mismatch at degree " +
                                            std::to_string(p));
            cycles = lattice_preimage(out, relation_lattice(datum.moduli[p + 3]));
        }
        IntMatrix boundaries = rel;
        if (auto it = datum.d3.find(p - 3); it != datum.d3.end())
            boundaries = lattice_sum(boundaries, it->second);
        e4[p] = PresentedSubquotient::quotient(cycles, boundaries).group();
    }

    /* d3 composes to zero in range: H^{p-3} -> H^p -> H^{p+3} needs both
     * maps; with d <= 5 at most one is present, but verify anyway. */
    for (auto& [p, m] : datum.d3) {
        auto next = datum.d3.find(p + 3);
        if (next == datum.d3.end() || p + 6 > d) continue;
        IntMatrix comp = next->second * m;
        /* composite must vanish modulo the relations of H^{p+6} */
        IntMatrix rel = relation_lattice(datum.moduli[p + 6]);
        for (int j = 0; j < comp.cols(); ++j)
            if (!lattice_contains(rel, comp.col_vec(j)))
                throw std::logic_error("d3 o d3 != 0");
    }

    KResult r;
    for (int p = d; p >= 0; --p) {
        if (e4[p].is_trivial()) continue;
        if (p % 2 == 0) r.even_pieces.push_back(KPiece{p, e4[p]});
        else r.odd_pieces.push_back(KPiece{p, e4[p]});
    }
    bool untwisted_ok = datum.untwisted && d <= 5 && datum.h4_torsion_free;
    assemble(r.even_pieces, untwisted_ok, r.k0, r.k0_ambiguous, r.notes, "K^0");
    /* the line-bundle order argument is specific to K^0 */
    assemble(r.odd_pieces, false, r.k1, r.k1_ambiguous, r.notes, "K^1");
    return r;
}

std::optional<TwistedCohDatum> catalog_datum(const catalog::Family& family, long j, long k) {
    AffineBundle b = family.bundle(j);
    FluxDatum flux = family.flux(b, k);
    SpectralPage fin = final_page(b);
    if (!fin.final_page) return std::nullopt;

    TotalCohomology tot = total_cohomology(fin, ExtensionPolicy::Split);
    TwistedCohDatum datum;
    datum.h = tot.assembled;
    int d = int(datum.h.size()) - 1;
    /* piece-concatenated coordinates, deepest filtration step first */
    datum.moduli.resize(d + 1);
    for (int p = 0; p <= d; ++p)
        for (const auto& piece : tot.pieces[p]) {
            for (long i = 0; i < piece.group.free_rank; ++i) datum.moduli[p].push_back(Int(0));
            for (const Int& f : piece.group.invariant_factors) datum.moduli[p].push_back(f);
        }
    datum.sq3_assumed_zero = d <= 5;
    datum.sq3_justification =
        "total dimension <= 5: the integral Steenrod operation vanishes on degrees <= 2";
    datum.h4_torsion_free = d < 4 || datum.h[4].invariant_factors.empty();

    bool zero_flux = true;
    for (const Int& v : flux.k_rep)
        if (v != 0) zero_flux = false;
    /* the twist class is k mod the d2 image; detect honest untwistedness */
    auto cert = flux_certificate_space(b).coordinates(flux.k_rep);
    bool zero_class = true;
    for (const Int& v : cert)
        if (v != 0) zero_class = false;
    datum.untwisted = zero_flux || zero_class;

    if (!datum.untwisted) {
        /* d3 blocks: piece (p', q') of degree p pairs with the flux class
         * into piece (p'+2, q'+1) of degree p+3. */
        for (int p = 0; p + 3 <= d; ++p) {
            long rows = long(datum.moduli[p + 3].size());
            long cols = long(datum.moduli[p].size());
            if (rows == 0 || cols == 0) continue;
            IntMatrix m{int(rows), int(cols)};
            bool nonzero = false;
            long col_off = 0;
            for (const auto& src_piece : tot.pieces[p]) {
                long src_n = coord_count(src_piece.group);
                /* locate the target piece (p'+2, q'+1) and its row offset */
                long row_off = 0;
                bool found = false;
                for (const auto& tgt_piece : tot.pieces[p + 3]) {
                    if (tgt_piece.p == src_piece.p + 2 && tgt_piece.q == src_piece.q + 1) {
                        found = true;
                        break;
                    }
                    row_off += coord_count(tgt_piece.group);
                }
                if (found && src_piece.q + 1 <= fin.qmax && src_piece.p + 2 <= fin.pmax) {
                    const auto& src_sub = fin.at(src_piece.p, src_piece.q).sub;
                    const auto& tgt_sub = fin.at(src_piece.p + 2, src_piece.q + 1).sub;
                    /* ambient flux-cup matrix restricted to the pieces */
                    int amb_src = src_sub.ambient_rank();
                    int amb_tgt = tgt_sub.ambient_rank();
                    IntMatrix f(amb_tgt, amb_src);
                    for (int c2 = 0; c2 < amb_src; ++c2) {
                        std::vector<Int> e(amb_src, Int(0));
                        e[c2] = 1;
                        auto img = cup_with_flux(b.lambda, flux.k_rep, src_piece.p, src_piece.q, e);
                        if (img.empty()) img.assign(amb_tgt, Int(0));
                        for (int r2 = 0; r2 < amb_tgt; ++r2) f.at(r2, c2) = img[r2];
                    }
                    SubquotientMap block = induced_map(f, src_sub, tgt_sub);
                    for (int r2 = 0; r2 < block.matrix.rows(); ++r2)
                        for (int c2 = 0; c2 < block.matrix.cols(); ++c2) {
                            m.at(int(row_off + r2), int(col_off + c2)) = block.matrix.at(r2, c2);
                            if (block.matrix.at(r2, c2) != 0) nonzero = true;
                        }
                }
                col_off += src_n;
            }
            if (nonzero) datum.d3[p] = std::move(m);
        }
    }
    return datum;
}

KTableCell ktable_cell(const catalog::Family& family, long j, long k) {
    KTableCell cell;
    cell.pair = TwistPair{j, k};
    cell.orbit = normal_form(cell.pair);
    auto datum = catalog_datum(family, j, k);
    if (!datum) {
        cell.undetermined = true;
        return cell;
    }
    cell.raw = ahss(*datum);
    cell.resolved = cell.raw;
    if (cell.raw.k0_ambiguous || cell.raw.k1_ambiguous) {
        /* transport along the recorded moves to (gcd, 0), where the twist
         * vanishes and the assembly is provably split */
        auto nf_datum = catalog_datum(family, cell.orbit.pair.j, cell.orbit.pair.k);
        if (nf_datum) {
            KResult nf = ahss(*nf_datum);
            if (!nf.k0_ambiguous && !nf.k1_ambiguous) {
                cell.resolved.k0 = nf.k0;
                cell.resolved.k1 = nf.k1;
                cell.resolved.k0_ambiguous = false;
                cell.resolved.k1_ambiguous = false;
                cell.resolved_by_moves = true;
                std::ostringstream os;
                os << "extensions resolved by move transport to (" << cell.orbit.pair.j << ","
                   << cell.orbit.pair.k << ") [" << cell.orbit.moves.size() << " moves]";
                cell.resolved.notes.push_back(os.str());
            }
        }
    }
    return cell;
}

KTable ktable(const catalog::Family& family, long jmin, long jmax, long kmin, long kmax) {
    KTable t;
    t.family = family.name;
    for (long j = jmin; j <= jmax; ++j)
        for (long k = kmin; k <= kmax; ++k) t.cells.push_back(ktable_cell(family, j, k));
    return t;
}

namespace {

std::string cell_desc(const KResult& r) {
    return "K0=" + r.k0.to_string() + (r.k0_ambiguous ? "*" : "") + " K1=" + r.k1.to_string() +
           (r.k1_ambiguous ? "*" : "");
}

KResult ahss_with_override(const catalog::Family& family, long j, long k,
                           const std::map<int, IntMatrix>* d3_override, bool& ok) {
    auto datum = catalog_datum(family, j, k);
    ok = datum.has_value();
    if (!ok) return KResult{};
    if (d3_override) {
        for (const auto& [p, m] : *d3_override) datum->d3[p] = m;
        datum->untwisted = false;
    }
    return ahss(*datum);
}

}  // namespace

MoveInvarianceReport move_invariance_check(const catalog::Family& family,
                                           const std::vector<TwistPair>& pairs,
                                           const std::map<int, IntMatrix>* d3_override) {
    MoveInvarianceReport rep;
    rep.used_override = d3_override != nullptr;
    auto resolved_of = [&](const TwistPair& p, bool& ok) {
        if (d3_override) return ahss_with_override(family, p.j, p.k, d3_override, ok);
        KTableCell c = ktable_cell(family, p.j, p.k);
        ok = !c.undetermined;
        return c.resolved;
    };
    for (const TwistPair& p : pairs) {
        bool ok0 = false;
        KResult base = resolved_of(p, ok0);
        if (!ok0) continue;
        ++rep.orbits_checked;
        std::vector<std::pair<std::string, TwistPair>> neighbors;
        if (family.swap_legal(p.j, p.k)) neighbors.emplace_back("swap", swap_pair(p));
        if (p.j != 0) neighbors.emplace_back("shift", shift_pair(p));
        for (auto& [label, q] : neighbors) {
            bool okq = false;
            KResult other = resolved_of(q, okq);
            if (!okq) continue;
            bool same = base.k0 == other.k0 && base.k1 == other.k1;
            if (!same) {
                std::ostringstream os;
                os << family.name << " (" << p.j << "," << p.k << ") vs " << label << " ("
                   << q.j << "," << q.k << "): " << cell_desc(base) << " != " << cell_desc(other);
                rep.violations.push_back(os.str());
                rep.ok = false;
            }
        }
    }
    return rep;
}

}  // namespace attb

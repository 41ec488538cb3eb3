#include "attb/abelian.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace attb {

IntMatrix::IntMatrix(int rows, int cols, std::vector<long> entries)
    : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {
    if (entries.size() != a_.size()) throw std::invalid_argument("entry count != rows*cols");
    for (size_t i = 0; i < entries.size(); ++i) a_[i] = Int(entries[i]);
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::column(const std::vector<Int>& v) {
    IntMatrix m(int(v.size()), 1);
    for (int i = 0; i < int(v.size()); ++i) m.at(i, 0) = v[i];
    return m;
}

IntMatrix IntMatrix::from_rows(std::initializer_list<std::initializer_list<long>> rows) {
    int r = int(rows.size());
    int c = r ? int(rows.begin()->size()) : 0;
    IntMatrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (int(row.size()) != c) throw std::invalid_argument("ragged rows");
        int j = 0;
        for (long x : row) m.at(i, j++) = Int(x);
        ++i;
    }
    return m;
}

bool IntMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matmul shape mismatch");
    IntMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Int& aik = at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < o.cols_; ++j) r.at(i, j) += aik * o.at(k, j);
        }
    return r;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch");
    IntMatrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch");
    IntMatrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
    return r;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

IntMatrix IntMatrix::col(int j) const {
    IntMatrix r(rows_, 1);
    for (int i = 0; i < rows_; ++i) r.at(i, 0) = at(i, j);
    return r;
}

std::vector<Int> IntMatrix::col_vec(int j) const {
    std::vector<Int> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = at(i, j);
    return v;
}

IntMatrix IntMatrix::hcat(const IntMatrix& o) const {
    if (rows_ != o.rows_) throw std::invalid_argument("hcat shape mismatch");
    IntMatrix r(rows_, cols_ + o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
        for (int j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
    }
    return r;
}

void IntMatrix::swap_rows(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void IntMatrix::swap_cols(int i, int j) {
    if (i == j) return;
    for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
}

void IntMatrix::add_row_multiple(int dst, int src, const Int& q) {
    if (q == 0) return;
    for (int c = 0; c < cols_; ++c) at(dst, c) += q * at(src, c);
}

void IntMatrix::add_col_multiple(int dst, int src, const Int& q) {
    if (q == 0) return;
    for (int r = 0; r < rows_; ++r) at(r, dst) += q * at(r, src);
}

void IntMatrix::negate_row(int i) {
    for (int c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
}

void IntMatrix::negate_col(int j) {
    for (int r = 0; r < rows_; ++r) at(r, j) = -at(r, j);
}

Int IntMatrix::det() const {
    if (rows_ != cols_) throw std::invalid_argument("det of non-square matrix");
    int n = rows_;
    if (n == 0) return 1;
    IntMatrix m = *this;
    Int sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Int num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                m.at(i, j) = num / prev;  // Bareiss: division is exact
            }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j).get_str();
    }
    os << "]";
    return os.str();
}

std::vector<Int> mat_vec(const IntMatrix& m, const std::vector<Int>& v) {
    if (int(v.size()) != m.cols()) throw std::invalid_argument("mat_vec shape mismatch");
    std::vector<Int> r(m.rows(), Int(0));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m.at(i, j) != 0) r[i] += m.at(i, j) * v[j];
    return r;
}

FgAbGroup FgAbGroup::cyclic(const Int& n) {
    Int a = abs(n);
    if (a == 0) return FgAbGroup{1, {}};
    if (a == 1) return FgAbGroup{0, {}};
    return FgAbGroup{0, {a}};
}

FgAbGroup FgAbGroup::direct_sum(const FgAbGroup& o) const {
    std::vector<Int> fac = invariant_factors;
    fac.insert(fac.end(), o.invariant_factors.begin(), o.invariant_factors.end());
    return canonical_group(free_rank + o.free_rank, std::move(fac));
}

std::string FgAbGroup::to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank == 1) { os << "Z"; first = false; }
    else if (free_rank > 1) { os << "Z^" << free_rank; first = false; }
    for (const Int& d : invariant_factors) {
        os << (first ? "" : " + ") << "Z/" << d.get_str();
        first = false;
    }
    return os.str();
}

FgAbGroup canonical_group(long free_rank, std::vector<Int> factors) {
    std::vector<Int> fs;
    for (Int& d : factors) {
        Int a = abs(d);
        if (a == 0) ++free_rank;
        else if (a > 1) fs.push_back(a);
    }
    /* Re-chain the factors: repeatedly replace (a, b) by (gcd, lcm). */
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i + 1 < fs.size(); ++i)
            for (size_t j = i + 1; j < fs.size(); ++j) {
                if (fs[j] % fs[i] == 0) continue;
                Int g = gcd(fs[i], fs[j]);
                Int l = fs[i] / g * fs[j];
                fs[i] = g;
                fs[j] = l;
                changed = true;
            }
        std::sort(fs.begin(), fs.end());
        fs.erase(std::remove_if(fs.begin(), fs.end(), [](const Int& x) { return x == 1; }), fs.end());
    }
    return FgAbGroup{free_rank, fs};
}

std::vector<Int> SmithResult::diagonal() const {
    int n = std::min(D.rows(), D.cols());
    std::vector<Int> d(n);
    for (int i = 0; i < n; ++i) d[i] = D.at(i, i);
    return d;
}

namespace {

/* Pick the pivot in the trailing submatrix starting at (t, t): smallest
 * nonzero absolute value, ties broken by lowest (row, col). */
bool find_pivot(const IntMatrix& d, int t, int& pr, int& pc) {
    bool found = false;
    Int best;
    for (int i = t; i < d.rows(); ++i)
        for (int j = t; j < d.cols(); ++j) {
            if (d.at(i, j) == 0) continue;
            Int a = abs(d.at(i, j));
            if (!found || a < best) {
                found = true;
                best = a;
                pr = i;
                pc = j;
            }
        }
    return found;
}

/* Diagonalize from position t onward (no divisibility pass). */
void eliminate_from(IntMatrix& d, IntMatrix& u, IntMatrix& v, int t) {
    int n = std::min(d.rows(), d.cols());
    for (; t < n; ++t) {
        int pr, pc;
        if (!find_pivot(d, t, pr, pc)) break;
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);
        for (;;) {
            bool clean = true;
            for (int i = t + 1; i < d.rows(); ++i) {
                if (d.at(i, t) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), d.at(i, t).get_mpz_t(), d.at(t, t).get_mpz_t());
                d.add_row_multiple(i, t, -q);
                u.add_row_multiple(i, t, -q);
                if (d.at(i, t) != 0) clean = false;
            }
            for (int j = t + 1; j < d.cols(); ++j) {
                if (d.at(t, j) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), d.at(t, j).get_mpz_t(), d.at(t, t).get_mpz_t());
                d.add_col_multiple(j, t, -q);
                v.add_col_multiple(j, t, -q);
                if (d.at(t, j) != 0) clean = false;
            }
            if (!clean) {
                /* Residues became new (smaller) candidates; re-pivot. */
                int rr, cc;
                find_pivot(d, t, rr, cc);
                d.swap_rows(t, rr);
                u.swap_rows(t, rr);
                d.swap_cols(t, cc);
                v.swap_cols(t, cc);
                continue;
            }
            break;
        }
    }
}

}  // namespace

SmithResult smith_normal_form(const IntMatrix& a) {
    SmithResult s;
    s.D = a;
    s.U = IntMatrix::identity(a.rows());
    s.V = IntMatrix::identity(a.cols());
    eliminate_from(s.D, s.U, s.V, 0);

    int n = std::min(a.rows(), a.cols());
    for (int i = 0; i < n; ++i)
        if (s.D.at(i, i) < 0) {
            s.D.negate_row(i);
            s.U.negate_row(i);
        }

    /* Enforce d_i | d_{i+1}. */
    for (;;) {
        int bad = -1;
        for (int i = 0; i + 1 < n; ++i) {
            if (s.D.at(i + 1, i + 1) == 0) break;
            if (s.D.at(i, i) == 0 || s.D.at(i + 1, i + 1) % s.D.at(i, i) != 0) { bad = i; break; }
        }
        if (bad < 0) break;
        s.D.add_col_multiple(bad, bad + 1, 1);
        s.V.add_col_multiple(bad, bad + 1, 1);
        eliminate_from(s.D, s.U, s.V, bad);
        for (int i = 0; i < n; ++i)
            if (s.D.at(i, i) < 0) {
                s.D.negate_row(i);
                s.U.negate_row(i);
            }
    }

    s.rank = 0;
    for (int i = 0; i < n; ++i)
        if (s.D.at(i, i) != 0) ++s.rank;
    return s;
}

FgAbGroup cokernel(const IntMatrix& a) {
    SmithResult s = smith_normal_form(a);
    std::vector<Int> fac;
    for (const Int& d : s.diagonal())
        if (d != 0) fac.push_back(d);
    return canonical_group(a.rows() - s.rank, std::move(fac));
}

IntMatrix kernel_lattice(const IntMatrix& a) {
    SmithResult s = smith_normal_form(a);
    std::vector<int> zero_cols;
    int n = std::min(a.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j)
        if (j >= n || s.D.at(j, j) == 0) zero_cols.push_back(j);
    IntMatrix k(a.cols(), int(zero_cols.size()));
    for (size_t c = 0; c < zero_cols.size(); ++c)
        for (int i = 0; i < a.cols(); ++i) k.at(i, int(c)) = s.V.at(i, zero_cols[c]);
    return hermite_column_basis(k);
}

IntMatrix hermite_column_basis(const IntMatrix& m) {
    IntMatrix h = m;
    int rows = h.rows(), cols = h.cols();
    int c = 0;  // next pivot column
    std::vector<std::pair<int, int>> pivots;
    for (int r = 0; r < rows && c < cols; ++r) {
        /* Euclid across columns c..end on row r. */
        for (;;) {
            int nz = -1;
            Int best;
            for (int j = c; j < cols; ++j) {
                if (h.at(r, j) == 0) continue;
                Int a = abs(h.at(r, j));
                if (nz < 0 || a < best) { nz = j; best = a; }
            }
            if (nz < 0) break;
            h.swap_cols(c, nz);
            bool clean = true;
            for (int j = c + 1; j < cols; ++j) {
                if (h.at(r, j) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), h.at(r, j).get_mpz_t(), h.at(r, c).get_mpz_t());
                h.add_col_multiple(j, c, -q);
                if (h.at(r, j) != 0) clean = false;
            }
            if (clean) break;
        }
        if (h.at(r, c) != 0) {
            if (h.at(r, c) < 0) h.negate_col(c);
            /* Reduce earlier columns at this row into [0, pivot). */
            for (int j = 0; j < c; ++j) {
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), h.at(r, j).get_mpz_t(), h.at(r, c).get_mpz_t());
                h.add_col_multiple(j, c, -q);
            }
            pivots.emplace_back(r, c);
            ++c;
        }
    }
    /* Drop zero columns (those past the last pivot). */
    IntMatrix out(rows, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < rows; ++i) out.at(i, j) = h.at(i, j);
    return out;
}

std::optional<std::vector<Int>> solve_integer(const IntMatrix& m, const std::vector<Int>& b) {
    if (int(b.size()) != m.rows()) throw std::invalid_argument("solve shape mismatch");
    SmithResult s = smith_normal_form(m);
    std::vector<Int> ub = mat_vec(s.U, b);
    std::vector<Int> y(m.cols(), Int(0));
    int n = std::min(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i) {
        if (i < n && s.D.at(i, i) != 0) {
            if (ub[i] % s.D.at(i, i) != 0) return std::nullopt;
            y[i] = ub[i] / s.D.at(i, i);
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    return mat_vec(s.V, y);
}

bool lattice_contains(const IntMatrix& m, const std::vector<Int>& b) {
    return solve_integer(m, b).has_value();
}

IntMatrix lattice_preimage(const IntMatrix& a, const IntMatrix& l) {
    if (l.cols() == 0) return kernel_lattice(a);
    IntMatrix stacked = a.hcat(l);
    IntMatrix k = kernel_lattice(stacked);  // (cols(a)+cols(l)) x r
    IntMatrix proj(a.cols(), k.cols());
    for (int i = 0; i < a.cols(); ++i)
        for (int j = 0; j < k.cols(); ++j) proj.at(i, j) = k.at(i, j);
    return hermite_column_basis(proj);
}

IntMatrix lattice_sum(const IntMatrix& a, const IntMatrix& b) {
    return hermite_column_basis(a.hcat(b));
}

IntMatrix inverse_unimodular(const IntMatrix& u) {
    int n = u.rows();
    if (n != u.cols()) throw std::invalid_argument("inverse of non-square matrix");
    IntMatrix inv(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<Int> e(n, Int(0));
        e[j] = 1;
        auto x = solve_integer(u, e);
        if (!x) throw std::invalid_argument("matrix is not unimodular");
        for (int i = 0; i < n; ++i) inv.at(i, j) = (*x)[i];
    }
    return inv;
}

PresentedSubquotient PresentedSubquotient::quotient(const IntMatrix& cycles,
                                                    const IntMatrix& boundaries) {
    if (boundaries.rows() != cycles.rows())
        throw std::invalid_argument("cycles/boundaries ambient mismatch");
    PresentedSubquotient q;
    q.ambient_rank_ = cycles.rows();
    q.cycles_ = hermite_column_basis(cycles);
    q.boundaries_ = hermite_column_basis(boundaries);

    int z = q.cycles_.cols();
    /* Express each boundary in cycle coordinates. */
    IntMatrix rel(z, q.boundaries_.cols());
    for (int j = 0; j < q.boundaries_.cols(); ++j) {
        auto x = solve_integer(q.cycles_, q.boundaries_.col_vec(j));
        if (!x)
            throw BoundaryNotInCycles("boundary column " + std::to_string(j) +
                                      " is not in the cycle lattice (d^2 != 0?)");
        for (int i = 0; i < z; ++i) rel.at(i, j) = (*x)[i];
    }

    SmithResult s = smith_normal_form(rel);
    q.u_ = s.U;
    q.u_inv_ = inverse_unimodular(s.U);
    q.diag_.assign(z, Int(0));
    int n = std::min(rel.rows(), rel.cols());
    for (int i = 0; i < n; ++i) q.diag_[i] = s.D.at(i, i);

    std::vector<Int> fac;
    for (int i = 0; i < z; ++i) {
        if (q.diag_[i] == 0) q.free_rows_.push_back(i);
        else if (q.diag_[i] > 1) q.tors_rows_.push_back(i);
    }
    /* Torsion coordinates come after free ones; record group accordingly. */
    for (int i : q.tors_rows_) fac.push_back(q.diag_[i]);
    q.group_ = canonical_group(long(q.free_rows_.size()), fac);
    /* canonical_group sorts factors; keep row order aligned with the sorted
     * chain (SNF already emits factors in divisibility order, so the order
     * is unchanged; assert to be safe). */
    assert(q.group_.invariant_factors.size() == q.tors_rows_.size());
    return q;
}

PresentedSubquotient PresentedSubquotient::of_ambient(int ambient_rank,
                                                      const IntMatrix& boundaries) {
    return quotient(IntMatrix::identity(ambient_rank), boundaries);
}

bool PresentedSubquotient::contains(const std::vector<Int>& ambient) const {
    return lattice_contains(cycles_, ambient);
}

std::vector<Int> PresentedSubquotient::coordinates(const std::vector<Int>& ambient) const {
    auto y = solve_integer(cycles_, ambient);
    if (!y) throw NotWellDefined("vector is not in the cycle lattice");
    std::vector<Int> w = mat_vec(u_, *y);
    std::vector<Int> out;
    out.reserve(free_rows_.size() + tors_rows_.size());
    for (int i : free_rows_) out.push_back(w[i]);
    for (int i : tors_rows_) {
        Int r;
        mpz_fdiv_r(r.get_mpz_t(), w[i].get_mpz_t(), diag_[i].get_mpz_t());
        out.push_back(r);
    }
    return out;
}

std::vector<Int> PresentedSubquotient::generator_rep(int i) const {
    int nf = int(free_rows_.size());
    int row = i < nf ? free_rows_[i] : tors_rows_[i - nf];
    std::vector<Int> e(u_inv_.rows(), Int(0));
    for (int r = 0; r < u_inv_.rows(); ++r) e[r] = u_inv_.at(r, row);
    return mat_vec(cycles_, e);
}

bool PresentedSubquotient::is_zero_class(const std::vector<Int>& ambient) const {
    auto c = coordinates(ambient);
    return std::all_of(c.begin(), c.end(), [](const Int& x) { return x == 0; });
}

SubquotientMap induced_map(const IntMatrix& f, const PresentedSubquotient& src,
                           const PresentedSubquotient& tgt) {
    if (f.cols() != src.ambient_rank() || f.rows() != tgt.ambient_rank())
        throw std::invalid_argument("induced_map shape mismatch");
    /* Boundaries must map into boundaries. */
    for (int j = 0; j < src.boundary_basis().cols(); ++j) {
        auto img = mat_vec(f, src.boundary_basis().col_vec(j));
        if (!lattice_contains(tgt.boundary_basis(), img))
            throw NotWellDefined("map does not send boundaries into boundaries");
    }
    int nsrc = int(src.group().free_rank + long(src.group().invariant_factors.size()));
    int ntgt = int(tgt.group().free_rank + long(tgt.group().invariant_factors.size()));
    IntMatrix m(ntgt, nsrc);
    for (int j = 0; j < nsrc; ++j) {
        auto rep = src.generator_rep(j);
        auto img = mat_vec(f, rep);
        if (!tgt.contains(img)) throw NotWellDefined("map does not send cycles into cycles");
        auto c = tgt.coordinates(img);
        for (int i = 0; i < ntgt; ++i) m.at(i, j) = c[i];
    }
    return SubquotientMap{std::move(m), src.group(), tgt.group()};
}

SubquotientMap compose(const SubquotientMap& g, const SubquotientMap& f) {
    if (!(f.target == g.source)) throw std::invalid_argument("compose: middle groups differ");
    IntMatrix m = g.matrix * f.matrix;
    long nf = g.target.free_rank;
    for (size_t t = 0; t < g.target.invariant_factors.size(); ++t) {
        const Int& d = g.target.invariant_factors[t];
        for (int j = 0; j < m.cols(); ++j) {
            Int r;
            mpz_fdiv_r(r.get_mpz_t(), m.at(int(nf + t), j).get_mpz_t(), d.get_mpz_t());
            m.at(int(nf + t), j) = r;
        }
    }
    return SubquotientMap{std::move(m), f.source, g.target};
}

long euler_characteristic(const std::vector<FgAbGroup>& graded) {
    long chi = 0;
    int sign = 1;
    for (const auto& g : graded) {
        chi += sign * g.free_rank;
        sign = -sign;
    }
    return chi;
}

FgAbGroup ext_group(const FgAbGroup& a, const FgAbGroup& b) {
    /* Ext(Z, -) = 0; Ext(Z_n, Z) = Z_n; Ext(Z_n, Z_m) = Z_gcd(n,m). */
    std::vector<Int> fac;
    for (const Int& n : a.invariant_factors) {
        for (long i = 0; i < b.free_rank; ++i) fac.push_back(n);
        for (const Int& m : b.invariant_factors) fac.push_back(gcd(n, m));
    }
    return canonical_group(0, fac);
}

}  // namespace attb

#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/* Exact integer linear algebra: Smith normal form, finitely generated
 * abelian groups in canonical invariant-factor form, and homomorphisms
 * between presented subquotients of free lattices.
 *
 * All arithmetic is arbitrary precision (GMP); nothing here ever touches
 * floating point. */

namespace attb {

using Int = mpz_class;

struct BoundaryNotInCycles : std::runtime_error {
    explicit BoundaryNotInCycles(const std::string& what) : std::runtime_error(what) {}
};

struct NotWellDefined : std::runtime_error {
    explicit NotWellDefined(const std::string& what) : std::runtime_error(what) {}
};

/* Dense integer matrix, row-major. */
class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, Int(0)) {}
    IntMatrix(int rows, int cols, std::vector<long> entries);

    static IntMatrix identity(int n);
    static IntMatrix zero(int rows, int cols) { return IntMatrix(rows, cols); }
    static IntMatrix column(const std::vector<Int>& v);
    static IntMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Int& at(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const Int& at(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    bool is_zero() const;
    bool operator==(const IntMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix transpose() const;
    IntMatrix col(int j) const;
    std::vector<Int> col_vec(int j) const;

    /* Columns of `this` followed by columns of `o`. */
    IntMatrix hcat(const IntMatrix& o) const;

    void swap_rows(int i, int j);
    void swap_cols(int i, int j);
    void add_row_multiple(int dst, int src, const Int& q);  // row_dst += q * row_src
    void add_col_multiple(int dst, int src, const Int& q);
    void negate_row(int i);
    void negate_col(int j);

    /* Exact determinant (Bareiss), square matrices only. */
    Int det() const;

    std::string to_string() const;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

std::vector<Int> mat_vec(const IntMatrix& m, const std::vector<Int>& v);

/* Finitely generated abelian group in canonical form: Z^free_rank plus
 * cyclic factors d_1 | d_2 | ... with every d_i >= 2. */
struct FgAbGroup {
    long free_rank = 0;
    std::vector<Int> invariant_factors;

    static FgAbGroup free_group(long rank) { return FgAbGroup{rank, {}}; }
    static FgAbGroup cyclic(const Int& n);  // Z_n, n = 0 means Z, n = 1 trivial

    bool is_trivial() const { return free_rank == 0 && invariant_factors.empty(); }
    bool operator==(const FgAbGroup& o) const = default;

    FgAbGroup direct_sum(const FgAbGroup& o) const;
    /* Torsion subgroup as a group of its own. */
    FgAbGroup torsion() const { return FgAbGroup{0, invariant_factors}; }

    /* Canonical print form, e.g. "Z^2 + Z/4", "Z", "Z/2", "0". */
    std::string to_string() const;
};

/* Recanonicalize an arbitrary invariant-factor list (drops units, folds
 * zeros into the free rank, enforces the divisibility chain). */
FgAbGroup canonical_group(long free_rank, std::vector<Int> factors);

struct SmithResult {
    IntMatrix U, D, V;  // U * A * V == D
    int rank = 0;       // number of nonzero diagonal entries
    std::vector<Int> diagonal() const;
};

/* Smith normal form with deterministic pivoting: the pivot is the nonzero
 * entry of smallest absolute value, ties broken by lowest (row, col). */
SmithResult smith_normal_form(const IntMatrix& a);

/* Z^rows / column-span(a) in canonical form. */
FgAbGroup cokernel(const IntMatrix& a);

/* Columns form a basis of { x : a x = 0 }, in column Hermite form. */
IntMatrix kernel_lattice(const IntMatrix& a);

/* Canonical column Hermite basis of the lattice spanned by the columns. */
IntMatrix hermite_column_basis(const IntMatrix& m);

/* Solve m x = b over the integers. */
std::optional<std::vector<Int>> solve_integer(const IntMatrix& m, const std::vector<Int>& b);

/* Does the column vector lie in the lattice spanned by the columns of m? */
bool lattice_contains(const IntMatrix& m, const std::vector<Int>& b);

/* { x : a x in lattice(l) }, as a column basis. */
IntMatrix lattice_preimage(const IntMatrix& a, const IntMatrix& l);

/* Column span of [a | b] in Hermite form. */
IntMatrix lattice_sum(const IntMatrix& a, const IntMatrix& b);

/* Inverse of a unimodular integer matrix. */
IntMatrix inverse_unimodular(const IntMatrix& u);

/* A subquotient cycles/boundaries of an ambient Z^n presented by lattice
 * bases, together with the projection onto canonical coordinates.
 *
 * Canonical coordinates list the free generators first, then one
 * coordinate per invariant factor (residues normalized to [0, d)). */
class PresentedSubquotient {
  public:
    PresentedSubquotient() = default;

    /* Requires every boundary column to lie in the cycle lattice. */
    static PresentedSubquotient quotient(const IntMatrix& cycles, const IntMatrix& boundaries);
    /* Full lattice Z^n modulo boundaries. */
    static PresentedSubquotient of_ambient(int ambient_rank, const IntMatrix& boundaries);

    int ambient_rank() const { return ambient_rank_; }
    const IntMatrix& cycle_basis() const { return cycles_; }
    const IntMatrix& boundary_basis() const { return boundaries_; }
    const FgAbGroup& group() const { return group_; }

    bool contains(const std::vector<Int>& ambient) const;

    /* Ambient cycle vector -> canonical coordinates (free part, then
     * residues mod invariant factors). Throws NotWellDefined when the
     * vector is not in the cycle lattice. */
    std::vector<Int> coordinates(const std::vector<Int>& ambient) const;

    /* Ambient representative of the i-th canonical generator. */
    std::vector<Int> generator_rep(int i) const;

    bool is_zero_class(const std::vector<Int>& ambient) const;

  private:
    int ambient_rank_ = 0;
    IntMatrix cycles_;      // n x z
    IntMatrix boundaries_;  // n x b (Hermite form)
    FgAbGroup group_;
    IntMatrix u_, u_inv_;         // SNF row transform of the relation matrix, z x z
    std::vector<Int> diag_;       // SNF diagonal padded to length z
    std::vector<int> free_rows_;  // rows of U y giving free coordinates
    std::vector<int> tors_rows_;  // rows of U y giving torsion coordinates
};

/* Homomorphism between subquotient presentations written in canonical
 * coordinates. Columns are images of the source generators; rows follow the
 * target coordinate convention (free rows exact, torsion rows mod d). */
struct SubquotientMap {
    IntMatrix matrix;  // (tgt coords) x (src generators)
    FgAbGroup source, target;

    bool is_zero() const { return matrix.is_zero(); }
};

/* Induced map on canonical forms of f : ambient(src) -> ambient(tgt).
 * Throws NotWellDefined unless f maps cycles into cycles and boundaries
 * into boundaries. */
SubquotientMap induced_map(const IntMatrix& f, const PresentedSubquotient& src,
                           const PresentedSubquotient& tgt);

/* Compose induced maps (g after f), reducing torsion rows of the target. */
SubquotientMap compose(const SubquotientMap& g, const SubquotientMap& f);

/* Alternating sum of free ranks. */
long euler_characteristic(const std::vector<FgAbGroup>& graded);

/* Ext^1(A, B) for finitely generated abelian groups; used to decide when
 * a filtration step is guaranteed to split. */
FgAbGroup ext_group(const FgAbGroup& a, const FgAbGroup& b);

}  // namespace attb

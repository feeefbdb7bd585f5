"""Exact matrix algebra over the quotient field C-hat.

Matrices are immutable grids of FracScalar.  Positivity of a Hermitian matrix
is decided without square roots: congruence diagonalization produces a basis
v_1..v_n with <v_i, rho v_j> = delta_ij p_i exactly, and the verdict together
with the basis (or a strictly negative witness vector) forms a replayable
certificate.
"""

from dataclasses import dataclass

from .errors import NotHermitian, NotPsd, ShapeMismatch
from .rings import F_I, F_ONE, F_ZERO, BaseElement, FracScalar, frac


def _f(x):
    return x if isinstance(x, FracScalar) else frac(x)


# -- vector helpers (tuples of FracScalar) ----------------------------------

def vec(xs):
    return tuple(_f(x) for x in xs)


def v_zero(n):
    return (F_ZERO,) * n


def v_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def v_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def v_scale(c, a):
    c = _f(c)
    return tuple(c * x for x in a)


def v_neg(a):
    return tuple(-x for x in a)


def v_conj(a):
    return tuple(x.conj() for x in a)


def v_is_zero(a):
    return all(x.is_zero() for x in a)


def v_dot_h(a, b):
    """Hermitian pairing sum conj(a_i) b_i (linear in the second slot)."""
    acc = F_ZERO
    for x, y in zip(a, b):
        acc = acc + x.conj() * y
    return acc


def std_basis(n, i):
    return tuple(F_ONE if j == i else F_ZERO for j in range(n))


class Matrix:
    """Immutable rows x cols grid of FracScalar with exact arithmetic."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries):
        entries = tuple(tuple(_f(x) for x in row) for row in entries)
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if any(len(r) != cols for r in entries):
            raise ShapeMismatch("ragged rows")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, *a):
        raise AttributeError("Matrix is immutable")

    @staticmethod
    def identity(n):
        return Matrix(tuple(std_basis(n, i) for i in range(n)))

    @staticmethod
    def zeros(r, c):
        return Matrix(tuple((F_ZERO,) * c for _ in range(r)))

    @staticmethod
    def diag(values):
        values = vec(values)
        n = len(values)
        return Matrix(tuple(tuple(values[i] if i == j else F_ZERO for j in range(n))
                            for i in range(n)))

    @staticmethod
    def from_rows(rows):
        return Matrix(rows)

    @staticmethod
    def from_columns(cols):
        return Matrix(tuple(zip(*cols))) if cols else Matrix(())

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("matrix addition shape mismatch")
        return Matrix(tuple(tuple(a + b for a, b in zip(ra, rb))
                            for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Matrix(tuple(tuple(-a for a in r) for r in self.entries))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ShapeMismatch("matrix product %sx%s by %sx%s" %
                                    (self.rows, self.cols, other.rows, other.cols))
            cols = [other.column(j) for j in range(other.cols)]
            return Matrix(tuple(tuple(_row_dot(r, c) for c in cols) for r in self.entries))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = _f(c)
        return Matrix(tuple(tuple(c * a for a in r) for r in self.entries))

    def transpose(self):
        return Matrix(tuple(zip(*self.entries))) if self.rows else Matrix(())

    def conj(self):
        return Matrix(tuple(tuple(a.conj() for a in r) for r in self.entries))

    def adjoint(self):
        return self.transpose().conj()

    def apply(self, v):
        if self.rows == 0:
            return ()
        if len(v) != self.cols:
            raise ShapeMismatch("matrix-vector shape mismatch")
        return tuple(_row_dot(r, v) for r in self.entries)

    def is_zero(self):
        return all(a.is_zero() for r in self.entries for a in r)

    def is_hermitian(self):
        if self.rows != self.cols:
            return False
        for i in range(self.rows):
            for j in range(i, self.cols):
                if self.entries[i][j] != self.entries[j][i].conj():
                    return False
        return True

    def trace(self):
        if self.rows != self.cols:
            raise ShapeMismatch("trace of a non-square matrix")
        acc = F_ZERO
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def kron(self, other):
        out = []
        for ra in self.entries:
            for rb in other.entries:
                out.append(tuple(a * b for a in ra for b in rb))
        return Matrix(tuple(out))

    def rank(self):
        return len(_row_reduce([list(r) for r in self.entries])[1])

    def kernel_basis(self):
        """Exact basis of the right kernel; deterministic pivoting."""
        reduced, pivots = _row_reduce([list(r) for r in self.entries])
        pivot_cols = {c: r for r, c in enumerate(pivots)}
        free = [j for j in range(self.cols) if j not in pivot_cols]
        out = []
        for j in free:
            v = [F_ZERO] * self.cols
            v[j] = F_ONE
            for c, r in pivot_cols.items():
                v[c] = -reduced[r][j]
            out.append(tuple(v))
        return out

    def solve(self, b):
        """A particular solution of M x = b, or None when inconsistent."""
        if len(b) != self.rows:
            raise ShapeMismatch("solve shape mismatch")
        aug = [list(r) + [bv] for r, bv in zip(self.entries, vec(b))]
        reduced, pivots = _row_reduce(aug)
        for r in range(len(pivots), self.rows):
            if not reduced[r][self.cols].is_zero():
                return None
        x = [F_ZERO] * self.cols
        for r, c in enumerate(pivots):
            if c == self.cols:
                return None
            x[c] = reduced[r][self.cols]
        return tuple(x)

    def inverse(self):
        if self.rows != self.cols:
            raise ShapeMismatch("inverse of a non-square matrix")
        n = self.rows
        aug = [list(self.entries[i]) + list(std_basis(n, i)) for i in range(n)]
        reduced, pivots = _row_reduce(aug)
        if pivots != list(range(n)):
            return None
        return Matrix(tuple(tuple(reduced[i][n:]) for i in range(n)))

    def __repr__(self):
        return "Matrix(%d x %d)" % (self.rows, self.cols)


def _row_dot(r, c):
    acc = F_ZERO
    for a, b in zip(r, c):
        if not (a.is_zero() or b.is_zero()):
            acc = acc + a * b
    return acc


def _row_denominator(row):
    """Positive ring element d such that d * row is denominator-free (both the
    polynomial denominators and the rational coefficient denominators)."""
    from fractions import Fraction
    from math import lcm

    from .rings import _plcm, base

    dpoly = (Fraction(1),)
    for x in row:
        if not x.den.is_one():
            dpoly = _plcm(dpoly, x.den.coeffs)
    mode = row[0].mode if row else "rational"
    d = base(list(dpoly), mode) if len(dpoly) > 1 else base(dpoly[0])
    denoms = 1
    for x in row:
        y = frac(d) * x
        for c in y.num.re.coeffs + y.num.im.coeffs:
            denoms = lcm(denoms, c.denominator)
    return d * base(Fraction(denoms))


def _row_reduce(rows):
    """In-place RREF; returns (rows, pivot column list).  First-nonzero pivoting."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        pr = None
        for i in range(r, nr):
            if not rows[i][c].is_zero():
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [inv * x for x in rows[r]]
        for i in range(nr):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def row_space_basis(vectors):
    """Deterministic basis of the span of the given vectors (RREF rows)."""
    vs = [list(vec(v)) for v in vectors if not v_is_zero(vec(v))]
    if not vs:
        return []
    reduced, pivots = _row_reduce(vs)
    return [tuple(reduced[i]) for i in range(len(pivots))]


def span_rank(vectors):
    return len(row_space_basis(vectors))


def in_span(v, basis_rows):
    """Whether v lies in the row space spanned by basis_rows."""
    if not basis_rows:
        return v_is_zero(vec(v))
    m = Matrix.from_columns(list(basis_rows))
    return m.solve(v) is not None


def coords_in_basis(v, basis_rows):
    """Coordinates of v in the given basis rows, or None."""
    if not basis_rows:
        return () if v_is_zero(vec(v)) else None
    return Matrix.from_columns(list(basis_rows)).solve(v)


def same_subspace(rows_a, rows_b):
    return row_space_basis(rows_a) == row_space_basis(rows_b)


def quotient_projection(kernel_rows, m):
    """Representatives and projection map for C^m modulo span(kernel_rows).

    Returns (rep_indices, P) where the representatives are the standard basis
    vectors at rep_indices and P is the (m-k) x m matrix sending a vector to
    the coordinates of its class.  Pivoting is deterministic.
    """
    ker = row_space_basis(kernel_rows)
    pivots = []
    for row in ker:
        for c, x in enumerate(row):
            if not x.is_zero():
                pivots.append(c)
                break
    pivot_set = set(pivots)
    reps = [j for j in range(m) if j not in pivot_set]
    proj = [[F_ZERO] * m for _ in range(len(reps))]
    for a, j in enumerate(reps):
        proj[a][j] = F_ONE
    # e_pivot = -sum of its free-column entries, modulo the kernel
    for row, c in zip(ker, pivots):
        for a, j in enumerate(reps):
            proj[a][c] = -row[j]
    return reps, Matrix(tuple(tuple(r) for r in proj))


def hermitian_form(g, v, w):
    """<v, w>_g = sum conj(v_p) g[p][q] w_q."""
    return v_dot_h(v, g.apply(w))


@dataclass(frozen=True)
class PsdCertificate:
    """Replayable positivity verdict for a Hermitian matrix.

    positive: rows of `basis` are vectors v_i with <v_i, rho v_j> = delta_ij p_i
    exactly and every p_i is non-negative.  not_positive: `witness` has
    strictly negative quadratic value.
    """

    verdict: str                      # "positive" | "not_positive"
    basis: Matrix
    diagonal: tuple                   # BaseElement per basis row
    witness: tuple | None = None

    @property
    def is_positive(self):
        return self.verdict == "positive"


def congruence_diagonalize(rho):
    """Basis v_1..v_n with <v_i, rho v_j> = delta_ij p_i, all exact.

    No square roots: a zero-diagonal block with a nonzero off-diagonal entry
    a is handled by e_i + e_j (Re a != 0) or e_i + i e_j, which creates the
    nonzero diagonal value 2 Re(a) or -2 Im(a).  Pivots are chosen first-index
    for reproducible certificates.  The p_i are returned denominator-free by
    rescaling each basis row with its positive denominator.
    """
    if not rho.is_hermitian():
        raise NotHermitian("congruence_diagonalize needs a Hermitian matrix")
    n = rho.rows
    basis = [list(std_basis(n, i)) for i in range(n)]
    gram = [list(row) for row in rho.entries]

    def add_row(dst, c, src):
        # v_dst += c * v_src, updating the gram form on both sides
        basis[dst] = [x + c * y for x, y in zip(basis[dst], basis[src])]
        cc = c.conj()
        for j in range(n):
            gram[dst][j] = gram[dst][j] + cc * gram[src][j]
        for i in range(n):
            gram[i][dst] = gram[i][dst] + c * gram[i][src]

    def swap(i, j):
        basis[i], basis[j] = basis[j], basis[i]
        gram[i], gram[j] = gram[j], gram[i]
        for r in gram:
            r[i], r[j] = r[j], r[i]

    for k in range(n):
        piv = None
        for i in range(k, n):
            if not gram[i][i].is_zero():
                piv = i
                break
        if piv is None:
            off = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if not gram[i][j].is_zero():
                        off = (i, j)
                        break
                if off:
                    break
            if off is None:
                break  # remaining block is zero; all further p_i are 0
            i, j = off
            a = gram[i][j]
            add_row(i, F_ONE if not a.num.re.is_zero() else F_I, j)
            piv = i
        if piv != k:
            swap(k, piv)
        pk = gram[k][k]
        for r in range(k + 1, n):
            if not gram[r][k].is_zero():
                add_row(r, -(gram[r][k].conj() / pk), k)

    # clear denominators: scaling v_i by d > 0 multiplies p_i by d^2
    diag = []
    for i in range(n):
        row, p = basis[i], gram[i][i]
        assert p.is_real()
        d = _row_denominator(row)
        if not d.is_one():
            row = [frac(d) * x for x in row]
            p = frac(d) * frac(d) * p
        if not p.den.is_one():
            row = [frac(p.den) * x for x in row]
            p = frac(p.den) * frac(p.den) * p
        assert p.den.is_one()
        basis[i] = row
        diag.append(p.num.re)
    u = Matrix(tuple(tuple(r) for r in basis))
    return u, diag


def verify_congruence(rho, u, diag):
    """Exact replay of <v_i, rho v_j> = delta_ij p_i for the basis rows of u."""
    n = rho.rows
    if u.rows != n or u.cols != n:
        return False
    if u.inverse() is None:
        return False
    m = u.conj() * rho * u.transpose()
    for i in range(n):
        for j in range(n):
            want = frac(diag[i]) if i == j else F_ZERO
            if m[i, j] != want:
                return False
    return True


def psd_decide(rho):
    """Exact positivity decision for a Hermitian matrix, with certificate."""
    u, diag = congruence_diagonalize(rho)
    for i, p in enumerate(diag):
        if p.sign() < 0:
            return PsdCertificate("not_positive", u, tuple(diag), witness=u.row(i))
    return PsdCertificate("positive", u, tuple(diag))


def verify_psd_certificate(rho, cert):
    """Replay a PsdCertificate against its matrix, exactly."""
    if not rho.is_hermitian():
        return False
    if cert.verdict == "positive":
        if any(p.sign() < 0 for p in cert.diagonal):
            return False
        return verify_congruence(rho, cert.basis, cert.diagonal)
    if cert.witness is None:
        return False
    value = hermitian_form(rho, cert.witness, cert.witness)
    return value.is_real() and value.sign() == -1


def forced_zero_entries(g):
    """Index pairs that must vanish in any PSD matrix with the zero diagonal
    entries of g: a zero-length vector is orthogonal to everything, so a zero
    diagonal forces its whole row and column (used for cone facial reduction).
    Pairs are 0-based."""
    cert = psd_decide(g)
    if not cert.is_positive:
        raise NotPsd("matrix is not positive semi-definite")
    n = g.rows
    out = set()
    for i in range(n):
        if g[i, i].is_zero():
            for j in range(n):
                out.add((i, j))
                out.add((j, i))
    return out


def kron(m, n):
    return m.kron(n)


def trace(m):
    return m.trace()


def solve(m, b):
    return m.solve(b)


def kernel_basis(m):
    return m.kernel_basis()


def direct_sum_matrices(blocks):
    """Block-diagonal matrix from a list of square matrices."""
    total = sum(b.rows for b in blocks)
    out = [[F_ZERO] * total for _ in range(total)]
    off = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[off + i][off + j] = b[i, j]
        off += b.rows
    return Matrix(tuple(tuple(r) for r in out))

"""Inner-product modules over C, *-representations, GNS, and intertwiners.

A module is free with a Hermitian Gram matrix (degeneracy allowed and handled
by exact quotients).  Representations act by matrices per basis element of
the algebra; every axiom is checked as an exact matrix identity.
"""

import itertools
import random
from dataclasses import dataclass, field

from .algebra import LinearFunctional, functional_positivity
from .errors import (
    AlgebraMismatch,
    DegenerateModule,
    NotPositiveFunctional,
    NotPsd,
    ShapeMismatch,
)
from .linalg import (
    Matrix,
    direct_sum_matrices,
    hermitian_form,
    psd_decide,
    quotient_projection,
    row_space_basis,
    span_rank,
    std_basis,
    v_is_zero,
    vec,
)
from .rings import F_ONE, F_ZERO, Fraction, frac, rational_sqrt


class InnerProductModule:
    """Finitely generated free C-module with a Hermitian Gram matrix."""

    def __init__(self, gram):
        if not gram.is_hermitian():
            raise NotPsd("Gram matrix must be Hermitian")
        self.gram = gram
        self.dim = gram.rows
        self._psd = None

    @staticmethod
    def standard(n):
        return InnerProductModule(Matrix.identity(n))

    def psd_certificate(self):
        if self._psd is None:
            self._psd = psd_decide(self.gram)
        return self._psd

    def is_psd(self):
        return self.psd_certificate().is_positive

    def inner(self, v, w):
        return hermitian_form(self.gram, vec(v), vec(w))

    def radical_basis(self):
        """Vectors of length zero = the kernel of the Gram (Cauchy-Schwarz)."""
        return self.gram.kernel_basis()

    def non_degenerate(self):
        return not self.radical_basis()

    def __repr__(self):
        return "InnerProductModule(dim=%d)" % self.dim


@dataclass
class QuotientMap:
    """Projection onto a quotient with chosen standard-basis representatives."""

    source_dim: int
    rep_indices: list
    projection: Matrix          # (dim') x (dim)

    def apply(self, v):
        return self.projection.apply(vec(v))


def quotient_by_null(h):
    """Quotient a PSD module by its null vectors; the induced Gram is verified
    well-defined on a spanning set."""
    if not h.is_psd():
        raise NotPsd("module inner product is not positive semi-definite")
    ker = h.radical_basis()
    reps, proj = quotient_projection(ker, h.dim)
    g2 = Matrix([[h.gram[i, j] for j in reps] for i in reps])
    out = InnerProductModule(g2)
    qmap = QuotientMap(h.dim, reps, proj)
    # <[e_p], [e_q]> = <e_p, e_q> for all p, q
    for p in range(h.dim):
        vp = qmap.apply(std_basis(h.dim, p))
        for q in range(h.dim):
            vq = qmap.apply(std_basis(h.dim, q))
            assert out.inner(vp, vq) == h.gram[p, q]
    assert out.non_degenerate()
    return out, qmap


class Representation:
    """Algebra action by matrices on an inner-product module."""

    def __init__(self, algebra, module, ops, cyclic_vectors=None):
        if len(ops) != algebra.dim:
            raise ShapeMismatch("one operator per algebra basis element")
        for m in ops:
            if m.rows != module.dim or m.cols != module.dim:
                raise ShapeMismatch("operator shape does not match the module")
        self.algebra = algebra
        self.module = module
        self.ops = tuple(ops)
        self.cyclic_vectors = list(cyclic_vectors or [])

    @property
    def dim(self):
        return self.module.dim

    def act(self, coeffs):
        acc = Matrix.zeros(self.dim, self.dim)
        for c, m in zip(coeffs, self.ops):
            if not c.is_zero():
                acc = acc + m.scale(c)
        return acc

    def __repr__(self):
        return "Representation(dim=%d over %r)" % (self.dim, self.algebra)


def defining_representation(a):
    """The action of a matrix-realized algebra on its column module."""
    if a.psd_rep is None:
        raise AlgebraMismatch("no matrix realization available")
    module = InnerProductModule(a.psd_rep.weight)
    return Representation(a, module, list(a.psd_rep.mats))


def zero_representation(a, n=0):
    return Representation(a, InnerProductModule(Matrix.identity(n)),
                          [Matrix.zeros(n, n) for _ in range(a.dim)])


@dataclass
class RepresentationReport:
    ok: bool
    multiplicativity_failures: list
    star_failures: list
    strongly_non_degenerate: bool
    adjoints_exist: bool

    def lines(self):
        out = []
        out.append("representation axioms: %s" % ("ok" if self.ok else "FAILED"))
        for t in self.multiplicativity_failures[:4]:
            out.append("  multiplicativity fails at basis pair %s" % (t,))
        for t in self.star_failures[:4]:
            out.append("  star-compatibility fails at basis index %s" % (t,))
        out.append("strongly non-degenerate: %s" % self.strongly_non_degenerate)
        return out


def validate_representation(rep):
    """Multiplicativity, star-compatibility against the Gram, adjoint existence,
    and strong non-degeneracy (span of all pi(e_i) e_p is everything)."""
    a, g = rep.algebra, rep.module.gram
    mult, star = [], []
    for i, j in itertools.product(range(a.dim), repeat=2):
        lhs = rep.ops[i] * rep.ops[j]
        rhs = rep.act(a.mul[i][j])
        if lhs != rhs:
            mult.append((i, j))
    for i in range(a.dim):
        # <pi(e_i*) phi, psi> = <phi, pi(e_i) psi>  <=>  pi(e_i*)^dagger G = G pi(e_i)
        lhs = rep.act(a.star[i]).adjoint() * g
        rhs = g * rep.ops[i]
        if lhs != rhs:
            star.append(i)
    spanning = []
    for i in range(a.dim):
        for p in range(rep.dim):
            spanning.append(rep.ops[i].column(p))
    strong = span_rank(spanning) == rep.dim
    if rep.module.non_degenerate():
        adjoints = True   # G^{-1} M^dagger G is an adjoint of every operator
    else:
        # adjointability on the quotient needs the radical to be invariant
        rad = rep.module.radical_basis()
        adjoints = all(all(_in_radical(m.apply(v), rep.module) for v in rad)
                       for m in rep.ops)
    ok = not mult and not star
    return RepresentationReport(ok, mult, star, strong, adjoints)


def _in_radical(v, module):
    return v_is_zero(module.gram.apply(v))


def adjoint_operator(rep, m):
    """G^{-1} m^dagger G in a non-degenerate module."""
    g = rep.module.gram
    ginv = g.inverse()
    if ginv is None:
        raise DegenerateModule("adjoints need a non-degenerate module")
    return ginv * m.adjoint() * g


# -- GNS ----------------------------------------------------------------------

@dataclass
class GnsResult:
    functional: LinearFunctional
    gram: Matrix                 # omega(e_i* e_j) on the algebra basis
    ideal_basis: list            # kernel of the Gram = the null ideal of omega
    module: InnerProductModule
    representation: Representation
    class_map: QuotientMap       # algebra coefficients -> GNS coordinates

    def class_of(self, x):
        return self.class_map.apply(x)


def gns(a, omega):
    """GNS construction from a certified-positive functional.

    The null left ideal is the kernel of the Gram G_ij = omega(e_i* e_j)
    (Cauchy-Schwarz makes the quadratic and pairing definitions agree), the
    space is the quotient with <psi_x, psi_y> = omega(x* y) and the action is
    psi_y -> psi_{xy}.
    """
    cert = functional_positivity(a, omega)
    if not cert.positive:
        raise NotPositiveFunctional("GNS needs a positive functional")
    g = cert.gram
    ker = g.kernel_basis()
    reps, proj = quotient_projection(ker, a.dim)
    g2 = Matrix([[g[i, j] for j in reps] for i in reps])
    module = InnerProductModule(g2)
    ops = []
    for i in range(a.dim):
        cols = []
        for r in reps:
            image = a.mul_vec(a.basis_vec(i), a.basis_vec(r))
            cols.append(proj.apply(image))
        ops.append(Matrix.from_columns(cols) if cols else Matrix.zeros(0, 0))
    qmap = QuotientMap(a.dim, reps, proj)
    cyclic = []
    if a.unit is not None and module.dim:
        cyclic.append(qmap.apply(a.unit))
    rep = Representation(a, module, ops, cyclic_vectors=cyclic)
    report = validate_representation(rep)
    assert report.ok, "GNS representation failed validation"
    result = GnsResult(omega, g, ker, module, rep, qmap)
    if a.unit is not None and module.dim:
        psi1 = qmap.apply(a.unit)
        for i in range(a.dim):
            lhs = module.inner(psi1, rep.ops[i].apply(psi1))
            assert lhs == omega(a.basis_vec(i))
    return result


# -- direct sums and commutants ------------------------------------------------

def direct_sum(reps):
    """Block-diagonal direct sum of representations of one algebra."""
    reps = list(reps)
    if not reps:
        raise AlgebraMismatch("empty direct sum")
    a = reps[0].algebra
    for r in reps:
        if r.algebra != a:
            raise AlgebraMismatch("direct sum needs a common algebra")
    gram = direct_sum_matrices([r.module.gram for r in reps])
    ops = [direct_sum_matrices([r.ops[i] for r in reps]) for i in range(a.dim)]
    cyclic = []
    off = 0
    for r in reps:
        for v in r.cyclic_vectors:
            cyclic.append((F_ZERO,) * off + tuple(v) + (F_ZERO,) * (gram.rows - off - r.dim))
        off += r.dim
    return Representation(a, InnerProductModule(gram), ops, cyclic_vectors=cyclic)


def commutant_basis(rep):
    """Exact basis of {C : C pi(e_i) = pi(e_i) C}; closed under the adjoint."""
    if not rep.module.non_degenerate():
        raise DegenerateModule("commutant needs a non-degenerate module")
    n = rep.dim
    rows = []
    for m in rep.ops:
        # row-major vec: vec(CM - MC) = (I (x) M^T - M (x) I) vec(C)
        block = Matrix.identity(n).kron(m.transpose()) - m.kron(Matrix.identity(n))
        rows.extend(block.entries)
    if not rows:
        rows = [tuple(F_ZERO for _ in range(n * n))]
    kernel = Matrix(rows).kernel_basis()
    mats = [Matrix(tuple(tuple(v[i * n + j] for j in range(n)) for i in range(n)))
            for v in kernel]
    basis_rows = [sum(m.entries, ()) for m in mats]
    for m in mats:
        adj = adjoint_operator(rep, m)
        flat = sum(adj.entries, ())
        assert Matrix.from_columns(basis_rows).solve(flat) is not None if basis_rows else flat == ()
    return mats


# -- intertwiners ---------------------------------------------------------------

@dataclass
class Intertwiner:
    source: Representation
    target: Representation
    matrix: Matrix
    adjointable: bool = False
    isometric: bool = False
    unitary: bool = False

    def verify(self):
        for i in range(self.source.algebra.dim):
            if self.matrix * self.source.ops[i] != self.target.ops[i] * self.matrix:
                return False
        return True


def classify_intertwiner(t, source, target):
    g1, g2 = source.module.gram, target.module.gram
    isometric = t.adjoint() * g2 * t == g1
    unitary = isometric and t.rows == t.cols and t.inverse() is not None
    adjointable = True
    if target.module.non_degenerate():
        adjointable = True
    return Intertwiner(source, target, t, adjointable=adjointable,
                       isometric=isometric, unitary=unitary)


@dataclass
class IntertwinerSearch:
    basis: list                      # basis of the solution space, as matrices
    classified: list                 # Intertwiner for each basis element
    unitary: Intertwiner | None
    status: str                      # "UnitaryFound" | "NoUnitary(dimension mismatch)"
    #                                  | "Inconclusive" | "UnitaryImpossible(zero space)"


def intertwiner_space(rep1, rep2, generator_indices=None):
    """Exact solution space of T pi1(e_i) = pi2(e_i) T.  Passing the indices
    of a generating set is sound (products follow by multiplicativity) and
    shrinks the linear system."""
    if rep1.algebra != rep2.algebra:
        raise AlgebraMismatch("intertwiners need a common algebra")
    n1, n2 = rep1.dim, rep2.dim
    indices = range(rep1.algebra.dim) if generator_indices is None else generator_indices
    rows = []
    for i in indices:
        m1, m2 = rep1.ops[i], rep2.ops[i]
        # T of shape n2 x n1, row-major vec: vec(T M1 - M2 T) =
        # (I_{n2} (x) M1^T - M2 (x) I_{n1}) vec(T)
        block = Matrix.identity(n2).kron(m1.transpose()) - m2.kron(Matrix.identity(n1))
        rows.extend(block.entries)
    if not rows:
        rows = [tuple(F_ZERO for _ in range(n1 * n2))]
    kernel = Matrix(rows).kernel_basis()
    out = [Matrix(tuple(tuple(v[i * n1 + j] for j in range(n1)) for i in range(n2)))
           for v in kernel]
    if generator_indices is not None:
        out = [t for t in out
               if all(t * rep1.ops[i] == rep2.ops[i] * t for i in range(rep1.algebra.dim))]
    return out


def intertwiners(rep1, rep2, seed=0, tries=200, extra_candidates=(),
                 generator_indices=None):
    """Basis of the intertwiner space with classification, plus a bounded
    search for a certified unitary (deterministic candidates first, then a
    seeded randomized scan).  Search failure is reported Inconclusive, never
    as a negative claim (except for a dimension mismatch)."""
    basis = intertwiner_space(rep1, rep2, generator_indices)
    classified = [classify_intertwiner(t, rep1, rep2) for t in basis]
    if rep1.dim != rep2.dim:
        return IntertwinerSearch(basis, classified, None, "NoUnitary(dimension mismatch)")
    for c in classified:
        if c.unitary:
            assert c.verify()
            return IntertwinerSearch(basis, classified, c, "UnitaryFound")
    if not basis:
        if rep1.dim == 0:
            empty = classify_intertwiner(Matrix.zeros(0, 0), rep1, rep2)
            return IntertwinerSearch(basis, classified, empty, "UnitaryFound")
        return IntertwinerSearch(basis, classified, None, "UnitaryImpossible(zero space)")
    from .rings import F_I
    rng = random.Random(seed)
    candidates = []
    for t in extra_candidates:
        # supplied guesses must actually intertwine
        if all(t * rep1.ops[i] == rep2.ops[i] * t for i in range(rep1.algebra.dim)):
            candidates.append(t)
    candidates.extend(basis)
    for _ in range(tries):
        coeffs = [frac(Fraction(rng.randint(-3, 3))) + F_I * frac(Fraction(rng.randint(-1, 1)))
                  for _ in basis]
        t = Matrix.zeros(rep2.dim, rep1.dim)
        for c, b in zip(coeffs, basis):
            t = t + b.scale(c)
        candidates.append(t)
    for t in candidates:
        cand = _try_unitary_scaling(t, rep1, rep2)
        if cand is not None:
            assert cand.verify()
            return IntertwinerSearch(basis, classified, cand, "UnitaryFound")
    return IntertwinerSearch(basis, classified, None, "Inconclusive")


def _try_unitary_scaling(t, rep1, rep2):
    """Certify t (possibly rescaled by 1/sqrt of a rational square) unitary."""
    g1, g2 = rep1.module.gram, rep2.module.gram
    m = t.adjoint() * g2 * t
    if m == g1:
        c = classify_intertwiner(t, rep1, rep2)
        return c if c.unitary else None
    # try T^dagger G2 T = c * G1 with c a square rational
    for i in range(g1.rows):
        for j in range(g1.cols):
            if not g1[i, j].is_zero():
                ratio = m[i, j] / g1[i, j]
                if not (ratio.is_real() and ratio.den.is_one()
                        and ratio.num.re.is_constant()):
                    return None
                cval = ratio.num.re.constant_value()
                if cval <= 0:
                    return None
                r = rational_sqrt(cval)
                if r is None:
                    return None
                scaled = t.scale(frac(Fraction(1) / r))
                if scaled.adjoint() * g2 * scaled == g1:
                    c = classify_intertwiner(scaled, rep1, rep2)
                    return c if c.unitary else None
                return None
    return None

"""Finite-dimensional *-algebras over C by structure constants.

An algebra is a dense multiplication tensor mul[i][j] (the coefficient vector
of e_i e_j) together with a star table extended antilinearly.  Elements are
plain coefficient tuples of FracScalar.  Positivity of a linear functional is
decided exactly through the PSD certificate of its Gram matrix; positivity of
Hermitian elements is decided exactly whenever the algebra carries a faithful
matrix realization for which membership in the positive cone is equivalent to
a (possibly weighted) PSD check.
"""

import itertools
from dataclasses import dataclass, field

from .errors import (
    BadParams,
    DenominatorVanishesAtZero,
    InvalidWitness,
    NotHermitian,
    NotInRing,
    ShapeMismatch,
)
from .linalg import (
    Matrix,
    PsdCertificate,
    hermitian_form,
    psd_decide,
    std_basis,
    v_add,
    v_is_zero,
    v_scale,
    v_sub,
    v_zero,
    vec,
)
from .rings import F_I, F_ONE, F_ZERO, classical_limit_scalar, frac


@dataclass(frozen=True)
class PsdRep:
    """Faithful matrix realization ι with a ∈ A⁺ iff weight·ι(a) is PSD.

    Only constructors that can prove this equivalence attach one (full matrix
    algebras and their tensor products, full corners over the scalars, finite
    rank operators of nondegenerate modules over the scalars).  weight is a
    positive-definite Hermitian matrix, identity for untwisted adjoints.
    """

    mats: tuple            # Matrix per basis element
    weight: Matrix

    def realize(self, coeffs):
        n = self.mats[0].rows
        acc = Matrix.zeros(n, n)
        for c, m in zip(coeffs, self.mats):
            if not c.is_zero():
                acc = acc + m.scale(c)
        return acc


class StarAlgebra:
    """Associative algebra with involutive antilinear anti-homomorphism."""

    def __init__(self, dim, mul, star, labels=None, kind="generic",
                 unit=None, psd_rep=None, matrix_size=None):
        self.dim = dim
        self.mul = tuple(tuple(vec(v) for v in row) for row in mul)
        self.star = tuple(vec(v) for v in star)
        if len(self.mul) != dim or any(len(r) != dim for r in self.mul):
            raise ShapeMismatch("multiplication tensor shape")
        if len(self.star) != dim:
            raise ShapeMismatch("star table shape")
        self.labels = list(labels) if labels else ["e%d" % i for i in range(dim)]
        self.kind = kind
        self.matrix_size = matrix_size
        self._unit = vec(unit) if unit is not None else None
        self._unit_searched = unit is not None
        self.psd_rep = psd_rep

    # -- element operations ---------------------------------------------

    def zero_vec(self):
        return v_zero(self.dim)

    def basis_vec(self, i):
        return std_basis(self.dim, i)

    def mul_vec(self, x, y):
        out = list(v_zero(self.dim))
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y):
                if yj.is_zero():
                    continue
                c = xi * yj
                for k, mk in enumerate(self.mul[i][j]):
                    if not mk.is_zero():
                        out[k] = out[k] + c * mk
        return tuple(out)

    def star_vec(self, x):
        out = list(v_zero(self.dim))
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            c = xi.conj()
            for k, sk in enumerate(self.star[i]):
                if not sk.is_zero():
                    out[k] = out[k] + c * sk
        return tuple(out)

    def is_hermitian_vec(self, x):
        return self.star_vec(x) == tuple(x)

    def power_vec(self, x, k):
        acc = x
        for _ in range(k - 1):
            acc = self.mul_vec(acc, x)
        return acc

    @property
    def unit(self):
        if not self._unit_searched:
            self._unit = _find_unit(self)
            self._unit_searched = True
        return self._unit

    def element_str(self, x):
        terms = []
        for c, lbl in zip(x, self.labels):
            if not c.is_zero():
                terms.append("(%r)*%s" % (c, lbl))
        return " + ".join(terms) if terms else "0"

    def __eq__(self, other):
        return (isinstance(other, StarAlgebra) and self.dim == other.dim
                and self.mul == other.mul and self.star == other.star)

    def __hash__(self):
        return hash((self.dim, self.mul, self.star))

    def __repr__(self):
        tag = self.kind if self.matrix_size is None else "%s(%d)" % (self.kind, self.matrix_size)
        return "StarAlgebra(dim=%d, kind=%s)" % (self.dim, tag)


def _find_unit(a):
    # two-sided unit by linear solve: u*e_j = e_j = e_j*u for every j
    rows, rhs = [], []
    n = a.dim
    for j in range(n):
        for k in range(n):
            rows.append(tuple(a.mul[i][j][k] for i in range(n)))
            rhs.append(F_ONE if j == k else F_ZERO)
            rows.append(tuple(a.mul[j][i][k] for i in range(n)))
            rhs.append(F_ONE if j == k else F_ZERO)
    sol = Matrix(rows).solve(tuple(rhs))
    return sol


@dataclass
class AlgebraReport:
    ok: bool
    associativity_failures: list
    involution_failures: list

    def lines(self):
        if self.ok:
            return ["algebra axioms: ok (associativity and involution verified on all basis tuples)"]
        out = []
        for t in self.associativity_failures[:5]:
            out.append("associativity fails at basis triple %s" % (t,))
        for t in self.involution_failures[:5]:
            out.append("involution law %s fails at %s" % t)
        return out


def validate_algebra(a):
    """Check associativity on all basis triples and the involution laws on
    all basis elements/pairs; failures are reported with their indices."""
    assoc, invol = [], []
    n = a.dim
    for i in range(n):
        if a.star_vec(a.star_vec(a.basis_vec(i))) != a.basis_vec(i):
            invol.append(("star(star(x)) = x", (i,)))
    for i, j in itertools.product(range(n), repeat=2):
        ei, ej = a.basis_vec(i), a.basis_vec(j)
        lhs = a.star_vec(a.mul_vec(ei, ej))
        rhs = a.mul_vec(a.star_vec(ej), a.star_vec(ei))
        if lhs != rhs:
            invol.append(("star(xy) = star(y)star(x)", (i, j)))
    for i, j, k in itertools.product(range(n), repeat=3):
        ei, ej, ek = a.basis_vec(i), a.basis_vec(j), a.basis_vec(k)
        if a.mul_vec(a.mul_vec(ei, ej), ek) != a.mul_vec(ei, a.mul_vec(ej, ek)):
            assoc.append((i, j, k))
    return AlgebraReport(not assoc and not invol, assoc, invol)


# -- builtin families --------------------------------------------------------

def matrix_algebra(n):
    """M_n(C) on the matrix-unit basis E_ij (row-major)."""
    if n < 1:
        raise BadParams("matrix algebra needs n >= 1")
    dim = n * n

    def idx(i, j):
        return i * n + j

    mul = [[v_zero(dim) for _ in range(dim)] for _ in range(dim)]
    star = [v_zero(dim) for _ in range(dim)]
    labels = []
    for i in range(n):
        for j in range(n):
            labels.append("E%d%d" % (i + 1, j + 1))
            star[idx(i, j)] = std_basis(dim, idx(j, i))
            for k in range(n):
                for l in range(n):
                    if j == k:
                        mul[idx(i, j)][idx(k, l)] = std_basis(dim, idx(i, l))
    mats = []
    for i in range(n):
        for j in range(n):
            m = [[F_ZERO] * n for _ in range(n)]
            m[i][j] = F_ONE
            mats.append(Matrix(m))
    unit = v_add_many([std_basis(dim, idx(i, i)) for i in range(n)], dim)
    return StarAlgebra(dim, mul, star, labels, kind="matrix", matrix_size=n, unit=unit,
                       psd_rep=PsdRep(tuple(mats), Matrix.identity(n)))


def scalars_algebra():
    """C itself, realized as matrix(1) so the exact positivity decision applies."""
    a = matrix_algebra(1)
    a.labels = ["1"]
    return a


def grassmann_algebra(n):
    """The Grassmann algebra of C^n with the involution fixing the generators.

    Basis: wedge monomials indexed by sorted subsets, e_S* = reversal sign
    times e_S.  Its generators are Hermitian and nilpotent.
    """
    if n < 0:
        raise BadParams("grassmann algebra needs n >= 0")
    subsets = []
    for r in range(n + 1):
        subsets.extend(itertools.combinations(range(1, n + 1), r))
    index = {s: k for k, s in enumerate(subsets)}
    dim = len(subsets)
    mul = [[v_zero(dim) for _ in range(dim)] for _ in range(dim)]
    star = [v_zero(dim) for _ in range(dim)]
    for s in subsets:
        for t in subsets:
            if set(s) & set(t):
                continue
            merged = s + t
            sign = _merge_sign(merged)
            key = tuple(sorted(merged))
            mul[index[s]][index[t]] = v_scale(sign, std_basis(dim, index[key]))
        r = len(s)
        rev_sign = (-1) ** (r * (r - 1) // 2)
        star[index[s]] = v_scale(rev_sign, std_basis(dim, index[s]))
    labels = ["1"] + ["e" + "^".join(str(i) for i in s) for s in subsets[1:]]
    return StarAlgebra(dim, mul, star, labels, kind="grassmann", matrix_size=None,
                       unit=std_basis(dim, 0))


def _merge_sign(seq):
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def v_add_many(vs, dim):
    acc = v_zero(dim)
    for v in vs:
        acc = v_add(acc, v)
    return acc


def direct_sum_algebra(a1, a2):
    """Block direct sum A1 (+) A2."""
    dim = a1.dim + a2.dim

    def emb1(v):
        return tuple(v) + v_zero(a2.dim)

    def emb2(v):
        return v_zero(a1.dim) + tuple(v)

    mul = [[v_zero(dim) for _ in range(dim)] for _ in range(dim)]
    star = [v_zero(dim) for _ in range(dim)]
    for i in range(a1.dim):
        star[i] = emb1(a1.star[i])
        for j in range(a1.dim):
            mul[i][j] = emb1(a1.mul[i][j])
    for i in range(a2.dim):
        star[a1.dim + i] = emb2(a2.star[i])
        for j in range(a2.dim):
            mul[a1.dim + i][a1.dim + j] = emb2(a2.mul[i][j])
    unit = None
    if a1.unit is not None and a2.unit is not None:
        unit = v_add(emb1(a1.unit), emb2(a2.unit))
    psd_rep = None
    if a1.psd_rep and a2.psd_rep:
        from .linalg import direct_sum_matrices
        mats = tuple(direct_sum_matrices([m, Matrix.zeros(a2.psd_rep.mats[0].rows,
                                                          a2.psd_rep.mats[0].rows)])
                     for m in a1.psd_rep.mats)
        mats += tuple(direct_sum_matrices([Matrix.zeros(a1.psd_rep.mats[0].rows,
                                                        a1.psd_rep.mats[0].rows), m])
                      for m in a2.psd_rep.mats)
        weight = direct_sum_matrices([a1.psd_rep.weight, a2.psd_rep.weight])
        psd_rep = PsdRep(mats, weight)
    labels = ["%s|0" % l for l in a1.labels] + ["0|%s" % l for l in a2.labels]
    return StarAlgebra(dim, mul, star, labels, kind="generic", unit=unit, psd_rep=psd_rep)


def builtin_algebra(name, n=None):
    """Canonical families: matrix(n), grassmann(n), scalars."""
    if name == "matrix":
        return matrix_algebra(n)
    if name == "grassmann":
        return grassmann_algebra(n)
    if name == "scalars":
        return scalars_algebra()
    raise BadParams("unknown builtin algebra %r" % (name,))


def tensor_product(a1, a2):
    """A1 (x) A2 with (x (x) y)* = x* (x) y*."""
    dim = a1.dim * a2.dim

    def kron_vec(u, v):
        return tuple(x * y for x in u for y in v)

    mul = [[None] * dim for _ in range(dim)]
    star = [None] * dim
    for i1, i2 in itertools.product(range(a1.dim), range(a2.dim)):
        i = i1 * a2.dim + i2
        star[i] = kron_vec(a1.star[i1], a2.star[i2])
        for j1, j2 in itertools.product(range(a1.dim), range(a2.dim)):
            mul[i][j1 * a2.dim + j2] = kron_vec(a1.mul[i1][j1], a2.mul[i2][j2])
    unit = None
    if a1.unit is not None and a2.unit is not None:
        unit = kron_vec(a1.unit, a2.unit)
    psd_rep = None
    msize = None
    if a1.psd_rep and a2.psd_rep:
        mats = tuple(m1.kron(m2) for m1 in a1.psd_rep.mats for m2 in a2.psd_rep.mats)
        psd_rep = PsdRep(mats, a1.psd_rep.weight.kron(a2.psd_rep.weight))
    if a1.kind == "matrix" and a2.kind == "matrix":
        msize = a1.matrix_size * a2.matrix_size
    labels = ["%s(x)%s" % (l1, l2) for l1 in a1.labels for l2 in a2.labels]
    return StarAlgebra(dim, mul, star, labels, kind="tensor", matrix_size=msize,
                       unit=unit, psd_rep=psd_rep)


# -- linear functionals ------------------------------------------------------

@dataclass(frozen=True)
class LinearFunctional:
    algebra: StarAlgebra
    values: tuple

    def __call__(self, x):
        acc = F_ZERO
        for c, w in zip(x, self.values):
            if not c.is_zero():
                acc = acc + c * w
        return acc

    def gram(self):
        """G_ij = omega(e_i* e_j); omega is positive iff G has a positive verdict."""
        a = self.algebra
        rows = []
        for i in range(a.dim):
            si = a.star_vec(a.basis_vec(i))
            rows.append(tuple(self(a.mul_vec(si, a.basis_vec(j))) for j in range(a.dim)))
        return Matrix(rows)


def functional(a, values):
    return LinearFunctional(a, vec(values))


def zero_functional(a):
    return LinearFunctional(a, v_zero(a.dim))


def trace_functional(a):
    if a.kind != "matrix":
        raise BadParams("trace functional needs the matrix-unit basis")
    n = a.matrix_size
    vals = [F_ONE if i == j else F_ZERO for i in range(n) for j in range(n)]
    return LinearFunctional(a, tuple(vals))


def density_functional(a, rho):
    """omega(x) = tr(rho x) on the matrix-unit basis."""
    if a.kind != "matrix":
        raise BadParams("density functionals need the matrix-unit basis")
    n = a.matrix_size
    if rho.rows != n or rho.cols != n:
        raise ShapeMismatch("density matrix must be %dx%d" % (n, n))
    vals = [rho[j, i] for i in range(n) for j in range(n)]
    return LinearFunctional(a, tuple(vals))


def vector_state(a, v):
    """omega(x) = <v, iota(x) v> through the algebra's matrix realization."""
    if a.psd_rep is None:
        raise BadParams("vector states need a matrix realization")
    w = a.psd_rep.weight
    vals = [hermitian_form(w * m, vec(v), vec(v)) for m in a.psd_rep.mats]
    return LinearFunctional(a, tuple(vals))


@dataclass
class FunctionalCertificate:
    """Positivity verdict for a linear functional with a replayable witness.

    positive: the Gram matrix is Hermitian with a positive PsdCertificate.
    Otherwise a witness coefficient vector v has omega(v* v) either negative
    or non-real.
    """

    positive: bool
    gram: Matrix
    psd: PsdCertificate | None = None
    witness: tuple | None = None
    witness_value: object = None

    def lines(self):
        if self.positive:
            return ["functional: positive (Gram PSD certificate)"]
        return ["functional: not positive (witness quadratic value %r)" % (self.witness_value,)]


def functional_positivity(a, omega):
    """Exact decision of omega(x* x) >= 0 for all x, via the Gram matrix."""
    g = omega.gram()
    if g.is_hermitian():
        cert = psd_decide(g)
        if cert.is_positive:
            return FunctionalCertificate(True, g, psd=cert)
        w = cert.witness
        return FunctionalCertificate(False, g, psd=cert, witness=w,
                                     witness_value=hermitian_form(g, w, w))
    # a non-Hermitian Gram already refutes positivity; polarization finds a
    # witness whose quadratic value is negative or non-real
    n = g.rows
    for p in range(n):
        for q in range(n):
            for c in (F_ONE, -F_ONE, F_I, -F_I):
                v = list(v_zero(n))
                v[p] = F_ONE
                v[q] = v[q] + c
                val = hermitian_form(g, tuple(v), tuple(v))
                if not val.is_real() or val.sign() < 0:
                    return FunctionalCertificate(False, g, witness=tuple(v), witness_value=val)
    raise AssertionError("non-Hermitian Gram with no polarization witness")


def conjugated_functional(a, omega, c):
    """omega_C(x) = omega(C* x C); positive whenever omega is."""
    cs = a.star_vec(c)
    vals = [omega(a.mul_vec(a.mul_vec(cs, a.basis_vec(k)), c)) for k in range(a.dim)]
    return LinearFunctional(a, tuple(vals))


def tensor_functional(at, omega1, omega2):
    """(omega1 (x) omega2) on a tensor-product algebra."""
    vals = [w1 * w2 for w1 in omega1.values for w2 in omega2.values]
    return LinearFunctional(at, tuple(vals))


def classical_limit_functional(a0, omega):
    vals = [frac(classical_limit_scalar(v)) for v in omega.values]
    return LinearFunctional(a0, tuple(vals))


# -- element positivity ------------------------------------------------------

@dataclass
class ElementVerdict:
    status: str                      # PositiveCertified | AlgebraicallyPositiveCertified
    #                                  | NegativeCertified | Unknown
    psd: PsdCertificate | None = None
    functional: LinearFunctional | None = None
    functional_certificate: FunctionalCertificate | None = None
    value: object = None
    witnesses: list | None = None
    regime: str = ""


def verify_square_witnesses(a, x, witnesses):
    """Check x = sum b_i B_i* B_i exactly with every b_i > 0."""
    acc = a.zero_vec()
    for b, bvec in witnesses:
        b = frac(b)
        if not (b.is_real() and b.sign() == 1):
            return False
        sq = a.mul_vec(a.star_vec(bvec), bvec)
        acc = v_add(acc, v_scale(b, sq))
    return acc == tuple(x)


def element_positivity(a, x, witnesses=None, functionals=None):
    """Certified positivity verdict for a Hermitian element.

    Matrix-realized algebras get the exact cone decision; any algebra accepts
    a sum-of-squares witness list; a supplied family of positive functionals
    can certify negativity.  With no procedure applicable the verdict is an
    honest Unknown.
    """
    x = vec(x)
    if not a.is_hermitian_vec(x):
        raise NotHermitian("element_positivity needs a Hermitian element")
    if a.psd_rep is not None:
        m = a.psd_rep.realize(x)
        wm = a.psd_rep.weight * m
        cert = psd_decide(wm)
        if cert.is_positive:
            return ElementVerdict("PositiveCertified", psd=cert, regime="matrix realization")
        v = cert.witness
        omega = vector_state(a, v)
        fc = functional_positivity(a, omega)
        assert fc.positive
        val = omega(x)
        assert val.is_real() and val.sign() == -1
        return ElementVerdict("NegativeCertified", psd=cert, functional=omega,
                              functional_certificate=fc, value=val,
                              regime="matrix realization")
    if witnesses is not None:
        if verify_square_witnesses(a, x, witnesses):
            return ElementVerdict("AlgebraicallyPositiveCertified", witnesses=list(witnesses),
                                  regime="sum-of-squares witness")
        raise InvalidWitness("sum-of-squares witness does not reproduce the element")
    for omega in functionals or ():
        fc = functional_positivity(a, omega)
        if not fc.positive:
            continue
        val = omega(x)
        if val.is_real() and val.sign() == -1:
            return ElementVerdict("NegativeCertified", functional=omega,
                                  functional_certificate=fc, value=val,
                                  regime="functional family")
    return ElementVerdict("Unknown", regime="no decision procedure invoked")


# -- nilpotent normal scan ---------------------------------------------------

@dataclass
class NilpotentCertificate:
    """Nonzero normal element with h^k = 0: the algebra cannot have
    sufficiently many positive linear functionals."""

    element: tuple
    exponent: int

    def verify(self, a):
        h = self.element
        if v_is_zero(h):
            return False
        hs = a.star_vec(h)
        if a.mul_vec(h, hs) != a.mul_vec(hs, h):
            return False
        return v_is_zero(a.power_vec(h, self.exponent))


def nilpotent_normal_scan(a):
    """Scan basis elements and small Hermitian combinations for a nonzero
    normal nilpotent (exponent bound dim); incomplete by design."""
    candidates = []
    for i in range(a.dim):
        candidates.append(a.basis_vec(i))
    hermitians = [a.basis_vec(i) for i in range(a.dim) if a.is_hermitian_vec(a.basis_vec(i))]
    for i in range(a.dim):
        ei = a.basis_vec(i)
        candidates.append(v_add(ei, a.star_vec(ei)))
        candidates.append(v_scale(F_I, v_sub(ei, a.star_vec(ei))))
    for u, w in itertools.combinations(hermitians, 2):
        candidates.append(v_add(u, w))
        candidates.append(v_sub(u, w))
    seen = set()
    for h in candidates:
        if v_is_zero(h) or h in seen:
            continue
        seen.add(h)
        hs = a.star_vec(h)
        if a.mul_vec(h, hs) != a.mul_vec(hs, h):
            continue
        p = h
        for k in range(2, a.dim + 1):
            p = a.mul_vec(p, h)
            if v_is_zero(p):
                cert = NilpotentCertificate(h, k)
                assert cert.verify(a)
                return cert
    return None


# -- identity structure ------------------------------------------------------

@dataclass(frozen=True)
class ApproxIdentityWitness:
    """Finite approximate identity: ordered elements E_alpha with a matching
    filtration of the basis; all defining identities are checked exactly."""

    elements: tuple       # coefficient vectors, ordered
    filtration: tuple     # tuple of basis-index subsets, one per element


@dataclass
class IdentityReport:
    has_unit: bool
    unit: tuple | None
    witness_valid: bool | None    # None when no witness was supplied

    def lines(self):
        if self.has_unit:
            return ["two-sided unit found"]
        if self.witness_valid:
            return ["no unit; supplied approximate identity verified"]
        return ["no unit and no valid approximate identity"]


def identity_structure(a, witness=None):
    """Detect a two-sided unit by a linear solve and validate any supplied
    approximate-identity witness exactly."""
    unit = a.unit
    ok = None
    if witness is not None:
        ok = _validate_approx_identity(a, witness)
    return IdentityReport(unit is not None, unit, ok)


def _validate_approx_identity(a, w):
    els = [vec(e) for e in w.elements]
    if len(els) != len(w.filtration):
        raise InvalidWitness("filtration and element counts differ")
    covered = set()
    for idx, (e, filt) in enumerate(zip(els, w.filtration)):
        if a.star_vec(e) != e:
            raise InvalidWitness("E_%d is not Hermitian" % idx)
        for b in filt:
            eb = a.basis_vec(b)
            if a.mul_vec(e, eb) != eb or a.mul_vec(eb, e) != eb:
                raise InvalidWitness("E_%d does not fix basis element %d" % (idx, b))
        covered |= set(filt)
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            if a.mul_vec(els[i], els[j]) != els[i] or a.mul_vec(els[j], els[i]) != els[i]:
                raise InvalidWitness("E_%d E_%d ordering identity fails" % (i, j))
    if covered != set(range(a.dim)):
        raise InvalidWitness("filtration does not exhaust the basis")
    return True


def has_identity_structure(a, witness=None):
    try:
        rep = identity_structure(a, witness)
    except InvalidWitness:
        return False
    return rep.has_unit or bool(rep.witness_valid)


# -- homomorphisms -----------------------------------------------------------

@dataclass(frozen=True)
class StarHomomorphism:
    """Linear map between *-algebras, stored as a (target.dim x source.dim)
    matrix on the chosen bases."""

    source: StarAlgebra
    target: StarAlgebra
    matrix: Matrix

    def apply(self, x):
        return self.matrix.apply(vec(x))

    def defect(self):
        """First failing multiplicativity/star identity, or None."""
        s, t = self.source, self.target
        for i in range(s.dim):
            if self.apply(s.star[i]) != t.star_vec(self.apply(s.basis_vec(i))):
                return ("star", (i,))
            for j in range(s.dim):
                lhs = self.apply(s.mul[i][j])
                rhs = t.mul_vec(self.apply(s.basis_vec(i)), self.apply(s.basis_vec(j)))
                if lhs != rhs:
                    return ("multiplicative", (i, j))
        if s.unit is not None and t.unit is not None and self.apply(s.unit) != tuple(t.unit):
            return ("unit", ())
        return None

    def is_star_homomorphism(self):
        return self.defect() is None

    def is_isomorphism(self):
        return self.is_star_homomorphism() and self.matrix.inverse() is not None

    def inverse(self):
        if self.matrix.rows != self.matrix.cols:
            return None
        inv = self.matrix.inverse()
        if inv is None:
            return None
        return StarHomomorphism(self.target, self.source, inv)

    def classical_limit(self, source0, target0):
        return StarHomomorphism(source0, target0, classical_limit_matrix(self.matrix))


def identity_homomorphism(a):
    return StarHomomorphism(a, a, Matrix.identity(a.dim))


# -- deformation containers --------------------------------------------------

def require_ring_valued(x):
    """Deformed objects must be ring-valued so lam=0 is always defined."""
    try:
        x.try_demote()
    except NotInRing as exc:
        raise DenominatorVanishesAtZero(str(exc)) from exc
    return x


def classical_limit_vec(v):
    return tuple(frac(classical_limit_scalar(x)) for x in v)


def classical_limit_matrix(m):
    return Matrix(tuple(tuple(frac(classical_limit_scalar(x)) for x in row)
                        for row in m.entries))


def deformation_container(a_def):
    """Classical limit of a deformed algebra: lam -> 0 applied entrywise to
    the multiplication tensor and star table.  The result is validated; the
    limit map is a *-homomorphism by construction."""
    for row in a_def.mul:
        for v in row:
            for x in v:
                require_ring_valued(x)
    for v in a_def.star:
        for x in v:
            require_ring_valued(x)
    mul = [[classical_limit_vec(v) for v in row] for row in a_def.mul]
    star = [classical_limit_vec(v) for v in a_def.star]
    unit = classical_limit_vec(a_def.unit) if a_def.unit is not None else None
    psd_rep = None
    if a_def.psd_rep is not None:
        w0 = classical_limit_matrix(a_def.psd_rep.weight)
        if w0.inverse() is not None and psd_decide(w0).is_positive:
            psd_rep = PsdRep(tuple(classical_limit_matrix(m) for m in a_def.psd_rep.mats), w0)
    a0 = StarAlgebra(a_def.dim, mul, star, labels=a_def.labels, kind=a_def.kind,
                     matrix_size=a_def.matrix_size, unit=unit, psd_rep=psd_rep)
    report = validate_algebra(a0)
    assert report.ok, "classical limit failed the algebra axioms"
    return a0

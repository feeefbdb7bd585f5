"""Rigged bimodules and formal Morita equivalence machinery.

A bimodule stores commuting left/right actions as matrices per algebra basis
element, a right-algebra-valued inner product tensor (linear in the second
slot), and optionally a left-algebra-valued product (linear in the first
slot) plus cyclic-structure witnesses.  The validator checks every axiom as
an exact identity and reports the regime used for the positivity axioms.
"""

import itertools
from dataclasses import dataclass, field

from .algebra import PsdRep, StarAlgebra, StarHomomorphism, has_identity_structure
from .errors import (
    BadParams,
    DegenerateRiggedModule,
    MiddleAlgebraMismatch,
    MissingCyclicWitness,
    MissingInnerB,
    NoIdentityStructure,
    NotFull,
    NotProjection,
    NotPsd,
    NotStarHomomorphism,
    ShapeMismatch,
)
from .linalg import (
    Matrix,
    coords_in_basis,
    hermitian_form,
    in_span,
    psd_decide,
    quotient_projection,
    row_space_basis,
    same_subspace,
    span_rank,
    std_basis,
    v_add,
    v_is_zero,
    v_scale,
    v_zero,
    vec,
)
from .rings import F_ONE, F_ZERO, frac


@dataclass
class CyclicLevel:
    span: list            # module vectors spanning the filtration step
    omega: tuple          # the cyclic vector for this step


@dataclass
class CyclicSubmodule:
    span: list            # module vectors spanning the submodule
    levels: list          # CyclicLevel, ordered


@dataclass
class CyclicStructure:
    submodules: list


class Bimodule:
    """(B-A)-bimodule with an A-valued inner product and optional extras."""

    def __init__(self, left_algebra, right_algebra, dim, left, right,
                 inner_right, inner_left=None, cyclic_right=None, cyclic_left=None):
        self.B = left_algebra
        self.A = right_algebra
        self.dim = dim
        self.left = tuple(left)
        self.right = tuple(right)
        if len(self.left) != self.B.dim or len(self.right) != self.A.dim:
            raise ShapeMismatch("one action matrix per algebra basis element")
        for m in self.left + self.right:
            if m.rows != dim or m.cols != dim:
                raise ShapeMismatch("action matrix shape")
        self.inner_right = tuple(tuple(vec(h) for h in row) for row in inner_right)
        self.inner_left = (tuple(tuple(vec(h) for h in row) for row in inner_left)
                           if inner_left is not None else None)
        self.cyclic_right = cyclic_right
        self.cyclic_left = cyclic_left

    # -- action and inner product extensions ------------------------------

    def act_left(self, bcoeffs):
        acc = Matrix.zeros(self.dim, self.dim)
        for c, m in zip(bcoeffs, self.left):
            if not c.is_zero():
                acc = acc + m.scale(c)
        return acc

    def act_right(self, acoeffs):
        acc = Matrix.zeros(self.dim, self.dim)
        for c, m in zip(acoeffs, self.right):
            if not c.is_zero():
                acc = acc + m.scale(c)
        return acc

    def pair_right(self, x, y):
        """<x, y>_A: antilinear in x, linear in y, valued in A."""
        acc = v_zero(self.A.dim)
        for p, xp in enumerate(x):
            if xp.is_zero():
                continue
            cp = xp.conj()
            for q, yq in enumerate(y):
                if yq.is_zero():
                    continue
                acc = v_add(acc, v_scale(cp * yq, self.inner_right[p][q]))
        return acc

    def pair_left(self, x, y):
        """_B<x, y>: linear in x, antilinear in y, valued in B."""
        if self.inner_left is None:
            raise MissingInnerB("bimodule has no left-algebra-valued product")
        acc = v_zero(self.B.dim)
        for p, xp in enumerate(x):
            if xp.is_zero():
                continue
            for q, yq in enumerate(y):
                if yq.is_zero():
                    continue
                acc = v_add(acc, v_scale(xp * yq.conj(), self.inner_left[p][q]))
        return acc

    def basis_vec(self, p):
        return std_basis(self.dim, p)

    def __repr__(self):
        return "Bimodule(%r - %r, dim=%d)" % (self.B, self.A, self.dim)


# -- validation ----------------------------------------------------------------

@dataclass
class Check:
    status: str          # "pass" | "fail" | "skipped" | "missing"
    detail: str = ""


@dataclass
class BimoduleValidation:
    level: str
    checks: dict
    x4_regime: str
    y4_regime: str | None

    @property
    def ok(self):
        return all(c.status == "pass" for c in self.checks.values())

    @property
    def failures(self):
        return {k: c for k, c in self.checks.items() if c.status != "pass"}

    def lines(self):
        out = ["bimodule validation (%s level): %s" % (self.level, "pass" if self.ok else "FAIL")]
        for name, c in self.checks.items():
            if c.status == "pass":
                out.append("  %-12s pass" % name)
            else:
                out.append("  %-12s %s  %s" % (name, c.status.upper(), c.detail))
        out.append("  X4 regime: %s" % self.x4_regime)
        if self.y4_regime is not None:
            out.append("  Y4 regime: %s" % self.y4_regime)
        return out


def _first_failure(pred_iter):
    for key, ok in pred_iter:
        if not ok:
            return key
    return None


def block_gram(x, side="right"):
    """[iota(<e_p, e_q>)] as one big matrix, weighted for twisted adjoints.

    PSD of this block matrix certifies <x,x> in the positive cone for every
    module element at once: each iota(<x,x>) is a compression of it.
    """
    alg = x.A if side == "right" else x.B
    rep = alg.psd_rep
    n = rep.mats[0].rows
    blocks = [[None] * x.dim for _ in range(x.dim)]
    for p in range(x.dim):
        for q in range(x.dim):
            h = x.inner_right[p][q] if side == "right" else _left_pair_pq(x, p, q)
            blocks[p][q] = rep.weight * rep.realize(h)
    rows = []
    for p in range(x.dim):
        for u in range(n):
            rows.append(tuple(blocks[p][q][u, v] for q in range(x.dim) for v in range(n)))
    return Matrix(rows)


def _left_pair_pq(x, p, q):
    # _B<e_p, e_q> with the Y-side convention (linear in the first slot)
    return x.inner_left[p][q]


def _positivity_check(x, side, functional_family):
    """X4/Y4 gate.  Exact when the value algebra has a matrix realization,
    else sampled against supplied certified-positive functionals."""
    alg = x.A if side == "right" else x.B
    if alg.psd_rep is not None:
        h = block_gram(x, side)
        if not h.is_hermitian():
            return (Check("fail", "block Gram is not Hermitian (symmetry axiom fails)"),
                    "exact (matrix-realization block Gram)")
        cert = psd_decide(h)
        if cert.is_positive:
            return Check("pass"), "exact (matrix-realization block Gram, PSD certified)"
        return (Check("fail", "block Gram not PSD; witness refutes positivity"),
                "exact (matrix-realization block Gram)")
    family = [om for om in (functional_family or ()) if om.algebra == alg]
    if not family:
        return (Check("skipped", "no matrix realization and no functional family supplied"),
                "unchecked")
    from .algebra import functional_positivity
    for k, om in enumerate(family):
        fc = functional_positivity(alg, om)
        if not fc.positive:
            return (Check("fail", "supplied functional %d is not positive" % k),
                    "sampled")
        pair = x.pair_right if side == "right" else (lambda a, b: x.pair_left(b, a))
        g = Matrix([[om(pair(x.basis_vec(p), x.basis_vec(q))) for q in range(x.dim)]
                    for p in range(x.dim)])
        if not g.is_hermitian() or not psd_decide(g).is_positive:
            return (Check("fail", "pairing against functional %d is not PSD" % k),
                    "sampled against %d positive functionals" % len(family))
    return Check("pass"), "sampled against %d positive functionals (partial evidence)" % len(family)


def _validate_cyclic(x, structure, side):
    """P1-P3 (side=right) or Q1-Q3 (side=left) witness validation."""
    if structure is None:
        return Check("missing", "no cyclic-structure witness supplied")
    acts = x.right if side == "right" else x.left
    pair = (lambda u, w: x.pair_right(u, w)) if side == "right" else \
           (lambda u, w: x.pair_left(u, w))
    subs = structure.submodules
    all_span = []
    total = 0
    for s in subs:
        basis = row_space_basis(s.span)
        total += len(basis)
        all_span.extend(s.span)
    if span_rank(all_span) != x.dim or total != x.dim:
        return Check("fail", "submodules do not decompose the module directly")
    for i, j in itertools.combinations(range(len(subs)), 2):
        for u in subs[i].span:
            for w in subs[j].span:
                if not v_is_zero(pair(u, w)):
                    return Check("fail", "submodules %d and %d are not orthogonal" % (i, j))
    for i, s in enumerate(subs):
        basis = row_space_basis(s.span)
        for m in acts:
            for u in s.span:
                if not in_span(m.apply(u), basis):
                    return Check("fail", "action does not preserve submodule %d" % i)
        if not s.levels:
            return Check("fail", "submodule %d has no filtration levels" % i)
        prev = []
        union = []
        for k, lvl in enumerate(s.levels):
            lbasis = row_space_basis(lvl.span)
            for u in prev:
                if not in_span(u, lbasis):
                    return Check("fail", "filtration of submodule %d is not nested" % i)
            orbit = [m.apply(lvl.omega) for m in acts]
            obasis = row_space_basis(orbit)
            for u in lvl.span:
                if not in_span(u, obasis):
                    return Check("fail",
                                 "level %d of submodule %d is not cyclic for its vector" % (k, i))
            prev = lvl.span
            union.extend(lvl.span)
        if not same_subspace(union, s.span):
            return Check("fail", "filtration of submodule %d does not exhaust it" % i)
    return Check("pass")


def validate_bimodule(x, level="rigged", functional_family=None):
    """Check the bimodule/action axioms, the inner-product axioms (X1-X6 on
    the right side; additionally Y1-Y6, E3 and the cyclic witnesses at the
    equivalence level).  Nothing is assumed: every identity is evaluated on
    basis tuples; positivity states the regime used."""
    checks = {}
    a, b = x.A, x.B

    def identity_check(name, pred_iter):
        bad = _first_failure(pred_iter)
        checks[name] = Check("pass") if bad is None else Check("fail", "at %s" % (bad,))

    identity_check("actions", _action_axioms(x))
    identity_check("X2", ((("pair", p, q),
                           x.inner_right[p][q] == a.star_vec(x.inner_right[q][p]))
                          for p in range(x.dim) for q in range(x.dim)))
    identity_check("X3", ((("triple", p, q, i),
                           _x3_holds(x, p, q, i))
                          for p in range(x.dim) for q in range(x.dim) for i in range(a.dim)))
    identity_check("X5", ((("triple", p, q, i),
                           _x5_holds(x, p, q, i))
                          for p in range(x.dim) for q in range(x.dim) for i in range(b.dim)))
    c4, regime = _positivity_check(x, "right", functional_family)
    checks["X4"] = c4
    pairs = [x.inner_right[p][q] for p in range(x.dim) for q in range(x.dim)]
    rank = span_rank(pairs)
    checks["X6"] = Check("pass") if rank == a.dim else \
        Check("fail", "inner products span rank %d of %d" % (rank, a.dim))
    y4_regime = None
    if level == "equivalence":
        if x.inner_left is None:
            checks["Y"] = Check("missing", "no left-algebra-valued inner product")
        else:
            identity_check("Y2", ((("pair", p, q),
                                   x.inner_left[p][q] == b.star_vec(x.inner_left[q][p]))
                                  for p in range(x.dim) for q in range(x.dim)))
            identity_check("Y3", ((("triple", p, q, i),
                                   _y3_holds(x, p, q, i))
                                  for p in range(x.dim) for q in range(x.dim)
                                  for i in range(b.dim)))
            identity_check("Y5", ((("triple", p, q, i),
                                   _y5_holds(x, p, q, i))
                                  for p in range(x.dim) for q in range(x.dim)
                                  for i in range(a.dim)))
            c4b, y4_regime = _positivity_check(x, "left", functional_family)
            checks["Y4"] = c4b
            lpairs = [x.inner_left[p][q] for p in range(x.dim) for q in range(x.dim)]
            lrank = span_rank(lpairs)
            checks["Y6"] = Check("pass") if lrank == b.dim else \
                Check("fail", "inner products span rank %d of %d" % (lrank, b.dim))
            identity_check("E3", ((("triple", p, q, r),
                                   _e3_holds(x, p, q, r))
                                  for p in range(x.dim) for q in range(x.dim)
                                  for r in range(x.dim)))
        checks["P1-P3"] = _validate_cyclic(x, x.cyclic_right, "right")
        checks["Q1-Q3"] = _validate_cyclic(x, x.cyclic_left, "left")
    return BimoduleValidation(level, checks, regime, y4_regime)


def _action_axioms(x):
    a, b = x.A, x.B
    for i, j in itertools.product(range(b.dim), repeat=2):
        yield (("left-mult", i, j), x.left[i] * x.left[j] == x.act_left(b.mul[i][j]))
    for i, j in itertools.product(range(a.dim), repeat=2):
        yield (("right-mult", i, j), x.act_right(a.mul[i][j]) == x.right[j] * x.right[i])
    for i, j in itertools.product(range(b.dim), range(a.dim)):
        yield (("commute", i, j), x.left[i] * x.right[j] == x.right[j] * x.left[i])


def _x3_holds(x, p, q, i):
    lhs = x.pair_right(x.basis_vec(p), x.right[i].apply(x.basis_vec(q)))
    rhs = x.A.mul_vec(x.inner_right[p][q], x.A.basis_vec(i))
    return lhs == rhs


def _x5_holds(x, p, q, i):
    lhs = x.pair_right(x.basis_vec(p), x.left[i].apply(x.basis_vec(q)))
    rhs = x.pair_right(x.act_left(x.B.star[i]).apply(x.basis_vec(p)), x.basis_vec(q))
    return lhs == rhs


def _y3_holds(x, p, q, i):
    lhs = x.pair_left(x.left[i].apply(x.basis_vec(p)), x.basis_vec(q))
    rhs = x.B.mul_vec(x.B.basis_vec(i), x.inner_left[p][q])
    return lhs == rhs


def _y5_holds(x, p, q, i):
    lhs = x.pair_left(x.right[i].apply(x.basis_vec(p)), x.basis_vec(q))
    rhs = x.pair_left(x.basis_vec(p), x.act_right(x.A.star[i]).apply(x.basis_vec(q)))
    return lhs == rhs


def _e3_holds(x, p, q, r):
    lhs = x.act_left(x.inner_left[p][q]).apply(x.basis_vec(r))
    rhs = x.act_right(x.inner_right[q][r]).apply(x.basis_vec(p))
    return lhs == rhs


# -- conjugate bimodule ----------------------------------------------------------

def conjugate(x):
    """The conjugate (A-B)-bimodule.  In coordinates (conjugated entrywise)
    the two inner-product tensors simply swap roles and the actions become
    conjugated star-twisted opposites."""
    if x.inner_left is None:
        raise MissingInnerB("conjugate needs both inner products")
    left = [x.act_right(x.A.star[i]).conj() for i in range(x.A.dim)]
    right = [x.act_left(x.B.star[j]).conj() for j in range(x.B.dim)]
    return Bimodule(x.A, x.B, x.dim, left, right,
                    inner_right=x.inner_left, inner_left=x.inner_right,
                    cyclic_right=_conj_cyclic(x.cyclic_left),
                    cyclic_left=_conj_cyclic(x.cyclic_right))


def _conj_cyclic(structure):
    if structure is None:
        return None
    from .linalg import v_conj
    return CyclicStructure([
        CyclicSubmodule([v_conj(u) for u in s.span],
                        [CyclicLevel([v_conj(u) for u in l.span], v_conj(l.omega))
                         for l in s.levels])
        for s in structure.submodules])


# -- radical quotient -------------------------------------------------------------

def radical_right(x):
    """N_A = {v : <v, e_q>_A = 0 for all q} as a list of basis vectors.

    The defining equations are antilinear in v; conjugating them makes the
    system linear, so the kernel of the conjugated coefficient matrix is the
    radical itself."""
    rows = []
    for q in range(x.dim):
        for k in range(x.A.dim):
            rows.append(tuple(x.inner_right[p][q][k].conj() for p in range(x.dim)))
    return Matrix(rows).kernel_basis()


def radical_left(x):
    """N_B = {v : _B<v, e_q> = 0 for all q}."""
    rows = []
    for q in range(x.dim):
        for k in range(x.B.dim):
            rows.append(tuple(x.inner_left[p][q][k] for p in range(x.dim)))
    return Matrix(rows).kernel_basis()


def zero_length_space(x):
    """{v : <v,v>_A = 0}, computed exactly for matrix-realized A with a PSD
    block Gram (zero length forces the whole compressed column into the
    kernel of the block Gram)."""
    rep = x.A.psd_rep
    if rep is None:
        raise BadParams("zero_length_space needs a matrix-realized right algebra")
    h = block_gram(x, "right")
    cert = psd_decide(h)
    if not cert.is_positive:
        raise NotPsd("block Gram is not PSD")
    n = rep.mats[0].rows
    kbasis = row_space_basis(h.kernel_basis())
    m = x.dim
    # v has zero length iff v (x) e_u lies in ker(H) for every u
    _, proj = quotient_projection(kbasis, m * n)
    constraints = []
    for u in range(n):
        emb = [[F_ZERO] * m for _ in range(m * n)]
        for p in range(m):
            emb[p * n + u][p] = F_ONE
        constraints.extend((proj * Matrix(tuple(tuple(r) for r in emb))).entries)
    return Matrix(constraints).kernel_basis()


@dataclass
class QuotientResult:
    bimodule: Bimodule
    rep_indices: list
    projection: Matrix
    radical: list
    radicals_agree: bool | None
    definite: bool | None      # X4' on the quotient, when decidable


def quotient_by_N(x):
    """Quotient by the joint radical; with both products present the two
    radicals are compared exactly, and X4' on the quotient is certified when
    the right algebra has a matrix realization."""
    if not has_identity_structure(x.A) or not has_identity_structure(x.B):
        raise NoIdentityStructure("radical quotient needs identity structure on both algebras")
    n_a = radical_right(x)
    agree = None
    if x.inner_left is not None:
        n_b = radical_left(x)
        agree = same_subspace(n_a, n_b)
    reps, proj = quotient_projection(n_a, x.dim)
    emb = Matrix.from_columns([std_basis(x.dim, r) for r in reps]) if reps else \
        Matrix.zeros(x.dim, 0)
    left = [proj * m * emb for m in x.left]
    right = [proj * m * emb for m in x.right]
    inner_right = [[x.inner_right[p][q] for q in reps] for p in reps]
    inner_left = None
    if x.inner_left is not None:
        inner_left = [[x.inner_left[p][q] for q in reps] for p in reps]
    out = Bimodule(x.B, x.A, len(reps), left, right, inner_right, inner_left,
                   cyclic_right=_project_cyclic(x.cyclic_right, proj),
                   cyclic_left=_project_cyclic(x.cyclic_left, proj))
    definite = None
    if x.A.psd_rep is not None:
        try:
            definite = not zero_length_space(out)
        except NotPsd:
            definite = False
    return QuotientResult(out, reps, proj, n_a, agree, definite)


def _project_cyclic(structure, proj):
    if structure is None:
        return None
    subs = []
    for s in structure.submodules:
        span = [proj.apply(u) for u in s.span]
        span = [u for u in span if not v_is_zero(u)]
        if not span:
            continue
        levels = [CyclicLevel([proj.apply(u) for u in l.span], proj.apply(l.omega))
                  for l in s.levels]
        subs.append(CyclicSubmodule(span, levels))
    return CyclicStructure(subs)


# -- rank-one operators and finite-rank algebras -----------------------------------

def theta(x, u, w):
    """The rank-one operator z -> u <w, z>_A as a matrix on the module."""
    cols = []
    for r in range(x.dim):
        a = x.pair_right(w, x.basis_vec(r))
        cols.append(x.act_right(a).apply(u))
    return Matrix.from_columns(cols)


@dataclass
class FiniteRankAlgebra:
    algebra: StarAlgebra
    basis_mats: list             # operator matrices realizing the basis
    generator_pairs: list        # (p, q) for the kept generators

    def to_coeffs(self, m):
        flat = sum(m.entries, ())
        basis_rows = [sum(b.entries, ()) for b in self.basis_mats]
        c = coords_in_basis(flat, basis_rows)
        if c is None:
            raise DegenerateRiggedModule("operator outside the finite-rank span")
        return c

    def theta_coeffs(self, x, u, w):
        return self.to_coeffs(theta(x, u, w))


def finite_rank_algebra(x):
    """Span of the rank-one operators with composition product and the swap
    involution, returned as a StarAlgebra.  A matrix realization with the
    module Gram as weight is attached when the right algebra is the scalars
    and the Gram is PSD nondegenerate (positivity is then exactly decidable)."""
    gens = []
    pairs = []
    for p in range(x.dim):
        for q in range(x.dim):
            gens.append(theta(x, x.basis_vec(p), x.basis_vec(q)))
            pairs.append((p, q))
    kept, kept_pairs = [], []
    kept_rows = []
    for m, pq in zip(gens, pairs):
        flat = sum(m.entries, ())
        if v_is_zero(flat):
            continue
        if kept_rows and in_span(flat, kept_rows):
            continue
        kept.append(m)
        kept_pairs.append(pq)
        kept_rows = row_space_basis(kept_rows + [flat])
    if not kept:
        raise DegenerateRiggedModule("all rank-one operators vanish")
    dim = len(kept)
    fr = FiniteRankAlgebra(None, kept, kept_pairs)
    mul = [[None] * dim for _ in range(dim)]
    for i, j in itertools.product(range(dim), repeat=2):
        mul[i][j] = fr.to_coeffs(kept[i] * kept[j])
    star = []
    for (p, q) in kept_pairs:
        star.append(fr.to_coeffs(theta(x, x.basis_vec(q), x.basis_vec(p))))
    psd_rep = None
    if x.A.dim == 1:
        w = Matrix([[x.inner_right[p][q][0] for q in range(x.dim)] for p in range(x.dim)])
        if w.is_hermitian() and w.inverse() is not None and psd_decide(w).is_positive:
            psd_rep = PsdRep(tuple(kept), w)
    alg = StarAlgebra(dim, mul, star, kind="generic", psd_rep=psd_rep,
                      labels=["Th(%d,%d)" % pq for pq in kept_pairs])
    fr.algebra = alg
    return fr


def left_action_isomorphism(x, fr=None):
    """The map sending the left algebra into the finite-rank operators; for an
    equivalence bimodule this is a verified *-isomorphism."""
    if fr is None:
        fr = finite_rank_algebra(x)
    cols = [fr.to_coeffs(x.left[i]) for i in range(x.B.dim)]
    hom = StarHomomorphism(x.B, fr.algebra, Matrix.from_columns(cols))
    return fr, hom


# -- constructors -------------------------------------------------------------------

def _right_regular_data(a, n):
    """Right-module structure of the free module A^n: actions and pairings."""
    dim = n * a.dim

    def slot(i, al):
        return i * a.dim + al

    right = []
    for j in range(a.dim):
        cols = [None] * dim
        for i in range(n):
            for al in range(a.dim):
                img = a.mul_vec(a.basis_vec(al), a.basis_vec(j))
                col = [F_ZERO] * dim
                for k, ck in enumerate(img):
                    col[slot(i, k)] = ck
                cols[slot(i, al)] = tuple(col)
        right.append(Matrix.from_columns(cols))
    inner = [[None] * dim for _ in range(dim)]
    for i in range(n):
        for al in range(a.dim):
            for j in range(n):
                for be in range(a.dim):
                    if i != j:
                        inner[slot(i, al)][slot(j, be)] = v_zero(a.dim)
                    else:
                        inner[slot(i, al)][slot(j, be)] = \
                            a.mul_vec(a.star_vec(a.basis_vec(al)), a.basis_vec(be))
    return right, inner, slot


def free_module_bimodule(a, n):
    """A^n as an equivalence bimodule between the finite-rank operators on it
    and A, with the column inner product <w, z> = sum w_i* z_i and explicitly
    constructed cyclic witnesses."""
    if n < 1:
        raise BadParams("free module needs n >= 1")
    if a.unit is None:
        raise NoIdentityStructure("free_module_bimodule needs a unit")
    right, inner, slot = _right_regular_data(a, n)
    dim = n * a.dim
    shell = Bimodule(_trivial_algebra_placeholder(), a, dim,
                     [Matrix.identity(dim)], right, inner)
    fr = finite_rank_algebra(shell)
    kalg = fr.algebra
    _attach_block_psd_rep(kalg, fr, a, n)
    left = list(fr.basis_mats)
    inner_left = [[fr.to_coeffs(theta(shell, shell.basis_vec(p), shell.basis_vec(q)))
                   for q in range(dim)] for p in range(dim)]
    unit_slots = []
    for i in range(n):
        v = [F_ZERO] * dim
        for k, ck in enumerate(a.unit):
            v[slot(i, k)] = ck
        unit_slots.append(tuple(v))
    cyc_right = CyclicStructure([
        CyclicSubmodule([std_basis(dim, slot(i, al)) for al in range(a.dim)],
                        [CyclicLevel([std_basis(dim, slot(i, al)) for al in range(a.dim)],
                                     unit_slots[i])])
        for i in range(n)])
    all_basis = [std_basis(dim, p) for p in range(dim)]
    cyc_left = CyclicStructure([
        CyclicSubmodule(all_basis, [CyclicLevel(all_basis, unit_slots[0])])])
    return Bimodule(kalg, a, dim, left, right, inner, inner_left,
                    cyclic_right=cyc_right, cyclic_left=cyc_left)


def _trivial_algebra_placeholder():
    from .algebra import scalars_algebra
    return scalars_algebra()


def _attach_block_psd_rep(kalg, fr, a, n):
    """Realize the finite-rank algebra of A^n as block matrices over the
    realization of A (a full matrix algebra), giving the exact cone decision."""
    if a.psd_rep is None or a.matrix_size is None:
        return
    if a.psd_rep.weight != Matrix.identity(a.psd_rep.weight.rows):
        return
    k = a.psd_rep.mats[0].rows
    mats = []
    for m, (p, q) in zip(fr.basis_mats, fr.generator_pairs):
        i, al = divmod(p, a.dim)
        j, be = divmod(q, a.dim)
        blocks = [[Matrix.zeros(k, k) for _ in range(n)] for _ in range(n)]
        blocks[i][j] = a.psd_rep.realize(a.basis_vec(al)) * \
            a.psd_rep.realize(a.basis_vec(be)).adjoint()
        rows = []
        for bi in range(n):
            for u in range(k):
                rows.append(tuple(blocks[bi][bj][u, v] for bj in range(n) for v in range(k)))
        mats.append(Matrix(rows))
    kalg.psd_rep = PsdRep(tuple(mats), Matrix.identity(n * k))


def prehilbert_bimodule(module):
    """A nondegenerate PSD module H over the scalars as an equivalence
    bimodule between its finite-rank operators and C; the orthogonal basis
    from the congruence certificate supplies the cyclic witnesses."""
    from .algebra import scalars_algebra
    from .linalg import congruence_diagonalize

    if not module.is_psd() or not module.non_degenerate():
        raise NotPsd("prehilbert_bimodule needs a nondegenerate PSD module")
    c = scalars_algebra()
    dim = module.dim
    right = [Matrix.identity(dim)]
    inner = [[(module.gram[p, q],) for q in range(dim)] for p in range(dim)]
    shell = Bimodule(c, c, dim, [Matrix.identity(dim)], right, inner)
    fr = finite_rank_algebra(shell)
    left = list(fr.basis_mats)
    inner_left = [[fr.to_coeffs(theta(shell, shell.basis_vec(p), shell.basis_vec(q)))
                   for q in range(dim)] for p in range(dim)]
    u, _ = congruence_diagonalize(module.gram)
    rows = [u.row(i) for i in range(dim)]
    cyc_right = CyclicStructure([
        CyclicSubmodule([v], [CyclicLevel([v], v)]) for v in rows])
    all_basis = [std_basis(dim, p) for p in range(dim)]
    cyc_left = CyclicStructure([
        CyclicSubmodule(all_basis, [CyclicLevel(all_basis, rows[0])])])
    return Bimodule(fr.algebra, c, dim, left, right, inner, inner_left,
                    cyclic_right=cyc_right, cyclic_left=cyc_left)


def homomorphism_bimodule(phi):
    """A as a (B-A)-bimodule through a verified *-homomorphism Phi, with
    <x, y> = x* y; when Phi is an isomorphism the B-valued product
    Phi^{-1}(x y*) upgrades it to an equivalence bimodule."""
    defect = phi.defect()
    if defect is not None:
        raise NotStarHomomorphism("map fails the %s law at %s" % defect)
    a, b = phi.target, phi.source
    dim = a.dim
    right = [Matrix.from_columns([a.mul_vec(a.basis_vec(al), a.basis_vec(j))
                                  for al in range(dim)]) for j in range(dim)]
    left = [Matrix.from_columns([a.mul_vec(phi.apply(b.basis_vec(i)), a.basis_vec(al))
                                 for al in range(dim)]) for i in range(b.dim)]
    inner = [[a.mul_vec(a.star_vec(a.basis_vec(p)), a.basis_vec(q)) for q in range(dim)]
             for p in range(dim)]
    inner_left = None
    cyc_left = None
    inv = phi.inverse()
    if inv is not None and inv.is_star_homomorphism():
        inner_left = [[inv.apply(a.mul_vec(a.basis_vec(p), a.star_vec(a.basis_vec(q))))
                       for q in range(dim)] for p in range(dim)]
    cyc_right = None
    if a.unit is not None:
        all_basis = [std_basis(dim, p) for p in range(dim)]
        cyc_right = CyclicStructure([CyclicSubmodule(all_basis,
                                                     [CyclicLevel(all_basis, tuple(a.unit))])])
        if inner_left is not None:
            cyc_left = CyclicStructure([CyclicSubmodule(all_basis,
                                                        [CyclicLevel(all_basis, tuple(a.unit))])])
    return Bimodule(b, a, dim, left, right, inner, inner_left,
                    cyclic_right=cyc_right, cyclic_left=cyc_left)


# -- tensor products ---------------------------------------------------------------

def _kron_vec(u, w):
    return tuple(a * b for a in u for b in w)


@dataclass
class BalancedTensorResult:
    bimodule: Bimodule
    rep_indices: list
    projection: Matrix           # pair space -> quotient coordinates
    relation_basis: list         # basis of the balancing subspace

    def class_of_pair(self, xv, yv):
        return self.projection.apply(_kron_vec(xv, yv))


def tensor_bimodules(x, y):
    """Balanced tensor over the middle algebra: quotient of the pair space by
    x.a (x) w - x (x) a.w, with the induced inner products
    <<x1 (x) y1, x2 (x) y2>> = <y1, <x1,x2>.y2> on the right and the mirrored
    formula on the left.  Cyclic witnesses are recovered by auto-search."""
    if x.A != y.B:
        raise MiddleAlgebraMismatch("right algebra of the first factor must match "
                                    "the left algebra of the second")
    if x.cyclic_right is None or y.cyclic_left is None:
        raise MissingCyclicWitness("balanced tensor needs P witnesses on the first "
                                   "factor and Q witnesses on the second")
    mx, my = x.dim, y.dim
    pair_dim = mx * my
    relations = []
    for i in range(x.A.dim):
        for p in range(mx):
            xa = x.right[i].column(p)
            for u in range(my):
                ay = y.left[i].column(u)
                v1 = _kron_vec(xa, std_basis(my, u))
                v2 = _kron_vec(std_basis(mx, p), ay)
                r = tuple(a - b for a, b in zip(v1, v2))
                if not v_is_zero(r):
                    relations.append(r)
    nbasis = row_space_basis(relations)
    reps, proj = quotient_projection(nbasis, pair_dim)
    emb = Matrix.from_columns([std_basis(pair_dim, r) for r in reps]) if reps else \
        Matrix.zeros(pair_dim, 0)

    def descend(op):
        for nv in nbasis:
            assert v_is_zero(proj.apply(op.apply(nv))), "action does not descend"
        return proj * op * emb

    left = [descend(x.left[i].kron(Matrix.identity(my))) for i in range(x.B.dim)]
    right = [descend(Matrix.identity(mx).kron(y.right[j])) for j in range(y.A.dim)]
    # pair-level inner products, checked to vanish against the relations
    t_right = [[None] * pair_dim for _ in range(pair_dim)]
    for p, u, q, v in itertools.product(range(mx), range(my), range(mx), range(my)):
        a = x.inner_right[p][q]
        w = y.act_left(a).apply(y.basis_vec(v))
        t_right[p * my + u][q * my + v] = y.pair_right(y.basis_vec(u), w)
    _check_balanced(t_right, nbasis, pair_dim, y.A.dim, conj_first=True)
    inner_right = [[t_right[ra][rb] for rb in reps] for ra in reps]
    inner_left = None
    if x.inner_left is not None and y.inner_left is not None:
        t_left = [[None] * pair_dim for _ in range(pair_dim)]
        for p, u, q, v in itertools.product(range(mx), range(my), range(mx), range(my)):
            a = y.inner_left[u][v]          # _A<y1, y2>, valued in the middle algebra
            w = x.act_right(a).apply(x.basis_vec(p))
            t_left[p * my + u][q * my + v] = x.pair_left(w, x.basis_vec(q))
        _check_balanced(t_left, nbasis, pair_dim, x.B.dim, conj_first=False)
        inner_left = [[t_left[ra][rb] for rb in reps] for ra in reps]
    out = Bimodule(x.B, y.A, len(reps), left, right, inner_right, inner_left)
    extra = []
    for s in x.cyclic_right.submodules:
        for l in s.levels:
            for t in y.cyclic_left.submodules:
                for l2 in t.levels:
                    extra.append(proj.apply(_kron_vec(l.omega, l2.omega)))
            for u in range(my):
                extra.append(proj.apply(_kron_vec(l.omega, std_basis(my, u))))
    out.cyclic_right = auto_cyclic_search(out, "right", extra)
    if inner_left is not None:
        out.cyclic_left = auto_cyclic_search(out, "left", extra)
    return BalancedTensorResult(out, reps, proj, nbasis)


def _check_balanced(tensor, nbasis, pair_dim, value_dim, conj_first):
    for nv in nbasis:
        for b in range(pair_dim):
            acc = v_zero(value_dim)
            for a_idx in range(pair_dim):
                c = nv[a_idx].conj() if conj_first else nv[a_idx]
                if not c.is_zero():
                    acc = v_add(acc, v_scale(c, tensor[a_idx][b]))
            assert v_is_zero(acc), "inner product does not descend to the balanced tensor"


def tensor_bimodules_external(x1, x2):
    """Tensor of a (B1-A1)- and a (B2-A2)-bimodule over the tensor-product
    algebras, with factorwise inner products."""
    from .algebra import tensor_product
    bt = tensor_product(x1.B, x2.B)
    at = tensor_product(x1.A, x2.A)
    dim = x1.dim * x2.dim
    left = [x1.left[i1].kron(x2.left[i2])
            for i1 in range(x1.B.dim) for i2 in range(x2.B.dim)]
    right = [x1.right[j1].kron(x2.right[j2])
             for j1 in range(x1.A.dim) for j2 in range(x2.A.dim)]
    inner_right = [[_kron_vec(x1.inner_right[p1][q1], x2.inner_right[p2][q2])
                    for q1 in range(x1.dim) for q2 in range(x2.dim)]
                   for p1 in range(x1.dim) for p2 in range(x2.dim)]
    inner_left = None
    if x1.inner_left is not None and x2.inner_left is not None:
        inner_left = [[_kron_vec(x1.inner_left[p1][q1], x2.inner_left[p2][q2])
                       for q1 in range(x1.dim) for q2 in range(x2.dim)]
                      for p1 in range(x1.dim) for p2 in range(x2.dim)]
    out = Bimodule(bt, at, dim, left, right, inner_right, inner_left,
                   cyclic_right=_tensor_cyclic(x1.cyclic_right, x2.cyclic_right, x2.dim),
                   cyclic_left=_tensor_cyclic(x1.cyclic_left, x2.cyclic_left, x2.dim))
    return out


def _tensor_cyclic(s1, s2, dim2):
    if s1 is None or s2 is None:
        return None
    subs = []
    for a in s1.submodules:
        for b in s2.submodules:
            span = [_kron_vec(u, w) for u in a.span for w in b.span]
            levels = []
            for la in a.levels:
                for lb in b.levels:
                    levels.append(CyclicLevel([_kron_vec(u, w)
                                               for u in la.span for w in lb.span],
                                              _kron_vec(la.omega, lb.omega)))
            subs.append(CyclicSubmodule(span, levels))
    return CyclicStructure(subs)


def auto_cyclic_search(x, side, extra_candidates=()):
    """Search for a cyclic structure: orthogonal components of the basis under
    the inner product, with candidate vectors scanned per component (basis
    vectors, supplied extras, unit multiples).  Returns None on failure."""
    pairing = (lambda p, q: x.inner_right[p][q]) if side == "right" else \
              (lambda p, q: x.inner_left[p][q])
    acts = x.right if side == "right" else x.left
    alg = x.A if side == "right" else x.B
    m = x.dim
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        parent[find(i)] = find(j)

    for p in range(m):
        for q in range(m):
            if not v_is_zero(pairing(p, q)):
                union(p, q)
    for mat in acts:
        for p in range(m):
            for q in range(m):
                if not mat[q, p].is_zero():
                    union(p, q)
    comps = {}
    for p in range(m):
        comps.setdefault(find(p), []).append(p)
    submodules = []
    for indices in comps.values():
        span = [std_basis(m, p) for p in indices]
        basis = row_space_basis(span)
        candidates = list(span)
        if alg.unit is not None:
            unit_act = x.act_right(alg.unit) if side == "right" else x.act_left(alg.unit)
            candidates.extend(unit_act.apply(v) for v in span)
        for v in extra_candidates:
            if not v_is_zero(v) and in_span(v, basis):
                candidates.append(vec(v))
        found = None
        for omega in candidates:
            orbit = row_space_basis([mat.apply(omega) for mat in acts])
            if all(in_span(u, orbit) for u in span):
                found = omega
                break
        if found is None:
            return None
        submodules.append(CyclicSubmodule(span, [CyclicLevel(span, found)]))
    return CyclicStructure(submodules)


# -- full corners ---------------------------------------------------------------

@dataclass
class CornerResult:
    bimodule: Bimodule            # (K - QKQ)
    compacts: StarAlgebra         # K = finite rank operators on A^L
    corner: StarAlgebra           # Q K Q
    fullness_rank: int
    module_basis_mats: list       # operator matrices for the module basis
    corner_basis_mats: list


def corner_bimodule(a, size, q):
    """K(A^size) Q as an equivalence bimodule between the finite-rank algebra
    and the corner Q K Q of a full projection Q, with cyclic witnesses built
    from the rank-one reassociation identity."""
    if a.unit is None:
        raise NoIdentityStructure("corner_bimodule needs a unital algebra")
    right, inner, slot = _right_regular_data(a, size)
    dim = size * a.dim
    shell = Bimodule(_trivial_algebra_placeholder(), a, dim,
                     [Matrix.identity(dim)], right, inner)
    fr = finite_rank_algebra(shell)
    kalg = fr.algebra
    _attach_block_psd_rep(kalg, fr, a, size)
    if q.rows != dim or q.cols != dim:
        raise ShapeMismatch("projection must act on the %d-dimensional module" % dim)
    try:
        qc = fr.to_coeffs(q)
    except DegenerateRiggedModule as exc:
        raise NotProjection("Q is not a finite-rank operator") from exc
    if q * q != q:
        raise NotProjection("Q is not idempotent")
    star_q = _star_matrix(fr, qc)
    if star_q != q:
        raise NotProjection("Q is not self-adjoint for the module inner product")
    # fullness: span{ K_a Q K_b } = K
    prods = []
    for m1 in fr.basis_mats:
        for m2 in fr.basis_mats:
            prods.append(sum((m1 * q * m2).entries, ()))
    rank = span_rank(prods)
    if rank != kalg.dim:
        raise NotFull("projection is not full", rank=rank, needed=kalg.dim)
    # corner algebra Q K Q inside K
    corner_mats, corner_coeffs = [], []
    rows = []
    for m in fr.basis_mats:
        cm = q * m * q
        flat = sum(cm.entries, ())
        if v_is_zero(flat) or (rows and in_span(flat, rows)):
            continue
        corner_mats.append(cm)
        rows = row_space_basis(rows + [flat])
    cdim = len(corner_mats)
    corner_rows = [sum(m.entries, ()) for m in corner_mats]

    def corner_coords(m):
        c = coords_in_basis(sum(m.entries, ()), corner_rows)
        if c is None:
            raise DegenerateRiggedModule("operator outside the corner")
        return c

    cmul = [[corner_coords(corner_mats[i] * corner_mats[j]) for j in range(cdim)]
            for i in range(cdim)]
    cstar = [corner_coords(_star_matrix(fr, fr.to_coeffs(m))) for m in corner_mats]
    cpsd = None
    if kalg.psd_rep is not None:
        cmats = tuple(kalg.psd_rep.realize(fr.to_coeffs(m)) for m in corner_mats)
        cpsd = PsdRep(cmats, kalg.psd_rep.weight)
    corner = StarAlgebra(cdim, cmul, cstar, kind="corner", psd_rep=cpsd,
                         labels=["QK%dQ" % i for i in range(cdim)])
    # the bimodule K Q
    xmats = []
    xrows = []
    for m in fr.basis_mats:
        xm = m * q
        flat = sum(xm.entries, ())
        if v_is_zero(flat) or (xrows and in_span(flat, xrows)):
            continue
        xmats.append(xm)
        xrows = row_space_basis(xrows + [flat])
    xdim = len(xmats)
    xrows_basis = [sum(m.entries, ()) for m in xmats]

    def xcoords(m):
        c = coords_in_basis(sum(m.entries, ()), xrows_basis)
        if c is None:
            raise DegenerateRiggedModule("operator outside K Q")
        return c

    def xmat(coeffs):
        acc = Matrix.zeros(dim, dim)
        for cc, m in zip(coeffs, xmats):
            if not cc.is_zero():
                acc = acc + m.scale(cc)
        return acc

    left = [Matrix.from_columns([xcoords(fr.basis_mats[i] * xm) for xm in xmats])
            for i in range(kalg.dim)]
    bright = [Matrix.from_columns([xcoords(xm * corner_mats[j]) for xm in xmats])
              for j in range(cdim)]
    inner_corner = [[corner_coords(_star_matrix(fr, fr.to_coeffs(xmats[p])) * xmats[pq])
                     for pq in range(xdim)] for p in range(xdim)]
    inner_k = [[fr.to_coeffs(xmats[p] * _star_matrix(fr, fr.to_coeffs(xmats[pq])))
                for pq in range(xdim)] for p in range(xdim)]
    # cyclic witnesses: right side per rank-one row slot via the reassociation
    # Th_{w,z} Q (Q Th_{z,v} Q) = Th_{w<Qz,Qz>,v} Q
    z = _find_invertible_compression(a, size, q, shell, slot)
    if z is None:
        raise MissingCyclicWitness("no module vector with invertible <Qz, Qz>")
    zvec, inv = z
    row_slots = {}
    for idx, m in enumerate(xmats):
        srow = _row_slot_of(m, fr, size, a)
        row_slots.setdefault(srow, []).append(idx)
    subs = []
    for srow in sorted(row_slots):
        span = [std_basis(xdim, idx) for idx in row_slots[srow]]
        ei_inv = [F_ZERO] * dim
        for k, ck in enumerate(inv):
            ei_inv[slot(srow, k)] = ck
        omega_mat = theta(shell, tuple(ei_inv), zvec) * q
        omega = xcoords(omega_mat)
        subs.append(CyclicSubmodule(span, [CyclicLevel(span, omega)]))
    cyc_right = CyclicStructure(subs)
    all_basis = [std_basis(xdim, idx) for idx in range(xdim)]
    cyc_left = CyclicStructure([CyclicSubmodule(all_basis,
                                                [CyclicLevel(all_basis, xcoords(q))])])
    bim = Bimodule(kalg, corner, xdim, left, bright, inner_corner, inner_k,
                   cyclic_right=cyc_right, cyclic_left=cyc_left)
    return CornerResult(bim, kalg, corner, rank, xmats, corner_mats)


def _star_matrix(fr, coeffs):
    acc = Matrix.zeros(fr.basis_mats[0].rows, fr.basis_mats[0].rows)
    starc = fr.algebra.star_vec(coeffs)
    for c, m in zip(starc, fr.basis_mats):
        if not c.is_zero():
            acc = acc + m.scale(c)
    return acc


def _row_slot_of(m, fr, n, a):
    # the free-module slot of the row space of a rank-one combination
    for p in range(m.rows):
        for c in range(m.cols):
            if not m[p, c].is_zero():
                return p // a.dim
    return 0


def _find_invertible_compression(a, size, q, shell, slot):
    """A module vector z with <Qz, Qz>_A invertible, plus the inverse."""
    candidates = [shell.basis_vec(p) for p in range(shell.dim)]
    for i in range(size):
        v = [F_ZERO] * shell.dim
        for k, ck in enumerate(a.unit):
            v[slot(i, k)] = ck
        candidates.append(tuple(v))
    for i in range(size):
        for j in range(i + 1, size):
            v = [F_ZERO] * shell.dim
            for k, ck in enumerate(a.unit):
                v[slot(i, k)] = ck
                v[slot(j, k)] = v[slot(j, k)] + ck
            candidates.append(tuple(v))
    for z in candidates:
        qz = q.apply(z)
        g = shell.pair_right(qz, qz)
        inv = _algebra_inverse(a, g)
        if inv is not None:
            return qz, inv
    return None


def _algebra_inverse(a, g):
    """Two-sided inverse of g, or None: solve x g = 1 and check g x = 1."""
    if a.unit is None:
        return None
    m = Matrix.from_columns([a.mul_vec(a.basis_vec(k), g) for k in range(a.dim)])
    sol = m.solve(tuple(a.unit))
    if sol is None or a.mul_vec(g, sol) != tuple(a.unit):
        return None
    return sol

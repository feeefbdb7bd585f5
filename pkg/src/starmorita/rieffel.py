"""Algebraic Rieffel induction and its consequences.

induce() runs the whole pipeline: balanced tensor with a representation,
induced inner product, exact positivity gate, null quotient, and the induced
representation, with bookkeeping so elementary tensors can be chased through
the quotients.  On top of it: induced intertwiners, the commutant map, the
GNS comparison, round-trip unitaries, Morita contexts and the center
isomorphism."""

import itertools
from dataclasses import dataclass

from .algebra import StarAlgebra, StarHomomorphism, functional_positivity
from .bimodule import Bimodule, conjugate
from .errors import (
    ContextConditionFailed,
    MissingInnerB,
    NotInCommutant,
    NotIntertwiner,
    NotPositiveFunctional,
    NotStronglyNonDegenerate,
    NotUnital,
    PositivityViolated,
)
from .linalg import (
    Matrix,
    coords_in_basis,
    psd_decide,
    quotient_projection,
    row_space_basis,
    span_rank,
    std_basis,
    v_is_zero,
    vec,
)
from .prehilbert import (
    InnerProductModule,
    Intertwiner,
    Representation,
    classify_intertwiner,
    gns,
    validate_representation,
)
from .rings import F_ZERO, frac


def _kron_vec(u, w):
    return tuple(a * b for a in u for b in w)


@dataclass
class InductionResult:
    bimodule: Bimodule
    source: Representation
    pair_dim: int
    relation_basis: list            # the balancing subspace N
    ktilde_reps: list
    ktilde_proj: Matrix             # pair coordinates -> K-tilde coordinates
    ktilde_gram: Matrix
    certificate: object             # PsdCertificate of the induced product
    null_reps: list
    null_proj: Matrix               # K-tilde -> K coordinates
    module: InnerProductModule      # K
    representation: Representation  # pi_B on K

    def project_pair(self, v):
        return self.null_proj.apply(self.ktilde_proj.apply(v))

    def elementary(self, xv, psiv):
        """Class of the elementary tensor x (x) psi in K."""
        return self.project_pair(_kron_vec(vec(xv), vec(psiv)))

    def lift_index(self, a):
        """Pair-space (p, u) indices of the a-th basis vector of K."""
        pair_index = self.ktilde_reps[self.null_reps[a]]
        h = self.source.dim
        return divmod(pair_index, h)


def induce(x, rep):
    """Rieffel induction of an algebra representation through a rigged
    bimodule.  Raises PositivityViolated (with a witness) when the induced
    inner product fails the positivity gate for this representation."""
    from .errors import AlgebraMismatch
    if rep.algebra != x.A:
        raise AlgebraMismatch("induction needs a representation of the right algebra")
    m, h = x.dim, rep.dim
    pair_dim = m * h
    relations = []
    for i in range(x.A.dim):
        for p in range(m):
            xa = x.right[i].column(p)
            for u in range(h):
                pu = rep.ops[i].column(u)
                r = tuple(a - b for a, b in
                          zip(_kron_vec(xa, std_basis(h, u)),
                              _kron_vec(std_basis(m, p), pu)))
                if not v_is_zero(r):
                    relations.append(r)
    nbasis = row_space_basis(relations)
    kt_reps, kt_proj = quotient_projection(nbasis, pair_dim)
    # induced product on the pair space
    gram_pair = [[None] * pair_dim for _ in range(pair_dim)]
    for p, q in itertools.product(range(m), repeat=2):
        block = rep.module.gram * rep.act(x.inner_right[p][q])
        for u in range(h):
            for v in range(h):
                gram_pair[p * h + u][q * h + v] = block[u, v]
    gp = Matrix(gram_pair)
    assert gp.is_hermitian(), "induced product is not Hermitian; inputs unvalidated"
    for nv in nbasis:
        assert v_is_zero(gp.apply(nv)), "induced product does not descend"
    ktilde_gram = Matrix([[gp[a, b] for b in kt_reps] for a in kt_reps])
    cert = psd_decide(ktilde_gram)
    if not cert.is_positive:
        witness_pair = _lift_through(kt_reps, cert.witness, pair_dim)
        raise PositivityViolated("induced inner product is not positive "
                                 "semi-definite for this representation",
                                 witness=witness_pair)
    null = ktilde_gram.kernel_basis()
    n_reps, n_proj = quotient_projection(null, len(kt_reps))
    gram_k = Matrix([[ktilde_gram[a, b] for b in n_reps] for a in n_reps])
    module = InnerProductModule(gram_k)
    emb_pair = Matrix.from_columns([std_basis(pair_dim, r) for r in kt_reps]) \
        if kt_reps else Matrix.zeros(pair_dim, 0)
    emb_k = Matrix.from_columns([std_basis(len(kt_reps), r) for r in n_reps]) \
        if n_reps else Matrix.zeros(len(kt_reps), 0)
    ops = []
    for i in range(x.B.dim):
        pair_op = x.left[i].kron(Matrix.identity(h))
        for nv in nbasis:
            assert v_is_zero(kt_proj.apply(pair_op.apply(nv))), \
                "left action does not descend"
        if not n_reps:
            ops.append(Matrix.zeros(0, 0))
        else:
            ops.append(n_proj * kt_proj * pair_op * emb_pair * emb_k)
    piB = Representation(x.B, module, ops)
    report = validate_representation(piB)
    assert report.ok, "induced representation failed validation"
    return InductionResult(x, rep, pair_dim, nbasis, kt_reps, kt_proj,
                           ktilde_gram, cert, n_reps, n_proj, module, piB)


def _lift_through(reps, witness, pair_dim):
    out = [F_ZERO] * pair_dim
    for c, r in zip(witness, reps):
        out[r] = c
    return tuple(out)


def induce_intertwiner(x, t, ind_source, ind_target):
    """The induced map [x (x) psi] -> [x (x) T psi] between two inductions;
    unitary/isometric/adjointable classification carries over."""
    if not t.verify():
        raise NotIntertwiner("map does not intertwine the source representations")
    m = x.dim
    pair_map = Matrix.identity(m).kron(t.matrix)
    for nv in ind_source.relation_basis:
        img = pair_map.apply(nv)
        assert v_is_zero(ind_target.project_pair(img)), "induced map does not descend"
    cols = []
    for a in range(ind_source.module.dim):
        p, u = ind_source.lift_index(a)
        pair_vec = _kron_vec(std_basis(m, p), t.matrix.column(u))
        cols.append(ind_target.project_pair(pair_vec))
    v = Matrix.from_columns(cols) if cols else Matrix.zeros(ind_target.module.dim, 0)
    out = classify_intertwiner(v, ind_source.representation, ind_target.representation)
    if not out.verify():
        raise NotIntertwiner("induced map fails to intertwine")
    if t.unitary:
        assert out.unitary, "unitarity must be preserved by induction"
    elif t.isometric:
        assert out.isometric, "isometry must be preserved by induction"
    return out


def commutant_map(x, ind, c):
    """x (x) psi -> x (x) C psi for C in the commutant of the source; lands in
    the commutant of the induced representation."""
    rep = ind.source
    for i in range(rep.algebra.dim):
        if c * rep.ops[i] != rep.ops[i] * c:
            raise NotInCommutant("operator does not commute with the source action")
    m = x.dim
    cols = []
    for a in range(ind.module.dim):
        p, u = ind.lift_index(a)
        cols.append(ind.project_pair(_kron_vec(std_basis(m, p), c.column(u))))
    out = Matrix.from_columns(cols) if cols else Matrix.zeros(0, 0)
    for i in range(x.B.dim):
        assert out * ind.representation.ops[i] == ind.representation.ops[i] * out
    return out


def direct_sum_comparison(x, reps):
    """The canonical unitary from the induction of a direct sum onto the
    direct sum of the inductions, certified exactly."""
    from .prehilbert import direct_sum as rep_sum
    total = rep_sum(reps)
    ind_sum = induce(x, total)
    parts = [induce(x, r) for r in reps]
    target = rep_sum([p.representation for p in parts])
    offsets_h = []
    off = 0
    for r in reps:
        offsets_h.append(off)
        off += r.dim
    offsets_k = []
    off = 0
    for p in parts:
        offsets_k.append(off)
        off += p.module.dim
    total_k = off
    cols = []
    for a in range(ind_sum.module.dim):
        p_idx, u = ind_sum.lift_index(a)
        for b, (r, part) in enumerate(zip(reps, parts)):
            if offsets_h[b] <= u < offsets_h[b] + r.dim:
                inner = part.elementary(std_basis(x.dim, p_idx),
                                        std_basis(r.dim, u - offsets_h[b]))
                col = [F_ZERO] * total_k
                for k, ck in enumerate(inner):
                    col[offsets_k[b] + k] = ck
                cols.append(tuple(col))
                break
    u_mat = Matrix.from_columns(cols) if cols else Matrix.zeros(total_k, 0)
    out = classify_intertwiner(u_mat, ind_sum.representation, target)
    assert out.verify() and out.unitary, "direct-sum comparison failed certification"
    return ind_sum, parts, out


# -- GNS as induction ----------------------------------------------------------

def functional_bimodule(a, omega):
    """The (A-C)-bimodule A with <x, y> = omega(x* y)."""
    from .algebra import scalars_algebra
    c = scalars_algebra()
    dim = a.dim
    left = [Matrix.from_columns([a.mul_vec(a.basis_vec(i), a.basis_vec(k))
                                 for k in range(dim)]) for i in range(a.dim)]
    right = [Matrix.identity(dim)]
    inner = [[(omega(a.mul_vec(a.star_vec(a.basis_vec(p)), a.basis_vec(q))),)
              for q in range(dim)] for p in range(dim)]
    return Bimodule(a, c, dim, left, right, inner)


@dataclass
class GnsComparison:
    induction: InductionResult
    gns_result: object
    unitary: Intertwiner
    kernels_agree: bool


def gns_via_induction_compare(a, omega):
    """Induce from the scalars acting on themselves through the functional
    bimodule and produce an exact unitary onto the GNS representation; the
    null space of the induced product is the null ideal of the functional."""
    from .algebra import scalars_algebra
    fc = functional_positivity(a, omega)
    if not fc.positive:
        raise NotPositiveFunctional("comparison needs a positive functional")
    c = scalars_algebra()
    crep = Representation(c, InnerProductModule(Matrix.identity(1)), [Matrix.identity(1)])
    x = functional_bimodule(a, omega)
    ind = induce(x, crep)
    g = gns(a, omega)
    # K-tilde is A itself here; its null space is the Gel'fand-type ideal
    lifted_null = [_lift_through(ind.ktilde_reps, nv, ind.pair_dim)
                   for nv in ind.ktilde_gram.kernel_basis()]
    from .linalg import same_subspace
    agree = same_subspace(lifted_null, g.ideal_basis)
    cols = []
    for b in range(ind.module.dim):
        p, _ = ind.lift_index(b)
        cols.append(g.class_of(a.basis_vec(p)))
    u = Matrix.from_columns(cols) if cols else Matrix.zeros(g.module.dim, 0)
    out = classify_intertwiner(u, ind.representation, g.representation)
    assert out.unitary and out.verify(), "GNS comparison unitary failed certification"
    if a.unit is not None and ind.module.dim:
        lhs = u.apply(ind.elementary(a.unit, (frac(1),)))
        assert lhs == g.class_of(a.unit)
    return GnsComparison(ind, g, out, agree)


# -- round trips -----------------------------------------------------------------

def _strongly_nondegenerate_actions(x):
    left_span = [x.left[i].column(p) for i in range(x.B.dim) for p in range(x.dim)]
    right_span = [x.right[j].column(p) for j in range(x.A.dim) for p in range(x.dim)]
    return span_rank(left_span) == x.dim and span_rank(right_span) == x.dim


@dataclass
class RoundTrip:
    outbound: InductionResult          # R_X(rep)
    inbound: InductionResult           # R_Xbar(R_X(rep))
    unitary: Intertwiner               # onto the original representation


def roundtrip_unitary(x, rep):
    """The canonical unitary from the double induction back to the original
    strongly non-degenerate representation, certified exactly:
    [xbar (x) [y (x) psi]] -> pi(<x, y>) psi."""
    if x.inner_left is None:
        raise MissingInnerB("round trip needs an equivalence bimodule")
    if not validate_representation(rep).strongly_non_degenerate:
        raise NotStronglyNonDegenerate("representation is not strongly non-degenerate")
    if not _strongly_nondegenerate_actions(x):
        raise NotStronglyNonDegenerate("bimodule actions are not strongly non-degenerate")
    ind1 = induce(x, rep)
    xbar = conjugate(x)
    ind2 = induce(xbar, ind1.representation)
    cols = []
    for a2 in range(ind2.module.dim):
        p, k1 = ind2.lift_index(a2)
        q, u = ind1.lift_index(k1)
        cols.append(rep.act(x.inner_right[p][q]).apply(std_basis(rep.dim, u)))
    u_mat = Matrix.from_columns(cols) if cols else Matrix.zeros(rep.dim, 0)
    out = classify_intertwiner(u_mat, ind2.representation, rep)
    assert out.verify(), "round-trip map is not an intertwiner"
    assert out.unitary, "round-trip map failed the unitarity certificate"
    return RoundTrip(ind1, ind2, out)


# -- Morita context and centers ----------------------------------------------------

@dataclass
class MoritaContextReport:
    ok: bool
    f_surjective: bool
    g_surjective: bool
    condition_i: bool
    condition_ii: bool

    def lines(self):
        return ["morita context: %s" % ("ok" if self.ok else "FAILED"),
                "  f surjective: %s, g surjective: %s" % (self.f_surjective, self.g_surjective),
                "  compatibility (i): %s, (ii): %s" % (self.condition_i, self.condition_ii)]


def morita_context_check(x):
    """Verify that the two inner products give surjective balanced pairing
    maps satisfying the equivalence-data compatibility conditions."""
    if x.A.unit is None or x.B.unit is None:
        raise NotUnital("Morita contexts are for unital algebras")
    if x.inner_left is None:
        raise MissingInnerB("Morita context needs both inner products")
    f_rank = span_rank([x.inner_right[p][q] for p in range(x.dim) for q in range(x.dim)])
    g_rank = span_rank([x.inner_left[p][q] for p in range(x.dim) for q in range(x.dim)])
    f_surj = f_rank == x.A.dim
    g_surj = g_rank == x.B.dim
    cond_i = True
    cond_ii = True
    for p, q, r in itertools.product(range(x.dim), repeat=3):
        # _B<z, y> . x = z . <y, x>_A  (both compatibility arrangements)
        lhs = x.act_left(x.inner_left[p][q]).apply(x.basis_vec(r))
        rhs = x.act_right(x.inner_right[q][r]).apply(x.basis_vec(p))
        if lhs != rhs:
            cond_i = False
        lhs2 = x.act_right(x.inner_right[p][q]).apply(x.basis_vec(r))
        rhs2 = x.act_left(x.inner_left[r][p]).apply(x.basis_vec(q))
        if lhs2 != rhs2:
            cond_ii = False
        if not cond_i and not cond_ii:
            break
    return MoritaContextReport(f_surj and g_surj and cond_i and cond_ii,
                               f_surj, g_surj, cond_i, cond_ii)


def center_basis(a):
    """Basis of the center, as coefficient vectors."""
    rows = []
    for i in range(a.dim):
        cols = [tuple(c1 - c2 for c1, c2 in
                      zip(a.mul_vec(a.basis_vec(i), a.basis_vec(k)),
                          a.mul_vec(a.basis_vec(k), a.basis_vec(i))))
                for k in range(a.dim)]
        rows.extend(Matrix.from_columns(cols).entries)
    return Matrix(rows).kernel_basis()


def center_subalgebra(a, basis):
    """The center as a StarAlgebra on the given basis."""
    mul = [[coords_in_basis(a.mul_vec(u, w), basis) for w in basis] for u in basis]
    star = [coords_in_basis(a.star_vec(u), basis) for u in basis]
    assert all(all(c is not None for c in row) for row in mul)
    return StarAlgebra(len(basis), mul, star, kind="generic")


@dataclass
class CenterIsomorphism:
    center_a: list
    center_b: list
    map_matrix: Matrix             # coordinates center(A) -> center(B)
    homomorphism: StarHomomorphism


def center_isomorphism(x):
    """The *-isomorphism center(A) -> center(B) determined by
    x . a = phi(a) . x on the whole module, certified exactly."""
    if x.A.unit is None or x.B.unit is None:
        raise NotUnital("center isomorphism is for unital algebras")
    za = center_basis(x.A)
    zb = center_basis(x.B)
    if len(za) != len(zb):
        raise ContextConditionFailed("centers have different dimensions")
    flat_left = Matrix.from_columns([sum(x.left[i].entries, ()) for i in range(x.B.dim)])
    images = []
    for a_vec in za:
        target = sum(x.act_right(a_vec).entries, ())
        b_vec = flat_left.solve(target)
        if b_vec is None:
            raise ContextConditionFailed("central element does not act as a left "
                                         "multiplication")
        if not _is_central(x.B, b_vec):
            raise ContextConditionFailed("transported element is not central")
        images.append(b_vec)
    ca = center_subalgebra(x.A, za)
    cb = center_subalgebra(x.B, zb)
    cols = [coords_in_basis(img, zb) for img in images]
    assert all(c is not None for c in cols)
    hom = StarHomomorphism(ca, cb, Matrix.from_columns(cols))
    if not hom.is_isomorphism():
        raise ContextConditionFailed("center map is not a *-isomorphism")
    return CenterIsomorphism(za, zb, hom.matrix, hom)


def _is_central(a, v):
    for i in range(a.dim):
        if a.mul_vec(a.basis_vec(i), v) != a.mul_vec(v, a.basis_vec(i)):
            return False
    return True

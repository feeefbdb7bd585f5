"""Classical limits: lam -> 0 for modules, operators, representations, and
bimodules over the deformation ring, plus the naturality comparison between
inducing first and contracting first.

Deformed objects must carry ring-valued data so the evaluation at lam = 0 is
always defined; fraction-valued entries are rejected with
DenominatorVanishesAtZero.  Witness vectors are exempt: their limit exists
whenever the denominators are units at the origin."""

import itertools
from dataclasses import dataclass

from .algebra import (
    LinearFunctional,
    classical_limit_functional,
    classical_limit_matrix,
    classical_limit_vec,
    deformation_container,
    functional_positivity,
    require_ring_valued,
)
from .bimodule import (
    Bimodule,
    CyclicLevel,
    CyclicStructure,
    CyclicSubmodule,
    block_gram,
    homomorphism_bimodule,
    radical_right,
    zero_length_space,
)
from .errors import (
    NotAdjointable,
    NotPositiveFunctional,
    NotPsd,
    NotStarHomomorphism,
)
from .linalg import (
    Matrix,
    psd_decide,
    quotient_projection,
    row_space_basis,
    same_subspace,
    std_basis,
    v_is_zero,
    vec,
)
from .prehilbert import (
    InnerProductModule,
    Representation,
    classify_intertwiner,
    validate_representation,
)
from .rings import classical_limit_scalar, frac


@dataclass
class LimitMap:
    """Projection implementing phi -> limit of phi: evaluate the coefficients
    at lam = 0, then quotient by the vectors whose limit has length zero."""

    source_dim: int
    rep_indices: list
    projection: Matrix

    def apply(self, v):
        return self.projection.apply(classical_limit_vec(v))


def _require_ring_matrix(m):
    for row in m.entries:
        for x in row:
            require_ring_valued(x)
    return m


def cl_prehilbert(h):
    """Classical limit of a PSD module: quotient by the kernel of the Gram
    evaluated at lam = 0; nondegenerate by construction."""
    if not h.is_psd():
        raise NotPsd("classical limit needs a PSD module")
    _require_ring_matrix(h.gram)
    g0 = classical_limit_matrix(h.gram)
    ker = g0.kernel_basis()
    reps, proj = quotient_projection(ker, h.dim)
    g = Matrix([[g0[i, j] for j in reps] for i in reps])
    module = InnerProductModule(g)
    assert module.non_degenerate()
    lm = LimitMap(h.dim, reps, proj)
    # <limit(phi), limit(psi)> = limit(<phi, psi>) on the standard basis
    for p in range(h.dim):
        for q in range(h.dim):
            lhs = module.inner(lm.apply(std_basis(h.dim, p)), lm.apply(std_basis(h.dim, q)))
            assert lhs == frac(classical_limit_scalar(h.gram[p, q]))
    return module, lm


def cl_operator(mat, lm_source, lm_target):
    """Classical limit of an adjointable operator: well-defined because such
    operators map zero-limit vectors to zero-limit vectors (checked)."""
    _require_ring_matrix(mat)
    m0 = classical_limit_matrix(mat)
    for kvec in lm_source.projection.kernel_basis():
        if not v_is_zero(lm_target.projection.apply(m0.apply(kvec))):
            raise NotAdjointable("operator does not preserve the zero-limit space")
    if not lm_target.rep_indices or not lm_source.rep_indices:
        return Matrix.zeros(len(lm_target.rep_indices), len(lm_source.rep_indices))
    emb = Matrix.from_columns([std_basis(lm_source.source_dim, r)
                               for r in lm_source.rep_indices])
    return lm_target.projection * m0 * emb


def cl_representation(rep, algebra0=None):
    """Classical limit of a representation of a deformed algebra; strong
    non-degeneracy and cyclic metadata survive."""
    a0 = algebra0 if algebra0 is not None else deformation_container(rep.algebra)
    module0, lm = cl_prehilbert(rep.module)
    ops0 = [cl_operator(m, lm, lm) for m in rep.ops]
    cyclic = [lm.apply(v) for v in rep.cyclic_vectors]
    out = Representation(a0, module0, ops0,
                         cyclic_vectors=[v for v in cyclic if not v_is_zero(v)])
    report = validate_representation(out)
    assert report.ok, "classical limit failed representation validation"
    return out, lm


@dataclass
class ClassicalBimodule:
    bimodule: Bimodule
    limit_map: LimitMap
    radicals_agree: bool | None       # left and right zero-limit spaces coincide
    quadratic_radical_agrees: bool | None


def cl_bimodule(x, algebra0=None, left_algebra0=None):
    """Classical limit of a deformed bimodule: quotient by the vectors whose
    pairings all vanish at lam = 0; actions, inner products, and cyclic
    witnesses descend."""
    a0 = algebra0 if algebra0 is not None else deformation_container(x.A)
    b0 = left_algebra0 if left_algebra0 is not None else deformation_container(x.B)
    for row in x.inner_right:
        for h in row:
            for c in h:
                require_ring_valued(c)
    for m in x.left + x.right:
        _require_ring_matrix(m)
    # X_L via the conjugated linear system, over the classical field
    rows = []
    for q in range(x.dim):
        for k in range(x.A.dim):
            rows.append(tuple(frac(classical_limit_scalar(x.inner_right[p][q][k])).conj()
                              for p in range(x.dim)))
    xl = Matrix(rows).kernel_basis()
    agree = None
    if x.inner_left is not None:
        lrows = []
        for q in range(x.dim):
            for k in range(x.B.dim):
                lrows.append(tuple(frac(classical_limit_scalar(x.inner_left[p][q][k]))
                                   for p in range(x.dim)))
        xl_left = Matrix(lrows).kernel_basis()
        agree = same_subspace(xl, xl_left)
    reps, proj = quotient_projection(xl, x.dim)
    lm = LimitMap(x.dim, reps, proj)
    emb = Matrix.from_columns([std_basis(x.dim, r) for r in reps]) if reps else \
        Matrix.zeros(x.dim, 0)
    left0, right0 = [], []
    for m in x.left:
        m0 = classical_limit_matrix(m)
        for kv in xl:
            assert v_is_zero(proj.apply(m0.apply(kv))), "left action does not descend"
        left0.append(proj * m0 * emb)
    for m in x.right:
        m0 = classical_limit_matrix(m)
        for kv in xl:
            assert v_is_zero(proj.apply(m0.apply(kv))), "right action does not descend"
        right0.append(proj * m0 * emb)
    inner0 = [[classical_limit_vec(x.inner_right[p][q]) for q in reps] for p in reps]
    inner_left0 = None
    if x.inner_left is not None:
        inner_left0 = [[classical_limit_vec(x.inner_left[p][q]) for q in reps] for p in reps]
    out = Bimodule(b0, a0, len(reps), left0, right0, inner0, inner_left0,
                   cyclic_right=_cl_cyclic(x.cyclic_right, lm),
                   cyclic_left=_cl_cyclic(x.cyclic_left, lm))
    quad = None
    if a0.psd_rep is not None:
        # the zero-limit space is exactly {x : limit<x,x> = 0} at matrix scale
        pre = Bimodule(b0, a0, x.dim,
                       [classical_limit_matrix(m) for m in x.left],
                       [classical_limit_matrix(m) for m in x.right],
                       [[classical_limit_vec(x.inner_right[p][q]) for q in range(x.dim)]
                        for p in range(x.dim)])
        try:
            quad = same_subspace(zero_length_space(pre), xl)
        except NotPsd:
            quad = False
    return ClassicalBimodule(out, lm, agree, quad)


def _cl_cyclic(structure, lm):
    if structure is None:
        return None
    subs = []
    for s in structure.submodules:
        span = [lm.apply(u) for u in s.span]
        span = [u for u in span if not v_is_zero(u)]
        if not span:
            continue
        levels = []
        for l in s.levels:
            omega0 = lm.apply(l.omega)
            levels.append(CyclicLevel([lm.apply(u) for u in l.span], omega0))
        subs.append(CyclicSubmodule(span, levels))
    return CyclicStructure(subs) if subs else None


@dataclass
class NaturalityResult:
    deformed_induction: object
    classical_bimodule: ClassicalBimodule
    classical_rep: Representation
    classical_induction: object
    limit_of_induced: Representation
    unitary: object


def naturality_check(x_def, rep_def):
    """Certify the canonical unitary between (limit of the induction) and
    (induction of the limits): limit([x (x) phi]) -> [limit(x) (x) limit(phi)]."""
    from .rieffel import induce
    ind_def = induce(x_def, rep_def)
    a0 = deformation_container(x_def.A)
    b0 = deformation_container(x_def.B)
    clb = cl_bimodule(x_def, a0, b0)
    rep0, lm_h = cl_representation(rep_def, a0)
    ind0 = induce(clb.bimodule, rep0)
    limit_rep, lm_k = cl_representation(ind_def.representation, b0)
    cols = []
    for a in range(limit_rep.dim):
        # lift: basis of the limit space -> K_def representative -> pair index
        kdef_index = lm_k.rep_indices[a]
        p, u = ind_def.lift_index(kdef_index)
        x0 = clb.limit_map.apply(std_basis(x_def.dim, p))
        phi0 = lm_h.apply(std_basis(rep_def.dim, u))
        cols.append(ind0.elementary(x0, phi0))
    u_mat = Matrix.from_columns(cols) if cols else Matrix.zeros(ind0.module.dim, 0)
    out = classify_intertwiner(u_mat, limit_rep, ind0.representation)
    assert out.verify(), "naturality map fails to intertwine"
    assert out.unitary, "naturality map failed the unitarity certificate"
    return NaturalityResult(ind_def, clb, rep0, ind0, limit_rep, out)


@dataclass
class DeformedHomomorphismResult:
    bimodule: Bimodule                # the deformed homomorphism bimodule
    classical: ClassicalBimodule
    classical_direct: Bimodule        # homomorphism bimodule of the limit map
    isomorphic: bool


def deformed_homomorphism_bimodule(phi_def):
    """Bimodule of a deformed *-homomorphism, plus the verification that its
    classical limit is the homomorphism bimodule of the classical limit map."""
    defect = phi_def.defect()
    if defect is not None:
        raise NotStarHomomorphism("deformed map fails the %s law at %s" % defect)
    x_def = homomorphism_bimodule(phi_def)
    b0 = deformation_container(phi_def.source)
    a0 = deformation_container(phi_def.target)
    phi0 = phi_def.classical_limit(b0, a0)
    if not phi0.is_star_homomorphism():
        raise NotStarHomomorphism("classical limit of the map is not a *-homomorphism")
    direct = homomorphism_bimodule(phi0)
    clb = cl_bimodule(x_def, a0, b0)
    iso = _rigged_isomorphic(clb.bimodule, direct)
    return DeformedHomomorphismResult(x_def, clb, direct, iso)


def _rigged_isomorphic(x, y):
    """Isomorphism of rigged bimodules along identical coordinates: same
    dimensions, actions, and inner products."""
    if x.dim != y.dim or x.A != y.A or x.B != y.B:
        return False
    if list(x.left) != list(y.left) or list(x.right) != list(y.right):
        return False
    return x.inner_right == y.inner_right


@dataclass
class PositiveLiftReport:
    status: str                  # "Lifted" | "ConstantLiftFails"
    certificate: object

    def lines(self):
        if self.status == "Lifted":
            return ["constant lift is positive for the deformed product"]
        return ["constant lift fails positivity (no higher-order search performed)"]


def positive_lift_check(a_def, omega0):
    """Test whether the lam-constant lift of a classically positive functional
    is positive for the deformed product.  No higher-order corrections are
    searched; a failure only refutes the constant lift."""
    a0 = deformation_container(a_def)
    fc0 = functional_positivity(a0, LinearFunctional(a0, vec(omega0.values)))
    if not fc0.positive:
        raise NotPositiveFunctional("input functional is not classically positive")
    lifted = LinearFunctional(a_def, vec(omega0.values))
    fc = functional_positivity(a_def, lifted)
    if fc.positive:
        return PositiveLiftReport("Lifted", fc)
    return PositiveLiftReport("ConstantLiftFails", fc)

"""Rieffel induction: the functor, GNS comparison, round trips, centers."""

import pytest

from starmorita.algebra import (
    StarHomomorphism,
    density_functional,
    identity_homomorphism,
    matrix_algebra,
    scalars_algebra,
    zero_functional,
)
from starmorita.bimodule import Bimodule, free_module_bimodule, homomorphism_bimodule
from starmorita.errors import (
    ContextConditionFailed,
    NotInCommutant,
    NotPositiveFunctional,
    NotStronglyNonDegenerate,
    PositivityViolated,
)
from starmorita.linalg import Matrix, std_basis
from starmorita.prehilbert import (
    InnerProductModule,
    Representation,
    classify_intertwiner,
    defining_representation,
    direct_sum,
    gns,
    intertwiners,
    validate_representation,
)
from starmorita.rieffel import (
    center_basis,
    center_isomorphism,
    commutant_map,
    functional_bimodule,
    gns_via_induction_compare,
    induce,
    induce_intertwiner,
    morita_context_check,
    roundtrip_unitary,
)
from starmorita.rings import F_I, F_ONE, F_ZERO, frac


def scalar_defining_rep():
    c = scalars_algebra()
    return Representation(c, InnerProductModule(Matrix.identity(1)), [Matrix.identity(1)])


def test_induce_free_module_gives_defining():
    x = free_module_bimodule(scalars_algebra(), 2)
    ind = induce(x, scalar_defining_rep())
    assert ind.module.dim == 2
    assert ind.module.gram == Matrix.identity(2)
    # the induced action is the finite-rank (defining) action itself
    assert list(ind.representation.ops) == list(x.left)
    assert validate_representation(ind.representation).strongly_non_degenerate


def test_induce_homomorphism_bimodule_is_pullback():
    m2 = matrix_algebra(2)
    x = homomorphism_bimodule(identity_homomorphism(m2))
    rep = defining_representation(m2)
    ind = induce(x, rep)
    assert ind.module.dim == 2
    search = intertwiners(ind.representation, rep)
    assert search.status == "UnitaryFound"


def test_induce_zero_inner_product():
    c = scalars_algebra()
    x = Bimodule(c, c, 1, [Matrix.identity(1)], [Matrix.identity(1)],
                 [[(F_ZERO,)]])
    ind = induce(x, scalar_defining_rep())
    assert ind.module.dim == 0


def test_positivity_gate_fires():
    c = scalars_algebra()
    x = Bimodule(c, c, 1, [Matrix.identity(1)], [Matrix.identity(1)],
                 [[(-F_ONE,)]])
    with pytest.raises(PositivityViolated) as exc:
        induce(x, scalar_defining_rep())
    assert exc.value.witness is not None


def test_induce_intertwiner_identity_and_composition():
    x = free_module_bimodule(scalars_algebra(), 2)
    rep = scalar_defining_rep()
    ind = induce(x, rep)
    ident = classify_intertwiner(Matrix.identity(1), rep, rep)
    v = induce_intertwiner(x, ident, ind, ind)
    assert v.matrix == Matrix.identity(ind.module.dim)
    # composition: scaling by i then by i again equals scaling by -1
    s = classify_intertwiner(Matrix.identity(1).scale(F_I), rep, rep)
    vs = induce_intertwiner(x, s, ind, ind)
    v2 = induce_intertwiner(
        x, classify_intertwiner(s.matrix * s.matrix, rep, rep), ind, ind)
    assert vs.matrix * vs.matrix == v2.matrix


def test_induce_intertwiner_gns_unitary():
    m2 = matrix_algebra(2)
    x = homomorphism_bimodule(identity_homomorphism(m2))
    om = density_functional(m2, Matrix.diag([1, 0]))
    g = gns(m2, om)
    rep = defining_representation(m2)
    search = intertwiners(g.representation, rep)
    assert search.status == "UnitaryFound"
    ind1 = induce(x, g.representation)
    ind2 = induce(x, rep)
    v = induce_intertwiner(x, search.unitary, ind1, ind2)
    assert v.unitary


def test_induce_intertwiner_isometry_from_inclusion():
    m2 = matrix_algebra(2)
    x = homomorphism_bimodule(identity_homomorphism(m2))
    rep = defining_representation(m2)
    both = direct_sum([rep, rep])
    incl = Matrix.from_columns([std_basis(4, 0), std_basis(4, 1)])
    t = classify_intertwiner(incl, rep, both)
    assert t.isometric and not t.unitary
    ind1 = induce(x, rep)
    ind2 = induce(x, both)
    v = induce_intertwiner(x, t, ind1, ind2)
    assert v.isometric and not v.unitary


def test_commutant_map():
    m2 = matrix_algebra(2)
    x = homomorphism_bimodule(identity_homomorphism(m2))
    rep = defining_representation(m2)
    ind = induce(x, rep)
    out = commutant_map(x, ind, Matrix.identity(2))
    assert out == Matrix.identity(ind.module.dim)
    out_i = commutant_map(x, ind, Matrix.identity(2).scale(F_I))
    assert out_i == Matrix.identity(ind.module.dim).scale(F_I)
    with pytest.raises(NotInCommutant):
        commutant_map(x, ind, Matrix([[0, 1], [0, 0]]))


def test_commutant_map_block_swap():
    m2 = matrix_algebra(2)
    x = homomorphism_bimodule(identity_homomorphism(m2))
    rep = direct_sum([defining_representation(m2), defining_representation(m2)])
    ind = induce(x, rep)
    swap = Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    out = commutant_map(x, ind, swap)
    for m in ind.representation.ops:
        assert out * m == m * out
    # multiplicativity of the commutant homomorphism on this element
    assert commutant_map(x, ind, swap * swap) == out * out


def test_gns_via_induction_rank_one():
    m2 = matrix_algebra(2)
    om = density_functional(m2, Matrix.diag([1, 0]))
    cmp = gns_via_induction_compare(m2, om)
    assert cmp.unitary.unitary
    assert cmp.kernels_agree
    assert cmp.gns_result.module.dim == 2


def test_gns_via_induction_zero_and_full():
    m2 = matrix_algebra(2)
    cmp0 = gns_via_induction_compare(m2, zero_functional(m2))
    assert cmp0.gns_result.module.dim == 0 and cmp0.induction.module.dim == 0
    cmp = gns_via_induction_compare(m2, density_functional(m2, Matrix.identity(2)))
    assert cmp.gns_result.module.dim == 4 and cmp.unitary.unitary
    with pytest.raises(NotPositiveFunctional):
        gns_via_induction_compare(m2, density_functional(m2, Matrix([[0, 1], [1, 0]])))


def test_roundtrip_free_scalars():
    x = free_module_bimodule(scalars_algebra(), 2)
    rt = roundtrip_unitary(x, scalar_defining_rep())
    assert rt.unitary.unitary and rt.unitary.verify()


def test_roundtrip_free_matrix2():
    m2 = matrix_algebra(2)
    x = free_module_bimodule(m2, 2)
    rt = roundtrip_unitary(x, defining_representation(m2))
    assert rt.unitary.unitary and rt.unitary.verify()


def test_roundtrip_rejects_degenerate_rep():
    m2 = matrix_algebra(2)
    x = homomorphism_bimodule(identity_homomorphism(m2))
    bad = Representation(m2, InnerProductModule(Matrix.identity(2)),
                         [Matrix.zeros(2, 2)] * 4)
    with pytest.raises(NotStronglyNonDegenerate):
        roundtrip_unitary(x, bad)


def test_roundtrip_naturality():
    # U2 o (RR(T)) = T o U1 for an intertwiner T between two representations
    x = free_module_bimodule(scalars_algebra(), 2)
    rep = scalar_defining_rep()
    rt1 = roundtrip_unitary(x, rep)
    t = classify_intertwiner(Matrix.identity(1).scale(frac(3)), rep, rep)
    v1 = induce_intertwiner(x, t, rt1.outbound, rt1.outbound)
    xbar_v = induce_intertwiner(conjugate_of(x), v1, rt1.inbound, rt1.inbound)
    assert rt1.unitary.matrix * xbar_v.matrix == t.matrix * rt1.unitary.matrix


def conjugate_of(x):
    from starmorita.bimodule import conjugate
    return conjugate(x)


def test_direct_sum_compatibility():
    from starmorita.rieffel import direct_sum_comparison
    m2 = matrix_algebra(2)
    x = homomorphism_bimodule(identity_homomorphism(m2))
    rep = defining_representation(m2)
    om = density_functional(m2, Matrix.diag([1, 0]))
    rep2 = gns(m2, om).representation
    ind_sum, parts, u = direct_sum_comparison(x, [rep, rep2])
    assert u.unitary and u.verify()
    assert ind_sum.module.dim == sum(p.module.dim for p in parts)


def test_morita_context_free_modules():
    for n in (2, 3):
        x = free_module_bimodule(scalars_algebra(), n)
        report = morita_context_check(x)
        assert report.ok


def test_morita_context_rank_deficient():
    c = scalars_algebra()
    x = Bimodule(c, c, 1, [Matrix.identity(1)], [Matrix.identity(1)],
                 [[(F_ZERO,)]], [[(F_ONE,)]])
    report = morita_context_check(x)
    assert not report.ok and not report.f_surjective


def test_center_isomorphism_free_module():
    x = free_module_bimodule(scalars_algebra(), 3)
    iso = center_isomorphism(x)
    assert len(iso.center_a) == 1 and len(iso.center_b) == 1
    assert iso.homomorphism.is_isomorphism()


def test_center_isomorphism_automorphism_bimodule():
    m2 = matrix_algebra(2)
    # conjugation by the permutation matrix S: E_ij -> E_{s(i)s(j)}
    perm = {0: 1, 1: 0}
    cols = []
    for i in range(2):
        for j in range(2):
            cols.append(m2.basis_vec(perm[i] * 2 + perm[j]))
    alpha = StarHomomorphism(m2, m2, Matrix.from_columns(cols))
    assert alpha.is_isomorphism()
    x = homomorphism_bimodule(alpha)
    iso = center_isomorphism(x)
    # the center is the scalars; the induced map is the identity on it
    assert iso.homomorphism.matrix == Matrix.identity(1)
    assert center_basis(m2) == [tuple(m2.unit)]


def test_functional_bimodule_rigged():
    m2 = matrix_algebra(2)
    om = density_functional(m2, Matrix.diag([1, 1]))
    x = functional_bimodule(m2, om)
    from starmorita.bimodule import validate_bimodule
    assert validate_bimodule(x, level="rigged").ok

"""Classical limits of modules, operators, representations, and bimodules."""

import random

import pytest

from conftest import random_frac
from starmorita.algebra import (
    LinearFunctional,
    StarAlgebra,
    StarHomomorphism,
    deformation_container,
    functional,
    identity_homomorphism,
    matrix_algebra,
    scalars_algebra,
    trace_functional,
    validate_algebra,
)
from starmorita.bimodule import (
    finite_rank_algebra,
    free_module_bimodule,
    prehilbert_bimodule,
    validate_bimodule,
)
from starmorita.classical import (
    cl_bimodule,
    cl_operator,
    cl_prehilbert,
    cl_representation,
    deformed_homomorphism_bimodule,
    naturality_check,
    positive_lift_check,
)
from starmorita.errors import (
    DenominatorVanishesAtZero,
    NotAdjointable,
    NotPositiveFunctional,
    NotStarHomomorphism,
)
from starmorita.linalg import Matrix, v_add, v_scale
from starmorita.prehilbert import InnerProductModule, Representation, validate_representation
from starmorita.rings import F_LAM, F_ONE, F_ZERO, RATIONAL, frac


def unimodular_weight():
    """Hermitian positive lam-deformation of the identity with polynomial
    inverse: [[1+lam^2, lam], [lam, 1]]."""
    return Matrix([[F_ONE + F_LAM * F_LAM, F_LAM], [F_LAM, F_ONE]])


def twisted_compacts():
    return prehilbert_bimodule(InnerProductModule(unimodular_weight()))


def test_cl_prehilbert_examples():
    h0, lm = cl_prehilbert(InnerProductModule(Matrix.diag([1, F_LAM])))
    assert h0.dim == 1
    h1, _ = cl_prehilbert(InnerProductModule(Matrix.identity(3)))
    assert h1.dim == 3
    h2, _ = cl_prehilbert(InnerProductModule(Matrix.identity(2).scale(F_LAM)))
    assert h2.dim == 0


def test_cl_prehilbert_rejects_fractions():
    g = Matrix([[frac(1) / (F_ONE + F_LAM)]])
    with pytest.raises(DenominatorVanishesAtZero):
        cl_prehilbert(InnerProductModule(g))


def test_cl_operator():
    mod = InnerProductModule(Matrix.identity(2))
    _, lm = cl_prehilbert(mod)
    assert cl_operator(Matrix.identity(2), lm, lm) == Matrix.identity(2)
    assert cl_operator(Matrix.identity(2).scale(F_LAM), lm, lm) == Matrix.zeros(2, 2)
    degenerate = InnerProductModule(Matrix.diag([1, F_LAM]))
    _, lmd = cl_prehilbert(degenerate)
    with pytest.raises(NotAdjointable):
        cl_operator(Matrix([[0, 1], [0, 0]]), lmd, lmd)


def test_cl_operator_functorial():
    rng = random.Random(3)
    mod = InnerProductModule(Matrix.identity(2))
    _, lm = cl_prehilbert(mod)
    for _ in range(10):
        a = Matrix([[random_frac(rng, "deformation", 1, 3) for _ in range(2)]
                    for _ in range(2)])
        b = Matrix([[random_frac(rng, "deformation", 1, 3) for _ in range(2)]
                    for _ in range(2)])
        assert cl_operator(a * b, lm, lm) == cl_operator(a, lm, lm) * cl_operator(b, lm, lm)


def test_cl_unitary_stays_unitary():
    d = unimodular_weight()
    mod = InnerProductModule(d)
    _, lm = cl_prehilbert(mod)
    u = Matrix([[0, 1], [1, 0]])
    # u is d(0)-unitary classically; check the limit certificate directly
    u0 = cl_operator(u, lm, lm)
    g0 = Matrix.identity(2)
    assert u0.adjoint() * g0 * u0 == g0


def test_cl_linear_rule():
    rng = random.Random(5)
    mod = InnerProductModule(Matrix.diag([1, F_LAM, 1]))
    _, lm = cl_prehilbert(mod)
    from starmorita.rings import classical_limit_scalar
    for _ in range(15):
        z = random_frac(rng, "deformation", 1, 3)
        w = random_frac(rng, "deformation", 1, 3)
        phi = tuple(random_frac(rng, "deformation", 1, 3) for _ in range(3))
        psi = tuple(random_frac(rng, "deformation", 1, 3) for _ in range(3))
        lhs = lm.apply(v_add(v_scale(z, phi), v_scale(w, psi)))
        rhs = v_add(v_scale(frac(classical_limit_scalar(z)), lm.apply(phi)),
                    v_scale(frac(classical_limit_scalar(w)), lm.apply(psi)))
        assert lhs == rhs


def test_cl_representation_defining():
    m2 = matrix_algebra(2)
    rep = Representation(m2, InnerProductModule(Matrix.identity(2)), list(m2.psd_rep.mats))
    rep0, _ = cl_representation(rep)
    assert validate_representation(rep0).ok
    assert list(rep0.ops) == list(m2.psd_rep.mats)


def test_cl_bimodule_lambda_independent():
    x = free_module_bimodule(scalars_algebra(), 2)
    clb = cl_bimodule(x)
    assert clb.bimodule.dim == 2
    assert clb.bimodule.inner_right == x.inner_right
    assert validate_bimodule(clb.bimodule, level="equivalence").ok


def test_cl_bimodule_drops_lambda_summand():
    c = scalars_algebra()
    from starmorita.bimodule import Bimodule
    d = Matrix.diag([1, F_LAM])
    inner = [[(d[p, q],) for q in range(2)] for p in range(2)]
    x = Bimodule(c, c, 2, [Matrix.identity(2)], [Matrix.identity(2)], inner)
    clb = cl_bimodule(x)
    assert clb.bimodule.dim == 1
    assert clb.quadratic_radical_agrees


def test_cl_twisted_equivalence_bimodule():
    x = twisted_compacts()
    report = validate_bimodule(x, level="equivalence")
    assert report.ok, report.lines()
    clb = cl_bimodule(x)
    assert clb.radicals_agree
    out = validate_bimodule(clb.bimodule, level="equivalence")
    assert out.ok, out.lines()
    # the limit algebra is the ordinary finite-rank algebra of C^2
    plain = finite_rank_algebra(free_module_bimodule(scalars_algebra(), 2)).algebra
    assert clb.bimodule.B.mul == plain.mul and clb.bimodule.B.star == plain.star


def test_naturality_lambda_independent():
    x = free_module_bimodule(scalars_algebra(), 2)
    c = scalars_algebra()
    rep = Representation(c, InnerProductModule(Matrix.identity(1)), [Matrix.identity(1)])
    res = naturality_check(x, rep)
    assert res.unitary.unitary


def test_naturality_deformed_gram():
    c = scalars_algebra()
    x = free_module_bimodule(c, 2)
    rep = Representation(c, InnerProductModule(Matrix.diag([1, F_ONE + F_LAM])),
                         [Matrix.identity(2)])
    res = naturality_check(x, rep)
    assert res.unitary.unitary
    # a Gram entry that dies at lam = 0 shrinks the classical side coherently
    rep2 = Representation(c, InnerProductModule(Matrix.diag([1, F_LAM])),
                          [Matrix.identity(2)])
    res2 = naturality_check(x, rep2)
    assert res2.unitary.unitary
    assert res2.classical_induction.module.dim == 2


def test_naturality_twisted():
    from starmorita.bimodule import conjugate
    x = twisted_compacts()
    kd = x.B
    rep = Representation(kd, InnerProductModule(unimodular_weight()),
                         [m for m in x.left])
    assert validate_representation(rep).ok
    res = naturality_check(conjugate(x), rep)
    assert res.unitary.unitary


def test_deformed_homomorphism_bimodule():
    x = twisted_compacts()
    kd = x.B
    res = deformed_homomorphism_bimodule(identity_homomorphism(kd))
    assert res.isomorphic
    report = validate_bimodule(res.classical.bimodule, level="rigged")
    assert report.ok


def test_deformed_homomorphism_rejects_order_lambda_defect():
    m2 = matrix_algebra(2)
    # identity plus a lam-order multiplicativity defect
    cols = [m2.basis_vec(k) for k in range(4)]
    cols[1] = v_add(cols[1], v_scale(F_LAM, m2.basis_vec(1)))
    phi = StarHomomorphism(m2, m2, Matrix.from_columns(cols))
    with pytest.raises(NotStarHomomorphism):
        deformed_homomorphism_bimodule(phi)


def _deformed_nilpotent_square(sign):
    one, e = (F_ONE, F_ZERO), (F_ZERO, F_ONE)
    sq = (F_LAM if sign > 0 else -F_LAM, F_ZERO)
    mul = [[one, e], [e, sq]]
    return StarAlgebra(2, mul, [one, e], unit=one)


def test_positive_lift_check():
    m2 = matrix_algebra(2)
    rep = positive_lift_check(m2, trace_functional(m2))
    assert rep.status == "Lifted"
    a_def = _deformed_nilpotent_square(+1)
    zero = LinearFunctional(a_def, (F_ZERO, F_ZERO))
    assert positive_lift_check(a_def, zero).status == "Lifted"
    # omega0(1) = omega0(e) = 1 is not even classically positive: rejected
    bad = LinearFunctional(a_def, (F_ONE, F_ONE))
    with pytest.raises(NotPositiveFunctional):
        positive_lift_check(a_def, bad)
    # e . e = -lam: the constant lift of a classically positive state fails
    a_neg = _deformed_nilpotent_square(-1)
    om = LinearFunctional(a_neg, (F_ONE, F_ZERO))
    rep = positive_lift_check(a_neg, om)
    assert rep.status == "ConstantLiftFails"


def test_classical_limit_of_unit():
    x = twisted_compacts()
    kd = x.B
    k0 = deformation_container(kd)
    assert validate_algebra(k0).ok
    assert k0.unit is not None

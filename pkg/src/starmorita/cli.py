"""Command-line interface: document-driven commands with machine-checkable
certificates.

Exit codes: 0 = verified/constructed, 1 = a property failed (the report
carries a replayable certificate or witness), 2 = input error.  Reports are
deterministic for a fixed --seed: a JSON block on stdout followed by a short
human-readable summary."""

import argparse
import json
import sys

from . import documents
from .algebra import (
    builtin_algebra,
    deformation_container,
    functional_positivity,
    nilpotent_normal_scan,
    validate_algebra,
)
from .bimodule import (
    corner_bimodule,
    finite_rank_algebra,
    free_module_bimodule,
    left_action_isomorphism,
    validate_bimodule,
)
from .classical import cl_bimodule, cl_prehilbert, cl_representation, naturality_check
from .errors import (
    DenominatorVanishesAtZero,
    MalformedScalar,
    NotPositiveFunctional,
    PositivityViolated,
    StarMoritaError,
    UnknownCommand,
    UnresolvedReference,
)
from .linalg import Matrix, forced_zero_entries, hermitian_form, psd_decide, verify_psd_certificate
from .prehilbert import InnerProductModule, Representation, gns, intertwiners
from .rieffel import (
    center_isomorphism,
    gns_via_induction_compare,
    induce,
    morita_context_check,
    roundtrip_unitary,
)
from .rings import (
    DEFORMATION,
    RATIONAL,
    F_LAM,
    F_ONE,
    base_from_doc,
    base_to_doc,
    frac,
    scalar_from_doc,
)


def _psd_certificate_doc(matrix, cert):
    out = {"type": "psd",
           "matrix": documents.fraction_matrix_doc(matrix),
           "verdict": cert.verdict,
           "basis": documents.fraction_matrix_doc(cert.basis),
           "diagonal": [base_to_doc(p) for p in cert.diagonal]}
    if cert.witness is not None:
        out["witness"] = documents.fraction_vector_doc(cert.witness)
    return out


def _nilpotent_certificate_doc(a, cert):
    return {"type": "nilpotent",
            "algebra": documents.algebra_doc(a),
            "element": documents.fraction_vector_doc(cert.element),
            "exponent": cert.exponent}


def _frac_from_doc(doc, mode):
    from .rings import FracScalar
    if isinstance(doc, dict) and "num" in doc:
        return FracScalar(scalar_from_doc(doc["num"], mode), base_from_doc(doc["den"], mode))
    return documents._scalar(doc, mode)


def _matrix_from_fraction_doc(doc, mode):
    return Matrix([[_frac_from_doc(c, mode) for c in row] for row in doc])


def check_certificate(report):
    """Replay the certificate embedded in a report; True iff it verifies."""
    cert = report.get("certificate")
    if cert is None:
        return False
    mode = report.get("ring", RATIONAL)
    if cert["type"] == "psd":
        matrix = _matrix_from_fraction_doc(cert["matrix"], mode)
        from .linalg import PsdCertificate
        basis = _matrix_from_fraction_doc(cert["basis"], mode)
        diagonal = tuple(base_from_doc(p, mode) for p in cert["diagonal"])
        witness = None
        if "witness" in cert:
            witness = tuple(_frac_from_doc(c, mode) for c in cert["witness"])
        rebuilt = PsdCertificate(cert["verdict"], basis, diagonal, witness)
        return verify_psd_certificate(matrix, rebuilt)
    if cert["type"] == "nilpotent":
        a = documents.parse_algebra(cert["algebra"], mode)
        from .algebra import NilpotentCertificate
        element = tuple(_frac_from_doc(c, mode) for c in cert["element"])
        return NilpotentCertificate(element, cert["exponent"]).verify(a)
    return False


class Report:
    def __init__(self, command, mode=RATIONAL):
        self.body = {"command": command, "ring": mode, "ok": True,
                     "data": {}, "summary": []}

    def fail(self, line):
        self.body["ok"] = False
        self.body["summary"].append(line)

    def note(self, line):
        self.body["summary"].append(line)

    def put(self, key, value):
        self.body["data"][key] = value

    def certificate(self, cert):
        self.body["certificate"] = cert

    def emit(self, stream):
        json.dump(self.body, stream, indent=2, sort_keys=True)
        stream.write("\n---\n")
        for line in self.body["summary"]:
            stream.write(line + "\n")
        stream.write("result: %s\n" % ("ok" if self.body["ok"] else "FAILED"))

    @property
    def exit_code(self):
        return 0 if self.body["ok"] else 1


# -- commands -----------------------------------------------------------------

def cmd_validate(doc, args, report):
    counts = {k: len(getattr(doc, k)) for k in
              ("algebras", "functionals", "matrices", "modules",
               "representations", "bimodules")}
    report.put("objects", counts)
    for kind, name, lines in doc.validation_failures:
        report.fail("%s %r failed validation: %s" % (kind, name, "; ".join(lines)))
    if not doc.validation_failures:
        report.note("all declared objects pass their validators")


def cmd_psd(doc, args, report):
    m = doc.resolve("matrices", args.name)
    cert = psd_decide(m)
    report.put("verdict", cert.verdict)
    report.certificate(_psd_certificate_doc(m, cert))
    if cert.is_positive:
        report.note("matrix %r is positive semi-definite (certificate attached)" % args.name)
    else:
        value = hermitian_form(m, cert.witness, cert.witness)
        report.fail("matrix %r is not PSD; witness quadratic value %r" % (args.name, value))


def cmd_gns(doc, args, report):
    a = doc.resolve("algebras", args.algebra)
    om = doc.resolve("functionals", args.functional)
    fc = functional_positivity(a, om)
    if not fc.positive:
        report.certificate(_psd_certificate_doc(om.gram(), fc.psd) if fc.psd else None)
        report.fail("functional %r is not positive" % args.functional)
        return
    res = gns(a, om)
    report.put("gns_dimension", res.module.dim)
    report.put("ideal_dimension", len(res.ideal_basis))
    report.put("gram", documents.fraction_matrix_doc(res.gram))
    report.note("GNS space has dimension %d (null ideal dimension %d)"
                % (res.module.dim, len(res.ideal_basis)))


def cmd_induce(doc, args, report):
    x = doc.resolve("bimodules", args.bimodule)
    rep = doc.resolve("representations", args.representation)
    try:
        ind = induce(x, rep)
    except PositivityViolated as exc:
        report.certificate({"type": "psd", "note": "witness in pair coordinates",
                            "matrix": [], "verdict": "not_positive",
                            "basis": [], "diagonal": [],
                            "witness": documents.fraction_vector_doc(exc.witness)})
        report.fail("positivity gate fired: %s" % exc)
        return
    report.put("pair_dimension", ind.pair_dim)
    report.put("balanced_dimension", len(ind.ktilde_reps))
    report.put("induced_dimension", ind.module.dim)
    report.put("induced_ops", [documents.fraction_matrix_doc(m)
                               for m in ind.representation.ops])
    report.certificate(_psd_certificate_doc(ind.ktilde_gram, ind.certificate))
    report.note("induced representation on a %d-dimensional space "
                "(pair %d, balanced %d)" % (ind.module.dim, ind.pair_dim,
                                            len(ind.ktilde_reps)))


def cmd_verify_bimodule(doc, args, report):
    x = doc.resolve("bimodules", args.bimodule)
    res = validate_bimodule(x, level=args.level)
    report.put("level", args.level)
    report.put("checks", {k: c.status for k, c in res.checks.items()})
    report.put("x4_regime", res.x4_regime)
    if res.y4_regime is not None:
        report.put("y4_regime", res.y4_regime)
    for line in res.lines():
        report.note(line)
    if not res.ok:
        report.fail("bimodule %r fails %s-level validation" % (args.bimodule, args.level))


def cmd_roundtrip(doc, args, report):
    x = doc.resolve("bimodules", args.bimodule)
    rep = doc.resolve("representations", args.representation)
    rt = roundtrip_unitary(x, rep)
    report.put("unitary", documents.fraction_matrix_doc(rt.unitary.matrix))
    report.note("round-trip unitary certified (%dx%d)" %
                (rt.unitary.matrix.rows, rt.unitary.matrix.cols))


def cmd_context(doc, args, report):
    x = doc.resolve("bimodules", args.bimodule)
    res = morita_context_check(x)
    report.put("context_ok", res.ok)
    for line in res.lines():
        report.note(line)
    if not res.ok:
        report.fail("Morita context conditions failed")
        return
    iso = center_isomorphism(x)
    report.put("center_dimension", len(iso.center_a))
    report.put("center_map", documents.fraction_matrix_doc(iso.map_matrix))
    report.note("centers are *-isomorphic (dimension %d)" % len(iso.center_a))


def cmd_classical_limit(doc, args, report):
    kind, name = args.kind, args.name
    if kind == "algebra":
        a = doc.resolve("algebras", name)
        a0 = deformation_container(a)
        report.put("limit", documents.algebra_doc(a0))
        report.note("classical limit algebra of dimension %d" % a0.dim)
    elif kind == "matrix":
        from .algebra import classical_limit_matrix
        m = doc.resolve("matrices", name)
        report.put("limit", documents.matrix_doc(classical_limit_matrix(m)))
        report.note("matrix evaluated at lam = 0")
    elif kind == "module":
        h = doc.resolve("modules", name)
        h0, lm = cl_prehilbert(h)
        report.put("limit", {"gram": documents.matrix_doc(h0.gram)})
        report.put("limit_map", documents.fraction_matrix_doc(lm.projection))
        report.note("classical module of dimension %d (from %d)" % (h0.dim, h.dim))
    elif kind == "representation":
        rep = doc.resolve("representations", name)
        rep0, lm = cl_representation(rep)
        report.put("limit", {"ops": [documents.matrix_doc(m) for m in rep0.ops]})
        report.put("limit_map", documents.fraction_matrix_doc(lm.projection))
        report.note("classical representation of dimension %d" % rep0.dim)
    elif kind == "bimodule":
        x = doc.resolve("bimodules", name)
        clb = cl_bimodule(x)
        report.put("limit", documents.bimodule_doc(clb.bimodule))
        report.put("limit_map", documents.fraction_matrix_doc(clb.limit_map.projection))
        report.note("classical bimodule of dimension %d (from %d)"
                    % (clb.bimodule.dim, x.dim))
    else:
        raise UnknownCommand("unknown classical-limit kind %r" % kind)


def cmd_naturality(doc, args, report):
    x = doc.resolve("bimodules", args.bimodule)
    rep = doc.resolve("representations", args.representation)
    res = naturality_check(x, rep)
    report.put("unitary", documents.fraction_matrix_doc(res.unitary.matrix))
    report.put("classical_induced_dimension", res.classical_induction.module.dim)
    report.note("classical limit commutes with induction up to the certified unitary")


# -- demos ----------------------------------------------------------------------

def demo_cn_mn(args, report):
    n = args.n or 3
    x = free_module_bimodule(builtin_algebra("scalars"), n)
    res = validate_bimodule(x, level="equivalence")
    for line in res.lines():
        report.note(line)
    fr, hom = left_action_isomorphism(x)
    report.put("compacts_dimension", fr.algebra.dim)
    report.note("finite-rank algebra has dimension %d = %d^2" % (fr.algebra.dim, n))
    report.note("left action is a certified *-isomorphism: %s" % hom.is_isomorphism())
    if not (res.ok and hom.is_isomorphism()):
        report.fail("free-module equivalence failed")


def demo_a_mna(args, report):
    n = args.n or 2
    x = free_module_bimodule(builtin_algebra("matrix", 2), n)
    res = validate_bimodule(x, level="equivalence")
    for line in res.lines():
        report.note(line)
    if not res.ok:
        report.fail("matrix-coefficient free-module equivalence failed")


def demo_grassmann_refusal(args, report):
    n = args.n or 2
    g = builtin_algebra("grassmann", n)
    cert = nilpotent_normal_scan(g)
    if cert is None:
        report.fail("expected a nilpotent certificate and found none")
        return
    report.certificate(_nilpotent_certificate_doc(g, cert))
    report.put("exponent", cert.exponent)
    report.note("found a Hermitian nilpotent generator with exponent %d" % cert.exponent)
    report.note("the algebra cannot have sufficiently many positive functionals,")
    report.note("so no equivalence bimodule with the scalars can validate")
    report.fail("refusal demonstrated (exit 1 by design)")


def demo_corner(args, report):
    c = builtin_algebra("scalars")
    res = corner_bimodule(c, 3, Matrix.diag([1, 1, 0]))
    v = validate_bimodule(res.bimodule, level="equivalence")
    report.put("corner_dimension", res.corner.dim)
    report.put("fullness_rank", res.fullness_rank)
    for line in v.lines():
        report.note(line)
    if not v.ok:
        report.fail("corner equivalence failed")


def demo_gns_matrix(args, report):
    n = args.n or 2
    from .algebra import density_functional
    a = builtin_algebra("matrix", n)
    dims = {}
    for k in range(1, n + 1):
        rho = Matrix.diag([1] * k + [0] * (n - k))
        res = gns(a, density_functional(a, rho))
        dims["rank %d" % k] = res.module.dim
    report.put("gns_dimensions", dims)
    report.note("GNS dimension law: dim = n * rank for every rank")


def demo_gns_induction(args, report):
    from .algebra import density_functional
    a = builtin_algebra("matrix", 2)
    om = density_functional(a, Matrix.diag([1, 0]))
    cmp = gns_via_induction_compare(a, om)
    report.put("kernels_agree", cmp.kernels_agree)
    report.put("unitary", documents.fraction_matrix_doc(cmp.unitary.matrix))
    report.note("GNS construction realized as Rieffel induction, unitary certified")


def demo_roundtrip(args, report):
    n = args.n or 2
    c = builtin_algebra("scalars")
    x = free_module_bimodule(c, n)
    rep = Representation(c, InnerProductModule(Matrix.identity(1)), [Matrix.identity(1)])
    rt = roundtrip_unitary(x, rep)
    report.put("unitary", documents.fraction_matrix_doc(rt.unitary.matrix))
    report.note("double induction returns to the original representation")


def demo_classical_limit(args, report):
    from .bimodule import prehilbert_bimodule
    d = Matrix([[F_ONE + F_LAM * F_LAM, F_LAM], [F_LAM, F_ONE]])
    x = prehilbert_bimodule(InnerProductModule(d))
    clb = cl_bimodule(x)
    v = validate_bimodule(clb.bimodule, level="equivalence")
    report.put("deformed_dimension", x.dim)
    report.put("classical_dimension", clb.bimodule.dim)
    for line in v.lines():
        report.note(line)
    if not v.ok:
        report.fail("classical limit of the twisted bimodule failed validation")


def demo_naturality(args, report):
    c = builtin_algebra("scalars")
    x = free_module_bimodule(c, 2)
    rep = Representation(c, InnerProductModule(Matrix.diag([1, F_ONE + F_LAM])),
                         [Matrix.identity(2)])
    res = naturality_check(x, rep)
    report.put("unitary", documents.fraction_matrix_doc(res.unitary.matrix))
    report.note("induce-then-contract agrees with contract-then-induce")


def demo_homomorphism_self(args, report):
    from .algebra import identity_homomorphism
    from .bimodule import homomorphism_bimodule
    a = builtin_algebra("matrix", 2)
    x = homomorphism_bimodule(identity_homomorphism(a))
    v = validate_bimodule(x, level="equivalence")
    for line in v.lines():
        report.note(line)
    if not v.ok:
        report.fail("self-equivalence through the identity failed")


DEMOS = {
    "cn-mn": demo_cn_mn,
    "a-mna": demo_a_mna,
    "grassmann-refusal": demo_grassmann_refusal,
    "corner": demo_corner,
    "gns-matrix": demo_gns_matrix,
    "gns-induction": demo_gns_induction,
    "roundtrip": demo_roundtrip,
    "classical-limit": demo_classical_limit,
    "naturality": demo_naturality,
    "homomorphism-self": demo_homomorphism_self,
}


def build_parser():
    p = argparse.ArgumentParser(prog="starmorita",
                                description="exact *-algebra positivity, GNS, Rieffel "
                                            "induction and Morita equivalence checks")
    p.add_argument("--doc", help="path to a document file (JSON)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized witness sampling (default 0)")
    sub = p.add_subparsers(dest="command")
    sub.add_parser("validate")
    s = sub.add_parser("psd")
    s.add_argument("name")
    s = sub.add_parser("gns")
    s.add_argument("algebra")
    s.add_argument("functional")
    s = sub.add_parser("induce")
    s.add_argument("bimodule")
    s.add_argument("representation")
    s = sub.add_parser("verify-bimodule")
    s.add_argument("bimodule")
    s.add_argument("--level", choices=["rigged", "equivalence"], default="rigged")
    s = sub.add_parser("roundtrip")
    s.add_argument("bimodule")
    s.add_argument("representation")
    s = sub.add_parser("context")
    s.add_argument("bimodule")
    s = sub.add_parser("classical-limit")
    s.add_argument("kind", choices=["algebra", "matrix", "module",
                                    "representation", "bimodule"])
    s.add_argument("name")
    s = sub.add_parser("naturality")
    s.add_argument("bimodule")
    s.add_argument("representation")
    s = sub.add_parser("demo")
    s.add_argument("name", choices=sorted(DEMOS))
    s.add_argument("--n", type=int)
    s = sub.add_parser("check-certificate")
    s.add_argument("--report", help="path to a report emitted by a previous run "
                                    "(default: stdin)")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "psd": cmd_psd,
    "gns": cmd_gns,
    "induce": cmd_induce,
    "verify-bimodule": cmd_verify_bimodule,
    "roundtrip": cmd_roundtrip,
    "context": cmd_context,
    "classical-limit": cmd_classical_limit,
    "naturality": cmd_naturality,
}


def run(argv, stream):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(stream)
        return 2
    if args.command == "demo":
        report = Report("demo %s" % args.name)
        try:
            DEMOS[args.name](args, report)
        except StarMoritaError as exc:
            report.fail("error: %s" % exc)
        report.emit(stream)
        return report.exit_code
    if args.command == "check-certificate":
        report = Report("check-certificate")
        try:
            if args.report:
                with open(args.report) as fh:
                    text = fh.read()
            else:
                text = sys.stdin.read()
            payload = json.loads(text.split("\n---\n")[0])
            ok = check_certificate(payload)
        except (OSError, ValueError, MalformedScalar) as exc:
            report.fail("cannot read report: %s" % exc)
            report.emit(stream)
            return 2
        report.put("verified", ok)
        if ok:
            report.note("certificate replayed exactly")
        else:
            report.fail("certificate does not replay")
        report.emit(stream)
        return report.exit_code
    # document-based commands
    if not args.doc:
        print("error: --doc is required for %r" % args.command, file=stream)
        return 2
    try:
        with open(args.doc) as fh:
            doc = documents.parse_document(fh.read())
    except (OSError, MalformedScalar, UnresolvedReference, KeyError) as exc:
        print("input error: %s" % exc, file=stream)
        return 2
    report = Report(args.command, doc.mode)
    try:
        COMMANDS[args.command](doc, args, report)
    except (UnresolvedReference, MalformedScalar) as exc:
        print("input error: %s" % exc, file=stream)
        return 2
    except (NotPositiveFunctional, PositivityViolated,
            DenominatorVanishesAtZero) as exc:
        report.fail("%s: %s" % (type(exc).__name__, exc))
    except StarMoritaError as exc:
        print("input error: %s: %s" % (type(exc).__name__, exc), file=stream)
        return 2
    report.emit(stream)
    return report.exit_code


def main():
    raise SystemExit(run(sys.argv[1:], sys.stdout))


if __name__ == "__main__":
    main()

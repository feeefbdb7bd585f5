"""Document format: JSON-compatible descriptions of algebras, functionals,
modules, representations, matrices, and bimodules, with exact string-encoded
scalars.

Scalars: "p/q" strings (plain rationals), arrays of such strings indexed by
lam-degree (polynomials), {"re": ..., "im": ...} records (complex).  Matrices
are row-major nested arrays of scalar records.  Every named cross-reference
must resolve and every object passes its validator at load time.
"""

import json
from dataclasses import dataclass, field

from .algebra import (
    LinearFunctional,
    StarAlgebra,
    builtin_algebra,
    validate_algebra,
)
from .bimodule import (
    Bimodule,
    CyclicLevel,
    CyclicStructure,
    CyclicSubmodule,
)
from .errors import MalformedScalar, UnresolvedReference
from .linalg import Matrix, vec
from .prehilbert import InnerProductModule, Representation, validate_representation
from .rings import (
    DEFORMATION,
    RATIONAL,
    base_to_doc,
    frac,
    frac_from_doc,
    scalar_to_doc,
)


@dataclass
class Document:
    mode: str
    algebras: dict = field(default_factory=dict)
    functionals: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    representations: dict = field(default_factory=dict)
    bimodules: dict = field(default_factory=dict)
    validation_failures: list = field(default_factory=list)

    def resolve(self, kind, name):
        table = getattr(self, kind)
        if name not in table:
            raise UnresolvedReference("no %s named %r" % (kind[:-1], name))
        return table[name]


def _scalar(doc, mode):
    return frac_from_doc(doc, mode)


def _vector(doc, mode, length=None):
    if not isinstance(doc, list):
        raise MalformedScalar("expected a scalar array, got %r" % (doc,))
    v = tuple(_scalar(c, mode) for c in doc)
    if length is not None and len(v) != length:
        raise MalformedScalar("expected %d entries, got %d" % (length, len(v)))
    return v


def _matrix(doc, mode):
    if not isinstance(doc, list) or not all(isinstance(r, list) for r in doc):
        raise MalformedScalar("expected a nested array matrix, got %r" % (doc,))
    return Matrix([[_scalar(c, mode) for c in row] for row in doc])


def parse_algebra(doc, mode):
    if "kind" in doc and "mul" not in doc:
        kind = doc["kind"]
        if kind == "scalars":
            return builtin_algebra("scalars")
        return builtin_algebra(kind, n=doc.get("n"))
    dim = doc["dim"]
    mul = [[_vector(doc["mul"][i][j], mode, dim) for j in range(dim)] for i in range(dim)]
    star = [_vector(doc["star"][i], mode, dim) for i in range(dim)]
    out = StarAlgebra(dim, mul, star, labels=doc.get("labels"),
                      kind=doc.get("kind", "generic"))
    return _upgrade_builtin(out)


def _upgrade_builtin(a):
    """Recognize the matrix-unit structure so parsed algebras regain the
    exact positivity decision procedure."""
    from math import isqrt

    from .algebra import matrix_algebra
    n = isqrt(a.dim)
    if n * n == a.dim:
        builtin = matrix_algebra(n)
        if a.mul == builtin.mul and a.star == builtin.star:
            builtin.labels = a.labels
            return builtin
    return a


def parse_cyclic(doc, mode, dim):
    subs = []
    for s in doc["submodules"]:
        span = [_vector(v, mode, dim) for v in s["span"]]
        levels = [CyclicLevel([_vector(v, mode, dim) for v in l["span"]],
                              _vector(l["omega"], mode, dim))
                  for l in s["levels"]]
        subs.append(CyclicSubmodule(span, levels))
    return CyclicStructure(subs)


def parse_document(text):
    """Parse and fully resolve a document; all declared objects are run
    through their validators, with failures collected on the document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedScalar("document is not valid JSON: %s" % exc) from exc
    mode = RATIONAL
    if isinstance(raw.get("ring"), dict):
        base = raw["ring"].get("base", "rational")
        if base not in (RATIONAL, DEFORMATION):
            raise MalformedScalar("unknown ring base %r" % (base,))
        mode = base
    doc = Document(mode)
    for name, adoc in raw.get("algebras", {}).items():
        a = parse_algebra(adoc, mode)
        report = validate_algebra(a)
        if not report.ok:
            doc.validation_failures.append(("algebra", name, report.lines()))
        doc.algebras[name] = a
    for name, mdoc in raw.get("matrices", {}).items():
        doc.matrices[name] = _matrix(mdoc, mode)
    for name, fdoc in raw.get("functionals", {}).items():
        a = doc.resolve("algebras", fdoc["algebra"])
        doc.functionals[name] = LinearFunctional(a, _vector(fdoc["values"], mode, a.dim))
    for name, mdoc in raw.get("modules", {}).items():
        doc.modules[name] = InnerProductModule(_matrix(mdoc["gram"], mode))
    for name, rdoc in raw.get("representations", {}).items():
        a = doc.resolve("algebras", rdoc["algebra"])
        module = doc.resolve("modules", rdoc["module"])
        ops = [_matrix(m, mode) for m in rdoc["ops"]]
        rep = Representation(a, module, ops)
        report = validate_representation(rep)
        if not report.ok:
            doc.validation_failures.append(("representation", name, report.lines()))
        doc.representations[name] = rep
    for name, bdoc in raw.get("bimodules", {}).items():
        b = doc.resolve("algebras", bdoc["left_algebra"])
        a = doc.resolve("algebras", bdoc["right_algebra"])
        dim = bdoc["dim"]
        left = [_matrix(m, mode) for m in bdoc["left"]]
        right = [_matrix(m, mode) for m in bdoc["right"]]
        inner_right = [[_vector(bdoc["inner_right"][p][q], mode, a.dim)
                        for q in range(dim)] for p in range(dim)]
        inner_left = None
        if "inner_left" in bdoc:
            inner_left = [[_vector(bdoc["inner_left"][p][q], mode, b.dim)
                           for q in range(dim)] for p in range(dim)]
        cyc_r = parse_cyclic(bdoc["cyclic_right"], mode, dim) if "cyclic_right" in bdoc else None
        cyc_l = parse_cyclic(bdoc["cyclic_left"], mode, dim) if "cyclic_left" in bdoc else None
        doc.bimodules[name] = Bimodule(b, a, dim, left, right, inner_right, inner_left,
                                       cyclic_right=cyc_r, cyclic_left=cyc_l)
    return doc


# -- serialization ------------------------------------------------------------

def scalar_doc(x):
    return scalar_to_doc(frac(x).try_demote())


def vector_doc(v):
    return [scalar_doc(c) for c in v]


def matrix_doc(m):
    return [[scalar_doc(c) for c in row] for row in m.entries]


def fraction_scalar_doc(x):
    """Lossless record for possibly non-ring values (certificate payloads)."""
    x = frac(x)
    return {"num": scalar_to_doc(x.num), "den": base_to_doc(x.den)}


def fraction_vector_doc(v):
    return [fraction_scalar_doc(c) for c in v]


def fraction_matrix_doc(m):
    return [fraction_vector_doc(row) for row in m.entries]


def algebra_doc(a):
    if a.kind == "matrix" and a.matrix_size:
        from .algebra import matrix_algebra
        if a == matrix_algebra(a.matrix_size):
            return {"kind": "matrix", "n": a.matrix_size}
    out = {"dim": a.dim,
           "mul": [[vector_doc(a.mul[i][j]) for j in range(a.dim)] for i in range(a.dim)],
           "star": [vector_doc(a.star[i]) for i in range(a.dim)],
           "labels": list(a.labels),
           "kind": a.kind}
    return out


def bimodule_doc(x):
    out = {"left_algebra_dim": x.B.dim, "right_algebra_dim": x.A.dim, "dim": x.dim,
           "left": [matrix_doc(m) for m in x.left],
           "right": [matrix_doc(m) for m in x.right],
           "inner_right": [[vector_doc(h) for h in row] for row in x.inner_right]}
    if x.inner_left is not None:
        out["inner_left"] = [[vector_doc(h) for h in row] for row in x.inner_left]
    return out


def document_doc(doc):
    """Re-serialize a parsed document; parse(serialize(d)) == d."""
    out = {"ring": {"base": doc.mode}}
    if doc.algebras:
        out["algebras"] = {k: algebra_doc(a) for k, a in doc.algebras.items()}
    if doc.matrices:
        out["matrices"] = {k: matrix_doc(m) for k, m in doc.matrices.items()}
    if doc.functionals:
        out["functionals"] = {}
        for k, f in doc.functionals.items():
            aname = next(n for n, a in doc.algebras.items() if a is f.algebra or a == f.algebra)
            out["functionals"][k] = {"algebra": aname, "values": vector_doc(f.values)}
    if doc.modules:
        out["modules"] = {k: {"gram": matrix_doc(m.gram)} for k, m in doc.modules.items()}
    if doc.representations:
        out["representations"] = {}
        for k, r in doc.representations.items():
            aname = next(n for n, a in doc.algebras.items() if a == r.algebra)
            mname = next(n for n, m in doc.modules.items() if m is r.module)
            out["representations"][k] = {"algebra": aname, "module": mname,
                                         "ops": [matrix_doc(m) for m in r.ops]}
    if doc.bimodules:
        out["bimodules"] = {}
        for k, x in doc.bimodules.items():
            bname = next(n for n, a in doc.algebras.items() if a == x.B)
            aname = next(n for n, a in doc.algebras.items() if a == x.A)
            d = bimodule_doc(x)
            d.pop("left_algebra_dim")
            d.pop("right_algebra_dim")
            d["left_algebra"] = bname
            d["right_algebra"] = aname
            out["bimodules"][k] = d
    return out

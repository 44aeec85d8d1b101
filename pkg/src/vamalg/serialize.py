"""JSON documents for groups, amalgams, graphs and certificates.

Every document is ``{"schema_version": "1", "kind": ..., "label": ...,
"payload": {...}}``.  Integers are written as decimal strings; both strings
and JSON numbers are accepted on input.  Permutations are 0-based image
arrays; words are arrays of signed 1-based generator indices.
"""

import json
import sys

from .errors import ParseError, SchemaError
from .fiber import FiberAmalgam, FreeByCyclic, UndirectedMultigraph
from .intlin import IntMatrix
from .perm import FiniteGroupTable, Permutation
from .pipeline import AmalgamSpec, EmbeddingCertificate
from .vagroup import CocycleExtension, EdgeDatum, ExtElement
from .wreath import MonomialElement, WreathHom

SCHEMA_VERSION = "1"
KINDS = ("extension", "free_by_cyclic", "amalgam_embed", "fiber_amalgam", "fbc_amalgam", "tubular_graph",
         "certificate")


# primitives


def _int(x, field):
    if isinstance(x, bool):
        raise SchemaError(field, f"field {field!r}: expected an integer, got a boolean")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            pass
    raise SchemaError(field, f"field {field!r}: expected an integer, got {x!r}")


def _list(x, field):
    if not isinstance(x, list):
        raise SchemaError(field, f"field {field!r}: expected an array")
    return x


def _get(d, key, field=None):
    if not isinstance(d, dict):
        raise SchemaError(field or key, f"expected an object holding {key!r}")
    if key not in d:
        raise SchemaError(key)
    return d[key]


def _ints(xs, field):
    return tuple(_int(x, field) for x in _list(xs, field))


def _s(n):
    return str(int(n))


def _ss(xs):
    return [_s(x) for x in xs]


# extensions


def extension_to_json(g):
    out = {
        "rank": _s(g.rank),
        "group": {
            "order": _s(g.group.order),
            "table": [_ss(row) for row in g.group.table],
            "identity": _s(g.group.identity),
            "generators": _ss(g.group.generators),
        },
        "action": [[_ss(m.row(i)) for i in range(m.rows)] for m in g.action],
        "cocycle": [[_ss(v) for v in row] for row in g.cocycle],
    }
    if g.name:
        out["name"] = g.name
    return out


def extension_from_json(d, field="extension"):
    rank = _int(_get(d, "rank", field), "rank")
    grp = _get(d, "group", field)
    order = _int(_get(grp, "order"), "order")
    table = [_ints(row, "table") for row in _list(_get(grp, "table"), "table")]
    if len(table) != order or any(len(r) != order for r in table):
        raise SchemaError("table", "group table must be order x order")
    identity = _int(_get(grp, "identity"), "identity")
    gens = _ints(grp.get("generators", list(range(order))), "generators")
    Q = FiniteGroupTable.from_table(table, identity=identity, generators=gens)
    action_raw = _list(_get(d, "action", field), "action")
    if len(action_raw) != order:
        raise SchemaError("action", "one action matrix per group element is required")
    action = []
    for m in action_raw:
        rows = [_ints(r, "action") for r in _list(m, "action")]
        if len(rows) != rank or any(len(r) != rank for r in rows):
            raise SchemaError("action", f"action matrices must be {rank}x{rank}")
        action.append(IntMatrix.from_rows(rows, rank))
    if "cocycle" in d:
        raw = _list(d["cocycle"], "cocycle")
        if len(raw) != order or any(len(_list(r, "cocycle")) != order for r in raw):
            raise SchemaError("cocycle", "cocycle must be an order x order array of vectors")
        cocycle = [[_ints(v, "cocycle") for v in row] for row in raw]
        if any(len(v) != rank for row in cocycle for v in row):
            raise SchemaError("cocycle", f"cocycle values must have length {rank}")
    elif order == 1:
        cocycle = [[(0,) * rank]]
    else:
        raise SchemaError("cocycle")
    return CocycleExtension(rank, Q, action, cocycle, name=str(d.get("name", "")))


def element_to_json(a):
    return {"v": _ss(a.v), "q": _s(a.q)}


def element_from_json(d, field="element"):
    return ExtElement(_ints(_get(d, "v", field), "v"), _int(_get(d, "q", field), "q"))


# free-by-cyclic


def word_to_json(w):
    return _ss(w)


def word_from_json(w, field="word"):
    word = _ints(w, field)
    if any(x == 0 for x in word):
        raise SchemaError(field, f"field {field!r}: generator index 0 is not allowed")
    return word


def fbc_to_json(g):
    return {"rank": _s(g.rank), "phi": [word_to_json(w) for w in g.phi],
            "phi_inv": [word_to_json(w) for w in g.phi_inv]}


def fbc_from_json(d, field="free_by_cyclic"):
    rank = _int(_get(d, "rank", field), "rank")
    phi = [word_from_json(w, "phi") for w in _list(_get(d, "phi", field), "phi")]
    phi_inv = [word_from_json(w, "phi_inv") for w in _list(_get(d, "phi_inv", field), "phi_inv")]
    if len(phi) != rank or len(phi_inv) != rank:
        raise SchemaError("phi", "phi and phi_inv need one word per generator")
    for w in phi + phi_inv:
        if any(abs(x) > rank for x in w):
            raise SchemaError("phi", "letter out of range")
    return FreeByCyclic(rank, tuple(phi), tuple(phi_inv))


# amalgams


def amalgam_to_json(spec):
    return {
        "factor1": extension_to_json(spec.g1),
        "factor2": extension_to_json(spec.g2),
        "edge": {
            "c1": element_to_json(spec.edge1.c),
            "c2": element_to_json(spec.edge2.c),
            "m1": [element_to_json(m) for m in spec.edge1.m_elements],
            "m2": [element_to_json(m) for m in spec.edge2.m_elements],
            "pairing": [_ss(p) for p in spec.m_pairing],
        },
    }


def amalgam_from_json(d):
    g1 = extension_from_json(_get(d, "factor1"), "factor1")
    g2 = extension_from_json(_get(d, "factor2"), "factor2")
    e = _get(d, "edge")
    c1 = element_from_json(_get(e, "c1"), "c1")
    c2 = element_from_json(_get(e, "c2"), "c2")
    m1 = [element_from_json(x, "m1") for x in _list(e.get("m1", [element_to_json(g1.identity())]), "m1")]
    m2 = [element_from_json(x, "m2") for x in _list(e.get("m2", [element_to_json(g2.identity())]), "m2")]
    pairing = e.get("pairing", [[i, i] for i in range(len(m1))])
    pairs = []
    for p in _list(pairing, "pairing"):
        p = _ints(p, "pairing")
        if len(p) != 2:
            raise SchemaError("pairing", "pairs must have two entries")
        pairs.append(p)
    return AmalgamSpec(g1, g2, EdgeDatum(g1, m1, c1), EdgeDatum(g2, m2, c2), tuple(pairs))


def _factor_to_json(f):
    if isinstance(f, FreeByCyclic):
        return {"kind": "free_by_cyclic", "data": fbc_to_json(f)}
    return {"kind": "extension", "data": extension_to_json(f)}


def _factor_from_json(d, field):
    kind = _get(d, "kind", field)
    data = _get(d, "data", field)
    if kind == "free_by_cyclic":
        return fbc_from_json(data, field)
    if kind == "extension":
        return extension_from_json(data, field)
    raise SchemaError("kind", f"unknown factor kind {kind!r}")


def _edge_to_json(f, e):
    return word_to_json(e) if isinstance(f, FreeByCyclic) else element_to_json(e)


def _edge_from_json(f, d, field):
    return word_from_json(d, field) if isinstance(f, FreeByCyclic) else element_from_json(d, field)


def fiber_amalgam_to_json(am):
    return {"factor1": _factor_to_json(am.factor1), "factor2": _factor_to_json(am.factor2),
            "edge1": _edge_to_json(am.factor1, am.edge1), "edge2": _edge_to_json(am.factor2, am.edge2)}


def fiber_amalgam_from_json(d):
    f1 = _factor_from_json(_get(d, "factor1"), "factor1")
    f2 = _factor_from_json(_get(d, "factor2"), "factor2")
    return FiberAmalgam(f1, f2, _edge_from_json(f1, _get(d, "edge1"), "edge1"),
                        _edge_from_json(f2, _get(d, "edge2"), "edge2"))


def fbc_amalgam_to_json(f1, f2, w1, w2):
    return {"factor1": fbc_to_json(f1), "factor2": fbc_to_json(f2), "w1": word_to_json(w1), "w2": word_to_json(w2)}


def fbc_amalgam_from_json(d):
    return (fbc_from_json(_get(d, "factor1"), "factor1"), fbc_from_json(_get(d, "factor2"), "factor2"),
            word_from_json(_get(d, "w1"), "w1"), word_from_json(_get(d, "w2"), "w2"))


def graph_to_json(g, balanced=None):
    out = {"vertices": _s(g.vertex_count), "edges": [_ss(e) for e in g.edges]}
    if balanced is not None:
        out["balanced"] = bool(balanced)
    return out


def graph_from_json(d):
    n = _int(_get(d, "vertices"), "vertices")
    edges = []
    for e in _list(_get(d, "edges"), "edges"):
        e = _ints(e, "edges")
        if len(e) != 2:
            raise SchemaError("edges", "edges must have two endpoints")
        edges.append(e)
    try:
        return UndirectedMultigraph(n, tuple(edges))
    except ValueError as exc:
        raise SchemaError("edges", str(exc)) from None


# certificates


def monomial_to_json(x):
    return x.to_json()


def monomial_from_json(d, field="monomial"):
    base = _ints(_get(d, "base", field), "base")
    top = _ints(_get(d, "top", field), "top")
    try:
        return MonomialElement(base, Permutation(top))
    except ValueError as exc:
        raise SchemaError("top", str(exc)) from None


def _jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return obj.to_json()


def certificate_to_json(cert):
    return {
        "degree": _s(cert.degree),
        "images_g1": {"basis": [monomial_to_json(x) for x in cert.images_g1.basis_images],
                      "q_images": [monomial_to_json(x) for x in cert.images_g1.q_images]},
        "images_g2": {"basis": [monomial_to_json(x) for x in cert.images_g2.basis_images],
                      "q_images": [monomial_to_json(x) for x in cert.images_g2.q_images]},
        "provenance": _jsonable(cert.provenance),
        "verification": cert.verification.to_json() if cert.verification is not None else None,
    }


def _prov_from_json(d):
    if isinstance(d, list):
        return [_prov_from_json(x) for x in d]
    if isinstance(d, dict):
        return {k: _prov_from_json(v) for k, v in d.items()}
    if isinstance(d, str):
        try:
            return int(d)
        except ValueError:
            return d
    return d


def certificate_from_json(d, spec):
    """Rebuild a certificate; ``spec`` supplies the source extensions."""
    degree = _int(_get(d, "degree"), "degree")
    homs = []
    for key, g in (("images_g1", spec.g1), ("images_g2", spec.g2)):
        imgs = _get(d, key)
        basis = [monomial_from_json(x, "basis") for x in _list(_get(imgs, "basis"), "basis")]
        qimgs = [monomial_from_json(x, "q_images") for x in _list(_get(imgs, "q_images"), "q_images")]
        homs.append(WreathHom(g, degree, tuple(basis), tuple(qimgs)))
    prov = _prov_from_json(d.get("provenance", {}))
    return EmbeddingCertificate(degree, homs[0], homs[1], prov)


# documents


def make_document(kind, payload, label=None):
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    if label is not None:
        doc["label"] = label
    doc["payload"] = payload
    return doc


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def loads(text, source="<input>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("schema_version", "top level must be an object")
    version = doc.get("schema_version")
    if version is None:
        raise SchemaError("schema_version")
    if str(version) != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"unsupported schema_version {version!r}")
    kind = _get(doc, "kind")
    if kind not in KINDS:
        raise SchemaError("kind", f"unknown kind {kind!r}")
    _get(doc, "payload")
    return doc


def parse_job(path):
    """Read and schema-check a job document from ``path`` (``-`` for stdin)."""
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror}") from None
        except UnicodeDecodeError as exc:
            raise ParseError(f"{path}: not UTF-8 ({exc.reason} at byte {exc.start})") from None
    doc = loads(text, path)
    decode_payload(doc)  # schema check before any computation
    return doc


def decode_payload(doc):
    kind, p = doc["kind"], doc["payload"]
    if kind == "extension":
        return extension_from_json(p)
    if kind == "free_by_cyclic":
        return fbc_from_json(p)
    if kind == "amalgam_embed":
        return amalgam_from_json(p)
    if kind == "fiber_amalgam":
        return fiber_amalgam_from_json(p)
    if kind == "fbc_amalgam":
        return fbc_amalgam_from_json(p)
    if kind == "tubular_graph":
        return graph_from_json(p)
    if kind == "certificate":
        return p
    raise SchemaError("kind")

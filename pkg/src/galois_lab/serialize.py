"""Line-oriented JSON records for machine output.

Every record is a flat JSON object with a ``type`` key. `decode` turns a
record into library objects and `encode` turns them back; for every record
the CLI prints, ``encode(decode(r)) == r``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from galois_lab.errors import ParseError
from galois_lab.exact.poly import QPoly, format_rational, parse_rational
from galois_lab.fields import FieldPoly, NumberField
from galois_lab.haar import clopen_from_dict
from galois_lab.profinite import Embedding
from galois_lab.qbar import AlgebraicNumber
from galois_lab.towers import TowerDescriptor


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def loads(line: str) -> dict:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a JSON record: {line[:60]!r}") from exc
    if not isinstance(rec, dict) or "type" not in rec:
        raise ParseError("record without a type")
    return rec


def rationals_out(values) -> list:
    return [format_rational(Fraction(v)) for v in values]


def rationals_in(values) -> list:
    return [parse_rational(str(v)) for v in values]


def _alg(d):
    return AlgebraicNumber.from_dict(d)


def _emb(d):
    return Embedding(NumberField.from_dict(d["field"]), _alg(d["image"]))


def _emb_out(e: Embedding):
    return {"field": e.source.to_dict(), "image": e.image.to_dict()}


def encode(kind: str, **obj) -> dict:
    """Record for library objects; the inverse of `decode`."""
    r = {"type": kind}
    if kind == "algebraic":
        r.update(obj["value"].to_dict())
    elif kind == "factor":
        p, mult = obj["poly"], obj["multiplicity"]
        r["multiplicity"] = mult
        if isinstance(p, QPoly):
            r["poly"] = p.to_text()
        else:
            r["field"] = p.field.to_dict()
            r["poly"] = [rationals_out(c) for c in p.to_list()]
    elif kind == "field":
        K = obj["field"]
        r.update(K.to_dict())
        r["degree"] = K.degree
    elif kind == "membership":
        K, x, h = obj["field"], obj["element"], obj["coordinates"]
        r["field"] = K.to_dict()
        r["element"] = x.to_dict()
        r["coordinates"] = None if h is None else rationals_out(h)
    elif kind == "group":
        G = obj["group"]
        r["field"] = G.field.to_dict()
        r["images"] = [e.image.to_dict() for e in G.elements]
        r["table"] = G.table
    elif kind == "node":
        r.update({"level": obj["level"], "index": obj["index"], "parent": obj["parent"]})
        r.update(_emb_out(obj["embedding"]))
    elif kind == "tuple":
        r["elements"] = [a.to_dict() for a in obj["elements"]]
    elif kind in ("pair", "row"):
        r["indices"] = list(obj["indices"])
    elif kind == "measure":
        r["value"] = format_rational(obj["value"])
        if "stage" in obj:
            r["stage"] = obj["stage"]
        if "set" in obj:
            r["set"] = obj["set"].to_dict()
    elif kind == "mu-test":
        r.update({"index": obj["index"], "depth": obj["depth"], "valid": obj["valid"]})
        r["measure"] = format_rational(obj["measure"])
        r["bound"] = format_rational(obj["bound"])
    elif kind == "witness":
        p = obj["prefix"]
        if p is None:
            r["path"] = None
        else:
            r["path"] = [_emb_out(e) for e in p.nodes]
            r["moved"] = p.moved[0].to_dict()
            r["image"] = p.moved[1].to_dict()
    elif kind == "non-randomness":
        w = obj["witness"]
        if w is None:
            r["catalog_index"] = None
        else:
            r["catalog_index"] = w.catalog_index
            r["tower"] = w.entry.to_dict()
            r["depth"] = w.depth
            r["containments"] = [[g.to_dict(), j] for g, j in w.containments]
    elif kind == "stage":
        r.update(obj["record"].to_dict())
    elif kind == "automorphism":
        r.update(_emb_out(obj["embedding"]))
    elif kind == "tower":
        r.update(obj["tower"].to_dict())
    else:
        raise ParseError(f"unknown record type {kind!r}")
    return r


def decode(r: dict) -> dict:
    """Library objects for a record, keyed as `encode` expects."""
    kind = r.get("type")
    try:
        if kind == "algebraic":
            return {"value": _alg(r)}
        if kind == "factor":
            if "field" in r:
                K = NumberField.from_dict(r["field"])
                p = FieldPoly(K, [K.element(rationals_in(c)) for c in r["poly"]])
            else:
                p = QPoly.from_text(r["poly"])
            return {"poly": p, "multiplicity": r["multiplicity"]}
        if kind == "field":
            return {"field": NumberField.from_dict(r)}
        if kind == "membership":
            c = r["coordinates"]
            return {
                "field": NumberField.from_dict(r["field"]),
                "element": _alg(r["element"]),
                "coordinates": None if c is None else rationals_in(c),
            }
        if kind == "group":
            from galois_lab.profinite import FiniteGaloisGroup

            K = NumberField.from_dict(r["field"])
            return {"group": FiniteGaloisGroup(K, [Embedding(K, _alg(d)) for d in r["images"]], r["table"])}
        if kind == "node":
            return {"level": r["level"], "index": r["index"], "parent": r["parent"], "embedding": _emb(r)}
        if kind == "tuple":
            return {"elements": [_alg(d) for d in r["elements"]]}
        if kind in ("pair", "row"):
            return {"indices": list(r["indices"])}
        if kind == "measure":
            out = {"value": parse_rational(r["value"])}
            if "stage" in r:
                out["stage"] = r["stage"]
            if "set" in r:
                out["set"] = clopen_from_dict(r["set"])
            return out
        if kind == "mu-test":
            return {
                "index": r["index"], "depth": r["depth"], "valid": r["valid"],
                "measure": parse_rational(r["measure"]), "bound": parse_rational(r["bound"]),
            }
        if kind == "witness":
            if r["path"] is None:
                return {"prefix": None}
            from galois_lab.profinite import PathPrefix

            nodes = [_emb(d) for d in r["path"]]
            return {"prefix": PathPrefix(nodes[0].source, nodes, moved=(_alg(r["moved"]), _alg(r["image"])))}
        if kind == "non-randomness":
            if r["catalog_index"] is None:
                return {"witness": None}
            from galois_lab.randomness import NonRandomnessWitness

            w = NonRandomnessWitness(
                r["catalog_index"], TowerDescriptor.from_dict(r["tower"]), r["depth"],
                [(_alg(g), j) for g, j in r["containments"]],
            )
            return {"witness": w}
        if kind == "stage":
            from galois_lab.randomness import StageRecord

            return {"record": StageRecord(
                r["stage"], _alg(r["element"]), r["moved"], r["avoid"], _alg(r["image"]), r["degree"],
                r.get("position"),
            )}
        if kind == "automorphism":
            return {"embedding": _emb(r)}
        if kind == "tower":
            return {"tower": TowerDescriptor.from_dict(r)}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed {kind} record") from exc
    raise ParseError(f"unknown record type {kind!r}")


def round_trips(line: str) -> bool:
    r = loads(line)
    return encode(r["type"], **decode(r)) == r

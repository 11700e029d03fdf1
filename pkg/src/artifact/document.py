"""JSON algebra documents: parsing with coded diagnostics, canonical
serialization, and conversion to the library's structures.

The format is described in ``docs/SCHEMA.md``.  Coefficients are always
strings (``"3"``, ``"-1/2"``) so that nothing passes through a float.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import AlgebraError, BilinearForm, Complex, GradedSpace, LinearMap, format_rational, rational

SCHEMA_VERSION = 1

Coeffs = Tuple[Tuple[str, Fraction], ...]


class DocumentError(Exception):
    """A schema violation, carrying an error code and a JSON-path position."""

    def __init__(self, code: str, where: str, message: str):
        super().__init__(f"{code} at {where}: {message}")
        self.code = code
        self.where = where
        self.message = message

    def as_dict(self) -> Dict[str, str]:
        return {"code": self.code, "where": self.where, "message": self.message}


ERROR_CODES = {
    "E_ENCODING": "input is not UTF-8",
    "E_JSON": "input is not well-formed JSON",
    "E_SCHEMA": "a required field is missing or has the wrong type",
    "E_VERSION": "unsupported schema version",
    "E_UNKNOWN_FIELD": "a field that the schema does not define",
    "E_DUPLICATE": "a generator or entry is declared twice",
    "E_RATIONAL": "a coefficient is not an exact rational",
    "E_UNDECLARED": "a generator name that was never declared",
    "E_PARITY": "an entry whose parities cannot match",
    "E_ALGEBRA": "the data violates an algebraic requirement",
}


@dataclass(frozen=True)
class LinearBlock:
    """A linear map given column by column: input name -> output combination."""

    columns: Tuple[Tuple[str, Coeffs], ...]


@dataclass(frozen=True)
class PairingBlock:
    parity: int
    entries: Tuple[Tuple[str, str, Fraction], ...]


@dataclass(frozen=True)
class CdgaBlock:
    unit: Optional[str]
    product: Tuple[Tuple[Tuple[str, str], Coeffs], ...]


@dataclass(frozen=True)
class SdrBlock:
    generators: Tuple[Tuple[str, int], ...]
    differential: LinearBlock
    pairing: Optional[PairingBlock]
    i: LinearBlock
    p: LinearBlock
    s: LinearBlock


@dataclass(frozen=True)
class AlgebraDocument:
    generators: Tuple[Tuple[str, int], ...]
    differential: LinearBlock = LinearBlock(())
    structure: Tuple[Tuple[Tuple[str, ...], Coeffs], ...] = ()
    pairing: Optional[PairingBlock] = None
    cdga: Optional[CdgaBlock] = None
    sdr: Optional[SdrBlock] = None
    schema: int = SCHEMA_VERSION

    @property
    def space(self) -> GradedSpace:
        return _space(self.generators)


# ---------------------------------------------------------------------------
# parsing


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise DocumentError("E_DUPLICATE", "$", f"key {k!r} appears twice in one object")
        out[k] = v
    return out


def _expect(value, kind, where: str, what: str):
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise DocumentError("E_SCHEMA", where, f"{what} must be {_kind_name(kind)}")
    return value


def _kind_name(kind) -> str:
    return {dict: "an object", list: "an array", str: "a string", int: "an integer"}.get(kind, str(kind))


def _fields(obj: Mapping, where: str, required: Sequence[str], optional: Sequence[str] = ()) -> None:
    for key in obj:
        if key not in required and key not in optional:
            raise DocumentError("E_UNKNOWN_FIELD", f"{where}.{key}", f"unknown field {key!r}")
    for key in required:
        if key not in obj:
            raise DocumentError("E_SCHEMA", where, f"missing field {key!r}")


def _rational(value, where: str) -> Fraction:
    if not isinstance(value, str):
        raise DocumentError("E_RATIONAL", where, "coefficients must be strings like \"3\" or \"-1/2\"")
    try:
        return rational(value)
    except AlgebraError as exc:
        raise DocumentError("E_RATIONAL", where, str(exc)) from None


class _Names:
    def __init__(self, gens: Sequence[Tuple[str, int]]):
        self.parity = dict(gens)
        self.order = {n: i for i, (n, _) in enumerate(gens)}

    def check(self, name, where: str) -> str:
        if not isinstance(name, str):
            raise DocumentError("E_SCHEMA", where, "generator names must be strings")
        if name not in self.parity:
            raise DocumentError("E_UNDECLARED", where, f"generator {name!r} is not declared")
        return name


def _generators(raw, where: str) -> Tuple[Tuple[str, int], ...]:
    _expect(raw, dict, where, "space")
    _fields(raw, where, ["generators"])
    gens = _expect(raw["generators"], list, f"{where}.generators", "generators")
    out = []
    seen = set()
    for k, g in enumerate(gens):
        at = f"{where}.generators[{k}]"
        _expect(g, dict, at, "a generator")
        _fields(g, at, ["name", "parity"])
        name = _expect(g["name"], str, f"{at}.name", "name")
        if not name:
            raise DocumentError("E_SCHEMA", f"{at}.name", "name must be non-empty")
        parity = g["parity"]
        if isinstance(parity, bool) or parity not in (0, 1):
            raise DocumentError("E_PARITY", f"{at}.parity", "parity must be 0 or 1")
        if name in seen:
            raise DocumentError("E_DUPLICATE", f"{at}.name", f"generator {name!r} declared twice")
        seen.add(name)
        out.append((name, parity))
    return tuple(out)


def _coeffs(raw, names: _Names, where: str) -> Coeffs:
    _expect(raw, dict, where, "output")
    out = []
    for name, value in raw.items():
        names.check(name, f"{where}.{name}")
        out.append((name, _rational(value, f"{where}.{name}")))
    return tuple(sorted(out, key=lambda t: names.order[t[0]]))


def _linear(raw, names: _Names, where: str, parity: int,
            target: Optional[_Names] = None) -> LinearBlock:
    target = target or names
    _expect(raw, list, where, "a linear map")
    cols = []
    seen = set()
    for k, entry in enumerate(raw):
        at = f"{where}[{k}]"
        _expect(entry, dict, at, "an entry")
        _fields(entry, at, ["input", "output"])
        src = names.check(entry["input"], f"{at}.input")
        if src in seen:
            raise DocumentError("E_DUPLICATE", f"{at}.input", f"column {src!r} given twice")
        seen.add(src)
        out = _coeffs(entry["output"], target, f"{at}.output")
        for tgt, c in out:
            if c and (names.parity[src] + target.parity[tgt]) % 2 != parity:
                raise DocumentError("E_PARITY", f"{at}.output.{tgt}",
                                    f"{src} -> {tgt} breaks the map's parity {parity}")
        cols.append((src, out))
    return LinearBlock(tuple(sorted(cols, key=lambda t: names.order[t[0]])))


def _pairing(raw, names: _Names, where: str) -> PairingBlock:
    _expect(raw, dict, where, "pairing")
    _fields(raw, where, ["parity", "entries"])
    parity = raw["parity"]
    if isinstance(parity, bool) or parity not in (0, 1):
        raise DocumentError("E_PARITY", f"{where}.parity", "parity must be 0 or 1")
    entries = []
    seen = set()
    for k, e in enumerate(_expect(raw["entries"], list, f"{where}.entries", "entries")):
        at = f"{where}.entries[{k}]"
        _expect(e, dict, at, "an entry")
        _fields(e, at, ["left", "right", "value"])
        a = names.check(e["left"], f"{at}.left")
        b = names.check(e["right"], f"{at}.right")
        v = _rational(e["value"], f"{at}.value")
        if v and (names.parity[a] + names.parity[b]) % 2 != parity:
            raise DocumentError("E_PARITY", at, f"<{a}, {b}> is zero for a form of parity {parity}")
        if (a, b) in seen:
            raise DocumentError("E_DUPLICATE", at, f"entry <{a}, {b}> given twice")
        seen.add((a, b))
        entries.append((a, b, v))
    entries.sort(key=lambda t: (names.order[t[0]], names.order[t[1]]))
    return PairingBlock(parity, tuple(entries))


def _structure(raw, names: _Names, where: str):
    _expect(raw, list, where, "structure")
    out = []
    seen = set()
    for k, entry in enumerate(raw):
        at = f"{where}[{k}]"
        _expect(entry, dict, at, "an entry")
        _fields(entry, at, ["inputs", "output"])
        inputs = _expect(entry["inputs"], list, f"{at}.inputs", "inputs")
        if len(inputs) < 2:
            raise DocumentError("E_SCHEMA", f"{at}.inputs", "brackets need at least two inputs")
        ins = tuple(names.check(n, f"{at}.inputs[{j}]") for j, n in enumerate(inputs))
        key = tuple(sorted(ins, key=names.order.__getitem__))
        if key in seen:
            raise DocumentError("E_DUPLICATE", f"{at}.inputs", f"inputs {list(ins)} given twice")
        seen.add(key)
        outc = _coeffs(entry["output"], names, f"{at}.output")
        total = sum(names.parity[n] for n in ins) + len(ins)
        for tgt, c in outc:
            if c and (total + names.parity[tgt]) % 2:
                raise DocumentError("E_PARITY", f"{at}.output.{tgt}",
                                    f"an arity-{len(ins)} bracket cannot send {list(ins)} to {tgt}")
        out.append((ins, outc))
    out.sort(key=lambda t: (len(t[0]), [names.order[n] for n in t[0]]))
    return tuple(out)


def _cdga(raw, names: _Names, where: str) -> CdgaBlock:
    _expect(raw, dict, where, "cdga")
    _fields(raw, where, ["product"], ["unit"])
    unit = names.check(raw["unit"], f"{where}.unit") if "unit" in raw else None
    out = []
    seen = set()
    for k, entry in enumerate(_expect(raw["product"], list, f"{where}.product", "product")):
        at = f"{where}.product[{k}]"
        _expect(entry, dict, at, "an entry")
        _fields(entry, at, ["inputs", "output"])
        ins = _expect(entry["inputs"], list, f"{at}.inputs", "inputs")
        if len(ins) != 2:
            raise DocumentError("E_SCHEMA", f"{at}.inputs", "products take exactly two inputs")
        a, b = (names.check(n, f"{at}.inputs[{j}]") for j, n in enumerate(ins))
        if (a, b) in seen:
            raise DocumentError("E_DUPLICATE", f"{at}.inputs", f"product {a}·{b} given twice")
        seen.add((a, b))
        outc = _coeffs(entry["output"], names, f"{at}.output")
        for tgt, c in outc:
            if c and (names.parity[a] + names.parity[b] + names.parity[tgt]) % 2:
                raise DocumentError("E_PARITY", f"{at}.output.{tgt}", f"{a}·{b} cannot contain {tgt}")
        out.append(((a, b), outc))
    out.sort(key=lambda t: (names.order[t[0][0]], names.order[t[0][1]]))
    return CdgaBlock(unit, tuple(out))


def _sdr(raw, big: _Names, where: str) -> SdrBlock:
    _expect(raw, dict, where, "sdr")
    _fields(raw, where, ["space", "i", "p", "s"], ["differential", "pairing"])
    gens = _generators(raw["space"], f"{where}.space")
    overlap = set(n for n, _ in gens) & set(big.parity)
    if overlap:
        raise DocumentError("E_DUPLICATE", f"{where}.space", f"names shared with the big space: {sorted(overlap)}")
    small = _Names(gens)
    d = _linear(raw.get("differential", []), small, f"{where}.differential", 1)
    pairing = _pairing(raw["pairing"], small, f"{where}.pairing") if "pairing" in raw else None
    return SdrBlock(gens, d, pairing,
                    _linear(raw["i"], small, f"{where}.i", 0, big),
                    _linear(raw["p"], big, f"{where}.p", 0, small),
                    _linear(raw["s"], big, f"{where}.s", 1))


TOP_FIELDS = ("schema", "space", "differential", "structure", "pairing", "cdga", "sdr")


def parse(data) -> AlgebraDocument:
    """Parse document bytes (or text) into a validated :class:`AlgebraDocument`."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError("E_ENCODING", f"byte {exc.start}", "invalid UTF-8") from None
    else:
        text = data
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise DocumentError("E_JSON", f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return from_json(raw)


def from_json(raw) -> AlgebraDocument:
    _expect(raw, dict, "$", "the document")
    _fields(raw, "$", ["schema", "space"], TOP_FIELDS)
    version = raw["schema"]
    if isinstance(version, bool) or version != SCHEMA_VERSION:
        raise DocumentError("E_VERSION", "$.schema", f"expected schema {SCHEMA_VERSION}")
    gens = _generators(raw["space"], "$.space")
    names = _Names(gens)
    doc = AlgebraDocument(
        generators=gens,
        differential=_linear(raw.get("differential", []), names, "$.differential", 1),
        structure=_structure(raw.get("structure", []), names, "$.structure"),
        pairing=_pairing(raw["pairing"], names, "$.pairing") if "pairing" in raw else None,
        cdga=_cdga(raw["cdga"], names, "$.cdga") if "cdga" in raw else None,
        sdr=_sdr(raw["sdr"], names, "$.sdr") if "sdr" in raw else None,
    )
    return doc


# ---------------------------------------------------------------------------
# serialization


def _coeffs_json(cs: Coeffs) -> Dict[str, str]:
    return {n: format_rational(c) for n, c in cs}


def _linear_json(block: LinearBlock) -> List[dict]:
    return [{"input": src, "output": _coeffs_json(out)} for src, out in block.columns]


def _space_json(gens) -> dict:
    return {"generators": [{"name": n, "parity": p} for n, p in gens]}


def _pairing_json(p: PairingBlock) -> dict:
    return {"parity": p.parity,
            "entries": [{"left": a, "right": b, "value": format_rational(v)} for a, b, v in p.entries]}


def to_json(doc: AlgebraDocument) -> dict:
    out = {"schema": doc.schema, "space": _space_json(doc.generators)}
    if doc.differential.columns:
        out["differential"] = _linear_json(doc.differential)
    if doc.structure:
        out["structure"] = [{"inputs": list(ins), "output": _coeffs_json(o)} for ins, o in doc.structure]
    if doc.pairing is not None:
        out["pairing"] = _pairing_json(doc.pairing)
    if doc.cdga is not None:
        block = {"product": [{"inputs": list(ab), "output": _coeffs_json(o)} for ab, o in doc.cdga.product]}
        if doc.cdga.unit is not None:
            block["unit"] = doc.cdga.unit
        out["cdga"] = block
    if doc.sdr is not None:
        s = doc.sdr
        block = {"space": _space_json(s.generators), "i": _linear_json(s.i), "p": _linear_json(s.p),
                 "s": _linear_json(s.s)}
        if s.differential.columns:
            block["differential"] = _linear_json(s.differential)
        if s.pairing is not None:
            block["pairing"] = _pairing_json(s.pairing)
        out["sdr"] = block
    return out


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def serialize(doc: AlgebraDocument) -> bytes:
    return canonical_json(to_json(doc)).encode("utf-8")


# ---------------------------------------------------------------------------
# conversion


def _space(gens) -> GradedSpace:
    return GradedSpace(tuple(n for n, _ in gens), tuple(p for _, p in gens))


def _linear_map(block: LinearBlock, source: GradedSpace, target: GradedSpace, parity: int) -> LinearMap:
    entries = {}
    for src, out in block.columns:
        for tgt, c in out:
            if c:
                entries[(target.index(tgt), source.index(src))] = c
    return LinearMap(source, target, entries, parity)


def _form(block: Optional[PairingBlock], space: GradedSpace) -> Optional[BilinearForm]:
    if block is None:
        return None
    entries = {(space.index(a), space.index(b)): v for a, b, v in block.entries if v}
    return BilinearForm(space, entries, block.parity)


def _algebra(fn, *args):
    try:
        return fn(*args)
    except AlgebraError as exc:
        raise DocumentError("E_ALGEBRA", "$", str(exc)) from None


def differential_of(doc: AlgebraDocument) -> LinearMap:
    sp = doc.space
    return _linear_map(doc.differential, sp, sp, 1)


def brackets_of(doc: AlgebraDocument) -> Dict[Tuple[int, ...], Dict[int, Fraction]]:
    sp = doc.space
    return {tuple(sp.index(n) for n in ins): {sp.index(k): c for k, c in out}
            for ins, out in doc.structure}


def structure_of(doc: AlgebraDocument, cutoff: int = 6, check: bool = False):
    """The L∞ structure; the MC equation is only checked when asked."""
    from .linfty import structure_from_brackets

    if doc.cdga is not None:
        raise DocumentError("E_SCHEMA", "$.cdga", "this command expects an L∞ algebra, not a cdga")
    if any(len(ins) > cutoff for ins, _ in doc.structure):
        raise DocumentError("E_SCHEMA", "$.structure", f"a bracket has arity above the cutoff {cutoff}")
    return _algebra(lambda: structure_from_brackets(doc.space, brackets_of(doc), differential_of(doc),
                                                    cutoff, check))


def cyclic_of(doc: AlgebraDocument):
    from .linfty import CyclicData

    if doc.pairing is None:
        return None
    return CyclicData(_algebra(_form, doc.pairing, doc.space))


def cdga_of(doc: AlgebraDocument):
    from .tensorprod import Cdga

    if doc.cdga is None:
        raise DocumentError("E_SCHEMA", "$", "no cdga block")
    sp = doc.space
    product = {(sp.index(a), sp.index(b)): {sp.index(k): c for k, c in out} for (a, b), out in doc.cdga.product}
    unit = sp.index(doc.cdga.unit) if doc.cdga.unit is not None else None
    return _algebra(lambda: Cdga(sp, product, differential_of(doc), unit, _form(doc.pairing, sp)))


def dgla_of(doc: AlgebraDocument):
    """Read the document as a dgla: only binary brackets, which are the Lie bracket."""
    from .gauge import DglaPresentation

    if any(len(ins) != 2 for ins, _ in doc.structure):
        raise DocumentError("E_SCHEMA", "$.structure", "a dgla has binary brackets only")
    sp = doc.space
    return _algebra(lambda: DglaPresentation(sp, differential_of(doc), brackets_of(doc)))


def sdr_of(doc: AlgebraDocument):
    from .gauge import SdrData

    if doc.sdr is None:
        raise DocumentError("E_SCHEMA", "$", "no sdr block")
    s = doc.sdr
    V, B = doc.space, _space(s.generators)

    def build():
        big = Complex(V, differential_of(doc), _form(doc.pairing, V))
        small = Complex(B, _linear_map(s.differential, B, B, 1), _form(s.pairing, B))
        return SdrData(big, small, _linear_map(s.i, B, V, 0), _linear_map(s.p, V, B, 0),
                       _linear_map(s.s, V, V, 1))
    return _algebra(build)


def document_from_structure(s, cyclic=None) -> AlgebraDocument:
    """Write an L∞ structure (and optional form) back out as a document."""
    from .linfty import structure_to_brackets

    sp = s.space
    gens = tuple(zip(sp.names, sp.parities))
    cols = []
    for j in range(sp.dim):
        col = s.differential.column(j)
        if col:
            cols.append((sp.names[j], tuple((sp.names[k], c) for k, c in sorted(col.items()))))
    structure = tuple((tuple(sp.names[i] for i in key), tuple((sp.names[k], c) for k, c in sorted(out.items())))
                      for key, out in structure_to_brackets(s).items())
    pairing = None
    if cyclic is not None:
        f = cyclic.form
        pairing = PairingBlock(f.parity, tuple((sp.names[a], sp.names[b], v)
                                               for (a, b), v in sorted(f.entries.items()) if v and a <= b))
    return AlgebraDocument(gens, LinearBlock(tuple(cols)), structure, pairing)

#!/usr/bin/env python3
"""
File Formats

JSON documents read and written by the command line:

- diagram file: {name, D, vertices: [{id, external}], lines: [{id, from, to, massive}], basis?}
- operator file: the certified pairs of one diagram, bound to it by a hash of
  its canonical serialization
- point file: {"s": ["-1"], "z": ["1", "1"]} with rationals as strings

Rationals are always written as "p/q" strings and nothing time-dependent is
stored, so the same input produces byte-identical files.
"""

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Union

from errors import FormatError
from graph import Diagram, build_diagram
from pde import DiffOperator, OperatorPair
from polynomial import Poly
from reduction import GriffithsCertificate
from symanzik import ParametricIntegral
from verify import EuclideanPoint

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise FormatError(f"{path} does not exist") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps(data))
    return path


def _require(container: Dict, key: str, kind, where: str):
    if not isinstance(container, dict) or key not in container:
        raise FormatError("missing", field=f"{where}{key}")
    value = container[key]
    if kind is int and isinstance(value, bool):
        raise FormatError(f"expected integer, got {value!r}", field=f"{where}{key}")
    if not isinstance(value, kind):
        raise FormatError(
            f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}",
            field=f"{where}{key}",
        )
    return value


# diagrams


def parse_diagram(data: Any) -> Diagram:
    if not isinstance(data, dict):
        raise FormatError("diagram document must be a JSON object")
    _require(data, "D", int, "")
    vertices = _require(data, "vertices", list, "")
    for i, v in enumerate(vertices):
        _require(v, "id", (str, int), f"vertices[{i}].")
        if "external" in v and not isinstance(v["external"], bool):
            raise FormatError("expected boolean", field=f"vertices[{i}].external")
    lines = _require(data, "lines", list, "")
    for i, line in enumerate(lines):
        for key in ("id", "from", "to"):
            _require(line, key, (str, int), f"lines[{i}].")
        if "massive" in line and not isinstance(line["massive"], bool):
            raise FormatError("expected boolean", field=f"lines[{i}].massive")
    basis = data.get("basis")
    if basis is not None:
        if not isinstance(basis, list) or not all(isinstance(c, list) for c in basis):
            raise FormatError("expected a list of vertex-id lists", field="basis")
    return build_diagram(data)


def load_diagram(path: PathLike) -> Diagram:
    return parse_diagram(read_json(path))


def diagram_hash(d: Diagram) -> str:
    text = json.dumps(d.to_spec(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# operator files


def _fraction_text(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def dump_operators(
    integral: ParametricIntegral, pairs: List[OperatorPair]
) -> Dict[str, Any]:
    alphabet = integral.alphabet
    out_pairs = []
    for pair in pairs:
        record: Dict[str, Any] = {
            "label": pair.label,
            "order": pair.order,
            "principal": pair.principal.to_json(),
            "tail": pair.tail.to_json(),
            "prefactors": {
                "c_p": _fraction_text(pair.c_p),
                "c_p_minus_1": _fraction_text(pair.c_p_minus_1),
            },
        }
        if pair.certificate is not None:
            record["certificate"] = {
                "lambdas": [lam.to_json() for lam in pair.certificate.lambdas]
            }
        out_pairs.append(record)
    return {
        "diagram": integral.diagram.name,
        "diagram_hash": diagram_hash(integral.diagram),
        "basis": [list(names) for names in integral.basis.names],
        "alphabet": {"alpha": alphabet.n_alpha, "s": alphabet.n_s, "z": alphabet.n_z},
        "exponents": {"a": integral.a, "k": integral.k},
        "pairs": out_pairs,
    }


def parse_operators(integral: ParametricIntegral, data: Any) -> List[OperatorPair]:
    """Pairs of an operator document, checked against the integral they claim."""
    if not isinstance(data, dict):
        raise FormatError("operator document must be a JSON object")
    expected = diagram_hash(integral.diagram)
    if _require(data, "diagram_hash", str, "") != expected:
        raise FormatError(
            f"operators were derived for another diagram ({data['diagram_hash'][:12]}...)",
            field="diagram_hash",
        )
    basis = [list(names) for names in integral.basis.names]
    if data.get("basis", basis) != basis:
        raise FormatError(f"expected {basis}", field="basis")
    alphabet = integral.alphabet
    pairs = []
    for i, record in enumerate(_require(data, "pairs", list, "")):
        where = f"pairs[{i}]"
        try:
            principal = _require(record, "principal", list, f"{where}.")
            tail = _require(record, "tail", list, f"{where}.")
            principal = DiffOperator.from_json(alphabet, principal)
            tail = DiffOperator.from_json(alphabet, tail)
        except (KeyError, TypeError, ValueError, ArithmeticError) as e:
            raise FormatError(str(e), field=where) from e
        certificate = None
        if "certificate" in record:
            lambdas = _require(record["certificate"], "lambdas", list, f"{where}.certificate.")
            try:
                polys = tuple(Poly.from_json(alphabet, lam) for lam in lambdas)
            except (TypeError, ValueError, ArithmeticError) as e:
                raise FormatError(str(e), field=f"{where}.certificate.lambdas") from e
            zero = Poly.zero(alphabet)
            certificate = GriffithsCertificate(zero, polys, zero, integral.Q)
        prefactors = record.get("prefactors", {})
        if not isinstance(prefactors, dict):
            raise FormatError("expected an object", field=f"{where}.prefactors")
        try:
            c_p = Fraction(prefactors.get("c_p", "0"))
            c_p_minus_1 = Fraction(prefactors.get("c_p_minus_1", "0"))
        except (TypeError, ValueError, ArithmeticError) as e:
            raise FormatError(str(e), field=f"{where}.prefactors") from e
        pairs.append(
            OperatorPair(
                principal=principal,
                tail=tail,
                c_p=c_p,
                c_p_minus_1=c_p_minus_1,
                label=str(record.get("label", f"pair {i + 1}")),
                certificate=certificate,
            )
        )
    return pairs


def load_operators(integral: ParametricIntegral, path: PathLike) -> List[OperatorPair]:
    return parse_operators(integral, read_json(path))


# point files


def parse_point(data: Any) -> EuclideanPoint:
    if not isinstance(data, dict):
        raise FormatError("point document must be a JSON object")
    values = {}
    for key in ("s", "z"):
        raw = _require(data, key, list, "")
        try:
            values[key] = [Fraction(str(v)) for v in raw]
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise FormatError(f"not a rational: {e}", field=key) from e
    return EuclideanPoint.of(values["s"], values["z"])


def load_point(path: PathLike) -> EuclideanPoint:
    return parse_point(read_json(path))

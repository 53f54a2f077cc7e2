#!/usr/bin/env python3
"""
Exact Multivariate Polynomials

Sparse polynomials with Fraction coefficients over the alphabet of a diagram:
Feynman parameters a1..aN, invariants s1..sr and squared masses z1..zN, in that
order. Terms are kept in graded-lexicographic order over the alphabet order, so
anything built from them (matrix rows, rendered text, JSON) is reproducible.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from math import gcd
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

MAX_EXPONENT = 255

Exponents = Tuple[int, ...]
Variable = Union[int, str]
Scalar = Union[int, Fraction]


class AlphabetMismatchError(ValueError):
    pass


class NotDivisibleError(ValueError):
    pass


class UnknownVariableError(KeyError):
    pass


class MissingAssignmentError(KeyError):
    pass


class ExponentOverflowError(OverflowError):
    pass


@dataclass(frozen=True)
class VarAlphabet:
    """Variable names in three blocks: alpha (a1..), s (s1..) and z (z1..)."""

    n_alpha: int
    n_s: int = 0
    n_z: int = 0

    @classmethod
    def for_diagram(cls, n_lines: int, n_invariants: int) -> "VarAlphabet":
        return cls(n_lines, n_invariants, n_lines)

    @property
    def size(self) -> int:
        return self.n_alpha + self.n_s + self.n_z

    @cached_property
    def names(self) -> Tuple[str, ...]:
        return tuple(
            [f"a{i}" for i in range(1, self.n_alpha + 1)]
            + [f"s{i}" for i in range(1, self.n_s + 1)]
            + [f"z{i}" for i in range(1, self.n_z + 1)]
        )

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, v: Variable) -> int:
        if isinstance(v, int):
            if 0 <= v < self.size:
                return v
            raise UnknownVariableError(v)
        try:
            return self._positions[v]
        except KeyError:
            raise UnknownVariableError(v) from None

    def block_range(self, block: str) -> range:
        s0 = self.n_alpha
        z0 = self.n_alpha + self.n_s
        ranges = {
            "alpha": range(0, s0),
            "s": range(s0, z0),
            "z": range(z0, self.size),
            "sz": range(s0, self.size),
        }
        if block not in ranges:
            raise ValueError(f"unknown block {block!r}")
        return ranges[block]

    def alpha(self, i: int) -> int:
        return i

    def s(self, i: int) -> int:
        return self.n_alpha + i

    def z(self, j: int) -> int:
        return self.n_alpha + self.n_s + j

    def embed(self, block: str, block_exps: Iterable[int]) -> Exponents:
        """Lift an exponent vector over one block to the full alphabet."""
        full = [0] * self.size
        positions = self.block_range(block)
        block_exps = tuple(block_exps)
        if len(block_exps) != len(positions):
            raise ValueError("exponent vector does not match block size")
        for pos, e in zip(positions, block_exps):
            full[pos] = e
        return tuple(full)


def monomials_of_degree(size: int, d: int) -> List[Exponents]:
    """All exponent vectors of length `size` and total degree `d`, grlex order."""
    if d < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(size), d):
        exps = [0] * size
        for i in combo:
            exps[i] += 1
        out.append(tuple(exps))
    return out


def monomials_up_to_degree(size: int, d: int) -> List[Exponents]:
    out = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(size, k))
    return out


def _grlex_key(exps: Exponents):
    return (sum(exps), exps)


class Poly:
    """Immutable sparse polynomial; zero coefficients are never stored."""

    __slots__ = ("alphabet", "_terms")

    def __init__(self, alphabet: VarAlphabet, terms: Optional[Mapping] = None):
        self.alphabet = alphabet
        clean: Dict[Exponents, Fraction] = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != alphabet.size:
                    raise ValueError(
                        f"exponent vector of length {len(exps)} for an alphabet "
                        f"of size {alphabet.size}"
                    )
                if min(exps, default=0) < 0:
                    raise ValueError("negative exponent")
                if max(exps, default=0) > MAX_EXPONENT:
                    raise ExponentOverflowError(max(exps))
                c = Fraction(c)
                if c:
                    clean[exps] = clean.get(exps, 0) + c
        self._terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def _raw(cls, alphabet: VarAlphabet, terms: Dict[Exponents, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.alphabet = alphabet
        p._terms = terms
        return p

    # constructors

    @classmethod
    def zero(cls, alphabet: VarAlphabet) -> "Poly":
        return cls._raw(alphabet, {})

    @classmethod
    def constant(cls, alphabet: VarAlphabet, c: Scalar) -> "Poly":
        c = Fraction(c)
        if not c:
            return cls.zero(alphabet)
        return cls._raw(alphabet, {(0,) * alphabet.size: c})

    @classmethod
    def one(cls, alphabet: VarAlphabet) -> "Poly":
        return cls.constant(alphabet, 1)

    @classmethod
    def var(cls, alphabet: VarAlphabet, v: Variable) -> "Poly":
        exps = [0] * alphabet.size
        exps[alphabet.index(v)] = 1
        return cls._raw(alphabet, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(
        cls, alphabet: VarAlphabet, exps: Iterable[int], c: Scalar = 1
    ) -> "Poly":
        return cls(alphabet, {tuple(exps): c})

    # inspection

    def items(self) -> List[Tuple[Exponents, Fraction]]:
        """Terms in canonical (grlex descending) order."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def coefficient(self, exps: Iterable[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def variables(self) -> List[int]:
        used = set()
        for exps in self._terms:
            used.update(i for i, e in enumerate(exps) if e)
        return sorted(used)

    def degree(self, block: str = "alpha") -> Optional[int]:
        if not self._terms:
            return None
        positions = self.alphabet.block_range(block)
        return max(sum(e[i] for i in positions) for e in self._terms)

    def is_homogeneous(self, block: str = "alpha") -> Optional[int]:
        """The common degree of all terms in `block`, or None if they differ."""
        positions = self.alphabet.block_range(block)
        degrees = {sum(e[i] for i in positions) for e in self._terms}
        if len(degrees) != 1:
            return None
        return degrees.pop()

    # arithmetic

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.alphabet != self.alphabet:
                raise AlphabetMismatchError(f"{self.alphabet} vs {other.alphabet}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.alphabet, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result = dict(self._terms)
        for e, c in other._terms.items():
            v = result.get(e, 0) + c
            if v:
                result[e] = v
            else:
                result.pop(e, None)
        return Poly._raw(self.alphabet, result)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.alphabet, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.alphabet)
        return Poly._raw(self.alphabet, {e: v * c for e, v in self._terms.items()})

    def _max_exponents(self) -> List[int]:
        top = [0] * self.alphabet.size
        for exps in self._terms:
            for i, e in enumerate(exps):
                if e > top[i]:
                    top[i] = e
        return top

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return Poly.zero(self.alphabet)
        for a, b in zip(self._max_exponents(), other._max_exponents()):
            if a + b > MAX_EXPONENT:
                raise ExponentOverflowError(a + b)
        result: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                result[e] = result.get(e, 0) + c1 * c2
        return Poly._raw(self.alphabet, {e: c for e, c in result.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        return self.power(n)

    def power(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.one(self.alphabet)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, exps: Iterable[int]) -> "Poly":
        """Multiply by the monomial with exponent vector `exps`."""
        exps = tuple(exps)
        out = {}
        for e, c in self._terms.items():
            ne = tuple(x + y for x, y in zip(e, exps))
            if max(ne, default=0) > MAX_EXPONENT:
                raise ExponentOverflowError(max(ne))
            out[ne] = c
        return Poly._raw(self.alphabet, out)

    def multiply_by_var(self, v: Variable) -> "Poly":
        exps = [0] * self.alphabet.size
        exps[self.alphabet.index(v)] = 1
        return self.shift(exps)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.alphabet, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.alphabet == other.alphabet and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.alphabet, frozenset(self._terms.items())))

    # calculus and division

    def partial_derivative(self, v: Variable) -> "Poly":
        idx = self.alphabet.index(v)
        out = {}
        for e, c in self._terms.items():
            k = e[idx]
            if k:
                ne = e[:idx] + (k - 1,) + e[idx + 1:]
                out[ne] = c * k
        return Poly._raw(self.alphabet, out)

    def divisible_by_var(self, v: Variable) -> bool:
        idx = self.alphabet.index(v)
        return all(e[idx] > 0 for e in self._terms)

    def divide_by_var(self, v: Variable) -> "Poly":
        idx = self.alphabet.index(v)
        out = {}
        for e, c in self._terms.items():
            if not e[idx]:
                raise NotDivisibleError(
                    f"{self.render()} is not divisible by {self.alphabet.names[idx]}"
                )
            out[e[:idx] + (e[idx] - 1,) + e[idx + 1:]] = c
        return Poly._raw(self.alphabet, out)

    # substitution and evaluation

    def substitute(self, assignment: Mapping[Variable, Any], partial: bool = False) -> "Poly":
        """Compose with `assignment` (variable -> Poly or scalar).

        Every variable that occurs must be assigned unless `partial` is set, in
        which case unassigned variables are carried over by name into the
        alphabet of the assigned polynomials.
        """
        target = self.alphabet
        for value in assignment.values():
            if isinstance(value, Poly):
                target = value.alphabet
                break
        values: Dict[int, Poly] = {}
        for v, value in assignment.items():
            idx = self.alphabet.index(v)
            if isinstance(value, Poly):
                if value.alphabet != target:
                    raise AlphabetMismatchError("assigned polynomials differ in alphabet")
                values[idx] = value
            else:
                values[idx] = Poly.constant(target, value)
        powers: Dict[Tuple[int, int], Poly] = {}
        names = self.alphabet.names
        result = Poly.zero(target)
        for e, c in self._terms.items():
            term = Poly.constant(target, c)
            carried = [0] * target.size
            for idx, k in enumerate(e):
                if not k:
                    continue
                if idx in values:
                    key = (idx, k)
                    if key not in powers:
                        powers[key] = values[idx].power(k)
                    term = term * powers[key]
                elif partial:
                    carried[target.index(names[idx])] += k
                else:
                    raise MissingAssignmentError(names[idx])
            if any(carried):
                term = term.shift(carried)
            result = result + term
        return result

    def evaluate(self, point: Mapping[Variable, Scalar]) -> Fraction:
        values = {self.alphabet.index(v): Fraction(x) for v, x in point.items()}
        names = self.alphabet.names
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for idx, k in enumerate(e):
                if k:
                    if idx not in values:
                        raise MissingAssignmentError(names[idx])
                    term *= values[idx] ** k
            total += term
        return total

    def coefficients_in(self, block: str) -> Dict[Exponents, "Poly"]:
        """Split by the monomials of one block.

        Maps each block exponent vector to the polynomial (over the other
        variables) it multiplies.
        """
        positions = list(self.alphabet.block_range(block))
        pos_set = set(positions)
        split: Dict[Exponents, Dict[Exponents, Fraction]] = {}
        for e, c in self._terms.items():
            key = tuple(e[i] for i in positions)
            rest = tuple(0 if i in pos_set else x for i, x in enumerate(e))
            split.setdefault(key, {})[rest] = c
        return {k: Poly._raw(self.alphabet, v) for k, v in split.items()}

    def primitive(self) -> Tuple[Fraction, "Poly"]:
        """(content, p/content) with integer coprime coefficients, leading one positive."""
        if not self._terms:
            return Fraction(0), self
        lcm = 1
        for c in self._terms.values():
            lcm = lcm * c.denominator // gcd(lcm, c.denominator)
        g = 0
        for c in self._terms.values():
            g = gcd(g, int(c * lcm))
        content = Fraction(g, lcm)
        if self.items()[0][1] < 0:
            content = -content
        return content, self.scale(1 / content)

    # text and JSON

    def _monomial_text(self, exps: Exponents) -> str:
        parts = []
        for name, k in zip(self.alphabet.names, exps):
            if k == 1:
                parts.append(name)
            elif k > 1:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def render(self) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for e, c in self.items():
            mono = self._monomial_text(e)
            if not mono:
                text = str(c)
            elif c == 1:
                text = mono
            elif c == -1:
                text = f"-{mono}"
            else:
                text = f"{c}*{mono}"
            if not chunks:
                chunks.append(text)
            elif text.startswith("-"):
                chunks.append(f"- {text[1:]}")
            else:
                chunks.append(f"+ {text}")
        return " ".join(chunks)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.render()!r})"

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"coeff": f"{c.numerator}/{c.denominator}", "exponents": list(e)}
            for e, c in self.items()
        ]

    @classmethod
    def from_json(cls, alphabet: VarAlphabet, data: Any) -> "Poly":
        if not isinstance(data, list):
            raise ValueError("polynomial must be a list of terms")
        terms: Dict[Exponents, Fraction] = {}
        for term in data:
            if not isinstance(term, dict) or "coeff" not in term or "exponents" not in term:
                raise ValueError(f"malformed term {term!r}")
            exps = term["exponents"]
            if not isinstance(exps, list) or not all(isinstance(e, int) for e in exps):
                raise ValueError(f"malformed exponents {exps!r}")
            key = tuple(exps)
            if key in terms:
                raise ValueError(f"duplicate monomial {exps!r}")
            terms[key] = Fraction(str(term["coeff"]))
        return cls(alphabet, terms)

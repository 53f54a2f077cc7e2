#!/usr/bin/env python3
"""
PDE Systems for Feynman Integrals

Differential operators in d/ds_i, d/dz_j with (s, z) coefficients standing to
the left of every derivative, and the three ways of producing annihilating
pairs (D + D~) F = 0:

- theorem1_system: one pair per line, principal part Q_{a_i}(d/dz) d/dz_i
- theorem2_system: one pair per eligible (i, j), principal part Q_{a_j}(d/dz) d/ds_i
- derive_general: the kernel of the undetermined-coefficient system

Under the integral sign d/ds_i brings down W_i and d/dz_j brings down -a_j U,
so an operator P of order p acts as

    P F = (-1)^p c_p  integral of P(W, -a U) U^a / Q^(k+p),   c_p = (k+p-1)!/(k-1)!

and (D + D~) F = 0 as soon as P(W, -aU) U^a for D is sum lambda_v Q_{a_v} with
a_v | lambda_v and sum dlambda_v/da_v equals the same substitution for D~.

theorem2_system uses the tail +W_{i,a_j}(d/dz) - (a+q-1) U_{a_j}(d/dz) d/ds_i;
the opposite tail sign does not annihilate F.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain
from math import factorial, gcd
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from errors import DiagramError
from linalg import RationalMatrix, SystemBuilder, rank
from polynomial import Exponents, Poly, VarAlphabet, monomials_of_degree
from reduction import GriffithsCertificate, lambda_ansatz
from symanzik import ParametricIntegral, check_property_p

DerivativeIndex = Tuple[int, ...]


class DiffOperator:
    """Normal-ordered operator: {derivative index over (s, z): coefficient}.

    Coefficients live in the diagram alphabet but may only use s and z.
    """

    def __init__(
        self,
        alphabet: VarAlphabet,
        terms: Optional[Dict[DerivativeIndex, Poly]] = None,
    ):
        self.alphabet = alphabet
        width = alphabet.n_s + alphabet.n_z
        clean: Dict[DerivativeIndex, Poly] = {}
        for index, coeff in (terms or {}).items():
            index = tuple(index)
            if len(index) != width:
                raise ValueError(
                    f"derivative index {index} does not match {width} variables"
                )
            if coeff.alphabet != alphabet:
                raise ValueError("coefficient uses a different alphabet")
            if coeff.degree("alpha"):
                raise ValueError(
                    "operator coefficients may not contain Feynman parameters"
                )
            total = clean.get(index, Poly.zero(alphabet)) + coeff
            if total:
                clean[index] = total
            else:
                clean.pop(index, None)
        self.terms = clean

    @classmethod
    def derivative(
        cls, alphabet: VarAlphabet, index: Sequence[int], coeff=None
    ) -> "DiffOperator":
        coeff = coeff if coeff is not None else Poly.one(alphabet)
        return cls(alphabet, {tuple(index): coeff})

    @classmethod
    def zero(cls, alphabet: VarAlphabet) -> "DiffOperator":
        return cls(alphabet)

    def items(self) -> List[Tuple[DerivativeIndex, Poly]]:
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    @property
    def order(self) -> int:
        return max((sum(i) for i in self.terms), default=0)

    def homogeneous_order(self) -> Optional[int]:
        orders = {sum(i) for i in self.terms}
        return orders.pop() if len(orders) == 1 else None

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        merged = dict(self.terms)
        for index, coeff in other.terms.items():
            merged[index] = merged.get(index, Poly.zero(self.alphabet)) + coeff
        return DiffOperator(self.alphabet, merged)

    def __neg__(self) -> "DiffOperator":
        return self.scale(-1)

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def scale(self, c) -> "DiffOperator":
        scaled = {i: p.scale(c) for i, p in self.terms.items()}
        return DiffOperator(self.alphabet, scaled)

    def times_derivative(self, var: int) -> "DiffOperator":
        """Compose with d/d(var) on the right; `var` indexes the (s, z) block."""
        out = {}
        for index, coeff in self.terms.items():
            shifted = list(index)
            shifted[var] += 1
            out[tuple(shifted)] = coeff
        return DiffOperator(self.alphabet, out)

    def principal_part(self) -> "DiffOperator":
        top = self.order
        terms = {i: p for i, p in self.terms.items() if sum(i) == top}
        return DiffOperator(self.alphabet, terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.alphabet == other.alphabet and self.terms == other.terms

    def render(self) -> str:
        if not self.terms:
            return "0"
        names = self.alphabet.names[self.alphabet.n_alpha:]
        chunks = []
        for index, coeff in self.items():
            parts = []
            for name, k in zip(names, index):
                if k == 1:
                    parts.append(f"d{name}")
                elif k > 1:
                    parts.append(f"d{name}^{k}")
            text = f"({coeff.render()})"
            if parts:
                text += "*" + "*".join(parts)
            chunks.append(text)
        return " + ".join(chunks)

    def to_json(self) -> List[Dict[str, Any]]:
        n_s = self.alphabet.n_s
        return [
            {"s": list(index[:n_s]), "z": list(index[n_s:]), "coeff": coeff.to_json()}
            for index, coeff in self.items()
        ]

    @classmethod
    def from_json(cls, alphabet: VarAlphabet, data: Any) -> "DiffOperator":
        if not isinstance(data, list):
            raise ValueError("operator must be a list of terms")
        terms = {}
        for term in data:
            index = tuple(term["s"]) + tuple(term["z"])
            if index in terms:
                raise ValueError(f"duplicate derivative {list(index)}")
            terms[index] = Poly.from_json(alphabet, term["coeff"])
        return cls(alphabet, terms)


def prefactor(k: int, p: int) -> Fraction:
    """c_p = (k+p-1)!/(k-1)!"""
    return Fraction(factorial(k + p - 1), factorial(k - 1))


@dataclass
class OperatorPair:
    principal: DiffOperator
    tail: DiffOperator
    c_p: Fraction
    c_p_minus_1: Fraction
    label: str = ""
    certificate: Optional[GriffithsCertificate] = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return self.principal.order

    def combined(self) -> DiffOperator:
        return self.principal + self.tail


@dataclass(frozen=True)
class Substitution:
    R: Poly
    order: int
    sign: int


def operator_from_alpha_poly(integral: ParametricIntegral, p: Poly) -> DiffOperator:
    """a_k -> d/dz_k, with the (s, z) part of every term left as its coefficient."""
    alphabet = integral.alphabet
    n = alphabet.n_alpha
    terms: Dict[DerivativeIndex, Poly] = {}
    for exps, c in p.items():
        index = (0,) * alphabet.n_s + tuple(exps[:n])
        coeff = Poly.monomial(alphabet, (0,) * n + tuple(exps[n:]), c)
        terms[index] = terms.get(index, Poly.zero(alphabet)) + coeff
    return DiffOperator(alphabet, terms)


def _image_of_derivative(
    integral: ParametricIntegral, index: DerivativeIndex, cache: Dict
) -> Poly:
    """W^I (-1)^|J| a^J U^|J| U^a for one derivative index (I, J)."""
    if index in cache:
        return cache[index]
    alphabet = integral.alphabet
    n_s = alphabet.n_s
    s_part, z_part = index[:n_s], index[n_s:]
    image = integral.u_power(integral.a + sum(z_part))
    for i, e in enumerate(s_part):
        if e:
            image = image * integral.W[i].power(e)
    if any(z_part):
        image = image.shift(tuple(z_part) + (0,) * (alphabet.size - alphabet.n_alpha))
    if sum(z_part) % 2:
        image = -image
    cache[index] = image
    return image


def substitute_operator(op: DiffOperator, integral: ParametricIntegral) -> Substitution:
    """R with P F = sign * c_p * integral of R / Q^(k+p)."""
    integral.require_regime()
    if op.is_zero():
        return Substitution(Poly.zero(integral.alphabet), 0, 1)
    p = op.homogeneous_order()
    if p is None:
        raise ValueError("operator mixes derivative orders")
    cache = integral.image_cache
    R = Poly.zero(integral.alphabet)
    for index, coeff in op.terms.items():
        R = R + coeff * _image_of_derivative(integral, index, cache)
    return Substitution(R, p, -1 if p % 2 else 1)


def _pair(
    integral: ParametricIntegral, principal, tail, label, lambdas=None
) -> OperatorPair:
    p = principal.order
    cert = None
    if lambdas is not None:
        zero = Poly.zero(integral.alphabet)
        cert = GriffithsCertificate(zero, tuple(lambdas), zero, integral.Q)
    return OperatorPair(
        principal=principal,
        tail=tail,
        c_p=prefactor(integral.k, p),
        c_p_minus_1=prefactor(integral.k, p - 1),
        label=label,
        certificate=cert,
    )


def _certified(integral: ParametricIntegral, pair: OperatorPair) -> OperatorPair:
    from verify import certify

    pair.certificate = certify(integral, pair, search=False)
    return pair


def theorem1_system(integral: ParametricIntegral) -> List[OperatorPair]:
    """[Q_{a_i}(dz) dz_i - U(dz) - (a+q) dz_i U_{a_i}(dz)] F = 0 for every line i."""
    integral.require_regime()
    alphabet = integral.alphabet
    n, q, a = integral.n_lines, integral.q, integral.a
    u_op = operator_from_alpha_poly(integral, integral.U)
    pairs = []
    for i in range(n):
        dz_i = alphabet.n_s + i
        q_i = operator_from_alpha_poly(integral, integral.q_derivative(i))
        u_i = operator_from_alpha_poly(integral, integral.u_derivative(i))
        principal = q_i.times_derivative(dz_i)
        tail = -u_op - u_i.times_derivative(dz_i).scale(a + q)
        lambdas = [Poly.zero(alphabet)] * n
        lambdas[i] = integral.u_power(a + q).multiply_by_var(i).scale((-1) ** q)
        pair = _pair(integral, principal, tail, f"thm1 line {i + 1}", lambdas)
        pairs.append(_certified(integral, pair))
    return pairs


def eligible_pairs(integral: ParametricIntegral) -> List[Tuple[int, int]]:
    """1-based (i, j) with W_i nonzero and divisible by a_j."""
    ok, offending = check_property_p(integral.diagram, integral.basis)
    if not ok:
        raise DiagramError(f"property (P) fails for {[list(c) for c in offending]}")
    out = []
    for i, w in enumerate(integral.W):
        if w.is_zero():
            continue
        for j in range(integral.n_lines):
            if w.divisible_by_var(j):
                out.append((i + 1, j + 1))
    return out


def theorem2_system(
    integral: ParametricIntegral, statement_sign: bool = False
) -> List[OperatorPair]:
    """[Q_{a_j}(dz) ds_i + W_{i,a_j}(dz) - (a+q-1) U_{a_j}(dz) ds_i] F = 0.

    `statement_sign` flips the tail and skips certification; it exists to show
    that the flipped form fails.
    """
    integral.require_regime()
    alphabet = integral.alphabet
    n, q, a = integral.n_lines, integral.q, integral.a
    pairs = []
    for i, j in eligible_pairs(integral):
        i0, j0 = i - 1, j - 1
        w = integral.W[i0]
        q_j = operator_from_alpha_poly(integral, integral.q_derivative(j0))
        w_j = operator_from_alpha_poly(integral, w.partial_derivative(j0))
        u_j = operator_from_alpha_poly(integral, integral.u_derivative(j0))
        principal = q_j.times_derivative(i0)
        tail = w_j - u_j.times_derivative(i0).scale(a + q - 1)
        lambdas = [Poly.zero(alphabet)] * n
        lambdas[j0] = (w * integral.u_power(a + q - 1)).scale((-1) ** (q - 1))
        label = f"thm2 invariant {i} line {j}"
        if statement_sign:
            pairs.append(_pair(integral, principal, -tail, label))
        else:
            pair = _pair(integral, principal, tail, label, lambdas)
            pairs.append(_certified(integral, pair))
    return pairs


@dataclass(frozen=True)
class _Unknown:
    block: str  # "lambda", "b" or "a"
    key: Tuple


_BLOCK_ORDER = {"lambda": 0, "b": 1, "a": 2}


def _derivative_indices(width: int, order: int) -> List[DerivativeIndex]:
    return monomials_of_degree(width, order)


def _stratum_columns(integral: ParametricIntegral, order: int, dg: int, d: int):
    """Unknowns of one (s, z)-degree stratum.

    Lambdas and tail coefficients b have (s, z)-degree d, principal coefficients a
    have degree d+1.
    """
    alphabet = integral.alphabet
    n = alphabet.n_alpha
    width = alphabet.n_s + alphabet.n_z
    tail_dg = max(dg - 1, 0)
    lam_deg = integral.q * (integral.k + order) - n - integral.q + 1
    columns = []
    if d >= 0:
        for nu in range(n):
            for mono in lambda_ansatz(alphabet, nu, lam_deg, d, True):
                columns.append(_Unknown("lambda", (nu, mono)))
    if 0 <= d <= tail_dg:
        for index in _derivative_indices(width, order - 1):
            for m in monomials_of_degree(width, d):
                columns.append(_Unknown("b", (index, m)))
    if 0 <= d + 1 <= dg:
        for index in _derivative_indices(width, order):
            for m in monomials_of_degree(width, d + 1):
                columns.append(_Unknown("a", (index, m)))
    return columns


def _coefficient_monomial(alphabet: VarAlphabet, m: Exponents) -> Poly:
    return Poly.monomial(alphabet, (0,) * alphabet.n_alpha + tuple(m))


def _build_system(
    integral: ParametricIntegral, columns: List[_Unknown]
) -> SystemBuilder:
    alphabet = integral.alphabet
    cache = integral.image_cache
    builder = SystemBuilder()
    for col in columns:
        if col.block == "lambda":
            nu, mono = col.key
            builder.add_column(
                col,
                ("R", (-(mono * integral.q_derivative(nu))).items()),
                ("T", mono.partial_derivative(nu).items()),
            )
        else:
            index, m = col.key
            image = _image_of_derivative(integral, index, cache)
            image = image * _coefficient_monomial(alphabet, m)
            if col.block == "a":
                builder.add_column(col, ("R", image.items()))
            else:
                builder.add_column(col, ("T", (-image).items()))
    return builder


def _pair_from_vector(
    integral: ParametricIntegral,
    columns: List[_Unknown],
    vector: List[Fraction],
    label: str,
) -> Optional[OperatorPair]:
    alphabet = integral.alphabet
    n = alphabet.n_alpha
    if not any(v for col, v in zip(columns, vector) if col.block == "a"):
        return None
    lcm = 1
    for v in vector:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    g = 0
    for v in vector:
        g = gcd(g, int(v * lcm))
    scale = Fraction(lcm, g)
    lead = next(v for col, v in zip(columns, vector) if col.block == "a" and v)
    if lead < 0:
        scale = -scale

    principal: Dict = {}
    tail: Dict = {}
    lambdas = [Poly.zero(alphabet) for _ in range(n)]
    for col, v in zip(columns, vector):
        if not v:
            continue
        v = v * scale
        if col.block == "lambda":
            nu, mono = col.key
            lambdas[nu] = lambdas[nu] + mono.scale(v)
        else:
            index, m = col.key
            target = principal if col.block == "a" else tail
            term = _coefficient_monomial(alphabet, m).scale(v)
            target[index] = target.get(index, Poly.zero(alphabet)) + term
    return _pair(
        integral,
        DiffOperator(alphabet, principal),
        DiffOperator(alphabet, tail),
        label,
        lambdas,
    )


def derive_general(
    integral: ParametricIntegral,
    order: int,
    coeff_degree: int = 1,
    stratified: bool = True,
) -> List[OperatorPair]:
    """Certified pairs spanning the solutions of the undetermined-coefficient system.

    Principal coefficients have (s, z)-degree <= coeff_degree, tail coefficients
    <= max(coeff_degree - 1, 0). Kernel vectors without a principal part are
    dropped.
    """
    integral.require_regime()
    if order < 1 or coeff_degree < 0:
        raise ValueError("order must be >= 1 and coeff_degree >= 0")
    ok, offending = check_property_p(integral.diagram, integral.basis)
    if not ok:
        raise DiagramError(f"property (P) fails for {[list(c) for c in offending]}")

    strata = [
        _stratum_columns(integral, order, coeff_degree, d)
        for d in range(-1, coeff_degree + 1)
    ]
    if stratified:
        blocks = [cols for cols in strata if cols]
    else:
        blocks = [list(chain.from_iterable(strata))]

    pairs: List[OperatorPair] = []
    for columns in blocks:
        columns = sorted(columns, key=lambda c: _BLOCK_ORDER[c.block])
        builder = _build_system(integral, columns)
        for vector in builder.nullspace():
            pair = _pair_from_vector(
                integral, columns, vector, f"derive p={order} #{len(pairs) + 1}"
            )
            if pair is not None:
                pairs.append(_certified(integral, pair))
    return pairs


def _operator_vector(op: DiffOperator, keys: Dict) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for index, coeff in op.terms.items():
        for exps, c in coeff.items():
            col = keys.setdefault((index, exps), len(keys))
            out[col] = c
    return out


def principal_in_span(op: DiffOperator, pairs: Iterable[OperatorPair]) -> bool:
    """Whether the principal part of `op` is spanned by the pairs' principal parts."""
    keys: Dict = {}
    rows = [_operator_vector(p.principal, keys) for p in pairs]
    target = _operator_vector(op.principal_part(), keys)
    width = len(keys)
    base = RationalMatrix(len(rows), width, rows)
    extended = RationalMatrix(len(rows) + 1, width, rows + [target])
    return rank(base) == rank(extended)

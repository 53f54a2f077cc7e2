#!/usr/bin/env python3
"""
Symanzik Polynomials

U (complement monomials of spanning trees), W_chi (complement monomials of
spanning 2-trees separating chi from the other externals), the invariant basis
s_1..s_r and the denominator

    Q = sum over unordered partitions {chi, E - chi} of s(chi) W_chi - U * sum a_i z_i

with every s(chi) rewritten in the basis. Invariants are compared in Gram
coordinates g_jk = p_j . p_k of the external momenta other than a reference
vertex i0, whose momentum is eliminated by conservation.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from errors import DiagramError, RegimeError
from graph import (
    LADDER_BASIS,
    Diagram,
    EdgeSubset,
    external_subset,
    loop_number,
    separating_forests,
    spanning_trees,
)
from linalg import RationalMatrix, rank, solve
from polynomial import Poly, VarAlphabet

Chi = FrozenSet[int]


def n_invariants(d: Diagram) -> int:
    ne = len(d.externals)
    return ne * (ne - 1) // 2


def diagram_alphabet(d: Diagram) -> VarAlphabet:
    return VarAlphabet.for_diagram(d.n_lines, n_invariants(d))


def _complement_monomial(alphabet: VarAlphabet, subset: EdgeSubset, n_lines: int) -> Poly:
    exps = [0] * alphabet.size
    for i in range(n_lines):
        if i not in subset:
            exps[i] = 1
    return Poly.monomial(alphabet, exps)


def u_polynomial(d: Diagram, alphabet: Optional[VarAlphabet] = None) -> Poly:
    alphabet = alphabet or diagram_alphabet(d)
    terms = Poly.zero(alphabet)
    for tree in spanning_trees(d):
        terms = terms + _complement_monomial(alphabet, tree, d.n_lines)
    return terms


def w_polynomial(
    d: Diagram, chi: Iterable, alphabet: Optional[VarAlphabet] = None
) -> Poly:
    return _w(d, external_subset(d, chi), alphabet or diagram_alphabet(d))


def _w(d: Diagram, members: Chi, alphabet: VarAlphabet) -> Poly:
    terms = Poly.zero(alphabet)
    for forest in separating_forests(d, members):
        terms = terms + _complement_monomial(alphabet, forest, d.n_lines)
    return terms


def _label_key(name: str) -> Tuple:
    """Natural order on vertex labels, so that V10 sorts after V9."""
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name))


def _by_label(d: Diagram, indices: Iterable[int]) -> List[int]:
    return sorted(indices, key=lambda i: _label_key(d.vertices[i].name))


def reference_vertex(d: Diagram) -> int:
    """The highest-labelled external vertex i0."""
    if len(d.externals) < 2:
        raise DiagramError(f"{d.name} needs at least 2 external vertices")
    return _by_label(d, d.externals)[-1]


def _free_externals(d: Diagram) -> List[int]:
    i0 = reference_vertex(d)
    return [v for v in _by_label(d, d.externals) if v != i0]


def partition_representatives(d: Diagram) -> List[Chi]:
    """One chi per unordered partition {chi, E - chi}: the side without i0."""
    free = _free_externals(d)
    reps = []
    for size in range(1, len(free) + 1):
        reps.extend(frozenset(c) for c in combinations(free, size))
    return reps


def _gram_vector(d: Diagram, chi: Chi) -> List[Fraction]:
    i0 = reference_vertex(d)
    if i0 in chi:
        chi = frozenset(d.externals) - chi
    free = _free_externals(d)
    vec = []
    for j in range(len(free)):
        for k in range(j, len(free)):
            if free[j] in chi and free[k] in chi:
                vec.append(Fraction(1 if j == k else 2))
            else:
                vec.append(Fraction(0))
    return vec


@dataclass(frozen=True)
class InvariantBasis:
    """Basis subsets chi_1..chi_r and their Gram-coordinate rows."""

    subsets: Tuple[Chi, ...]
    names: Tuple[Tuple[str, ...], ...]
    gram_matrix: RationalMatrix
    reference_vertex: int
    externals: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.subsets)

    def position(self, chi: Chi) -> Optional[int]:
        """Index of chi or of its complement in the basis, if present."""
        other = frozenset(self.externals) - chi
        for i, s in enumerate(self.subsets):
            if s == chi or s == other:
                return i
        return None

    def __hash__(self) -> int:
        return hash((self.subsets, self.reference_vertex))

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvariantBasis):
            return NotImplemented
        return (self.subsets, self.reference_vertex) == (
            other.subsets,
            other.reference_vertex,
        )


def _names(d: Diagram, chi: Chi) -> Tuple[str, ...]:
    return tuple(d.vertices[i].name for i in sorted(chi))


def _make_basis(d: Diagram, subsets: Sequence[Chi]) -> InvariantBasis:
    r = n_invariants(d)
    if len(subsets) != r:
        raise DiagramError(f"basis needs {r} subsets, got {len(subsets)}")
    externals = frozenset(d.externals)
    seen = set()
    for chi in subsets:
        key = min(chi, externals - chi, key=lambda s: sorted(s))
        if key in seen:
            raise DiagramError(
                f"basis subset {list(_names(d, chi))} repeats another subset or its complement"
            )
        seen.add(key)
    gram = RationalMatrix.from_rows([_gram_vector(d, chi) for chi in subsets], r)
    if rank(gram) != r:
        raise DiagramError("basis invariants are linearly dependent")
    return InvariantBasis(
        subsets=tuple(subsets),
        names=tuple(_names(d, chi) for chi in subsets),
        gram_matrix=gram,
        reference_vertex=reference_vertex(d),
        externals=d.externals,
    )


def default_basis(d: Diagram) -> InvariantBasis:
    """Singletons then pairs of externals, leaving out the reference vertex."""
    free = _free_externals(d)
    subsets = [frozenset([v]) for v in free]
    subsets += [frozenset(p) for p in combinations(free, 2)]
    return _make_basis(d, subsets)


def custom_basis(d: Diagram, subsets: Iterable[Iterable]) -> InvariantBasis:
    return _make_basis(d, [external_subset(d, chi) for chi in subsets])


def ladder_basis(d: Diagram) -> InvariantBasis:
    if sorted(d.external_names) != ["1", "2", "3", "4"]:
        raise DiagramError(f"{d.name} is not a ladder: externals must be 1, 2, 3, 4")
    return custom_basis(d, LADDER_BASIS)


def basis_for(d: Diagram) -> InvariantBasis:
    """The basis a diagram file declares, or the default family."""
    if d.basis is not None:
        return custom_basis(d, d.basis)
    return default_basis(d)


def reduce_invariant(d: Diagram, chi: Iterable, basis: InvariantBasis) -> List[Fraction]:
    """Coefficients c with s(chi) = sum c_i s_i."""
    return _reduce(d, external_subset(d, chi), basis)


def _reduce(d: Diagram, members: Chi, basis: InvariantBasis) -> List[Fraction]:
    transpose = RationalMatrix.from_rows(
        [list(col) for col in zip(*basis.gram_matrix.to_rows())], basis.size
    )
    coeffs = solve(transpose, _gram_vector(d, members))
    if coeffs is None:
        raise DiagramError("invariant is outside the span of the basis")
    return coeffs


@dataclass(frozen=True)
class QPolynomial:
    poly: Poly
    degree_q: int


def _invariant_poly(alphabet: VarAlphabet, coeffs: Sequence[Fraction]) -> Poly:
    total = Poly.zero(alphabet)
    for i, c in enumerate(coeffs):
        if c:
            total = total + Poly.var(alphabet, alphabet.s(i)).scale(c)
    return total


def _mass_term(d: Diagram, alphabet: VarAlphabet) -> Poly:
    total = Poly.zero(alphabet)
    for i in range(d.n_lines):
        total = total + Poly.var(alphabet, i) * Poly.var(alphabet, alphabet.z(i))
    return total


def q_polynomial(d: Diagram, basis: InvariantBasis) -> QPolynomial:
    alphabet = diagram_alphabet(d)
    u = u_polynomial(d, alphabet)
    q = Poly.zero(alphabet)
    for chi in partition_representatives(d):
        w = _w(d, chi, alphabet)
        if w:
            q = q + _invariant_poly(alphabet, _reduce(d, chi, basis)) * w
    q = q - u * _mass_term(d, alphabet)
    return QPolynomial(q, loop_number(d) + 1)


def full_sum_q(d: Diagram, basis: InvariantBasis) -> Poly:
    """Half the sum over every non-empty proper chi, without pairing complements."""
    alphabet = diagram_alphabet(d)
    externals = list(d.externals)
    total = Poly.zero(alphabet)
    for size in range(1, len(externals)):
        for chi in combinations(externals, size):
            chi = frozenset(chi)
            w = _w(d, chi, alphabet)
            total = total + _invariant_poly(alphabet, _reduce(d, chi, basis)) * w
    return total.scale(Fraction(1, 2)) - u_polynomial(d, alphabet) * _mass_term(d, alphabet)


def check_property_p(
    d: Diagram, basis: Union[InvariantBasis, Iterable[Iterable]]
) -> Tuple[bool, List[Tuple[str, ...]]]:
    """Whether W vanishes for every chi outside the basis and its complements."""
    if isinstance(basis, InvariantBasis):
        covered = list(basis.subsets)
    else:
        covered = [external_subset(d, chi) for chi in basis]
    externals = frozenset(d.externals)
    covered_keys = set(covered) | {externals - c for c in covered}
    offending = []
    for chi in partition_representatives(d):
        if chi in covered_keys:
            continue
        if separating_forests(d, chi):
            offending.append(_names(d, chi))
    return not offending, offending


class ParametricIntegral:
    """Everything the PDE layer needs about one diagram in one basis.

    Holds U, the basis W_i, Q and the exponents of

        F = integral of U^a / Q^k over the simplex,  a = N - (D/2)(h+1),  k = N - (D/2)h.
    """

    def __init__(self, diagram: Diagram, basis: Optional[InvariantBasis] = None):
        if not diagram.is_connected():
            raise DiagramError(f"{diagram.name} is not connected")
        self.diagram = diagram
        self.basis = basis or basis_for(diagram)
        self.alphabet = diagram_alphabet(diagram)
        self.n_lines = diagram.n_lines
        self.h = loop_number(diagram)
        self.q = self.h + 1
        half_d = diagram.dimension // 2
        self.a = self.n_lines - half_d * (self.h + 1)
        self.k = self.n_lines - half_d * self.h
        self.U = u_polynomial(diagram, self.alphabet)
        self.W = [_w(diagram, chi, self.alphabet) for chi in self.basis.subsets]
        self.Q = q_polynomial(diagram, self.basis).poly
        self._powers: Dict[int, Poly] = {}
        self._q_derivatives: Dict[int, Poly] = {}
        self._u_derivatives: Dict[int, Poly] = {}
        self.image_cache: Dict = {}

    def require_regime(self):
        if self.n_lines < 2 or self.h < 1:
            raise RegimeError(
                f"{self.diagram.name}: need N >= 2 lines and at least one loop "
                f"(N={self.n_lines}, h={self.h})"
            )
        if self.a < 0 or self.k < 1:
            raise RegimeError(
                f"{self.diagram.name} at D={self.diagram.dimension}: U exponent "
                f"{self.a} and pole order {self.k} need a >= 0 and k >= 1"
            )

    def u_power(self, n: int) -> Poly:
        if n not in self._powers:
            self._powers[n] = self.U.power(n)
        return self._powers[n]

    def q_derivative(self, nu: int) -> Poly:
        if nu not in self._q_derivatives:
            self._q_derivatives[nu] = self.Q.partial_derivative(nu)
        return self._q_derivatives[nu]

    def u_derivative(self, nu: int) -> Poly:
        if nu not in self._u_derivatives:
            self._u_derivatives[nu] = self.U.partial_derivative(nu)
        return self._u_derivatives[nu]

    def s_var(self, i: int) -> Poly:
        return Poly.var(self.alphabet, self.alphabet.s(i))

    def z_var(self, j: int) -> Poly:
        return Poly.var(self.alphabet, self.alphabet.z(j))

    def alpha_var(self, j: int) -> Poly:
        return Poly.var(self.alphabet, j)

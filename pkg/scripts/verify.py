#!/usr/bin/env python3
"""
Certification of Operator Pairs

Symbolic side: a pair (D, D~) of orders p and p-1 annihilates

    F = integral over the simplex of U^a / Q^k

exactly when the substitution R of D and R~ of D~ satisfy

    R = sum lambda_v Q_{a_v},   a_v | lambda_v,   sum dlambda_v/da_v = R~.

The attached witness is re-expanded first; without one (or when it does not
hold) the joint linear system is solved from scratch.

Numeric side: Gauss-Legendre quadrature on the unit cube mapped onto the
simplex by stick breaking,

    a_1 = u_1,  a_j = u_j (1-u_1)...(1-u_{j-1}),  a_N = (1-u_1)...(1-u_{N-1}),

with Jacobian prod_{j=1}^{N-2} (1-u_j)^(N-1-j), and central finite differences
in (s, z) refined by Richardson extrapolation. Floats never reach the symbolic
layer.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from config import SETTINGS
from errors import CertificationError, FormatError, NumericError, PoleError
from pde import DiffOperator, OperatorPair, prefactor, substitute_operator
from polynomial import Poly
from reduction import GriffithsCertificate, ideal_membership
from symanzik import ParametricIntegral

MAX_GRID_POINTS = 2_000_000
CHUNK = 65_536


# symbolic certification


def _substitutions(
    integral: ParametricIntegral, pair: OperatorPair
) -> Tuple[Poly, Poly, int]:
    if pair.principal.is_zero():
        raise CertificationError("pair has no principal part", label=pair.label)
    try:
        principal = substitute_operator(pair.principal, integral)
        tail = substitute_operator(pair.tail, integral)
    except ValueError as e:
        message = f"{pair.label or 'pair'}: {e}"
        raise CertificationError(message, label=pair.label) from e
    p = principal.order
    if not pair.tail.is_zero() and tail.order != p - 1:
        raise CertificationError(
            f"tail has order {tail.order}, expected {p - 1}", label=pair.label
        )
    return principal.R, tail.R, p


def certify(
    integral: ParametricIntegral, pair: OperatorPair, search: bool = True
) -> GriffithsCertificate:
    """Certificate proving (D + D~) F = 0, or CertificationError with the residual.

    Only the operators are read; an attached certificate contributes nothing
    but its lambdas, which are checked like any other guess.
    """
    integral.require_regime()
    R, R_tail, p = _substitutions(integral, pair)
    Q = integral.Q

    attached = None
    if pair.certificate is not None:
        attached = GriffithsCertificate(R, tuple(pair.certificate.lambdas), R_tail, Q)
        if len(attached.lambdas) == integral.n_lines and attached.is_valid():
            return attached

    if search:
        degree = integral.q * p + integral.h * integral.a
        found = ideal_membership(R, Q, True, reduced_target=R_tail, alpha_degree=degree)
        if found is not None:
            return found
        principal_only = ideal_membership(R, Q, True, alpha_degree=degree)
        if principal_only is None:
            raise CertificationError(
                f"{pair.label or 'pair'}: principal part is outside the Jacobian ideal",
                residual=R,
                label=pair.label,
            )
        raise CertificationError(
            f"{pair.label or 'pair'}: tail does not match the reduced numerator",
            residual=R_tail - principal_only.reduced,
            label=pair.label,
        )

    if attached is None:
        raise CertificationError(
            f"{pair.label or 'pair'}: no certificate attached",
            residual=R,
            label=pair.label,
        )
    residuals = attached.residuals()
    residual = residuals["membership"]
    if residual.is_zero():
        residual = residuals["divergence"]
    if residual.is_zero():
        reason = "witness is not divisible"
    else:
        reason = "witness does not re-expand"
    raise CertificationError(
        f"{pair.label or 'pair'}: {reason}", residual=residual, label=pair.label
    )


def certificate_hash(cert: GriffithsCertificate) -> str:
    payload = {
        "target": cert.target_R.to_json(),
        "lambdas": [lam.to_json() for lam in cert.lambdas],
        "reduced": cert.reduced.to_json(),
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# numeric configuration


def _rational(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class EuclideanPoint:
    s: Tuple[Fraction, ...]
    z: Tuple[Fraction, ...]

    @classmethod
    def of(cls, s: Iterable, z: Iterable) -> "EuclideanPoint":
        return cls(tuple(_rational(v) for v in s), tuple(_rational(v) for v in z))

    def resolve(self, integral: ParametricIntegral) -> "EuclideanPoint":
        """Check the sizes against the diagram and put massless lines at z = 0."""
        alphabet = integral.alphabet
        if len(self.s) != alphabet.n_s:
            raise FormatError(
                f"expected {alphabet.n_s} values, got {len(self.s)}", field="s"
            )
        if len(self.z) != alphabet.n_z:
            raise FormatError(
                f"expected {alphabet.n_z} values, got {len(self.z)}", field="z"
            )
        lines = integral.diagram.lines
        z = tuple(v if lines[j].massive else Fraction(0) for j, v in enumerate(self.z))
        return EuclideanPoint(self.s, z)

    def coordinates(self) -> Tuple[Fraction, ...]:
        return self.s + self.z

    def to_json(self) -> Dict[str, List[str]]:
        return {"s": [str(v) for v in self.s], "z": [str(v) for v in self.z]}


@dataclass(frozen=True)
class NumericConfig:
    point: EuclideanPoint
    nodes: int = field(default_factory=lambda: SETTINGS.quad_nodes)
    fd_step: float = field(default_factory=lambda: SETTINGS.fd_step)
    richardson_levels: int = field(default_factory=lambda: SETTINGS.richardson_levels)
    pole_samples: int = field(default_factory=lambda: SETTINGS.pole_samples)
    pole_margin: float = field(default_factory=lambda: SETTINGS.pole_margin)

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError(f"need at least 2 quadrature nodes, got {self.nodes}")
        if not self.fd_step > 0:
            raise ValueError(
                f"finite-difference step must be positive, got {self.fd_step}"
            )
        if self.richardson_levels < 1:
            raise ValueError("need at least one Richardson level")
        if self.pole_samples < 1:
            raise ValueError("need at least one pole sample per edge")


# pole-free check


def _simplex_samples(n: int, samples: int) -> np.ndarray:
    """Lattice of step 1/samples plus every vertex, edge midpoint and the centroid."""
    points = []
    for bars in combinations(range(samples + n - 1), n - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(samples + n - 2 - prev)
        points.append([x / samples for x in parts])
    eye = np.eye(n)
    points.extend(eye)
    points.extend((eye[i] + eye[j]) / 2 for i in range(n) for j in range(i + 1, n))
    points.append(np.full(n, 1.0 / n))
    return np.asarray(points, dtype=float)


def pole_free_check(
    integral: ParametricIntegral,
    point: EuclideanPoint,
    samples: Optional[int] = None,
    margin: Optional[float] = None,
) -> bool:
    """True when Q keeps one strict sign on the sample lattice.

    The smallest |Q| must exceed `margin` times the largest.
    """
    samples = samples or SETTINGS.pole_samples
    margin = SETTINGS.pole_margin if margin is None else margin
    point = point.resolve(integral)
    compiled = _CompiledPoly(integral.Q)
    alphas = _simplex_samples(integral.n_lines, samples)
    monomials = _monomial_matrix(alphas, compiled.alpha_exps)
    values = compiled.values(monomials, _floats(point))
    largest = float(np.max(np.abs(values)))
    if largest == 0.0:
        return False
    if not (np.all(values > 0) or np.all(values < 0)):
        return False
    return float(np.min(np.abs(values))) > margin * largest


# quadrature


def _floats(point: EuclideanPoint) -> np.ndarray:
    return np.array([float(v) for v in point.coordinates()], dtype=float)


def _monomial_matrix(alphas: np.ndarray, exps: np.ndarray) -> np.ndarray:
    out = np.empty((alphas.shape[0], exps.shape[0]))
    for start in range(0, alphas.shape[0], CHUNK):
        block = alphas[start:start + CHUNK]
        powers = block[:, None, :] ** exps[None, :, :]
        out[start:start + CHUNK] = np.prod(powers, axis=2)
    return out


class _CompiledPoly:
    """A polynomial split into its Feynman-parameter and (s, z) monomials."""

    def __init__(self, poly: Poly):
        alphabet = poly.alphabet
        n = alphabet.n_alpha
        width = alphabet.size - n
        alpha_rows: Dict[Tuple[int, ...], int] = {}
        sz_cols: Dict[Tuple[int, ...], int] = {}
        entries = []
        for exps, c in poly.items():
            i = alpha_rows.setdefault(tuple(exps[:n]), len(alpha_rows))
            j = sz_cols.setdefault(tuple(exps[n:]), len(sz_cols))
            entries.append((i, j, float(c)))
        self.alpha_exps = np.array(list(alpha_rows), dtype=np.int64).reshape(-1, n)
        self.sz_exps = np.array(list(sz_cols), dtype=np.int64).reshape(-1, width)
        self.coeffs = np.zeros((len(alpha_rows), len(sz_cols)))
        for i, j, c in entries:
            self.coeffs[i, j] += c

    def at(self, sz: np.ndarray) -> np.ndarray:
        """Coefficient of every Feynman-parameter monomial at the point."""
        if not self.sz_exps.size:
            return self.coeffs.sum(axis=1)
        return self.coeffs @ np.prod(sz[None, :] ** self.sz_exps, axis=1)

    def values(self, monomials: np.ndarray, sz: np.ndarray) -> np.ndarray:
        if not self.coeffs.size:
            return np.zeros(monomials.shape[0])
        return monomials @ self.at(sz)


@dataclass
class _SimplexRule:
    alphas: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=8)
def _simplex_rule(n: int, nodes: int) -> _SimplexRule:
    dim = n - 1
    total = nodes ** dim
    if total > MAX_GRID_POINTS:
        raise NumericError(
            f"{nodes} nodes on a {dim}-dimensional simplex need {total} points "
            f"(limit {MAX_GRID_POINTS}); lower the node count"
        )
    x, w = leggauss(nodes)
    u_nodes = (x + 1.0) / 2.0
    u_weights = w / 2.0
    idx = np.stack(np.unravel_index(np.arange(total), (nodes,) * dim), axis=1)
    u = u_nodes[idx]
    weights = np.prod(u_weights[idx], axis=1)
    remaining = np.ones(total)
    columns = []
    for j in range(dim):
        columns.append(u[:, j] * remaining)
        remaining = remaining * (1.0 - u[:, j])
    columns.append(remaining)
    jacobian = np.ones(total)
    for j in range(dim - 1):
        jacobian *= (1.0 - u[:, j]) ** (dim - 1 - j)
    return _SimplexRule(np.stack(columns, axis=1), weights * jacobian)


class _Integrand:
    """numerator / Q^power on a fixed simplex rule, evaluated at (s, z) points."""

    def __init__(
        self, integral: ParametricIntegral, numerator: Poly, power: int, nodes: int
    ):
        self.rule = _simplex_rule(integral.n_lines, nodes)
        self.numerator = _CompiledPoly(numerator)
        self.denominator = _CompiledPoly(integral.Q)
        self.power = power
        alphas = self.rule.alphas
        self._num_monomials = _monomial_matrix(alphas, self.numerator.alpha_exps)
        self._den_monomials = _monomial_matrix(alphas, self.denominator.alpha_exps)

    def __call__(self, sz: np.ndarray) -> float:
        num = self.numerator.values(self._num_monomials, sz)
        den = self.denominator.values(self._den_monomials, sz)
        terms = self.rule.weights * num / den ** self.power
        chunks = range(0, terms.size, CHUNK)
        return math.fsum(float(np.sum(terms[i:i + CHUNK])) for i in chunks)


def _checked_point(integral: ParametricIntegral, cfg: NumericConfig) -> EuclideanPoint:
    integral.require_regime()
    point = cfg.point.resolve(integral)
    if not pole_free_check(integral, point, cfg.pole_samples, cfg.pole_margin):
        raise PoleError(
            "Q vanishes or changes sign on the simplex at "
            f"s={[str(v) for v in point.s]}, z={[str(v) for v in point.z]}"
        )
    return point


def evaluate_integral(
    integral: ParametricIntegral, cfg: NumericConfig
) -> Tuple[float, float]:
    """(F, |F(n nodes) - F(n/2 nodes)|) at the configured point."""
    point = _checked_point(integral, cfg)
    sz = _floats(point)
    numerator = integral.u_power(integral.a)
    fine = _Integrand(integral, numerator, integral.k, cfg.nodes)(sz)
    coarse = _Integrand(integral, numerator, integral.k, max(2, cfg.nodes // 2))(sz)
    return fine, abs(fine - coarse)


def evaluate_derivative(
    integral: ParametricIntegral, multi_index: Sequence[int], cfg: NumericConfig
) -> float:
    """d^I F by quadrature of (-1)^p c_p R / Q^(k+p), R the substituted derivative."""
    point = _checked_point(integral, cfg)
    multi_index = tuple(multi_index)
    p = sum(multi_index)
    if p == 0:
        f = _Integrand(integral, integral.u_power(integral.a), integral.k, cfg.nodes)
        return f(_floats(point))
    op = DiffOperator.derivative(integral.alphabet, multi_index)
    sub = substitute_operator(op, integral)
    value = _Integrand(integral, sub.R, integral.k + p, cfg.nodes)(_floats(point))
    return sub.sign * float(prefactor(integral.k, p)) * value


# finite differences


def _central_stencil(m: int, h: float) -> List[Tuple[float, float]]:
    """(offset, weight) pairs of the order-m central difference with step h."""
    return [
        ((k - m / 2) * h, (-1) ** (m - k) * math.comb(m, k) / h**m)
        for k in range(m + 1)
    ]


class _FunctionTable:
    def __init__(self, integral: ParametricIntegral, cfg: NumericConfig):
        numerator = integral.u_power(integral.a)
        self.f = _Integrand(integral, numerator, integral.k, cfg.nodes)
        self._values: Dict[Tuple[float, ...], float] = {}

    def __call__(self, x: Tuple[float, ...]) -> float:
        if x not in self._values:
            self._values[x] = self.f(np.array(x))
        return self._values[x]


def _stencil_value(
    table: _FunctionTable, x0: np.ndarray, index, steps: np.ndarray
) -> float:
    axes = [
        [(j, off, w) for off, w in _central_stencil(m, steps[j])]
        for j, m in enumerate(index)
        if m
    ]
    total = []
    for combo in product(*axes):
        x = x0.copy()
        weight = 1.0
        for j, off, w in combo:
            x[j] = x0[j] + off
            weight *= w
        total.append(weight * table(tuple(float(v) for v in x)))
    return math.fsum(total)


def _richardson(estimates: List[float]) -> float:
    table = [list(estimates)]
    for j in range(1, len(estimates)):
        factor = 4 ** j
        prev = table[-1]
        table.append(
            [
                (factor * prev[i + 1] - prev[i]) / (factor - 1)
                for i in range(len(prev) - 1)
            ]
        )
    return table[-1][-1]


def _fd_derivative(
    table: _FunctionTable, x0: np.ndarray, index, cfg: NumericConfig
) -> float:
    if not any(index):
        return table(tuple(float(v) for v in x0))
    base = cfg.fd_step * np.maximum(1.0, np.abs(x0))
    estimates = [
        _stencil_value(table, x0, index, base / 2 ** level)
        for level in range(cfg.richardson_levels)
    ]
    return _richardson(estimates)


def finite_difference(
    integral: ParametricIntegral, multi_index: Sequence[int], cfg: NumericConfig
) -> float:
    point = _checked_point(integral, cfg)
    table = _FunctionTable(integral, cfg)
    return _fd_derivative(table, _floats(point), tuple(multi_index), cfg)


def numeric_residual(
    integral: ParametricIntegral,
    pair: OperatorPair,
    cfg: NumericConfig,
    method: str = "fd",
) -> float:
    """|(D + D~) F| over the largest single term at the configured point.

    `method="fd"` differentiates quadrature values of F; `method="direct"`
    integrates every derivative of F on its own.
    """
    if method not in ("fd", "direct"):
        raise ValueError(f"unknown method {method!r}")
    point = _checked_point(integral, cfg)
    x0 = _floats(point)
    alphabet = integral.alphabet
    positions = range(alphabet.n_alpha, alphabet.size)
    assignment = dict(zip(positions, point.coordinates()))
    table = _FunctionTable(integral, cfg) if method == "fd" else None
    terms = []
    for index, coeff in pair.combined().items():
        c = float(coeff.evaluate(assignment))
        if c == 0.0:
            continue
        if table is not None:
            d = _fd_derivative(table, x0, index, cfg)
        else:
            d = evaluate_derivative(integral, index, cfg)
        terms.append(c * d)
    scale = max((abs(t) for t in terms), default=0.0)
    if scale == 0.0:
        return 0.0
    return abs(math.fsum(terms)) / scale


# batch verification


@dataclass
class PairResult:
    label: str
    ok: bool
    certificate_hash: Optional[str] = None
    message: str = ""
    residual: Optional[str] = None
    numeric_residual: Optional[float] = None

    def to_json(self) -> Dict:
        return {
            "label": self.label,
            "status": "ok" if self.ok else "failed",
            "certificate_hash": self.certificate_hash,
            "message": self.message,
            "residual": self.residual,
            "numeric_residual": self.numeric_residual,
        }


def verify_pairs(
    integral: ParametricIntegral,
    pairs: Sequence[OperatorPair],
    cfg: Optional[NumericConfig] = None,
    tolerance: Optional[float] = None,
) -> List[PairResult]:
    """Certify every pair and, with `cfg`, measure its numeric residual.

    Certification failures are collected rather than raised; PoleError and
    RegimeError still propagate.
    """
    tolerance = SETTINGS.residual_tol if tolerance is None else tolerance
    results = []
    for pair in pairs:
        try:
            cert = certify(integral, pair)
        except CertificationError as e:
            results.append(
                PairResult(
                    label=pair.label,
                    ok=False,
                    message=str(e),
                    residual=e.residual.render() if e.residual is not None else None,
                )
            )
            continue
        result = PairResult(
            label=pair.label, ok=True, certificate_hash=certificate_hash(cert)
        )
        if cfg is not None:
            result.numeric_residual = numeric_residual(integral, pair, cfg)
            if result.numeric_residual > tolerance:
                result.ok = False
                result.message = (
                    f"{pair.label}: numeric residual "
                    f"{result.numeric_residual:.3e} exceeds {tolerance:.0e}"
                )
        results.append(result)
    return results

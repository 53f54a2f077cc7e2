#!/usr/bin/env python3
"""
Griffiths Pole Reduction

A form R/Q^k ω whose numerator lies in the Jacobian ideal of Q,

    R = sum_v lambda_v dQ/da_v,

is an exact form plus (1/(k-1)) R~/Q^(k-1) ω with R~ = sum_v dlambda_v/da_v.
When every lambda_v vanishes on {a_v = 0} the exact part integrates to zero
over the simplex, so only R~ survives.

Membership is decided by exact linear algebra on coefficients. Q is homogeneous in
the (s, z) variables (degree 1 for a Feynman Q), so the (s, z)-degree d part of
the lambdas meets only the degree d+1 part of R and the degree d part of R~;
the system is solved one such stratum at a time.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from errors import CertificationError
from linalg import SystemBuilder
from polynomial import Poly, VarAlphabet, monomials_of_degree
from symanzik import QPolynomial


@dataclass(frozen=True)
class GriffithsCertificate:
    """Witness lambda_v for R = sum lambda_v Q_{a_v}, with R~ = sum dlambda_v/da_v."""

    target_R: Poly
    lambdas: Tuple[Poly, ...]
    reduced: Poly
    denominator: Poly = field(repr=False, default=None)

    def residuals(self) -> Dict[str, Poly]:
        """Polynomials that must all vanish for the certificate to be valid."""
        q = self.denominator
        combined = Poly.zero(self.target_R.alphabet)
        divergence = Poly.zero(self.target_R.alphabet)
        for nu, lam in enumerate(self.lambdas):
            combined = combined + lam * q.partial_derivative(nu)
            divergence = divergence + lam.partial_derivative(nu)
        return {
            "membership": self.target_R - combined,
            "divergence": self.reduced - divergence,
        }

    def stokes_vanishing(self) -> bool:
        return all(lam.divisible_by_var(nu) for nu, lam in enumerate(self.lambdas))

    def is_valid(self, require_divisibility: bool = True) -> bool:
        if require_divisibility and not self.stokes_vanishing():
            return False
        return all(r.is_zero() for r in self.residuals().values())


@dataclass(frozen=True)
class PoleForm:
    """numerator / Q^pole_order ω, projective when k q = deg numerator + N."""

    numerator: Poly
    pole_order: int
    denominator: QPolynomial

    def is_balanced(self) -> bool:
        deg = self.numerator.is_homogeneous("alpha")
        if deg is None:
            return self.numerator.is_zero()
        n = self.numerator.alphabet.n_alpha
        return self.pole_order * self.denominator.degree_q == deg + n


def _q_poly(q: Union[QPolynomial, Poly]) -> Tuple[Poly, int]:
    if isinstance(q, QPolynomial):
        return q.poly, q.degree_q
    degree = q.is_homogeneous("alpha")
    if degree is None:
        raise ValueError("Q must be homogeneous in the Feynman parameters")
    return q, degree


def _sz_strata(p: Optional[Poly]) -> Dict[int, Poly]:
    if p is None or p.is_zero():
        return {}
    alphabet = p.alphabet
    block = alphabet.block_range("sz")
    strata: Dict[int, Dict] = {}
    for exps, c in p.items():
        d = sum(exps[i] for i in block)
        strata.setdefault(d, {})[exps] = c
    return {d: Poly(alphabet, terms) for d, terms in strata.items()}


def lambda_ansatz(
    alphabet: VarAlphabet, nu: int, alpha_degree: int, sz_degree: int, divisible: bool
) -> List[Poly]:
    """Monomials a lambda_v of the given degrees may use, in canonical order."""
    if alpha_degree < 0 or (divisible and alpha_degree < 1):
        return []
    inner = alpha_degree - 1 if divisible else alpha_degree
    sz_size = alphabet.n_s + alphabet.n_z
    out = []
    for k in monomials_of_degree(alphabet.n_alpha, inner):
        base = list(k)
        if divisible:
            base[nu] += 1
        for m in monomials_of_degree(sz_size, sz_degree):
            out.append(Poly.monomial(alphabet, tuple(base) + m))
    return out


def _solve_stratum(
    q: Poly,
    derivatives: Sequence[Poly],
    alpha_degree: int,
    sz_degree: int,
    divisible: bool,
    target: Optional[Poly],
    reduced_target: Optional[Poly],
    joint: bool,
) -> Optional[List[Poly]]:
    alphabet = q.alphabet
    n = alphabet.n_alpha
    builder = SystemBuilder()
    basis: List[Tuple[int, Poly]] = []
    for nu in range(n):
        for mono in lambda_ansatz(alphabet, nu, alpha_degree, sz_degree, divisible):
            tagged = [("R", (mono * derivatives[nu]).items())]
            if joint:
                tagged.append(("T", mono.partial_derivative(nu).items()))
            builder.add_column((nu, mono), *tagged)
            basis.append((nu, mono))
    if target is not None:
        builder.set_rhs("R", target.items())
    if joint and reduced_target is not None:
        builder.set_rhs("T", reduced_target.items())
    solution = builder.solve()
    if solution is None:
        return None
    lambdas = [Poly.zero(alphabet) for _ in range(n)]
    for (nu, mono), value in zip(basis, solution):
        if value:
            lambdas[nu] = lambdas[nu] + mono.scale(value)
    return lambdas


def ideal_membership(
    R: Poly,
    Q: Union[QPolynomial, Poly],
    alpha_divisibility: bool,
    coeff_degree: Optional[int] = None,
    reduced_target: Optional[Poly] = None,
    alpha_degree: Optional[int] = None,
) -> Optional[GriffithsCertificate]:
    """Find lambda_v with R = sum lambda_v Q_{a_v}, or None.

    `coeff_degree` bounds the (s, z)-degree of the lambda coefficients; without
    it the degrees are read off R. With `reduced_target` the divergence
    sum dlambda_v/da_v must equal it as well. `alpha_degree` gives deg R when R
    is zero.
    """
    q, q_deg = _q_poly(Q)
    alphabet = q.alphabet
    if R.alphabet != alphabet:
        raise ValueError("R and Q use different alphabets")
    deg_r = R.is_homogeneous("alpha")
    if deg_r is None:
        if not R.is_zero():
            raise ValueError("R must be homogeneous in the Feynman parameters")
        deg_r = alpha_degree
    n = alphabet.n_alpha
    zero = Poly.zero(alphabet)
    if deg_r is None:
        if reduced_target is None or reduced_target.is_zero():
            return GriffithsCertificate(R, tuple([zero] * n), zero, q)
        t_deg = reduced_target.is_homogeneous("alpha")
        if t_deg is None:
            raise ValueError(
                "reduced target must be homogeneous in the Feynman parameters"
            )
        deg_r = t_deg + q_deg
    lam_deg = deg_r - q_deg + 1
    joint = reduced_target is not None

    shift = q.is_homogeneous("sz")
    if shift is None:
        raise ValueError("Q must be homogeneous in the (s, z) variables")
    r_strata = _sz_strata(R)
    t_strata = _sz_strata(reduced_target) if joint else {}
    needed = sorted({d - shift for d in r_strata} | set(t_strata))
    if needed and needed[0] < 0:
        return None
    if coeff_degree is not None and any(d > coeff_degree for d in needed):
        return None

    derivatives = [q.partial_derivative(nu) for nu in range(n)]
    lambdas = [zero for _ in range(n)]
    for d in needed:
        part = _solve_stratum(
            q,
            derivatives,
            lam_deg,
            d,
            alpha_divisibility,
            r_strata.get(d + shift),
            t_strata.get(d),
            joint,
        )
        if part is None:
            return None
        lambdas = [a + b for a, b in zip(lambdas, part)]

    divergence = zero
    for nu, lam in enumerate(lambdas):
        divergence = divergence + lam.partial_derivative(nu)
    return GriffithsCertificate(R, tuple(lambdas), divergence, q)


def check_certificate(
    cert: GriffithsCertificate, reduced_target: Optional[Poly] = None
) -> Dict[str, Poly]:
    """Re-expand a certificate; every returned polynomial is zero when it holds."""
    residuals = cert.residuals()
    if reduced_target is not None:
        residuals["reduced_target"] = reduced_target - cert.reduced
    return residuals


def griffiths_reduce(
    cert: GriffithsCertificate, k: int
) -> Tuple[Poly, int, Fraction]:
    """(R~, k - 1, 1/(k - 1)): the reduced numerator, its pole order and its scale."""
    if k < 2:
        raise ValueError(f"pole order {k} cannot be reduced")
    if not cert.is_valid(require_divisibility=False):
        raise CertificationError("certificate does not re-expand to its target")
    return cert.reduced, k - 1, Fraction(1, k - 1)


@dataclass
class DphiReport:
    """Exterior derivative of the reduction form against its closed form.

    For each m, `lhs[m]` is (k-1) Q^k times the coefficient of the form that
    omits da_m in d(phi), computed term by term; `rhs[m]` is the same
    coefficient predicted from R and R~.
    """

    sum_lambda_q: Poly
    divergence: Poly
    lhs: List[Poly]
    rhs: List[Poly]

    @property
    def mismatches(self) -> List[int]:
        return [m for m, (a, b) in enumerate(zip(self.lhs, self.rhs)) if a != b]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _omit_sign(m: int, missing: Tuple[int, ...]) -> int:
    """Sign of da_m ^ (da_0 ^ ... with `missing` left out) sorted into place."""
    before = sum(1 for i in range(m) if i not in missing)
    return -1 if before % 2 else 1


def expand_dphi(cert: GriffithsCertificate, k: int) -> DphiReport:
    """Differentiate phi = sum_{i<j} (-1)^(i+j) (a_i l_j - a_j l_i) / ((k-1) Q^(k-1))
    explicitly, with ω = sum_m (-1)^m a_m da_0 ^ .. (no da_m) .. ^ da_n, and compare
    with [R/Q^k - R~/((k-1) Q^(k-1))] ω using the certificate's own R and R~.
    """
    if k < 2:
        raise ValueError("expand_dphi needs k >= 2")
    q = cert.denominator
    lambdas = cert.lambdas
    alphabet = q.alphabet
    n = alphabet.n_alpha
    lam_deg = {lam.is_homogeneous("alpha") for lam in lambdas if lam}
    q_deg = q.is_homogeneous("alpha")
    if len(lam_deg) > 1:
        raise ValueError("lambdas have mixed degrees")
    if lam_deg and (k - 1) * q_deg != lam_deg.pop() + n - 1:
        raise ValueError("pole order does not balance the degrees of the form")

    alpha = [Poly.var(alphabet, i) for i in range(n)]
    dq = [q.partial_derivative(i) for i in range(n)]
    lhs = [Poly.zero(alphabet) for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            f = alpha[i] * lambdas[j] - alpha[j] * lambdas[i]
            if f.is_zero():
                continue
            sign = -1 if (i + j) % 2 else 1
            # (k-1) Q^k d/da_l (f Q^(1-k) / (k-1)) = Q f_l + (1-k) f Q_l
            for l, m in ((i, j), (j, i)):
                part = q * f.partial_derivative(l) + f.scale(1 - k) * dq[l]
                lhs[m] = lhs[m] + part.scale(sign * _omit_sign(l, (i, j)))

    sum_lambda_q = Poly.zero(alphabet)
    divergence = Poly.zero(alphabet)
    for nu, lam in enumerate(lambdas):
        sum_lambda_q = sum_lambda_q + lam * dq[nu]
        divergence = divergence + lam.partial_derivative(nu)
    inner = cert.target_R.scale(k - 1) - q * cert.reduced
    rhs = [
        (alpha[m] * inner).scale(-1 if m % 2 else 1) for m in range(n)
    ]
    return DphiReport(sum_lambda_q, divergence, lhs, rhs)


def macaulay_threshold(degrees: Sequence[int], n: int) -> int:
    return sum(degrees) - n


def macaulay_applies(R: Poly, Q: Union[QPolynomial, Poly]) -> bool:
    """Whether deg R reaches the threshold of the Jacobian degrees of Q."""
    q, q_deg = _q_poly(Q)
    n_vars = q.alphabet.n_alpha
    deg_r = R.is_homogeneous("alpha")
    if deg_r is None:
        return False
    return deg_r >= macaulay_threshold([q_deg - 1] * n_vars, n_vars - 1)

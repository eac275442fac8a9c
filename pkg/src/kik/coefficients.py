"""
Mitigation coefficients a_0..a_M.

The mitigated estimate is ``sum_m a_m <A>_m`` over folds ``K (K_I K)^m``.
All sets approximate ``lambda^(-1/2)`` by ``sum_m a_m lambda^m`` under the
constraint ``sum_m a_m = 1``:

* Taylor: expansion around ``lambda = 1``;
* adaptive: L2-optimal on ``[g, 1]``, closed form for M <= 3 and a general
  least-squares solver for any M.
"""
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
import sympy
from scipy.linalg import qr, solve_triangular
from scipy.special import betainc, betaln, comb, gammaln

from kik.errors import IllConditionedSystem, InvalidSpec, OrderTooLarge, OutOfRangeG, UnsupportedOrder
from kik.settings import settings

logger = logging.getLogger(__name__)

TAYLOR = "taylor"
ADAPTIVE_CLOSED_FORM = "adaptive_closed_form"
ADAPTIVE_LS = "adaptive_ls"

MAX_TAYLOR_ORDER = 20
MAX_EXACT_TAYLOR_ORDER = 10
MAX_LS_ORDER = 12
# series terms kept beyond M in the weak-noise least-squares path
_SERIES_TAIL = 200


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    order: int
    values: np.ndarray
    g: float
    kind: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.order + 1,):
            raise InvalidSpec("order {} needs {} coefficients, got {}".format(self.order, self.order + 1, values.shape))
        if abs(values.sum() - 1.0) > 1e-9:
            raise InvalidSpec("coefficients sum to {!r}, not 1".format(values.sum()))
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.order + 1

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, m):
        return self.values[m]

    def __repr__(self):
        return "CoefficientSet(M={}, kind={}, g={:.6g}, values={})".format(
            self.order, self.kind, self.g, np.array2string(self.values, precision=6))


class GChoice:
    """
    Lower edge of the fitted eigenvalue interval as a function of survival mu.

    ``"1"`` gives Taylor, ``"mu"`` and ``"mu^p"`` give ``g = mu ** p``.
    """
    _PATTERN = re.compile(r"^mu(\^(?P<p>[0-9]*\.?[0-9]+))?$")

    def __init__(self, power: float = 0.0):
        if power < 0:
            raise InvalidSpec("g exponent must be non-negative, got {}".format(power))
        self._power = float(power)

    @classmethod
    def parse(cls, text) -> "GChoice":
        if isinstance(text, GChoice):
            return text
        text = str(text).strip().replace(" ", "").lower()
        if text in ("1", "one", "taylor"):
            return cls(0.0)
        match = cls._PATTERN.match(text)
        if match is None:
            raise InvalidSpec("cannot parse g choice {!r}; use '1', 'mu' or 'mu^p'".format(text))
        return cls(float(match.group("p") or 1.0))

    @property
    def power(self) -> float:
        return self._power

    @property
    def needs_mu(self) -> bool:
        return self._power > 0

    @property
    def label(self) -> str:
        if self._power == 0:
            return "1"
        if self._power == 1:
            return "mu"
        return "mu^{:g}".format(self._power)

    def evaluate(self, mu: Optional[float] = None) -> float:
        if self._power == 0:
            return 1.0
        if mu is None:
            raise InvalidSpec("g = {} needs the survival probability".format(self.label))
        return float(np.clip(mu, 0.0, 1.0) ** self._power)

    def __eq__(self, other):
        return isinstance(other, GChoice) and other.power == self.power

    def __hash__(self):
        return hash(self._power)

    def __repr__(self):
        return "GChoice({!r})".format(self.label)


@lru_cache(maxsize=None)
def _taylor_values(M: int):
    if M <= MAX_EXACT_TAYLOR_ORDER:
        head = sympy.factorial2(2 * M + 1) / sympy.Integer(2) ** M
        exact = [(-1) ** m * head / ((2 * m + 1) * sympy.factorial(m) * sympy.factorial(M - m))
                 for m in range(M + 1)]
        return tuple(float(a) for a in exact)
    # (2M+1)!! = (2M+1)! / (2^M M!)
    log_head = gammaln(2 * M + 2) - gammaln(M + 1) - 2 * M * np.log(2.0)
    m = np.arange(M + 1)
    log_a = log_head - np.log(2 * m + 1) - gammaln(m + 1) - gammaln(M - m + 1)
    return tuple((-1.0) ** m * np.exp(log_a))


def taylor_coefficients(M: int) -> CoefficientSet:
    if M < 0:
        raise InvalidSpec("order must be non-negative, got {}".format(M))
    if M > MAX_TAYLOR_ORDER:
        raise OrderTooLarge("Taylor order {} exceeds {}".format(M, MAX_TAYLOR_ORDER))
    return CoefficientSet(M, np.array(_taylor_values(M)), 1.0, TAYLOR)


def _check_g(g: float, upper_open: bool = False):
    if not 0.0 <= g <= 1.0 or (upper_open and g >= 1.0):
        raise OutOfRangeG("g = {} outside [0, 1{}".format(g, ")" if upper_open else "]"))


def adaptive_coefficients(M: int, g: float) -> CoefficientSet:
    """Closed-form L2-optimal coefficients on [g, 1] for M = 1, 2, 3."""
    _check_g(g)
    s = np.sqrt(g)
    q = 1.0 + s
    if M == 1:
        a = [1.0 + 1.0 / q ** 3 + 1.5 / q ** 2,
             -(5.0 + 3.0 * s) / (2.0 * q ** 3)]
    elif M == 2:
        a = [1.0 + 16.0 / (3.0 * q ** 5) - 14.0 / (3.0 * q ** 4) + 4.0 / q ** 2,
             -4.0 * (10.0 + 8.0 * s + 9.0 * g + 3.0 * g * s) / (3.0 * q ** 5),
             2.0 * (13.0 + 5.0 * s) / (3.0 * q ** 5)]
    elif M == 3:
        den = 4.0 * q ** 7
        a = [(31.0 + 97.0 * s + 276.0 * g + 300.0 * g * s + 270.0 * g ** 2 + 114.0 * g ** 2 * s
              + 28.0 * g ** 3 + 4.0 * g ** 3 * s) / den,
             -5.0 * (29.0 + 35.0 * s + 84.0 * g + 44.0 * g * s + 26.0 * g ** 2 + 6.0 * g ** 2 * s) / den,
             3.0 * (81.0 + 47.0 * s + 76.0 * g + 20.0 * g * s) / den,
             -5.0 * (25.0 + 7.0 * s) / den]
    else:
        raise UnsupportedOrder("closed-form adaptive coefficients exist for M = 1, 2, 3, not {}".format(M))
    a = np.array(a)
    a[-1] = 1.0 - a[:-1].sum()
    return CoefficientSet(M, a, float(g), ADAPTIVE_CLOSED_FORM)


def _shifted_gram(M: int) -> np.ndarray:
    j = np.arange(1, M + 1)
    return 1.0 / (j[:, None] + j[None, :] + 1.0)


def _central_binomials(n: int) -> np.ndarray:
    """C(2k, k) / 4^k for k = 0..n, the Taylor coefficients of (1 - x)^(-1/2)."""
    coef = np.ones(n + 1)
    for k in range(1, n + 1):
        coef[k] = coef[k - 1] * (2 * k - 1) / (2 * k)
    return coef


def _shifted_least_squares(M: int, h: float, gram: np.ndarray) -> np.ndarray:
    """
    Coefficients c_k of p(lambda) = 1 + sum_k c_k (lambda - 1)^k, k = 1..M.

    With lambda = 1 - h t the problem becomes a fit on t in [0, 1] whose
    normal matrix is 1/(j+k+1) for every h.
    """
    k = np.arange(1, M + 1)
    if h <= 0.5:
        # d = sum_n coef_n h^n G^-1 v_n, and G^-1 v_n = e_n for n <= M
        n_max = M + _SERIES_TAIL
        coef = _central_binomials(n_max)
        tail = np.arange(M + 1, n_max + 1)
        columns = 1.0 / (k[:, None] + tail[None, :] + 1.0)
        solved = np.linalg.solve(gram, columns)
        powers = np.power(h, tail[None, :] - k[:, None])
        correction = (solved * powers * coef[tail][None, :]).sum(axis=1)
        return (-1.0) ** k * (coef[k] + correction)
    # int_0^1 t^j (1 - h t)^(-1/2) dt - 1/(j+1)
    rhs = np.exp(betaln(k + 1.0, 0.5) - (k + 1.0) * np.log(h)) * betainc(k + 1.0, 0.5, h) - 1.0 / (k + 1.0)
    Q, R, P = qr(gram, pivoting=True)
    d = np.empty(M)
    d[P] = solve_triangular(R, Q.T @ rhs)
    return d / (-h) ** k


def adaptive_coefficients_ls(M: int, g: float) -> CoefficientSet:
    """
    L2-optimal normalized coefficients on [g, 1] for any order up to 12.

    Solved in the shifted variable so that the system stays well posed as
    ``g -> 1``; agrees with the closed forms for M <= 3.
    """
    if M < 1:
        raise InvalidSpec("least-squares coefficients need M >= 1, got {}".format(M))
    if M > MAX_LS_ORDER:
        raise OrderTooLarge("least-squares order {} exceeds {}".format(M, MAX_LS_ORDER))
    _check_g(g, upper_open=True)
    gram = _shifted_gram(M)
    cond = np.linalg.cond(gram)
    logger.debug("least-squares system M=%d: condition number %.3e", M, cond)
    if cond > settings.cond_limit:
        raise IllConditionedSystem("least-squares system for M={} has condition number {:.3e}".format(M, cond))
    c = _shifted_least_squares(M, 1.0 - g, gram)

    # expand 1 + sum_k c_k (lambda - 1)^k in monomials
    a = np.zeros(M + 1)
    a[0] = 1.0
    for k_, ck in enumerate(c, start=1):
        for m in range(k_ + 1):
            a[m] += ck * comb(k_, m, exact=True) * (-1.0) ** (k_ - m)
    a[-1] = 1.0 - a[:-1].sum()
    return CoefficientSet(M, a, float(g), ADAPTIVE_LS)


def select_coefficients(M: int, g_value: float, kind: str = "auto") -> CoefficientSet:
    """
    ``kind`` is ``taylor``, ``closed_form``, ``ls`` or ``auto``; ``auto`` uses
    Taylor at g = 1, the closed form for M <= 3 and least squares beyond.
    """
    if kind == TAYLOR or M == 0:
        return taylor_coefficients(M)
    _check_g(g_value)
    if kind == "auto":
        if g_value >= 1.0:
            return taylor_coefficients(M)
        kind = "closed_form" if M <= 3 else "ls"
    if kind == "closed_form":
        return adaptive_coefficients(M, g_value)
    if kind == "ls":
        if g_value >= 1.0:
            return taylor_coefficients(M)
        return adaptive_coefficients_ls(M, g_value)
    raise InvalidSpec("unknown coefficient kind {!r}".format(kind))


def _gram(M: int, g: float) -> np.ndarray:
    s = np.arange(M + 1)[:, None] + np.arange(M + 1)[None, :] + 1.0
    return (1.0 - g ** s) / s


def _moments(M: int, g: float) -> np.ndarray:
    s = np.arange(M + 1) + 0.5
    return (1.0 - g ** s) / s


def l2_error(coeffs: CoefficientSet, g: Optional[float] = None) -> float:
    """int_g^1 (sum_m a_m lambda^m - lambda^(-1/2))^2 d lambda; ``g`` defaults to the set's own."""
    g = coeffs.g if g is None else g
    if not 0.0 < g <= 1.0:
        raise OutOfRangeG("L2 error needs g in (0, 1], got {}".format(g))
    if g == 1.0:
        return 0.0
    a = coeffs.values
    M = coeffs.order
    return float(a @ _gram(M, g) @ a - 2.0 * a @ _moments(M, g) - np.log(g))


def richardson_weights(M: int, lambda0: float) -> np.ndarray:
    """Lagrange weights extrapolating to zero noise from scales (2k+1) lambda0."""
    if M < 1:
        raise InvalidSpec("Richardson weights need M >= 1, got {}".format(M))
    if not lambda0 > 0:
        raise InvalidSpec("lambda0 must be positive, got {}".format(lambda0))
    scales = (2.0 * np.arange(M + 1) + 1.0) * lambda0
    weights = np.empty(M + 1)
    for m in range(M + 1):
        others = np.delete(scales, m)
        weights[m] = np.prod(others / (others - scales[m]))
    return weights


def sampling_overhead(coeffs: CoefficientSet) -> float:
    return float(np.abs(coeffs.values).sum())


def hessian_check(M: int, g: float) -> float:
    """Smallest eigenvalue of the L2-error Hessian in the free coefficients a_0..a_{M-1}."""
    if M not in (1, 2, 3):
        raise UnsupportedOrder("Hessian check covers M = 1, 2, 3, not {}".format(M))
    _check_g(g)
    hessian = 2.0 * _gram(M, g)[:M, :M]
    return float(np.linalg.eigvalsh(hessian)[0])


def polynomial_residual(coeffs, lam) -> np.ndarray:
    """|1 - sum_m a_m lambda^(m+1/2)|, the relative error of the fold polynomial at eigenvalue lambda."""
    values = coeffs.values if isinstance(coeffs, CoefficientSet) else np.asarray(coeffs, dtype=float)
    lam = np.asarray(lam, dtype=float)
    powers = np.power.outer(lam, np.arange(len(values)) + 0.5)
    return np.abs(1.0 - powers @ values)


"""Fixed-point solution and closed-form predictions for the loose core.

Everything here is a pure function of ``(r, d)``.  Quantities that are tiny
just above the threshold ``d* = 1/(r-1)`` are evaluated through
``log1p``/``expm1`` and regularised incomplete gamma/beta functions so that
their relative accuracy survives the cancellation in the textbook forms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special, stats

from .errors import DomainError, InvalidParams, NoConvergence

DEFAULT_TOL = 1e-12
POISSON_TAIL = 1e-13
_MAX_BISECT = 4000


def d_star(r: int) -> float:
    return 1.0 / (r - 1)


def _check(r: int, d: float) -> None:
    if r < 2:
        raise InvalidParams(f"r must be >= 2, got {r}")
    if not (d > 0 and math.isfinite(d)):
        raise InvalidParams(f"d must be a positive finite number, got {d}")


def supercritical(r: int, d: float) -> bool:
    return d * (r - 1) > 1


def _one_minus_pow(x: float, k: int) -> float:
    """``1 - (1 - x)**k`` without cancellation for small x."""
    if x >= 1:
        return 1.0
    return -math.expm1(k * math.log1p(-x))


def F_eval(x: float, r: int, d: float) -> float:
    """``exp(-d (1 - x^(r-1)))`` on ``[0, 1]``."""
    if not 0 <= x <= 1:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return math.exp(-d * (1 - x ** (r - 1)))


def fixed_point_residual(x: float, r: int, d: float) -> float:
    """``log x + d (1 - x^(r-1))``; zero exactly at solutions ``x = 1 - rho``."""
    if x <= 0:
        return -math.inf
    return math.log(x) + d * (1 - x ** (r - 1))


def _residual_in_rho(rho: float, r: int, d: float) -> float:
    # same function as fixed_point_residual(1 - rho) but accurate for small rho
    return math.log1p(-rho) + d * _one_minus_pow(rho, r - 1)


@dataclass(frozen=True)
class FixedPoint:
    rho: float
    iterations: int
    residual: float
    derivative: float


def _bisect(r: int, d: float, tol: float) -> FixedPoint:
    # f(x) < 0 on (0, x*) and f(x) > 0 on (x*, 1).  Bisect in whichever of
    # x = 1 - rho or rho is the smaller number, so the bracket keeps full
    # relative precision at both ends of the range of d.
    if fixed_point_residual(0.5, r, d) >= 0:
        h = lambda x: fixed_point_residual(x, r, d)  # noqa: E731
        lo = 0.25
        while h(lo) >= 0:
            lo /= 2
            if lo == 0:
                raise NoConvergence("failed to bracket the root from below")
        hi = 0.5
        to_rho = lambda x: 1 - x  # noqa: E731
        to_x = lambda x: x  # noqa: E731
    else:
        # as a function of rho the sign pattern flips, hence the minus
        h = lambda rho: -_residual_in_rho(rho, r, d)  # noqa: E731
        hi = 0.5
        lo = 0.25
        while h(lo) >= 0:
            lo /= 2
            if lo < 1e-300:
                # root indistinguishable from 0 in double precision
                return FixedPoint(0.0, 0, 0.0, math.nan)
        to_rho = lambda rho: rho  # noqa: E731
        to_x = lambda rho: 1 - rho  # noqa: E731
    # invariant: h(lo) < 0 <= h(hi)
    it = 0
    while it < _MAX_BISECT:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi and not hi < mid < lo:
            break
        if h(mid) < 0:
            lo = mid
        else:
            hi = mid
        it += 1
    else:
        raise NoConvergence(f"bisection did not converge in {_MAX_BISECT} steps")
    best = lo if abs(h(lo)) <= abs(h(hi)) else hi
    rho = to_rho(best)
    res = abs(h(best))
    if res >= tol:
        raise NoConvergence(f"|f| = {res:.3g} >= tol = {tol:.3g} at the root")
    # 1 - rho can round to 0 for large d, so take x from the bisection variable
    x = to_x(best)
    deriv = 1 / x - d * (r - 1) * x ** (r - 2)
    if not deriv > 0:
        raise NoConvergence(f"f'(x) = {deriv:.3g} is not positive at the root")
    return FixedPoint(rho, it, res, deriv)


def solve_fixed_point_detail(r: int, d: float, tol: float = DEFAULT_TOL) -> FixedPoint:
    _check(r, d)
    if not tol > 0:
        raise InvalidParams("tol must be > 0")
    if not supercritical(r, d):
        return FixedPoint(0.0, 0, 0.0, math.nan)
    return _bisect(r, d, tol)


def solve_fixed_point(r: int, d: float, tol: float = DEFAULT_TOL) -> float:
    """Largest solution rho* of ``1 - rho = F(1 - rho)``.

    Returns exactly 0 for ``d <= 1/(r-1)`` (the boundary itself included by
    convention).  Above the threshold the positive root is found by bisection.
    """
    return solve_fixed_point_detail(r, d, tol).rho


@dataclass(frozen=True)
class AnalyticParams:
    r: int
    d: float
    d_star: float
    rho_star: float
    rho_hat_star: float
    eta: float
    alpha: float
    beta: float
    gamma: float
    tol: float
    iterations: int
    at_threshold: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def lam(self) -> float:
        """Poisson rate ``d * rho_hat`` of core degrees."""
        return self.d * self.rho_hat_star


def derived_params(r: int, d: float, tol: float = DEFAULT_TOL) -> AnalyticParams:
    fp = solve_fixed_point_detail(r, d, tol)
    rho = fp.rho
    at_threshold = d * (r - 1) == 1
    if rho == 0:
        return AnalyticParams(r, d, d_star(r), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, tol, 0, at_threshold)
    rho_hat = _one_minus_pow(rho, r - 1)
    eta = 1 - (r - 1) * rho * (1 - rho) ** (r - 2) / rho_hat
    alpha = rho * (1 - d * (r - 1) * (1 - rho) ** (r - 1))
    # (d/r) P(Bi(r, rho) >= 2) and P(Po(d rho_hat) >= 2)
    beta = d / r * float(special.betainc(2, r - 1, rho))
    gamma = float(special.gammainc(2, d * rho_hat))
    return AnalyticParams(
        r, d, d_star(r), rho, rho_hat, eta, alpha, beta, gamma, tol, fp.iterations, at_threshold
    )


# ----------------------------------------------------------------- laws


def _check_prob(x: float) -> None:
    if not 0 <= x <= 1:
        raise DomainError(f"probability must lie in [0, 1], got {x}")


def poisson_pmf(lam: float, j: int) -> float:
    if lam < 0:
        raise DomainError(f"rate must be >= 0, got {lam}")
    if j < 0:
        raise DomainError(f"degree must be >= 0, got {j}")
    if lam == 0:
        return 1.0 if j == 0 else 0.0
    return float(stats.poisson.pmf(j, lam))


def po_tilde_pmf(lam: float, j: int) -> float:
    """Poisson law with the mass at 1 moved to 0."""
    if j == 1:
        if lam < 0:
            raise DomainError(f"rate must be >= 0, got {lam}")
        return 0.0
    if j == 0:
        return poisson_pmf(lam, 0) + poisson_pmf(lam, 1)
    return poisson_pmf(lam, j)


def bi_tilde_pmf(trials: int, prob: float, j: int) -> float:
    """Binomial law with the mass at 1 moved to 0."""
    _check_prob(prob)
    if trials < 0 or j < 0:
        raise DomainError("trials and degree must be >= 0")
    if j == 1:
        return 0.0
    if j == 0:
        return float(stats.binom.pmf(0, trials, prob) + stats.binom.pmf(1, trials, prob))
    return float(stats.binom.pmf(j, trials, prob))


def z_pmf_from(params: AnalyticParams, j: int) -> float:
    if j < 0:
        raise DomainError(f"degree must be >= 0, got {j}")
    lam = params.lam
    if j >= 2:
        return poisson_pmf(lam, j)
    if j == 1:
        return params.eta * poisson_pmf(lam, 1)
    return poisson_pmf(lam, 0) + (1 - params.eta) * poisson_pmf(lam, 1)


def z_pmf(r: int, d: float, j: int, tol: float = DEFAULT_TOL) -> float:
    """Limiting proportion of vertices with loose-core degree j."""
    return z_pmf_from(derived_params(r, d, tol), j)


def poisson_cutoff(lam: float, tail: float = POISSON_TAIL) -> int:
    """Smallest J with ``P(Po(lam) > J) < tail``."""
    if lam <= 0:
        return 0
    j = int(lam)
    while stats.poisson.sf(j, lam) >= tail:
        j += 1
    return j


def folded_pmf(pmf, max_degree: int) -> np.ndarray:
    """``[pmf(0), ..., pmf(J), tail]`` with the tail mass put in the last slot."""
    head = np.array([pmf(j) for j in range(max_degree + 1)])
    return np.append(head, max(0.0, 1.0 - head.sum()))


def predicted_histograms(params: AnalyticParams, max_degree: int) -> dict[str, np.ndarray]:
    """Folded reference laws for the variable, factor and loose-core degrees."""
    return {
        "zeta": folded_pmf(lambda j: po_tilde_pmf(params.lam, j), max_degree),
        "zeta_hat": folded_pmf(
            lambda j: bi_tilde_pmf(params.r, params.rho_star, j) if j <= params.r else 0.0,
            max_degree,
        ),
        "mu": folded_pmf(lambda j: z_pmf_from(params, j), max_degree),
    }


# ------------------------------------------------------------ recursions


@dataclass(frozen=True)
class SurvivalPair:
    t: int
    p: float
    q: float


def survival_recursion(r: int, d: float, t_max: int) -> list[SurvivalPair]:
    """Survival probabilities of internal variable (p) and factor (q) nodes.

    ``p_0 = 1``, ``q_t = P(Bi(r-1, p_{t-1}) >= 1)``, ``p_t = P(Po(d q_t) >= 1)``.
    ``q_0`` is undefined and reported as ``nan``.
    """
    _check(r, d)
    if t_max < 0:
        raise InvalidParams("t_max must be >= 0")
    out = [SurvivalPair(0, 1.0, math.nan)]
    p = 1.0
    for t in range(1, t_max + 1):
        q = _one_minus_pow(p, r - 1)
        p = -math.expm1(-d * q)
        out.append(SurvivalPair(t, p, q))
    return out


# ---------------------------------------------------- cycle-length bounds


def cycle_bound_coeff(r: int, d: float, tol: float = DEFAULT_TOL) -> tuple[float, str]:
    """``min(beta, gamma)`` and the name of the smaller one (``"beta"`` on ties)."""
    params = derived_params(r, d, tol)
    if params.gamma < params.beta:
        return params.gamma, "gamma"
    return params.beta, "beta"


@dataclass(frozen=True)
class Expansion:
    r: int
    eps: float
    d: float
    leading: float
    gamma: float
    ratio: float
    rho: float
    rho_leading: float
    lower_display: float


def supercritical_expansion(r: int, eps: float, tol: float = DEFAULT_TOL) -> Expansion:
    """Leading term ``2 eps^2 / (r-1)^2`` against gamma at ``d = (1+eps)/(r-1)``.

    ``lower_display`` is ``eps^2 / (4 (r-1)^2)``, the quoted lower bound, for
    tables only.
    """
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if r < 2:
        raise InvalidParams(f"r must be >= 2, got {r}")
    d = (1 + eps) / (r - 1)
    params = derived_params(r, d, tol)
    leading = 2 * eps**2 / (r - 1) ** 2
    rho_leading = 2 * eps / (r - 1)
    return Expansion(
        r=r,
        eps=eps,
        d=d,
        leading=leading,
        gamma=params.gamma,
        ratio=params.gamma / leading,
        rho=params.rho_star,
        rho_leading=rho_leading,
        lower_display=eps**2 / (4 * (r - 1) ** 2),
    )

"""Closed-form quantities for bootstrap percolation on H_k(n, p).

Scaling and threshold
    eta = 1 for r >= 3 and 2k - 3 for r = 2,
    a* = ((r-1)! / (eta n (C(n, k-2) p)^r))^(1/(r-1)),   a_c = (1 - 1/r) a*.

Trajectories
    subcritical:  b(t+1) = (1+delta) eta b(t)^r / r! * n (C p)^r + b(0),
                  beta = b / a*  obeys  beta(t+1) = (1+delta) beta^r / r + beta(0);
    supercritical: level sizes c_i(t) and c(t) with gamma = c / a*  obeying
                  gamma(t+1) = (1-delta) gamma^r / r + gamma(0).

The trajectories are iterated in mpmath so that rounding never masks the
convergence of beta towards its fixed point x0 or the doubly exponential
growth of gamma.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .exceptions import BadArity, BadPairing, EmptyIncrements, NoRoot

EXACT_COMB_LIMIT = 1000  # n * k at or below this uses integer binomials
MARGIN_RTOL = 1e-9
EXACT_SMALL_INDEX = 64  # min(c, n - c) at or below this also uses integer binomials
SIDES = ("subcritical", "supercritical")


def eta(k: int, r: int) -> int:
    if k < 2 or r < 2:
        raise BadArity(f"need k >= 2 and r >= 2, got k={k}, r={r}")
    return 1 if r >= 3 else 2 * k - 3


def log_comb(n: int, c: int, k: int | None = None) -> float:
    """log C(n, c); exact integers when ``n * k`` or min(c, n - c) is small, log-gamma otherwise."""
    if c < 0 or c > n:
        return -math.inf
    if n * (k if k is not None else c) <= EXACT_COMB_LIMIT or min(c, n - c) <= EXACT_SMALL_INDEX:
        return math.log(math.comb(n, c))
    return math.lgamma(n + 1) - math.lgamma(c + 1) - math.lgamma(n - c + 1)


@dataclass(frozen=True)
class RegimeParams:
    n: int
    k: int
    r: int
    p: float
    eps: float = 0.1
    delta: float = 0.05
    side: str = "subcritical"

    def __post_init__(self):
        eta(self.k, self.r)
        if self.n < self.k:
            raise ValueError(f"n={self.n} must be at least k={self.k}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        for name in ("eps", "delta"):
            val = getattr(self, name)
            if not 0.0 < val < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        if self.side == "subcritical":
            if not 1.0 / (1.0 + self.delta) > (1.0 - self.eps) ** (self.r - 1):
                raise BadPairing("subcritical side needs 1/(1+delta) > (1-eps)^(r-1)")
        elif not (1.0 + self.eps) * (1.0 - self.delta) > 1.0:
            raise BadPairing("supercritical side needs (1+eps)(1-delta) > 1")

    @property
    def eta(self) -> int:
        return eta(self.k, self.r)

    def with_side(self, side: str) -> "RegimeParams":
        return RegimeParams(self.n, self.k, self.r, self.p, self.eps, self.delta, side)


def _log_unit(params: RegimeParams) -> float:
    """log of n (C(n,k-2) p)^r."""
    return math.log(params.n) + params.r * (log_comb(params.n, params.k - 2, params.k) + math.log(params.p))


def a_star(params: RegimeParams) -> float:
    r = params.r
    log_a = (math.lgamma(r) - math.log(params.eta) - _log_unit(params)) / (r - 1)
    return math.exp(log_a)


def a_crit(params: RegimeParams) -> float:
    return (1.0 - 1.0 / params.r) * a_star(params)


def regime_margin(params: RegimeParams) -> tuple[float, float, bool]:
    n, k, r, p = params.n, params.k, params.r, params.p
    m_low = math.exp((k - 1) * math.log(n) + math.log(p))
    m_high = math.exp((k - 2 + 1.0 / r) * math.log(n) + math.log(p))
    # relative slack absorbs log-domain rounding at exactly 10 and 0.1
    ok = m_low >= 10.0 * (1 - MARGIN_RTOL) and m_high <= 0.1 * (1 + MARGIN_RTOL)
    return m_low, m_high, bool(ok)


def suggest_desk_params(k: int, r: int, min_a_star: float = 500.0, c: float = 10.0,
                        n_max: int = 10**8) -> RegimeParams:
    """Smallest n in {1, 2, 5} x 10^j with p = c / n^(k-1) passing the margins and a* >= min_a_star."""
    for j in range(1, 9):
        for lead in (1, 2, 5):
            n = lead * 10**j
            if n > n_max:
                break
            p = c / float(n) ** (k - 1)
            if not 0.0 < p < 1.0:
                continue
            params = RegimeParams(n, k, r, p)
            if regime_margin(params)[2] and a_star(params) >= min_a_star:
                return params
    raise ValueError(f"no desk-scale parameters found for k={k}, r={r}")


# ---------------------------------------------------------------- trajectories


def _mp_unit(params: RegimeParams):
    """n (C(n,k-2) p)^r as an mpf, together with C(n,k-2) p."""
    cp = mpmath.binomial(params.n, params.k - 2) * mpmath.mpf(params.p)
    return params.n * cp**params.r, cp


def _mp_a_star(params: RegimeParams):
    unit, _ = _mp_unit(params)
    return (mpmath.factorial(params.r - 1) / (params.eta * unit)) ** (mpmath.mpf(1) / (params.r - 1))


def _x0_mp(r: int, delta, beta0):
    """Bisection for the smallest root of x - (1+delta) x^r / r = beta0 at working precision.

    Returns the upper end of the final bracket, so it never undershoots the root.
    """
    one = mpmath.mpf(1)
    delta, beta0 = mpmath.mpf(delta), mpmath.mpf(beta0)
    h = lambda x: x - (1 + delta) * x**r / r  # noqa: E731
    lo, hi = beta0, (one / (1 + delta)) ** (one / (r - 1))
    if h(lo) >= beta0:
        if h(lo) == beta0:
            return lo
        raise NoRoot("h(beta0) exceeds beta0")
    if not h(hi) > beta0:
        raise NoRoot("h at the upper end does not exceed beta0; check the (eps, delta) pairing")
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec + 4)
    while hi - lo > tol * hi:
        mid = (lo + hi) / 2
        if h(mid) < beta0:
            lo = mid
        else:
            hi = mid
    return hi


def x0_solve(r: int, delta: float, beta0: float) -> float:
    """Smallest positive x with x - (1+delta) x^r / r = beta0."""
    if r < 2:
        raise BadArity("r must be at least 2")
    with mpmath.workdps(30):
        x0 = _x0_mp(r, delta, beta0)
        return float(x0)


def delta_floor(eps: float, delta: float, r: int) -> float:
    if not (1.0 + eps) * (1.0 - delta) > 1.0:
        raise BadPairing("need (1+eps)(1-delta) > 1")
    return (1.0 + eps - 1.0 / (1.0 - delta)) * (1.0 - 1.0 / r)


@dataclass
class TrajectoryTable:
    """Trajectory rows plus scalars.

    ``columns`` names the row fields; ``exact`` keeps the mpmath values of the
    normalised trajectory (beta or gamma) for comparisons that floats would blur.
    """

    columns: tuple[str, ...]
    rows: list[tuple]
    a_star: float
    a_c: float
    x0: float | None = None
    Delta: float | None = None
    exact: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(str(v) if isinstance(v, int) else f"{v:.12g}" for v in row))
        return "\n".join(lines) + "\n"


def _prec_bits_beta(r: int, delta: float, beta0: float, T: int) -> int:
    x0 = x0_solve(r, delta, beta0)
    slope = min((1.0 + delta) * x0 ** (r - 1), 1.0 - 1e-12)
    return int(96 + T * math.log2(1.0 / slope))


def beta_trajectory(params: RegimeParams, T: int = 50) -> TrajectoryTable:
    """b(t) from its definition and beta(t) from the normalised recursion, t = 0..T."""
    if params.side != "subcritical":
        params = params.with_side("subcritical")
    r, delta = params.r, params.delta
    beta0_f = (1.0 - params.eps) * (1.0 - 1.0 / r)
    rows = []
    with mpmath.workprec(_prec_bits_beta(r, delta, beta0_f, T)):
        d = mpmath.mpf(delta)
        beta0 = (1 - mpmath.mpf(params.eps)) * (1 - mpmath.mpf(1) / r)
        unit, _ = _mp_unit(params)
        a_s = _mp_a_star(params)
        coeff = (1 + d) * params.eta * unit / mpmath.factorial(r)
        b0 = beta0 * a_s
        b, beta = b0, beta0
        bs, betas = [b], [beta]
        for _ in range(T):
            b = coeff * b**r + b0
            beta = (1 + d) * beta**r / r + beta0
            bs.append(b)
            betas.append(beta)
        x0 = _x0_mp(r, d, beta0)
        for t, (b_t, beta_t) in enumerate(zip(bs, betas)):
            rows.append((t, float(b_t), float(beta_t), float(b_t / a_s)))
        table = TrajectoryTable(
            ("t", "b", "beta", "b_over_a_star"), rows, float(a_s), float(a_s) * (1 - 1 / r),
            x0=float(x0),
            exact={"beta": betas, "b": bs, "a_star": a_s, "x0": x0,
                   "residual": float(abs(x0 - (1 + d) * x0**r / r - beta0))},
        )
        table.diagnostics = _subcritical_diagnostics(r, delta, betas, x0)
    return table


def _subcritical_diagnostics(r: int, delta: float, betas, x0) -> dict:
    chi = 4.0 / delta
    xi_cap = (((1.0 + delta) / (1.0 + delta / 2.0)) ** (1.0 / (r - 1)) - 1.0) / chi
    xi_p = xi_cap / 2.0
    t0 = None
    for t in range(1, len(betas)):
        if betas[t - 1] >= (1 - mpmath.mpf(xi_p)) * x0:
            t0 = t
            break
    gain_floor = (r - 1) * xi_p**2 * float(x0) / r
    upto = (t0 - 1) if t0 is not None else len(betas) - 1
    gains = [float(betas[t + 1] - betas[t]) for t in range(upto)]
    return {"chi": chi, "xi_prime": xi_p, "t0": t0, "gain_floor": gain_floor,
            "min_gain_before_t0": min(gains) if gains else None}


def _prec_bits_gamma(r: int, T: int) -> int:
    return int(96 + T * math.log2(r) + 2 * math.log2(T + 2))


def gamma_trajectory(params: RegimeParams, T: int = 50, c0: float | None = None) -> TrajectoryTable:
    """Level trajectories c_i(t) by the recursive definition and by the closed forms.

    Rows hold (t, c, gamma, c_0, ..., c_r) from the recursion; the closed-form
    values and the recursion for gamma are kept in ``exact``.
    """
    if params.side != "supercritical":
        params = params.with_side("supercritical")
    r, k = params.r, params.k
    with mpmath.workprec(_prec_bits_gamma(r, T)):
        d = mpmath.mpf(params.delta)
        unit, cp = _mp_unit(params)
        n = mpmath.mpf(params.n)
        a_s = _mp_a_star(params)
        gamma0 = (1 + mpmath.mpf(params.eps)) * (1 - mpmath.mpf(1) / r)
        c_init = gamma0 * a_s if c0 is None else mpmath.mpf(c0)
        fact = [mpmath.factorial(i) for i in range(r + 1)]

        # recursive definition
        levels = [n] + [mpmath.mpf(0)] * r
        c_prev, c = mpmath.mpf(0), c_init
        rec_levels, rec_c = [list(levels)], [c]
        for _ in range(T):
            diff = c - c_prev
            new = [n]
            for i in range(1, r + 1):
                s = mpmath.fsum(levels[j] * diff ** (i - j) / fact[i - j] * cp ** (i - j) for j in range(i))
                new.append(((1 - d) * s if i == r else s) + levels[i])
            levels = new
            c_prev, c = c, params.eta * levels[r] + c_init
            rec_levels.append(list(levels))
            rec_c.append(c)

        # closed forms driven by the recursive c(t)
        closed_levels = [[n] + [mpmath.mpf(0)] * r]
        for t in range(T):
            ct = rec_c[t]
            row = [n]
            for i in range(1, r + 1):
                val = ct**i / fact[i] * n * cp**i
                row.append((1 - d) * val if i == r else val)
            closed_levels.append(row)
        closed_c = [c_init]
        for _ in range(T):
            closed_c.append((1 - d) * params.eta * closed_c[-1] ** r / fact[r] * unit + c_init)

        gammas = [c_t / a_s for c_t in rec_c]
        gamma_rec = [gamma0 if c0 is None else c_init / a_s]
        for _ in range(T):
            gamma_rec.append((1 - d) * gamma_rec[-1] ** r / r + gamma_rec[0])

        rows = []
        for t in range(T + 1):
            rows.append((t, float(rec_c[t]), float(gammas[t])) + tuple(float(v) for v in rec_levels[t]))
        cols = ("t", "c", "gamma") + tuple(f"c_{i}" for i in range(r + 1))
        try:
            Delta = delta_floor(params.eps, params.delta, r)
        except BadPairing:
            Delta = None
        table = TrajectoryTable(
            cols, rows, float(a_s), float(a_s) * (1 - 1 / r), Delta=Delta,
            exact={"c": rec_c, "gamma": gammas, "gamma_recursion": gamma_rec,
                   "levels": rec_levels, "levels_closed": closed_levels, "c_closed": closed_c,
                   "a_star": a_s},
        )
    del k
    return table


def mild_c_values(n: int, k: int, r: int, p: float, delta: float, c0: float, T: int) -> list[float]:
    """c(0..T) for the mild process schedule: c(t+1) = (1-delta) eta c(t)^r / r! n (Cp)^r + c(0).

    Values past n are reported as +inf.
    """
    log_unit = math.log(n) + r * (log_comb(n, k - 2, k) + math.log(p))
    log_coeff = math.log1p(-delta) + math.log(eta(k, r)) - math.lgamma(r + 1) + log_unit
    out = [float(c0)]
    for _ in range(T):
        c = out[-1]
        if math.isinf(c) or c <= 0.0:
            out.append(c if math.isinf(c) else float(c0))
            continue
        log_term = log_coeff + r * math.log(c)
        nxt = math.exp(log_term) + c0 if log_term < 700 else math.inf
        out.append(math.inf if nxt > n else nxt)
    return out


# --------------------------------------------------------------------- ODE


def phi_c(r: int) -> float:
    return (1.0 - 1.0 / r) * math.factorial(r - 1) ** (1.0 / (r - 1))


@dataclass
class ODEResult:
    x: np.ndarray
    phi: np.ndarray
    phi_c: float
    stalled: bool
    escaped: bool
    dt: float


def _rk4(r: int, phi0: float, x_max: float, dt: float, stall_tol: float,
         escape_at: float, sample_every: int):
    fact = math.factorial(r)

    def f(y):
        return y**r / fact - y + phi0

    x, y = 0.0, phi0
    xs, ys = [x], [y]
    i = 0
    stalled = escaped = False
    while x < x_max:
        k1 = f(y)
        if k1 <= stall_tol:
            stalled = True
            break
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y_new = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        x += dt
        i += 1
        if not y_new > y:
            stalled = True
            y = y_new
            break
        y = y_new
        if i % sample_every == 0:
            xs.append(x)
            ys.append(y)
        if y >= escape_at:
            escaped = True
            break
    if xs[-1] != x:
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys), stalled, escaped


def ode_heuristic(r: int, phi0: float, x_max: float = 1000.0, dt: float = 1e-3,
                  tol: float = 1e-8, stall_tol: float = 1e-9, escape_at: float = 10.0,
                  min_dt: float = 1e-6) -> ODEResult:
    """Integrate phi' = phi^r / r! - phi + phi0 with classical RK4.

    Integration stops when phi' falls to ``stall_tol`` (the curve has reached
    a root of phi'), when phi reaches ``escape_at``, or at ``x_max``.  The step
    is halved until the final value moves by less than ``tol``.
    """
    if phi0 <= 0 or dt <= 0:
        raise ValueError("phi0 and dt must be positive")
    if r < 2:
        raise BadArity("r must be at least 2")
    sample = max(1, int(round(0.01 / dt)))
    prev = _rk4(r, phi0, x_max, dt, stall_tol, escape_at, sample)
    while dt / 2 >= min_dt:
        cur = _rk4(r, phi0, x_max, dt / 2, stall_tol, escape_at, sample * 2)
        dt, sample = dt / 2, sample * 2
        converged = (cur[2], cur[3]) == (prev[2], prev[3]) and _curve_gap(prev, cur) < tol
        prev = cur
        if converged:
            break
    xs, ys, stalled, escaped = prev
    return ODEResult(xs, ys, phi_c(r), stalled, escaped, dt)


def _curve_gap(a, b) -> float:
    # compare both curves at the last abscissa they share
    x = min(a[0][-1], b[0][-1])
    return abs(float(np.interp(x, a[0], a[1])) - float(np.interp(x, b[0], b[1])))


# ----------------------------------------------------------- concentration


def mcdiarmid_bound(variance: float, M: float, theta: float) -> float:
    """exp(-theta^2 / (2 (Var + M theta / 3))) for sums of bounded independent terms."""
    if variance < 0 or M <= 0 or theta < 0:
        raise ValueError("need variance >= 0, M > 0, theta >= 0")
    if theta == 0:
        return 1.0
    return math.exp(-(theta**2) / (2.0 * (variance + M * theta / 3.0)))


def dependent_bound(lam: float, var_hat: float, theta: float) -> float:
    """lam * exp(-theta^2 / (2 (Var + theta / 3))); not clamped to 1."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if theta == 0:
        return float(lam)
    return lam * math.exp(-(theta**2) / (2.0 * (var_hat + theta / 3.0)))


def azuma_bound(increments, theta: float) -> float:
    c = np.asarray(list(increments), dtype=float)
    if c.size == 0:
        raise EmptyIncrements("need at least one increment bound")
    if np.any(c <= 0):
        raise ValueError("increment bounds must be positive")
    if theta == 0:
        return 1.0
    return math.exp(-(theta**2) / (2.0 * float(np.sum(c**2))))


def fkg_check(n: int = 4, p: Fraction = Fraction(3, 10), increasing=None, decreasing=None):
    """Exact P[A], P[B], P[A and B] for graph events on K_n with edge probability p.

    Defaults: A = triangle on {0, 1, 2} present, B = vertex 3 isolated.
    Returns ``(pA, pB, pAB)`` as Fractions.
    """
    p = Fraction(p)
    pairs = list(itertools.combinations(range(n), 2))
    if increasing is None:
        tri = {(0, 1), (1, 2), (0, 2)}
        increasing = lambda es: tri <= es  # noqa: E731
    if decreasing is None:
        decreasing = lambda es: not any(n - 1 in e for e in es)  # noqa: E731
    pA = pB = pAB = Fraction(0)
    for mask in range(1 << len(pairs)):
        es = {pairs[i] for i in range(len(pairs)) if mask >> i & 1}
        w = p ** len(es) * (1 - p) ** (len(pairs) - len(es))
        a, b = increasing(es), decreasing(es)
        pA += w * a
        pB += w * b
        pAB += w * (a and b)
    return pA, pB, pAB

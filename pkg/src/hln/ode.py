"""Mass-action ODEs on molecule counts, integrated with Dormand-Prince 5(4).

The vector field uses the same discrete rate constants as the stochastic
simulator, so ODE and SSA trajectories are directly comparable.  A
homodimer ``A + A`` contributes ``k x^2 / 2`` (the continuum limit of the
``n(n-1)/2`` pair count).

The integrator is a compiled adaptive explicit Runge-Kutta pair with local
extrapolation and Shampine's quartic dense output; step-size control
follows the usual ``atol + rtol * |y|`` mixed error norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .reactions import Kind, ReactionNetwork
from .ssa import Trajectory


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class OdeConfig:
    t_end: float
    sample_count: int = 601
    rel_tol: float = 1e-6
    abs_tol: float = 1e-8

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError("t_end must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.sample_count)


@dataclass(frozen=True)
class OdeSystem:
    """Autonomous vector field ``dx/dt = S @ flux(x)``.

    ``flux_j(x) = rate_j * x[first_j]^a * x[second_j]^b`` where the reactant
    pattern is encoded by ``kinds`` (0: constant, 1: x_i, 2: x_i x_j,
    3: x_i^2 / 2).
    """

    species: tuple[str, ...]
    rates: np.ndarray
    kinds: np.ndarray
    first: np.ndarray
    second: np.ndarray
    stoichiometry: np.ndarray  # species x reactions, float

    def __call__(self, t: float, x) -> np.ndarray:
        return _field(np.asarray(x, dtype=np.float64), self.rates, self.kinds,
                      self.first, self.second, self.stoichiometry)

    def listing(self) -> str:
        """Human-readable list of the generated equations."""
        lines = []
        for i, name in enumerate(self.species):
            terms = []
            for j in range(len(self.rates)):
                s = int(self.stoichiometry[i, j])
                if s == 0:
                    continue
                coeff = f"{abs(s)}*" if abs(s) != 1 else ""
                sign = "-" if s < 0 else "+"
                terms.append(f"{sign} {coeff}{self._flux_text(j)}")
            rhs = " ".join(terms).lstrip("+ ") if terms else "0"
            lines.append(f"d[{name}]/dt = {rhs}")
        return "\n".join(lines)

    def _flux_text(self, j: int) -> str:
        k, kind = repr(float(self.rates[j])), self.kinds[j]
        a, b = self.species[self.first[j]], self.species[self.second[j]]
        if kind == 0:
            return k
        if kind == 1:
            return f"{k}*[{a}]"
        if kind == 2:
            return f"{k}*[{a}]*[{b}]"
        return f"{k}*[{a}]^2/2"


def build_ode(net: ReactionNetwork) -> OdeSystem:
    n = len(net.reactions)
    index = {s: i for i, s in enumerate(net.species)}
    rates = np.zeros(n)
    kinds = np.zeros(n, dtype=np.int64)
    first = np.zeros(n, dtype=np.int64)
    second = np.zeros(n, dtype=np.int64)
    for j, r in enumerate(net.reactions):
        rates[j] = r.rate
        names = [name for name, m in r.reactants for _ in range(m)]
        if r.kind is Kind.ZEROTH_ORDER:
            kinds[j] = 0
        elif len(names) == 1:
            kinds[j], first[j] = 1, index[names[0]]
        elif names[0] != names[1]:
            kinds[j], first[j], second[j] = 2, index[names[0]], index[names[1]]
        else:
            kinds[j], first[j] = 3, index[names[0]]
    return OdeSystem(net.species, rates, kinds, first, second,
                     net.stoichiometry().astype(np.float64))


@numba.njit(cache=True)
def _field_into(dx, x, rates, kinds, first, second, stoich):
    n_sp, n_rx = stoich.shape
    dx[:] = 0.0
    for j in range(n_rx):
        kind = kinds[j]
        if kind == 0:
            flux = rates[j]
        elif kind == 1:
            flux = rates[j] * x[first[j]]
        elif kind == 2:
            flux = rates[j] * x[first[j]] * x[second[j]]
        else:
            flux = rates[j] * x[first[j]] * x[first[j]] * 0.5
        for i in range(n_sp):
            if stoich[i, j] != 0.0:
                dx[i] += stoich[i, j] * flux


@numba.njit(cache=True)
def _field(x, rates, kinds, first, second, stoich):
    dx = np.empty(stoich.shape[0])
    _field_into(dx, x, rates, kinds, first, second, stoich)
    return dx


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th and embedded 4th order weights (7 stages, FSAL)
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# dense output: y(t + th) = y + h * K.T @ (P @ [t, t^2, t^3, t^4])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@numba.njit(cache=True)
def _rms(v):
    return math.sqrt(np.sum(v * v) / v.shape[0]) if v.shape[0] else 0.0


@numba.njit(cache=True)
def _dopri(x0, times, rtol, atol, rates, kinds, first, second, stoich, A, B, C, E, P):
    """Returns (samples, status, n_steps); status 0 ok, 1 step underflow."""
    n = x0.shape[0]
    n_t = times.shape[0]
    out = np.zeros((n_t, n))
    out[0, :] = x0
    if n == 0:
        return out, 0, 0
    t_end = times[n_t - 1]
    y = x0.copy()
    f = _field(y, rates, kinds, first, second, stoich)
    K = np.zeros((7, n))

    # initial step (Hairer, Norsett & Wanner II.4)
    scale = atol + np.abs(y) * rtol
    d0 = _rms(y / scale)
    d1 = _rms(f / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y + h0 * f
    f1 = _field(y1, rates, kinds, first, second, stoich)
    d2 = _rms((f1 - f) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100 * h0, h1, t_end)

    t = 0.0
    k = 1
    steps = 0
    rejected = False
    eps = np.finfo(np.float64).eps
    y_new = np.empty(n)
    y_stage = np.empty(n)
    while k < n_t:
        if h < 10 * eps * abs(t):
            return out, 1, steps
        last = t + h >= t_end
        if last:
            h = t_end - t
        K[0, :] = f
        for s in range(1, 6):
            for i in range(n):
                acc = 0.0
                for q in range(s):
                    acc += A[s, q] * K[q, i]
                y_stage[i] = y[i] + h * acc
            _field_into(K[s], y_stage, rates, kinds, first, second, stoich)
        for i in range(n):
            acc = 0.0
            for q in range(6):
                acc += B[q] * K[q, i]
            y_new[i] = y[i] + h * acc
        _field_into(K[6], y_new, rates, kinds, first, second, stoich)
        err_sq = 0.0
        for i in range(n):
            acc = 0.0
            for q in range(7):
                acc += E[q] * K[q, i]
            sc = atol + max(abs(y[i]), abs(y_new[i])) * rtol
            err_sq += (h * acc / sc) ** 2
        err_norm = math.sqrt(err_sq / n)

        if err_norm < 1.0:
            t_new = t_end if last else t + h
            while k < n_t and times[k] <= t_new:
                theta = (times[k] - t) / h
                for i in range(n):
                    acc = 0.0
                    for q in range(7):
                        acc += K[q, i] * (P[q, 0] * theta + P[q, 1] * theta ** 2
                                          + P[q, 2] * theta ** 3 + P[q, 3] * theta ** 4)
                    out[k, i] = y[i] + h * acc
                k += 1
            if err_norm == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = min(_MAX_FACTOR, _SAFETY * err_norm ** -0.2)
            if rejected:
                factor = min(1.0, factor)
            t = t_new
            y[:] = y_new
            f[:] = K[6]
            h *= factor
            rejected = False
            steps += 1
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
            rejected = True
    return out, 0, steps


def integrate(sys: OdeSystem, x0, cfg: OdeConfig) -> Trajectory:
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (len(sys.species),):
        raise ValueError("initial vector does not match species count")
    if np.any(x0 < 0):
        raise ValueError("initial amounts must be nonnegative")
    times = cfg.times
    out, status, _ = _dopri(x0, times, cfg.rel_tol, cfg.abs_tol, sys.rates, sys.kinds,
                            sys.first, sys.second, sys.stoichiometry, _A, _B, _C, _E, _P)
    if status != 0:
        raise IntegrationError("step size underflow")
    return Trajectory(sys.species, times, out)

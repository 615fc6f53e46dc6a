"""Gradient flows: the Rabinowitz flow on Fourier coefficients and the heat flow on S^2.

Everything here is floating point; each check reports the tolerance it used.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StepFailure

TWO_PI = 2 * np.pi
FOUR_PI2 = 4 * np.pi ** 2


# ---------------------------------------------------------------------------
# Rabinowitz flow


@dataclass
class RabinowitzState:
    """Fourier coefficients ``z_k`` for ``kMin <= k <= kMax`` and the multiplier ``eta``."""

    z: np.ndarray
    eta: float
    kMin: int = -8

    @property
    def kMax(self) -> int:
        return self.kMin + len(self.z) - 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(self.kMin, self.kMax + 1)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.z) ** 2))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.z.real, self.z.imag, [self.eta]])

    @classmethod
    def from_vector(cls, y, kMin: int) -> "RabinowitzState":
        n = (len(y) - 1) // 2
        return cls(np.asarray(y[:n]) + 1j * np.asarray(y[n:2 * n]), float(y[-1]), kMin)

    @classmethod
    def critical(cls, ell: int, window=(-8, 8), phase: float = 0.0) -> "RabinowitzState":
        """``(z^(ell), ell)`` with ``z_ell = e^(i phase)``."""
        z = np.zeros(window[1] - window[0] + 1, dtype=complex)
        z[ell - window[0]] = np.exp(1j * phase)
        return cls(z, float(ell), window[0])


def rabinowitz_rhs(s: RabinowitzState) -> RabinowitzState:
    """``z_k' = 2 pi (k - eta) z_k``, ``eta' = -pi (|z|^2 - 1)``."""
    dz = TWO_PI * (s.modes - s.eta) * s.z
    return RabinowitzState(dz, -np.pi * (s.norm2() - 1), s.kMin)


def action(s: RabinowitzState) -> float:
    """``pi sum k |z_k|^2 - eta pi (|z|^2 - 1)``."""
    w = np.abs(s.z) ** 2
    return float(np.pi * np.dot(s.modes, w) - s.eta * np.pi * (w.sum() - 1))


def gradient(s: RabinowitzState) -> RabinowitzState:
    """L^2 gradient of the action; the flow above is its positive gradient flow."""
    return RabinowitzState(TWO_PI * s.modes * s.z - TWO_PI * s.eta * s.z,
                           -np.pi * (s.norm2() - 1), s.kMin)


def gradient_norm2(s: RabinowitzState) -> float:
    g = gradient(s)
    return float(np.sum(np.abs(g.z) ** 2) + g.eta ** 2)


def directional_derivative(s: RabinowitzState, dz, deta) -> float:
    """``<grad A, (dz, deta)>`` for the real inner product ``Re sum z_k conj(w_k)``."""
    g = gradient(s)
    return float(np.real(np.vdot(dz, g.z)) + g.eta * deta)


def nearest_critical(s: RabinowitzState):
    """Nearest ``ell`` and the distance to the critical circle of ``(z^(ell), ell)``."""
    ell = int(round(s.eta))
    ell = min(max(ell, s.kMin), s.kMax)
    w = np.abs(s.z)
    rest = np.delete(w, ell - s.kMin)
    dist = np.sqrt(np.sum(rest ** 2) + (w[ell - s.kMin] - 1) ** 2 + (s.eta - ell) ** 2)
    return ell, float(dist)


@dataclass
class Trajectory:
    s: np.ndarray
    states: list
    actions: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def dump(self) -> str:
        """Columnar text: ``s``, action, ``eta``, then ``Re z_k``, ``Im z_k`` per mode."""
        buf = io.StringIO()
        k0 = self.states[0].kMin
        modes = range(k0, self.states[0].kMax + 1)
        head = ["s", "action", "eta"] + [f"re_z{k}" for k in modes] + [f"im_z{k}" for k in modes]
        buf.write(" ".join(head) + "\n")
        for si, st, a in zip(self.s, self.states, self.actions):
            row = [si, a, st.eta] + list(st.z.real) + list(st.z.imag)
            buf.write(" ".join(f"{v:.12e}" for v in row) + "\n")
        return buf.getvalue()


def integrate_rabinowitz(s0: RabinowitzState, sSpan=(0.0, 5.0), tol: float = 1e-10,
                         samples: int = 100, maxStep: float = np.inf) -> Trajectory:
    """Integrate the flow with DOP853 and collect diagnostics.

    Diagnostics: drift of the modes that start at zero, monotonicity of the
    action, the gradient identity ``dA/ds = |grad A|^2`` by fourth order
    central differences of the dense output, and the distance to the nearest
    critical circle at the end.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k0 = s0.kMin

    def f(_, y):
        return rabinowitz_rhs(RabinowitzState.from_vector(y, k0)).to_vector()

    sol = solve_ivp(f, sSpan, s0.to_vector(), method="DOP853", rtol=tol, atol=tol * 1e-2,
                    dense_output=True, max_step=maxStep)
    if not sol.success:
        raise StepFailure(sol.message)
    ts = np.linspace(sSpan[0], sSpan[1], samples)
    states = [RabinowitzState.from_vector(sol.sol(t), k0) for t in ts]
    acts = np.array([action(st) for st in states])
    zero = np.abs(s0.z) == 0
    drift = max((float(np.max(np.abs(st.z[zero]))) for st in states), default=0.0) \
        if zero.any() else 0.0
    scale = max(1.0, float(np.max(np.abs(acts))))
    monotone = bool(np.all(np.diff(acts) >= -10 * tol * scale))
    h = min(1e-4, (sSpan[1] - sSpan[0]) / (10 * samples))
    rel = 0.0
    for t in ts[1:-1]:
        a = [action(RabinowitzState.from_vector(sol.sol(t + j * h), k0)) for j in (-2, -1, 1, 2)]
        fd = (a[0] - 8 * a[1] + 8 * a[2] - a[3]) / (12 * h)
        g = gradient_norm2(RabinowitzState.from_vector(sol.sol(t), k0))
        rel = max(rel, abs(fd - g) / max(g, 1.0))
    ell, dist = nearest_critical(states[-1])
    diag = {"invariant_drift": drift, "action_monotone": monotone,
            "gradient_identity_error": rel, "nearest_critical": ell,
            "critical_residual": dist, "nfev": int(sol.nfev), "tol": tol}
    return Trajectory(ts, states, acts, diag)


# two consecutive modes: r0 = |z_ell|, r1 = |z_(ell+1)|, e = eta - ell


def two_mode_rhs(y):
    r0, r1, e = y
    return np.array([-TWO_PI * e * r0, TWO_PI * (1 - e) * r1, -np.pi * (r0 * r0 + r1 * r1 - 1)])


@dataclass
class Heteroclinic:
    ell: int
    angle: float
    start: RabinowitzState
    trajectory: Trajectory
    closest: float
    closest_s: float
    action_start: float
    action_end: float
    diagnostics: dict = field(default_factory=dict)


def _shoot(angle, eps, sMax, tol):
    d = np.array([np.sin(angle) / np.sqrt(2), np.cos(angle), -np.sin(angle) / np.sqrt(2)])
    y0 = np.array([1.0, 0.0, 0.0]) + eps * d

    def blow(_, y):
        return np.abs(y).sum() - 50.0

    blow.terminal = True
    sol = solve_ivp(lambda _, y: two_mode_rhs(y), (0.0, sMax), y0, method="DOP853",
                    rtol=tol, atol=tol * 1e-2, events=blow, dense_output=True)
    if not sol.success:
        raise StepFailure(sol.message)
    # past the target eta keeps growing while both modes decay
    over = sol.y[2, -1] > 1.5 and abs(sol.y[1, -1]) < 1
    return over, sol, y0


def heteroclinic(ell: int = 0, eps: float = 1e-6, sMax: float = 8.0, tol: float = 1e-11,
                 window=(-8, 8), bracket=(-1.2, -0.6), iterations: int = 60) -> Heteroclinic:
    """Flow line from ``(z^(ell), ell)`` to ``(z^(ell+1), ell+1)`` by shooting.

    The unstable manifold of the start is two dimensional inside the
    invariant subspace of modes ``ell, ell+1``.  The launch direction is
    bisected between trajectories that overshoot the target and those that
    fall back; the result is then replayed on the full truncated state.
    """
    lo, hi = bracket
    over_lo = _shoot(lo, eps, sMax, tol)[0]
    if over_lo == _shoot(hi, eps, sMax, tol)[0]:
        raise StepFailure("bracket does not separate the two behaviours")
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if _shoot(mid, eps, sMax, tol)[0] == over_lo:
            lo = mid
        else:
            hi = mid
    _, sol, y0 = _shoot(lo, eps, sMax, tol)
    dist = np.sqrt(sol.y[0] ** 2 + (sol.y[1] - 1) ** 2 + (sol.y[2] - 1) ** 2)
    i = int(np.argmin(dist))
    sEnd = float(sol.t[i])
    z = np.zeros(window[1] - window[0] + 1, dtype=complex)
    z[ell - window[0]] = y0[0]
    z[ell + 1 - window[0]] = y0[1]
    start = RabinowitzState(z, ell + y0[2], window[0])
    traj = integrate_rabinowitz(start, (0.0, sEnd), tol=min(tol * 10, 1e-10))
    end = traj.states[-1]
    return Heteroclinic(ell, lo, start, traj, float(dist[i]), sEnd, action(start), action(end),
                        {"reduced_closest": float(dist[i]), **traj.diagnostics})


def two_mode_line(s: float):
    """Explicit flow line ``r1 = eta = 1/(1+e^(-2 pi s))``, ``r0 = 1 - r1`` between modes 0 and 1."""
    r1 = 1.0 / (1.0 + np.exp(-TWO_PI * s))
    return np.array([1 - r1, r1, r1])


# ---------------------------------------------------------------------------
# heat flow on S^2


def heat_rhs(x: float) -> float:
    """``x' = 4 pi^2 (1 - x^2) x``."""
    return FOUR_PI2 * (1 - x * x) * x


def heat_closed_form(x0: float, s):
    return x0 / np.sqrt((1 - x0 * x0) * np.exp(-2 * FOUR_PI2 * np.asarray(s)) + x0 * x0)


def heat_loop(x: float, t, orientation: int = 1, y: float = 0.0) -> np.ndarray:
    """The loop ``(x, r cos(2 pi o t - y), r sin(2 pi o t - y))`` with ``r = sqrt(1 - x^2)``."""
    t = np.asarray(t)
    r = np.sqrt(max(1 - x * x, 0.0))
    ang = TWO_PI * orientation * t - y
    return np.stack([np.full_like(t, x, dtype=float), r * np.cos(ang), r * np.sin(ang)])


def heat_flow_check(x0: float, sSpan=(0.0, 1.0), tol: float = 1e-8, samples: int = 200) -> dict:
    """Integrate ``(x, y)`` and compare with the closed form."""
    if not -1 < x0 < 1:
        raise ValueError("x0 must lie in (-1, 1)")
    sol = solve_ivp(lambda _, u: [heat_rhs(u[0]), 0.0], sSpan, [x0, 0.0], method="DOP853",
                    rtol=1e-12, atol=1e-14, dense_output=True)
    if not sol.success:
        raise StepFailure(sol.message)
    ts = np.linspace(sSpan[0], sSpan[1], samples)
    xs, ys = sol.sol(ts)
    exact = heat_closed_form(x0, ts)
    err = float(np.max(np.abs(xs - exact) / np.maximum(np.abs(exact), 1e-300))) if x0 else \
        float(np.max(np.abs(xs)))
    sign_kept = bool(np.all(np.sign(xs) == np.sign(x0)))
    limit = float(np.sign(x0))
    reached = abs(xs[-1] - limit) < 1e-6 if x0 else abs(xs[-1]) < tol
    ok = err <= tol and sign_kept and reached and float(np.max(np.abs(ys))) == 0.0
    return {"x0": x0, "max_rel_error": err, "sign_kept": sign_kept,
            "limit": [limit, 0.0, 0.0], "x_end": float(xs[-1]), "reached_limit": bool(reached),
            "y_constant": float(np.max(np.abs(ys))) == 0.0, "tol": tol, "passed": bool(ok)}


def heat_solution(x0: float, s, t) -> np.ndarray:
    """``v(s, t)`` on a grid, shape ``(3, len(s), len(t))``."""
    S, Tt = np.meshgrid(np.asarray(s, float), np.asarray(t, float), indexing="ij")
    x = heat_closed_form(x0, S)
    r = np.sqrt(1 - x * x)
    return np.stack([x, r * np.cos(TWO_PI * Tt), r * np.sin(TWO_PI * Tt)])


def pde_residual(x0: float, ns: int = 200, nt: int = 200, sSpan=(0.0, 0.05)) -> float:
    """Max residual of ``v_s = v_tt + |v_t|^2 v`` on an ``ns x nt`` grid.

    ``v_s`` uses central differences (second order in the ``s`` step);
    ``t`` derivatives are taken spectrally since ``v`` is periodic in ``t``.
    """
    s = np.linspace(sSpan[0], sSpan[1], ns)
    t = np.arange(nt) / nt
    hs = s[1] - s[0]
    v = heat_solution(x0, s, t)
    vs = (v[:, 2:, :] - v[:, :-2, :]) / (2 * hs)
    inner = v[:, 1:-1, :]
    k = TWO_PI * np.fft.fftfreq(nt, 1.0 / nt)
    F = np.fft.fft(inner, axis=2)
    vt = np.real(np.fft.ifft(1j * k * F, axis=2))
    vtt = np.real(np.fft.ifft(-(k ** 2) * F, axis=2))
    res = vs - vtt - np.sum(vt * vt, axis=0) * inner
    return float(np.max(np.abs(res)))


def convergence_order(x0: float = 0.3, ns: int = 100, nt: int = 200, sSpan=(0.0, 0.05)) -> float:
    """Observed order of :func:`pde_residual` when the ``s`` step is halved."""
    r1 = pde_residual(x0, ns, nt, sSpan)
    r2 = pde_residual(x0, 2 * ns - 1, nt, sSpan)
    return float(np.log2(r1 / r2))


def count_c1(sEnd: float = 1.0, x0: float = 1e-3) -> int:
    """Number of flow lines from either orientation of the great circle to the north pole."""
    return count_c1_report(sEnd, x0)["c1"]


def count_c1_report(sEnd: float = 1.0, x0: float = 1e-3) -> dict:
    """Flow lines from the two orientations of the great circle to ``(1, 0, 0)``.

    For each orientation both branches ``x0 > 0`` and ``x0 < 0`` of the
    unstable manifold are integrated and the end loop is compared with the
    north pole.
    """
    t = np.linspace(0, 1, 64, endpoint=False)
    lines = []
    for orientation in (1, -1):
        for sign in (1, -1):
            sol = solve_ivp(lambda _, u: [heat_rhs(u[0])], (0.0, sEnd), [sign * x0],
                            method="DOP853", rtol=1e-12, atol=1e-14)
            if not sol.success:
                raise StepFailure(sol.message)
            loop = heat_loop(float(sol.y[0, -1]), t, orientation)
            gap = float(np.max(np.abs(loop - np.array([[1.0], [0.0], [0.0]]))))
            lines.append({"orientation": orientation, "branch": sign, "gap": gap,
                          "hits_north": gap < 1e-6})
    count = sum(line["hits_north"] for line in lines)
    return {"c1": count, "lines": lines}

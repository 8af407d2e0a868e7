"""Separable Hamiltonian test systems ``H = |p|^2 / 2m + V(q)`` with polynomial V."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Random draws use numpy's PCG64 bit generator through ``random_raw`` (raw
# 64-bit outputs), converted to doubles as (x >> 11) * 2**-53. The bit-generator
# stream is stable across numpy releases, unlike ``Generator`` methods.
_POTENTIAL_STREAM = 0
_INITIAL_STREAM = 1


@dataclass(frozen=True)
class PhaseState:
    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"q and p must be 1-d of equal length, got {q.shape} and {p.shape}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, x, t: float = 0.0) -> "PhaseState":
        x = np.asarray(x, dtype=float)
        d = x.shape[0] // 2
        return cls(x[:d].copy(), x[d:].copy(), t)


@dataclass(frozen=True)
class SeparableSystem:
    """``force(q)`` returns ``g(q) = -grad V(q) / mass``."""

    dim: int
    degree: int
    potential: Callable[[np.ndarray], float]
    force: Callable[[np.ndarray], np.ndarray]
    label: str
    mass: float = 1.0
    # optional exact flow (state, t) -> state, used as an oracle
    exact: Callable[[PhaseState, float], PhaseState] | None = field(default=None, compare=False)

    @property
    def force_degree(self) -> int:
        return self.degree - 1


def energy(system: SeparableSystem, state: PhaseState) -> float:
    if state.dim != system.dim:
        raise ValueError(f"state has dimension {state.dim}, system {system.dim}")
    return float(state.p @ state.p) / (2.0 * system.mass) + float(system.potential(state.q))


def harmonic(dim: int = 1) -> SeparableSystem:
    """Unit-frequency oscillator ``V = |q|^2 / 2``; carries its exact flow."""

    def potential(q):
        return 0.5 * float(q @ q)

    def force(q):
        return -q

    def exact(state: PhaseState, t: float) -> PhaseState:
        c, s = np.cos(t), np.sin(t)
        return PhaseState(c * state.q + s * state.p, c * state.p - s * state.q, state.t + t)

    return SeparableSystem(dim, 2, potential, force, f"harmonic(d={dim})", exact=exact)


def henon_heiles() -> SeparableSystem:
    def potential(q):
        x, y = q[0], q[1]
        return 0.5 * (x * x + y * y) + x * x * y - y * y * y / 3.0

    def force(q):
        x, y = q[0], q[1]
        return np.array([-x - 2.0 * x * y, -y - x * x + y * y])

    return SeparableSystem(2, 3, potential, force, "henon_heiles")


HH_INTEGRABLE_ALPHA = 0.7303
HH_CHAOTIC_ALPHA = 1.0328


def hh_initial(alpha: float = 0.5) -> PhaseState:
    """(q1, q2, p1, p2) = (alpha/2, 0, 0, alpha/4); energy 5 alpha^2 / 32."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return PhaseState(np.array([alpha / 2.0, 0.0]), np.array([0.0, alpha / 4.0]), 0.0)


def uniform_stream(seed: int, stream: int, n: int) -> np.ndarray:
    """``n`` doubles in [0, 1) from PCG64 keyed by (seed, stream)."""
    bitgen = np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(stream,)))
    raw = bitgen.random_raw(n)
    return (raw >> np.uint64(11)).astype(np.float64) * (2.0**-53)


@dataclass(frozen=True)
class RandomPotentialSpec:
    """Coefficient tensors of ``V = mu q q + nu q q q (+ rho q q q q)``.

    ``draw`` fills, from one stream: mu (d*d, row-major, diagonal then reset
    to 1/2), nu (d**3, row-major), rho (d**4, degree 4 only), each entry
    uniform on [-1/2, 1/2).
    """

    dim: int
    seed: int
    degree: int
    mu: np.ndarray
    nu: np.ndarray
    rho: np.ndarray | None = None

    @classmethod
    def draw(cls, dim: int, seed: int, degree: int) -> "RandomPotentialSpec":
        if degree not in (3, 4):
            raise ValueError(f"random potentials have degree 3 or 4, got {degree}")
        if dim < 1:
            raise ValueError("dim must be >= 1")
        d = dim
        n = d**2 + d**3 + (d**4 if degree == 4 else 0)
        u = uniform_stream(seed, _POTENTIAL_STREAM, n) - 0.5
        mu = u[: d * d].reshape(d, d).copy()
        np.fill_diagonal(mu, 0.5)
        nu = u[d * d : d * d + d**3].reshape(d, d, d).copy()
        rho = u[d * d + d**3 :].reshape(d, d, d, d).copy() if degree == 4 else None
        return cls(d, int(seed), degree, mu, nu, rho)


def random_polynomial_system(spec: RandomPotentialSpec) -> SeparableSystem:
    """System built from the tensors exactly as drawn (no symmetrisation)."""
    if spec.degree not in (3, 4):
        raise ValueError(f"random potentials have degree 3 or 4, got {spec.degree}")
    d = spec.dim
    mu = np.asarray(spec.mu, dtype=float)
    nu = np.asarray(spec.nu, dtype=float)
    rho = None if spec.rho is None else np.asarray(spec.rho, dtype=float)
    if spec.degree == 4 and rho is None:
        raise ValueError("degree-4 spec needs rho")

    # gradient tensors: each index position of the free tensor contributes
    g2 = mu + mu.T
    g3 = nu + nu.transpose(1, 0, 2) + nu.transpose(2, 0, 1)
    if spec.degree == 4:
        g4 = (
            rho
            + rho.transpose(1, 0, 2, 3)
            + rho.transpose(2, 0, 1, 3)
            + rho.transpose(3, 0, 1, 2)
        )

    def potential(q):
        v = q @ (mu @ q) + q @ ((nu @ q) @ q)
        if rho is not None:
            v += q @ (((rho @ q) @ q) @ q)
        return float(v)

    if spec.degree == 3:

        def force(q):
            return -(g2 @ q + (g3 @ q) @ q)

    else:

        def force(q):
            return -(g2 @ q + (g3 @ q) @ q + ((g4 @ q) @ q) @ q)

    name = "random_cubic" if spec.degree == 3 else "random_quartic"
    return SeparableSystem(d, spec.degree, potential, force, f"{name}(d={d},seed={spec.seed})")


def random_initial(dim: int, seed: int) -> PhaseState:
    """q then p, entries uniform on [0, 1/5)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    u = 0.2 * uniform_stream(seed, _INITIAL_STREAM, 2 * dim)
    return PhaseState(u[:dim], u[dim:], 0.0)


PROBLEMS = ("henon_heiles", "random_cubic", "random_quartic", "harmonic")


def make_problem(
    problem: str, dim: int | None = None, seed: int = 0, alpha: float | None = None
) -> tuple[SeparableSystem, PhaseState]:
    """Build ``(system, initial state)`` from a problem spec."""
    if problem == "henon_heiles":
        if dim not in (None, 2):
            raise ValueError("henon_heiles is two-dimensional")
        return henon_heiles(), hh_initial(0.5 if alpha is None else alpha)
    if problem == "harmonic":
        d = dim or 1
        q0 = np.zeros(d)
        q0[0] = 1.0
        return harmonic(d), PhaseState(q0, np.zeros(d))
    if problem in ("random_cubic", "random_quartic"):
        d = dim or 2
        degree = 3 if problem == "random_cubic" else 4
        spec = RandomPotentialSpec.draw(d, seed, degree)
        return random_polynomial_system(spec), random_initial(d, seed)
    raise ValueError(f"unknown problem {problem!r}; choose from {', '.join(PROBLEMS)}")

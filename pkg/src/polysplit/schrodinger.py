"""Split-step Fourier propagation of ``i u' = (T + V) u`` on a periodic 1-D grid.

The kinetic part ``T = -1/2 d^2/dx^2`` is diagonal in Fourier space and plays
the drift role (a-coefficients); the potential is diagonal in real space and
plays the kick role (b-coefficients). ``numpy.fft`` is used with its default
normalisation (forward unscaled, inverse scaled by 1/N), so ``ifft(fft(u)) == u``.
Norms and energies carry the grid spacing as quadrature weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .integrator import DivergenceError
from .schemes import SplittingScheme


@dataclass(frozen=True)
class SpectralGrid:
    n: int
    x_min: float
    x_max: float
    x: np.ndarray
    k: np.ndarray
    potential: np.ndarray

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


def quartic_potential(x):
    return -0.5 * x**2 + x**4 / 20.0


def build_grid(
    n: int = 256,
    x_min: float = -10.0,
    x_max: float = 10.0,
    potential: Callable[[np.ndarray], np.ndarray] = quartic_potential,
) -> SpectralGrid:
    if n < 8 or n & (n - 1):
        raise ValueError(f"number of grid points must be a power of two >= 8, got {n}")
    if not x_max > x_min:
        raise ValueError("need x_min < x_max")
    length = x_max - x_min
    x = x_min + np.arange(n) * (length / n)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / length
    return SpectralGrid(n, float(x_min), float(x_max), x, k, np.asarray(potential(x), dtype=float))


@dataclass(frozen=True)
class WaveState:
    u: np.ndarray
    t: float = 0.0


def norm(grid: SpectralGrid, u: np.ndarray) -> float:
    return float(np.sum(np.abs(u) ** 2) * grid.dx)


def gaussian_initial(grid: SpectralGrid) -> WaveState:
    u = np.exp(-grid.x**2 / 2.0).astype(complex)
    sigma = 1.0 / np.sqrt(norm(grid, u))
    return WaveState(sigma * u, 0.0)


def kinetic_flow(u: np.ndarray, tau: float, grid: SpectralGrid) -> np.ndarray:
    if tau == 0:
        return np.array(u, dtype=complex)  # skip the transform round trip
    return np.fft.ifft(np.exp(-0.5j * tau * grid.k**2) * np.fft.fft(u))


def potential_flow(u: np.ndarray, tau: float, grid: SpectralGrid) -> np.ndarray:
    return np.exp(-1j * tau * grid.potential) * u


def apply_hamiltonian(grid: SpectralGrid, u: np.ndarray) -> np.ndarray:
    return np.fft.ifft(0.5 * grid.k**2 * np.fft.fft(u)) + grid.potential * u


def energy_complex(grid: SpectralGrid, u: np.ndarray) -> complex:
    return complex(np.vdot(u, apply_hamiltonian(grid, u)) * grid.dx)


def energy(grid: SpectralGrid, u: np.ndarray) -> float:
    return energy_complex(grid, u).real


@dataclass
class Propagation:
    final: WaveState
    times: np.ndarray
    energies: np.ndarray
    norms: np.ndarray
    h: float
    steps: int

    @property
    def energy_error(self) -> float:
        """``|E(t_f) - E(0)|``."""
        return float(abs(self.energies[-1] - self.energies[0]))

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - self.norms[0])))

    def to_csv(self, path) -> None:
        lines = ["t,energy,norm"]
        lines += [f"{t!r},{e!r},{n!r}" for t, e, n in zip(self.times.tolist(), self.energies.tolist(), self.norms.tolist())]
        Path(path).write_text("\n".join(lines) + "\n")


def propagate(
    scheme: SplittingScheme,
    grid: SpectralGrid,
    state0: WaveState,
    h: float,
    t_final: float,
    sample_every: int = 1,
    swap_roles: bool = False,
) -> Propagation:
    """Advance ``state0`` by ``t_final`` (either sign) in ``round(t_final / h)`` steps.

    ``swap_roles`` makes the potential the a-flow and the kinetic part the b-flow.
    """
    if h == 0 or t_final == 0 or (h > 0) != (t_final > 0):
        raise ValueError("h and t_final must be non-zero with the same sign")
    n_steps = max(1, round(t_final / h))
    h = t_final / n_steps

    kin = -0.5j * grid.k**2
    pot = -1j * grid.potential
    # per-flow phase factors, built once
    ops = []
    for kind, c in scheme.flows():
        kinetic = (kind == "A") != swap_roles
        if c == 0.0:
            continue
        ops.append((kinetic, np.exp(c * h * (kin if kinetic else pot))))

    u = np.asarray(state0.u, dtype=complex)
    times = [state0.t]
    energies = [energy(grid, u)]
    norms = [norm(grid, u)]
    fft, ifft = np.fft.fft, np.fft.ifft
    for n in range(1, n_steps + 1):
        for kinetic, phase in ops:
            u = ifft(phase * fft(u)) if kinetic else phase * u
        if n % sample_every == 0 or n == n_steps:
            t = state0.t + n * h
            if not np.all(np.isfinite(u)):
                raise DivergenceError(t)
            times.append(t)
            energies.append(energy(grid, u))
            norms.append(norm(grid, u))
    return Propagation(
        WaveState(u, state0.t + t_final), np.array(times), np.array(energies), np.array(norms), h, n_steps
    )


def l2_distance(grid: SpectralGrid, u: np.ndarray, w: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(u - w) ** 2) * grid.dx))


@dataclass
class SpectralConvergence:
    slope: float
    h: list[float]
    errors: list[float]


def convergence_slope(
    scheme: SplittingScheme,
    grid: SpectralGrid,
    state0: WaveState,
    h_list: Sequence[float],
    t_final: float,
    ref_divisor: int = 16,
    swap_roles: bool = False,
) -> SpectralConvergence:
    """Least-squares slope of log2(final-state L2 error) against log2(h).

    The reference is the same scheme at ``min(h_list) / ref_divisor``.
    """
    h_list = sorted(float(h) for h in h_list)
    if len(h_list) < 4:
        raise ValueError("need at least 4 step sizes")
    quiet = 10**9  # only the final state is needed

    def final(h):
        return propagate(scheme, grid, state0, h, t_final, sample_every=quiet, swap_roles=swap_roles).final.u

    ref = final(h_list[0] / ref_divisor)
    errors = [l2_distance(grid, final(h), ref) for h in h_list]
    slope = float(np.polyfit(np.log2(h_list), np.log2(errors), 1)[0])
    return SpectralConvergence(slope, h_list, errors)

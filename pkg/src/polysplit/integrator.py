"""Drift/kick flows, one-step maps and FSAL-aware trajectory integration."""

from __future__ import annotations

import functools
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .schemes import SplittingScheme
from .systems import PhaseState, SeparableSystem, energy


class DivergenceError(RuntimeError):
    def __init__(self, t: float):
        super().__init__(f"non-finite state encountered at t = {t:g}")
        self.t = t


class DesignClassWarning(UserWarning):
    """The system's force degree exceeds what the scheme's design class assumes."""


@dataclass
class StepCounter:
    steps: int = 0
    force_evals: int = 0


@dataclass
class Trajectory:
    times: np.ndarray
    energies: np.ndarray
    states: list[PhaseState]
    counter: StepCounter
    h: float
    h_requested: float

    @property
    def rel_energy_error(self) -> np.ndarray:
        e0 = self.energies[0]
        return (self.energies - e0) / e0

    @property
    def max_rel_energy_error(self) -> float:
        return float(np.max(np.abs(self.rel_energy_error)))

    @property
    def final(self) -> PhaseState:
        return self.states[-1]

    def to_csv(self, path) -> None:
        rel = self.rel_energy_error
        lines = ["t,E,rel_energy_error"]
        lines += [f"{t!r},{e!r},{r!r}" for t, e, r in zip(self.times.tolist(), self.energies.tolist(), rel.tolist())]
        Path(path).write_text("\n".join(lines) + "\n")
        sidecar = {
            "steps": self.counter.steps,
            "force_evals": self.counter.force_evals,
            "h_requested": self.h_requested,
            "h_actual": self.h,
        }
        Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2) + "\n")


def drift(state: PhaseState, tau: float, mass: float = 1.0) -> PhaseState:
    return PhaseState(state.q + (tau / mass) * state.p, state.p, state.t + tau)


def kick(system: SeparableSystem, state: PhaseState, tau: float) -> PhaseState:
    return PhaseState(state.q, state.p + (tau * system.mass) * system.force(state.q), state.t)


def check_design_class(scheme: SplittingScheme, system: SeparableSystem) -> bool:
    """Warn and return False when the scheme's nominal order is not guaranteed."""
    limit = scheme.degree_limit
    if limit is not None and system.force_degree > limit:
        warnings.warn(
            f"{scheme.name} is designed for force polynomials of degree <= {limit}, "
            f"but {system.label} has degree {system.force_degree}; nominal order "
            f"{scheme.order} is not guaranteed",
            DesignClassWarning,
            stacklevel=2,
        )
        return False
    return True


def _apply(ops, system, q, p, force, counter):
    """Run a flow sequence in place of (q, p). ``force`` caches g(q) between drifts."""
    inv_m = 1.0 / system.mass
    m = system.mass
    for kind, tau in ops:
        if kind == "A":
            if tau != 0.0:
                q = q + (tau * inv_m) * p
                force = None
        else:
            if force is None:
                force = system.force(q)
                counter.force_evals += 1
            p = p + (tau * m) * force
    return q, p, force


def step(scheme: SplittingScheme, system: SeparableSystem, state: PhaseState, h: float) -> PhaseState:
    """One step; executes ``scheme.flows()`` in order (first drift of ABA first)."""
    if state.dim != system.dim:
        raise ValueError(f"state has dimension {state.dim}, system {system.dim}")
    ops = [(k, c * h) for k, c in scheme.flows()]
    q, p, _ = _apply(ops, system, state.q, state.p, None, StepCounter())
    return PhaseState(q, p, state.t + h)


def _quiet_overflow(fn):
    # blow-up is reported through DivergenceError, not numpy warnings
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)

    return wrapper


@_quiet_overflow
def integrate(
    scheme: SplittingScheme,
    system: SeparableSystem,
    state0: PhaseState,
    h: float,
    t_final: float,
    sample_every: int = 1,
    store_states: bool = True,
) -> Trajectory:
    """Integrate from ``state0.t`` over ``t_final`` with ``N = round(t_final / h)`` steps.

    ``h`` is adjusted to ``t_final / N``. Adjacent like flows across step
    boundaries share work: a BAB closing kick and the next opening kick reuse
    one force evaluation, so the cost is ``s*N`` for ABA and ``s*N + 1`` for BAB.
    Energy is sampled every ``sample_every`` steps plus at both ends.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    if state0.dim != system.dim:
        raise ValueError(f"state has dimension {state0.dim}, system {system.dim}")
    n_steps = max(1, round(t_final / h))
    h_actual = t_final / n_steps
    ops = [(k, c * h_actual) for k, c in scheme.flows()]

    counter = StepCounter()
    q, p, t0 = state0.q, state0.p, state0.t
    force = None
    times = [t0]
    energies = [energy(system, state0)]
    states = [state0] if store_states else []
    last = state0
    for n in range(1, n_steps + 1):
        q, p, force = _apply(ops, system, q, p, force, counter)
        counter.steps = n
        if n % sample_every == 0 or n == n_steps:
            t = t0 + n * h_actual
            if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
                raise DivergenceError(t)
            last = PhaseState(q, p, t)
            times.append(t)
            energies.append(energy(system, last))
            if store_states:
                states.append(last)
    if not store_states:
        states = [state0, last]
    energies = np.array(energies)
    if not np.all(np.isfinite(energies)):
        raise DivergenceError(times[int(np.argmin(np.isfinite(energies)))])
    return Trajectory(np.array(times), energies, states, counter, h_actual, float(h))


def expected_force_evals(scheme: SplittingScheme, steps: int) -> int:
    """Closed-form cost of ``integrate`` in force evaluations."""
    if steps == 0:
        return 0
    startup = 0 if scheme.kind == "ABA" else 1
    return scheme.stages * steps + startup


def symmetry_defect(
    scheme: SplittingScheme, system: SeparableSystem, state: PhaseState, h: float
) -> float:
    """``|psi_{-h}(psi_h(x)) - x|_inf``."""
    back = step(scheme, system, step(scheme, system, state, h), -h)
    return float(np.max(np.abs(back.as_vector() - state.as_vector())))


SYMPLECTIC_FD_EPS = 1e-6


def one_step_jacobian(one_step, state: PhaseState, eps: float = SYMPLECTIC_FD_EPS) -> np.ndarray:
    x0 = state.as_vector()
    n = x0.shape[0]
    delta = eps * max(1.0, float(np.max(np.abs(x0))))
    jac = np.empty((n, n))
    for j in range(n):
        xp = x0.copy()
        xm = x0.copy()
        xp[j] += delta
        xm[j] -= delta
        fp = one_step(PhaseState.from_vector(xp, state.t)).as_vector()
        fm = one_step(PhaseState.from_vector(xm, state.t)).as_vector()
        jac[:, j] = (fp - fm) / (2.0 * delta)
    return jac


def canonical_form(dim: int) -> np.ndarray:
    eye = np.eye(dim)
    zero = np.zeros((dim, dim))
    return np.block([[zero, eye], [-eye, zero]])


def symplecticity_defect_of(one_step, state: PhaseState) -> float:
    jac = one_step_jacobian(one_step, state)
    omega = canonical_form(state.dim)
    return float(np.max(np.abs(jac.T @ omega @ jac - omega)))


def symplecticity_defect(
    scheme: SplittingScheme, system: SeparableSystem, state: PhaseState, h: float
) -> float:
    """``|J^T Omega J - Omega|_inf`` with J from central differences of the step map."""
    return symplecticity_defect_of(lambda x: step(scheme, system, x, h), state)


def max_norm(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if len(x) else 0.0


def state_distance(x: PhaseState, y: PhaseState) -> float:
    return max_norm(x.as_vector() - y.as_vector())


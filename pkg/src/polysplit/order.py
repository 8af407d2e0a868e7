"""Low-order omega polynomials and empirical convergence order."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .integrator import check_design_class, integrate, state_distance
from .schemes import SplittingScheme
from .systems import PhaseState, SeparableSystem


@dataclass(frozen=True)
class OmegaReport:
    w11: float
    w12: float
    w21: float
    w31: float
    w32: float

    def as_dict(self) -> dict:
        return asdict(self)


def omega(scheme: SplittingScheme) -> OmegaReport:
    """Evaluate w11 .. w32 on the scheme's flow sequence.

    Index conditions such as ``i < j <= k`` in ``sum a_i b_j a_k`` are read
    positionally: a_i occurs before b_j, which occurs before a_k, in the order
    the flows are executed. This covers ABA and BAB alike. With this reading
    Strang gives (1, 1, 0, -1/24, 1/12), i.e. w31 multiplies [A,[A,B]] and
    w32 multiplies [B,[B,A]] in the log of the composition.
    """
    flows = scheme.flows()
    w11 = math.fsum(scheme.a)
    w12 = math.fsum(scheme.b)

    # a_before / b_before: sums of each kind executed before the current flow
    a_before = b_before = 0.0
    ba = aba = bab = 0.0
    for kind, c in flows:
        if kind == "A":
            ba += b_before * c
            bab += b_before * c * (w12 - b_before)
            a_before += c
        else:
            aba += a_before * c * (w11 - a_before)
            b_before += c
    w21 = 0.5 * w11 * w12 - ba
    w31 = w11 * w11 * w12 / 12.0 - 0.5 * aba
    w32 = w11 * w12 * w12 / 12.0 - 0.5 * bab
    return OmegaReport(w11, w12, w21, w31, w32)


# independent commutators at order r = 1..9, per technique (s, n, l, l3, l4)
COMMUTATOR_COUNTS = {
    "s": (1, 0, 1, 1, 2, 2, 4, 5, 8),
    "n": (2, 1, 2, 3, 6, 9, 18, 30, 56),
    "l": (2, 1, 2, 2, 4, 5, 10, 14, 25),
    "l3": (2, 1, 2, 2, 3, 3, 6, 6, 10),
    "l4": (2, 1, 2, 2, 4, 4, 8, 10, 18),
}

# minimum stages of symmetric methods of order r, per technique
MIN_STAGES_ORDERS = (2, 4, 6, 8, 10)
MIN_STAGES = {
    "S": (1, 3, 7, 15, 31),
    "N": (1, 3, 9, 27, 83),
    "L": (1, 3, 7, 17, 42),
    "L3": (1, 3, 6, 12, 22),
    "L4": (1, 3, 7, 15, 33),
}


def commutator_count(technique: str, r: int) -> int:
    return COMMUTATOR_COUNTS[technique][r - 1]


def min_stages(technique: str, r: int) -> int:
    return MIN_STAGES[technique][MIN_STAGES_ORDERS.index(r)]


class OrderWindowError(ValueError):
    """Step sizes fall outside the asymptotic error window."""


ERROR_FLOOR = 1e-14
ERROR_CEILING = 1e-1


@dataclass
class OrderEstimate:
    slope: float
    h: list[float]
    errors: list[float]


def design_class_guard(scheme: SplittingScheme, system: SeparableSystem) -> str:
    return "ok" if check_design_class(scheme, system) else "warning"


def global_errors(
    scheme: SplittingScheme,
    system: SeparableSystem,
    state0: PhaseState,
    h_list: Sequence[float],
    t_probe: float,
    reference: PhaseState | Callable[[PhaseState, float], PhaseState] | None = None,
) -> list[float]:
    """Phase-space max-norm errors at ``t_probe`` for each step size."""
    if reference is None:
        if system.exact is not None:
            ref = system.exact(state0, t_probe)
        else:
            h_ref = min(h_list) / 8.0
            ref = integrate(scheme, system, state0, h_ref, t_probe, store_states=False).final
    elif callable(reference):
        ref = reference(state0, t_probe)
    else:
        ref = reference
    errs = []
    for h in h_list:
        x = integrate(scheme, system, state0, h, t_probe, store_states=False).final
        errs.append(state_distance(x, ref))
    return errs


def fit_slope(h_list: Sequence[float], errors: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log2(h_list), np.log2(errors), 1)
    return float(slope)


def convergence_study(
    scheme: SplittingScheme,
    system: SeparableSystem,
    state0: PhaseState,
    h_list: Sequence[float],
    t_probe: float,
    reference=None,
    floor: float = ERROR_FLOOR,
    ceiling: float = ERROR_CEILING,
) -> OrderEstimate:
    """Global errors at ``t_probe`` and the least-squares slope of log2(error) vs log2(h).

    Step sizes that do not divide ``t_probe`` are rounded to the step actually
    taken; ``OrderEstimate.h`` holds those values.

    The reference is the system's exact flow when it has one, otherwise the
    same scheme at ``min(h_list) / 8``.
    """
    h_list = sorted(float(h) for h in h_list)
    if len(h_list) < 4:
        raise OrderWindowError("need at least 4 step sizes")
    for h0, h1 in zip(h_list, h_list[1:]):
        if not math.isclose(h1 / h0, 2.0, rel_tol=1e-9):
            raise OrderWindowError("step sizes must form a geometric sequence with ratio 2")
    errors = global_errors(scheme, system, state0, h_list, t_probe, reference)
    for h, e in zip(h_list, errors):
        if not (floor <= e <= ceiling):
            raise OrderWindowError(
                f"error {e:.3e} at h={h:g} lies outside [{floor:g}, {ceiling:g}]; "
                "choose step sizes inside the asymptotic window"
            )
    # integrate() rounds t_probe / h to whole steps; fit against the steps taken
    h_used = [t_probe / max(1, round(t_probe / h)) for h in h_list]
    return OrderEstimate(fit_slope(h_used, errors), h_used, errors)


def empirical_order(
    scheme: SplittingScheme,
    system: SeparableSystem,
    state0: PhaseState,
    h_list: Sequence[float],
    t_probe: float,
    reference=None,
) -> float:
    """Convergence slope; see :func:`convergence_study` for the protocol."""
    return convergence_study(scheme, system, state0, h_list, t_probe, reference).slope

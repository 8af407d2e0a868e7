"""Splitting-scheme coefficient sets: built-ins, validation, composition and file I/O.

Coefficients are always held fully expanded. For an ABA scheme with ``s``
stages the flow sequence is::

    drift(a[0] h), kick(b[0] h), drift(a[1] h), ..., kick(b[s-1] h), drift(a[s] h)

so ``len(a) == s + 1`` and ``len(b) == s``. BAB swaps the roles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

KINDS = ("ABA", "BAB")
DESIGNS = ("general", "rkn", "cubic", "quartic")

SUM_TOL = 1e-13
L1_TOL = 5e-4


class SchemeError(ValueError):
    """Raised for unknown, malformed or invalid coefficient sets."""


@dataclass(frozen=True)
class SplittingScheme:
    name: str
    order: int
    stages: int
    kind: str
    design: str
    a: tuple[float, ...]
    b: tuple[float, ...]
    l1_declared: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemeError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.design not in DESIGNS:
            raise SchemeError(f"design must be one of {DESIGNS}, got {self.design!r}")
        if self.order < 1 or self.stages < 1:
            raise SchemeError("order and stages must be positive")
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        s = self.stages
        if self.kind == "ABA":
            if len(self.a) != s + 1 or len(self.b) != s:
                raise SchemeError(
                    f"{self.name}: ABA with s={s} needs len(a)=s+1 and len(b)=s, "
                    f"got {len(self.a)} and {len(self.b)}"
                )
        else:
            if len(self.b) != s + 1 or len(self.a) != s:
                raise SchemeError(
                    f"{self.name}: BAB with s={s} needs len(b)=s+1 and len(a)=s, "
                    f"got {len(self.b)} and {len(self.a)}"
                )

    def flows(self) -> list[tuple[str, float]]:
        """Return the flow sequence as ``("A"|"B", coefficient)`` pairs, first-executed first."""
        if self.kind == "ABA":
            first, second, x, y = "A", "B", self.a, self.b
        else:
            first, second, x, y = "B", "A", self.b, self.a
        seq = []
        for j in range(self.stages):
            seq.append((first, x[j]))
            seq.append((second, y[j]))
        seq.append((first, x[self.stages]))
        return seq

    @property
    def degree_limit(self) -> int | None:
        """Highest force-polynomial degree the design class assumes (``None`` = any)."""
        return {"cubic": 2, "quartic": 3}.get(self.design)


@dataclass
class SchemeValidationReport:
    symmetry_ok: bool
    sum_a: float
    sum_b: float
    l1_computed: float
    l1_matches: bool
    messages: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return (
            self.symmetry_ok
            and abs(self.sum_a - 1.0) <= SUM_TOL
            and abs(self.sum_b - 1.0) <= SUM_TOL
        )


def l1_norm(scheme: SplittingScheme) -> float:
    return math.fsum(abs(x) for x in scheme.a) + math.fsum(abs(x) for x in scheme.b)


def _is_palindrome(seq: Sequence[float]) -> bool:
    return all(x == y for x, y in zip(seq, reversed(seq)))


def validate(scheme: SplittingScheme) -> SchemeValidationReport:
    messages = []
    sym_a = _is_palindrome(scheme.a)
    sym_b = _is_palindrome(scheme.b)
    if not sym_a:
        messages.append("a is not palindromic")
    if not sym_b:
        messages.append("b is not palindromic")
    sum_a = math.fsum(scheme.a)
    sum_b = math.fsum(scheme.b)
    if abs(sum_a - 1.0) > SUM_TOL:
        messages.append(f"sum(a) = {sum_a!r} differs from 1 by more than {SUM_TOL}")
    if abs(sum_b - 1.0) > SUM_TOL:
        messages.append(f"sum(b) = {sum_b!r} differs from 1 by more than {SUM_TOL}")
    l1 = l1_norm(scheme)
    l1_ok = True
    if scheme.l1_declared is not None:
        l1_ok = abs(l1 - scheme.l1_declared) <= L1_TOL
        if not l1_ok:
            messages.append(
                f"l1 norm {l1:.6f} does not match declared {scheme.l1_declared}"
            )
    return SchemeValidationReport(sym_a and sym_b, sum_a, sum_b, l1, l1_ok, messages)


def _mirror_odd(half: Sequence[float], middle: float) -> tuple[float, ...]:
    # h0 .. h_{k-1}, middle, h_{k-1} .. h0
    return tuple(half) + (middle,) + tuple(reversed(half))


def _mirror_even(half: Sequence[float]) -> tuple[float, ...]:
    return tuple(half) + tuple(reversed(half))


def _ca11_6() -> SplittingScheme:
    a = [
        0.042694933980191700,
        -0.037632511090066230,
        0.219222765218418850,
        0.172304948988733900,
        -0.866412097755661100,
    ]
    b = [
        0.162759370295069398,
        -0.0319763989469851006,
        0.193876531329159266,
        0.153628407800734632,
        -0.000976972075829582387,
    ]
    a_full = _mirror_even(a + [0.5 - math.fsum(a)])
    b_full = _mirror_odd(b, 1.0 - 2.0 * math.fsum(b))
    return SplittingScheme("CA11_6", 6, 11, "ABA", "cubic", a_full, b_full, 5.748)


def _ca12_8() -> SplittingScheme:
    a = [
        0.249757865893252399,
        0.00573645298706788704,
        -0.205722262874388455,
        0.205575388768639098,
        -0.271817217898894439,
        0.489641667780589551,
    ]
    b = [
        0.213843067589222296,
        -0.19020545357715192,
        0.152112874905099611,
        0.230725630134443253,
        -0.0190391037211012732,
    ]
    a_full = _mirror_odd(a, 1.0 - 2.0 * math.fsum(a))
    b_full = _mirror_even(b + [0.5 - math.fsum(b)])
    return SplittingScheme("CA12_8", 8, 12, "ABA", "cubic", a_full, b_full, 4.747)


def _ca22_10() -> SplittingScheme:
    a = [
        0.0449093524320847274,
        0.206215756187292034,
        0.283122139467291742,
        -0.0467135692211750245,
        0.191753353873687573,
        -0.30261984583857599,
        0.403507309497133283,
        -0.411843791732104965,
        0.532623166827988789,
        -0.672573105536616394,
        0.585892787986557426,
    ]
    b = [
        0.12962054755858581,
        0.28538465968498975,
        0.447546675818306977,
        -0.223172488593771899,
        -0.168587763117298738,
        -0.152330297495996805,
        0.0357528743187445468,
        0.109308117709693938,
        -0.0278888594069430645,
        0.0874141139842583174,
    ]
    a_full = _mirror_odd(a, 1.0 - 2.0 * math.fsum(a))
    # The published closure for b[10] sums the a's; summing the b's is the
    # only reading that keeps sum(b) == 1.
    b_full = _mirror_even(b + [0.5 - math.fsum(b)])
    return SplittingScheme("CA22_10", 10, 22, "ABA", "cubic", a_full, b_full, 11.372)


def _qa19_8() -> SplittingScheme:
    a = [
        0.017198824867539785,
        0.102745265073641400,
        0.184885965868561040,
        -0.219582702854432000,
        0.114544474826412145,
        -0.0380031092293327718,
        0.112642307911035366,
        0.121499361307126452,
        0.169053217437104066,
    ]
    b = [
        0.0575638169530652679,
        0.107137729341092432,
        0.0185107295436068784,
        -0.0195107639666207008,
        -0.0766782391416861259,
        0.134395138847794067,
        0.110620560134710358,
        0.137518059034892416,
        -0.0368744345203615847,
    ]
    a_full = _mirror_even(a + [0.5 - math.fsum(a)])
    b_full = _mirror_odd(b, 1.0 - 2.0 * math.fsum(b))
    return SplittingScheme("QA19_8", 8, 19, "ABA", "quartic", a_full, b_full, 3.822)


def _strang() -> SplittingScheme:
    return SplittingScheme("strang", 2, 1, "ABA", "general", (0.5, 0.5), (1.0,), 2.0)


_BUILTINS = {
    "strang": _strang,
    "CA11_6": _ca11_6,
    "CA12_8": _ca12_8,
    "CA22_10": _ca22_10,
    "QA19_8": _qa19_8,
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin_scheme(name: str) -> SplittingScheme:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise SchemeError(
            f"unknown scheme {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}"
        ) from None


def compose_strang(
    alphas: Iterable[float], name: str = "SS", order: int = 2, design: str = "general"
) -> SplittingScheme:
    """Expand a symmetric composition of Strang steps into an ABA scheme.

    Each kernel is ``drift(alpha/2) kick(alpha) drift(alpha/2)``; adjacent
    half drifts are merged.
    """
    alphas = [float(x) for x in alphas]
    if not alphas:
        raise SchemeError("invalid composition: empty alpha sequence")
    if not _is_palindrome(alphas):
        raise SchemeError("invalid composition: alphas are not palindromic")
    total = math.fsum(alphas)
    if abs(total - 1.0) > SUM_TOL:
        raise SchemeError(f"invalid composition: sum(alphas) = {total!r} != 1")
    n = len(alphas)
    a = [alphas[0] / 2]
    for j in range(1, n):
        a.append((alphas[j - 1] + alphas[j]) / 2)
    a.append(alphas[-1] / 2)
    return SplittingScheme(name, order, n, "ABA", design, a, alphas)


def scheme_to_dict(scheme: SplittingScheme) -> dict:
    out = {
        "name": scheme.name,
        "order": scheme.order,
        "stages": scheme.stages,
        "kind": scheme.kind,
        "design": scheme.design,
        "a": list(scheme.a),
        "b": list(scheme.b),
    }
    if scheme.l1_declared is not None:
        out["l1"] = scheme.l1_declared
    return out


def scheme_from_dict(data: dict) -> SplittingScheme:
    if not isinstance(data, dict):
        raise SchemeError("coefficient file must hold a JSON object")
    try:
        if "alphas" in data:
            alphas = data["alphas"]
            return compose_strang(
                alphas,
                name=str(data.get("name", "SS")),
                order=int(data.get("order", 2)),
                design=str(data.get("design", "general")),
            )
        scheme = SplittingScheme(
            name=str(data["name"]),
            order=int(data["order"]),
            stages=int(data["stages"]),
            kind=str(data["kind"]),
            design=str(data.get("design", "general")),
            a=tuple(data["a"]),
            b=tuple(data["b"]),
            l1_declared=None if data.get("l1") is None else float(data["l1"]),
        )
    except KeyError as exc:
        raise SchemeError(f"coefficient file is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemeError):
            raise
        raise SchemeError(f"malformed coefficient file: {exc}") from None
    return scheme


def _num(x: float) -> str:
    return format(x, ".17g")


def dumps_scheme(scheme: SplittingScheme) -> str:
    """JSON text with every coefficient written to 17 significant digits."""
    data = scheme_to_dict(scheme)
    lines = ["{"]
    for key in ("name", "order", "stages", "kind", "design"):
        lines.append(f"  {json.dumps(key)}: {json.dumps(data[key])},")
    lines.append('  "a": [' + ", ".join(_num(x) for x in data["a"]) + "],")
    tail = "," if "l1" in data else ""
    lines.append('  "b": [' + ", ".join(_num(x) for x in data["b"]) + "]" + tail)
    if "l1" in data:
        lines.append(f'  "l1": {_num(data["l1"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_scheme_file(scheme: SplittingScheme, path) -> None:
    Path(path).write_text(dumps_scheme(scheme))


def load_scheme_file(path) -> SplittingScheme:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemeError(f"{path}: not valid JSON ({exc})") from None
    scheme = scheme_from_dict(data)
    report = validate(scheme)
    if not report.accepted:
        raise SchemeError(f"{path}: scheme failed validation: " + "; ".join(report.messages))
    return scheme


def resolve_scheme(name_or_path: str) -> SplittingScheme:
    """Built-in name, or path to a coefficient file."""
    if name_or_path in _BUILTINS:
        return builtin_scheme(name_or_path)
    if Path(name_or_path).exists():
        return load_scheme_file(name_or_path)
    return builtin_scheme(name_or_path)

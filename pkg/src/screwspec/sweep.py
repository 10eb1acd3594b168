"""Parameter sweeps of the n = 1 levels, with CSV/JSON serialisation.

A sweep varies exactly one physical parameter over an inclusive linear
range and records both branches (or one) of the ground-level pair at
each value.  Missing levels (negative discriminant, complex truncation
roots) produce rows with empty energy cells rather than being dropped,
so gaps in the spectrum stay visible in the output.
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .params import InvalidParameterError, PhysicalParams
from .spectrum import (
    Branch,
    EnergyLevel,
    NegativeDiscriminantError,
    ground_state_closed_form,
    truncation_solve,
)

__all__ = [
    "SWEEPABLE_PARAMETERS",
    "SweepSpec",
    "SweepRow",
    "sweep_values",
    "sweep_rows",
    "rows_to_csv",
    "rows_to_json",
]

SWEEPABLE_PARAMETERS = ("flux", "beta", "Omega", "gamma", "omega0", "k", "ell")

CSV_HEADER = "param_value,ell,branch,energy,spectral,discriminant,termination_defect"


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep: inclusive endpoints, ``steps`` values.

    ``method`` selects the level source ("closed-form" or "truncation"
    at n = 1); ``branch`` filters to one branch or keeps both ("all").
    """

    parameter: str
    start: float
    stop: float
    steps: int
    method: str = "closed-form"
    branch: str = "all"

    def __post_init__(self) -> None:
        if self.parameter not in SWEEPABLE_PARAMETERS:
            raise InvalidParameterError(
                f"cannot sweep {self.parameter!r}; choose one of {SWEEPABLE_PARAMETERS}"
            )
        if self.steps < 2:
            raise InvalidParameterError(f"steps must be >= 2: got {self.steps}")
        if self.method not in ("closed-form", "truncation"):
            raise InvalidParameterError(
                f"method must be 'closed-form' or 'truncation': got {self.method!r}"
            )
        if self.branch not in ("plus", "minus", "all"):
            raise InvalidParameterError(
                f"branch must be 'plus', 'minus' or 'all': got {self.branch!r}"
            )


@dataclass(frozen=True)
class SweepRow:
    """One (parameter value, branch) cell of a sweep.

    ``energy``/``spectral``/``termination_defect`` are None when no real
    level exists there; ``discriminant`` is still recorded in that case
    so the gap is attributable.
    """

    param_value: float
    ell: int
    branch: str
    energy: float | None
    spectral: float | None
    discriminant: float | None
    termination_defect: float | None


def sweep_values(spec: SweepSpec) -> list[float]:
    """The inclusive linear grid of swept values.

    An ``ell`` sweep must step through integers exactly; anything else
    is rejected rather than silently rounded.
    """
    step = (spec.stop - spec.start) / (spec.steps - 1)
    values = [spec.start + i * step for i in range(spec.steps)]
    values[-1] = spec.stop
    if spec.parameter == "ell":
        for v in values:
            if v != int(v):
                raise InvalidParameterError(
                    f"an ell sweep must hit integers exactly: got {v}"
                )
    return values


def _branches(spec: SweepSpec) -> tuple[str, ...]:
    return ("minus", "plus") if spec.branch == "all" else (spec.branch,)


def _rows_at(p: PhysicalParams, spec: SweepSpec, value: float) -> list[SweepRow]:
    if spec.parameter == "ell":
        q = dataclasses.replace(p, ell=int(value))
    else:
        q = dataclasses.replace(p, **{spec.parameter: value})
    found: dict[str, EnergyLevel] = {}
    discriminant: float | None = None
    if spec.method == "closed-form":
        try:
            for lv in ground_state_closed_form(q):
                found[lv.branch.value] = lv
                discriminant = lv.discriminant
        except NegativeDiscriminantError as exc:
            discriminant = exc.discriminant
    else:
        levels = truncation_solve(q, 1)
        for lv in levels:
            discriminant = lv.discriminant
            if lv.branch is not None:
                found[lv.branch.value] = lv
            else:
                found[Branch.MINUS.value] = lv
    rows = []
    for branch in _branches(spec):
        lv = found.get(branch)
        if lv is None:
            rows.append(
                SweepRow(value, q.ell, branch, None, None, discriminant, None)
            )
        else:
            rows.append(
                SweepRow(
                    value,
                    q.ell,
                    branch,
                    lv.energy,
                    lv.spectral,
                    lv.discriminant,
                    lv.termination_defect,
                )
            )
    return rows


def sweep_rows(p: PhysicalParams, spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """All rows of a sweep, in sweep order then branch order.

    ``jobs > 1`` evaluates parameter values concurrently; the row order
    (and hence serialised output) is identical either way.
    """
    values = sweep_values(spec)
    if jobs < 1:
        raise InvalidParameterError(f"jobs must be >= 1: got {jobs}")
    if jobs == 1:
        groups = [_rows_at(p, spec, v) for v in values]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            groups = list(pool.map(lambda v: _rows_at(p, spec, v), values))
    return [row for group in groups for row in group]


def _cell(v: float | None) -> str:
    return "" if v is None else f"{v:.17g}"


def rows_to_csv(rows: list[SweepRow]) -> str:
    """Byte-stable CSV with 17 significant digits and empty missing cells."""
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.param_value:.17g},{row.ell},{row.branch},"
            f"{_cell(row.energy)},{_cell(row.spectral)},"
            f"{_cell(row.discriminant)},{_cell(row.termination_defect)}"
        )
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[SweepRow]) -> str:
    return json.dumps([dataclasses.asdict(row) for row in rows], indent=2)

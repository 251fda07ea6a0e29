"""Scenario sweeps over (alpha, gamma1) and their file artefacts."""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .equilibria import (
    coexisting_candidates,
    coexisting_quartic,
    coexisting_stability,
    tumor_free_existence,
    tumor_free_stability,
    tumor_free_equilibrium,
)
from .errors import MarginalCase, NonexistentEquilibrium
from .model import ModelParams
from .optimizer import OptimalSolution, Scenario, evaluate_cost, forward_backward_sweep
from .solver import solve_adjoint, solve_state
from .trajectories import ControlSchedule

__all__ = [
    "CSV_HEADER",
    "CellResult",
    "SweepResult",
    "run_cell",
    "run_sweep",
    "emit_trajectory_csv",
    "emit_table_csv",
    "emit_equilibrium_report",
    "format_number",
    "cell_filename",
]

CSV_HEADER = "t,T,I,F,D1,D2,u1,u2,lambda1,lambda2,lambda3,lambda4,lambda5"


def format_number(x: float) -> str:
    # shortest string that round-trips, so outputs are exact and stable
    return repr(float(x))


def cell_filename(alpha: float, gamma1: float) -> str:
    return f"cell_{float(alpha)!r}_{float(gamma1)!r}.csv"


@dataclass(frozen=True)
class CellResult:
    alpha: float
    gamma1: float
    scenario: str
    cost: float | None
    sweeps_used: int
    converged: bool
    path: str | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.converged


@dataclass(frozen=True)
class SweepResult:
    cells: dict  # (alpha, gamma1, scenario) -> CellResult
    alpha_list: tuple
    gamma1_list: tuple
    scenario: str
    output_dir: str

    @property
    def failures(self) -> list[CellResult]:
        return [c for c in self.cells.values() if not c.ok]

    def cost_table(self) -> np.ndarray:
        """Costs with rows alpha and columns gamma1; NaN where a cell failed."""
        out = np.full((len(self.alpha_list), len(self.gamma1_list)), np.nan)
        for i, a in enumerate(self.alpha_list):
            for j, g in enumerate(self.gamma1_list):
                c = self.cells[(a, g, self.scenario)]
                if c.cost is not None:
                    out[i, j] = c.cost
        return out


def _uncontrolled(params: ModelParams, cfg: RunConfig) -> OptimalSolution:
    grid = cfg.grid
    controls = ControlSchedule.constant(grid, 0.0, 0.0)
    states = solve_state(params, controls, cfg.x0, grid, cfg.newton_cfg)
    adjoints = solve_adjoint(params, states, grid)
    return OptimalSolution(
        controls=controls,
        states=states,
        adjoints=adjoints,
        cost=evaluate_cost(states, controls, params),
        sweeps_used=0,
        psi_final=0.0,
    )


def solve_cell(cfg: RunConfig, alpha: float, gamma1: float) -> OptimalSolution:
    """Optimal (or, for the uncontrolled scenario, plain) solution of one cell."""
    params = cfg.params.replace(alpha=alpha, gamma1=gamma1)
    if cfg.scenario is Scenario.UNCONTROLLED:
        return _uncontrolled(params, cfg)
    grid = cfg.grid
    u_init = ControlSchedule.constant(grid, *cfg.u_init)
    return forward_backward_sweep(
        params, cfg.x0, u_init, grid, cfg.sweep_cfg, cfg.newton_cfg,
        scenario=cfg.scenario, raise_on_cap=False,
    )


def run_cell(cfg: RunConfig, alpha: float, gamma1: float) -> CellResult:
    """Solve one cell and write its trajectory; failures are captured, not raised."""
    path = Path(cfg.output_dir) / cell_filename(alpha, gamma1)
    try:
        sol = solve_cell(cfg, alpha, gamma1)
        emit_trajectory_csv(sol, path)
    except Exception as exc:  # one bad cell must not sink its siblings
        return CellResult(alpha, gamma1, cfg.scenario.value, None, 0, False, None,
                          f"{type(exc).__name__}: {exc}")
    error = None if math.isfinite(sol.cost) else "non-finite cost"
    return CellResult(
        alpha, gamma1, cfg.scenario.value,
        sol.cost if error is None else None,
        sol.sweeps_used, sol.converged, str(path), error,
    )


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(cfg: RunConfig) -> SweepResult:
    """Run every (alpha, gamma1) cell of ``cfg`` and write ``table.csv``."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, a, g) for a in cfg.alpha_list for g in cfg.gamma1_list]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_cell_args, jobs))
    else:
        results = [_run_cell_args(j) for j in jobs]
    cells = {(r.alpha, r.gamma1, r.scenario): r for r in results}
    result = SweepResult(cells, tuple(cfg.alpha_list), tuple(cfg.gamma1_list),
                         cfg.scenario.value, str(out))
    emit_table_csv(result, out / "table.csv")
    return result


def _write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit_trajectory_csv(solution: OptimalSolution, path) -> Path:
    """Write the trajectory of ``solution`` as CSV, one row per grid point."""
    grid = solution.states.grid
    table = np.column_stack(
        [grid.times, solution.states.values, solution.controls.values, solution.adjoints.values]
    )
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for row in table:
        buf.write(",".join(format_number(v) for v in row) + "\n")
    return _write_text(path, buf.getvalue())


def emit_table_csv(result: SweepResult, path) -> Path:
    """Cost grid: rows alpha, columns gamma1; failed cells are left empty."""
    lines = ["alpha," + ",".join(f"gamma1={format_number(g)}" for g in result.gamma1_list)]
    table = result.cost_table()
    for a, row in zip(result.alpha_list, table):
        cells = ["" if math.isnan(v) else format_number(v) for v in row]
        lines.append(",".join([format_number(a)] + cells))
    return _write_text(path, "\n".join(lines) + "\n")


# --- equilibrium report ----------------------------------------------------


def _fmt_vec(values) -> str:
    return "[" + ", ".join(format_number(v) for v in values) + "]"


def _fmt_eig(values) -> str:
    parts = []
    for z in values:
        z = complex(z)
        parts.append(format_number(z.real) if z.imag == 0 else
                     f"{format_number(z.real)}{'+' if z.imag >= 0 else '-'}{format_number(abs(z.imag))}j")
    return "[" + ", ".join(parts) + "]"


def _sorted_eig(values) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    return v[np.lexsort((v.imag, v.real))]


def _cond_lines(conditions: dict) -> list[str]:
    out = []
    for name, c in conditions.items():
        if hasattr(c, "holds"):
            out.append(f"  {name}: {'holds' if c.holds else 'fails'} (margin {format_number(c.margin)})")
        elif isinstance(c, (bool, np.bool_)) or c is None or isinstance(c, str):
            out.append(f"  {name}: {c}")
        else:
            out.append(f"  {name}: {format_number(c)}")
    return out


_CASE_TEXT = {1: "case (1): no coexisting equilibrium"}


def equilibrium_report(params: ModelParams, u1: float, u2: float) -> str:
    """Text report on the tumour-free and coexisting equilibria at constant doses."""
    lines = [
        "equilibrium report",
        f"alpha = {format_number(params.alpha)}",
        f"u1 = {format_number(u1)}",
        f"u2 = {format_number(u2)}",
        "",
        "[tumor-free]",
    ]
    for name, c in tumor_free_existence(params, u1, u2).items():
        lines.append(f"  existence {name}: {'holds' if c.holds else 'fails'} (margin {format_number(c.margin)})")
    try:
        eq = tumor_free_equilibrium(params, u1, u2)
    except NonexistentEquilibrium as exc:
        lines.append(f"  point: none ({exc.condition} violated)")
    else:
        lines.append(f"  point (T, I, F, D1, D2): {_fmt_vec(eq.point)}")
        lines.append(f"  residual: {format_number(eq.residual)}")
        rep = tumor_free_stability(params, u1, u2)
        lines.append(f"  eigenvalues: {_fmt_eig(_sorted_eig(rep.eigenvalues))}")
        lines += _cond_lines(rep.conditions)
        lines.append(f"  matignon margin: {format_number(rep.matignon_margin)}")
        lines.append(f"  verdict: {rep.verdict}")

    lines += ["", "[coexisting]"]
    quart = coexisting_quartic(params, u1, u2)
    m4, m3, m2, m1, m0 = quart.coeffs
    case = quart.descartes_case
    lines.append(f"  quartic coefficients (m4..m0): {_fmt_vec(quart.coeffs)}")
    lines.append(f"  descartes case: {case if case is not None else 'unclassified (zero coefficient)'}")
    if case in _CASE_TEXT:
        lines.append(f"  {_CASE_TEXT[case]}")
    lines.append(f"  tumor bound: {format_number(quart.tumor_bound)}")
    lines.append(f"  immune bound: {format_number(quart.immune_bound)}")
    cands = coexisting_candidates(params, u1, u2)
    lines.append(f"  admissible points: {len(cands)}")
    for n, eq in enumerate(cands, start=1):
        lines.append(f"  point {n} (T, I, F, D1, D2): {_fmt_vec(eq.point)}")
        lines.append(f"    root I: {format_number(eq.details['root'])}")
        lines.append(f"    residual: {format_number(eq.residual)}")
        try:
            rep = coexisting_stability(eq, params)
        except MarginalCase as exc:
            rep = exc.report
        lines.append(f"    eigenvalues: {_fmt_eig(_sorted_eig(rep.eigenvalues))}")
        lines += ["  " + s for s in _cond_lines(rep.conditions)]
        lines.append(f"    matignon margin: {format_number(rep.matignon_margin)}")
        lines.append(f"    verdict: {rep.verdict}")
    return "\n".join(lines) + "\n"


def emit_equilibrium_report(params: ModelParams, u1: float, u2: float, path) -> Path:
    return _write_text(path, equilibrium_report(params, u1, u2))

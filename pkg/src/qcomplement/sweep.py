"""Parameter sweeps behind the figures, CSV datasets and the printed-formula audit."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .correlations import average_discord, discord, geometric_discord, negativity
from .errors import DomainError
from .machines import (
    XI_MAX,
    XI_MIN,
    alpha_from_fdel,
    bh_clone,
    clone1N_then_deleteNM,
    clone_then_delete,
    delete_2to1,
    delete_then_clone,
    deleteN1_then_clone1M,
)
from .measurements import OptimizerConfig
from .paper_formulas import (
    CLONE_IDS,
    DELETE_IDS,
    FormulaId,
    evaluate,
    f3_from_xi,
    printed_clone_delete_mode,
    printed_delete_clone_mode,
)
from .qmat import DensityMatrix, QubitState, partial_trace

FIGURES = tuple(f"fig{k}" for k in range(1, 10))
DEFAULT_STEPS = 101
DISCORD_GRID_CAP = 51
MULTI_ALPHA_STEPS = 21
CONSISTENT_TOL = 1e-6
REDUCTION_TOL = 1e-10
F_CL_RANGE = (0.5, 5.0 / 6.0)
F_DEL_RANGE = (0.75, 1.0)

# (N, M) cases of the multiqubit figures, in caption order
CLONE_DELETE_CASES = ((3, 1), (3, 2), (4, 1), (4, 2), (4, 3))
DELETE_CLONE_CASES = ((3, 2), (3, 3), (4, 2), (4, 3), (4, 4))


@dataclass(frozen=True)
class SweepConfig:
    """Sweep resolution, optimizer settings and output location.

    ``alpha_steps`` / ``param_steps`` of ``None`` pick per-figure defaults:
    101 points, capped at 51 for discord surfaces and 21 alpha points for the
    multiqubit curves. ``criterion_tol`` replaces every acceptance tolerance
    when set.
    """

    alpha_steps: int | None = None
    param_steps: int | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 0
    out_dir: Path = Path("out")
    criterion_tol: float | None = None

    def __post_init__(self):
        for name in ("alpha_steps", "param_steps"):
            v = getattr(self, name)
            if v is not None and int(v) < 2:
                raise ValueError(f"{name} must be >= 2, got {v!r}")
        if self.criterion_tol is not None and self.criterion_tol < 0:
            raise ValueError("criterion_tol must be non-negative")

    @property
    def opt(self) -> OptimizerConfig:
        return replace(self.optimizer, seed=self.seed)

    def steps(self, which: str, default: int) -> int:
        v = self.alpha_steps if which == "alpha" else self.param_steps
        return default if v is None else int(v)

    def config_hash(self) -> str:
        d = asdict(self)
        d.pop("out_dir")
        blob = json.dumps(d, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class FigureDataset:
    figure: str
    columns: tuple[str, ...]
    rows: list[tuple]
    provenance: dict[str, str]
    sort_keys: tuple[str, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.provenance.items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def write(self, out_dir: Path | str) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{self.figure}.csv"
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())
        return path

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)

    def validate(self) -> None:
        """Schema checks: known columns, finite cells, sorted rows."""
        if tuple(self.columns) != SCHEMAS[self.figure]:
            raise ValueError(f"{self.figure}: columns {self.columns} do not match the schema")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"{self.figure}: ragged row {row}")
            for name, v in zip(self.columns, row):
                if isinstance(v, float) and math.isnan(v):
                    valid_col = name + "_valid" if name.startswith("printed") else None
                    if valid_col is None or valid_col not in self.columns:
                        raise ValueError(f"{self.figure}: empty cell in column {name}")
                    if row[self.columns.index(valid_col)] != 0:
                        raise ValueError(f"{self.figure}: empty {name} marked valid")
                elif not math.isfinite(float(v)):
                    raise ValueError(f"{self.figure}: non-finite cell in column {name}")
        keys = [tuple(r[self.columns.index(k)] for k in self.sort_keys) for r in self.rows]
        if keys != sorted(keys):
            raise ValueError(f"{self.figure}: rows are not sorted by {self.sort_keys}")

    @classmethod
    def read(cls, path: Path | str) -> "FigureDataset":
        text = Path(path).read_text()
        prov: dict[str, str] = {}
        body = []
        for line in text.split("\n"):
            if line.startswith("# "):
                k, _, v = line[2:].partition("=")
                prov[k] = v
            elif line:
                body.append(line)
        reader = csv.reader(body)
        columns = tuple(next(reader))
        figure = prov.get("figure", "")
        if figure not in SCHEMAS:
            raise ValueError(f"unknown figure {figure!r} in {path}")
        rows = [tuple(_parse(name, v) for name, v in zip(columns, r)) for r in reader]
        ds = cls(figure, columns, rows, prov, SORT_KEYS[figure])
        ds.validate()
        return ds


INT_COLUMNS = {"n", "m"}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return f"{v + 0.0:.12g}"  # no "-0"


def _parse(name: str, s: str):
    if name in INT_COLUMNS or name.endswith("_valid"):
        return int(s)
    return float(s) if s != "" else math.nan


_SURFACE = ("alpha", "f_cl", "numeric", "printed", "printed_valid")
_DELETE = ("f_del", "alpha_sq", "numeric", "printed", "printed_valid")
_MULTI = ("n", "m", "alpha", "delta")
_DC = (
    "alpha", "xi", "dg_aa", "printed_aa", "printed_aa_valid",
    "dg_bb", "printed_bb", "printed_bb_valid",
    "f3", "dg_cd", "printed_cd", "printed_cd_valid",
)
SCHEMAS = {
    "fig1": _SURFACE, "fig2": _SURFACE, "fig3": _SURFACE,
    "fig4": _DELETE, "fig5": _DELETE, "fig6": _DELETE,
    "fig7": _MULTI, "fig8": _DC, "fig9": _MULTI,
}
SORT_KEYS = {
    "fig1": ("alpha", "f_cl"), "fig2": ("alpha", "f_cl"), "fig3": ("alpha", "f_cl"),
    "fig4": ("f_del",), "fig5": ("f_del",), "fig6": ("f_del",),
    "fig7": ("n", "m", "alpha"), "fig8": ("alpha", "xi"), "fig9": ("n", "m", "alpha"),
}
_MEASURE_OF = {"fig1": "N", "fig2": "D", "fig3": "DG", "fig4": "N", "fig5": "D", "fig6": "DG"}


def alpha_grid(steps: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, steps)


def f_cl_grid(steps: int) -> np.ndarray:
    return np.linspace(*F_CL_RANGE, steps)


def f_del_grid(steps: int) -> np.ndarray:
    """[3/4, 1): F_del = 1 is the trivial alpha = 0 endpoint excluded from the printed domain."""
    return np.linspace(*F_DEL_RANGE, steps, endpoint=False)


def xi_grid(steps: int) -> np.ndarray:
    return np.linspace(XI_MIN, XI_MAX, steps)


def clone_state(alpha: float, f_cl: float) -> DensityMatrix:
    return bh_clone(QubitState.from_real(alpha), 1.0 - f_cl).rho_ab


def delete_state(f_del: float) -> DensityMatrix:
    return delete_2to1(QubitState.from_population(alpha_from_fdel(f_del))).rho_ab


def measure(name: str, rho: DensityMatrix, opt: OptimizerConfig) -> float:
    if name == "N":
        return negativity(rho)[0]
    if name == "D":
        return discord(rho, 1, opt).discord
    if name == "DG":
        return geometric_discord(rho)
    raise ValueError(f"unknown measure {name!r}")


def _provenance(figure: str, cfg: SweepConfig) -> dict[str, str]:
    return {
        "tool": f"artifact {__version__}",
        "figure": figure,
        "seed": str(cfg.seed),
        "config_hash": cfg.config_hash(),
    }


def _dataset(figure: str, rows: list[tuple], cfg: SweepConfig) -> FigureDataset:
    cols = SCHEMAS[figure]
    keys = SORT_KEYS[figure]
    idx = [cols.index(k) for k in keys]
    rows = sorted(rows, key=lambda r: tuple(r[i] for i in idx))
    ds = FigureDataset(figure, cols, rows, _provenance(figure, cfg), keys)
    ds.validate()
    return ds


def _printed(fid: FormulaId, alpha: float, param: float) -> tuple[float, int]:
    v = evaluate(fid, alpha, param)
    return v.value, int(v.valid)


def multi_delta(kind: str, n: int, m: int, alpha: float, opt: OptimizerConfig) -> float:
    psi = QubitState.from_real(alpha)
    if kind == "cd":
        rho = clone1N_then_deleteNM(psi, n, m).rho
    else:
        rho = deleteN1_then_clone1M(psi, n, m).rho_f
    return average_discord(rho, opt).value


def figure_data(figure: str, cfg: SweepConfig) -> FigureDataset:
    """Dataset behind one figure; see :data:`SCHEMAS` for the columns."""
    if figure not in FIGURES:
        raise DomainError(f"unknown figure {figure!r}; expected one of {', '.join(FIGURES)}")
    opt = cfg.opt
    rows: list[tuple] = []
    if figure in ("fig1", "fig2", "fig3"):
        meas = _MEASURE_OF[figure]
        fid = CLONE_IDS[("N", "D", "DG").index(meas)]
        cap = DISCORD_GRID_CAP if meas == "D" else DEFAULT_STEPS
        na, nf = cfg.steps("alpha", cap), cfg.steps("param", cap)
        if meas == "D":
            na, nf = min(na, cap), min(nf, cap)
        for a in alpha_grid(na):
            for f in f_cl_grid(nf):
                rows.append((a, f, measure(meas, clone_state(a, f), opt), *_printed(fid, a, f)))
    elif figure in ("fig4", "fig5", "fig6"):
        meas = _MEASURE_OF[figure]
        fid = DELETE_IDS[("N", "D", "DG").index(meas)]
        nf = cfg.steps("param", DEFAULT_STEPS)
        if meas == "D":
            nf = min(nf, DISCORD_GRID_CAP)
        for f in f_del_grid(nf):
            rows.append((f, alpha_from_fdel(f), measure(meas, delete_state(f), opt),
                         *_printed(fid, 0.0, f)))
    elif figure == "fig8":
        na, nx = cfg.steps("alpha", DEFAULT_STEPS), cfg.steps("param", DEFAULT_STEPS)
        for a in alpha_grid(na):
            psi = QubitState.from_real(a)
            for xi in xi_grid(nx):
                out = delete_then_clone(psi, xi)
                f3 = f3_from_xi(xi)
                rows.append((
                    a, xi,
                    geometric_discord(out.rho_aa), *_printed(FormulaId.DC_DG_AA, a, xi),
                    geometric_discord(out.rho_bb), *_printed(FormulaId.DC_DG_BB, a, xi),
                    f3, geometric_discord(clone_then_delete(psi, xi).rho_prime),
                    *_printed(FormulaId.CD_DG, a, f3),
                ))
    else:
        kind, cases = ("cd", CLONE_DELETE_CASES) if figure == "fig7" else ("dc", DELETE_CLONE_CASES)
        na = cfg.steps("alpha", MULTI_ALPHA_STEPS)
        for n, m in cases:
            for a in alpha_grid(na):
                rows.append((n, m, a, multi_delta(kind, n, m, a, opt)))
    return _dataset(figure, rows, cfg)


# Printed-formula audit


@dataclass(frozen=True)
class FormulaAudit:
    fid: FormulaId
    points: int
    max_deviation: float
    worst_alpha: float
    worst_param: float
    invalid_fraction: float
    undefined_fraction: float

    @property
    def verdict(self) -> str:
        ok = self.undefined_fraction == 0 and self.max_deviation < CONSISTENT_TOL
        return "CONSISTENT" if ok else "DISCREPANT"


@dataclass(frozen=True)
class ReductionAudit:
    kind: str  # "clone_delete" or "delete_clone"
    n: int
    m: int
    max_deviation: float

    @property
    def verdict(self) -> str:
        return "CONSISTENT" if self.max_deviation < REDUCTION_TOL else "DISCREPANT"


@dataclass
class CompatReport:
    formulas: list[FormulaAudit]
    reductions: list[ReductionAudit]
    provenance: dict[str, str]

    def formula(self, fid: FormulaId) -> FormulaAudit:
        return next(f for f in self.formulas if f.fid is fid)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.provenance.items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("formula", "points", "max_abs_deviation", "worst_alpha", "worst_param",
                    "invalid_fraction", "undefined_fraction", "verdict"))
        for f in self.formulas:
            w.writerow((f.fid.value, f.points, _fmt(f.max_deviation), _fmt(f.worst_alpha),
                        _fmt(f.worst_param), _fmt(f.invalid_fraction),
                        _fmt(f.undefined_fraction), f.verdict))
        buf.write("\n")
        w.writerow(("reduction", "n", "m", "max_abs_deviation", "verdict"))
        for r in self.reductions:
            w.writerow((r.kind, r.n, r.m, _fmt(r.max_deviation), r.verdict))
        return buf.getvalue()

    def write(self, out_dir: Path | str) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "compat.csv"
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())
        return path


def formula_grid(fid: FormulaId, cfg: SweepConfig) -> list[tuple[float, float]]:
    """(alpha, parameter) audit points; discord formulas use the capped grid."""
    cap = DISCORD_GRID_CAP if fid.measure == "D" else DEFAULT_STEPS
    na, np_ = cfg.steps("alpha", cap), cfg.steps("param", cap)
    if fid.measure == "D":
        na, np_ = min(na, cap), min(np_, cap)
    if fid in CLONE_IDS:
        return [(a, f) for a in alpha_grid(na) for f in f_cl_grid(np_)]
    if fid in DELETE_IDS:
        return [(0.0, f) for f in f_del_grid(np_)]
    return [(a, xi) for a in alpha_grid(na) for xi in xi_grid(np_)]


def numeric_value(fid: FormulaId, alpha: float, param: float, opt: OptimizerConfig) -> float:
    """Numeric measure of the state a printed formula describes.

    Composite formulas take xi here; CD_DG is evaluated at F_3(xi).
    """
    if fid in CLONE_IDS:
        return measure(fid.measure, clone_state(alpha, param), opt)
    if fid in DELETE_IDS:
        return measure(fid.measure, delete_state(param), opt)
    psi = QubitState.from_real(alpha)
    if fid is FormulaId.CD_DG:
        return geometric_discord(clone_then_delete(psi, param).rho_prime)
    out = delete_then_clone(psi, param)
    return geometric_discord(out.rho_aa if fid is FormulaId.DC_DG_AA else out.rho_bb)


def printed_value(fid: FormulaId, alpha: float, param: float):
    if fid is FormulaId.CD_DG:
        param = f3_from_xi(param)
    return evaluate(fid, alpha, param)


def audit_formula(fid: FormulaId, cfg: SweepConfig) -> FormulaAudit:
    pts = formula_grid(fid, cfg)
    opt = cfg.opt
    worst = (math.nan, math.nan, math.nan)
    invalid = undefined = 0
    for a, p in pts:
        pv = printed_value(fid, a, p)
        invalid += not pv.valid
        if math.isnan(pv.value):
            undefined += 1
            continue
        dev = abs(pv.value - numeric_value(fid, a, p, opt))
        if not dev <= worst[0]:  # also replaces the initial NaN
            worst = (dev, a, p)
    n = len(pts)
    return FormulaAudit(fid, n, *worst, invalid / n, undefined / n)


def clone_delete_cases() -> list[tuple[int, int]]:
    return [(n, m) for n in (2, 3, 4) for m in range(1, n)]


def delete_clone_cases() -> list[tuple[int, int]]:
    return [(n, m) for n in (2, 3, 4) for m in (2, 3, 4)]


def audit_reductions(alphas: Sequence[float] | None = None) -> list[ReductionAudit]:
    """Printed single-mode reductions against partial traces of the full states."""
    alphas = np.linspace(0.0, 1.0, 11) if alphas is None else alphas
    out = []
    for n, m in clone_delete_cases():
        dev = max(
            float(np.max(np.abs(
                printed_clone_delete_mode(psi, n)
                - partial_trace(clone1N_then_deleteNM(psi, n, m).rho, [0]).matrix
            )))
            for psi in map(QubitState.from_real, alphas)
        )
        out.append(ReductionAudit("clone_delete", n, m, dev))
    for n, m in delete_clone_cases():
        dev = max(
            float(np.max(np.abs(
                printed_delete_clone_mode(psi, n, m)
                - partial_trace(deleteN1_then_clone1M(psi, n, m).rho_f, [0]).matrix
            )))
            for psi in map(QubitState.from_real, alphas)
        )
        out.append(ReductionAudit("delete_clone", n, m, dev))
    return out


def compat_report(cfg: SweepConfig, ids: Iterable[FormulaId] | None = None) -> CompatReport:
    ids = list(FormulaId) if ids is None else list(ids)
    prov = {"tool": f"artifact {__version__}", "report": "compat",
            "seed": str(cfg.seed), "config_hash": cfg.config_hash()}
    return CompatReport([audit_formula(f, cfg) for f in ids], audit_reductions(), prov)


"""Command-line front end.

``kinkstatics <command> [options]`` with commands ``exact``, ``modes``,
``relax``, ``asymptotic`` and ``verify``.  Settings come from built-in
defaults, then an optional config file (``--config`` or the file named by
``KINK_STATICS_CONFIG``), then flags; later sources win.  Config files hold
``key = value`` lines, ``#`` starts a comment, and keys are option names
with ``-`` or ``_``.

Exit codes: 0 success, 1 numerical failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from . import asymptotic as asy
from . import exact_phi4 as ex
from .errors import KinkStaticsError, UsageError
from .grid import Grid1D, fluctuation_operator, lowest_eigenpairs
from .model import MODELS, get_model
from .relaxation import PairKind, RelaxationConfig, model_data, solve_pair
from .verification import run_checks

COMMANDS = ("exact", "modes", "relax", "asymptotic", "verify")
HEADERS = {
    "exact": ("q", "E_closed", "E_quadrature", "orthogonality_residual"),
    "modes": ("index", "eigenvalue"),
    "relax": ("r", "E_full", "dE_dr", "gauge_lhs", "gauge_rhs", "natural_distance"),
    "asymptotic": ("r", "A", "B", "E_eq22", "E_ode"),
}
CONFIG_ENV = "KINK_STATICS_CONFIG"

# per-model (r_start, r_end).  relax starts at 6/m: the separation label of
# a run drifts by ~exp(2m(r_start - r)) times its start-up offset, so
# starting far out buys nothing (see README, "separation label")
_R_DEFAULTS = {
    "relax": {"phi4": (3.0, 1.5), "sine-gordon": (6.0, 2.5)},
    "asymptotic": {"phi4": (4.0, 1.5), "sine-gordon": (6.0, 3.0)},
}


@dataclass
class RunConfig:
    """Fully resolved settings of one invocation (``None`` means command default)."""

    command: str
    model: str = "phi4"
    pair: str = "ka"
    x_min: float | None = None
    n_points: int | None = None
    r_start: float | None = None
    r_end: float | None = None
    dr: float | None = None
    q_min: float = -0.7
    q_max: float = 0.7
    dq: float = 0.1
    n_modes: int | None = None
    out_path: str = "-"
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"command must be one of {COMMANDS}")
        if self.model not in MODELS:
            raise UsageError(f"model must be one of {sorted(MODELS)}")
        if self.pair not in ("ka", "kk"):
            raise UsageError("pair must be 'ka' or 'kk'")
        if self.pair == "kk" and not get_model(self.model).supports_kink_kink:
            raise UsageError(f"pair = kk requires model = sine-gordon (got {self.model})")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be 'csv' or 'json'")
        if self.dr is not None and not self.dr > 0:
            raise UsageError("dr must be > 0")
        if not self.dq > 0:
            raise UsageError("dq must be > 0")
        for name in ("q_min", "q_max"):
            if not abs(getattr(self, name)) < ex.Q_LIMIT:
                raise UsageError(f"{name} must lie in (-sqrt(2/3), +sqrt(2/3)) ~ (-0.8165, 0.8165)")
        if self.q_min > self.q_max:
            raise UsageError("q_min must not exceed q_max")
        if self.n_points is not None and self.n_points < 3:
            raise UsageError("n_points must be >= 3")
        if self.n_modes is not None and self.n_modes < 1:
            raise UsageError("n_modes must be >= 1")
        return self


_FIELD_TYPES = {"x_min": float, "n_points": int, "r_start": float, "r_end": float, "dr": float,
                "q_min": float, "q_max": float, "dq": float, "n_modes": int}


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` comments and blank lines are ignored."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    known = {f.name for f in fields(RunConfig)} - {"command"}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "out":
            key = "out_path"
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _FIELD_TYPES.get(key, str)(value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kinkstatics", description="Static kink pairs and their interaction energy.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="config file of key = value lines")
        s.add_argument("--model", choices=sorted(MODELS))
        s.add_argument("--out", dest="out_path", help="output file, '-' for stdout")
        s.add_argument("--format", choices=("csv", "json"))
        if name in ("relax", "asymptotic"):
            s.add_argument("--pair", choices=("ka", "kk"))
        if name in ("relax", "asymptotic"):
            s.add_argument("--r-start", type=float)
            s.add_argument("--r-end", type=float)
            s.add_argument("--dr", type=float)
        if name in ("exact", "modes", "relax"):
            s.add_argument("--x-min", type=float)
            s.add_argument("--n-points", type=int)
        if name == "exact":
            s.add_argument("--q-min", type=float)
            s.add_argument("--q-max", type=float)
            s.add_argument("--dq", type=float)
        if name == "modes":
            s.add_argument("--n-modes", type=int)
    return p


def parse_args(argv: list[str], environ=None) -> RunConfig:
    """Flags override config-file values, which override the built-in defaults."""
    environ = os.environ if environ is None else environ
    ns = vars(build_parser().parse_args(argv))
    settings = {}
    path = ns.pop("config", None) or environ.get(CONFIG_ENV)
    if path:
        settings.update(read_config_file(path))
    settings.update({k: v for k, v in ns.items() if v is not None})
    return RunConfig(**settings).validate()


# ---------------------------------------------------------------- commands

def _frange(start, stop, step):
    """``start, start + step, ...`` up to ``stop`` inclusive, without drift."""
    n = int(math.floor((stop - start) / step + 1e-9))
    out = [start + k * step for k in range(n + 1)]
    if abs(out[-1] - stop) < 1e-9 * max(1.0, abs(stop)):
        out[-1] = stop
    return out


def _exact_rows(cfg: RunConfig):
    x_min = -25.0 if cfg.x_min is None else cfg.x_min
    n = 10001 if cfg.n_points is None else cfg.n_points
    grid = Grid1D(x_min, -x_min, n)
    rows = []
    for q in _frange(cfg.q_min, cfg.q_max, cfg.dq):
        amp = ex.InternalModeAmplitude(q)
        rows.append((q, ex.deformed_energy(amp), ex.energy_by_quadrature(amp, grid),
                     ex.verify_orthogonality(amp, grid)))
    return rows, {"grid": [grid.x_min, grid.x_max, grid.n_points]}


def _mode_rows(cfg: RunConfig):
    model = get_model(cfg.model)
    m = model.mass_scale
    x_min = -20.0 / m if cfg.x_min is None else cfg.x_min
    n = int(round(-2.0 * x_min * m / 0.01)) + 1 if cfg.n_points is None else cfg.n_points
    grid = Grid1D(x_min, -x_min, n)
    op = fluctuation_operator(model, grid)
    if cfg.n_modes is None:
        # bound states: everything below the continuum threshold m^2
        pairs = [pq for pq in lowest_eigenpairs(op, 8) if pq[0] < m * m]
    else:
        pairs = lowest_eigenpairs(op, cfg.n_modes)
    return [(i, lam) for i, (lam, _) in enumerate(pairs)], {
        "grid": [grid.x_min, grid.x_max, grid.n_points]}


def _range(cfg: RunConfig):
    lo_hi = _R_DEFAULTS[cfg.command][cfg.model]
    r_start = lo_hi[0] if cfg.r_start is None else cfg.r_start
    r_end = lo_hi[1] if cfg.r_end is None else cfg.r_end
    return r_start, r_end


def _relax_rows(cfg: RunConfig):
    model = get_model(cfg.model)
    kind = PairKind(cfg.pair)
    r_start, r_end = _range(cfg)
    m = model.mass_scale
    x_min = -(r_start + 12.0 / m) if cfg.x_min is None else cfg.x_min
    n = int(math.ceil(-x_min * m / 0.02)) + 1 if cfg.n_points is None else cfg.n_points
    grid = Grid1D(x_min, 0.0, n)
    config = RelaxationConfig(r_start=r_start, r_end=r_end, grid=grid,
                              dr=0.005 if cfg.dr is None else cfg.dr)
    table, _ = solve_pair(model, kind, config)
    if table.stopped:
        print(f"kinkstatics: relax stopped early: {table.stopped}", file=sys.stderr)
    return list(table.rows()), {"grid": [grid.x_min, grid.x_max, grid.n_points],
                                "stopped": table.stopped}


def _asymptotic_rows(cfg: RunConfig):
    model = get_model(cfg.model)
    kind = PairKind(cfg.pair)
    r_start, r_end = _range(cfg)
    if r_end > r_start:
        raise UsageError("asymptotic needs r_start >= r_end (rows run toward smaller r)")
    step = 0.05 if cfg.dr is None else cfg.dr
    rs = [r_start - k * step for k in range(int(math.floor((r_start - r_end) / step + 1e-9)) + 1)]
    if abs(rs[-1] - r_end) < 1e-9 * max(1.0, abs(r_end)):
        rs[-1] = r_end
    curve = None
    if len(rs) > 1:
        sub = max(1, int(math.ceil(step / 1e-3 - 1e-9)))
        curve = asy.potential_from_ode(model, kind, rs[-1], r_start, dr=step / sub)
    rows = []
    for k, r in enumerate(rs):
        c = asy.ab_coefficients(model, r, kind)
        e22 = float(asy.asymptotic_energy(model, r, kind))
        if curve is None:
            e_ode = e22
        else:
            i = k * sub
            e_ode = float(curve.E[i]) if i < curve.E.size else None
        rows.append((r, c.A, c.B, e22, e_ode))
    meta = {"stopped": None if curve is None else curve.stopped}
    return rows, meta


RUNNERS = {"exact": _exact_rows, "modes": _mode_rows, "relax": _relax_rows,
           "asymptotic": _asymptotic_rows}


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    return format(v, ".17g")


def _json_value(v):
    if v is None:
        return None
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else None


def render(cfg: RunConfig, rows, meta: dict) -> str:
    """Serialise ``rows`` under the command's fixed header."""
    header = HEADERS[cfg.command]
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    info = {"command": cfg.command, "model": cfg.model, "version": __version__}
    if cfg.command in ("relax", "asymptotic"):
        info["pair"] = cfg.pair
    info.update(meta)
    records = [{k: _json_value(v) for k, v in zip(header, row)} for row in rows]
    return json.dumps({"meta": info, "records": records}, indent=1, sort_keys=False) + "\n"


def _emit(text: str, out_path: str):
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration and return the exit code."""
    if cfg.command == "verify":
        checks = run_checks(get_model(cfg.model))
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in checks]
        ok = all(c.passed for c in checks)
        lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
        _emit("\n".join(lines) + "\n", cfg.out_path)
        return 0 if ok else 1
    try:
        rows, meta = RUNNERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"kinkstatics: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except KinkStaticsError as exc:
        print(f"kinkstatics: {cfg.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(render(cfg, rows, meta), cfg.out_path)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"kinkstatics: invalid configuration: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: experiment configs, execution, CSV emission, presets.

Config files are flat "key = value" text with '#' comments; unknown keys are
rejected.  Defaults reproduce the reference experiment: sine-Gordon with
b = 1 on (-20, 20), dx = 0.1, dt = 0.05, final time 200, velocity kick with
c = 0.2, no damping.

Exit codes: 0 success, 1 config error, 2 runtime failure (blow-up and
friends), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsRow, rows_from_snapshots
from .equilibria import EquilibriumResult, bump_profile, lojasiewicz_probe, solve_equilibrium
from .grid import Field, Grid1D, first_eigenvalue, l2_norm
from .integrator import BlowUpError, RunResult, SchemeConfig, cfl_check, run
from .ode_lab import ModeODE, integrate_mode, tailored_damping
from .physics import (
    ConstantDamping,
    Damping,
    KleinGordon,
    LinearMass,
    Nonlinearity,
    PowerDecayDamping,
    PowerGrowthDamping,
    SineGordon,
    ZeroDamping,
    initial_profile,
    lojasiewicz_theta,
    lyapunov_weight_alpha,
    preset_damping,
)
from . import rates

__all__ = ["main", "parse_config", "ExperimentConfig", "ConfigError", "read_csv"]

CSV_HEADER = "t,l2_u,h1_u,l2_ut,hm1_G,E_u,E0_u,H_lyap,l2_dist_psi"

_MODELS = ("sine_gordon", "klein_gordon", "linear_mass")
_PRESET_LABELS = tuple(f"h{i}" for i in range(7))
_DAMPING_FAMILIES = _PRESET_LABELS + ("zero", "constant", "power_decay", "power_growth")

_FLOAT_KEYS = ("b", "a", "p", "damping_c", "damping_alpha", "L", "dx", "dt", "T", "c", "eta")
_INT_KEYS = ("record_every",)
_STR_KEYS = ("model", "damping", "out_dir", "psi_source")

_DEFAULTS = {
    "model": "sine_gordon",
    "b": 1.0,
    "a": 1.0,
    "p": 3.0,
    "damping": "h0",
    "damping_c": 1.0,
    "damping_alpha": 0.0,
    "L": 20.0,
    "dx": 0.1,
    "dt": 0.05,
    "T": 200.0,
    "c": 0.2,
    "eta": 0.01,
    "record_every": 4,
    "out_dir": "out",
    "psi_source": "zero",
}


class ConfigError(ValueError):
    pass


class UnknownKeyError(ConfigError):
    pass


class TypeMismatchError(ConfigError):
    pass


class ConstraintViolationError(ConfigError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    b: float
    a: float
    p: float
    damping: str
    damping_c: float
    damping_alpha: float
    L: float
    dx: float
    dt: float
    T: float
    c: float
    eta: float
    record_every: int
    out_dir: str
    psi_source: str

    def grid(self) -> Grid1D:
        return Grid1D.from_spacing(self.L, self.dx)

    def nonlinearity(self) -> Nonlinearity:
        if self.model == "sine_gordon":
            return SineGordon(self.b)
        if self.model == "klein_gordon":
            return KleinGordon(self.a, self.p)
        return LinearMass(self.b)

    def damping_fn(self) -> Damping:
        label = self.damping
        if label in _PRESET_LABELS:
            return preset_damping(int(label[1:]))
        if label == "zero":
            return ZeroDamping()
        if label == "constant":
            return ConstantDamping(self.damping_c)
        if label == "power_decay":
            return PowerDecayDamping(self.damping_c, self.damping_alpha)
        return PowerGrowthDamping(self.damping_c, self.damping_alpha)

    def scheme(self) -> SchemeConfig:
        return SchemeConfig(dt=self.dt, t_final=self.T)

    def canonical_text(self) -> str:
        pairs = []
        for key in sorted(_DEFAULTS):
            value = getattr(self, key)
            if isinstance(value, float):
                pairs.append(f"{key} = {value:.17g}")
            else:
                pairs.append(f"{key} = {value}")
        return "\n".join(pairs) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat key = value text; later assignments win; unknown keys error."""
    raw = dict(_DEFAULTS)
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise TypeMismatchError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _DEFAULTS:
            raise UnknownKeyError(f"line {line_no}: unknown key {key!r}")
        if key in _FLOAT_KEYS:
            try:
                raw[key] = float(value)
            except ValueError:
                raise TypeMismatchError(f"line {line_no}: {key} needs a number, got {value!r}") from None
        elif key in _INT_KEYS:
            try:
                raw[key] = int(value)
            except ValueError:
                raise TypeMismatchError(f"line {line_no}: {key} needs an integer, got {value!r}") from None
        else:
            raw[key] = value
    return _validate_config(raw)


def _validate_config(raw: dict) -> ExperimentConfig:
    def constraint(condition: bool, message: str) -> None:
        if not condition:
            raise ConstraintViolationError(message)

    constraint(raw["model"] in _MODELS, f"model = {raw['model']!r} not one of {_MODELS}")
    constraint(
        raw["damping"] in _DAMPING_FAMILIES,
        f"damping = {raw['damping']!r} not one of {_DAMPING_FAMILIES}",
    )
    if raw["model"] == "sine_gordon":
        constraint(raw["b"] > 0, f"b = {raw['b']} must be positive for sine_gordon")
    if raw["model"] == "klein_gordon":
        constraint(raw["p"] >= 1, f"p = {raw['p']} must be at least 1")
    constraint(raw["dt"] > 0, f"dt = {raw['dt']} must be positive")
    constraint(raw["T"] >= raw["dt"], f"T = {raw['T']} must be at least dt = {raw['dt']}")
    constraint(0.0 < raw["c"] < 1.0, f"c = {raw['c']} must lie in (0, 1)")
    constraint(0.0 <= raw["eta"] < 1.0, f"eta = {raw['eta']} must lie in [0, 1)")
    constraint(raw["record_every"] >= 1, f"record_every = {raw['record_every']} must be >= 1")
    if raw["damping"] in ("constant",):
        constraint(raw["damping_c"] >= 0, f"damping_c = {raw['damping_c']} must be nonnegative")
    if raw["damping"] in ("power_decay", "power_growth"):
        constraint(raw["damping_c"] > 0, f"damping_c = {raw['damping_c']} must be positive")
        constraint(raw["damping_alpha"] >= 0, f"damping_alpha = {raw['damping_alpha']} must be >= 0")
    if raw["psi_source"] not in ("zero", "newton-from-final"):
        constraint(
            raw["psi_source"].startswith("file:"),
            f"psi_source = {raw['psi_source']!r} must be zero, newton-from-final, or file:<path>",
        )
    try:
        grid = Grid1D.from_spacing(raw["L"], raw["dx"])
    except ValueError as err:
        raise ConstraintViolationError(str(err)) from None
    cfg = ExperimentConfig(**raw)
    constraint(
        cfl_check(cfg.scheme(), grid),
        f"CFL violated: dt = {raw['dt']} exceeds dx = {raw['dx']}",
    )
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.14e}"


def format_rows(rows: list[DiagnosticsRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (r.t, r.l2_u, r.h1_u, r.l2_ut, r.hm1_G, r.E_u, r.E0_u, r.H_lyap, r.l2_dist_psi)
            )
        )
    return "\n".join(lines) + "\n"


def read_csv(path) -> dict[str, np.ndarray]:
    """Read one of our CSV files back into named columns."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty CSV")
    header = lines[0].split(",")
    columns = [[] for _ in header]
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(header):
            raise ValueError(f"{path}: row with {len(parts)} fields, expected {len(header)}")
        for col, part in zip(columns, parts):
            col.append(float(part))
    return {name: np.array(col) for name, col in zip(header, columns)}


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_config(args) -> ExperimentConfig:
    text = ""
    if getattr(args, "config", None):
        text = Path(args.config).read_text(encoding="utf-8")
    for item in getattr(args, "set", []) or []:
        if "=" not in item:
            raise TypeMismatchError(f"--set {item!r}: expected KEY=VALUE")
        key, _, value = item.partition("=")
        text += f"\n{key.strip()} = {value.strip()}"
    return parse_config(text)


def _reference_equilibrium(cfg: ExperimentConfig, grid: Grid1D, result: RunResult | None):
    """Resolve psi per psi_source; 'newton-from-final' needs the finished run."""
    if cfg.psi_source == "zero":
        return grid.zeros()
    if cfg.psi_source == "newton-from-final":
        if result is None:
            return None
        solved = solve_equilibrium(result.final_u, cfg.nonlinearity())
        return solved.psi
    path = cfg.psi_source[len("file:"):]
    data = read_csv(path)
    if "psi" not in data:
        raise ConfigError(f"{path}: no 'psi' column")
    if len(data["psi"]) != grid.n_interior:
        raise ConfigError(
            f"{path}: psi has {len(data['psi'])} nodes, grid has {grid.n_interior}"
        )
    return Field(data["psi"], grid)


def _execute(cfg: ExperimentConfig, zero_data: bool = False, field_callback=None):
    """Run one experiment, returning (result, psi); honors psi_source."""
    grid = cfg.grid()
    nl = cfg.nonlinearity()
    damping = cfg.damping_fn()
    if zero_data:
        u0, v0 = grid.zeros(), grid.zeros()
    else:
        u0, v0 = initial_profile(grid, cfg.c)
    deferred_psi = cfg.psi_source == "newton-from-final"
    psi = grid.zeros() if deferred_psi else _reference_equilibrium(cfg, grid, None)
    result = run(
        u0,
        v0,
        nl,
        damping,
        cfg.scheme(),
        record_every=cfg.record_every,
        psi=psi,
        eta=cfg.eta,
        keep_snapshots=deferred_psi,
        field_callback=field_callback,
    )
    if deferred_psi:
        psi = _reference_equilibrium(cfg, grid, result)
        result.rows = rows_from_snapshots(result.snapshots, nl, damping, psi, cfg.eta)
    return result, psi


def _csv_name(cfg: ExperimentConfig) -> str:
    return f"{cfg.model}_{cfg.damping}.csv"


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(args.out or cfg.out_dir)
    path = out_dir / _csv_name(cfg)
    try:
        result, _ = _execute(cfg, zero_data=args.zero_data)
    except BlowUpError as err:
        _write_text(path, format_rows(err.rows))
        print(f"blow-up: {err}; partial CSV kept at {path}", file=sys.stderr)
        return 2
    _write_text(path, format_rows(result.rows))
    print(f"wrote {path} ({len(result.rows)} rows)")
    return 0


@dataclass
class _SweepOutcome:
    label: str
    csv_text: str | None
    summary: dict
    error: str | None = None


def _summarize_run(cfg: ExperimentConfig, rows: list[DiagnosticsRow], psi_level: float) -> dict:
    grid = cfg.grid()
    nl = cfg.nonlinearity()
    damping = cfg.damping_fn()
    theta = lojasiewicz_theta(nl, first_eigenvalue(grid))
    alpha = lyapunov_weight_alpha(damping)
    t = np.array([r.t for r in rows])
    norm_u = np.array([r.l2_u for r in rows])
    dist = np.array([r.l2_dist_psi for r in rows])
    classification = rates.classify_longtime(t, norm_u, equilibrium_levels=(psi_level,))
    summary = {
        "damping": cfg.damping,
        "theta": f"{theta:.6g}",
        "alpha": f"{alpha:.6g}",
        "classification": classification.label,
        "tail_stat": _fmt_summary_params(classification.params),
        "fit_model": "-",
        "fit_params": "-",
        "r_squared": "-",
        "lambda_sup": "-",
    }
    window = (cfg.T / 4.0, cfg.T)
    if classification.label == rates.CONVERGED:
        try:
            if theta == 0.5 and alpha < 1.0:
                fit = rates.fit_stretched_exponential(t, dist, alpha, window)
            else:
                fit = rates.fit_polynomial_decay(t, dist, window)
            summary["fit_model"] = fit.model
            summary["fit_params"] = _fmt_summary_params(fit.params)
            summary["r_squared"] = f"{fit.r_squared:.6g}"
        except rates.InsufficientSamplesError:
            pass
        except rates.NonPositiveValuesError:
            pass
    if theta < 0.5:
        sup = rates.theoretical_lambda_sup(theta, alpha)
        summary["lambda_sup"] = "none" if sup is None else ("inf" if math.isinf(sup) else f"{sup:.6g}")
    else:
        summary["lambda_sup"] = "inf"
    return summary


def _fmt_summary_params(params: dict) -> str:
    return ",".join(f"{k}={v:.6g}" for k, v in sorted(params.items()))


_SUMMARY_COLUMNS = (
    "damping",
    "theta",
    "alpha",
    "classification",
    "tail_stat",
    "fit_model",
    "fit_params",
    "r_squared",
    "lambda_sup",
)


def _sweep_case(cfg: ExperimentConfig) -> _SweepOutcome:
    try:
        result, psi = _execute(cfg)
    except BlowUpError as err:
        return _SweepOutcome(
            label=cfg.damping,
            csv_text=format_rows(err.rows),
            summary={"damping": cfg.damping, "classification": "blow-up"},
            error=str(err),
        )
    return _SweepOutcome(
        label=cfg.damping,
        csv_text=format_rows(result.rows),
        summary=_summarize_run(cfg, result.rows, l2_norm(psi)),
    )


def _run_sweep(base: ExperimentConfig, labels: list[str], out_dir: Path, workers: int):
    configs = [replace(base, damping=label) for label in labels]
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_case, configs))
    else:
        outcomes = [_sweep_case(cfg) for cfg in configs]
    artifacts: list[tuple[str, str]] = []
    for cfg, outcome in zip(configs, outcomes):
        if outcome.csv_text is not None:
            name = _csv_name(cfg)
            _write_text(out_dir / name, outcome.csv_text)
            artifacts.append((name, cfg.digest()))
    summary_lines = ["\t".join(_SUMMARY_COLUMNS)]
    for outcome in outcomes:
        summary_lines.append(
            "\t".join(str(outcome.summary.get(col, "-")) for col in _SUMMARY_COLUMNS)
        )
    return outcomes, artifacts, "\n".join(summary_lines) + "\n"


def cmd_sweep(args) -> int:
    base = _load_config(args)
    labels = [s for s in (args.dampings.split(",") if args.dampings else []) if s]
    for label in labels:
        if label not in _PRESET_LABELS:
            raise ConstraintViolationError(f"sweep damping {label!r} not one of {_PRESET_LABELS}")
    out_dir = Path(args.out or base.out_dir)
    outcomes, _, summary_text = _run_sweep(base, labels, out_dir, args.workers)
    summary_path = out_dir / f"summary_{base.model}.tsv"
    _write_text(summary_path, summary_text)
    failures = [o for o in outcomes if o.error]
    for outcome in failures:
        print(f"{outcome.label}: {outcome.error}", file=sys.stderr)
    print(f"wrote {summary_path} ({len(outcomes)} runs, {len(failures)} failed)")
    return 0


def _parse_guess(spec: str, cfg: ExperimentConfig, grid: Grid1D) -> Field:
    if spec == "zero":
        return grid.zeros()
    if spec == "bump" or spec.startswith("bump:"):
        if ":" in spec:
            amplitude = float(spec.split(":", 1)[1])
        elif cfg.model == "klein_gordon" and cfg.a < 0:
            amplitude = math.sqrt(-cfg.a)
        else:
            amplitude = 0.3
        return bump_profile(grid, amplitude)
    if spec.startswith("file:"):
        data = read_csv(spec[len("file:"):])
        return Field(data["psi"], grid)
    raise ConfigError(f"guess {spec!r} must be zero, bump[:amp], or file:<path>")


def _equilibrium_report(result: EquilibriumResult) -> str:
    lines = [
        f"converged = {str(result.converged).lower()}",
        f"iterations = {result.iterations}",
        f"residual_hm1 = {result.residual_hm1:.6e}",
        f"e0 = {result.e0:.12e}",
        f"l2_norm_psi = {l2_norm(result.psi):.12e}",
        f"max_abs_psi = {float(np.max(np.abs(result.psi.values))):.12e}",
    ]
    return "\n".join(lines) + "\n"


def cmd_equilibrium(args) -> int:
    cfg = _load_config(args)
    grid = cfg.grid()
    nl = cfg.nonlinearity()
    guess = _parse_guess(args.guess, cfg, grid)
    result = solve_equilibrium(guess, nl, tol=args.tol, max_iter=args.max_iter)
    report = _equilibrium_report(result)
    print(report, end="")
    out_dir = Path(args.out or cfg.out_dir)
    psi_path = out_dir / f"psi_{cfg.model}.csv"
    lines = ["x,psi"]
    for x, value in zip(grid.nodes, result.psi.values):
        lines.append(f"{_fmt(x)},{_fmt(value)}")
    _write_text(psi_path, "\n".join(lines) + "\n")
    _write_text(out_dir / f"psi_{cfg.model}_report.txt", report)
    print(f"wrote {psi_path}")
    return 0


def cmd_probe(args) -> int:
    cfg = _load_config(args)
    grid = cfg.grid()
    nl = cfg.nonlinearity()
    guess = _parse_guess(args.guess, cfg, grid)
    result = solve_equilibrium(guess, nl)
    if not result.converged:
        print("equilibrium solve did not converge; cannot probe", file=sys.stderr)
        return 2
    probe = lojasiewicz_probe(result, nl)
    slopes = ",".join(f"{s:.6g}" for s in probe.direction_slopes)
    print(f"slope = {probe.slope:.6g}")
    print(f"r_squared = {probe.r_squared:.6g}")
    print(f"theta_estimate = {1.0 - probe.slope:.6g}")
    print(f"direction_count = {probe.direction_count}")
    print(f"direction_slopes = {slopes}")
    print(f"epsilon_range = {probe.epsilon_range[0]:.6g} {probe.epsilon_range[1]:.6g}")
    return 0


def _rate_fit_report(fit: rates.RateFit, extra: dict | None = None) -> str:
    lines = [f"model = {fit.model}"]
    for key in sorted(fit.params):
        lines.append(f"{key} = {fit.params[key]:.12g}")
    if fit.r_squared is not None:
        lines.append(f"r_squared = {fit.r_squared:.12g}")
    lines.append(f"window = {fit.window[0]:.12g} {fit.window[1]:.12g}")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def cmd_rate_fit(args) -> int:
    data = read_csv(args.csv)
    if "t" not in data:
        raise ConfigError(f"{args.csv}: no 't' column")
    if args.column not in data:
        raise ConfigError(f"{args.csv}: no {args.column!r} column")
    window = tuple(args.window) if args.window else None
    if args.model == "poly":
        fit = rates.fit_polynomial_decay(data["t"], data[args.column], window)
    else:
        fit = rates.fit_stretched_exponential(data["t"], data[args.column], args.alpha, window)
    extra = {}
    if args.theta is not None:
        sup = rates.theoretical_lambda_sup(args.theta, args.sup_alpha)
        extra["lambda_sup"] = "none" if sup is None else ("inf" if math.isinf(sup) else f"{sup:.12g}")
    print(_rate_fit_report(fit, extra), end="")
    return 0


def cmd_ode(args) -> int:
    if args.damping:
        damping = _parse_ode_damping(args.damping, args.mu)
    else:
        damping = PowerDecayDamping(1.0, args.alpha)
    mode = ModeODE(
        mu=args.mu,
        damping=damping,
        omega0=args.omega0,
        omega0_dot=args.omega0_dot,
        dt=args.dt,
        t_final=args.T,
    )
    trajectory = integrate_mode(mode)
    keep = slice(None, None, max(args.record_every, 1))
    t = trajectory.t[keep]
    omega = trajectory.omega[keep]
    omega_dot = trajectory.omega_dot[keep]
    energy = trajectory.energy[keep]
    lines = ["t,omega,omega_dot,energy"]
    for row in zip(t, omega, omega_dot, energy):
        lines.append(",".join(_fmt(v) for v in row))
    out_dir = Path(args.out) if args.out else Path(".")
    path = out_dir / "ode.csv"
    _write_text(path, "\n".join(lines) + "\n")
    classification = rates.classify_longtime(t, np.abs(omega), equilibrium_levels=(0.0,))
    print(f"classification = {classification.label}")
    print(f"wrote {path} ({len(t)} rows)")
    return 0


def _parse_ode_damping(spec: str, mu: float) -> Damping:
    if spec in _PRESET_LABELS:
        return preset_damping(int(spec[1:]))
    family, _, rest = spec.partition(":")
    parts = [p for p in rest.split(":") if p]
    try:
        if family == "zero":
            return ZeroDamping()
        if family == "constant":
            return ConstantDamping(float(parts[0]) if parts else 1.0)
        if family == "power_decay":
            return PowerDecayDamping(float(parts[0]), float(parts[1]))
        if family == "power_growth":
            return PowerGrowthDamping(float(parts[0]), float(parts[1]))
        if family == "tailored":
            return tailored_damping(mu, float(parts[0]))
    except (IndexError, ValueError) as err:
        raise ConfigError(f"bad damping spec {spec!r}: {err}") from None
    raise ConfigError(f"unknown damping family {family!r}")


def _preset_text(**overrides) -> str:
    lines = [f"{key} = {value}" for key, value in overrides.items()]
    return "\n".join(lines)


def cmd_reproduce(args) -> int:
    out_dir = Path(args.out or "out") / args.figure
    artifacts: list[tuple[str, str]] = []
    if args.figure == "fig1":
        _reproduce_fig1(out_dir, artifacts)
    elif args.figure == "fig2":
        _reproduce_fig2(out_dir, artifacts, args.workers)
    else:
        _reproduce_fig3(out_dir, artifacts, args.workers)
    manifest = "".join(f"{name}\t{digest}\n" for name, digest in sorted(artifacts))
    _write_text(out_dir / "manifest.tsv", manifest)
    print(f"wrote {out_dir}/manifest.tsv ({len(artifacts)} artifacts)")
    return 0


class _FieldRecorder:
    """Collects full-field snapshots every `stride` recorded samples."""

    def __init__(self, stride: int):
        self.stride = stride
        self.count = 0
        self.times: list[float] = []
        self.fields: list[np.ndarray] = []

    def __call__(self, t: float, values: np.ndarray) -> None:
        if self.count % self.stride == 0:
            self.times.append(t)
            self.fields.append(values.copy())
        self.count += 1

    def to_csv(self, grid: Grid1D) -> str:
        header = "t," + ",".join(f"x={x:.6g}" for x in grid.nodes)
        lines = [header]
        for t, values in zip(self.times, self.fields):
            lines.append(_fmt(t) + "," + ",".join(_fmt(v) for v in values))
        return "\n".join(lines) + "\n"


def _reproduce_fig1(out_dir: Path, artifacts: list) -> None:
    for model, extra in (("sine_gordon", {"b": 1}), ("klein_gordon", {"a": 1, "p": 3})):
        cfg = parse_config(_preset_text(model=model, damping="h0", **extra))
        recorder = _FieldRecorder(stride=5)  # every 1.0 time units at the preset cadence
        result, _ = _execute(cfg, field_callback=recorder)
        name = _csv_name(cfg)
        _write_text(out_dir / name, format_rows(result.rows))
        artifacts.append((name, cfg.digest()))
        field_name = name.replace(".csv", "_field.csv")
        _write_text(out_dir / field_name, recorder.to_csv(cfg.grid()))
        artifacts.append((field_name, cfg.digest()))


def _reproduce_fig2(out_dir: Path, artifacts: list, workers: int) -> None:
    labels = list(_PRESET_LABELS)
    for model, extra in (("sine_gordon", {"b": 1}), ("klein_gordon", {"a": 1, "p": 3})):
        base = parse_config(_preset_text(model=model, **extra))
        _, swept, summary_text = _run_sweep(base, labels, out_dir, workers)
        artifacts.extend(swept)
        summary_name = f"summary_{model}.tsv"
        _write_text(out_dir / summary_name, summary_text)
        artifacts.append((summary_name, base.digest()))


def _reproduce_fig3(out_dir: Path, artifacts: list, workers: int) -> None:
    # panel a: the nondegenerate cubic model under decaying damping; the
    # distance-to-equilibrium series should straighten on a sqrt(t) axis.
    cfg_a = parse_config(_preset_text(model="klein_gordon", a=1, p=3, damping="h2"))
    result, _ = _execute(cfg_a)
    name_a = "fig3a_klein_gordon_h2.csv"
    _write_text(out_dir / name_a, format_rows(result.rows))
    artifacts.append((name_a, cfg_a.digest()))
    t = np.array([r.t for r in result.rows])
    dist = np.array([r.l2_dist_psi for r in result.rows])
    fit = rates.fit_stretched_exponential(t, dist, alpha=0.5, window=(cfg_a.T / 4.0, cfg_a.T))
    report = _rate_fit_report(fit, {"column": "l2_dist_psi", "source": name_a})
    _write_text(out_dir / "fig3a_fit.txt", report)
    artifacts.append(("fig3a_fit.txt", cfg_a.digest()))

    # panel b: the degenerate well (theta = 1/(p+1)) swept over the damping
    # family, with polynomial fits and the theoretical exponent bound.  Zero
    # is unstable at a = -0.1, so the distance column needs the actual limit
    # equilibrium, re-solved from each run's final state.
    for index in range(7):
        cfg_b = parse_config(
            _preset_text(
                model="klein_gordon",
                a=-0.1,
                p=3,
                damping=f"h{index}",
                psi_source="newton-from-final",
            )
        )
        try:
            result, _ = _execute(cfg_b)
            rows = result.rows
        except BlowUpError as err:
            rows = err.rows
        name_b = f"fig3b_klein_gordon_h{index}.csv"
        _write_text(out_dir / name_b, format_rows(rows))
        artifacts.append((name_b, cfg_b.digest()))
        t = np.array([r.t for r in rows])
        dist = np.array([r.l2_dist_psi for r in rows])
        theta = lojasiewicz_theta(cfg_b.nonlinearity(), first_eigenvalue(cfg_b.grid()))
        alpha = lyapunov_weight_alpha(cfg_b.damping_fn())
        sup = rates.theoretical_lambda_sup(theta, alpha)
        sup_text = "none" if sup is None else ("inf" if math.isinf(sup) else f"{sup:.12g}")
        try:
            fit = rates.fit_polynomial_decay(t, dist, window=(cfg_b.T / 4.0, cfg_b.T))
            report = _rate_fit_report(
                fit,
                {"lambda_sup": sup_text, "theta": f"{theta:.12g}", "column": "l2_dist_psi", "source": name_b},
            )
        except (rates.InsufficientSamplesError, rates.NonPositiveValuesError) as err:
            report = f"model = none\nerror = {err}\nlambda_sup = {sup_text}\n"
        report_name = f"fig3b_h{index}_fit.txt"
        _write_text(out_dir / report_name, report)
        artifacts.append((report_name, cfg_b.digest()))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dampedwave",
        description="Finite-difference lab for 1D semilinear waves with time-dependent damping",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="config file (flat key = value lines)")
        sp.add_argument("--out", help="output directory (default: out_dir from the config)")
        sp.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )

    sp = sub.add_parser("simulate", help="run one experiment and write its CSV")
    common(sp)
    sp.add_argument("--zero-data", action="store_true", help="start from u = u_t = 0")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="run one model over several damping presets")
    common(sp)
    sp.add_argument("--dampings", default="h0,h1,h2,h3,h4,h5,h6", help="comma-separated preset labels")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("equilibrium", help="Newton-solve the stationary problem")
    common(sp)
    sp.add_argument("--guess", default="zero", help="zero | bump[:amplitude] | file:<csv>")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=50)
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("probe", help="fit the energy-residual power law near an equilibrium")
    common(sp)
    sp.add_argument("--guess", default="zero")
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("rate-fit", help="fit a decay law to a CSV column")
    sp.add_argument("csv")
    sp.add_argument("--model", choices=("poly", "stretched"), default="poly")
    sp.add_argument("--alpha", type=float, default=0.0, help="stretch exponent for --model stretched")
    sp.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"))
    sp.add_argument("--column", default="l2_u")
    sp.add_argument("--theta", type=float, help="also print the theoretical exponent bound")
    sp.add_argument("--sup-alpha", type=float, default=0.0, help="damping exponent for the bound")
    sp.set_defaults(func=cmd_rate_fit)

    sp = sub.add_parser("ode", help="integrate one damped mode w'' + h w' + mu w = 0")
    sp.add_argument("--mu", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=2.0, help="power-decay exponent (when --damping absent)")
    sp.add_argument("--damping", help="h0..h6 | zero | constant:<c> | power_decay:<c>:<a> | power_growth:<c>:<a> | tailored:<alpha>")
    sp.add_argument("--omega0", type=float, default=1.0)
    sp.add_argument("--omega0-dot", type=float, default=0.0)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--T", type=float, default=200.0)
    sp.add_argument("--record-every", type=int, default=10)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_ode)

    sp = sub.add_parser("reproduce", help="one-command bundles for the report figures")
    sp.add_argument("figure", choices=("fig1", "fig2", "fig3"))
    sp.add_argument("--out", help="base output directory (default: out)")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except RuntimeError as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command line: ``heatwiener estimate|sweep|compare|validate``.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, NumericConfig
from .errors import NumericError, SpecError, TailBoundUnavailable
from .heisenberg import HeisenbergAdapter
from .measures import Geometry, MeasureSpec, atom_power, load
from .spectral import AtomEstimate, WienerCurve, cesaro_average, extrapolate_limit, geometric_schedule, sweep
from .su2 import FUNCTIONALS, SU2Adapter
from .torus import TorusAdapter, coefficient_provider
from .validation import run_checks

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("estimate", "sweep", "compare", "validate")
DISCREPANCY_TOL = 0.05
AGREEMENT_TOL = 2e-3
CESARO_MAX_POWER = 12


class ConfigError(SpecError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: str | None = None
    geometry: str | None = None
    t0: float = 0.5
    ratio: float = 0.5
    samples: int = 10
    eps: float = 1e-8
    functional: str = "matrix"
    out: str | None = None
    seed: int = 0
    budget_scale: float = 1.0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not 0.0 < self.ratio < 1.0:
            raise ConfigError(f"ratio must lie in (0, 1), got {self.ratio}")
        if self.samples < 4:
            raise ConfigError(f"sample count must be >= 4, got {self.samples}")
        if not 0.0 < self.eps <= 1e-2:
            raise ConfigError(f"eps must lie in (0, 1e-2], got {self.eps}")
        if not self.t0 > 0.0:
            raise ConfigError(f"t0 must be positive, got {self.t0}")
        if self.functional not in FUNCTIONALS:
            raise ConfigError(f"functional must be one of {FUNCTIONALS}")
        if not self.budget_scale >= 1.0:
            raise ConfigError(f"budget scale must be >= 1, got {self.budget_scale}")
        if self.command != "validate" and self.spec is None:
            raise ConfigError(f"{self.command} needs --spec")

    @property
    def schedule(self) -> np.ndarray:
        return geometric_schedule(self.t0, self.ratio, self.samples)

    @property
    def numeric(self) -> NumericConfig:
        return DEFAULT.with_(eps=self.eps, budget_scale=self.budget_scale)


# --------------------------------------------------------------------------- helpers


def _load_spec(cfg: RunConfig) -> MeasureSpec:
    try:
        spec = load(cfg.spec, cfg.numeric)
    except OSError as exc:
        raise ConfigError(f"cannot read spec {cfg.spec!r}: {exc.strerror or exc}") from exc
    if cfg.geometry is not None and Geometry.parse(cfg.geometry) != spec.geometry:
        raise ConfigError(f"--geometry {cfg.geometry} conflicts with the spec geometry {spec.geometry.tag}")
    return spec


def make_adapter(spec: MeasureSpec, functional: str = "matrix", config: NumericConfig = DEFAULT):
    family = spec.geometry.family
    if family == "torus":
        return TorusAdapter(spec, config)
    if family == "su2":
        return SU2Adapter(spec, functional, config)
    return HeisenbergAdapter(spec, config)


def _curve(cfg: RunConfig, spec: MeasureSpec, functional: str | None = None) -> WienerCurve:
    adapter = make_adapter(spec, functional or cfg.functional, cfg.numeric)
    return sweep(adapter, cfg.schedule, cfg.eps, cfg.budget_scale)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _header(cfg: RunConfig, geometry: Geometry, functional: bool = True) -> list[str]:
    lines = [f"# heatwiener {cfg.command} seed={cfg.seed}", f"geometry {geometry.tag}"]
    if functional and geometry.family == "su2":
        lines.append(f"functional {cfg.functional}")
    lines.append(f"schedule t0={cfg.t0:g} ratio={cfg.ratio:g} samples={cfg.samples} eps={cfg.eps:g}")
    return lines


def _estimate_lines(est: AtomEstimate, truth: float, prefix: str = "") -> list[str]:
    lines = [
        f"{prefix}estimate {est.estimate:.12g}",
        f"{prefix}uncertainty {est.uncertainty:.3g}",
        f"{prefix}method {est.method}" + ("" if est.beta is None else f" beta={est.beta:.4g}"),
        f"{prefix}ground_truth {truth:.12g}",
        f"{prefix}deviation {abs(est.estimate - truth):.3g}",
    ]
    return lines


# --------------------------------------------------------------------------- commands


def cmd_estimate(cfg: RunConfig) -> tuple[AtomEstimate, str]:
    spec = _load_spec(cfg)
    est = extrapolate_limit(_curve(cfg, spec), cfg.numeric)
    report = "\n".join(_header(cfg, spec.geometry) + _estimate_lines(est, atom_power(spec).value)) + "\n"
    _emit(report, cfg.out)
    return est, report


def cmd_sweep(cfg: RunConfig) -> str:
    spec = _load_spec(cfg)
    text = _curve(cfg, spec).to_csv()
    _emit(text, cfg.out)
    return text


def _fmt(v) -> str:
    return "" if v is None else f"{v:.17g}"


def _compare_su2(cfg: RunConfig, spec: MeasureSpec) -> tuple[str, str]:
    curves = {f: _curve(cfg, spec, f) for f in ("character", "matrix")}
    rows = ["t,W_character,W_matrix,trace_character,trace_matrix"]
    c, m = curves["character"], curves["matrix"]
    for i in range(len(c)):
        rows.append(",".join(_fmt(v) for v in (c.t[i], c.ratio[i], m.ratio[i], c.trace[i], m.trace[i])))
    truth = atom_power(spec).value
    report = _header(cfg, spec.geometry, functional=False)
    for name, curve in curves.items():
        est = extrapolate_limit(curve, cfg.numeric)
        report += _estimate_lines(est, truth, prefix=f"{name}.")
        dev = abs(est.estimate - truth)
        if dev > DISCREPANCY_TOL:
            report.append(
                f"DISCREPANCY functional={name} estimate={est.estimate:.6g} ground_truth={truth:.6g} "
                f"deviation={dev:.3g} > {DISCREPANCY_TOL:g}"
            )
    return "\n".join(rows) + "\n", "\n".join(report) + "\n"


def _compare_torus(cfg: RunConfig, spec: MeasureSpec) -> tuple[str, str]:
    d = spec.geometry.n
    curve = _curve(cfg, spec)
    provider = coefficient_provider(spec)
    # keep the Cesaro box at about 2^12 coefficients per axis in d = 1
    top = CESARO_MAX_POWER if d == 1 else max(1, CESARO_MAX_POWER // d)
    Ns = [2**i for i in range(top + 1)]
    ces = [cesaro_average(provider, N, d) for N in Ns]
    rows = ["N,cesaro,t,heat_ratio"]
    for i in range(max(len(Ns), len(curve))):
        N, cv = (Ns[i], ces[i]) if i < len(Ns) else (None, None)
        t, w = (curve.t[i], curve.ratio[i]) if i < len(curve) else (None, None)
        rows.append(",".join(["" if N is None else str(N), _fmt(cv), _fmt(t), _fmt(w)]))
    est = extrapolate_limit(curve, cfg.numeric)
    diff = abs(ces[-1] - est.estimate)
    report = _header(cfg, spec.geometry)
    report += [f"cesaro N={N} {v:.12g}" for N, v in zip(Ns, ces)]
    report += _estimate_lines(est, atom_power(spec).value, prefix="heat.")
    status = "PASS" if diff <= AGREEMENT_TOL else "FAIL"
    report.append(
        f"AGREEMENT cesaro(N={Ns[-1]})={ces[-1]:.6g} heat={est.estimate:.6g} diff={diff:.3g} tol={AGREEMENT_TOL:g} {status}"
    )
    return "\n".join(rows) + "\n", "\n".join(report) + "\n"


def cmd_compare(cfg: RunConfig) -> tuple[str, str]:
    spec = _load_spec(cfg)
    if spec.geometry.family == "su2":
        csv, report = _compare_su2(cfg, spec)
    elif spec.geometry.family == "torus":
        csv, report = _compare_torus(cfg, spec)
    else:
        raise ConfigError(f"compare supports su2 and torus geometries, not {spec.geometry.tag}")
    if cfg.out is None:
        sys.stdout.write(report + csv)
    else:
        _emit(csv, cfg.out)
        sys.stdout.write(report)
    return csv, report


def cmd_validate(cfg: RunConfig) -> tuple[bool, str]:
    if cfg.geometry is not None:
        geometry = Geometry.parse(cfg.geometry)
    elif cfg.spec is not None:
        geometry = _load_spec(cfg).geometry
    else:
        raise ConfigError("validate needs --geometry or --spec")
    checks = run_checks(geometry, cfg.seed, cfg.numeric)
    lines = [f"# heatwiener validate seed={cfg.seed}", f"geometry {geometry.tag}"] + [c.line() for c in checks]
    report = "\n".join(lines) + "\n"
    _emit(report, cfg.out)
    return all(c.passed for c in checks), report


# --------------------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heatwiener", description="Heat-kernel atom detection for measures.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", help="measure spec (JSON file)")
    p.add_argument("--geometry", help="torus-<d> | su2 | heisenberg-<n>")
    p.add_argument("--t0", type=float, default=0.5)
    p.add_argument("--ratio", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--functional", choices=FUNCTIONALS, default="matrix")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-scale", type=float, default=1.0, help="multiply every truncation cutoff")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code or 0)
    try:
        cfg = RunConfig(**vars(args))
        if cfg.command == "estimate":
            cmd_estimate(cfg)
        elif cfg.command == "sweep":
            cmd_sweep(cfg)
        elif cfg.command == "compare":
            cmd_compare(cfg)
        else:
            ok, report = cmd_validate(cfg)
            if cfg.out is not None:
                sys.stdout.write(report)
            return EXIT_OK if ok else EXIT_VALIDATION
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TailBoundUnavailable as exc:
        print(f"numeric failure at t={exc.t:g}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Experiment runner: validates a JSON config, executes one of the pipelines,
and writes deterministic JSON / CSV / plot-data artifacts.

Exit codes: 0 when every invariant checked during the run holds, 2 for
config validation errors, 3 for numerical failures (partial artifacts are
kept with flagged markers).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .algebra import Pseudopolynomial, expr_from_json
from .chebyshev import best_approx
from .converse import converse_experiment
from .demos import closure_failure_demo, counterexample_rates
from .extremal import continuity_probe, shape_from_json
from .forward import forward_rate_experiment
from .sets_metrics import (
    Multigraph,
    SampledCompact,
    fit_geometric_rate,
    sample_box,
    sample_disc,
    sample_polydisc,
    sample_segment,
)

__all__ = ["ExperimentConfig", "ConfigError", "run", "main"]

COMMANDS = ("forward", "converse", "scalar-bws", "counterexample", "closure-demo", "extremal")

_FIELDS_COMMON = {"command", "out_dir", "tol", "seed"}
_FIELDS_BY_COMMAND = {
    "forward": {"shape", "samples", "fiber_degree", "coefficients", "d_range", "mode",
                "store_multigraphs"},
    "converse": {"from_forward", "multigraph_paths", "limit_path", "n", "x0_index",
                 "shape", "samples", "fiber_degree", "coefficients", "d_range", "mode"},
    "scalar-bws": {"shape", "samples", "function", "d_range", "mode"},
    "counterexample": {"k_max", "mesh"},
    "closure-demo": {"nu_list", "box_height"},
    "extremal": {"shape", "grid_step", "h"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    out_dir: str = "results"
    tol: float = 1e-12
    seed: int = 0
    shape: dict | None = None
    samples: int = 401
    fiber_degree: int | None = None
    coefficients: list | None = None
    function: dict | None = None
    d_range: list | None = None
    mode: str = "minimax"
    k_max: int | None = None
    mesh: float | None = None
    nu_list: list | None = None
    box_height: float = 2.0
    grid_step: float | None = None
    h: float | None = None
    from_forward: str | None = None
    multigraph_paths: list | None = None
    limit_path: str | None = None
    n: int | None = None
    x0_index: int | None = None
    store_multigraphs: bool = True

    def to_json(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if value is None:
                continue
            if key in _FIELDS_COMMON or key in _FIELDS_BY_COMMAND.get(self.command, set()):
                out[key] = value
        return out

    @staticmethod
    def from_json(data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        command = data.get("command")
        if command not in COMMANDS:
            raise ConfigError(f"field 'command' must be one of {COMMANDS}, got {command!r}")
        allowed = _FIELDS_COMMON | _FIELDS_BY_COMMAND[command]
        for key in data:
            if key not in allowed:
                raise ConfigError(f"unknown field {key!r} for command {command!r}")
        return ExperimentConfig(**data)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload):
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _build_compact(cfg: ExperimentConfig) -> SampledCompact:
    if cfg.shape is None:
        raise ConfigError("field 'shape' is required for this command")
    try:
        shape = shape_from_json(cfg.shape)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"field 'shape' is invalid: {exc}") from exc
    kind = cfg.shape["kind"]
    if kind == "segment":
        return sample_segment(shape.a, shape.b, cfg.samples)
    if kind == "disc":
        grid_n = max(5, int(math.sqrt(cfg.samples)))
        return sample_disc(shape.center, shape.radius, grid_n)
    if kind == "box":
        per_axis = max(3, int(round(cfg.samples ** (1.0 / len(shape.intervals)))))
        return sample_box(shape.intervals, per_axis)
    if kind == "polydisc":
        grid_n = max(5, int(math.sqrt(cfg.samples)))
        return sample_polydisc(shape.radii, grid_n)
    raise ConfigError(f"shape kind {kind!r} is not a sampleable standard shape")


def _rate_fit_json(fit) -> dict:
    return {
        "M": fit.M,
        "theta": fit.theta,
        "residual": fit.residual if fit.residual == fit.residual else None,
        "verdict": fit.verdict,
        "limsup_proxy": fit.limsup_proxy,
        "floor": fit.floor,
        "n_used": fit.n_used,
    }


def _parse_pseudopolynomial(cfg: ExperimentConfig) -> Pseudopolynomial:
    if cfg.fiber_degree is None or cfg.coefficients is None:
        raise ConfigError("fields 'fiber_degree' and 'coefficients' are required")
    if len(cfg.coefficients) != cfg.fiber_degree:
        raise ConfigError(
            f"field 'coefficients' must list exactly fiber_degree={cfg.fiber_degree} entries"
        )
    try:
        coeffs = tuple(expr_from_json(c) for c in cfg.coefficients)
    except ValueError as exc:
        raise ConfigError(f"field 'coefficients' is invalid: {exc}") from exc
    return Pseudopolynomial(cfg.fiber_degree, coeffs)


def _d_list(cfg: ExperimentConfig):
    if cfg.d_range is None:
        raise ConfigError("field 'd_range' is required")
    if len(cfg.d_range) == 2 and cfg.d_range[0] < cfg.d_range[1]:
        return list(range(int(cfg.d_range[0]), int(cfg.d_range[1]) + 1))
    return [int(d) for d in cfg.d_range]


def _run_forward(cfg: ExperimentConfig, out: Path) -> int:
    K = _build_compact(cfg)
    F = _parse_pseudopolynomial(cfg)
    workers = int(os.environ.get("HYPERAPPROX_THREADS", "1"))
    exp = forward_rate_experiment(F, K, _d_list(cfg), mode=cfg.mode, tol=cfg.tol,
                                  workers=max(1, workers))
    header = ["d"] + [f"coeff_err_{j + 1}" for j in range(F.n)] + ["delta", "graph_dh"]
    rows = [[r.d, *[float(e) for e in r.coeff_errors], r.delta, r.graph_dh] for r in exp.records]
    _write_csv(out / "rates.csv", header, rows)
    _write_csv(
        out / "plot_data.csv",
        ["d"] + [f"log10_coeff_err_{j + 1}" for j in range(F.n)] + ["log10_delta", "log10_graph_dh"],
        [
            [r.d]
            + [math.log10(max(float(e), 1e-300)) for e in r.coeff_errors]
            + [math.log10(max(r.delta, 1e-300)), math.log10(max(r.graph_dh, 1e-300))]
            for r in exp.records
        ],
    )
    payload = {
        "config": cfg.to_json(),
        "checks": exp.checks,
        "fits": {
            "delta": _rate_fit_json(exp.delta_fit),
            "graph_dh": _rate_fit_json(exp.graph_fit),
            "coefficients": [_rate_fit_json(f) for f in exp.coeff_fits],
        },
        "records": [
            {
                "d": r.d,
                "deg_bound": r.deg_bound,
                "coeff_errors": [float(e) for e in r.coeff_errors],
                "delta": r.delta,
                "graph_dh": r.graph_dh,
                "flagged_count": r.flagged_count,
            }
            for r in exp.records
        ],
    }
    if cfg.store_multigraphs:
        payload["target_multigraph"] = exp.target.to_json()
        payload["approximant_multigraphs"] = [
            {"d": r.d, "fibers": [[[t.real, t.imag] for t in f] for f in r.fibers]}
            for r in exp.records
        ]
    _write_json(out / "results.json", payload)
    return 0 if exp.passed else 3


def _run_converse(cfg: ExperimentConfig, out: Path) -> int:
    if cfg.from_forward:
        data = json.loads(Path(cfg.from_forward).read_text())
        if "target_multigraph" not in data:
            raise ConfigError("field 'from_forward' points at results without stored multigraphs")
        limit = Multigraph.from_json(data["target_multigraph"])
        base = limit.base
        n = limit.n
        d_values, w_seq = [], []
        for entry in data["approximant_multigraphs"]:
            fibers = tuple(
                np.asarray([complex(re, im) for re, im in f]) for f in entry["fibers"]
            )
            w_seq.append(Multigraph(base, fibers, n))
            d_values.append(int(entry["d"]))
    elif cfg.multigraph_paths and cfg.limit_path:
        limit = Multigraph.from_json(json.loads(Path(cfg.limit_path).read_text()))
        base = limit.base
        w_seq = [
            Multigraph.from_json(json.loads(Path(p).read_text())) for p in cfg.multigraph_paths
        ]
        n = cfg.n if cfg.n is not None else limit.n
        d_values = list(range(1, len(w_seq) + 1))
    else:
        raise ConfigError(
            "converse needs either field 'from_forward' or fields "
            "'multigraph_paths' + 'limit_path'"
        )
    result = converse_experiment(w_seq, base, n, limit=limit, x0_index=cfg.x0_index,
                                 d_values=d_values, solver_tol=cfg.tol)
    header = ["d"] + [f"coeff_err_{j + 1}" for j in range(n)]
    rows = [[d, *[float(e) for e in result.coeff_errors[i]]] for i, d in enumerate(result.d_values)]
    _write_csv(out / "rates.csv", header, rows)
    _write_csv(
        out / "plot_data.csv",
        ["d"] + [f"log10_coeff_err_{j + 1}" for j in range(n)],
        [
            [d] + [math.log10(max(float(e), 1e-300)) for e in result.coeff_errors[i]]
            for i, d in enumerate(result.d_values)
        ],
    )
    payload = {
        "config": cfg.to_json(),
        "verdict": result.verdict,
        "n_detected": result.n_detected,
        "delta_fit": _rate_fit_json(result.delta_fit),
        "coefficient_fits": [_rate_fit_json(f) for f in result.coeff_fits],
        "lemma_constants": {"R": result.lemma.R, "C": list(result.lemma.C), "D": list(result.lemma.D)},
        "lemma_bound_ok": list(result.lemma_ok),
        "extremal_continuity": result.extremal_continuity,
        "reconstructed": result.reconstructed.to_json(),
    }
    _write_json(out / "results.json", payload)
    ok = result.verdict == "holomorphic-witness" and all(result.lemma_ok) and result.theta_envelope_ok
    return 0 if ok else 3


def _run_scalar(cfg: ExperimentConfig, out: Path) -> int:
    K = _build_compact(cfg)
    if cfg.function is None:
        raise ConfigError("field 'function' is required")
    try:
        fn = expr_from_json(cfg.function)
    except ValueError as exc:
        raise ConfigError(f"field 'function' is invalid: {exc}") from exc
    samples = fn.eval_many(K.points)
    d_list = _d_list(cfg)
    errors = [(d, best_approx(samples, K, d, mode=cfg.mode).error) for d in d_list]
    fit = fit_geometric_rate(errors)
    _write_csv(out / "rates.csv", ["d", "error"], [[d, e] for d, e in errors])
    _write_csv(out / "plot_data.csv", ["d", "log10_error"],
               [[d, math.log10(max(e, 1e-300))] for d, e in errors])
    _write_json(out / "results.json", {"config": cfg.to_json(), "fit": _rate_fit_json(fit)})
    return 0


def _run_counterexample(cfg: ExperimentConfig, out: Path) -> int:
    if cfg.k_max is None:
        raise ConfigError("field 'k_max' is required")
    mesh = cfg.mesh if cfg.mesh is not None else 0.5 ** (cfg.k_max + 3)
    rows = counterexample_rates(cfg.k_max, mesh)
    _write_csv(out / "rates.csv", ["k", "sup_norm", "graph_dh", "c_est"],
               [[r.k, r.sup_norm, r.graph_dh, r.c_est] for r in rows])
    _write_csv(out / "plot_data.csv", ["k", "log10_sup_norm", "log10_graph_dh"],
               [[r.k, math.log10(r.sup_norm), math.log10(max(r.graph_dh, 1e-300))] for r in rows])
    sup_fit = fit_geometric_rate([(r.k, r.sup_norm) for r in rows])
    dh_fit = fit_geometric_rate([(r.k, r.graph_dh) for r in rows])
    checks = {
        "sup_norm_k2": abs(rows[0].sup_norm - 0.125) <= 1e-12 if rows[0].k == 2 else False,
        "graph_dh_bound": all(r.graph_dh <= 0.5 ** r.k + 2 * mesh for r in rows),
        "graph_rate_geometric": dh_fit.verdict == "geometric",
        "sup_rate_not_geometric": sup_fit.verdict == "not-geometric",
    }
    _write_json(out / "results.json", {
        "config": cfg.to_json(),
        "checks": checks,
        "fits": {"sup_norm": _rate_fit_json(sup_fit), "graph_dh": _rate_fit_json(dh_fit)},
    })
    return 0 if all(checks.values()) else 3


def _run_closure(cfg: ExperimentConfig, out: Path) -> int:
    nu_list = cfg.nu_list if cfg.nu_list is not None else [10.0, 100.0, 1000.0]
    report = closure_failure_demo(nu_list, box_height=cfg.box_height, tol=0.05)
    _write_csv(out / "fiber_growth.csv", ["box_height", "fiber_cardinality"],
               [[h, c] for h, c in zip(report.box_heights, report.fiber_counts)])
    checks = {
        "kuratowski_cond1": report.kuratowski.cond1,
        "kuratowski_cond2": report.kuratowski.cond2,
        "fiber_cardinality_grows": all(
            a < b for a, b in zip(report.fiber_counts, report.fiber_counts[1:])
        ),
    }
    _write_json(out / "results.json", {
        "config": cfg.to_json(),
        "checks": checks,
        "per_step_sup": list(report.kuratowski.per_step_sup),
    })
    return 0 if all(checks.values()) else 3


def _run_extremal(cfg: ExperimentConfig, out: Path) -> int:
    if cfg.shape is None:
        raise ConfigError("field 'shape' is required")
    try:
        shape = shape_from_json(cfg.shape)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"field 'shape' is invalid: {exc}") from exc
    step = cfg.grid_step if cfg.grid_step is not None else 0.05
    h = cfg.h if cfg.h is not None else 2.5 * step
    if shape.dim != 1:
        raise ConfigError("extremal command currently samples 1-dimensional shapes")
    half = shape.diameter()
    xs = np.arange(-half, half + step / 2.0, step)
    gx, gy = np.meshgrid(xs, xs)
    pts = (gx.ravel() + 1j * gy.ravel()).reshape(-1, 1)
    vals = shape.phi_many(pts)
    osc = continuity_probe(shape, pts, step * math.sqrt(2) / 2.0, h)
    _write_csv(out / "phi.csv", ["re", "im", "phi"],
               [[float(p[0].real), float(p[0].imag), float(v)] for p, v in zip(pts, vals)])
    checks = {"phi_ge_1": bool(vals.min() >= 1.0 - 1e-12)}
    _write_json(out / "results.json", {
        "config": cfg.to_json(),
        "checks": checks,
        "oscillation": osc,
        "h": h,
    })
    return 0 if all(checks.values()) else 3


_RUNNERS = {
    "forward": _run_forward,
    "converse": _run_converse,
    "scalar-bws": _run_scalar,
    "counterexample": _run_counterexample,
    "closure-demo": _run_closure,
    "extremal": _run_extremal,
}


def run(config: ExperimentConfig, out_dir: str | None = None) -> int:
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _RUNNERS[config.command](config, out)
    except ConfigError:
        raise
    except (ValueError, RuntimeError, AssertionError) as exc:
        _write_json(out / "results.json", {
            "config": config.to_json(),
            "flagged": True,
            "error": str(exc),
        })
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hyperapprox",
        description="run approximation-rate experiments from a JSON config",
    )
    sub = parser.add_subparsers(dest="action", required=True)
    runp = sub.add_parser("run", help="execute an experiment config")
    runp.add_argument("config", help="path to the experiment config JSON")
    runp.add_argument("--out", default=None, help="output directory (overrides config)")
    runp.add_argument("--mesh", type=float, default=None, help="override the config mesh")
    runp.add_argument("--tol", type=float, default=None, help="override the solver tolerance")
    runp.add_argument("--seed", type=int, default=None,
                      help="seed for randomized property suites (core pipelines are deterministic)")
    args = parser.parse_args(argv)

    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for key, value in (("mesh", args.mesh), ("tol", args.tol), ("seed", args.seed)):
        if value is not None:
            raw[key] = value
    try:
        cfg = ExperimentConfig.from_json(raw)
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

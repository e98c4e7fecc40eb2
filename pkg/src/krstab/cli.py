"""Command line front end.

Each subcommand reads a JSON config file, validates it against an explicit
schema (unknown keys are rejected), runs the requested computation, and
writes its output files deterministically: rerunning with the same config
reproduces every output byte for byte.  Nothing is written unless the whole
command succeeds; on failure any partially written files are removed.

Exit codes: 0 success (all outputs written), 1 config error, 2 IO error,
3 numerical diagnostics failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import jsonschema
import numpy as np

from .experiments import (
    DataDistribution,
    ExperimentReport,
    NoiseProcess,
    estimate_rate,
    run_thm1,
    run_thm2,
)
from .kernels import KernelSpec, PointSet, gram, kernel_diag
from .linalg import DiagnosticsError
from .operators import (
    EvaluationOperator,
    filter_gain_bound,
    filter_gains,
    filter_max,
    noise_operator_bound,
    operator_norm_bound_p,
    shrinkage_profile,
)
from .rkhs import RepresenterFunction, evaluate
from .solver import DataSet, krr_fit, min_norm_interpolant
from .stability import (
    Schedule,
    StabilityParams,
    beta_stability,
    eps_for_target,
    sigma_admissible_ls,
    stability_probability,
    stability_probability_combined,
    variance_radius,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_DIAGNOSTICS = 3

_KERNEL_DESC = (
    "kernel spec: {kind:'gaussian', width>0} or {kind:'linear'} or "
    "{kind:'polynomial', degree: integer>=1, offset>=0}"
)

_KERNEL_SCHEMA = {
    "description": _KERNEL_DESC,
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "gaussian"},
                "width": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["kind", "width"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "linear"}},
            "required": ["kind"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "polynomial"},
                "degree": {"type": "integer", "minimum": 1},
                "offset": {"type": "number", "minimum": 0},
            },
            "required": ["kind", "degree", "offset"],
            "additionalProperties": False,
        },
    ],
}

_POINTS_SCHEMA = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
}

_FUNCTION_SCHEMA = {
    "type": "object",
    "properties": {
        "kernel": _KERNEL_SCHEMA,
        "anchors": _POINTS_SCHEMA,
        "coeffs": {"type": "array", "minItems": 1, "items": {"type": "number"}},
    },
    "required": ["kernel", "anchors", "coeffs"],
    "additionalProperties": False,
}

_NOISE_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["uniform", "rademacher", "truncated_gaussian"]},
        "b_max": {"type": "number", "minimum": 0},
        "sd": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind", "b_max"],
    "additionalProperties": False,
}

_SCHEDULE_SCHEMA = {
    "type": "object",
    "properties": {
        "family": {"const": "power"},
        "lambda0": {"type": "number", "exclusiveMinimum": 0},
        "exponent": {"type": "number"},
    },
    "required": ["lambda0", "exponent"],
    "additionalProperties": False,
}

_SEED_SCHEMA = {"type": "integer", "minimum": 0}


def _obj(properties: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": required,
        "additionalProperties": False,
    }


def _desc(schema: dict, text: str) -> dict:
    out = dict(schema)
    out["description"] = text
    return out


CONFIG_SCHEMAS: dict[str, dict] = {
    "fit": _obj(
        {
            "kernel": _KERNEL_SCHEMA,
            "dataset": _desc(
                _obj(
                    {
                        "points": _POINTS_SCHEMA,
                        "labels": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                    },
                    ["points", "labels"],
                ),
                "inline dataset {points: [[...],...], labels: [...]}; "
                "exactly one of dataset / dataset_csv",
            ),
            "dataset_csv": _desc(
                {"type": "string"},
                "path to a CSV file with header x1,...,xd,y; "
                "exactly one of dataset / dataset_csv",
            ),
            "lambda": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "regularization parameter, number > 0 (never rescaled by n)",
            ),
            "output": _desc(
                {"type": "string"},
                "output path prefix; writes <prefix>.fit.json and <prefix>.residuals.csv",
            ),
        },
        ["kernel", "lambda", "output"],
    ),
    "interpolate": _obj(
        {
            "kernel": _KERNEL_SCHEMA,
            "dataset": _desc(
                _obj(
                    {
                        "points": _POINTS_SCHEMA,
                        "values": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                    },
                    ["points", "values"],
                ),
                "inline data {points: [[...],...], values: [...]}; "
                "exactly one of dataset / dataset_csv",
            ),
            "dataset_csv": _desc(
                {"type": "string"},
                "path to a CSV file with header x1,...,xd,y; "
                "exactly one of dataset / dataset_csv",
            ),
            "output": _desc(
                {"type": "string"},
                "output path prefix; writes <prefix>.interpolant.json and "
                "<prefix>.residuals.csv",
            ),
        },
        ["kernel", "output"],
    ),
    "thm2": _obj(
        {
            "points": _desc(_POINTS_SCHEMA, "fixed design points, one inner array per point"),
            "f_tilde": _desc(
                _FUNCTION_SCHEMA,
                "noiseless target as a kernel expansion "
                "{kernel, anchors, coeffs}; its kernel drives the whole run",
            ),
            "noise": _desc(
                _NOISE_SCHEMA,
                "noise spec {kind: uniform|rademacher|truncated_gaussian, b_max>=0, "
                "sd>0 for truncated_gaussian only}",
            ),
            "schedule": _desc(
                _SCHEDULE_SCHEMA,
                "regularization schedule {family:'power', lambda0>0, exponent}; "
                "lambda(t) = lambda0 * t^-exponent",
            ),
            "t_grid": _desc(
                {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "number", "exclusiveMinimum": 0},
                },
                "noise-shrink factors, strictly increasing positive numbers",
            ),
            "trials": _desc({"type": "integer", "minimum": 1}, "trials per grid point, integer >= 1"),
            "seed": _desc(_SEED_SCHEMA, "master seed, integer >= 0"),
            "eta": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "target H-distance for the certified-closeness columns (default 0.1)",
            ),
            "m_bound": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "label-scale bound M; default ||f_tilde||_H * kappa + b_max",
            ),
            "c_bound": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "loss admissibility constant C; default 4 * M",
            ),
            "output": _desc(
                {"type": "string"},
                "output path prefix; writes <prefix>.csv, <prefix>.summary.json, "
                "<prefix>.plot.dat",
            ),
        },
        ["points", "f_tilde", "noise", "schedule", "t_grid", "trials", "seed", "output"],
    ),
    "thm1": _obj(
        {
            "distribution": _desc(
                _obj(
                    {
                        "box": _obj(
                            {
                                "lo": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                                "hi": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                            },
                            ["lo", "hi"],
                        ),
                        "target": _FUNCTION_SCHEMA,
                        "noise": _NOISE_SCHEMA,
                    },
                    ["box", "target", "noise"],
                ),
                "sampling distribution {box: {lo, hi}, target: function, noise}; "
                "inputs are uniform on the box, labels are target(x) + noise",
            ),
            "schedule": _desc(
                _SCHEDULE_SCHEMA,
                "regularization schedule {family:'power', lambda0>0, exponent}; "
                "lambda(n) = lambda0 * n^-exponent",
            ),
            "n_grid": _desc(
                {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "integer", "minimum": 1},
                },
                "sample sizes, strictly increasing integers >= 1",
            ),
            "trials": _desc({"type": "integer", "minimum": 1}, "trials per grid point, integer >= 1"),
            "seed": _desc(_SEED_SCHEMA, "master seed, integer >= 0"),
            "eta": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "target H-distance for the certified-closeness columns (default 0.1)",
            ),
            "m_bound": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "label-scale bound M; default ||target||_H * kappa + b_max",
            ),
            "c_bound": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "loss admissibility constant C; default 4 * M",
            ),
            "output": _desc(
                {"type": "string"},
                "output path prefix; writes <prefix>.csv, <prefix>.summary.json, "
                "<prefix>.plot.dat",
            ),
        },
        ["distribution", "schedule", "n_grid", "trials", "seed", "output"],
    ),
    "bounds": _obj(
        {
            "lambda": _desc(
                {"type": "number", "exclusiveMinimum": 0}, "regularization parameter, number > 0"
            ),
            "eps": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "closeness level for the probability and radius formulas, number > 0",
            ),
            "c": _desc(
                {"type": "number", "exclusiveMinimum": 0}, "loss admissibility constant C > 0"
            ),
            "m": _desc({"type": "number", "exclusiveMinimum": 0}, "loss/label scale bound M > 0"),
            "kappa": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "kernel diagonal bound kappa = sup sqrt(K(x,x)); give either kappa+n "
                "or kernel+points",
            ),
            "n": _desc(
                {"type": "integer", "minimum": 1},
                "sample size; required with kappa, defaults to len(points) otherwise",
            ),
            "kernel": _KERNEL_SCHEMA,
            "points": _desc(
                _POINTS_SCHEMA,
                "points whose Gram matrix supplies kappa and the operator bounds",
            ),
            "eta": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "optional target H-distance; adds the sufficient closeness level",
            ),
            "t": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "optional noise-shrink factor; with b_max adds the noise propagation bound",
            ),
            "b_max": _desc(
                {"type": "number", "minimum": 0},
                "optional noise amplitude; the noise bound uses ||b||_2 <= b_max * sqrt(n)",
            ),
            "x_max": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "optional bound on |f(x) - y|; adds the squared-loss admissibility constant",
            ),
            "output": _desc({"type": "string"}, "output path prefix; writes <prefix>.bounds.json"),
        },
        ["lambda", "eps", "c", "m", "output"],
    ),
    "spectrum": _obj(
        {
            "kernel": _KERNEL_SCHEMA,
            "points": _desc(_POINTS_SCHEMA, "points whose Gram spectrum is reported"),
            "lambdas": _desc(
                {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "number", "exclusiveMinimum": 0},
                },
                "regularization values to profile, each > 0",
            ),
            "scale": _desc(
                {"type": "number", "exclusiveMinimum": 0},
                "eigenvalue scale in the shrinkage factors lambda/(gamma/scale + lambda); "
                "default n (sample operator convention)",
            ),
            "output": _desc({"type": "string"}, "output path prefix; writes <prefix>.spectrum.json"),
        },
        ["kernel", "points", "lambdas", "output"],
    ),
}

_POST_RULES: dict[str, list[str]] = {
    "fit": ["exactly one of dataset / dataset_csv must be present"],
    "interpolate": ["exactly one of dataset / dataset_csv must be present"],
    "thm2": ["t_grid must be strictly increasing"],
    "thm1": ["n_grid must be strictly increasing"],
    "bounds": [
        "exactly one of kappa / (kernel and points) must be present",
        "n is required when kappa is given inline",
    ],
    "spectrum": [],
}


def _config_help(command: str) -> str:
    schema = CONFIG_SCHEMAS[command]
    required = set(schema["required"])
    lines = ["config keys:"]
    for key, sub in schema["properties"].items():
        tag = "required" if key in required else "optional"
        lines.append(f"  {key} [{tag}]: {sub.get('description', '')}")
    rules = _POST_RULES.get(command, [])
    if rules:
        lines.append("additional rules:")
        lines.extend(f"  {r}" for r in rules)
    lines.append("flags --seed / --out override the config's seed / output keys.")
    return "\n".join(lines)


def _validate_config(command: str, cfg) -> None:
    if not isinstance(cfg, dict):
        raise ValueError("config root must be a JSON object")
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMAS[command])
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ValueError(f"config key {where}: {err.message}")
    if command in ("fit", "interpolate"):
        if ("dataset" in cfg) == ("dataset_csv" in cfg):
            raise ValueError("config must contain exactly one of dataset / dataset_csv")
    if command == "thm2":
        grid = cfg["t_grid"]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("t_grid must be strictly increasing")
    if command == "thm1":
        grid = cfg["n_grid"]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
    if command == "bounds":
        has_kappa = "kappa" in cfg
        has_points = "kernel" in cfg and "points" in cfg
        if has_kappa == has_points:
            raise ValueError("give exactly one of kappa / (kernel and points)")
        if has_kappa and "n" not in cfg:
            raise ValueError("n is required when kappa is given inline")
        if ("kernel" in cfg) != ("points" in cfg):
            raise ValueError("kernel and points must be given together")


def _config_hash(cfg: dict) -> str:
    """sha1 of the effective config with the output key removed, so the hash
    identifies the computation, not the destination."""
    trimmed = {k: v for k, v in cfg.items() if k != "output"}
    blob = json.dumps(trimmed, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha1(blob).hexdigest()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_dataset_csv(path: str) -> tuple[PointSet, np.ndarray]:
    import csv as _csv

    with open(path, newline="", encoding="utf-8") as fh:
        raw = list(_csv.reader(fh))
    if not raw:
        raise ValueError(f"{path}: dataset file is empty")
    header = [h.strip() for h in raw[0]]
    d = len(header) - 1
    if d < 1 or header != [f"x{i + 1}" for i in range(d)] + ["y"]:
        raise ValueError(f"{path} line 1: header must be x1,...,xd,y")
    pts: list[list[float]] = []
    ys: list[float] = []
    for lineno, row in enumerate(raw[1:], start=2):
        if not row:
            continue
        if len(row) != d + 1:
            raise ValueError(f"{path} line {lineno}: expected {d + 1} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise ValueError(f"{path} line {lineno}: non-numeric field") from exc
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"{path} line {lineno}: non-finite value")
        pts.append(vals[:d])
        ys.append(vals[d])
    if not pts:
        raise ValueError(f"{path}: no data rows")
    return PointSet(np.asarray(pts)), np.asarray(ys)


def _inline_dataset(cfg: dict, value_key: str) -> tuple[PointSet, np.ndarray]:
    if "dataset_csv" in cfg:
        return _read_dataset_csv(cfg["dataset_csv"])
    ds = cfg["dataset"]
    pts = PointSet(np.asarray(ds["points"], dtype=float))
    vals = np.asarray(ds[value_key], dtype=float)
    if vals.shape != (len(pts),):
        raise ValueError(
            f"dataset has {len(pts)} points but {vals.shape[0]} {value_key}"
        )
    return pts, vals


def _residuals_csv(residuals: np.ndarray) -> str:
    lines = ["index,residual"]
    lines.extend(f"{i},{float(r)!r}" for i, r in enumerate(residuals))
    return "\n".join(lines) + "\n"


def _cmd_fit(cfg: dict) -> dict[str, str]:
    kernel = KernelSpec.from_json_dict(cfg["kernel"])
    pts, labels = _inline_dataset(cfg, "labels")
    fit = krr_fit(DataSet(pts, labels), float(cfg["lambda"]), kernel)
    out = cfg["output"]
    return {
        out + ".fit.json": _json_text(fit.to_json_dict()),
        out + ".residuals.csv": _residuals_csv(fit.residuals),
    }


def _cmd_interpolate(cfg: dict) -> dict[str, str]:
    kernel = KernelSpec.from_json_dict(cfg["kernel"])
    pts, values = _inline_dataset(cfg, "values")
    f = min_norm_interpolant(pts, values, kernel)
    residuals = evaluate(f, pts) - values
    out = cfg["output"]
    return {
        out + ".interpolant.json": _json_text(f.to_json_dict()),
        out + ".residuals.csv": _residuals_csv(residuals),
    }


def _plot_text(report: ExperimentReport) -> str:
    lines = ["# log10_index_var log10_median_h_distance"]
    for idx, med in report.medians().items():
        if med > 0 and math.isfinite(med):
            lines.append(f"{math.log10(float(idx))!r} {math.log10(med)!r}")
    return "\n".join(lines) + "\n"


def _report_outputs(cfg: dict, report: ExperimentReport) -> dict[str, str]:
    meta = report.metadata
    try:
        rate = estimate_rate(report)._asdict()
    except DiagnosticsError:
        rate = None
    summary = {
        "command": meta["command"],
        "index_name": meta["index_name"],
        "config_sha1": _config_hash(cfg),
        "rng": meta["rng"],
        "schedule": meta["schedule"],
        "schedule_valid": meta["schedule_valid"],
        "kappa": meta["kappa"],
        "eta": meta["eta"],
        "m_bound": meta["m_bound"],
        "c_bound": meta["c_bound"],
        "trials": meta["trials"],
        "seed": meta["seed"],
        "row_count": len(report.rows),
        "flagged_rows": [
            {"index_var": r.index_var, "trial": r.trial, "seed": r.seed, "flag": r.flag}
            for r in report.flagged()
        ],
        "medians": [
            {"index_var": idx, "median_h_distance": med}
            for idx, med in report.medians().items()
        ],
        "rate": rate,
    }
    if meta["command"] == "thm2":
        finite = [
            r.decomp_residual
            for r in report.rows
            if not r.flag and math.isfinite(r.decomp_residual)
        ]
        summary["max_decomposition_residual"] = max(finite) if finite else None
    out = cfg["output"]
    return {
        out + ".csv": report.to_csv_text(),
        out + ".summary.json": _json_text(summary),
        out + ".plot.dat": _plot_text(report),
    }


def _cmd_thm2(cfg: dict) -> dict[str, str]:
    report = run_thm2(
        pts=PointSet(np.asarray(cfg["points"], dtype=float)),
        f_tilde=RepresenterFunction.from_json_dict(cfg["f_tilde"]),
        noise=NoiseProcess.from_json_dict(cfg["noise"]),
        schedule=Schedule.from_json_dict(cfg["schedule"]),
        t_grid=cfg["t_grid"],
        trials=cfg["trials"],
        seed=cfg["seed"],
        eta=cfg.get("eta", 0.1),
        m_bound=cfg.get("m_bound"),
        c_bound=cfg.get("c_bound"),
    )
    return _report_outputs(cfg, report)


def _cmd_thm1(cfg: dict) -> dict[str, str]:
    dist_cfg = cfg["distribution"]
    dist = DataDistribution(
        lo=np.asarray(dist_cfg["box"]["lo"], dtype=float),
        hi=np.asarray(dist_cfg["box"]["hi"], dtype=float),
        target=RepresenterFunction.from_json_dict(dist_cfg["target"]),
        noise=NoiseProcess.from_json_dict(dist_cfg["noise"]),
    )
    report = run_thm1(
        dist=dist,
        schedule=Schedule.from_json_dict(cfg["schedule"]),
        n_grid=cfg["n_grid"],
        trials=cfg["trials"],
        seed=cfg["seed"],
        eta=cfg.get("eta", 0.1),
        m_bound=cfg.get("m_bound"),
        c_bound=cfg.get("c_bound"),
    )
    return _report_outputs(cfg, report)


def _cmd_bounds(cfg: dict) -> dict[str, str]:
    lam = float(cfg["lambda"])
    if "kappa" in cfg:
        kappa = float(cfg["kappa"])
        n = int(cfg["n"])
        op = None
    else:
        kernel = KernelSpec.from_json_dict(cfg["kernel"])
        pts = PointSet(np.asarray(cfg["points"], dtype=float))
        op = EvaluationOperator(kernel, pts)
        kappa = math.sqrt(max(float(np.max(kernel_diag(kernel, pts))), 0.0))
        n = int(cfg.get("n", len(pts)))
    params = StabilityParams(
        c=float(cfg["c"]), kappa=kappa, m=float(cfg["m"]), n=n, lam=lam, eps=float(cfg["eps"])
    )
    beta = beta_stability(params)
    p_n = stability_probability(params, beta)
    argmax, max_value = filter_max(n, lam)
    result = {
        "inputs": {k: v for k, v in cfg.items() if k != "output"},
        "config_sha1": _config_hash(cfg),
        "kappa": kappa,
        "n": n,
        "beta": beta,
        "p_n": p_n,
        "p_n_combined": stability_probability_combined(params),
        "p_n_vacuous": p_n >= 1.0,
        "sample_size_ok": params.sample_size_ok,
        "variance_radius": variance_radius(params.eps, lam),
        "filter_argmax": argmax,
        "filter_max_value": max_value,
        "filter_gain_bound": filter_gain_bound(n, lam),
    }
    if "eta" in cfg:
        result["eps_for_target"] = eps_for_target(float(cfg["eta"]), lam)
    if "x_max" in cfg:
        result["sigma_admissible"] = sigma_admissible_ls(float(cfg["x_max"]))
    if "t" in cfg and "b_max" in cfg:
        result["noise_bound"] = noise_operator_bound(
            n, float(cfg["t"]), lam, float(cfg["b_max"]) * math.sqrt(n)
        )
    if op is not None:
        result["operator_norm_bound"] = operator_norm_bound_p(op)
        result["gram_min_eigenvalue"] = float(op.gram.eigen.eigenvalues[-1])
    return {cfg["output"] + ".bounds.json": _json_text(result)}


def _cmd_spectrum(cfg: dict) -> dict[str, str]:
    kernel = KernelSpec.from_json_dict(cfg["kernel"])
    pts = PointSet(np.asarray(cfg["points"], dtype=float))
    op = EvaluationOperator(kernel, pts)
    g = op.gram
    n = g.n
    scale = float(cfg.get("scale", n))
    profiles = []
    for lam in cfg["lambdas"]:
        lam = float(lam)
        argmax, max_value = filter_max(n, lam)
        profiles.append(
            {
                "lambda": lam,
                "scale": scale,
                "shrinkage": [[gamma, fac] for gamma, fac in shrinkage_profile(g, lam, scale)],
                "filter_gains": [float(v) for v in filter_gains(g, lam)],
                "filter_gain_bound": filter_gain_bound(n, lam),
                "filter_argmax": argmax,
                "filter_max_value": max_value,
            }
        )
    result = {
        "config_sha1": _config_hash(cfg),
        "n": n,
        "kappa": g.kappa,
        "eigenvalues": [float(w) for w in g.eigen.eigenvalues],
        "operator_norm_bound": operator_norm_bound_p(op),
        "profiles": profiles,
    }
    return {cfg["output"] + ".spectrum.json": _json_text(result)}


_RUNNERS = {
    "fit": _cmd_fit,
    "interpolate": _cmd_interpolate,
    "thm1": _cmd_thm1,
    "thm2": _cmd_thm2,
    "bounds": _cmd_bounds,
    "spectrum": _cmd_spectrum,
}

_COMMAND_HELP = {
    "fit": "regularized least squares fit on a dataset",
    "interpolate": "minimal-norm interpolant through given values",
    "thm1": "growing-sample convergence experiment",
    "thm2": "vanishing-noise convergence experiment",
    "bounds": "stability and operator bounds for given constants",
    "spectrum": "Gram spectrum with shrinkage and filter profiles",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krstab",
        description="Kernel ridge regression experiments with deterministic outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in _RUNNERS:
        p = sub.add_parser(
            name,
            help=_COMMAND_HELP[name],
            description=_COMMAND_HELP[name],
            epilog=_config_help(name),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the config's seed key")
        p.add_argument("--out", default=None, help="override the config's output prefix")
    return parser


def _write_outputs(outputs: dict[str, str]) -> list[str]:
    written: list[str] = []
    try:
        for path, text in outputs.items():
            parent = os.path.dirname(path)
            if parent:
                os.makedirs(parent, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            written.append(path)
    except OSError:
        for p in written:
            try:
                os.remove(p)
            except OSError:
                pass
        raise
    return written


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{args.config}: invalid JSON ({exc})") from exc
        if args.seed is not None:
            if args.command not in ("thm1", "thm2"):
                raise ValueError(f"--seed does not apply to the {args.command} command")
            cfg["seed"] = args.seed
        if args.out is not None:
            cfg["output"] = args.out
        _validate_config(args.command, cfg)
        outputs = _RUNNERS[args.command](cfg)
        written = _write_outputs(outputs)
    except (ValueError, jsonschema.exceptions.ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DiagnosticsError as exc:
        print(f"numerical diagnostics failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()

"""Command-line front end.

Subcommands: scatter, critical, gamma, furstenberg, walk, examples.
Outputs are flat files: CSV with a leading '# manifest: {...}' comment
line, or JSON with a "manifest" key. The manifest (subcommand, resolved
parameters, master seed, tool version, potential hash) is sufficient to
reproduce the run byte-exactly; no timestamps are recorded.

Exit codes: 0 success, 1 usage error (bad flags, files, or potential
data), 2 numerical failure (diagnostic JSON on stderr).

Parameter precedence: command-line flags > --config JSON file (same key
names as the long flags, dashes as underscores) > built-in defaults.
The environment variable ANDERSON_SEED supplies the default master seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, kernels
from .criticality import (
    classify_energy,
    example1_critical_types,
    example2_reflectionless,
    negative_axis_zeros,
    nj_construction,
    scan_reflection_zeros,
)
from .errors import ComputationError, PotentialError, WitnessNotFound
from .experiments import Type2Spec, drift_check, sqrt_growth_experiment
from .furstenberg import (
    negative_energy_unstable_check,
    noncompactness_witness,
    strong_irreducibility_check,
)
from .lyapunov import (
    EnsembleConfig,
    gamma_curve,
)
from .potential import load_potential, potential_sha256
from .scattering import jost_ab

GAMMA_COLUMNS = (
    "E",
    "gamma_hat",
    "std_error",
    "n_steps",
    "n_realizations",
    "estimator",
    "criticality_status",
    "error",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; route through UsageError
    # so the documented usage exit code (1) applies.
    def error(self, message):
        raise UsageError(message)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _build_parser() -> _Parser:
    parser = _Parser(prog="anderson1d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def common(sp, potential=True):
        sp.add_argument("--config", help="JSON file with default parameter values")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--seed", type=int, default=None, help="master seed")
        sp.add_argument("--threads", type=int, default=None, help="numba thread count")
        if potential:
            sp.add_argument("--potential", default=None, help="potential JSON file")

    sp = sub.add_parser("scatter", help="a(k), b(k) and Wronskian residual over a k grid")
    common(sp)
    sp.add_argument("--k-range", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    sp.add_argument("--grid-n", type=int, default=None)
    sp.add_argument("--gnuplot", action="store_true")

    sp = sub.add_parser("critical", help="critical-energy report over a k window")
    common(sp)
    sp.add_argument("--k-range", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    sp.add_argument("--alpha-range", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    sp.add_argument("--grid-n", type=int, default=None)
    sp.add_argument("--tol", type=float, default=None)

    sp = sub.add_parser("gamma", help="Lyapunov exponent estimates")
    common(sp)
    sp.add_argument("--E", nargs="+", type=float, default=None, help="explicit energies")
    sp.add_argument("--E-grid", nargs=3, type=float, default=None, metavar=("LO", "HI", "N"))
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--realizations", type=int, default=None)
    sp.add_argument("--p-one", type=float, default=None)
    sp.add_argument("--estimator", choices=("vector", "matrix", "both"), default=None)
    sp.add_argument("--gnuplot", action="store_true")

    sp = sub.add_parser("furstenberg", help="non-compactness and irreducibility verdicts")
    common(sp)
    sp.add_argument("--E", nargs="+", type=float, default=None)
    sp.add_argument("--max-word-len", type=int, default=None)
    sp.add_argument("--n-dirs", type=int, default=None)
    sp.add_argument("--orbit-depth", type=int, default=None)

    sp = sub.add_parser("walk", help="sqrt(N) growth experiment at a doubly-resonant point")
    common(sp, potential=False)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--pairs", type=int, default=None)
    sp.add_argument("--realizations", type=int, default=None)
    sp.add_argument("--skip-gamma", action="store_true")
    sp.add_argument("--gnuplot", action="store_true")

    sp = sub.add_parser("examples", help="built-in example tables as a JSON bundle")
    common(sp, potential=False)
    sp.add_argument("--lambda-j", type=int, default=None, help="largest j in the N_j table")
    sp.add_argument("--E-max", type=float, default=None)

    return parser


_DEFAULTS = {
    "scatter": {"k_range": [0.5, 20.0], "grid_n": None},
    "critical": {"k_range": [0.5, 10.0], "alpha_range": None, "grid_n": None, "tol": 1e-8},
    "gamma": {
        "E": None,
        "E_grid": None,
        "steps": 10000,
        "realizations": 100,
        "p_one": 0.5,
        "estimator": "vector",
    },
    "furstenberg": {"E": None, "max_word_len": 500, "n_dirs": 64, "orbit_depth": 12},
    "walk": {"n": 2, "m": 1, "p": 0.5, "pairs": 2**17, "realizations": 2000},
    "examples": {"lambda_j": 5, "E_max": 50.0},
}


def _resolve_params(args: argparse.Namespace) -> dict:
    """Apply precedence: explicit flags, then config file, then defaults."""
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise UsageError(f"config file {args.config} must hold a JSON object")

    params = dict(_DEFAULTS.get(args.subcommand, {}))
    for key in ("potential",):
        if hasattr(args, key):
            params[key] = None
    for key, value in config.items():
        key = key.replace("-", "_")
        if key in params:
            params[key] = value
    for key in list(params):
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            params[key] = flag_value

    seed = args.seed
    if seed is None:
        seed = config.get("seed")
    if seed is None:
        env = os.environ.get("ANDERSON_SEED", "")
        seed = int(env) if env else 0
    params["seed"] = int(seed)
    return params


# execution details that do not influence the computed numbers; kept
# out of the manifest so reruns are byte-identical at any thread count
_NON_SEMANTIC = ("out", "threads", "config", "gnuplot")


def _manifest(subcommand: str, params: dict, pot_hash: str | None) -> dict:
    clean = {}
    for key, value in sorted(params.items()):
        if key in _NON_SEMANTIC:
            continue
        if isinstance(value, tuple):
            value = list(value)
        clean[key] = value
    return {
        "subcommand": subcommand,
        "parameters": clean,
        "master_seed": params.get("seed", 0),
        "version": __version__,
        "potential_sha256": pot_hash,
    }


def _write_text(out_path: str | None, text: str) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(manifest: dict, header: tuple, rows, trailing_comments=()) -> str:
    lines = ["# manifest: " + json.dumps(manifest, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    for comment in trailing_comments:
        lines.append("# " + comment)
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _load_required_potential(params: dict):
    path = params.get("potential")
    if not path:
        raise UsageError("--potential is required (or set 'potential' in the config file)")
    try:
        p = load_potential(path)
    except OSError as exc:
        raise UsageError(f"cannot read potential file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"potential file {path} is not valid JSON: {exc}") from exc
    return p, potential_sha256(p)


def _gnuplot_script(out_path: str, columns: dict[str, int], title: str) -> str:
    plots = ", ".join(
        f"'{os.path.basename(out_path)}' using 1:{idx} with lines title '{name}'"
        for name, idx in columns.items()
    )
    return (
        "set datafile separator ','\n"
        "set key outside\n"
        f"set title '{title}'\n"
        f"plot {plots}\n"
        "pause -1\n"
    )


def _emit_gnuplot(params, args, columns: dict[str, int], title: str) -> None:
    if not getattr(args, "gnuplot", False):
        return
    if not params.get("out"):
        raise UsageError("--gnuplot requires --out (the script references the data file)")
    script = _gnuplot_script(params["out"], columns, title)
    with open(params["out"] + ".gp", "w", encoding="utf-8") as fh:
        fh.write(script)


def _cmd_scatter(args) -> int:
    params = _resolve_params(args)
    params["out"] = getattr(args, "out", None)
    p, pot_hash = _load_required_potential(params)
    k_lo, k_hi = (float(x) for x in params["k_range"])
    if not (k_lo < k_hi):
        raise UsageError(f"bad k range [{k_lo}, {k_hi}]")
    grid_n = params["grid_n"] or max(2, math.ceil((k_hi - k_lo) * 200))
    ks = np.linspace(k_lo, k_hi, int(grid_n))
    a, b = jost_ab(p, ks)
    residual = np.abs(a) ** 2 - np.abs(b) ** 2 - 1.0
    manifest = _manifest("scatter", params, pot_hash)
    rows = [
        (float(ks[i]), float(a[i].real), float(a[i].imag), float(b[i].real),
         float(b[i].imag), float(residual[i]))
        for i in range(len(ks))
    ]
    text = _csv_text(
        manifest,
        ("k", "re_a", "im_a", "re_b", "im_b", "wronskian_residual"),
        rows,
    )
    _write_text(params["out"], text)
    _emit_gnuplot(params, args, {"re_a": 2, "im_a": 3, "re_b": 4, "im_b": 5}, "scattering coefficients")
    return 0


def _cmd_critical(args) -> int:
    params = _resolve_params(args)
    params["out"] = getattr(args, "out", None)
    p, pot_hash = _load_required_potential(params)
    k_lo, k_hi = (float(x) for x in params["k_range"])
    tol = float(params["tol"])

    scan = scan_reflection_zeros(p, k_lo, k_hi, grid_n=params["grid_n"], tol=tol)
    entries = []
    for k, residual in scan.zeros:
        report = classify_energy(p, k * k, tol=max(tol, 10 * residual))
        entries.append(
            {
                "E": k * k,
                "k": k,
                "status": report.status,
                "reasons": list(report.reasons),
                "residual_abs_b": residual,
            }
        )

    lattice = []
    n = max(1, math.ceil(2.0 * k_lo / math.pi))
    while (n * math.pi / 2.0) <= k_hi:
        if (n * math.pi / 2.0) >= k_lo:
            lattice.append({"E": (n * math.pi / 2.0) ** 2, "n": n, "reasons": ["HalfIntegerPiSquared"]})
        n += 1

    negative = []
    if params["alpha_range"]:
        a_lo, a_hi = (float(x) for x in params["alpha_range"])
        for alpha, which in negative_axis_zeros(p, a_lo, a_hi, grid_n=params["grid_n"], tol=tol):
            negative.append({"E": -alpha * alpha, "alpha": alpha, "which": which,
                             "reasons": ["NegativeAxisZero"]})

    payload = {
        "manifest": _manifest("critical", params, pot_hash),
        "identically_reflectionless": scan.identically_reflectionless,
        "reflection_zeros": entries,
        "lattice_energies": lattice,
        "negative_axis_zeros": negative,
    }
    _write_text(params["out"], _json_text(payload))
    return 0


def _energies_from_params(params) -> list[float]:
    if params.get("E"):
        return [float(E) for E in params["E"]]
    if params.get("E_grid"):
        lo, hi, n = params["E_grid"]
        return [float(E) for E in np.linspace(float(lo), float(hi), int(n))]
    raise UsageError("provide --E or --E-grid")


def _cmd_gamma(args) -> int:
    params = _resolve_params(args)
    params["out"] = getattr(args, "out", None)
    p, pot_hash = _load_required_potential(params)
    energies = _energies_from_params(params)
    config = EnsembleConfig(
        p_one=float(params["p_one"]),
        n_steps=int(params["steps"]),
        n_realizations=int(params["realizations"]),
        master_seed=int(params["seed"]),
    )
    estimators = ("vector", "matrix") if params["estimator"] == "both" else (params["estimator"],)
    labels = {"vector": "VectorNorm", "matrix": "MatrixNorm"}
    rows = []
    for estimator in estimators:
        for row in gamma_curve(p, energies, config, estimator=estimator):
            if row.estimate is None:
                rows.append((row.E, float("nan"), float("nan"), config.n_steps,
                             config.n_realizations, labels[estimator], row.criticality_status,
                             (row.error or "").replace(",", ";")))
            else:
                est = row.estimate
                rows.append((est.E, est.gamma_hat, est.std_error, est.n_steps,
                             est.n_realizations, est.estimator, row.criticality_status, ""))
    manifest = _manifest("gamma", params, pot_hash)
    _write_text(params["out"], _csv_text(manifest, GAMMA_COLUMNS, rows))
    _emit_gnuplot(params, args, {"gamma_hat": 2}, "Lyapunov exponent estimates")
    return 0


def _cmd_furstenberg(args) -> int:
    params = _resolve_params(args)
    params["out"] = getattr(args, "out", None)
    p, pot_hash = _load_required_potential(params)
    energies = _energies_from_params(params)
    results = []
    for E in energies:
        entry: dict = {"E": E}
        try:
            witness = noncompactness_witness(p, E, max_word_len=int(params["max_word_len"]))
            entry["noncompact"] = {
                "ok": True,
                "word_length": witness.length,
                "norm": witness.norm,
                "word": " ".join(witness.word),
            }
        except WitnessNotFound as exc:
            entry["noncompact"] = {
                "ok": False,
                "reason": exc.reason,
                "rotation_compact": exc.rotation_compact,
                "message": str(exc),
            }
        entry["strongly_irreducible"] = strong_irreducibility_check(
            p, E, n_test_dirs=int(params["n_dirs"]), orbit_depth=int(params["orbit_depth"])
        )
        if E < 0:
            entry["unstable_check"] = negative_energy_unstable_check(p, E)
        results.append(entry)
    payload = {"manifest": _manifest("furstenberg", params, pot_hash), "results": results}
    _write_text(params["out"], _json_text(payload))
    return 0


def _cmd_walk(args) -> int:
    params = _resolve_params(args)
    params["out"] = getattr(args, "out", None)
    params["skip_gamma"] = bool(getattr(args, "skip_gamma", False))
    spec = Type2Spec(n=int(params["n"]), m=int(params["m"]), p=float(params["p"]))
    result = sqrt_growth_experiment(
        spec,
        n_pairs=int(params["pairs"]),
        n_realizations=int(params["realizations"]),
        seed=int(params["seed"]),
        with_gamma=not params["skip_gamma"],
    )
    rows = []
    for i, N in enumerate(result.checkpoints):
        rows.append(
            (N, result.mean_abs_S[i], result.mean_abs_S_over_sqrtN[i],
             result.quantiles["q25"][i], result.quantiles["q50"][i],
             result.quantiles["q75"][i])
        )
    comments = [
        "fitted_exponent: " + _fmt(result.fitted_exponent),
        "sigma: " + _fmt(result.sigma),
        "clt_prediction_mean_abs_over_sqrtN: " + _fmt(result.clt_prediction),
        "final_mean_abs_over_sqrtN: " + _fmt(result.final_mean_abs_S_over_sqrtN),
        "drift_residual: " + _fmt(drift_check(spec)),
        "matrix_check_max_residual: " + _fmt(result.matrix_check_max_residual),
    ]
    if result.gamma is not None:
        comments.append("gamma_hat: " + _fmt(result.gamma.gamma_hat))
        comments.append("gamma_std_error: " + _fmt(result.gamma.std_error))
    manifest = _manifest("walk", params, None)
    text = _csv_text(
        manifest,
        ("N", "mean_abs_S", "mean_abs_S_over_sqrtN", "q25", "q50", "q75"),
        rows,
        trailing_comments=comments,
    )
    _write_text(params["out"], text)
    _emit_gnuplot(params, args, {"mean_abs_S_over_sqrtN": 3}, "sqrt growth law")
    return 0


def _cmd_examples(args) -> int:
    params = _resolve_params(args)
    params["out"] = getattr(args, "out", None)
    j_max = int(params["lambda_j"])
    E_max = float(params["E_max"])

    example1 = []
    for lam in (1.0, 2.0 * math.pi**2):
        types = example1_critical_types(lam, E_max)
        example1.append(
            {
                "lam": lam,
                "types": [
                    {"E": t.E, "type": t.type_label, "n": t.n, "m": t.m}
                    for t in types
                ],
            }
        )

    example2 = []
    for N in (3, 8, 24, 80):
        lam = 2.0 * math.pi**2 * N
        pairs = example2_reflectionless(lam)
        example2.append(
            {
                "N": N,
                "lam": lam,
                "pairs": [{"n": n, "m": m, "E": E} for n, m, E in pairs],
            }
        )

    nj_table = []
    for j in range(1, j_max + 1):
        lam_j, pairs = nj_construction(j)
        nj_table.append(
            {
                "j": j,
                "N_j": 2 ** (j + 1) * (2 ** (j - 1) + 1),
                "lambda_j": lam_j,
                "pairs": [{"n": n, "m": m} for n, m in pairs],
            }
        )

    payload = {
        "manifest": _manifest("examples", params, None),
        "example1_critical_types": example1,
        "example2_reflectionless": example2,
        "nj_table": nj_table,
    }
    _write_text(params["out"], _json_text(payload))
    return 0


_COMMANDS = {
    "scatter": _cmd_scatter,
    "critical": _cmd_critical,
    "gamma": _cmd_gamma,
    "furstenberg": _cmd_furstenberg,
    "walk": _cmd_walk,
    "examples": _cmd_examples,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            raise UsageError("a subcommand is required (see --help)")
        if getattr(args, "threads", None):
            kernels.set_threads(int(args.threads))
        return _COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PotentialError as exc:
        print(f"error: invalid potential: {exc}", file=sys.stderr)
        return 1
    except (ComputationError, ValueError) as exc:
        diagnostic = {
            "error": type(exc).__name__,
            "message": str(exc),
        }
        print(json.dumps(diagnostic, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

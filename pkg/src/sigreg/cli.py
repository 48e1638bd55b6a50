"""Command-line front end.

Subcommands: generate, sig, reconstruct, fit, predict, crossval, diffusion.
Global flags --seed/--out/--format apply everywhere; --config points at a
JSON file whose keys mirror the flag names (command-line values win). Exit
codes: 0 on success, 1 for usage problems, 2 when the numerics fail.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .baselines import (
    ar_fit,
    ar_predict_series,
    baseline_from_dict,
    baseline_to_dict,
    gp_fit,
    gp_predict,
    lag_design,
)
from .datagen import DEFAULT_SIGMA, generate
from .errors import NumericalError
from .experiments import (
    CrossValConfig,
    default_model_menu,
    run_crossval,
    run_diffusion_study,
)
from .model import ESModelSpec, fit as fit_es, predict_series, save_model
from .paths import read_series_csv, write_series_csv
from .recovery import reconstruct_time_series
from .report import (
    write_crossval_report,
    write_diffusion_report,
    write_fit_report,
)
from .signatures import embed_series, signature, signature_of_time_series
from .tensor import tensor_from_dict, tensor_to_dict
from .datagen import LabeledSeries


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; remap to the documented 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _float_list(text):
    return [float(x) for x in text.replace(",", " ").split()]


def _int_list(text):
    return [int(x) for x in text.replace(",", " ").split()]


def build_parser():
    parser = _Parser(prog="sigreg", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument(
        "--format", choices=("csv", "text"), default="csv",
        help="table format: csv only, or csv plus aligned text",
    )
    common.add_argument(
        "--config", default=None,
        help="JSON file of flag defaults (flag names as keys)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="simulate a series")
    g.add_argument(
        "--kind", default="ar",
        choices=("ar", "poly_ar", "mix_poly_ar", "arch"),
    )
    g.add_argument("--n", type=int, default=4000, help="series length")
    g.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    g.add_argument("--burn-in", type=int, default=200)
    g.add_argument("--phi", type=_float_list, default=None,
                   help="AR coefficients, intercept first")
    g.add_argument("--alpha", type=_float_list, default=None,
                   help="ARCH variance coefficients")
    g.add_argument("--beta", type=_float_list, default=None,
                   help="ARCH mean coefficients")

    s = sub.add_parser("sig", parents=[common], help="signature of a series")
    s.add_argument("--input", required=True, help="series CSV (t,r)")
    s.add_argument("--degree", type=int, default=4)
    s.add_argument(
        "--embedding", choices=("time-joined", "linear"), default="time-joined"
    )

    r = sub.add_parser(
        "reconstruct", parents=[common],
        help="series from a time-joined signature",
    )
    r.add_argument("--input", required=True, help="signature JSON")
    r.add_argument("--times", type=_float_list, required=True,
                   help="observation times, e.g. '1,2,3'")

    f = sub.add_parser("fit", parents=[common], help="fit a model to a series")
    f.add_argument("--input", required=True, help="series CSV (t,r)")
    f.add_argument("--model", choices=("es", "ar", "gp"), default="es")
    f.add_argument("--p", type=int, default=None,
                   help="window lags (es) or lag count (ar/gp)")
    f.add_argument("--q", type=int, default=1, help="future horizon (es)")
    f.add_argument("--n", type=int, default=3, help="feature degree (es)")
    f.add_argument("--m", type=int, default=1, help="target degree (es)")
    f.add_argument("--mode", choices=("reduced", "tensor"), default="reduced")
    f.add_argument("--ridge", type=float, default=0.0)
    f.add_argument("--rebase", choices=("shift", "absolute"), default="shift")

    pr = sub.add_parser("predict", parents=[common], help="one-step forecasts")
    pr.add_argument("--model-file", required=True, help="model JSON from fit")
    pr.add_argument("--input", required=True, help="series CSV (t,r)")

    cv = sub.add_parser(
        "crossval", parents=[common],
        help="repeated sub-sampling comparison (needs m_true column)",
    )
    cv.add_argument("--input", required=True, help="labeled series CSV")
    cv.add_argument("--folds", type=int, default=20)
    cv.add_argument("--holdout", type=float, default=0.2)
    cv.add_argument("--models", default="ar,gp,es",
                    help="comma list from: ar, gp, es, oracle, zero")
    cv.add_argument("--es-p", type=int, default=2)
    cv.add_argument("--es-n", type=int, default=3)
    cv.add_argument("--lags", type=int, default=3, help="ar/gp lag count")

    di = sub.add_parser(
        "diffusion", parents=[common],
        help="terminal-value regression vs signature degree",
    )
    di.add_argument("--samples", type=int, default=2000)
    di.add_argument("--horizon", type=float, default=0.25, help="terminal time")
    di.add_argument("--step", type=float, default=None)
    di.add_argument("--degrees", type=_int_list, default=[2, 4, 6])

    return parser


def _apply_config(parser, argv):
    """Fill parser defaults from --config JSON, then parse for real."""
    probe = _Parser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    args = parser.parse_args(argv)
    if known.config:
        try:
            with open(known.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read config {known.config}: {exc}") from exc
        if not isinstance(overrides, dict):
            raise ValueError("config file must hold a JSON object")
        # config supplies values only where the command line used the default
        explicit = _explicit_flags(argv)
        for key, value in overrides.items():
            dest = key.replace("-", "_")
            if hasattr(args, dest) and dest not in explicit:
                setattr(args, dest, value)
    return args


def _explicit_flags(argv):
    out = set()
    for tok in argv:
        if tok.startswith("--"):
            out.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    return out


def _outpath(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _load_series(path):
    ts, extras = read_series_csv(path)
    return ts, extras


def cmd_generate(args):
    kw = {}
    if args.phi is not None:
        kw["phi"] = args.phi
    if args.alpha is not None:
        kw["alpha"] = args.alpha
    if args.beta is not None:
        kw["beta"] = args.beta
    labeled = generate(
        args.kind, args.n, sigma=args.sigma, seed=args.seed,
        burn_in=args.burn_in, **kw,
    )
    path = _outpath(args, "series.csv")
    write_series_csv(
        labeled.ts, path, true_means=labeled.true_means,
        true_vars=labeled.true_vars,
    )
    print(path)
    return 0


def cmd_sig(args):
    ts, _ = _load_series(args.input)
    if args.degree < 0:
        raise ValueError("degree must be non-negative")
    if args.embedding == "time-joined":
        sig = signature_of_time_series(ts, args.degree)
    else:
        sig = signature(embed_series(ts, args.embedding), args.degree)
    path = _outpath(args, "signature.json")
    with open(path, "w") as fh:
        json.dump(tensor_to_dict(sig), fh, sort_keys=True)
        fh.write("\n")
    print(path)
    return 0


def cmd_reconstruct(args):
    with open(args.input) as fh:
        sig = tensor_from_dict(json.load(fh))
    ts = reconstruct_time_series(sig, args.times)
    path = _outpath(args, "reconstructed.csv")
    write_series_csv(ts, path)
    print(path)
    return 0


def cmd_fit(args):
    ts, _ = _load_series(args.input)
    fmt = args.format
    if args.model == "es":
        spec = ESModelSpec(
            p=args.p if args.p is not None else 2,
            n=args.n, q=args.q, m=args.m, mode=args.mode,
            ridge=args.ridge, rebase=args.rebase,
        )
        model = fit_es(ts, spec)
        path = _outpath(args, "model.json")
        save_model(model, path)
        stats = model.diagnostics
        rows = []
        r2 = np.atleast_1d(stats["r2"])
        adj = np.atleast_1d(stats["adjusted_r2"])
        rv = np.atleast_1d(stats["residual_variance"])
        labels = (
            ["r_next"]
            if spec.mode == "reduced"
            else ["".join(map(str, w)) or "()" for w in model.target_words]
        )
        for i, label in enumerate(labels):
            rows.append([label, float(r2[i]), float(adj[i]), float(rv[i])])
        ks, preds = predict_series(model, ts)
        usable = ks[ks + 1 < len(ts)]
        scatter = None
        if spec.mode == "reduced" and usable.size:
            scatter = (ts.r[usable + 1], preds[: usable.size])
        write_fit_report(rows, args.out, fmt=fmt, scatter=scatter)
    elif args.model == "ar":
        p = args.p if args.p is not None else 3
        model = ar_fit(ts.r, p)
        path = _outpath(args, "model.json")
        with open(path, "w") as fh:
            json.dump(baseline_to_dict(model), fh, sort_keys=True, indent=1)
            fh.write("\n")
        rows = [[
            "r_next",
            float(model.diagnostics["r2"]),
            float(model.diagnostics["adjusted_r2"]),
            float(model.sigma2),
        ]]
        ks, preds = ar_predict_series(model, ts.r)
        usable = ks[ks + 1 < len(ts)]
        write_fit_report(
            rows, args.out, fmt=fmt,
            scatter=(ts.r[usable + 1], preds[: usable.size]),
        )
    else:
        p = args.p if args.p is not None else 3
        L, y, ks = lag_design(ts.r, p)
        model = gp_fit(L, y, seed=args.seed)
        path = _outpath(args, "model.json")
        obj = baseline_to_dict(model)
        obj["p"] = p
        with open(path, "w") as fh:
            json.dump(obj, fh, sort_keys=True)
            fh.write("\n")
        mean, _ = gp_predict(model, L)
        ss_res = float(np.sum((y - mean) ** 2))
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        denom = len(y) - p - 1
        adj = 1.0 - (1.0 - r2) * (len(y) - 1) / denom if denom > 0 else r2
        rows = [["r_next", r2, min(adj, r2), ss_res / max(len(y) - p, 1)]]
        write_fit_report(rows, args.out, fmt=fmt, scatter=(y, mean))
    print(path)
    return 0


def cmd_predict(args):
    ts, _ = _load_series(args.input)
    with open(args.model_file) as fh:
        obj = json.load(fh)
    kind = obj.get("kind")
    if kind == "es":
        from .model import model_from_dict

        model = model_from_dict(obj)
        ks, preds = predict_series(model, ts)
        if model.spec.mode != "reduced":
            raise ValueError("predict CLI supports reduced-mode models only")
    elif kind == "ar":
        model = baseline_from_dict(obj)
        ks, preds = ar_predict_series(model, ts.r)
    elif kind == "gp":
        model = baseline_from_dict(obj)
        p = int(obj.get("p", model.x.shape[1]))
        L, _, ks = lag_design(ts.r, p)
        preds, _ = gp_predict(model, L)
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    path = _outpath(args, "predictions.csv")
    # row k forecasts the observation at index k+1 (time of that observation
    # when it exists; one step past the grid otherwise)
    dt = ts.t[-1] - ts.t[-2] if len(ts) > 1 else 1.0
    times = np.append(ts.t, ts.t[-1] + dt)[ks + 1]
    with open(path, "w", newline="") as fh:
        fh.write("t,pred\n")
        for t, pr in zip(times, np.asarray(preds, dtype=float)):
            fh.write(f"{float(t)!r},{float(pr)!r}\n")
    print(path)
    return 0


def cmd_crossval(args):
    ts, extras = _load_series(args.input)
    if "m_true" not in extras:
        raise ValueError("crossval needs the m_true column from generate")
    labeled = LabeledSeries(ts, extras["m_true"], extras.get("v_true"))
    menu = []
    for kind in [k.strip() for k in args.models.split(",") if k.strip()]:
        if kind == "es":
            menu.append({"kind": "es", "p": args.es_p, "n": args.es_n})
        elif kind in ("ar", "gp", "oracle", "zero"):
            entry = {"kind": kind, "p": args.lags}
            if kind == "gp":
                entry["gp_seed"] = args.seed
            menu.append(entry)
        else:
            raise ValueError(f"unknown model {kind!r}")
    report = run_crossval(
        labeled,
        menu,
        CrossValConfig(folds=args.folds, holdout=args.holdout, seed=args.seed),
    )
    write_crossval_report(report, args.out, fmt=args.format)
    print(os.path.join(args.out, "metrics.csv"))
    return 0


def cmd_diffusion(args):
    report = run_diffusion_study(
        samples=args.samples,
        T=args.horizon,
        step=args.step,
        degrees=args.degrees,
        seed=args.seed,
    )
    write_diffusion_report(report, args.out, fmt=args.format)
    print(os.path.join(args.out, "diffusion.csv"))
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "sig": cmd_sig,
    "reconstruct": cmd_reconstruct,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "crossval": cmd_crossval,
    "diffusion": cmd_diffusion,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: fit, score, eval, demo, sweep-l.

Configuration is a plain key=value file with flag overrides; all
effective values are echoed into report metadata. Exit codes: 0 ok,
2 config error, 3 data/format error, 4 numerical error.
"""

import argparse
import csv
import os
import sys

import numpy as np

from . import evaluation, gaussian, scoring, synthetic, whitenoise
from .errors import ArgumentError, ConfigError, FormatError, NumericalError, WntestError
from .tensor_io import RANGE_RESIDUAL, read_cifar10_bin, read_container

ALL_TESTS = ("wn", "lh", "lh2s", "lr")


def read_config(path):
    cfg = {}
    if path:
        try:
            with open(path) as f:
                for line in f:
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    k, sep, v = line.partition("=")
                    if not sep:
                        raise ConfigError(f"{path}: malformed line {line!r}")
                    cfg[k.strip()] = v.strip()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
    return cfg


def load_dataset(path):
    """Load a dataset: .oodt containers, else CIFAR-10 .bin (comma-separated)."""
    paths = [p for p in path.split(",") if p]
    for p in paths:
        if not os.path.exists(p):
            raise ConfigError(f"dataset path does not exist: {p}")
    if paths[0].endswith(".oodt"):
        if len(paths) != 1:
            raise ConfigError("container datasets take a single path")
        return read_container(paths[0])
    return read_cifar10_bin(paths)


def _effective(cfg, args, key, default=None):
    v = getattr(args, key.replace("-", "_"), None)
    if v is not None:
        return v
    return cfg.get(key, default)


def _lag_set(mode, max_lag, geometry, d):
    if mode == "vertical":
        return whitenoise.vertical_lags(geometry, max_lag)
    if mode == "all":
        return whitenoise.all_lags(max_lag, d)
    raise ConfigError(f"unknown lag mode {mode!r}")


def _settings(cfg):
    """Named outlier datasets: outlier.<name>=path lines."""
    return {k.split(".", 1)[1]: v for k, v in cfg.items() if k.startswith("outlier.")}


def cmd_fit(args):
    cfg = read_config(args.config)
    train_path = _effective(cfg, args, "train")
    out = cfg.get("model") or _effective(cfg, args, "out")
    if args.out:
        out = args.out
    if not train_path or not out:
        raise ConfigError("fit requires train= and a model/out destination")
    eps = float(_effective(cfg, args, "eps", gaussian.DEFAULT_EPS))
    data = load_dataset(train_path).to_unit()
    model = gaussian.fit_gaussian(data, eps=eps)
    gaussian.save_model(out, model)
    print(f"fitted d={model.d} model on {data.n} samples -> {out}")


def _dataset_scores(name, data, tests, model, lag_mode, max_lag, cfg):
    """Per-test score vectors for one dataset."""
    out = {}
    if "wn" in tests:
        if data.value_range == RANGE_RESIDUAL:
            seqs = data.values  # imported residual tensors: test directly
            geometry = data.geometry
        else:
            if model is None:
                raise ConfigError("wn on image data requires a fitted model")
            if model.d != data.geometry.d:
                raise ConfigError(
                    f"geometry mismatch: model d={model.d}, data d={data.geometry.d}"
                )
            seqs = gaussian.whiten_rows(model, data.to_unit().values)
            geometry = model.geometry or data.geometry
        lags = _lag_set(lag_mode, max_lag, geometry, seqs.shape[1])
        q = whitenoise.bp_statistic_rows(seqs, lags)
        # constant inputs are maximally non-image-like: force the
        # degenerate rule even though whitening de-constants them
        q[data.values.std(axis=1) == 0] = np.inf
        out["wn"] = q
    need_ll = [t for t in tests if t in ("lh", "lh2s", "lr")]
    if need_ll:
        ll_path = cfg.get(f"loglik.{name}")
        if ll_path:
            logliks = read_container(ll_path).values.reshape(-1)
        else:
            if model is None:
                raise ConfigError(f"likelihood tests require a model or loglik.{name}=")
            if model.d != data.geometry.d:
                raise ConfigError(
                    f"geometry mismatch: model d={model.d}, data d={data.geometry.d}"
                )
            logliks = gaussian.gaussian_loglik_rows(model, data.to_unit().values)
        if "lh" in tests:
            out["lh"] = scoring.batch_scores(data, "lh", logliks=logliks)
        if "lh2s" in tests:
            med = cfg.get("_inlier_median")
            if med is None:
                raise ConfigError("lh2s requires inlier training log-likelihoods")
            out["lh2s"] = scoring.batch_scores(
                data, "lh2s", logliks=logliks, inlier_median=float(med)
            )
        if "lr" in tests:
            out["lr"] = scoring.batch_scores(data, "lr", logliks=logliks)
    return out


def _write_scores(path, label, per_test):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sample_index", "label", "test", "score"])
        for test, scores in sorted(per_test.items()):
            for i, s in enumerate(scores):
                w.writerow([i, label, test, repr(float(s))])


def cmd_score(args):
    cfg = read_config(args.config)
    out_dir = _effective(cfg, args, "out")
    model_dir = _effective(cfg, args, "model")
    inlier_test = _effective(cfg, args, "inlier-test") or cfg.get("inlier_test")
    tests_str = _effective(cfg, args, "tests")
    if tests_str is None:
        tests_str = "wn,lh,lh2s"
    tests = [t for t in tests_str.split(",") if t]
    if not tests:
        raise ConfigError("empty test list")
    for t in tests:
        if t not in ALL_TESTS:
            raise ConfigError(f"unknown test {t!r}")
    if not out_dir or not inlier_test:
        raise ConfigError("score requires out= and inlier_test=")
    lag_mode = _effective(cfg, args, "lags", "vertical")
    max_lag = int(_effective(cfg, args, "L", whitenoise.DEFAULT_MAX_LAG))
    model = gaussian.load_model(model_dir) if model_dir else None
    os.makedirs(out_dir, exist_ok=True)

    datasets = [("inlier-test", "inlier-test", load_dataset(inlier_test))]
    train_path = cfg.get("inlier_train") or cfg.get("train")
    if train_path:
        datasets.insert(0, ("inlier-train", "inlier-train", load_dataset(train_path)))
    for name, path in sorted(_settings(cfg).items()):
        datasets.append((name, "outlier", load_dataset(path)))

    if any(t in ("lh", "lh2s", "lr") for t in tests) and "_inlier_median" not in cfg:
        # median of inlier training log-likelihoods for the two-sided test
        src = cfg.get("loglik.inlier-train")
        if src:
            cfg["_inlier_median"] = str(float(np.median(read_container(src).values)))
        elif model is not None and train_path:
            ll = gaussian.gaussian_loglik_rows(model, load_dataset(train_path).to_unit().values)
            cfg["_inlier_median"] = str(float(np.median(ll)))

    for name, label, data in datasets:
        per_test = _dataset_scores(name, data, tests, model, lag_mode, max_lag, cfg)
        _write_scores(os.path.join(out_dir, f"scores_{name}.csv"), label, per_test)
        print(f"scored {name}: {data.n} samples, tests {','.join(sorted(per_test))}")


def _read_scores(path):
    per_test = {}
    try:
        with open(path) as f:
            for row in csv.DictReader(f):
                per_test.setdefault(row["test"], []).append(float(row["score"]))
    except OSError as e:
        raise ConfigError(f"missing score file {path}: {e}") from e
    return {t: np.asarray(v) for t, v in per_test.items()}


def cmd_eval(args):
    cfg = read_config(args.config)
    out_dir = _effective(cfg, args, "out")
    if not out_dir:
        raise ConfigError("eval requires out=")
    seed = int(_effective(cfg, args, "seed", 0))
    trials = int(cfg.get("bootstrap_trials", 1000))
    inlier = _read_scores(os.path.join(out_dir, "scores_inlier-test.csv"))
    settings = sorted(_settings(cfg)) or sorted(
        f.removeprefix("scores_").removesuffix(".csv")
        for f in os.listdir(out_dir)
        if f.startswith("scores_") and "inlier" not in f
    )
    if not settings:
        raise ConfigError("no outlier score files found")
    cells = {}
    table = {}
    for s in settings:
        outl = _read_scores(os.path.join(out_dir, f"scores_{s}.csv"))
        table[s] = {}
        for test in sorted(set(outl) & set(inlier)):
            a = evaluation.auroc(outl[test], inlier[test])
            lo, hi = evaluation.auroc_ci(outl[test], inlier[test], trials=trials, seed=seed)
            cells[(s, test)] = {
                "auroc": a,
                "ci_low": lo,
                "ci_high": hi,
                "n_inlier": inlier[test].size,
                "n_outlier": outl[test].size,
            }
            table[s][test] = a
    ranks = evaluation.average_ranks(table)
    report = evaluation.EvalReport(cells, ranks, metadata={"seed": seed})
    evaluation.write_report_csv(os.path.join(out_dir, "report.csv"), report)
    with open(os.path.join(out_dir, "ranks.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["test", "average_rank"])
        for t, r in sorted(ranks.items()):
            w.writerow([t, f"{r:.4f}"])
    for (s, test), cell in sorted(cells.items()):
        print(
            f"{s:>20s} {test:>5s} auroc={cell['auroc']:.4f} "
            f"ci=({cell['ci_low']:.4f},{cell['ci_high']:.4f})"
        )
    for t, r in sorted(ranks.items()):
        print(f"avg rank {t}: {r:.2f}")


def cmd_demo(args):
    seed = args.seed if args.seed is not None else 0
    if args.name == "typicality":
        rep = synthetic.typicality_demo(args.d, args.n, seed)
    elif args.name == "null-calibration":
        rep = synthetic.null_calibration(args.d, args.k, args.n, seed)
    elif args.name == "circle":
        spec = synthetic.ProcessSpec("circle", args.d, seed=seed)
        X = synthetic.sample_process(spec, args.n).values
        lags = whitenoise.all_lags(args.k, args.d)
        stats = [whitenoise.bp_statistic(row, lags) for row in X]
        rep = {
            "d": args.d,
            "n": args.n,
            "max_typicality_dev": float(
                max(abs(synthetic.typicality_stat(row) - 1.0) for row in X)
            ),
            "max_p_value": float(max(s.p_value for s in stats)),
            "min_q_bp": float(min(s.q_bp for s in stats)),
        }
    else:
        raise ConfigError(f"unknown demo {args.name!r}")
    rows = sorted(rep.items())
    if args.out:
        with open(args.out, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["key", "value"])
            w.writerows(rows)
    for k, v in rows:
        print(f"{k}: {v}")


def cmd_sweep_l(args):
    cfg = read_config(args.config)
    out_dir = _effective(cfg, args, "out")
    model_dir = _effective(cfg, args, "model")
    inlier_test = cfg.get("inlier_test")
    if not out_dir or not inlier_test:
        raise ConfigError("sweep-l requires out= and inlier_test=")
    l_values = [int(v) for v in args.L_values.split(",") if v]
    if not l_values:
        raise ConfigError("empty L list")
    lag_mode = _effective(cfg, args, "lags", "vertical")
    model = gaussian.load_model(model_dir) if model_dir else None
    inlier = load_dataset(inlier_test)
    outliers = {s: load_dataset(p) for s, p in sorted(_settings(cfg).items())}
    if not outliers:
        raise ConfigError("sweep-l requires at least one outlier.<name>= dataset")

    def wn_scores(data, max_lag):
        return _dataset_scores("_", data, ["wn"], model, lag_mode, max_lag, cfg)["wn"]

    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep_l.csv")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["L", "setting", "auroc"])
        for L in l_values:
            inl = wn_scores(inlier, L)
            for s, data in outliers.items():
                a = evaluation.auroc(wn_scores(data, L), inl)
                w.writerow([L, s, f"{a:.6f}"])
                print(f"L={L} {s} auroc={a:.4f}")
    print(f"wrote {path}")


def build_parser():
    p = argparse.ArgumentParser(prog="wntest", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")

    sp = sub.add_parser("fit", help="fit the Gaussian model")
    common(sp)
    sp.add_argument("--train")
    sp.add_argument("--eps", type=float)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("score", help="score datasets under the configured tests")
    common(sp)
    sp.add_argument("--model")
    sp.add_argument("--inlier-test")
    sp.add_argument("--tests")
    sp.add_argument("--lags", choices=("vertical", "all"))
    sp.add_argument("--L", type=int)
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("eval", help="AUROC report from score files")
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("demo", help="synthetic validators")
    common(sp)
    sp.add_argument("name", choices=("typicality", "circle", "null-calibration"))
    sp.add_argument("--d", type=int, default=3072)
    sp.add_argument("--n", type=int, default=2000)
    sp.add_argument("--k", type=int, default=20)
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("sweep-l", help="AUROC as a function of the max lag L")
    common(sp)
    sp.add_argument("--model")
    sp.add_argument("--lags", choices=("vertical", "all"))
    sp.add_argument("L_values", help="comma-separated L values")
    sp.set_defaults(func=cmd_sweep_l)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, ArgumentError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (NumericalError, WntestError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: ``constants``, ``figures``, ``gamma``, ``bound``, ``simulate`` and
``ruin``. Everything except the two Taylor-constant commands reads an INI
config (see :mod:`trunctail.config`). CSV goes to ``--output`` (or stdout);
with ``--output`` a ``<output>.run.json`` record of the resolved config is
written next to it.

Exit codes: 0 success, 2 config error, 3 hypothesis or threshold violation,
4 numerical failure. Errors are reported as one JSON object on stderr.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

from . import bounds, lundberg, montecarlo, reinsure, taylor
from .config import RunConfig, parse_grid, run_record, write_run_record
from .errors import (CertificationError, ConfigError, HypothesisViolation, NumericalFailure,
                     ThresholdViolation, TruncTailError)

DIGITS = 15
EXIT_OK, EXIT_CONFIG, EXIT_CERT, EXIT_NUMERIC = 0, 2, 3, 4


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    v = float(v) + 0.0  # no negative zero in output
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{DIGITS}g}"


def log10_or_none(v):
    if v is None:
        return None
    return -math.inf if v == 0 else math.log10(v)


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r.get(h)) for h in header])
    return buf.getvalue()


# -- shared pieces -------------------------------------------------------------


def _theorem1(cfg, spec):
    if not cfg.has("theorem1"):
        return None
    beta = cfg.get_float("theorem1", "beta", required=True)
    mode = cfg.raw("theorem1", "taylor_bounds", "exact")
    if mode not in ("exact", "closed", "simple"):
        raise ConfigError(f"taylor_bounds must be exact, closed or simple, got {mode!r}")
    return bounds.theorem1_certificate(
        spec.moments(beta), mode,
        cfg.get_float("theorem1", "sharper_offset_xi"),
        cfg.get_float("theorem1", "sharper_threshold"))


def _theorem2(cfg, spec):
    if not cfg.has("theorem2"):
        return None
    eta = cfg.get_float("theorem2", "eta", required=True)
    kappa = cfg.get_float("theorem2", "kappa", required=True)
    return bounds.theorem2_certificate(spec, spec.moments(2.0), eta, kappa,
                                       cfg.get_float("theorem2", "y_kappa"))


def _bound_columns(spec, model, cert1, cert2, x, y):
    row = {"x": x, "y": y}
    cl = lundberg.cl_bound(model, max(x, 0.0)) if x >= 0 else 1.0
    row["cl_bound"] = cl
    row["log10_cl_bound"] = -model.gamma * max(x, 0.0) / math.log(10)
    certified = False
    if cert1 is not None:
        ok = cert1.certified(y)
        row["thm1_certified"] = ok
        row["thm1_bound_all_y"] = bounds.theorem1_bound_all_y(cert1, max(x, 0.0), y)
        if ok:
            lb = bounds.log_theorem1_bound(cert1, max(x, 0.0), y)
            row["thm1_bound"] = math.exp(lb)
            row["log10_thm1_bound"] = lb / math.log(10)
        certified |= ok
    if cert2 is not None:
        ok = cert2.certified(y)
        row["thm2_certified"] = ok
        if ok:
            lb = bounds.log_theorem2_bound(cert2, spec, max(x, 0.0), y)
            row["thm2_bound"] = math.exp(lb)
            row["log10_thm2_bound"] = lb / math.log(10)
        certified |= ok
    row["certified"] = certified
    return row


BOUND_HEADER = ["x", "y", "cl_bound", "log10_cl_bound", "thm1_bound", "log10_thm1_bound",
                "thm1_bound_all_y", "thm1_certified", "thm2_bound", "log10_thm2_bound",
                "thm2_certified", "certified"]
MC_COLUMNS = ["p_hat", "log10_p_hat", "std_err", "n_paths", "barrier_B", "trunc_eps", "seed"]


def _workers(args, cfg, section="mc"):
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        return args.workers
    return cfg.get_int(section, "workers", 1)


def _mc_rows(cfg, args, spec, cert1, cert2, xs, y):
    model = lundberg.TruncatedWalkModel(spec, y)
    rows = [_bound_columns(spec, model, cert1, cert2, x, y) for x in xs]
    n = cfg.get_int("mc", "n_paths", required=True)
    if not cfg.has("mc", "seed"):
        raise ConfigError("[mc] seed is mandatory for simulations")
    seed = cfg.get_int("mc", "seed")
    eps = cfg.get_float("mc", "eps")
    if eps is None:
        factor = cfg.get_float("mc", "eps_factor", 1e-4)
        smallest = min([r["cl_bound"] for r in rows] +
                       [r[k] for r in rows for k in ("thm1_bound", "thm2_bound") if k in r])
        eps = min(max(factor * smallest, 1e-300), montecarlo.DEFAULT_EPS)
    ests = montecarlo.estimate_sup_tail_grid(
        model, xs, n, eps, seed, _workers(args, cfg),
        cfg.get_int("mc", "step_cap", montecarlo.DEFAULT_STEP_CAP))
    for r, e in zip(rows, ests):
        r.update(p_hat=e.p_hat, log10_p_hat=log10_or_none(e.p_hat), std_err=e.std_err,
                 n_paths=e.n_paths, barrier_B=e.barrier_B,
                 trunc_eps=e.truncation_error_bound, seed=e.seed)
    return rows


# -- commands ------------------------------------------------------------------


def cmd_constants(args):
    grid = parse_grid(args.grid)
    if any(not 0 <= d <= 2 for d in grid):
        raise ConfigError("delta grid must lie in [0, 2]")
    header = ["delta", "ME", "UE", "simple_E", "s_star", "MG", "UG", "simple_G", "u_star",
              "newton_iterations"]
    rows = []
    for d in grid:
        tc = taylor.taylor_constants(d)
        rows.append({"delta": d, "ME": tc.ME, "UE": tc.UE, "simple_E": tc.simple_E,
                     "s_star": tc.s_star, "MG": tc.MG, "UG": tc.UG, "simple_G": tc.simple_G,
                     "u_star": tc.u_star, "newton_iterations": tc.newton_iterations})
    return header, rows, {"grid": args.grid}


def cmd_figures(args):
    grid = parse_grid(args.grid)
    if any(not 0 <= d <= 2 for d in grid):
        raise ConfigError("delta grid must lie in [0, 2]")
    rows_e, rows_g = taylor.figure_tables(grid)
    os.makedirs(args.outdir, exist_ok=True)
    for name, header, rows in (("figure1.csv", taylor.FIGURE1_HEADER, rows_e),
                               ("figure2.csv", taylor.FIGURE2_HEADER, rows_g)):
        with open(os.path.join(args.outdir, name), "w", encoding="utf-8", newline="") as fh:
            taylor.write_table(fh, header, rows)
    return None, None, {"grid": args.grid, "outdir": args.outdir}


def cmd_gamma(args, cfg):
    spec = cfg.distribution()
    cert1, cert2 = _theorem1(cfg, spec), _theorem2(cfg, spec)
    header = ["y", "gamma", "mgf_residual", "s1", "s2", "y_beta", "log_y_beta", "y_eta_star",
              "log_y_eta_star", "thm1_certified", "thm2_certified"]
    rows = []
    for y in cfg.get_grid("grid", "y"):
        model = lundberg.TruncatedWalkModel(spec, y)
        g = model.gamma
        row = {"y": y, "gamma": g, "mgf_residual": abs(model.mgf_minus_one(g))}
        if cert1 is not None:
            ok = cert1.certified(y)
            row.update(y_beta=cert1.y_beta, log_y_beta=cert1.log_y_beta, thm1_certified=ok)
            if ok:
                row["s1"] = cert1.rate(y)
        if cert2 is not None:
            ok = cert2.certified(y)
            row.update(y_eta_star=cert2.y_eta_star, log_y_eta_star=cert2.log_y_eta_star,
                       thm2_certified=ok)
            if ok:
                row["s2"] = cert2.rate(y)
        rows.append(row)
    return header, rows, _cert_record(cert1, cert2)


def _cert_record(cert1, cert2):
    out = {}
    if cert1 is not None:
        out["theorem1_certificate"] = cert1.to_dict()
    if cert2 is not None:
        out["theorem2_certificate"] = cert2.to_dict()
    return out


def cmd_bound(args, cfg):
    spec = cfg.distribution()
    cert1, cert2 = _theorem1(cfg, spec), _theorem2(cfg, spec)
    xs, ys = cfg.get_grid("grid", "x"), cfg.get_grid("grid", "y")
    if args.simulate:
        rows = [r for y in ys for r in _mc_rows(cfg, args, spec, cert1, cert2, xs, y)]
        return BOUND_HEADER + MC_COLUMNS, rows, _cert_record(cert1, cert2)
    rows = []
    for y in ys:
        model = lundberg.TruncatedWalkModel(spec, y)
        rows += [_bound_columns(spec, model, cert1, cert2, x, y) for x in xs]
    return BOUND_HEADER, rows, _cert_record(cert1, cert2)


def cmd_simulate(args, cfg):
    spec = cfg.distribution()
    cert1, cert2 = _theorem1(cfg, spec), _theorem2(cfg, spec)
    xs, ys = cfg.get_grid("grid", "x"), cfg.get_grid("grid", "y")
    rows = [r for y in ys for r in _mc_rows(cfg, args, spec, cert1, cert2, xs, y)]
    return ["x", "y"] + MC_COLUMNS + BOUND_HEADER[2:], rows, _cert_record(cert1, cert2)


RUIN_HEADER = list(reinsure.CSV_HEADER) + [
    "log10_p_hat", "p_aT", "p_aT_std_err", "correction", "bound_term", "log10_bound_rhs",
    "certified", "slope", "C", "C_std_err", "n_paths", "seed"]


def cmd_ruin(args, cfg):
    sec = "reinsure"
    if not cfg.has(sec):
        raise ConfigError("missing [reinsure] section")
    if not cfg.has(sec, "seed"):
        raise ConfigError("[reinsure] seed is mandatory for simulations")
    seed = cfg.get_int(sec, "seed")
    alpha = cfg.get_float(sec, "alpha", required=True)
    xs = cfg.get_grid(sec, "x")
    n = cfg.get_int(sec, "n_paths", required=True)
    eps = cfg.get_float(sec, "eps")
    workers = _workers(args, cfg, sec)
    rows = []
    for ia, a in enumerate(cfg.get_grid(sec, "a")):
        model = reinsure.ruin_model(alpha, a, cfg.get_float(sec, "scale", 0.5),
                                    cfg.get_float(sec, "T"), cfg.get_float(sec, "premium_rate", 1.0),
                                    cfg.get_float(sec, "beta"))
        slope = c_val = c_se = None
        if cfg.get_bool(sec, "slope"):
            raw = cfg.raw(sec, "slope_n_paths")
            counts = [int(v) for v in parse_grid(raw)] if raw else n
            slope = reinsure.asymptotic_slope_check(model, xs, counts, seed, workers)
        c_samples = cfg.get_int(sec, "c_samples")
        if c_samples:
            c = reinsure.estimate_constant_C(model, None, c_samples, seed)
            c_val, c_se = c.value, c.std_err
        for ix, x in enumerate(xs):
            # per-(a, x) seeds keep every row an independent, reproducible ensemble
            s = seed + 7919 * (ia * len(xs) + ix + 1)
            est = reinsure.ruin_prob_mc(model, x, n, eps, s, workers)
            row = {"x": x, "a": a, "T": model.T, "p_hat": est.p_hat, "std_err": est.std_err,
                   "slope_target": model.slope_target(), "log10_p_hat": log10_or_none(est.p_hat),
                   "slope": slope, "C": c_val, "C_std_err": c_se, "n_paths": n, "seed": s}
            try:
                ub = reinsure.upper_bound_decomposition(model, x, None, n, s + 1, workers)
            except ThresholdViolation:
                row["certified"] = False
            else:
                row.update(p_aT=ub.p_aT, p_aT_std_err=ub.p_aT_estimate.std_err,
                           correction=ub.correction, bound_term=ub.bound_term,
                           bound_rhs=ub.rhs, log10_bound_rhs=log10_or_none(ub.rhs),
                           certified=True)
            rows.append(row)
    return RUIN_HEADER, rows, {}


# -- driver --------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="trunctail", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="INI run configuration")
        sp.add_argument("--output", "-o", help="CSV output path (default: stdout)")
        sp.add_argument("--workers", type=int, default=None,
                        help="parallel workers; results do not depend on it")

    sp = sub.add_parser("constants", help="Taylor-remainder constants on a delta grid")
    sp.add_argument("--grid", default="lin:0:2:201", help="delta grid")
    common(sp, config=False)
    sp = sub.add_parser("figures", help="write figure1.csv and figure2.csv")
    sp.add_argument("--grid", default="lin:0:2:201")
    sp.add_argument("--outdir", default=".")
    sp = sub.add_parser("gamma", help="Cramér–Lundberg rate and certified rates on a y grid")
    common(sp)
    sp = sub.add_parser("bound", help="bounds on P(M(y) > x) over (x, y) grids")
    sp.add_argument("--simulate", action="store_true", help="add Monte Carlo columns")
    common(sp)
    sp = sub.add_parser("simulate", help="Monte Carlo estimates with bound columns")
    common(sp)
    sp = sub.add_parser("ruin", help="re-insurance ruin estimates and bounds")
    common(sp)
    return p


COMMANDS = {"gamma": cmd_gamma, "bound": cmd_bound, "simulate": cmd_simulate, "ruin": cmd_ruin}


def _error(exc, code):
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, HypothesisViolation):
        doc["clause"] = exc.clause
    sys.stderr.write(json.dumps(doc) + "\n")
    return code


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = None
        if args.command == "constants":
            header, rows, extra = cmd_constants(args)
        elif args.command == "figures":
            cmd_figures(args)
            return EXIT_OK
        else:
            cfg = RunConfig.from_file(args.config)
            header, rows, extra = COMMANDS[args.command](args, cfg)
        text = render_csv(header, rows)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            if cfg is not None:
                write_run_record(args.output + ".run.json",
                                 run_record(args.command, cfg, extra))
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except ConfigError as exc:
        return _error(exc, EXIT_CONFIG)
    except CertificationError as exc:
        return _error(exc, EXIT_CERT)
    except NumericalFailure as exc:
        return _error(exc, EXIT_NUMERIC)
    except TruncTailError as exc:
        return _error(exc, EXIT_CONFIG)
    except ValueError as exc:
        return _error(exc, EXIT_CONFIG)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

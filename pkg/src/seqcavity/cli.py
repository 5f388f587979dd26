"""Command-line front end: certified bound tables in text, CSV or JSON."""

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import bounds, cavity, lattice, oracle
from .interval import ConsistencyError

CSV_COLUMNS = ["model", "d", "lambda", "pattern", "t", "lower", "upper",
               "exp_lower", "exp_upper", "regime"]

_MODEL_BY_NAME = {"hardcore": cavity.HARDCORE, "dimer": cavity.MONOMER_DIMER}


def _parse_lambdas(text):
    try:
        vals = [float(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise ValueError("bad --lambda list %r" % text)
    if not vals:
        raise ValueError("--lambda list is empty")
    return vals


def _resolve_depth(args, model_kind, d, lam):
    if args.depth != "auto":
        try:
            t = int(args.depth)
        except ValueError:
            raise ValueError("--depth must be an integer or 'auto'")
        if t < 1:
            raise ValueError("--depth must be >= 1")
        return t
    advice = bounds.depth_for_accuracy(model_kind, d, lam, args.eps)
    if advice.refused:
        raise bounds.Refusal(advice.reason)
    return advice.t


def _fe_record(payload):
    (model_kind, model_name, d, lam, t, pattern, memoize, ulps) = payload
    t0 = time.perf_counter()
    iv = bounds.free_energy(model_kind, d, lam, t, pattern,
                            ulps_per_op=ulps, memoize=memoize)
    ex = bounds.exp_interval(iv)
    return {
        "model": model_name, "d": d, "lambda": lam, "pattern": pattern,
        "t": t, "lower": iv.lower, "upper": iv.upper,
        "exp_lower": ex.lower, "exp_upper": ex.upper,
        "regime": iv.meta["regime"],
        "slack_ulps": iv.meta["slack_ulps"],
        "memoized": iv.meta["memoized"],
        "runtime_ms": (time.perf_counter() - t0) * 1e3,
    }


def _run_parallel(payloads, workers):
    if workers <= 1 or len(payloads) <= 1:
        return [_fe_record(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_fe_record, payloads))


def _emit_records(records, args, out):
    fmt = args.format
    if fmt == "json":
        out.write(json.dumps(records, sort_keys=True, indent=2) + "\n")
        return
    if fmt == "csv":
        out.write(",".join(CSV_COLUMNS) + "\n")
        for r in records:
            out.write(",".join(_csv_cell(r[c]) for c in CSV_COLUMNS) + "\n")
        return
    # text: one table row per lambda, 4 decimals like the published tables
    lo_key, hi_key = ("exp_lower", "exp_upper") if args.exp \
        else ("lower", "upper")
    out.write("%-10s %-4s %-6s %-10s %-10s %s\n"
              % ("lambda", "d", "t", "lower", "upper", "regime"))
    for r in records:
        out.write("%-10.4f %-4d %-6d %-10.4f %-10.4f %s\n"
                  % (r["lambda"], r["d"], r["t"], r[lo_key], r[hi_key],
                     r["regime"]))


def _csv_cell(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cmd_free_energy(args, out):
    model_kind = _MODEL_BY_NAME[args.model]
    lams = _parse_lambdas(args.lam)
    payloads = []
    for lam in lams:
        t = _resolve_depth(args, model_kind, args.dim, lam)
        payloads.append((model_kind, args.model, args.dim, lam, t,
                         args.pattern, not args.no_memo, args.slack_ulps))
    if args.seedless_check:
        _seedless_report(model_kind, args, lams, out)
    records = _run_parallel(payloads, args.workers)
    _emit_records(records, args, out)
    return 0


def _seedless_report(model_kind, args, lams, out):
    """Print raw phi/psi values at both parities for each lambda."""
    for lam in lams:
        t = _resolve_depth(args, model_kind, args.dim, lam)
        model = cavity.ModelSpec(model_kind, lam, args.dim)
        region = lattice.prec_origin_even(t) if args.pattern == "chess" \
            else lattice.prec_origin(t)
        state = cavity.CavityState(region, frozenset(), model)
        origin = tuple(0 for _ in range(args.dim))
        for depth in (t, t - 1):
            phi, psi = cavity.cavity_pair(state, origin, depth,
                                          memoize=not args.no_memo)
            out.write("# seedless lambda=%g t=%d phi=%.17g psi=%.17g\n"
                      % (lam, depth, phi, psi))


def cmd_surface_pressure(args, out):
    model_kind = _MODEL_BY_NAME[args.model]
    lams = _parse_lambdas(args.lam)
    shape = tuple(float(x) for x in args.shape.split(",")) if args.shape \
        else tuple(1.0 for _ in range(args.dim))
    records = []
    for lam in lams:
        t = _resolve_depth(args, model_kind, args.dim, lam)
        if args.kmax == "auto":
            k_max = _auto_kmax(model_kind, args.dim, lam, args.eps)
        else:
            k_max = int(args.kmax)
        t0 = time.perf_counter()
        iv = bounds.surface_pressure(
            model_kind, args.dim, lam, shape, t, k_max,
            allow_uncertified=args.allow_uncertified,
            memoize=not args.no_memo, ulps_per_op=args.slack_ulps)
        records.append({
            "model": args.model, "d": args.dim, "lambda": lam,
            "t": t, "k_max": k_max, "shape": list(shape),
            "lower": iv.lower, "upper": iv.upper,
            "regime": iv.meta["regime"], "tail_bound": iv.meta["tail_bound"],
            "terms": iv.meta["terms"],
            "runtime_ms": (time.perf_counter() - t0) * 1e3,
        })
    if args.format == "json":
        out.write(json.dumps(records, sort_keys=True, indent=2) + "\n")
    else:
        for r in records:
            out.write("lambda=%g d=%d t=%d k_max=%d  sP in [%.8f, %.8f]  (%s)\n"
                      % (r["lambda"], r["d"], r["t"], r["k_max"],
                         r["lower"], r["upper"], r["regime"]))
            for term in r["terms"]:
                out.write("  j=%d k=%d  term in [%.3e, %.3e]\n"
                          % (term["j"], term["k"], term["lower"],
                             term["upper"]))
            out.write("  tail bound %.3e\n" % r["tail_bound"])
    return 0


def _auto_kmax(model_kind, d, lam, eps):
    cert = bounds.decay_certificate(model_kind, d, lam)
    if cert.regime != bounds.PROVEN:
        raise bounds.Refusal(
            "k_max=auto needs a proven decay certificate; pass --kmax N")
    if cert.rho == 0.0:
        return 1
    k = 1
    while 2.0 * cert.prefactor * cert.rho ** (k + 1) / (1.0 - cert.rho) > eps:
        k += 1
        if k > 10000:
            break
    return k


def cmd_oracle(args, out):
    model_kind = _MODEL_BY_NAME[args.model]
    lam = _parse_lambdas(args.lam)[0]
    model = cavity.ModelSpec(model_kind, lam, args.dim)
    if args.what == "tm":
        res = oracle.transfer_matrix_free_energy(
            model_kind, lam, args.strip_width, args.dim)
        rec = {"what": "tm", "value": res.value, "method": res.method,
               "surface_offset": res.surface_offset}
    else:
        widths = tuple(int(x) for x in args.box.split(","))
        box = oracle.FiniteBox(widths)
        if args.what == "partition":
            res = oracle.exact_partition_function(box, model)
            rec = {"what": "partition", "value": str(res.value),
                   "method": res.method}
        else:
            v = tuple(int(x) for x in args.vertex.split(","))
            res = oracle.exact_marginal(box, v, model)
            rec = {"what": "marginal", "value": str(res.value),
                   "float": float(res.value), "method": res.method}
    if args.format == "json":
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        out.write("%s\n" % rec)
    return 0


def _add_common(p):
    p.add_argument("--model", choices=sorted(_MODEL_BY_NAME), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--lambda", dest="lam", default="1",
                   help="activity value or comma-separated sweep list")
    p.add_argument("--depth", default="auto",
                   help="recursion depth, integer or 'auto' (needs --eps)")
    p.add_argument("--eps", type=float, default=1e-4,
                   help="target accuracy for auto depth / auto k_max")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("CAVITY_WORKERS", "1")))
    p.add_argument("--no-memo", action="store_true")
    p.add_argument("--slack-ulps", type=int, default=2,
                   help="rounding allowance per arithmetic step")
    p.add_argument("--config", default=None,
                   help="key=value file with defaults; flags win")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="seqcavity",
        description="Certified free-energy and surface-pressure bounds for "
                    "hard-core and monomer-dimer models on Z^d.")
    sub = parser.add_subparsers(dest="command", required=True)

    fe = sub.add_parser("free-energy", help="bracket the pressure P(d,lambda)")
    _add_common(fe)
    fe.add_argument("--pattern", choices=["plain", "chess"], default="chess")
    fe.add_argument("--exp", action="store_true",
                    help="report exp(P) in text output")
    fe.add_argument("--seedless-check", action="store_true",
                    help="also print both parities' raw phi/psi values")

    sp = sub.add_parser("surface-pressure",
                        help="bracket the surface pressure sP(d,lambda,a)")
    _add_common(sp)
    sp.add_argument("--shape", default=None,
                    help="comma-separated box aspect ratios a_1,...,a_d")
    sp.add_argument("--kmax", default="auto")
    sp.add_argument("--allow-uncertified", action="store_true")

    orc = sub.add_parser("oracle", help="exact small-instance spot checks")
    _add_common(orc)
    orc.add_argument("--what", choices=["partition", "marginal", "tm"],
                     required=True)
    orc.add_argument("--box", default="1,1",
                     help="half-widths of the finite box")
    orc.add_argument("--vertex", default=None,
                     help="target vertex for marginal queries")
    orc.add_argument("--strip-width", type=int, default=1)
    return parser


def _apply_config(parser, argv):
    """Load key=value defaults from --config, then reparse so flags win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    overrides = {}
    with open(known.config) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            overrides[key.strip().replace("-", "_")] = value.strip()
    if "lambda" in overrides:
        overrides["lam"] = overrides.pop("lambda")
    for action in parser._subparsers._group_actions[0].choices.values():
        usable = {k: v for k, v in overrides.items()
                  if any(a.dest == k for a in action._actions)}
        for k, v in list(usable.items()):
            act = next(a for a in action._actions if a.dest == k)
            if act.type is int:
                usable[k] = int(v)
            elif act.type is float:
                usable[k] = float(v)
            elif isinstance(act, argparse._StoreTrueAction):
                usable[k] = v.lower() in ("1", "true", "yes")
        action.set_defaults(**usable)
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    out = sys.stdout
    try:
        if args.command == "free-energy":
            return cmd_free_energy(args, out)
        if args.command == "surface-pressure":
            return cmd_surface_pressure(args, out)
        if args.command == "oracle":
            return cmd_oracle(args, out)
        return 2
    except bounds.Refusal as exc:
        sys.stderr.write("refused: %s\n" % exc)
        return 3
    except ConsistencyError as exc:
        sys.stderr.write("internal consistency fault: %s\n" % exc)
        return 4
    except (ValueError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())

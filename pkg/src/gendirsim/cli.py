"""Command-line front end, a thin client of the service layer.

Every subcommand builds a request model and sends it through
ServiceClient, which executes in-process unless ``--server URL`` points
at a running instance.  Exit codes: 0 success, 1 validation error,
2 comparison failure, 3 I/O error.
"""

import argparse
import os
import sys
from fractions import Fraction

import yaml

from .output import dump_json, write_text
from .runconfig import ConfigError
from .service import ServiceClient, ServiceError
from .service import schemas

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPARISON = 2
EXIT_IO = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_VALIDATION):
        self.code = code
        super().__init__(message)


def _parse_scalar_token(text, name):
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"{name}: not a number or p/q rational: {text!r}") from exc


def _parse_vector_token(text, name):
    return [_parse_scalar_token(part, name) for part in text.split(",") if part != ""]


def _parse_assignments(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise CliError(f"expected key=value, got {tok!r}")
        key, _, val = tok.partition("=")
        out[key.strip()] = val.strip()
    return out


def _format_vec(values):
    return "[" + ", ".join(f"{v:.10g}" for v in values) + "]"


def _format_matrix(rows):
    return "[" + "; ".join(", ".join(f"{v:.10g}" for v in row) for row in rows) + "]"


def _print_moments(resp):
    print(f"mean: {_format_vec(resp.mean)}")
    print(f"var:  {_format_vec(resp.var)}")
    if resp.cov is not None and len(resp.mean) > 1:
        print(f"cov:  {_format_matrix(resp.cov)}")
    if resp.gamma is not None:
        print(f"gamma: {_format_vec(resp.gamma)}")


def _write_run_outputs(resp, out_dir, csv_name, summary_name):
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, csv_name)
    summary_path = os.path.join(out_dir, summary_name)
    try:
        write_text(csv_path, resp.timeseries_csv)
        dump_json(resp.summary, summary_path)
    except OSError as exc:
        raise CliError(f"cannot write outputs: {exc}", EXIT_IO) from exc
    return csv_path, summary_path


def _finish_run(resp, csv_path, summary_path):
    diag = resp.summary.get("diagnostics", {})
    print(f"timeseries: {csv_path}")
    print(f"summary:    {summary_path}")
    if "clamped_fraction" in diag:
        print(f"clamped fraction: {diag['clamped_fraction']:.3e}")
    if resp.comparison_passed is None:
        return EXIT_OK
    comparison = resp.summary.get("comparison", {})
    worst = max(
        (e["rel_dev"] for e in comparison.get("entries", [])), default=float("nan")
    )
    if resp.comparison_passed:
        print(f"comparison: PASS (worst relative deviation {worst:.3%})")
        return EXIT_OK
    print(f"comparison: FAIL (worst relative deviation {worst:.3%})")
    for entry in comparison.get("entries", []):
        if not entry["passed"]:
            print(
                f"  {entry['name']}: analytic {entry['analytic']:.6g}, "
                f"empirical {entry['empirical']:.6g}, "
                f"rel dev {entry['rel_dev']:.3%}"
            )
    return EXIT_COMPARISON


def cmd_simulate(args, client):
    try:
        with open(args.config) as fh:
            doc = yaml.safe_load(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_IO) from exc
    except yaml.YAMLError as exc:
        raise CliError(f"YAML parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError("config must be a YAML mapping")
    out_block = doc.pop("output", {}) or {}
    doc["threads"] = args.threads
    try:
        request = schemas.SimulateRequest.model_validate(doc)
        request.to_runconfig()  # surface config errors with field paths early
    except ConfigError as exc:
        raise CliError(str(exc)) from exc
    except Exception as exc:
        raise CliError(f"invalid config: {exc}") from exc
    resp = client.simulate(request)
    csv_path, summary_path = _write_run_outputs(
        resp,
        args.out,
        str(out_block.get("timeseries", "timeseries.csv")),
        str(out_block.get("summary", "summary.json")),
    )
    return _finish_run(resp, csv_path, summary_path)


def cmd_reproduce(args, client):
    request = client.preset(args.case)
    updates = {"threads": args.threads}
    integ = request.integrator
    if args.seed is not None or args.particles is not None:
        integ = integ.model_copy(
            update={
                k: v
                for k, v in (
                    ("seed", args.seed),
                    ("particles", args.particles),
                )
                if v is not None
            }
        )
        updates["integrator"] = integ
    request = request.model_copy(update=updates)
    resp = client.simulate(request)
    csv_path, summary_path = _write_run_outputs(
        resp,
        args.out,
        f"appendix_b_case{args.case}_timeseries.csv",
        f"appendix_b_case{args.case}_summary.json",
    )
    dist = resp.summary.get("distribution", {})
    print(
        f"case {args.case}: alpha={_format_vec(dist.get('alpha', []))} "
        f"beta={_format_vec(dist.get('beta', []))}"
    )
    return _finish_run(resp, csv_path, summary_path)


def _moments_request(args):
    if args.omega is not None:
        return schemas.MomentsRequest(
            kind="dirichlet", omega=_parse_vector_token(args.omega, "omega")
        )
    if args.alpha is None or args.beta is None:
        raise CliError("need either --omega or both --alpha and --beta")
    return schemas.MomentsRequest(
        kind="gendir",
        alpha=_parse_vector_token(args.alpha, "alpha"),
        beta=_parse_vector_token(args.beta, "beta"),
    )


def cmd_moments(args, client):
    resp = client.moments(_moments_request(args))
    _print_moments(resp)
    return EXIT_OK


def cmd_density(args, client):
    points = [_parse_vector_token(p, "point") for p in args.point]
    if args.omega is not None:
        req = schemas.DensityRequest(
            kind="dirichlet",
            omega=_parse_vector_token(args.omega, "omega"),
            points=points,
        )
    else:
        if args.alpha is None or args.beta is None:
            raise CliError("need either --omega or both --alpha and --beta")
        req = schemas.DensityRequest(
            kind="gendir",
            alpha=_parse_vector_token(args.alpha, "alpha"),
            beta=_parse_vector_token(args.beta, "beta"),
            points=points,
        )
    resp = client.density(req)
    for pt, logd, dens in zip(resp.points, resp.log_density, resp.density):
        print(f"y={_format_vec(pt)}  log_density={logd:.12g}  density={dens:.12g}")
    return EXIT_OK


def _c_matrix_from_entries(entries, K):
    if K == 1:
        if entries:
            raise CliError("K = 1 has no c entries")
        return None
    c = [[0.0] * (K - 1) for _ in range(K - 1)]
    for (i, j), val in entries.items():
        if not 1 <= i <= j <= K - 1:
            raise CliError(f"c{i}{j}: indices must satisfy 1 <= i <= j <= K-1")
        c[i - 1][j - 1] = val
    return c


def cmd_map(args, client):
    assigns = _parse_assignments(args.values)
    if args.from_sde:
        vectors = {}
        c_entries = {}
        for key, text in assigns.items():
            if key in ("b", "S", "kappa"):
                vectors[key] = _parse_vector_token(text, key)
            elif key.startswith("c") and len(key) == 3 and key[1:].isdigit():
                c_entries[(int(key[1]), int(key[2]))] = _parse_scalar_token(text, key)
            else:
                raise CliError(f"unknown coefficient field {key!r}")
        for need in ("b", "S", "kappa"):
            if need not in vectors:
                raise CliError(f"missing {need}=...")
        K = len(vectors["b"])
        req = schemas.MapRequest(
            direction="sde-to-distribution",
            b=vectors["b"],
            S=vectors["S"],
            kappa=vectors["kappa"],
            c=_c_matrix_from_entries(c_entries, K),
        )
        resp = client.map(req)
        print(f"alpha: {_format_vec(resp.alpha)}")
        print(f"beta:  {_format_vec(resp.beta)}")
        print(f"gamma: {_format_vec(resp.gamma)}")
        return EXIT_OK
    vectors = {}
    for key, text in assigns.items():
        if key in ("alpha", "beta", "kappa"):
            vectors[key] = _parse_vector_token(text, key)
        else:
            raise CliError(f"unknown distribution field {key!r}")
    for need in ("alpha", "beta"):
        if need not in vectors:
            raise CliError(f"missing {need}=...")
    # kappa is the free scale of the inverse map; the CLI defaults it to ones
    kappa = vectors.get("kappa", [1.0] * len(vectors["alpha"]))
    req = schemas.MapRequest(
        direction="distribution-to-sde",
        alpha=vectors["alpha"],
        beta=vectors["beta"],
        kappa=kappa,
    )
    resp = client.map(req)
    print(f"b:     {_format_vec(resp.b)}")
    print(f"S:     {_format_vec(resp.S)}")
    print(f"kappa: {_format_vec(resp.kappa)}")
    if resp.c:
        print(f"c:     {_format_matrix(resp.c)}")
    return EXIT_OK


def cmd_verify_potential(args, client):
    req = schemas.VerifyPotentialRequest(
        K=args.K, points=args.points, sets=args.sets, seed=args.seed
    )
    resp = client.verify_potential(req)
    print(
        f"max |residual| over {resp.points_per_set} points x "
        f"{len(resp.sets)} sets (K={resp.K}): {resp.max_residual:.3e}"
    )
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gendirsim",
        description="Generalized Dirichlet diffusion simulator and verifier.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured ensemble simulation")
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "reproduce-appendix-b", help="run one shipped benchmark case"
    )
    p.add_argument("--case", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--particles", type=int, default=None)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("moments", help="print analytic moments")
    p.add_argument("--alpha", help="comma-separated, rationals allowed")
    p.add_argument("--beta")
    p.add_argument("--omega")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("density", help="evaluate the target log density")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--omega")
    p.add_argument(
        "--point", action="append", required=True, help="comma-separated coordinates"
    )
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("map", help="convert between coefficient and parameter forms")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--from-sde", action="store_true")
    group.add_argument("--from-dist", action="store_true")
    p.add_argument("values", nargs="*", help="key=value assignments")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("verify-potential", help="max stationarity residual")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--sets", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_verify_potential)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    client = ServiceClient(args.server)
    try:
        return args.func(args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ServiceError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

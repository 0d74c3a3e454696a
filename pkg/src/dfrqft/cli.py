"""Command-line entry point: ``dfrqft <verb> [options]``.

Exit codes: 0 success, 1 tolerance breach, 2 parse error, 3 guard.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import check_stur, optimal_state, state_moments
from .gamma_transform import SliceSpec, commutative_limit_table, gamma_slice, limit_exponent
from .kernel import MomentumConfig, beta_pair, lambda_closed, lambda_quadrature, lambda_split, sphere_quadrature
from .microlocal import classify_direction, ray_decay
from .perturbation import GuardError, canonicalize, feynman_terms, r_product, render, summary

SCHEMA = 1
EXIT_OK, EXIT_TOLERANCE, EXIT_PARSE, EXIT_GUARD = 0, 1, 2, 3


class ParseError(ValueError):
    pass


class Guard(ValueError):
    pass


@dataclass
class RunConfig:
    lambda_p: float = 1.0
    quadrature_order: int = 64
    output_format: str = "json"
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=lambda: {"kernel": 1e-8})


def parse_momenta(text: str, source: str = "<input>") -> list[MomentumConfig]:
    """One configuration per line: 4n whitespace-separated numbers; ``#`` starts a comment."""
    configs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
        if len(values) % 4:
            raise ParseError(f"{source}:{lineno}: expected a multiple of 4 numbers, got {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise ParseError(f"{source}:{lineno}: non-finite value")
        configs.append(MomentumConfig(np.reshape(values, (-1, 4))))
    return configs


def _read_configs(path: str) -> list[MomentumConfig]:
    if path == "-":
        return parse_momenta(sys.stdin.read(), "<stdin>")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return parse_momenta(text, path)


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, (np.floating,)):
        return _clean(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _csv_cell(x) -> str:
    if x is None:
        return "NA"
    if isinstance(x, float):
        return "NA" if not math.isfinite(x) else repr(x)
    if isinstance(x, (list, tuple)):
        return " ".join(_csv_cell(v) for v in x)
    return str(x)


def emit(command: str, config: RunConfig, rows: list[dict], summary_: dict, out) -> None:
    if config.output_format == "json":
        payload = {"schema": SCHEMA, "command": command, "config": asdict(config), "rows": rows, "summary": summary_}
        out.write(json.dumps(_clean(payload), sort_keys=True, indent=1, allow_nan=False) + "\n")
        return
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row[h]) for h in header])
    out.write(buf.getvalue())


def _class_name(cfg: MomentumConfig, tol: float) -> str | None:
    if cfg.n < 2 or cfg.is_zero():
        return None
    return classify_direction(cfg, tol).kind.value


def cmd_kernel(args, config: RunConfig):
    quad = sphere_quadrature(config.quadrature_order)
    tol = config.tolerances["kernel"]
    rows = []
    breaches = 0
    for i, cfg in enumerate(_read_configs(args.input)):
        b = beta_pair(cfg, config.lambda_p)
        closed = lambda_closed(cfg, config.lambda_p)
        q = lambda_quadrature(cfg, config.lambda_p, quad)
        split = lambda_split(cfg, config.lambda_p)
        dev = abs(closed - q)
        ok = dev <= tol
        breaches += not ok
        rows.append(
            {
                "index": i,
                "n": cfg.n,
                "beta_plus": b.beta_plus,
                "beta_minus": b.beta_minus,
                "lambda_closed": closed,
                "lambda_quadrature": q.real,
                "lambda_quadrature_imag": q.imag,
                "delta_part": split.delta_part,
                "continuous_part": split.continuous_part,
                "class": _class_name(cfg, args.class_tol),
                "within_tol": ok,
            }
        )
    return rows, {"rows": len(rows), "breaches": breaches}, EXIT_TOLERANCE if breaches else EXIT_OK


def cmd_decay(args, config: RunConfig):
    rows = []
    for i, cfg in enumerate(_read_configs(args.input)):
        if cfg.n < 2:
            raise Guard(f"ray {i}: decay classification needs n >= 2")
        if cfg.is_zero():
            raise Guard(f"ray {i}: the zero configuration has no direction")
        rep = ray_decay(cfg, config.lambda_p, args.t_min, args.t_max, args.samples, tol=args.class_tol)
        rows.append(
            {
                "index": i,
                "class": rep.kind.value,
                "asymptote": rep.asymptote,
                "limit": rep.limit,
                "exponent": rep.fitted_exponent,
                "residual": rep.fit_residual,
                "envelope": rep.envelope,
            }
        )
    return rows, {"rows": len(rows)}, EXIT_OK


def _parse_axes(specs: list[str]) -> tuple[tuple[int, int], ...]:
    axes = []
    for s in specs:
        try:
            j, mu = (int(p) for p in s.split(","))
        except ValueError:
            raise ParseError(f"axis {s!r}: expected 'j,mu'") from None
        axes.append((j, mu))
    return tuple(axes)


def cmd_slice(args, config: RunConfig):
    fixed = parse_momenta(args.fixed, "--fixed")
    if len(fixed) != 1:
        raise ParseError("--fixed: expected one configuration")
    try:
        spec = SliceSpec(_parse_axes(args.axis or ["0,1"]), fixed[0], args.k_max, args.points)
    except ValueError as exc:
        raise ParseError(f"slice: {exc}") from None
    res = gamma_slice(spec, config.lambda_p, args.part)
    rows = []
    if res.values.ndim == 1:
        for x, v in zip(res.positions[0], res.values):
            rows.append({"x": float(x), "re": float(v.real), "im": float(v.imag)})
    else:
        xs = res.positions
        for a in range(len(xs[0])):
            for b in range(len(xs[1])):
                v = res.values[a, b]
                rows.append({"x1": float(xs[0][a]), "x2": float(xs[1][b]), "re": float(v.real), "im": float(v.imag)})
    info = {
        "mass_concentration": res.mass_concentration,
        "nyquist_warning": res.nyquist_warning,
        "parseval_factor": res.normalization(),
        "dk": res.dk,
    }
    if res.nyquist_warning:
        print("warning: kernel not resolved at the window edge on an Off direction", file=sys.stderr)
    return rows, info, EXIT_OK


def cmd_expand(args, config: RunConfig):
    if args.k > 3 or args.n > 4 or (args.k > 0 and args.n < 2) or args.k < 0:
        raise Guard(f"expand supports 0 <= k <= 3 and 2 <= n <= 4, got k = {args.k}, n = {args.n}")
    try:
        if args.method == "rules":
            ts = feynman_terms(args.k, args.n, convention=args.convention)
        else:
            ts = canonicalize(r_product(args.k, args.n, convention=args.convention))
    except GuardError as exc:
        raise Guard(str(exc)) from None
    info = summary(ts)
    print(json.dumps(info, sort_keys=True), file=sys.stderr)
    if args.text:
        print(render(ts), file=sys.stderr)
    if config.output_format == "json":
        return ts.to_json(with_meta=True), info, EXIT_OK
    rows = [
        {
            "num": t.sym_factor.numerator,
            "den": t.sym_factor.denominator,
            "phase_i": t.phase,
            "kappa_power": t.kappa_power,
            "hbar_power": t.hbar_power,
            "lines": t.lines,
            "term": render(type(ts)([t]), group=False),
        }
        for t in ts
    ]
    return rows, info, EXIT_OK


def cmd_limits(args, config: RunConfig):
    try:
        lams = [float(x) for x in args.lambdas.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"--lambdas: cannot parse {args.lambdas!r}") from None
    table = commutative_limit_table(args.radius, args.probes, lams, n=args.n, seed=config.seed)
    rows = [{"lambda_p": r.lambda_p, "sup": r.sup, "bound": r.bound} for r in table]
    violations = sum(r.sup > r.bound for r in table)
    info = {"violations": violations}
    positive = [r for r in table if r.lambda_p > 0 and r.sup > 0]
    info["exponent"] = limit_exponent(positive) if len(positive) >= 2 else None
    return rows, info, EXIT_TOLERANCE if violations else EXIT_OK


def cmd_stur(args, config: RunConfig):
    state = optimal_state(lambda_p=config.lambda_p)
    rows = []
    deltas = []
    for mu in range(4):
        mean, var = state_moments(state, mu)
        deltas.append(math.sqrt(var))
        rows.append({"mu": mu, "mean": mean, "variance": var})
    time_space, space_space = check_stur(deltas, config.lambda_p)
    info = {"time_space": time_space, "space_space": space_space, "bound": 0.5 * config.lambda_p**2}
    return rows, info, EXIT_OK if time_space and space_space else EXIT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    def add_globals(parser, defaults: bool):
        def d(value):
            return value if defaults else argparse.SUPPRESS

        parser.add_argument("--lambda-p", type=float, default=d(1.0), help="non-commutativity length (default 1)")
        parser.add_argument("--quad-order", type=int, default=d(64), help="Gauss-Legendre nodes in cos(theta); phi uses twice as many")
        parser.add_argument("--format", choices=("json", "csv"), default=d("json"))
        parser.add_argument("--out", default=d("-"), help="output file (default stdout)")
        parser.add_argument("--seed", type=int, default=d(0), help="seed of the quasi-random probe set")
        parser.add_argument("--tol", type=float, default=d(1e-8), help="closed form vs quadrature tolerance")

    p = argparse.ArgumentParser(prog="dfrqft", description="Non-local kernels and perturbative expansions on DFR spacetime.")
    add_globals(p, True)
    # the same flags are accepted after the verb
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, False)
    sub = p.add_subparsers(dest="command", required=True)

    def verb(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    k = verb("kernel", "evaluate Lambda_n for each configuration in a file")
    k.add_argument("input", help="momenta file, '-' for stdin")
    k.add_argument("--class-tol", type=float, default=1e-9)
    k.set_defaults(func=cmd_kernel)

    d = verb("decay", "ray asymptotics for each direction in a file")
    d.add_argument("input")
    d.add_argument("--t-min", type=float, default=10.0)
    d.add_argument("--t-max", type=float, default=1000.0)
    d.add_argument("--samples", type=int, default=400)
    d.add_argument("--class-tol", type=float, default=1e-9)
    d.set_defaults(func=cmd_decay)

    s = verb("slice", "inverse transform of Lambda_n on a one- or two-axis slice")
    s.add_argument("--fixed", required=True, help="frozen configuration, 4n numbers")
    s.add_argument("--axis", action="append", help="active axis 'j,mu' (0-based); repeat for 2D")
    s.add_argument("--k-max", type=float, default=50.0)
    s.add_argument("--points", type=int, default=256)
    s.add_argument("--part", choices=("total", "delta", "continuous"), default="total")
    s.set_defaults(func=cmd_slice)

    e = verb("expand", "order-k terms of the interacting field for phi^n")
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--n", type=int, default=4)
    e.add_argument("--method", choices=("rules", "bogoliubov"), default="rules")
    e.add_argument("--convention", choices=("display", "bogoliubov"), default="display")
    e.add_argument("--text", action="store_true", help="also print a readable rendering to stderr")
    e.set_defaults(func=cmd_expand)

    lim = verb("limits", "commutative-limit table sup|Lambda - 1| against its bound")
    lim.add_argument("--lambdas", default="1,0.5,0.25,0.125")
    lim.add_argument("--radius", type=float, default=1.0)
    lim.add_argument("--probes", type=int, default=200)
    lim.add_argument("--n", type=int, default=2)
    lim.set_defaults(func=cmd_limits)

    st = verb("stur", "uncertainty relations for the optimally localized state")
    st.set_defaults(func=cmd_stur)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0 or args.quad_order < 1:
        parser.error("--tol and --quad-order must be positive")
    if args.command != "limits" and not args.lambda_p > 0:
        parser.error("--lambda-p must be positive")
    config = RunConfig(args.lambda_p, args.quad_order, args.format, args.seed, {"kernel": args.tol})
    try:
        result, info, code = args.func(args, config)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Guard as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="")
    try:
        if args.command == "expand" and config.output_format == "json":
            out.write(json.dumps(_clean(result), sort_keys=True, indent=1) + "\n")
        else:
            emit(args.command, config, result, info, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if code == EXIT_TOLERANCE:
        print(f"tolerance breach: {json.dumps(_clean(info), sort_keys=True)}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

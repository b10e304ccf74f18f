"""Command-line front end.  Every subcommand prints one JSON run record.

Exit codes: 0 success, 1 internal error or failed verification, 2 condition
violation (poles, existence bounds).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from .blocks import BlockParams, block_coefficients, block_eval, coefficients_csv
from .bootstrap import QuadratureConfig, crossing_residual, fourpoint, integrand_csv
from .errors import LiouvilleError, PoleError
from .fock import oracle_residual
from .gmc import GmcConfig, Grid, compare_with_dozz, correlation_mc
from .special import LiouvilleParams, dozz, ell, upsilon, upsilon_prime_zero
from .virasoro import kac_check

SCHEMA_VERSION = 1
SEED_ENV = "LIOUVILLE_SEED"


def parse_complex(text: str) -> complex:
    """``"1.5"``, ``"2i"``, ``"0.3-1.2i"`` (``j`` is accepted too)."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _maybe_real(x):
    x = complex(x)
    return x.real if x.imag == 0 else x


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _record(args, status, result, started, error=None):
    params = {k: v for k, v in vars(args).items() if k != "func"}
    out = {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "subcommand": args.command,
        "parameters": params,
        "status": status,
        "timings": {"wall_seconds": time.perf_counter() - started},
        "result": result,
    }
    if error is not None:
        out["error"] = error
    return _jsonable(out)


def _params(args) -> LiouvilleParams:
    return LiouvilleParams(args.gamma, args.mu)


# ---------------------------------------------------------------------------
# subcommands; each returns (result payload, ok flag)
# ---------------------------------------------------------------------------


def cmd_dozz(args):
    p = _params(args)
    val = dozz(args.a1, args.a2, args.a3, p)
    return {"value": val}, True


def _weight(args, k: int, p: LiouvilleParams):
    d = getattr(args, f"delta{k}")
    a = getattr(args, f"a{k}")
    if d is not None:
        return _maybe_real(d)
    if a is None:
        raise argparse.ArgumentTypeError(f"give --a{k} or --delta{k}")
    return _maybe_real(p.delta(_maybe_real(a)))


def cmd_block(args):
    p = _params(args)
    ds = [_weight(args, k, p) for k in range(1, 5)]
    dP = _maybe_real(args.deltaP) if args.deltaP is not None else (p.Q**2 + args.P**2) / 4
    bp = BlockParams(*ds, dP, p.cL)
    beta = block_coefficients(bp, args.N)
    value, tail = block_eval(args.z, bp, args.N, coefficients=beta)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(coefficients_csv(beta))
    return {"beta": list(np.asarray(beta, dtype=complex)), "value": value, "tail_estimate": tail}, True


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(args.P_max, args.panels, args.nodes, args.refinement)


def cmd_fourpoint(args):
    res = fourpoint(args.z, (args.a1, args.a2, args.a3, args.a4), _params(args), _quad(args), args.N)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(integrand_csv(res))
    return res.to_json(), True


def cmd_crossing(args):
    res = crossing_residual(args.z.real, (args.a1, args.a2, args.a3, args.a4), _params(args), _quad(args), args.N)
    return res.to_json(), True


def _verify_items(level: int, gammas):
    rng = np.random.default_rng(0)
    for g in gammas:
        p = LiouvilleParams(g)
        Q = p.Q
        zs = rng.uniform(0.05, Q - 0.05, 6) + 1j * rng.uniform(-1, 1, 6)
        sym = max(abs(upsilon(z, p) - upsilon(Q - z, p)) / abs(upsilon(z, p)) for z in zs)
        yield f"upsilon_reflection[gamma={g}]", sym, sym < 1e-8
        worst = 0.0
        for z in zs:
            u = upsilon(z, p)
            lhs1 = upsilon(z + g / 2, p)
            rhs1 = ell(g * z / 2) * (g / 2) ** (1 - g * z) * u
            lhs2 = upsilon(z + 2 / g, p)
            rhs2 = ell(2 * z / g) * (g / 2) ** (4 * z / g - 1) * u
            worst = max(worst, abs(lhs1 - rhs1) / abs(lhs1), abs(lhs2 - rhs2) / abs(lhs2))
        yield f"upsilon_shift[gamma={g}]", worst, worst < 1e-8
        mid = abs(upsilon(Q / 2, p) - 1)
        yield f"upsilon_half_Q[gamma={g}]", mid, mid < 1e-10
        a = (0.7 * Q + 0.1j, 0.9 * Q - 0.2j, 0.6 * Q)
        base = dozz(*a, p)
        perm = max(abs(dozz(a[i], a[j], a[k], p) - base) / abs(base) for i, j, k in
                   [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)])
        yield f"dozz_permutation[gamma={g}]", perm, perm < 1e-12
        ratio = dozz(*a, p.with_mu(2.0)) / base
        expected = 2.0 ** ((2 * Q - sum(a)) / g)
        mu_err = abs(ratio - expected) / abs(expected)
        yield f"dozz_mu_scaling[gamma={g}]", mu_err, mu_err < 1e-12
        eps = 1e-5
        deriv = (upsilon(eps, p) - upsilon(-eps, p)) / (2 * eps)
        d_err = abs(deriv - upsilon_prime_zero(p)) / abs(upsilon_prime_zero(p))
        yield f"upsilon_prime_zero[gamma={g}]", d_err, d_err < 1e-8
        for N in range(1, level + 1):
            rep = kac_check(N, p)
            yield f"kac[N={N},gamma={g}]", float(rep.factorization_residual), rep.passed
    for a in (1.1 + 0.3j, 0.4 - 0.8j):
        r = oracle_residual(a, level, 2.5)
        yield f"fock_oracle[level={level},alpha={a}]", r, r < 1e-9


def cmd_verify(args):
    items = []
    for name, value, ok in _verify_items(args.level, args.gammas):
        items.append({"name": name, "value": float(value), "passed": bool(ok)})
    passed = all(i["passed"] for i in items)
    return {"items": items, "all_passed": passed}, passed


def cmd_gmc(args):
    if args.config:
        cfg = GmcConfig.load(args.config)
    else:
        if not args.insertion:
            raise argparse.ArgumentTypeError("give --config or at least three --insertion z,alpha")
        ins = []
        for spec in args.insertion:
            z, a = spec.rsplit(",", 1)
            ins.append((parse_complex(z), float(a)))
        cfg = GmcConfig(args.gamma, args.mu, ins, grid=Grid())
    if args.samples is not None:
        cfg.n_samples = args.samples
    cfg.seed = args.seed if args.seed is not None else int(os.environ.get(SEED_ENV, cfg.seed))
    if args.threads is not None:
        cfg.workers = args.threads
    est = correlation_mc(cfg)
    out = est.to_json()
    if args.compare_dozz:
        if len(cfg.insertions) != 3:
            raise argparse.ArgumentTypeError("--compare-dozz needs exactly three insertions")
        out["dozz_comparison"] = compare_with_dozz(est)
    return out, True


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liouville", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--output", "-o", help="write the JSON record here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--mu", type=float, default=1.0)
        p.add_argument("--threads", type=int, default=None, help="cap on worker threads")

    p = sub.add_parser("dozz", help="DOZZ structure constant")
    common(p)
    for k in (1, 2, 3):
        p.add_argument(f"--a{k}", type=parse_complex, required=True)
    p.set_defaults(func=cmd_dozz)

    p = sub.add_parser("block", help="block coefficients and truncated series")
    common(p)
    for k in (1, 2, 3, 4):
        g = p.add_mutually_exclusive_group()
        g.add_argument(f"--a{k}", type=parse_complex)
        g.add_argument(f"--delta{k}", type=parse_complex)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--P", type=float)
    g.add_argument("--deltaP", type=parse_complex)
    p.add_argument("--z", type=parse_complex, default=0.3)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--csv", help="write n, Re, Im, root test rows here")
    p.set_defaults(func=cmd_block)

    for name, func, zdef in (("fourpoint", cmd_fourpoint, 0.4), ("crossing", cmd_crossing, 0.4)):
        p = sub.add_parser(name, help=f"bootstrap {name}")
        common(p)
        for k in (1, 2, 3, 4):
            p.add_argument(f"--a{k}", type=float, required=True)
        p.add_argument("--z", type=parse_complex, default=zdef)
        p.add_argument("--N", type=int, default=8)
        p.add_argument("--P-max", dest="P_max", type=float, default=20.0)
        p.add_argument("--panels", type=int, default=40)
        p.add_argument("--nodes", type=int, default=16)
        p.add_argument("--refinement", type=int, default=2)
        if name == "fourpoint":
            p.add_argument("--csv", help="write integrand samples here")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--gammas", type=float, nargs="+", default=[0.7, 1.0, 1.3])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gmc", help="Monte Carlo correlation function")
    common(p)
    p.add_argument("--config", help="JSON config (gamma, mu, insertions, grid, samples, seed)")
    p.add_argument("--insertion", action="append", help='"z,alpha", repeatable')
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, help=f"defaults to ${SEED_ENV} or the config value")
    p.add_argument("--compare-dozz", action="store_true")
    p.set_defaults(func=cmd_gmc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    code = 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result, ok = args.func(args)
            record = _record(args, "ok" if ok else "failed", result, started)
            code = 0 if ok else 1
        except PoleError as exc:
            record = _record(args, "condition", None, started, {"message": str(exc), "pole_location": exc.location})
            code = 2
        except (LiouvilleError, argparse.ArgumentTypeError) as exc:
            record = _record(args, "condition", None, started, {"message": str(exc)})
            code = 2
        except Exception as exc:  # noqa: BLE001 - reported in the record
            record = _record(args, "internal", None, started, {"message": f"{type(exc).__name__}: {exc}"})
            code = 1
    record["warnings"] = [str(w.message) for w in caught]
    text = json.dumps(record, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

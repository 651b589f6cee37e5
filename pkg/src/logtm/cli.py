"""Command-line surface.

Subcommands: constants, eval, sharpness, transport-check, hardy
(decide/verify/batch), embed, maximize, admissible, smooth, concentration.
Results go to standard output (or ``--out``) as JSON with a fixed key order
and floats printed to 17 significant digits, so identical inputs produce
byte-identical output; tables can also be emitted as CSV, and report-style
commands render a PNG figure through ``--plot``.

Exit codes: 0 success, 2 validation error (the diagnostic names the violated
precondition), 3 for divergent/non-converged outcomes under ``--strict``.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from logtm import admissibility, hardy, optimizer, profiles
from logtm.constants import (
    Params,
    Weight,
    compute_constants,
    critical_coefficient,
    critical_exponent,
    digamma_bound,
)
from logtm.quadrature import DivergentIntegral

SCHEMA = "1"


class ValidationError(ValueError):
    pass


# ----------------------------------------------------------------------------
# deterministic serialization


def _jfmt(obj) -> str:
    if isinstance(obj, dict):
        items = ", ".join(f"{_jfmt(str(k))}: {_jfmt(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_jfmt(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        if math.isnan(x):
            return '"nan"'
        return format(x, ".17g")
    if isinstance(obj, (np.integer, int)):
        return str(int(obj))
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _csv_rows(header, rows) -> str:
    def cell(x):
        if isinstance(x, (np.floating, float)):
            return format(float(x), ".17g")
        return str(x)

    lines = [",".join(header)]
    lines.extend(",".join(cell(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _result(payload: dict, args) -> None:
    doc = {"schema": SCHEMA, "command": args.command, **payload}
    _emit(_jfmt(doc) + "\n", args.out)


# ----------------------------------------------------------------------------
# argument plumbing


def _add_common(sp, *names):
    specs = {
        "n": dict(type=int, help="dimension (even integer)"),
        "k": dict(type=int, help="Hessian order (defaults to n/2)"),
        "beta": dict(type=float, help="log-weight exponent parameter"),
        "weight": dict(choices=["w0", "w1"], help="log-weight kind"),
        "alpha": dict(type=float, help="exponential coefficient / left power for hardy"),
        "alpha-ratio": dict(type=float, help="alpha as a multiple of the critical coefficient"),
        "gamma": dict(type=float, help="exponential exponent"),
        "p": dict(type=float, help="left Lebesgue exponent"),
        "q": dict(type=float, help="right Lebesgue exponent"),
        "R": dict(type=float, help="interval endpoint"),
        "ell": dict(type=int, help="family index"),
        "eta": dict(type=float, help="truncated-family exponent defect"),
        "grid": dict(type=int, help="grid size"),
        "tmax": dict(type=float, help="log-radius cutoff"),
        "tol": dict(type=float, help="solver tolerance"),
        "seed": dict(type=int, help="optimizer jitter seed (ignored elsewhere)"),
        "theta": dict(type=float, help="left log power (raw hardy query)"),
        "nu": dict(type=float, help="right power of t (raw hardy query)"),
        "mu": dict(type=float, help="right log power (raw hardy query)"),
        "logkind": dict(choices=["log_r", "log_er"], help="log kind for raw hardy queries"),
        "family": dict(choices=[f.value for f in profiles.Family], help="profile family"),
        "epsilon": dict(type=float, help="smoothing half-width"),
        "a": dict(type=float, help="double-exponential coefficient"),
        "ell-max": dict(type=int, help="largest family index in a sweep"),
        "input": dict(help="input CSV path"),
        "profile-out": dict(help="write the profile as CSV (columns t,v)"),
        "plot": dict(help="render a PNG figure to this path"),
    }
    for name in names:
        sp.add_argument(f"--{name}", **specs[name], default=None)
    sp.add_argument("--out", default=None, help="write the result here instead of stdout")
    sp.add_argument("--format", choices=["json", "csv"], default=None)
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--config", default=None, help="key=value defaults file; flags override")
    if "seed" not in names:
        sp.add_argument("--seed", type=int, default=None)


def _load_config(path) -> dict:
    cfg = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"config line is not key=value: {line!r}")
            key, val = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _get(args, name, default=None, cast=None, required=False):
    val = getattr(args, name.replace("-", "_"), None)
    if val is None:
        cfg = getattr(args, "_config_values", {})
        raw = cfg.get(name.replace("-", "_"))
        if raw is not None:
            val = raw
    if val is None:
        if required:
            raise ValidationError(f"missing required flag --{name}")
        return default
    if cast is not None and isinstance(val, str):
        if cast is bool:
            return val.lower() in ("1", "true", "yes")
        return cast(val)
    return val


def _params(args, default_weight="w0", beta_default=None) -> Params:
    n = int(_get(args, "n", required=True, cast=int))
    k = _get(args, "k", cast=int)
    if k is None:
        if n % 2 != 0:
            raise ValidationError("k defaults to n/2, which requires even n")
        k = n // 2
    beta = _get(args, "beta", default=beta_default, cast=float)
    if beta is None:
        raise ValidationError("missing required flag --beta")
    weight = Weight(_get(args, "weight", default=default_weight))
    return Params(n, int(k), float(beta), weight)


def _family_profile(args):
    fam_name = _get(args, "family", required=True)
    family = profiles.Family(fam_name)
    default_weight = "w1" if family in (profiles.Family.MOSER_W1, profiles.Family.DEXP) else "w0"
    beta_default = 1.0 if family is profiles.Family.DEXP else None
    p = _params(args, default_weight=default_weight, beta_default=beta_default)
    if family is profiles.Family.TRUNC_LOG:
        index = _get(args, "eta", cast=float, required=True)
    else:
        index = _get(args, "ell", cast=int, required=True)
    return profiles.make_family(family, p, index), p, family, index


# ----------------------------------------------------------------------------
# subcommand handlers (each returns the exit code)


def _cmd_constants(args) -> int:
    p = _params(args)
    c = compute_constants(p)
    _result(
        {
            "n": p.n,
            "k": p.k,
            "beta": p.beta,
            "c_n": c.c_n,
            "alpha_n": c.alpha_n,
            "gamma_crit": c.gamma_crit,
            "alpha_crit": c.alpha_crit,
            "digamma_bound": digamma_bound(p.n),
        },
        args,
    )
    return 0


def _cmd_eval(args) -> int:
    v, p, family, index = _family_profile(args)
    norm = profiles.weighted_norm(v, p)
    payload = {
        "family": family.value,
        "index": index,
        "n": p.n,
        "k": p.k,
        "beta": p.beta,
        "weight": p.weight.value,
        "norm": norm,
    }
    divergent = False
    if family is profiles.Family.DEXP:
        a = _get(args, "a", default=float(p.n), cast=float)
        value = profiles.double_exp_functional(v, a, p.n)
        payload.update({"a": a, "dexp_value": None if math.isinf(value) else value})
        divergent = math.isinf(value)
    else:
        gamma = _get(args, "gamma", cast=float)
        alpha = _get(args, "alpha", cast=float)
        if alpha is None:
            ratio = _get(args, "alpha-ratio", default=1.0, cast=float)
            alpha = ratio * critical_coefficient(p.n, p.k, p.beta)
        if gamma is None:
            gamma = critical_exponent(p.n, p.beta)
        value = profiles.moser_functional(v, alpha, gamma, p.n)
        divergent = math.isinf(value)
        payload.update(
            {"alpha": alpha, "gamma": gamma, "value": None if divergent else value}
        )
    payload["divergent"] = divergent
    if _get(args, "plot"):
        ts = np.linspace(0.0, max(v.segment_points_t() or (1.0,)) * 1.5 + 2.0, 600)
        from logtm.plots import save_profile_plot

        save_profile_plot(_get(args, "plot"), ts, v.value_t(ts), title=family.value)
    _result(payload, args)
    return 3 if (divergent and args.strict) else 0


def _cmd_sharpness(args) -> int:
    v0, p, family, _ = _family_profile(args)
    ratio = _get(args, "alpha-ratio", default=1.05, cast=float)
    ell_lo = p.n + 1 if family is profiles.Family.MOSER_W1 else 1
    ell_hi = _get(args, "ell-max", default=ell_lo + 29, cast=int)
    rows = []
    for ell in range(ell_lo, ell_hi + 1):
        v = profiles.make_family(family, p, ell)
        norm = profiles.weighted_norm(v, p)
        if family is profiles.Family.DEXP:
            val = profiles.double_exp_functional(v, ratio * p.n, p.n)
        else:
            val = profiles.moser_functional(
                v,
                ratio * critical_coefficient(p.n, p.k, p.beta),
                critical_exponent(p.n, p.beta),
                p.n,
            )
        rows.append((ell, norm, val))
    fmt = _get(args, "format", default="csv")
    if fmt == "csv":
        _emit(_csv_rows(["ell", "norm", "J"], rows), args.out)
    else:
        _result(
            {
                "family": family.value,
                "alpha_ratio": ratio,
                "rows": [{"ell": e, "norm": nn, "J": j} for e, nn, j in rows],
            },
            args,
        )
    if _get(args, "plot"):
        from logtm.plots import save_series_plot

        save_series_plot(
            _get(args, "plot"),
            [r[0] for r in rows],
            {"J": [r[2] for r in rows]},
            xlabel="ell",
            ylabel="J",
            logy=True,
            title=f"{family.value} growth at ratio {ratio:g}",
        )
    return 0


def _cmd_transport_check(args) -> int:
    v, p, family, index = _family_profile(args)
    ratio = _get(args, "alpha-ratio", default=1.0, cast=float)
    tp = profiles.transport(v, p, ratio * critical_coefficient(p.n, p.k, p.beta))
    rep = profiles.verify_transport(tp, p)
    _result(
        {
            "family": family.value,
            "index": index,
            "alpha_ratio": ratio,
            "norm_lhs": rep.norm_lhs,
            "norm_rhs": rep.norm_rhs,
            "norm_residual": rep.norm_residual,
            "functional_lhs": rep.functional_lhs,
            "functional_rhs_halfline": rep.functional_rhs_halfline,
            "measured_factor": rep.measured_factor,
            "functional_residual": rep.functional_residual,
            "psi_power_max_gap": rep.psi_power_max_gap,
        },
        args,
    )
    return 0


def _hardy_query_from_args(args) -> tuple:
    """Raw 6-parameter query when the raw flags are given, else the
    dimensional route (alpha/beta/n/k/p/weight)."""
    raw = [_get(args, nm, cast=float) for nm in ("theta", "nu", "mu", "q")]
    if any(x is not None for x in raw):
        if any(x is None for x in raw):
            raise ValidationError("raw queries need all of --theta --nu --mu --q")
        theta, nu, mu, q = raw
        kind = hardy.HardyLogKind(
            {"log_r": "log_r", "log_er": "log_er"}[_get(args, "logkind", default="log_r")]
        )
        hq = hardy.HardyQuery(
            lhs_power=_get(args, "alpha", cast=float, required=True),
            theta=theta,
            nu=nu,
            mu=mu,
            p=_get(args, "p", cast=float, required=True),
            q=q,
            R=_get(args, "R", default=1.0, cast=float),
            logkind=kind,
        )
        return hq, None
    hhq = hardy.HessianHardyQuery(
        alpha=_get(args, "alpha", cast=float, required=True),
        beta=_get(args, "beta", cast=float, required=True),
        n=_get(args, "n", cast=float, required=True),
        k=_get(args, "k", cast=float, required=True),
        p=_get(args, "p", cast=float, required=True),
        weight=Weight(_get(args, "weight", default="w0")),
        R=_get(args, "R", default=1.0, cast=float),
    )
    return hhq.to_hardy_query(), hhq


def _cmd_hardy(args) -> int:
    sub = args.hardy_command
    if sub == "batch":
        path = _get(args, "input", required=True)
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        if lines and lines[0].lower().startswith("alpha"):
            lines = lines[1:]
        rows = []
        for ln in lines:
            parts = [s.strip() for s in ln.split(",")]
            if len(parts) != 8:
                raise ValidationError(f"batch rows need 8 fields, got {ln!r}")
            hq = hardy.HardyQuery(
                lhs_power=float(parts[0]),
                theta=float(parts[1]),
                nu=float(parts[2]),
                mu=float(parts[3]),
                p=float(parts[4]),
                q=float(parts[5]),
                R=float(parts[6]),
                logkind=hardy.HardyLogKind(parts[7]),
            )
            verdict = hardy.decide(hq)
            rows.append(
                (*parts, str(verdict.holds).lower(), verdict.matched_condition or "NONE")
            )
        fmt = _get(args, "format", default="csv")
        if fmt == "csv":
            _emit(
                _csv_rows(
                    ["alpha", "theta", "nu", "mu", "p", "q", "R", "logkind", "holds", "condition"],
                    rows,
                ),
                args.out,
            )
        else:
            _result({"rows": [list(r) for r in rows]}, args)
        return 0

    hq, hhq = _hardy_query_from_args(args)
    verdict = hardy.decide_hessian(hhq) if hhq is not None else hardy.decide(hq)
    payload = {
        "holds": verdict.holds,
        "condition": verdict.matched_condition,
        "regime": verdict.regime.value,
        "boundary_sensitive": verdict.boundary_sensitive,
        "notes": list(verdict.notes),
    }
    if sub == "decide":
        _result(payload, args)
        return 0
    # verify: numeric cross-check
    cls = hardy.numeric_criterion(hq)
    agree = None
    if cls is not hardy.Classification.UNDECIDED:
        agree = (cls is hardy.Classification.FINITE) == verdict.holds
    payload.update({"numeric": cls.value, "agree": agree})
    _result(payload, args)
    return 3 if (args.strict and agree is False) else 0


def _cmd_embed(args) -> int:
    hhq = hardy.HessianHardyQuery(
        alpha=_get(args, "alpha", cast=float, required=True),
        beta=_get(args, "beta", cast=float, required=True),
        n=_get(args, "n", cast=float, required=True),
        k=_get(args, "k", cast=float, required=True),
        p=_get(args, "p", cast=float, required=True),
        weight=Weight(_get(args, "weight", default="w0")),
    )
    v = hardy.embedding_conditions(hhq)
    _result(
        {
            "embeds": v.embeds,
            "critical_exponent": v.critical_exponent,
            "critical_condition_applied": v.critical_condition_applied,
        },
        args,
    )
    return 0


def _cmd_maximize(args) -> int:
    p = _params(args)
    prob = optimizer.MaximizerProblem(
        params=p,
        grid_size=_get(args, "grid", default=4096, cast=int),
        T_max=_get(args, "tmax", default=60.0, cast=float),
        alpha=_get(args, "alpha", cast=float),
        gamma=_get(args, "gamma", cast=float),
        tol=_get(args, "tol", default=1e-9, cast=float),
    )
    rep = optimizer.maximize(prob, seed=_get(args, "seed", default=0, cast=int))
    if _get(args, "profile-out"):
        with open(_get(args, "profile-out"), "w") as fh:
            fh.write(rep.profile.to_csv())
    if _get(args, "plot"):
        from logtm.plots import save_profile_plot

        save_profile_plot(
            _get(args, "plot"), rep.profile.t, rep.profile.v, title="maximizer profile"
        )
    _result(rep.to_json_dict(), args)
    return 3 if (args.strict and not rep.converged) else 0


def _cmd_admissible(args) -> int:
    if _get(args, "input"):
        with open(_get(args, "input")) as fh:
            v = profiles.SampledProfile.from_csv(fh.read())
        p = _params(args)
    else:
        v, p, _, _ = _family_profile(args)
    rep = admissibility.check_admissible(v, p)
    _result(rep.to_json_dict(), args)
    return 0


def _cmd_smooth(args) -> int:
    v, p, family, index = _family_profile(args)
    eps = _get(args, "epsilon", cast=float, required=True)
    s = admissibility.smooth(v, eps)
    dist = admissibility.norm_distance(s, v, p)
    rep = admissibility.check_admissible(s, p)
    if _get(args, "profile-out"):
        span = max(s.segment_points_t() or (1.0,)) * 1.5 + 2.0
        grid = np.linspace(0.0, span, _get(args, "grid", default=2048, cast=int))
        vals = s.value_t(grid)
        vals[0] = 0.0
        sampled = profiles.SampledProfile(grid, vals)
        with open(_get(args, "profile-out"), "w") as fh:
            fh.write(sampled.to_csv())
    _result(
        {
            "family": family.value,
            "index": index,
            "epsilon": eps,
            "norm_distance": dist,
            "admissible_after": rep.admissible,
            "per_j_min": [x for x in rep.per_j_min],
        },
        args,
    )
    return 0


def _cmd_concentration(args) -> int:
    p = _params(args)
    ell_hi = _get(args, "ell-max", default=10, cast=int)
    rep = optimizer.concentration_probe(p, list(range(1, ell_hi + 1)))
    fmt = _get(args, "format", default="json")
    if fmt == "csv":
        _emit(
            _csv_rows(
                ["ell", "J", "floor"],
                list(zip(rep.ells, rep.values, rep.floors)),
            ),
            args.out,
        )
    else:
        _result(rep.to_json_dict(), args)
    if _get(args, "plot"):
        from logtm.plots import save_series_plot

        save_series_plot(
            _get(args, "plot"),
            list(rep.ells),
            {
                "J": list(rep.values),
                "floor": list(rep.floors),
                "ceiling": [rep.ceiling] * len(rep.ells),
            },
            xlabel="ell",
            ylabel="J",
            title="concentration scan",
        )
    return 0


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logtm",
        description="log-weighted exponential-integrability and Hardy-inequality toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("constants"), "n", "k", "beta", "seed")
    _add_common(
        sub.add_parser("eval"),
        "family", "ell", "eta", "n", "k", "beta", "weight",
        "alpha", "alpha-ratio", "gamma", "a", "plot", "seed",
    )
    _add_common(
        sub.add_parser("sharpness"),
        "family", "ell", "eta", "n", "k", "beta", "weight", "alpha-ratio", "ell-max",
        "plot", "seed",
    )
    _add_common(
        sub.add_parser("transport-check"),
        "family", "ell", "eta", "n", "k", "beta", "weight", "alpha-ratio", "seed",
    )
    hardy_parser = sub.add_parser("hardy")
    hsub = hardy_parser.add_subparsers(dest="hardy_command", required=True)
    for name in ("decide", "verify"):
        _add_common(
            hsub.add_parser(name),
            "alpha", "beta", "n", "k", "p", "weight",
            "theta", "nu", "mu", "q", "R", "logkind", "seed",
        )
    _add_common(hsub.add_parser("batch"), "input", "seed")
    _add_common(sub.add_parser("embed"), "n", "k", "alpha", "beta", "p", "weight", "seed")
    _add_common(
        sub.add_parser("maximize"),
        "n", "k", "beta", "weight", "alpha", "gamma", "grid", "tmax", "tol", "seed",
        "profile-out", "plot",
    )
    _add_common(
        sub.add_parser("admissible"),
        "family", "ell", "eta", "n", "k", "beta", "weight", "input", "seed",
    )
    _add_common(
        sub.add_parser("smooth"),
        "family", "ell", "eta", "n", "k", "beta", "weight", "epsilon", "grid",
        "profile-out", "seed",
    )
    _add_common(
        sub.add_parser("concentration"), "n", "k", "beta", "weight", "ell-max", "plot", "seed"
    )
    return parser


_HANDLERS = {
    "constants": _cmd_constants,
    "eval": _cmd_eval,
    "sharpness": _cmd_sharpness,
    "transport-check": _cmd_transport_check,
    "hardy": _cmd_hardy,
    "embed": _cmd_embed,
    "maximize": _cmd_maximize,
    "admissible": _cmd_admissible,
    "smooth": _cmd_smooth,
    "concentration": _cmd_concentration,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        args._config_values = _load_config(args.config) if args.config else {}
        code = _HANDLERS[args.command](args)
    except (ValidationError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except DivergentIntegral as exc:
        sys.stderr.write(f"divergent: {exc}\n")
        return 3 if args.strict else 0
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())

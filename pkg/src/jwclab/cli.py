"""Command-line front end: ``jwclab <command> [options]``.

Exit codes: 0 every requested verdict passed, 1 some verdict negative or
indeterminate, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import boundary_analysis as ba
from .ball_geometry import DomainError, InvalidParameters, basis_vector, orthogonal_basis
from .curves import classify, disk_slice_curve, proof_curve, radial_curve, special_restricted_curve, tangential_curve
from .flow import FlowError, integrate, julia_invariant_check
from .generators import AdmissibleParams13, Generator, builtin, example_1_2, example_1_3
from .limits import geometric_ladder
from .reports import make_report, write_outputs
from .sampling import DEFAULT_SEED, sobol_ball

COMMANDS = ("jwc", "jwc-half", "dilation", "flow", "holder", "julia", "classify")
OUT_ENV = "JWCLAB_OUT"

GRAMMAR = """\
generator specs (--generator NAME:K=V,...):
  example1.2:alpha=A[,n=N]                 0 < A < 1/2, N >= 2
  example1.3:a=A,c=C,ap=AP[,n=N][,convention=id-F|F-id]
                                           checked against a < 1/(1+2 eps D^(1+AP)),
                                           c < 2^(1-AP) eps a
  builtin:zero[,n=N]  builtin:minus_identity[,n=N]  builtin:logistic
  builtin:linear,A=a11 a12;a21 a22         complex literals, rows split by ';'

vertices and points (--vertex, --z0):
  e1, e2, ...                              standard basis vector
  "(re,im;re,im;...)"                      one re,im pair per coordinate
  0.5  or  0.3+0.2j                        one-dimensional shorthand (--z0)

curves (classify --curve):
  radial | sigma:rho=R[,c=C] | tangential[:c=C] | proof:gamma=G[,eps=E,theta=T] | disk[:c=C]

--gamma must lie in (0, 0.5]; jwc with --gamma 0.5 runs the gamma=1/2 suite.
--out defaults to $JWCLAB_OUT, then ./jwclab-reports.
exit codes: 0 pass, 1 negative or indeterminate verdict, 2 usage error, 3 numerical failure
"""


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    generator_spec: str | None
    generator: Generator | None
    vertex_spec: str
    vertex: np.ndarray
    gamma: float | None
    amplitude: float
    depths: int
    seed: int
    out: Path
    fmt: str
    tol: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "generator": None if self.generator is None else self.generator.spec(),
            "generator_spec": self.generator_spec,
            "vertex_spec": self.vertex_spec,
            "gamma": self.gamma,
            "amplitude": self.amplitude,
            "depths": self.depths,
            "seed": self.seed,
            "format": self.fmt,
            "tol": self.tol,
            **self.extra,
        }


def _kv(text: str) -> dict:
    out = {}
    for part in filter(None, (x.strip() for x in text.split(","))):
        if "=" not in part:
            raise UsageError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _float(value: str, what: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise UsageError(f"malformed number for {what}: {value!r}") from None


def _int(value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"malformed integer for {what}: {value!r}") from None


def _take(kv: dict, allowed: set, name: str) -> None:
    unknown = set(kv) - allowed
    if unknown:
        raise UsageError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")


def parse_generator(spec: str) -> Generator:
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name == "builtin":
        label, _, rest = rest.partition(",")
        kv = _kv(rest)
        label = label.strip()
        if label == "linear":
            _take(kv, {"A"}, "builtin:linear")
            if "A" not in kv:
                raise UsageError("builtin:linear needs A=...")
            try:
                A = [[complex(x) for x in row.split()] for row in kv["A"].split(";")]
            except ValueError:
                raise UsageError(f"malformed matrix {kv['A']!r}") from None
            return builtin("linear", A=A)
        _take(kv, {"n"}, f"builtin:{label}")
        if label not in ("zero", "minus_identity", "logistic", "logistic_1d"):
            raise UsageError(f"unknown builtin generator {label!r}")
        return builtin(label, n=_int(kv.get("n", "2"), "n"))
    kv = _kv(rest)
    if name == "example1.2":
        _take(kv, {"alpha", "n"}, name)
        if "alpha" not in kv:
            raise UsageError("example1.2 needs alpha=...")
        return example_1_2(_float(kv["alpha"], "alpha"), _int(kv.get("n", "2"), "n"))
    if name == "example1.3":
        kv = {("alpha_prime" if k == "ap" else k): v for k, v in kv.items()}
        _take(kv, {"a", "c", "alpha_prime", "n", "convention"}, name)
        missing = {"a", "c", "alpha_prime"} - set(kv)
        if missing:
            raise UsageError(f"example1.3 needs {', '.join(sorted(missing))}")
        params = AdmissibleParams13(_float(kv["a"], "a"), _float(kv["c"], "c"),
                                    _float(kv["alpha_prime"], "ap"))
        return example_1_3(params, _int(kv.get("n", "2"), "n"), kv.get("convention", "id-F"))
    raise UsageError(f"unknown generator {name!r}")


def parse_point(text: str, n: int | None = None) -> np.ndarray:
    t = text.strip()
    if t.startswith("e") and t[1:].isdigit():
        if n is None:
            raise UsageError("basis vector needs a known dimension")
        return basis_vector(n, int(t[1:]))
    t = t.strip("()")
    if ";" in t or "," in t:
        coords = []
        for pair in t.split(";"):
            bits = pair.split(",")
            if len(bits) != 2:
                raise UsageError(f"coordinate {pair!r} is not re,im")
            coords.append(complex(_float(bits[0], "re"), _float(bits[1], "im")))
        z = np.array(coords)
    else:
        try:
            z = np.array([complex(t.replace(" ", ""))])
        except ValueError:
            raise UsageError(f"malformed point {text!r}") from None
    if n is not None and z.shape[0] != n:
        raise UsageError(f"point {text!r} has dimension {z.shape[0]}, expected {n}")
    return z


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--generator", help="generator spec NAME:K=V,... (see grammar)")
    common.add_argument("--vertex", default="e1", help="boundary point, e.g. e1 or \"(1,0;0,0)\"")
    common.add_argument("--gamma", help="exponent in (0, 0.5]")
    common.add_argument("--amplitude", default="2", help="Korányi amplitude M > 1")
    common.add_argument("--depths", default="24", help="number of K-boundedness levels (>= 8)")
    common.add_argument("--seed", default=str(DEFAULT_SEED), help="seed for quasi-random samples")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV}, then ./jwclab-reports)")
    common.add_argument("--format", default="json", choices=("json", "csv", "both"))
    common.add_argument("--tol", default="1e-10", help="integrator tolerance")

    parser = argparse.ArgumentParser(
        prog="jwclab",
        description="Boundary behaviour of infinitesimal generators on the unit ball.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    helps = {
        "jwc": "six-item boundary suite with exponent --gamma",
        "jwc-half": "the suite at gamma = 1/2 (gated on the Hölder condition)",
        "dilation": "radial vanishing, radial dilation and the sup formula",
        "flow": "integrate the semigroup from --z0 up to --T",
        "holder": "fit the Hölder exponent of the dilation remainder",
        "julia": "check the Julia-type flow inequality",
        "classify": "classify a curve ending at the vertex",
    }
    subs = {}
    for name in COMMANDS:
        subs[name] = sub.add_parser(name, parents=[common], help=helps[name], epilog=GRAMMAR,
                                    formatter_class=argparse.RawDescriptionHelpFormatter)
    subs["flow"].add_argument("--z0", default=None, help="start point")
    subs["flow"].add_argument("--T", default="1.0", help="final time (<= 50)")
    subs["flow"].add_argument("--points", default="101", help="number of output times")
    subs["julia"].add_argument("--rate", default=None, help="gamma rate (default: dilation + 1e-6)")
    subs["julia"].add_argument("--starts", default="100", help="number of random starts")
    subs["julia"].add_argument("--times", default="0.25,0.5,1,2", help="comma-separated times")
    subs["dilation"].add_argument("--samples", default="100000", help="points for the sup formula")
    subs["classify"].add_argument("--curve", default="radial", help="curve spec (see grammar)")
    subs["classify"].add_argument("--dim", default="2", help="dimension when no generator is given")
    return parser


def parse_args(argv=None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _resolve(args)
    except (UsageError, InvalidParameters, DomainError) as exc:
        parser.error(str(exc))


def _resolve(args) -> RunConfig:
    gen = parse_generator(args.generator) if args.generator else None
    if gen is None and args.command != "classify":
        raise UsageError(f"{args.command} needs --generator")
    n = gen.dim if gen is not None else _int(args.dim, "dim")
    vertex = parse_point(args.vertex, n)
    if abs(np.linalg.norm(vertex) - 1.0) > 1e-12:
        raise UsageError("vertex must have unit norm")
    gamma = None
    if args.gamma is not None:
        gamma = _float(args.gamma, "gamma")
        if not 0 < gamma <= 0.5:
            raise UsageError(f"--gamma must lie in (0, 0.5], got {gamma}")
    elif args.command == "jwc":
        raise UsageError("jwc needs --gamma in (0, 0.5]")
    amplitude = _float(args.amplitude, "amplitude")
    if not amplitude > 1:
        raise UsageError("--amplitude must be > 1")
    depths = _int(args.depths, "depths")
    if not 8 <= depths <= 37:
        raise UsageError("--depths must lie in 8..37")
    tol = _float(args.tol, "tol")
    if not tol > 0:
        raise UsageError("--tol must be > 0")

    extra: dict = {}
    if args.command == "flow":
        extra["z0"] = args.z0 or "origin"
        z0 = parse_point(args.z0, n) if args.z0 else np.zeros(n, dtype=complex)
        if not np.linalg.norm(z0) < 1:
            raise UsageError("--z0 must lie in the open unit ball")
        extra["z0_resolved"] = [[float(c.real), float(c.imag)] for c in z0]
        extra["T"] = _float(args.T, "T")
        if not 0 < extra["T"] <= 50:
            raise UsageError("--T must lie in (0, 50]")
        extra["points"] = _int(args.points, "points")
        if extra["points"] < 2:
            raise UsageError("--points must be >= 2")
    if args.command == "julia":
        extra["rate"] = None if args.rate is None else _float(args.rate, "rate")
        extra["starts"] = _int(args.starts, "starts")
        extra["times"] = [_float(x, "times") for x in args.times.split(",")]
        if extra["starts"] < 1 or not extra["times"] or min(extra["times"]) <= 0 or max(extra["times"]) > 50:
            raise UsageError("--starts must be >= 1 and --times inside (0, 50]")
    if args.command == "dilation":
        extra["samples"] = _int(args.samples, "samples")
        if extra["samples"] < 1:
            raise UsageError("--samples must be >= 1")
    if args.command == "classify":
        extra["curve"] = args.curve
        _curve_from_spec(args.curve, vertex)

    out = Path(args.out or os.environ.get(OUT_ENV) or "jwclab-reports")
    try:
        out.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=out):
            pass
    except OSError as exc:
        raise UsageError(f"output directory {out} is not writable: {exc}") from None

    return RunConfig(args.command, args.generator, gen, args.vertex, vertex, gamma, amplitude, depths,
                     _int(args.seed, "seed"), out, args.format, tol, extra)


def _curve_from_spec(spec: str, p: np.ndarray):
    name, _, rest = spec.partition(":")
    kv = {k: _float(v, k) for k, v in _kv(rest).items()}
    if name == "radial":
        return radial_curve(p)
    if name == "disk":
        return disk_slice_curve(p, kv.get("c", 1.0))
    if p.shape[0] < 2:
        raise UsageError(f"curve {name!r} needs dimension >= 2")
    v = orthogonal_basis(p)[0]
    if name == "sigma":
        if "rho" not in kv:
            raise UsageError("sigma needs rho=...")
        return special_restricted_curve(p, v, kv.get("c", 0.5), kv["rho"])
    if name == "tangential":
        return tangential_curve(p, v, kv.get("c", 0.5))
    if name == "proof":
        if "gamma" not in kv:
            raise UsageError("proof needs gamma=...")
        return proof_curve(p, v, kv.get("eps", 0.5), kv.get("theta", 0.0), kv["gamma"])
    raise UsageError(f"unknown curve {name!r}")


def _report(cfg: RunConfig, operation: str, parameters: dict, samples, verdicts: dict, witnesses,
            tables: dict) -> list[Path]:
    label = cfg.generator.label if cfg.generator is not None else "none"
    report = make_report(operation, label, cfg.vertex, parameters, samples, verdicts, witnesses, cfg.to_dict())
    return write_outputs(report, tables, cfg.out, cfg.fmt, operation)


def _run_jwc(cfg: RunConfig, half: bool):
    scfg = ba.SuiteConfig(amplitude=cfg.amplitude, depths=cfg.depths)
    if half or cfg.gamma == 0.5:
        rep = ba.jwc_suite_gamma_half(cfg.generator, cfg.vertex, scfg)
        op = "jwc_suite_gamma_half"
    else:
        rep = ba.jwc_suite(cfg.generator, cfg.vertex, cfg.gamma, scfg)
        op = "jwc_suite"
    d = rep.to_dict()
    tables = {f"probe_{k}": v.table() for k, v in rep.hypotheses.items()}
    witnesses = [w for h in rep.hypotheses.values() for w in h.witnesses]
    params = {"gamma": rep.gamma, "beta": rep.beta, "suite": scfg.to_dict()}
    if rep.declined:
        print(f"declined: {rep.declined}")
    for name, item in rep.items.items():
        print(f"({name}) {'pass' if item.passed else 'FAIL'} value={item.value}")
    paths = _report(cfg, op, params, d, rep.verdicts(), witnesses, tables)
    return rep.passed, paths


def _run_dilation(cfg: RunConfig):
    G, p = cfg.generator, cfg.vertex
    radial = ba.radial_vanishing(G, p)
    est = ba.dilation_estimate(G, p)
    sup, where = ba.dilation_sup(G, p, cfg.extra["samples"], cfg.seed, return_witness=True)
    beta = est.extrapolated.real if est.converged else None
    verdicts = {
        "null_point": ba.is_null_point(radial),
        "dilation_converged": est.converged,
        "sup_consistent": beta is not None and beta - 0.05 <= sup <= beta + 1e-3,
    }
    print(f"beta = {beta}  (2 sup = {sup:.6g})")
    for k, v in verdicts.items():
        print(f"{k}: {'pass' if v else 'FAIL'}")
    params = {"beta": beta, "dilation_sup": sup, "notes": est.notes + radial.notes}
    samples = {"dilation": est.to_dict(), "radial": radial.to_dict()}
    witnesses = [{"sup_at": [[float(c.real), float(c.imag)] for c in where]}]
    paths = _report(cfg, "dilation", params, samples, verdicts, witnesses,
                    {"dilation": est.table(), "radial": radial.table()})
    return all(verdicts.values()), paths


def _run_flow(cfg: RunConfig):
    T = cfg.extra["T"]
    z0 = np.array([complex(*c) for c in cfg.extra["z0_resolved"]])
    times = np.linspace(0.0, T, cfg.extra["points"])
    traj = integrate(cfg.generator, z0, T, cfg.tol, t_eval=times)
    inside = bool(np.all(np.linalg.norm(traj.points, axis=1) < 1))
    final = traj.final
    print("final = " + ", ".join(f"{c.real:.12g}{c.imag:+.12g}j" for c in final))
    rows = traj.rows(cfg.vertex)
    params = {"final": final, "stats": traj.stats(), "min_1-|z|": float(np.min(traj.one_minus_norm))}
    paths = _report(cfg, "flow", params, rows, {"completed": True, "inside_ball": inside}, [],
                    {"trajectory": rows})
    return inside, paths


def _run_holder(cfg: RunConfig):
    rep = ba.holder_exponent(cfg.generator, cfg.vertex)
    print(f"{rep.verdict}: alpha = {rep.alpha_fit}, beta = {rep.beta}")
    paths = _report(cfg, "holder_exponent", rep.to_dict(), [], {"holder": rep.verdict}, [], {})
    return rep.positive, paths


def _run_julia(cfg: RunConfig):
    G, p = cfg.generator, cfg.vertex
    rate = cfg.extra["rate"]
    if rate is None:
        est = ba.dilation_estimate(G, p)
        if not est.converged:
            raise FlowError("no dilation to derive the default rate from", 0.0)
        rate = est.extrapolated.real + 1e-6
    starts = sobol_ball(G.dim, cfg.extra["starts"], cfg.seed, radius=0.95)
    rep = julia_invariant_check(G, p, rate, starts, cfg.extra["times"], tol=cfg.tol)
    print(f"rate {rate}: max excess {rep.max_excess:.3g}, {'holds' if rep.holds else 'VIOLATED'}")
    paths = _report(cfg, "julia_invariant_check", {"gamma_rate": rate, "max_excess": rep.max_excess},
                    {"checked": rep.checked}, {"holds": rep.holds}, rep.witnesses[:50],
                    {"witnesses": rep.witnesses})
    return rep.holds, paths


def _run_classify(cfg: RunConfig):
    curve = _curve_from_spec(cfg.extra["curve"], cfg.vertex)
    res = classify(curve)
    print(f"{curve.name}: {res.verdict}, limit {res.limit}, restriction bound {res.restriction_bound:.6g}")
    est = res.estimate
    paths = _report(cfg, "classify", res.to_dict(), est.to_dict(), {"special": res.verdict}, [],
                    {"quotient": est.table()})
    return res.verdict != "indeterminate", paths


def run(cfg: RunConfig) -> int:
    dispatch = {
        "jwc": lambda: _run_jwc(cfg, False),
        "jwc-half": lambda: _run_jwc(cfg, True),
        "dilation": lambda: _run_dilation(cfg),
        "flow": lambda: _run_flow(cfg),
        "holder": lambda: _run_holder(cfg),
        "julia": lambda: _run_julia(cfg),
        "classify": lambda: _run_classify(cfg),
    }
    try:
        ok, paths = dispatch[cfg.command]()
    except (FlowError, DomainError, FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for path in paths:
        print(f"wrote {path}")
    return 0 if ok else 1


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    hilmod kernel eval      --family bergman --z 0.5 --w 0.5
    hilmod curvature line   --family hardy --omega 0
    hilmod curvature bundle --family bergman --m 2 --omega 0.3
    hilmod shift analyze    --family bergman --m 2 --k 0 --length 8
    hilmod shift similar    --source '{"kind":"bergman-power","m":1,"k":0}' \\
                            --target '{"kind":"bergman-power","m":2,"k":0}'
    hilmod reduce           --family bergman --m 2 --at 0 --format json
    hilmod localize dim     --space hardy-bidisk --vanish-at-origin --k 1
    hilmod hs fit           --space hardy-bidisk --k-max 8
    hilmod charfn           --matrix T.json --z 0.5
    hilmod ratio            --alpha 0 --beta 1 --omega 0.6

Exit codes: 0 success, 2 usage error, 3 numerical/truncation error,
4 indeterminate verdict.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import HilmodError, InconclusiveFitError
from .geometry import (
    LatticeVerdict,
    bundle_curvature,
    line_curvature,
    metric_h,
    power_frame,
    reducing_curvatures,
)
from .kernels import KernelSpec, kernel_eval
from .localization import hilbert_samuel, polynomial_module, quotient_dim, vanishing_submodule
from .metric import RadialMetric
from .model import char_function, load_matrix, quasi_similarity_ratio
from .shifts import Verdict, WeightedShift, restriction_shift, shift_kernel_metric, unitarily_equivalent

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INDETERMINATE = 0, 2, 3, 4

DEFAULTS = {
    "format": "csv",
    "output": None,
    "precision": 12,
    "margin": 1e-3,
    "terms": 200,
    "fd_step": 1e-3,
    "tol": 1e-10,
    "workers": 1,
    "family": "bergman",
    "alpha": 0.0,
    "n": 1,
    "moments": None,
    "m": 2,
    "k": 0,
    "length": 16,
    "omega": None,
    "grid": None,
    "resolution": 11,
    "radius": 0.5,
    "method": "series",
    "z": None,
    "w": None,
    "rule": None,
    "weights_csv": None,
    "source": None,
    "target": None,
    "depth": 512,
    "at": "0",
    "space": "hardy",
    "vanish_at_origin": False,
    "degree": None,
    "multiplicity": 1,
    "k_max": 8,
    "matrix": None,
    "variant": "standard",
    "beta": 1.0,
    "config": None,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        o = self.options
        if not 0 < o["margin"] < 0.5:
            raise UsageError("--margin must lie in (0, 0.5)")
        if not 6 <= o["precision"] <= 17:
            raise UsageError("--precision must lie in [6, 17]")
        if o["resolution"] < 1:
            raise UsageError("--resolution must be positive")
        if o["grid"] == "box" and o["resolution"] ** 2 > 10_000 or o["resolution"] > 10_000:
            raise UsageError("grid resolution exceeds 10^4 points")
        if o["format"] not in ("csv", "json"):
            raise UsageError("--format must be csv or json")

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None


# formatting --------------------------------------------------------------

def _num(x, p):
    return float(f"{float(x):.{p}g}")


def _fmt(x, p):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{p}g}"


def _round_tree(obj, p):
    if isinstance(obj, dict):
        return {k: _round_tree(v, p) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v, p) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj, p)
    return obj


def render(cfg: RunConfig, header, rows, payload) -> str:
    p = cfg.precision
    if cfg.format == "json":
        return json.dumps(_round_tree(payload, p), sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v, p) for v in row])
    return buf.getvalue()


def write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hilmod-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# argument helpers ----------------------------------------------------------

def _complex_tuple(text) -> tuple:
    if isinstance(text, (int, float, complex)):
        return (complex(text),)
    if isinstance(text, (list, tuple)):
        return tuple(complex(str(t).replace(" ", "")) for t in text)
    return tuple(complex(part.strip().replace(" ", "")) for part in str(text).split(","))


def _spec(cfg: RunConfig) -> KernelSpec:
    fam = cfg.family
    if cfg.moments:
        return KernelSpec.from_json(cfg.moments)
    if fam == "hardy":
        return KernelSpec.hardy()
    if fam == "bergman":
        return KernelSpec.bergman(cfg.alpha)
    if fam == "drury-arveson":
        return KernelSpec.drury_arveson(cfg.n)
    if fam == "hardy-polydisk":
        return KernelSpec.hardy_polydisk(cfg.n)
    if fam == "custom":
        raise UsageError("--family custom needs --moments FILE")
    raise UsageError(f"unknown family {fam!r}")


def _points(cfg: RunConfig) -> list:
    if cfg.omega is not None and cfg.grid is None:
        return [complex(o) for o in _complex_tuple(cfg.omega)]
    grid = cfg.grid or "radial"
    R, n = cfg.radius, cfg.resolution
    if grid == "radial":
        return [complex(t) for t in np.linspace(0.0, R, n)]
    if grid == "box":
        xs = np.linspace(-R, R, n)
        return [complex(x, y) for y in xs for x in xs if abs(complex(x, y)) <= R]
    raise UsageError(f"unknown grid {grid!r}")


def _map(cfg: RunConfig, fn, items):
    if cfg.workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(fn, items))  # map keeps grid order
    return [fn(x) for x in items]


def _load_shift(text) -> WeightedShift:
    text = str(text)
    if text.lstrip().startswith("{"):
        return WeightedShift.from_json(text)
    with open(text) as fh:
        body = fh.read()
    if text.endswith(".csv"):
        return WeightedShift.from_csv(body)
    return WeightedShift.from_json(body)


def _module(cfg: RunConfig, degree: int):
    space = cfg.space
    if space == "hardy":
        spec = KernelSpec.hardy()
    elif space == "bergman":
        spec = KernelSpec.bergman(cfg.alpha)
    elif space == "hardy-bidisk":
        spec = KernelSpec.hardy_polydisk(2)
    elif space == "hardy-polydisk":
        spec = KernelSpec.hardy_polydisk(cfg.n)
    elif space == "drury-arveson":
        spec = KernelSpec.drury_arveson(cfg.n)
    else:
        raise UsageError(f"unknown space {space!r}")
    if cfg.vanish_at_origin:
        mod = vanishing_submodule(spec, spec.variables, degree)
    else:
        mod = polynomial_module(spec, degree)
    if cfg.multiplicity > 1:
        mod = mod.with_multiplicity(cfg.multiplicity)
    return mod


# commands ------------------------------------------------------------------

def cmd_kernel_eval(cfg):
    spec = _spec(cfg)
    if cfg.z is None or cfg.w is None:
        raise UsageError("kernel eval needs --z and --w")
    z, w = _complex_tuple(cfg.z), _complex_tuple(cfg.w)
    v = kernel_eval(spec, z, w, terms=None, margin=cfg.margin)
    payload = {"z": [[c.real, c.imag] for c in z], "w": [[c.real, c.imag] for c in w], "value": [v.real, v.imag]}
    return render(cfg, ["re", "im"], [[v.real, v.imag]], payload), EXIT_OK


def _line_metric(cfg):
    spec = _spec(cfg)
    if spec.variables != 1:
        raise UsageError("curvature line needs a one-variable family")
    return RadialMetric.from_kernel(spec, max(cfg.terms, 2))


def cmd_curvature_line(cfg):
    g = _line_metric(cfg)
    pts = _points(cfg)

    def one(om):
        K = line_curvature(g, om, cfg.method, step=cfg.fd_step, margin=cfg.margin)
        h = metric_h(g, om, "closed" if cfg.method == "closed" else "series", margin=cfg.margin) if K < 0 else float("nan")
        return om, K, h

    res = _map(cfg, one, pts)
    rows = [[om.real, om.imag, K, h] for om, K, h in res]
    payload = [{"omega": [om.real, om.imag], "curvature": K, "h": h} for om, K, h in res]
    if len(payload) == 1:
        payload = payload[0]
    return render(cfg, ["re", "im", "curvature", "h"], rows, payload), EXIT_OK


def cmd_curvature_bundle(cfg):
    spec = _spec(cfg)
    frame = power_frame(spec, cfg.m, cfg.terms)
    pts = _points(cfg)
    method = {"closed": "series"}.get(cfg.method, cfg.method)
    reports = _map(cfg, lambda om: bundle_curvature(frame, om, method, step=cfg.fd_step, margin=cfg.margin), pts)
    header = ["re", "im"] + [f"eig_{i}" for i in range(cfg.m)]
    rows = [[r.omega.real, r.omega.imag, *r.eigenvalues] for r in reports]
    payload = [r.to_json() for r in reports]
    if len(payload) == 1:
        payload = payload[0]
    return render(cfg, header, rows, payload), EXIT_OK


def _analyzed_shift(cfg):
    if cfg.rule is not None:
        return _load_shift(cfg.rule)
    if cfg.weights_csv is not None:
        return _load_shift(cfg.weights_csv)
    return restriction_shift(_spec(cfg), cfg.m, cfg.k, max(cfg.length, 1))


def cmd_shift_analyze(cfg):
    s = _analyzed_shift(cfg)
    L = s.available(cfg.length)
    w, b = s.weights(L), s.betas(L)
    a = 1.0 / b**2
    rows = [[l, w[l], b[l], a[l]] for l in range(L)]
    payload = {"rule": s.to_json(), "weights": list(w), "betas": list(b), "metric": list(a)}
    return render(cfg, ["index", "weight", "beta", "metric_coeff"], rows, payload), EXIT_OK


def cmd_shift_similar(cfg):
    if cfg.source is None or cfg.target is None:
        raise UsageError("shift similar needs --source and --target")
    v = unitarily_equivalent(_load_shift(cfg.source), _load_shift(cfg.target), cfg.depth, cfg.tol)
    rows = [[l, c] for l, c in enumerate(v.coefficients)]
    code = EXIT_INDETERMINATE if v.verdict is Verdict.INCONCLUSIVE else EXIT_OK
    return render(cfg, ["index", "c"], rows, v.to_json()), code


def cmd_reduce(cfg):
    spec = _spec(cfg)
    (at,) = _complex_tuple(cfg.at)
    rc = reducing_curvatures(spec, cfg.m, at, terms=cfg.terms)
    rows = [[k, v] for k, v in enumerate(rc.values)]
    code = EXIT_INDETERMINATE if rc.verdict is LatticeVerdict.INDETERMINATE else EXIT_OK
    return render(cfg, ["k", "curvature"], rows, rc.to_json()), code


def cmd_localize_dim(cfg):
    degree = cfg.degree if cfg.degree is not None else cfg.k + 2
    mod = _module(cfg, degree)
    omega = (0j,) if cfg.omega is None else _complex_tuple(cfg.omega)
    exact = all(o == 0 for o in omega)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = quotient_dim(mod, omega if len(omega) > 1 else omega[0], cfg.k)
    payload = {"k": cfg.k, "dim": d, "exact": exact}
    return render(cfg, ["k", "dim"], [[cfg.k, d]], payload), EXIT_OK


def cmd_hs_fit(cfg):
    degree = cfg.degree if cfg.degree is not None else cfg.k_max + 2
    mod = _module(cfg, degree)
    fit = hilbert_samuel(mod, 0, cfg.k_max)
    rows = [[k, d] for k, d in enumerate(fit.dims, start=1)]
    return render(cfg, ["k", "dim"], rows, fit.to_json()), EXIT_OK


def cmd_charfn(cfg):
    if cfg.matrix is None:
        raise UsageError("charfn needs --matrix (JSON file or inline JSON)")
    T = load_matrix(cfg.matrix)
    pts = [complex(z) for z in _complex_tuple(cfg.z)] if cfg.z is not None else _points(cfg)
    samples = _map(cfg, lambda z: char_function(T, z, cfg.variant), pts)
    r = samples[0].theta.shape[1] if samples else 0
    header = ["re_z", "im_z"] + [f"sv_{i + 1}" for i in range(min(samples[0].theta.shape))] + ["abs_det"]
    rows, payload = [], []
    for s in samples:
        sv = list(s.singular_values)
        det = s.abs_det if s.theta.shape[0] == s.theta.shape[1] else float("nan")
        rows.append([s.z.real, s.z.imag, *sv, det])
        payload.append({"z": [s.z.real, s.z.imag], "singular_values": sv, "abs_det": det,
                        "theta": [[[v.real, v.imag] for v in row] for row in s.theta]})
    del r
    return render(cfg, header, rows, payload), EXIT_OK


def cmd_ratio(cfg):
    pts = _points(cfg) if cfg.omega is not None or cfg.grid else [0j]
    res = [(om, *quasi_similarity_ratio(cfg.alpha, cfg.beta, om, cfg.margin)) for om in pts]
    rows = [[om.real, om.imag, ratio, v.value] for om, ratio, v in res]
    payload = [{"omega": [om.real, om.imag], "ratio": ratio, "verdict": v.value} for om, ratio, v in res]
    if len(payload) == 1:
        payload = payload[0]
    return render(cfg, ["re", "im", "ratio", "verdict"], rows, payload), EXIT_OK


# parser ------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    g = common.add_argument_group("output and numerics")
    g.add_argument("--format", choices=["csv", "json"])
    g.add_argument("--output", "-o", help="write atomically to this path instead of stdout")
    g.add_argument("--precision", type=int, help="significant digits (default 12)")
    g.add_argument("--config", help="JSON file mirroring the flags; flags win")
    g.add_argument("--margin", type=float, help="domain margin delta")
    g.add_argument("--terms", type=int)
    g.add_argument("--fd-step", type=float)
    g.add_argument("--tol", type=float)
    g.add_argument("--workers", type=int)

    fam = argparse.ArgumentParser(add_help=False, argument_default=S)
    fam.add_argument("--family", choices=["hardy", "bergman", "drury-arveson", "hardy-polydisk", "custom"])
    fam.add_argument("--alpha", type=float)
    fam.add_argument("--n", type=int)
    fam.add_argument("--moments", help="custom moment table (JSON)")

    grid = argparse.ArgumentParser(add_help=False, argument_default=S)
    grid.add_argument("--omega", help="point, or comma-separated points for sweeps")
    grid.add_argument("--grid", choices=["radial", "box"])
    grid.add_argument("--resolution", type=int)
    grid.add_argument("--radius", type=float)

    module = argparse.ArgumentParser(add_help=False, argument_default=S)
    module.add_argument("--space", choices=["hardy", "bergman", "hardy-bidisk", "hardy-polydisk", "drury-arveson"])
    module.add_argument("--n", type=int)
    module.add_argument("--alpha", type=float)
    module.add_argument("--vanish-at-origin", action="store_true")
    module.add_argument("--degree", type=int, help="truncation degree D")
    module.add_argument("--multiplicity", type=int)

    p = argparse.ArgumentParser(prog="hilmod", description="Invariants of kernel Hilbert modules.")
    sub = p.add_subparsers(dest="command", required=True)

    def leaf(parent, name, fn, parents, help_):
        q = parent.add_parser(name, parents=[common, *parents], help=help_, argument_default=S)
        q.set_defaults(handler=fn)
        return q

    kernel = sub.add_parser("kernel", help="reproducing kernels").add_subparsers(dest="sub", required=True)
    q = leaf(kernel, "eval", cmd_kernel_eval, [fam], "evaluate K(z, w)")
    q.add_argument("--z")
    q.add_argument("--w")

    curv = sub.add_parser("curvature", help="curvature invariants").add_subparsers(dest="sub", required=True)
    q = leaf(curv, "line", cmd_curvature_line, [fam, grid], "line-bundle curvature and h")
    q.add_argument("--method", choices=["series", "fd", "closed"])
    q = leaf(curv, "bundle", cmd_curvature_bundle, [fam, grid], "curvature matrix of the M_{z^m} frame")
    q.add_argument("--m", type=int)
    q.add_argument("--method", choices=["series", "fd", "auto"])

    shift = sub.add_parser("shift", help="weighted shifts").add_subparsers(dest="sub", required=True)
    q = leaf(shift, "analyze", cmd_shift_analyze, [fam], "weights, betas and metric of a shift")
    q.add_argument("--m", type=int)
    q.add_argument("--k", type=int)
    q.add_argument("--length", type=int)
    q.add_argument("--rule", help="JSON rule descriptor (inline or file)")
    q.add_argument("--weights-csv", help="CSV weight table (index, weight)")
    q = leaf(shift, "similar", cmd_shift_similar, [], "unitary equivalence / similarity")
    q.add_argument("--source")
    q.add_argument("--target")
    q.add_argument("--depth", type=int)

    q = sub.add_parser("reduce", parents=[common, fam], help="curvatures of the L_{m,k} lines", argument_default=S)
    q.set_defaults(handler=cmd_reduce)
    q.add_argument("--m", type=int)
    q.add_argument("--at")

    loc = sub.add_parser("localize", help="localization").add_subparsers(dest="sub", required=True)
    q = leaf(loc, "dim", cmd_localize_dim, [module], "dim M / [I_omega^k M]")
    q.add_argument("--k", type=int)
    q.add_argument("--omega")

    hs = sub.add_parser("hs", help="Hilbert-Samuel polynomial").add_subparsers(dest="sub", required=True)
    q = leaf(hs, "fit", cmd_hs_fit, [module], "fit the Hilbert-Samuel polynomial")
    q.add_argument("--k-max", type=int)

    q = sub.add_parser("charfn", parents=[common, grid], help="characteristic function samples", argument_default=S)
    q.set_defaults(handler=cmd_charfn)
    q.add_argument("--matrix")
    q.add_argument("--z")
    q.add_argument("--variant", choices=["standard", "printed"])

    q = sub.add_parser("ratio", parents=[common, grid], help="weighted Bergman norm-ratio obstruction", argument_default=S)
    q.set_defaults(handler=cmd_ratio)
    q.add_argument("--alpha", type=float)
    q.add_argument("--beta", type=float)
    return p


def _normalize_keys(d: dict) -> dict:
    return {k.replace("-", "_"): v for k, v in d.items()}


def build_config(argv) -> tuple:
    ns = _parser().parse_args(argv)
    given = vars(ns)
    handler = given.pop("handler")
    command = " ".join(x for x in (given.pop("command", None), given.pop("sub", None)) if x)
    opts = dict(DEFAULTS)
    env = os.environ.get("HILMOD_PRECISION")
    if env:
        try:
            opts["precision"] = int(env)
        except ValueError:
            raise UsageError(f"HILMOD_PRECISION={env!r} is not an integer") from None
    if given.get("config"):
        try:
            with open(given["config"]) as fh:
                file_opts = _normalize_keys(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        unknown = set(file_opts) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        opts.update(file_opts)
    opts.update(given)
    return handler, RunConfig(command, opts)


def run(argv=None) -> int:
    """Execute one command; returns the process exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        handler, cfg = build_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except UsageError as exc:
        print(f"hilmod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        text, code = handler(cfg)
    except UsageError as exc:
        print(f"hilmod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconclusiveFitError as exc:
        print(f"hilmod: indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except HilmodError as exc:
        print(f"hilmod: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"hilmod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_output(text, cfg.output)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line driver: sample ensembles, compute limit laws, verify.

Every output file starts with comment lines echoing the tool version and
the full effective configuration, and contains no timestamps, so a rerun
with the same flags reproduces it byte for byte.  Exit codes: 0 success,
2 configuration error, 3 numerical failure.
"""

import argparse
import concurrent.futures
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__, linalg
from .brown_girko import (
    BumpSpec,
    brown_from_potential,
    exceptional_distance,
    girko_identity_check,
    radial_symmetry_check,
)
from ._svg import write_line_svg
from .closed_forms import abs_sd_measure, brown_density_h_d
from .ensembles import EnsembleSpec, sample_sum
from .measures import esd_from_reals, ks_distance, symmetrize
from .linalg import ConvergenceError
from .ortho_weyl import ortho_limit_check
from .schwinger_dyson import FixedPointError, invert_to_density, theta_recursion
from .singular_stats import AtomicDiagSpec, good_event_frequency, single_ring_demo

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


def _pmap(fn, items, threads):
    """Order-preserving parallel map; results independent of thread count."""
    if threads <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _header_lines(config):
    d = dataclasses.asdict(config) if dataclasses.is_dataclass(config) else dict(config)
    d.pop("out", None)  # the file knows where it lives; keep reruns
    payload = json.dumps(d, sort_keys=True)  # byte-identical across directories
    return (f"haarsum {__version__}", f"config: {payload}")


def _write_csv(path, header_lines, columns, rows):
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Effective parameters of one CLI invocation, echoed into outputs."""

    command: str
    dim: int = 0
    summands: int = 0
    unitary_count: int = 0
    shift_re: float = 0.0
    shift_im: float = 0.0
    seed: int = 0
    replicas: int = 1
    grid: int = 0
    eta: float = 1e-3
    tol: float = 1e-10
    h_step: float = 0.0
    strict: bool = False
    threads: int = 1
    plot: bool = False
    out: str = ""


def _ensemble_from(cfg):
    try:
        return EnsembleSpec(n=cfg.dim, d=cfg.summands, d_prime=cfg.unitary_count,
                            seed=cfg.seed)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def cmd_sample_esd(cfg):
    spec = _ensemble_from(cfg)
    v = complex(cfg.shift_re, cfg.shift_im)
    os.makedirs(cfg.out, exist_ok=True)
    header = _header_lines(cfg)

    def one(k):
        s = sample_sum(spec, replica=k)
        sv = linalg.singular_values(s - v * np.eye(spec.n))
        eig = linalg.general_eigenvalues(s)
        return sv, eig

    results = _pmap(one, range(cfg.replicas), cfg.threads)
    sv = np.sort(np.concatenate([r[0] for r in results]))
    eig = np.concatenate([r[1] for r in results])
    emp = esd_from_reals(sv)
    _write_csv(os.path.join(cfg.out, "singular_values.csv"), header,
               ("x", "cdf"), zip(sv, emp.cdf(sv)))
    _write_csv(os.path.join(cfg.out, "eigenvalues.csv"), header,
               ("re", "im"), zip(eig.real, eig.imag))
    if spec.d >= 2 and v == 0:
        ks = ks_distance(emp, abs_sd_measure(spec.d))
        print(f"ks_vs_limit_density: {ks:.4f}")
    if cfg.plot:
        write_line_svg(os.path.join(cfg.out, "singular_cdf.svg"), sv,
                       [emp.cdf(sv)], labels=("empirical cdf",),
                       title=f"singular values, n={spec.n} d={spec.d}")
    print(f"wrote {cfg.out}/singular_values.csv and {cfg.out}/eigenvalues.csv")
    return EXIT_OK


def cmd_limit_density(cfg):
    if cfg.summands < 1:
        raise ConfigError("need --summands >= 1")
    if cfg.grid < 16:
        raise ConfigError("need --grid >= 16 points")
    v = complex(cfg.shift_re, cfg.shift_im)
    d, r = cfg.summands, abs(v)
    span = d + r + 0.5
    grid = np.linspace(-span, span, cfg.grid)
    from .schwinger_dyson import SubordinationParams
    params = SubordinationParams(tol=cfg.tol)
    m = invert_to_density(theta_recursion(d, v, params=params), grid,
                          eta=cfg.eta, strict=cfg.strict)
    rows = zip(m.grid, m.values)
    _write_csv(cfg.out, _header_lines(cfg), ("x", "density"), rows)
    if cfg.plot:
        write_line_svg(cfg.out + ".svg", m.grid, [m.values], labels=("density",),
                       title=f"limiting singular density, d={d}")
    print(f"wrote {cfg.out} (renormalization factor {m.renorm_factor:.6f})")
    return EXIT_OK


def cmd_brown(cfg):
    d = cfg.summands
    if d < 2:
        raise ConfigError("planar reconstruction needs --summands >= 2")
    if cfg.grid < 5:
        raise ConfigError("need --grid >= 5 radii")
    h = cfg.h_step if cfg.h_step > 0 else 0.02 * math.sqrt(d)
    lo, hi = 0.1 * math.sqrt(d), 0.9 * math.sqrt(d)
    radii = np.array([r for r in np.linspace(lo, hi, cfg.grid)
                      if exceptional_distance(d, r) >= 0.05 + 2 * h + 1e-9])
    if len(radii) < 5:
        raise ConfigError("grid leaves fewer than 5 radii clear of exceptional points")
    prof = brown_from_potential(d, radii, h_step=h)
    ref = brown_density_h_d(d, prof.r_grid)
    rel = np.abs(prof.values - ref) / ref
    _write_csv(cfg.out, _header_lines(cfg),
               ("r", "potential", "density", "h_d_reference", "rel_error"),
               zip(prof.r_grid, prof.potential, prof.values, ref, rel))
    if cfg.plot:
        write_line_svg(cfg.out + ".svg", prof.r_grid, [prof.values, ref],
                       labels=("reconstructed", "reference"),
                       title=f"planar radial density, d={d}")
    print(f"wrote {cfg.out} (median rel error {np.median(rel):.4f})")
    return EXIT_OK


def cmd_verify(cfg):
    failures = []
    rows = []

    def check(name, value, ok):
        rows.append((name, value, ok))
        if not ok:
            failures.append(name)

    s = sample_sum(EnsembleSpec(n=8, d=2, d_prime=2, seed=cfg.seed))
    rep = girko_identity_check(s, BumpSpec(center=0.0, radius=3.0), quad_n=120)
    check("girko_identity_gap<=1e-2", f"{rep.gap:.2e}", rep.gap <= 1e-2)

    orep = ortho_limit_check(0.5, 0.4 + 0.3j, n_list=(11, 31, 101))
    check("ortho_gaps_decreasing", "/".join(f"{g:.4f}" for g in orep.gaps),
          orep.decreasing and orep.gaps[-1] <= 0.02)

    dev = radial_symmetry_check(2, 0.7, k_directions=8)
    check("radial_symmetry<=2e-3", f"{dev:.2e}", dev <= 2e-3)

    freq = good_event_frequency(EnsembleSpec(n=128, d=2, d_prime=0, seed=cfg.seed),
                                reps=100)
    check("good_event_frequency>=0.95", f"{freq:.3f}", freq >= 0.95)

    width = max(len(r[0]) for r in rows)
    for name, value, ok in rows:
        print(f"{name:<{width}}  {value:>24}  {'PASS' if ok else 'FAIL'}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            for line in _header_lines(cfg):
                fh.write(f"# {line}\n")
            fh.write("check,value,status\n")
            for name, value, ok in rows:
                fh.write(f"{name},{value},{'PASS' if ok else 'FAIL'}\n")
    return EXIT_NUMERICAL if failures else EXIT_OK


def cmd_single_ring(cfg):
    spec = AtomicDiagSpec(atoms=((0.5, 0.5), (2.0, 0.5)), n=cfg.dim or 256)
    rep = single_ring_demo(spec, reps=cfg.replicas, seed=cfg.seed)
    print(f"quantile_01 {rep.quantile_01:.4f}")
    print(f"quantile_99 {rep.quantile_99:.4f}")
    print(f"ks_window {rep.ks_window:.4f}")
    if cfg.out:
        import hashlib
        key = hashlib.sha256(
            repr((spec.atoms, spec.n, cfg.seed)).encode()).hexdigest()[:16]
        header = _header_lines(cfg) + (f"report key: {key}",)
        _write_csv(cfg.out, header, ("r", "radial_density"),
                   zip(rep.r_grid, rep.radial_density))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="haarsum",
        description="Spectral laws of sums of Haar unitary/orthogonal matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, dim=False, ensemble=False, shift=False, grid=None,
                   out_file=False, out_dir=False, replicas=None, h_step=False):
        if dim or ensemble:
            p.add_argument("--dim", type=int, default=64, help="matrix dimension n")
        if ensemble:
            p.add_argument("--summands", type=int, default=2, help="total summand count d")
            p.add_argument("--unitary-count", type=int, default=None,
                           help="unitary summands d' (default: all)")
        elif shift or grid is not None:
            p.add_argument("--summands", type=int, default=2, help="summand count d")
        if shift:
            p.add_argument("--shift-re", type=float, default=0.0, help="Re of shift v")
            p.add_argument("--shift-im", type=float, default=0.0, help="Im of shift v")
        if grid is not None:
            p.add_argument("--grid", type=int, default=grid, help="grid size")
        if replicas is not None:
            p.add_argument("--replicas", type=int, default=replicas,
                           help="Monte Carlo replicas")
        if h_step:
            p.add_argument("--h-step", type=float, default=0.0,
                           help="finite difference step (default 0.02 sqrt d)")
        if out_file:
            p.add_argument("--out", required=True, help="output CSV path")
        if out_dir:
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="reproducibility seed")
        p.add_argument("--eta", type=float, default=1e-3, help="inversion depth")
        p.add_argument("--tol", type=float, default=1e-10, help="fixed point tolerance")
        p.add_argument("--strict", action="store_true",
                       help="escalate numerical warnings to failures")
        p.add_argument("--threads", type=int, default=1, help="worker thread cap")
        p.add_argument("--plot", action="store_true",
                       help="also render an SVG line plot next to the CSV")

    p = sub.add_parser("sample-esd", help="Monte Carlo singular/planar spectra")
    add_common(p, ensemble=True, shift=True, replicas=1, out_dir=True)

    p = sub.add_parser("limit-density", help="analytic limiting singular density")
    add_common(p, shift=True, grid=3000, out_file=True)

    p = sub.add_parser("brown", help="reconstruct the planar radial density")
    add_common(p, grid=40, out_file=True, h_step=True)

    p = sub.add_parser("verify", help="run the cross-route verification table")
    add_common(p)
    p.add_argument("--out", default="", help="optional CSV copy of the table")

    p = sub.add_parser("single-ring", help="planar demo for unitary times diagonal")
    add_common(p, dim=True, replicas=8)
    p.add_argument("--out", default="", help="optional radial density CSV")
    return parser


def _config_from(args):
    d = vars(args).copy()
    command = d.pop("command")
    if "unitary_count" in d and d["unitary_count"] is None:
        d["unitary_count"] = d.get("summands", 0)
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    return RunConfig(command=command, **{k: v for k, v in d.items() if k in fields})


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from(args)
    handlers = {
        "sample-esd": cmd_sample_esd,
        "limit-density": cmd_limit_density,
        "brown": cmd_brown,
        "verify": cmd_verify,
        "single-ring": cmd_single_ring,
    }
    try:
        return handlers[cfg.command](cfg)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (FixedPointError, ConvergenceError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

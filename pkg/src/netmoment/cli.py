"""Command-line interface: reproducible synth / estimate / sweep runs.

Every command is deterministic given its flags (seeds included); outputs are
CSV or JSON with full float round-trip precision.  Exit codes: 0 success,
1 configuration error, 2 numerical-domain error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .estimate import (EstimatorSpec, GridParams, all_specs, estimate_moment,
                       sweep)
from .field import asympt_condition_margin
from .noise import NoiseSpec, add_noise, detrend_backward
from .quad import build_grid, read_field_csv, sample_field, write_field_csv
from .scene import SceneError, load_scene, net_moment
from .specfun import (DomainError, TailIntegralKind, bessel_j0, bessel_j1,
                      sin_cos_components, sin_cos_components_quadrature,
                      sin_cos_taylor, tail_integral, tail_integral_quadrature,
                      tail_recursion_rhs)

__all__ = ["main"]


class ConfigError(ValueError):
    """Bad command-line configuration."""


def _thread_cap() -> int:
    raw = os.environ.get("NETMOMENT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"NETMOMENT_THREADS must be an integer, got {raw!r}")


def _radii_from_args(args) -> list[float]:
    if args.radius is not None:
        return [args.radius]
    if None in (args.radius_min, args.radius_max, args.radius_count):
        raise ConfigError("provide --radius or all of --radius-min/--radius-max/--radius-count")
    if args.radius_min <= 0 or args.radius_max <= args.radius_min or args.radius_count < 2:
        raise ConfigError("radius range must be positive, increasing, with count >= 2")
    if args.log_spacing:
        return list(np.geomspace(args.radius_min, args.radius_max, args.radius_count))
    return list(np.linspace(args.radius_min, args.radius_max, args.radius_count))


def _parse_specs(raw: Optional[Sequence[str]]) -> list[EstimatorSpec]:
    if not raw:
        return all_specs()
    try:
        return [EstimatorSpec.parse(s) for s in raw]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _noise_from_args(args) -> Optional[NoiseSpec]:
    if args.snr_db is None:
        return None
    return NoiseSpec(snr_db=args.snr_db, seed=args.seed,
                     weighted_variance=not args.plain_variance)


def cmd_synth(args) -> int:
    scene = load_scene(args.scene)
    if args.radius is None:
        raise ConfigError("synth needs --radius")
    grid = build_grid(args.radius, args.n_radial, args.n_angular)
    fmap = sample_field(scene, grid)
    noise = _noise_from_args(args)
    if noise is not None:
        fmap = add_noise(fmap, noise)
    write_field_csv(fmap, args.out)
    print(f"wrote {len(fmap.samples)} samples to {args.out}")
    return 0


def cmd_estimate(args) -> int:
    specs = _parse_specs(args.spec)
    scene = load_scene(args.scene) if args.scene else None
    if args.field_csv:
        fmap = read_field_csv(args.field_csv)
    elif scene is not None:
        if args.radius is None:
            raise ConfigError("estimate from a scene needs --radius")
        fmap = sample_field(scene, build_grid(args.radius, args.n_radial, args.n_angular))
        noise = _noise_from_args(args)
        if noise is not None:
            fmap = add_noise(fmap, noise)
    else:
        raise ConfigError("estimate needs --scene or --field-csv")
    report = {"radius": fmap.radius, "estimates": []}
    truth = net_moment(scene) if scene is not None else None
    if scene is not None:
        margin = asympt_condition_margin(scene, fmap.radius)
        report["condition_margin"] = margin
        report["condition_ok"] = bool(margin < 1.0)
        if margin >= 1.0:
            print(f"warning: asymptotic condition margin {margin:.3f} >= 1", file=sys.stderr)
        report["net_moment_true"] = list(truth.as_array())
    for spec in specs:
        entry = {
            "component": spec.component,
            "order": spec.order,
            "axis": spec.axis if (spec.component == "m3" and spec.order >= 3) else None,
            "estimate": estimate_moment(fmap, spec),
        }
        if truth is not None:
            idx = {"m1": 0, "m2": 1, "m3": 2}[spec.component]
            entry["true_value"] = truth[idx]
        report["estimates"].append(entry)
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_sweep(args) -> int:
    scene = load_scene(args.scene)
    radii = _radii_from_args(args)
    specs = _parse_specs(args.spec)
    result = sweep(scene, radii, specs, GridParams(args.n_radial, args.n_angular),
                   noise=_noise_from_args(args), max_workers=_thread_cap())
    detrended = {}
    if args.detrend_window is not None:
        for spec in specs:
            if spec.component != "m3":
                continue
            series = [(r.radius, r.estimate) for r in result.for_spec(spec)]
            if len(series) >= args.detrend_window:
                detrended[spec.label()] = {
                    p.radius: p for p in detrend_backward(series, args.detrend_window)
                }
    header = ["A", "component", "order", "axis", "estimate", "true_value",
              "abs_error", "predicted_error"]
    if detrended:
        header += ["detrended_estimate", "detrend_fitted"]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for spec in specs:
            for row in result.for_spec(spec):
                axis = spec.axis if (spec.component == "m3" and spec.order >= 3) else ""
                record = [repr(row.radius), spec.component, str(spec.order), axis,
                          repr(row.estimate), repr(row.true_value), repr(row.abs_error),
                          "" if row.predicted_error is None else repr(row.predicted_error)]
                if detrended:
                    point = detrended.get(spec.label(), {}).get(row.radius)
                    record += (["", ""] if point is None
                               else [repr(point.value), str(point.fitted).lower()])
                writer.writerow(record)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return 0


def _specfun_checks(perturb: Optional[str]):
    """Yield (name, max_error, tolerance, passed) rows for every identity."""
    bump = 1e-6

    def tweak(name: str, value: float) -> float:
        return value + bump if perturb == name else value

    # tail integral closed forms vs the oscillation-aware quadrature
    for kind in TailIntegralKind:
        worst = 0.0
        for rho in (0.5, 1.0, 2.0, 5.0, 10.0, 25.0):
            closed = tweak(f"tail:{kind.value}", tail_integral(kind, rho))
            ref = tail_integral_quadrature(kind, rho)
            worst = max(worst, abs(closed - ref) / max(abs(ref), 1e-300))
        yield f"tail:{kind.value}", worst, 1e-8
    # reduction identity for the odd tails
    for n, kind in ((1, TailIntegralKind.J1_OVER_X_P3),
                    (2, TailIntegralKind.J1_OVER_X_P5),
                    (3, TailIntegralKind.J1_OVER_X_P7)):
        worst = 0.0
        for rho in (0.7, 3.0, 12.0):
            lhs = tweak(f"recursion:{n}", tail_integral(kind, rho))
            rhs = tail_recursion_rhs(n, rho)
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
        yield f"recursion:n={n}", worst, 1e-10
    # vanishing ring integrals (odd angular symmetry)
    rng = np.random.default_rng(12345)
    theta = 2.0 * math.pi * np.arange(4096) / 4096
    worst = 0.0
    for _ in range(20):
        alpha = rng.uniform(-10, 10)
        m = rng.integers(0, 4)
        n = rng.integers(0, 4)
        base = 2.0 * math.pi / 4096
        vals = (
            np.sum(np.cos(alpha * np.cos(theta)) * np.cos(theta) ** (2 * m + 1)
                   * np.sin(theta) ** n) * base,
            np.sum(np.cos(alpha * np.cos(theta)) * np.cos(theta) ** m
                   * np.sin(theta) ** (2 * n + 1)) * base,
            np.sum(np.sin(alpha * np.cos(theta)) * np.cos(theta) ** m
                   * np.sin(theta) ** (2 * n + 1)) * base,
            np.sum(np.sin(alpha * np.cos(theta)) * np.cos(theta) ** (2 * m)
                   * np.sin(theta) ** n) * base,
        )
        worst = max(worst, float(max(abs(v) for v in vals)))
    yield "ring:odd-symmetry-vanishing", tweak("ring:odd-symmetry-vanishing", worst), 1e-12
    # Bessel integral representations
    worst0 = worst1 = 0.0
    for x in np.linspace(0.0, 40.0, 81):
        c = float(np.mean(np.cos(x * np.cos(theta))))
        s = float(np.mean(np.sin(x * np.cos(theta)) * np.cos(theta)))
        worst0 = max(worst0, abs(c - bessel_j0(x)))
        worst1 = max(worst1, abs(s - bessel_j1(x)))
    yield "bessel:j0-ring-representation", tweak("bessel:j0-ring-representation", worst0), 1e-10
    yield "bessel:j1-ring-representation", worst1, 1e-10
    # derivative identity J0' = -J1 by central differences
    worst = 0.0
    for x in np.linspace(0.5, 40.0, 20):
        h = 1e-6
        der = (bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h)
        worst = max(worst, abs(der + bessel_j1(x)))
    yield "bessel:j0-derivative", worst, 1e-9
    # large-argument envelopes (empirical constant 1)
    worst = 0.0
    for x in np.linspace(5.0, 50.0, 46):
        approx = math.sqrt(2.0 / (math.pi * x)) * math.cos(x - math.pi / 4)
        worst = max(worst, (abs(bessel_j0(x) - approx) - x**-1.5))
    yield "bessel:j0-envelope", worst, 0.0
    # ring integral closed forms vs direct quadrature at three scales
    worst = 0.0
    for (k1, rad) in ((0.05, 1.0), (0.2, 2.0), (0.5, 3.0)):
        cf = sin_cos_components(k1, rad)
        ref = sin_cos_components_quadrature(k1, rad)
        for a, b in zip(cf.i_sin + cf.i_cos, ref.i_sin + ref.i_cos):
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    yield "ring:sin-cos-closed-forms", tweak("ring:sin-cos-closed-forms", worst), 1e-6
    # low-order Taylor rows vs one-sided differences of the closed forms;
    # the integrals carry every power of k1, so one-sided third-order
    # extrapolations recover the value and first derivative at 0+
    rad = 2.0
    table = sin_cos_taylor(rad)
    h = 1e-4 / rad
    coeffs = (0.7, -0.4, 0.9, 0.3)
    sin_vals = [sum(c * v for c, v in zip(coeffs, sin_cos_components(j * h, rad).i_sin))
                for j in (1, 2, 3)]
    cos_vals = [sum(c * v for c, v in zip(coeffs, sin_cos_components(j * h, rad).i_cos))
                for j in (1, 2, 3)]
    d1 = sum(c * v for c, v in zip(coeffs, table["sin"][1]))
    fd1 = (18 * sin_vals[0] - 9 * sin_vals[1] + 2 * sin_vals[2]) / (6 * h)
    worst = abs(fd1 - d1) / max(abs(d1), 1e-300)
    d0 = sum(c * v for c, v in zip(coeffs, table["cos"][0]))
    fd0 = 3 * cos_vals[0] - 3 * cos_vals[1] + cos_vals[2]
    worst = max(worst, abs(fd0 - d0) / max(abs(d0), 1e-300))
    yield "ring:taylor-low-orders", tweak("ring:taylor-low-orders", worst), 1e-4


def cmd_verify_specfun(args) -> int:
    rows = []
    for name, err, tol in _specfun_checks(args.perturb):
        if args.filter and args.filter not in name:
            continue
        rows.append((name, err, tol, err <= tol))
    out = args.out
    writer_target = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        writer = csv.writer(writer_target)
        writer.writerow(["check", "max_error", "tolerance", "status"])
        for name, err, tol, ok in rows:
            writer.writerow([name, repr(err), repr(tol), "pass" if ok else "fail"])
    finally:
        if out:
            writer_target.close()
    failed = [name for name, _, _, ok in rows if not ok]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_validate_scene(args) -> int:
    scene = load_scene(args.scene)
    moment = net_moment(scene)
    print(f"scene ok: {len(scene.dipoles)} dipole(s), height {scene.height}, "
          f"units {scene.unit_system}, net moment ({moment.m1}, {moment.m2}, {moment.m3})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netmoment",
        description="Net magnetisation moment estimation from planar disk field maps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scene_required=True):
        p.add_argument("--scene", required=scene_required,
                       help="scene JSON file (unit_system, height, dipoles)")
        p.add_argument("--n-radial", type=int, default=200)
        p.add_argument("--n-angular", type=int, default=256)
        p.add_argument("--snr-db", type=float, default=None,
                       help="add Gaussian noise at this signal-to-noise ratio")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--plain-variance", action="store_true",
                       help="use the unweighted sample variance in the noise amplitude")

    p_synth = sub.add_parser("synth", help="sample a field map onto a disk grid")
    add_common(p_synth)
    p_synth.add_argument("--radius", type=float, required=True)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_est = sub.add_parser("estimate", help="estimate net moment components")
    add_common(p_est, scene_required=False)
    p_est.add_argument("--field-csv", help="estimate from a stored field map instead")
    p_est.add_argument("--radius", type=float)
    p_est.add_argument("--spec", action="append",
                       help="component:order[:axis], repeatable; default all")
    p_est.add_argument("--out")
    p_est.set_defaults(func=cmd_estimate)

    p_sweep = sub.add_parser("sweep", help="radius sweep with errors and predictions")
    add_common(p_sweep)
    p_sweep.add_argument("--radius", type=float, help="single radius (else use the range flags)")
    p_sweep.add_argument("--radius-min", type=float)
    p_sweep.add_argument("--radius-max", type=float)
    p_sweep.add_argument("--radius-count", type=int)
    p_sweep.add_argument("--log-spacing", action="store_true")
    p_sweep.add_argument("--spec", action="append")
    p_sweep.add_argument("--detrend-window", type=int, nargs="?", const=11, default=None,
                         help="append backward-detrended normal-moment columns")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify-specfun", help="run the special-function identity suite")
    p_ver.add_argument("--out", help="CSV output path (default: stdout)")
    p_ver.add_argument("--filter", help="only run checks whose name contains this substring")
    p_ver.add_argument("--perturb", help=argparse.SUPPRESS)  # testing hook
    p_ver.set_defaults(func=cmd_verify_specfun)

    p_val = sub.add_parser("validate-scene", help="check a scene file and report its net moment")
    p_val.add_argument("--scene", required=True)
    p_val.set_defaults(func=cmd_validate_scene)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, SceneError, OSError, ValueError) as exc:
        if isinstance(exc, DomainError):
            print(f"numerical domain error: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line verification harness.

Subcommands:
  verify    symplecticity, injectivity, containment, image volume
  sections  analytic + Monte Carlo section areas, sharpness, Fubini
  topology  complement connectivity and bounded-hull checks
  plot      SVG figures of the cylinder ribbon, its square image, raster

Reports are JSON (schema "1") and byte-identical for identical spec and
seed; timing goes to stderr so it never perturbs report bytes.  Exit
codes: 0 all checks pass, 1 check failure, 2 usage/config error, 3 I/O
error.  Every flag can be overridden with a CUBEWRAP_<NAME> environment
variable (e.g. CUBEWRAP_SEED=7).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .maps import (
    DISC_RADIUS,
    EmbeddingConfig,
    build_phi,
    build_psi,
    check_symplectic,
    finite_difference_jacobian,
    symplectic_matrix,
)
from .sections import (
    fubini_check,
    section_of_phi,
    z_grid,
)
from .topology import (
    annulus_fixture,
    annulus_with_slit_fixture,
    check_complement_connected,
    check_hull_bound,
    complement_components,
    disk_fixture,
    rasterize_section,
    slit_polyline,
)

SCHEMA = "1"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

_FIXTURES = {
    "annulus": annulus_fixture,
    "annulus_with_slit": annulus_with_slit_fixture,
    "disk": disk_fixture,
}


def _fmt(x: float) -> str:
    """Locale-independent float with 17 significant digits."""
    return format(float(x), ".17g")


class _Phase:
    """Wall-clock phase timer; logs to stderr only (reports stay
    deterministic)."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        dt = time.perf_counter() - self.t0
        print(f"[cubewrap] {self.name}: {dt:.2f}s", file=sys.stderr)


def _check(name, passed, value, tolerance=None, **extra):
    entry = {"name": name, "passed": bool(passed), "value": value}
    if tolerance is not None:
        entry["tolerance"] = tolerance
    entry.update(extra)
    return entry


def _report(spec: dict, checks, artifacts=()):
    return {
        "schema": SCHEMA,
        "tool": "cubewrap",
        "version": __version__,
        "spec": spec,
        "seed": spec.get("seed"),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
        "artifacts": list(artifacts),
    }


def _injectivity_check(phi, samples, seed, image_tol=1e-7, preimage_min=1e-3):
    """Hash-grid collision scan: no two images within image_tol whose
    preimages are at least preimage_min apart.

    Points within image_tol of each other share a cell in at least one
    of the 2^d grids of cell size 2*image_tol shifted by image_tol.
    """
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(samples, phi.dim))
    Y = phi.forward(X)
    d = phi.dim
    cell = 2.0 * image_tol
    collisions = 0
    for shift_bits in range(2**d):
        shifts = np.array([(shift_bits >> k) & 1 for k in range(d)]) * image_tol
        keys = np.floor((Y + shifts) / cell).astype(np.int64)
        order = np.lexsort(keys.T)
        ks = keys[order]
        same = np.all(ks[1:] == ks[:-1], axis=1)
        idx = np.nonzero(same)[0]
        for i in idx:
            a, b = order[i], order[i + 1]
            if np.linalg.norm(Y[a] - Y[b]) < image_tol and np.linalg.norm(
                X[a] - X[b]
            ) >= preimage_min:
                collisions += 1
    return collisions, samples


def cmd_verify(args) -> int:
    config = EmbeddingConfig(n=args.n, c=args.c)
    phi = build_phi(config)
    checks = []
    spec = _spec_echo(args, command="verify")

    with _Phase("symplecticity"):
        rep = check_symplectic(phi, samples=10_000, tol=config.tol_symp, seed=args.seed)
        checks.append(
            _check("phi_symplectic_analytic", rep.passed, rep.max_deviation, rep.tol)
        )
        rng = np.random.default_rng(args.seed + 1)
        Xs = phi.sample_domain(rng, 1000, margin=1e-4)
        Jfd = finite_difference_jacobian(phi.forward, Xs, config.fd_step)
        Om = symplectic_matrix(config.n)
        dev_fd = float(np.abs(np.swapaxes(Jfd, -1, -2) @ Om @ Jfd - Om).max())
        checks.append(_check("phi_symplectic_fd", dev_fd < 1e-4, dev_fd, 1e-4))
        psi = build_psi(config, a=1.0 / args.c)
        rep_psi = check_symplectic(psi, samples=10_000, tol=config.tol_symp, seed=args.seed)
        checks.append(
            _check("psi_symplectic_analytic", rep_psi.passed, rep_psi.max_deviation, rep_psi.tol)
        )

    with _Phase("containment"):
        rng = np.random.default_rng(args.seed + 2)
        X = rng.uniform(0.0, 1.0, size=(args.samples, phi.dim))
        Y = phi.forward(X)
        open01 = (Y > 0.0) & (Y < 1.0)
        ok = np.all(open01[:, :3], axis=1) & (Y[:, 3] > 0) & (Y[:, 3] < args.c)
        if phi.dim > 4:
            ok &= np.all(open01[:, 4:], axis=1)
        checks.append(
            _check("phi_containment", bool(ok.all()), int(ok.sum()), args.samples)
        )
        Xb = psi.sample_domain(np.random.default_rng(args.seed + 3), args.samples)
        Yb = psi.forward(Xb)
        in_disc = np.hypot(Yb[:, 0], Yb[:, 1]) < DISC_RADIUS
        checks.append(
            _check("psi_first_factor_in_disc", bool(in_disc.all()), int(in_disc.sum()), args.samples)
        )

    with _Phase("injectivity"):
        collisions, total = _injectivity_check(phi, args.samples, args.seed + 4)
        checks.append(_check("phi_injectivity_collisions", collisions == 0, collisions, 0))

    with _Phase("image volume"):
        rng = np.random.default_rng(args.seed + 5)
        pts = rng.uniform(0.0, 1.0, size=(args.samples, phi.dim))
        pts[:, 3] *= args.c
        frac = float(phi.image_contains(pts).mean())
        vol = frac * args.c
        checks.append(_check("phi_image_volume_mc", abs(vol - 1.0) < 0.02, vol, 0.02))

    if args.n >= 3:
        rng = np.random.default_rng(args.seed + 6)
        X = rng.uniform(0.0, 1.0, size=(1000, phi.dim))
        Y = phi.forward(X)
        tail_id = bool(np.array_equal(Y[:, 4:], X[:, 4:]))
        checks.append(_check("trailing_coordinates_identity", tail_id, tail_id))

    report = _report(spec, checks)
    return _finish(report, args)


def cmd_sections(args) -> int:
    config = EmbeddingConfig(n=args.n, c=args.c)
    checks = []
    spec = _spec_echo(args, command="sections")
    w, h = args.grid
    artifacts = []

    with _Phase("analytic grid"):
        fr = fubini_check(
            config,
            grid=(w, h),
            mc_spots=args.mc_spots,
            samples_per_spot=args.samples,
            seed=args.seed,
        )
    checks.append(
        _check("max_analytic_area_sharp", fr.max_area == 1.0 / args.c, fr.max_area, 1.0 / args.c)
    )
    checks.append(
        _check(
            "all_generic_areas_equal",
            fr.min_generic_area == fr.max_area == 1.0 / args.c,
            fr.min_generic_area,
        )
    )
    checks.append(
        _check(
            "fubini_integral_analytic",
            abs(fr.analytic_integral - 1.0) < 1e-12,
            fr.analytic_integral,
            1e-12,
        )
    )
    mc_ok = True
    for z1, z2, est, se in fr.mc_spots:
        if abs(est - 1.0 / args.c) > 3.0 * se:
            mc_ok = False
    if fr.mc_spots:
        checks.append(_check("mc_areas_within_3_sigma", mc_ok, len(fr.mc_spots)))
        checks.append(
            _check(
                "fubini_integral_mc",
                abs(fr.mc_integral - 1.0) < 0.02,
                fr.mc_integral,
                0.02,
            )
        )
    # Puncture section, tested separately from the generic grid.
    sd0 = section_of_phi(config.z0 + (0.5,) * (2 * config.n - 4), config)
    checks.append(_check("puncture_section_empty", sd0.status == "puncture", sd0.status))

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        csv_path = os.path.join(args.out, "sections.csv")
        with open(csv_path, "w", newline="") as fh:
            wtr = csv.writer(fh)
            wtr.writerow(["z1", "z2", "analytic_area", "mc_area", "mc_stderr"])
            mc_by_z = {(z1, z2): (est, se) for z1, z2, est, se in fr.mc_spots}
            generic_z, _ = z_grid(config, (w, h))
            for z in generic_z:
                key = (float(z[0]), float(z[1]))
                est, se = mc_by_z.get(key, ("", ""))
                wtr.writerow(
                    [
                        _fmt(z[0]),
                        _fmt(z[1]),
                        _fmt(1.0 / args.c),
                        _fmt(est) if est != "" else "",
                        _fmt(se) if se != "" else "",
                    ]
                )
        artifacts.append(csv_path)

    report = _report(spec, checks, artifacts)
    report["fubini"] = fr.to_dict()
    return _finish(report, args)


def cmd_topology(args) -> int:
    config = EmbeddingConfig(n=args.n, c=args.c)
    checks = []
    spec = _spec_echo(args, command="topology")

    if args.fixture:
        try:
            fixture = _FIXTURES[args.fixture]
        except KeyError:
            print(f"unknown fixture {args.fixture!r}", file=sys.stderr)
            return EXIT_USAGE
        r = fixture(args.N)
        labels = complement_components(r)
        expected = 1 if args.fixture != "annulus" else 2
        checks.append(
            _check(
                f"fixture_{args.fixture}_components",
                labels.count == expected,
                labels.count,
                expected,
            )
        )
        return _finish(_report(spec, checks), args)

    if args.hull:
        a = args.a if args.a is not None else 1.0 / args.c
        with _Phase("bounded hull"):
            hr = check_hull_bound(a, config, grid=args.grid, N=args.N)
        checks.append(
            _check("hull_areas_bounded", hr.all_within_bound, hr.max_hull_area, a + hr.tolerance)
        )
        checks.append(
            _check("hull_equals_section", hr.hull_equals_section, hr.hull_equals_section)
        )
        report = _report(spec, checks)
        report["hull"] = hr.to_dict()
        return _finish(report, args)

    with _Phase("connectivity"):
        rng = np.random.default_rng(args.seed)
        w, h = args.grid
        conn_reports = []
        all_ok = True
        generic_z, _ = z_grid(config, (w, h))
        idx = rng.choice(len(generic_z), size=min(w * h, len(generic_z)), replace=False)
        for i in idx:
            ok, rep = check_complement_connected(generic_z[i], config, args.N)
            conn_reports.append(rep.to_dict())
            all_ok &= ok
    checks.append(_check("complement_connected", all_ok, len(conn_reports)))
    neg = complement_components(annulus_fixture(max(args.N, 256)))
    checks.append(_check("annulus_negative_control", neg.count == 2, neg.count, 2))
    report = _report(spec, checks)
    report["connectivity"] = conn_reports
    return _finish(report, args)


# ---------------------------------------------------------------------------
# SVG output


def _svg_header(w, h):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">\n'
    )


def _polygon(points, fill, opacity="1", stroke="none"):
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in points)
    return (
        f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" '
        f'stroke="{stroke}"/>\n'
    )


def _polyline(points, stroke, width="1"):
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in points)
    return f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>\n'


def _ribbon_svg(sd, size=400):
    """The product set on the unrolled cylinder: angle horizontal, height
    vertical, with the removed angle drawn as a slit line."""
    out = [_svg_header(size, size)]
    out.append(f'<rect width="{size}" height="{size}" fill="#dde9f5"/>\n')
    vp = sd.slit_angle
    for a, b in sd.W.intervals:
        y0, y1 = size * (1 - b), size * (1 - a)
        out.append(
            f'<rect x="0" y="{y0:.3f}" width="{size}" height="{y1 - y0:.3f}" '
            f'fill="#d94141" fill-opacity="0.85"/>\n'
        )
    x = vp * size
    out.append(_polyline([(x, 0), (x, size)], "#2b4c9b", "2"))
    out.append(f'<rect width="{size}" height="{size}" fill="none" stroke="#222"/>\n')
    out.append("</svg>\n")
    return "".join(out)


def _section_svg(sd, config, size=400, arcs=512):
    """The section in the square: annular band(s) with the radial slit."""
    from .maps import make_lambda

    lam = make_lambda(config)
    out = [_svg_header(size, size)]
    out.append(f'<rect width="{size}" height="{size}" fill="#ffffff"/>\n')
    if sd.status == "generic":
        vp = sd.slit_angle
        for a, b in sd.W.intervals:
            qs = vp + (np.arange(1, arcs) / arcs)
            outer = lam.forward(np.stack([qs, np.full_like(qs, a + 1e-9)], axis=-1))
            inner = lam.forward(np.stack([qs, np.full_like(qs, b - 1e-9)], axis=-1))
            ring = np.concatenate([outer, inner[::-1]])
            pts = [(x * size, (1 - y) * size) for x, y in ring]
            out.append(_polygon(pts, "#d94141", "0.85"))
        slit = slit_polyline(sd, config, steps=256)
        out.append(
            _polyline([(x * size, (1 - y) * size) for x, y in slit], "#2b4c9b", "1.5")
        )
    else:
        out.append(
            f'<text x="{size / 2:.0f}" y="{size / 2:.0f}" text-anchor="middle" '
            f'font-family="sans-serif">empty section</text>\n'
        )
    out.append(f'<rect width="{size}" height="{size}" fill="none" stroke="#222"/>\n')
    out.append("</svg>\n")
    return "".join(out)


def _raster_svg(r, size=512):
    """Run-length rectangles of the occupancy grid."""
    out = [_svg_header(size, size)]
    out.append(f'<rect width="{size}" height="{size}" fill="#ffffff"/>\n')
    s = size / r.n
    for i, row in enumerate(r.occupancy):
        j = 0
        while j < r.n:
            if row[j]:
                k = j
                while k < r.n and row[k]:
                    k += 1
                out.append(
                    f'<rect x="{i * s:.3f}" y="{(r.n - k) * s:.3f}" '
                    f'width="{s:.3f}" height="{(k - j) * s:.3f}" fill="#d94141"/>\n'
                )
                j = k
            else:
                j += 1
    out.append(f'<rect width="{size}" height="{size}" fill="none" stroke="#222"/>\n')
    out.append("</svg>\n")
    return "".join(out)


def cmd_plot(args) -> int:
    config = EmbeddingConfig(n=args.n, c=args.c)
    spec = _spec_echo(args, command="plot")
    z = args.z if args.z is not None else (0.3, 0.7 * args.c)
    z = tuple(z) + (0.5,) * (2 * config.n - 2 - len(z))
    sd = section_of_phi(z, config)
    outdir = args.out or "."
    artifacts = []
    try:
        os.makedirs(outdir, exist_ok=True)
        for name, content in [
            ("ribbon.svg", _ribbon_svg(sd) if sd.status == "generic" else _section_svg(sd, config)),
            ("section.svg", _section_svg(sd, config)),
        ]:
            path = os.path.join(outdir, name)
            with open(path, "w") as fh:
                fh.write(content)
            artifacts.append(path)
        r = rasterize_section(sd, config, max(args.N, 64) if args.N else 256)
        path = os.path.join(outdir, "raster.svg")
        with open(path, "w") as fh:
            fh.write(_raster_svg(r))
        artifacts.append(path)
        pgm = os.path.join(outdir, "raster.pgm")
        r.to_pgm(pgm)
        artifacts.append(pgm)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    checks = [_check("figures_emitted", True, len(artifacts))]
    report = _report(spec, checks, artifacts)
    return _finish(report, args)


# ---------------------------------------------------------------------------
# Plumbing


def _spec_echo(args, command):
    spec = {
        "command": command,
        "n": args.n,
        "c": args.c,
        "seed": args.seed,
        "samples": getattr(args, "samples", None),
        "N": getattr(args, "N", None),
        "grid": list(getattr(args, "grid", ()) or ()),
        "z": list(args.z) if getattr(args, "z", None) is not None else None,
        "a": getattr(args, "a", None),
        "hull": getattr(args, "hull", False),
        "fixture": getattr(args, "fixture", None),
        "out": getattr(args, "out", None),
        "format": getattr(args, "format", None),
    }
    return spec


def _finish(report, args) -> int:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        try:
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, f"{report['spec']['command']}_report.json")
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def _grid_arg(s):
    w, h = s.lower().split("x")
    return int(w), int(h)


def _z_arg(s):
    return tuple(float(v) for v in s.split(","))


def _env_default(name, cast, fallback):
    raw = os.environ.get(f"CUBEWRAP_{name}")
    if raw is None:
        return fallback
    return cast(raw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cubewrap",
        description="Verify the cube-into-polydisc symplectic embedding.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples_default=1_000_000, N_default=256, grid_default=(50, 100)):
        sp.add_argument("--n", type=int, default=_env_default("N_HALFDIM", int, 2))
        sp.add_argument("--c", type=float, default=_env_default("C", float, 2.0))
        sp.add_argument("--seed", type=int, default=_env_default("SEED", int, 0))
        sp.add_argument(
            "--samples", type=lambda s: int(float(s)),
            default=_env_default("SAMPLES", lambda s: int(float(s)), samples_default),
        )
        sp.add_argument("--N", type=int, default=_env_default("N", int, N_default))
        sp.add_argument(
            "--grid", type=_grid_arg, default=_env_default("GRID", _grid_arg, grid_default)
        )
        sp.add_argument("--z", type=_z_arg, default=None)
        sp.add_argument("--out", default=_env_default("OUT", str, None))
        sp.add_argument(
            "--format", choices=["json", "csv", "svg", "pgm"], default="json"
        )

    sp = sub.add_parser("verify", help="symplecticity, injectivity, containment")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sections", help="section areas, sharpness, Fubini")
    common(sp, samples_default=1_000_000)
    sp.add_argument("--mc-spots", type=int, default=20)
    sp.set_defaults(func=cmd_sections)

    sp = sub.add_parser("topology", help="complement connectivity, bounded hulls")
    common(sp, N_default=512, grid_default=(10, 10))
    sp.add_argument("--hull", action="store_true")
    sp.add_argument("--a", type=float, default=None)
    sp.add_argument("--fixture", choices=sorted(_FIXTURES), default=None)
    sp.set_defaults(func=cmd_topology)

    sp = sub.add_parser("plot", help="SVG figures of ribbon, section, raster")
    common(sp, N_default=256)
    sp.set_defaults(func=cmd_plot)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Raster verification of section topology: connected complements and
bounded hulls.

The complement of a section is taken in the whole plane, so every raster
carries an explicit free margin ring around its box.  Occupancy uses
cell-center membership; the zero-width radial slit is kept open on the
grid by freeing the cells a fine polyline of the slit passes through
(plus their 8-neighborhood), so that the complement corridor the slit
provides survives discretization at any resolution.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .maps import DISC_RADIUS, EmbeddingConfig, KappaMap, make_lambda
from .sections import (
    SectionDescription,
    psi_section_membership_many,
    section_membership_many,
    section_of_phi,
)

__all__ = [
    "Raster",
    "RegionLabels",
    "rasterize_section",
    "rasterize_psi_section",
    "complement_components",
    "check_complement_connected",
    "slit_path_witness",
    "bounded_hull",
    "check_hull_bound",
    "annulus_fixture",
    "annulus_with_slit_fixture",
    "disk_fixture",
]

_FOUR_CONN = ndimage.generate_binary_structure(2, 1)
_EIGHT_CONN = ndimage.generate_binary_structure(2, 2)


@dataclass(frozen=True)
class Raster:
    """A binary occupancy grid over the square box [x0, x0+side]^2.

    occupancy[i, j] covers the cell with center
    (x0 + (i+0.5)*side/n, y0 + (j+0.5)*side/n).
    """

    n: int
    occupancy: np.ndarray
    x0: float = 0.0
    y0: float = 0.0
    side: float = 1.0

    @property
    def cell(self) -> float:
        return self.side / self.n

    def cell_centers(self):
        t = (np.arange(self.n) + 0.5) * self.cell
        X, Y = np.meshgrid(self.x0 + t, self.y0 + t, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def area(self) -> float:
        return float(self.occupancy.sum()) * self.cell**2

    def perimeter_estimate(self) -> float:
        """Total length of occupied/free cell edges (8-connectivity is
        used only implicitly: diagonal contacts contribute both edges)."""
        occ = self.occupancy
        pad = np.pad(occ, 1, constant_values=False)
        edges = 0
        edges += np.count_nonzero(pad[1:, :] != pad[:-1, :])
        edges += np.count_nonzero(pad[:, 1:] != pad[:, :-1])
        return edges * self.cell

    def to_pgm(self, path):
        """Binary PGM (magic P5), one byte per cell, 255 = occupied.

        Rows run along the second index so the image is the grid seen
        with the first index increasing downward.
        """
        data = (self.occupancy.astype(np.uint8) * 255).tobytes()
        header = f"P5\n{self.n} {self.n}\n255\n".encode()
        with open(path, "wb") as fh:
            fh.write(header + data)

    def to_rle_json(self) -> str:
        """Row-wise run-length encoding: list of (row, start, length) runs."""
        runs = []
        for i, row in enumerate(self.occupancy):
            j = 0
            row = row.astype(bool)
            while j < self.n:
                if row[j]:
                    k = j
                    while k < self.n and row[k]:
                        k += 1
                    runs.append([i, j, k - j])
                    j = k
                else:
                    j += 1
        doc = {
            "n": self.n,
            "box": [self.x0, self.y0, self.side],
            "runs": runs,
        }
        return json.dumps(doc, sort_keys=True)


@dataclass(frozen=True)
class RegionLabels:
    """Flood-fill labels (4-connectivity) of the complement cells of a
    raster, computed with one free margin ring around the box."""

    labels: np.ndarray  # padded shape (n+2, n+2); 0 on occupied cells
    count: int
    boundary_touching: tuple

    @property
    def interior_labels(self):
        return self.labels[1:-1, 1:-1]


def complement_components(r: Raster) -> RegionLabels:
    """Label the free cells, including a one-cell free ring outside the
    box (the complement is taken in the plane)."""
    padded_occ = np.pad(r.occupancy.astype(bool), 1, constant_values=False)
    labels, count = ndimage.label(~padded_occ, structure=_FOUR_CONN)
    ring = np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
    )
    touching = tuple(sorted(set(int(v) for v in ring if v > 0)))
    return RegionLabels(labels=labels, count=int(count), boundary_touching=touching)


def occupied_components(r: Raster) -> int:
    """Number of occupied components (8-connectivity)."""
    _, count = ndimage.label(r.occupancy.astype(bool), structure=_EIGHT_CONN)
    return int(count)


def _stamp_polyline(occupancy: np.ndarray, pts, x0, y0, cell, n):
    """Free every cell a polyline passes through, plus its 8-neighborhood,
    so the corridor it cuts is at least one 4-connected cell wide."""
    ii = np.floor((pts[:, 0] - x0) / cell).astype(int)
    jj = np.floor((pts[:, 1] - y0) / cell).astype(int)
    mask = np.zeros_like(occupancy, dtype=bool)
    keep = (ii >= -1) & (ii <= n) & (jj >= -1) & (jj <= n)
    ii, jj = ii[keep], jj[keep]
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            a = np.clip(ii + di, 0, n - 1)
            b = np.clip(jj + dj, 0, n - 1)
            mask[a, b] = True
    occupancy &= ~mask


def slit_polyline(sd: SectionDescription, config: EmbeddingConfig, steps: int):
    """Points of the slit path: the image of the removed angle, from the
    square boundary (t -> 0) to the puncture (t -> 1).

    Sampled uniformly in the intermediate disc radius, where the path is
    a straight ray; uniform height sampling would leave large spatial
    gaps near the center.
    """
    lam = make_lambda(config)
    rho = np.linspace(DISC_RADIUS, 0.0, steps, endpoint=False)
    t = 1.0 - math.pi * rho * rho
    t = np.clip(t, 1e-12, 1.0 - 1e-12)
    qp = np.stack([np.full_like(t, sd.slit_angle), t], axis=-1)
    return lam.forward(qp)


def rasterize_section(
    z, config: EmbeddingConfig, N: int, keep_slit_open: bool = True
) -> Raster:
    """Rasterize the section at z over [0,1]^2 by cell-center membership.

    With keep_slit_open (the default) the cells along the analytic slit
    path are freed; the slit has zero width, so plain center sampling
    would close it at every finite resolution.
    """
    if N < 64:
        raise ValueError("raster resolution must be at least 64")
    sd = section_of_phi(z, config) if not isinstance(z, SectionDescription) else z
    r = Raster(n=N, occupancy=np.zeros((N, N), dtype=bool))
    if sd.status != "generic":
        return r
    centers = r.cell_centers().reshape(-1, 2)
    occ = section_membership_many(centers, sd, config).reshape(N, N)
    if keep_slit_open:
        pts = slit_polyline(sd, config, steps=8 * N)
        _stamp_polyline(occ, pts, r.x0, r.y0, r.cell, N)
    return Raster(n=N, occupancy=occ)


def _touching_heights(W, tol: float = 1e-9):
    """Heights where two open intervals of W share an endpoint.

    The shared endpoint is excluded from the open union, so it is a
    zero-width free curve inside the occupied band."""
    iv = W.intervals
    return [
        0.5 * (iv[k][1] + iv[k + 1][0])
        for k in range(len(iv) - 1)
        if iv[k + 1][0] - iv[k][1] < tol
    ]


def rasterize_psi_section(
    z, config: EmbeddingConfig, a: float, N: int, margin_cells: int = 2
) -> Raster:
    """Rasterize the z-section of the ball embedding's image over a box
    slightly larger than the disc of radius 1/sqrt(pi)."""
    if N < 64:
        raise ValueError("raster resolution must be at least 64")
    c = 1.0 / a
    cfg = EmbeddingConfig(n=config.n, c=c, fd_step=config.fd_step, tol_symp=config.tol_symp)
    side = 2 * DISC_RADIUS * (1.0 + 2.0 * margin_cells / N)
    x0 = -side / 2.0
    r = Raster(n=N, occupancy=np.zeros((N, N), dtype=bool), x0=x0, y0=x0, side=side)
    centers = r.cell_centers().reshape(-1, 2)
    occ = psi_section_membership_many(centers, z, cfg, a).reshape(N, N)
    sd = section_of_phi(z, cfg)
    if sd.status == "generic":
        kappa = KappaMap(side=1.0)
        pts = kappa.inverse(slit_polyline(sd, cfg, steps=8 * N))
        _stamp_polyline(occ, pts, r.x0, r.y0, r.cell, N)
        # A shared endpoint of touching height intervals is a zero-width
        # free loop around the band; the ball constraint widens it into
        # visible pockets in places, so keep the whole loop open too.
        lam = make_lambda(cfg)
        for v in _touching_heights(sd.W):
            ang = np.mod(sd.slit_angle + (np.arange(8 * N) + 0.5) / (8 * N), 1.0)
            loop = lam.forward(np.stack([ang, np.full_like(ang, v)], axis=-1))
            _stamp_polyline(occ, kappa.inverse(loop), r.x0, r.y0, r.cell, N)
    return Raster(n=N, occupancy=occ, x0=x0, y0=x0, side=side)


@dataclass(frozen=True)
class ConnectivityReport:
    z: tuple
    N: int
    components: int
    connected: bool
    occupied_fraction: float

    def to_dict(self):
        return {
            "z": list(self.z),
            "N": self.N,
            "components": self.components,
            "connected": self.connected,
            "occupied_fraction": self.occupied_fraction,
        }


def check_complement_connected(z, config: EmbeddingConfig, N: int):
    """True iff the complement of the section raster (in the plane) is a
    single flood-fill component.  Verdicts below N = 256 are advisory."""
    if N < 256:
        raise ValueError("acceptance-grade connectivity checks need N >= 256")
    r = rasterize_section(z, config, N)
    labels = complement_components(r)
    sd = z if isinstance(z, SectionDescription) else section_of_phi(z, config)
    zz = sd.z
    report = ConnectivityReport(
        z=tuple(zz),
        N=N,
        components=labels.count,
        connected=labels.count == 1,
        occupied_fraction=float(r.occupancy.mean()),
    )
    return report.connected, report


def slit_path_witness(z, config: EmbeddingConfig, steps: int = 1000):
    """Sample the slit path and confirm every sample avoids the section.

    Returns (polyline, all_outside).  The path starts on the square
    boundary (t -> 0) and ends at the puncture (t -> 1).
    """
    sd = z if isinstance(z, SectionDescription) else section_of_phi(z, config)
    if sd.status != "generic":
        raise ValueError("the slit path exists only for generic sections")
    lam = make_lambda(config)
    t = (np.arange(steps) + 0.5) / steps
    qp = np.stack([np.full_like(t, sd.slit_angle), t], axis=-1)
    pts = lam.forward(qp)
    inside = section_membership_many(pts, sd, config)
    return pts, bool(~inside.any())


class AmbiguousHullError(ValueError):
    """Occupancy reaches the raster margin; the bounded hull is undefined."""


def bounded_hull(r: Raster) -> Raster:
    """Union of the occupancy with every complement component that does
    not touch the free margin ring (the bounded components)."""
    occ = r.occupancy.astype(bool)
    if occ[0, :].any() or occ[-1, :].any() or occ[:, 0].any() or occ[:, -1].any():
        raise AmbiguousHullError("occupancy touches the raster margin")
    labels = complement_components(r)
    bounded = np.isin(labels.interior_labels, labels.boundary_touching, invert=True)
    hull = occ | (bounded & (labels.interior_labels > 0))
    return Raster(n=r.n, occupancy=hull, x0=r.x0, y0=r.y0, side=r.side)


@dataclass(frozen=True)
class HullReport:
    a: float
    N: int
    grid: tuple
    max_hull_area: float
    tolerance: float
    all_within_bound: bool
    hull_equals_section: bool
    entries: tuple  # ((z1, z2, hull_area, section_area), ...)

    def to_dict(self):
        return {
            "a": self.a,
            "N": self.N,
            "grid": list(self.grid),
            "max_hull_area": self.max_hull_area,
            "tolerance": self.tolerance,
            "all_within_bound": self.all_within_bound,
            "hull_equals_section": self.hull_equals_section,
            "entries": [list(e) for e in self.entries],
        }


def check_hull_bound(
    a: float, config: EmbeddingConfig, grid=(20, 20), N: int = 1024
) -> HullReport:
    """Verify that every section hull of the ball embedding has area at
    most a (up to a raster tolerance scaling with boundary length / N)."""
    if not 0 < a <= 1:
        raise ValueError(f"a must be in (0, 1], got {a}")
    c = 1.0 / a
    cfg = EmbeddingConfig(n=config.n, c=c, fd_step=config.fd_step, tol_symp=config.tol_symp)
    w, h = grid
    z1 = (np.arange(w) + 0.5) / w
    z2 = (np.arange(h) + 0.5) / h * c
    entries = []
    worst_tol = 0.0
    all_ok = True
    hull_eq = True
    for zi in z1:
        for zj in z2:
            if math.hypot(zi - 0.5, zj - c / 2) < 1e-3:
                continue
            r = rasterize_psi_section((zi, zj), cfg, a, N)
            hull = bounded_hull(r)
            tol = 4.0 * r.perimeter_estimate() / N
            worst_tol = max(worst_tol, tol)
            area = hull.area()
            entries.append((float(zi), float(zj), area, r.area()))
            if area > a + tol:
                all_ok = False
            if not np.array_equal(hull.occupancy, r.occupancy):
                hull_eq = False
    return HullReport(
        a=a,
        N=N,
        grid=tuple(grid),
        max_hull_area=float(max(e[2] for e in entries)),
        tolerance=float(worst_tol),
        all_within_bound=all_ok,
        hull_equals_section=hull_eq,
        entries=tuple(entries),
    )


# ---------------------------------------------------------------------------
# Synthetic fixtures (negative controls and hull tests)


def _radial_fixture(N, inner, outer, slit_halfwidth=None):
    occ = np.zeros((N, N), dtype=bool)
    t = (np.arange(N) + 0.5) / N
    X, Y = np.meshgrid(t, t, indexing="ij")
    rho = np.hypot(X - 0.5, Y - 0.5)
    occ = (rho > inner) & (rho < outer)
    if slit_halfwidth is not None:
        on_ray = (np.abs(Y - 0.5) < slit_halfwidth) & (X > 0.5)
        occ &= ~on_ray
    return Raster(n=N, occupancy=occ)


def annulus_fixture(N: int = 256, inner: float = 0.2, outer: float = 0.4) -> Raster:
    """A closed annulus: its complement has two components."""
    return _radial_fixture(N, inner, outer)


def annulus_with_slit_fixture(N: int = 256, inner: float = 0.2, outer: float = 0.4) -> Raster:
    """An annulus cut by a radial slit: path-connected complement."""
    return _radial_fixture(N, inner, outer, slit_halfwidth=1.5 / N)


def disk_fixture(N: int = 256, radius: float = 0.3) -> Raster:
    t = (np.arange(N) + 0.5) / N
    X, Y = np.meshgrid(t, t, indexing="ij")
    occ = np.hypot(X - 0.5, Y - 0.5) < radius
    return Raster(n=N, occupancy=occ)

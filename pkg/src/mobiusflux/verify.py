"""One-shot invariant suite run by the CLI and the acceptance tests.

Every check is self-contained on a fixed small lattice, draws any
randomness from an explicit generator, and returns a pass/fail verdict
with the measured worst deviation.  The suite accepts a deliberately
broken seam rule (lattice hook) so its own sensitivity can be tested:
with the seam flip disabled the homology, equivalence, ladder and Stokes
checks must fail.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .eigensolver import SolverConfig, dense_eigh, lanczos_lowest
from .experiments import annulus_equivalence_check, ladder_periodicity_test
from .gauge import (
    GaugeTransform,
    add_face_flux,
    apply_gauge_transform,
    face_curvature,
    faces,
    reduce_angle,
    stokes_defect,
    uniform_flux_field,
    wilson_loop,
)
from .hamiltonian import (
    EVEN,
    ODD,
    HoppingParams,
    assemble,
    restrict,
    ring_spectrum_oracle,
    sector_isometry,
)
from .lattice import (
    ANNULUS,
    DIR_MY,
    DIR_PX,
    DIR_PY,
    MOEBIUS,
    Site,
    StripLattice,
    build_lattice,
    center_loop,
    homology_class,
    offset_loop,
    walk_loop,
)

ANGLE_TOL = 1e-12
SPECTRUM_TOL = 1e-10
CROSS_VALIDATION_TOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _moebius(nx: int, ny: int, broken_seam: bool) -> StripLattice:
    return StripLattice(nx=nx, ny=ny, topology=MOEBIUS, seam_flip=not broken_seam)


def _y_moves(a: int, b: int) -> list:
    return [DIR_PY] * (b - a) if b >= a else [DIR_MY] * (a - b)


def random_class2_loop(lat: StripLattice, rng: np.random.Generator):
    """Random closed walk of homology class 2 avoiding the center row.

    Wanders through the lower half, crosses the seam, wanders through the
    upper half, crosses back and closes; the two halves swap at each seam
    crossing, so the walk never needs the center row.
    """
    c = lat.center_row
    if c < 1:
        raise ValueError("need ny >= 3 for center-avoiding loops")
    r0 = int(rng.integers(0, c))
    r = r0
    dirs = []
    for half_lo, half_hi in ((0, c), (c + 1, lat.ny)):
        for _ in range(lat.nx):
            target = int(rng.integers(half_lo, half_hi))
            dirs += _y_moves(r, target)
            dirs.append(DIR_PX)
            r = target
        r = lat.ny - 1 - r  # seam crossing flipped the row
    dirs += _y_moves(r, r0)
    return walk_loop(lat, Site(0, r0), dirs)


def random_annulus_loop(lat: StripLattice, rng: np.random.Generator, wraps: int = 1):
    """Random class-``wraps`` walk on an annulus, wandering over all rows."""
    r0 = int(rng.integers(0, lat.ny))
    r = r0
    dirs = []
    for _ in range(wraps * lat.nx):
        target = int(rng.integers(0, lat.ny))
        dirs += _y_moves(r, target)
        dirs.append(DIR_PX)
        r = target
    dirs += _y_moves(r, r0)
    return walk_loop(lat, Site(0, r0), dirs)


def random_gauge_transform(lat: StripLattice, rng: np.random.Generator) -> GaugeTransform:
    return GaugeTransform(lattice=lat, chi=rng.uniform(-math.pi, math.pi, (lat.nx, lat.ny)))


def _angles_equal_mod(a: float, b: float) -> float:
    return abs(reduce_angle(a - b))


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

def check_flatness(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    worst = 0.0
    for _ in range(20):
        field = uniform_flux_field(lat, float(rng.uniform(-2, 2)))
        field = apply_gauge_transform(field, random_gauge_transform(lat, rng))
        for face in faces(lat):
            worst = max(worst, abs(face_curvature(field, face)))
    return worst <= ANGLE_TOL, f"max |curvature| = {worst:.2e} (tol {ANGLE_TOL:g})"


def check_gauge_invariance(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    worst = 0.0
    for _ in range(20):
        field = uniform_flux_field(lat, float(rng.uniform(-2, 2)))
        transformed = apply_gauge_transform(field, random_gauge_transform(lat, rng))
        loops = [center_loop(lat), offset_loop(lat, 0), random_class2_loop(lat, rng)]
        for loop in loops:
            dev = _angles_equal_mod(
                wilson_loop(field, loop).angle, wilson_loop(transformed, loop).angle
            )
            worst = max(worst, dev)
    return worst <= ANGLE_TOL, f"max angle shift mod 2pi = {worst:.2e} (tol {ANGLE_TOL:g})"


def check_homology_invariance(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    worst = 0.0
    for _ in range(10):
        field = apply_gauge_transform(
            uniform_flux_field(lat, float(rng.uniform(-2, 2))),
            random_gauge_transform(lat, rng),
        )
        l1 = random_class2_loop(lat, rng)
        l2 = random_class2_loop(lat, rng)
        if homology_class(lat, l1) != homology_class(lat, l2):
            return False, "generated loops disagree in homology class"
        dev = _angles_equal_mod(wilson_loop(field, l1).angle, wilson_loop(field, l2).angle)
        worst = max(worst, dev)
    return worst <= ANGLE_TOL, f"max homologous angle gap = {worst:.2e} (tol {ANGLE_TOL:g})"


def check_loop_doubling(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    cloop, oloop = center_loop(lat), offset_loop(lat, 0)
    exact = 0
    for _ in range(20):
        field = uniform_flux_field(lat, float(rng.uniform(-3, 3)))
        if wilson_loop(field, oloop).angle == 2.0 * wilson_loop(field, cloop).angle:
            exact += 1
    return exact == 20, f"bit-exact doubling in {exact}/20 random fluxes"


def check_flux_periodicity(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    hop = HoppingParams()
    worst = 0.0
    for f in (float(rng.uniform(-1, 1)), 0.0, 0.3):
        e0 = dense_eigh(assemble(lat, uniform_flux_field(lat, f), hop)).values
        e1 = dense_eigh(assemble(lat, uniform_flux_field(lat, f + 1.0), hop)).values
        worst = max(worst, float(np.max(np.abs(e0 - e1))))
    return worst <= SPECTRUM_TOL, f"max |E(f)-E(f+1)| = {worst:.2e} (tol {SPECTRUM_TOL:g})"


def check_reflection_symmetry(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    hop = HoppingParams()
    worst = 0.0
    for f in (float(rng.uniform(0, 1)), 0.25):
        ep = dense_eigh(assemble(lat, uniform_flux_field(lat, f), hop)).values
        em = dense_eigh(assemble(lat, uniform_flux_field(lat, -f), hop)).values
        worst = max(worst, float(np.max(np.abs(ep - em))))
    return worst <= SPECTRUM_TOL, f"max |E(f)-E(-f)| = {worst:.2e} (tol {SPECTRUM_TOL:g})"


def check_sector_completeness(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    hop = HoppingParams()
    worst = 0.0
    for f in (0.0, float(rng.uniform(0, 1))):
        h = assemble(lat, uniform_flux_field(lat, f), hop)
        full = dense_eigh(h).values
        parts = np.concatenate(
            [dense_eigh(restrict(h, sector_isometry(lat, p))).values for p in (EVEN, ODD)]
        )
        worst = max(worst, float(np.max(np.abs(np.sort(parts) - full))))
    return worst <= SPECTRUM_TOL, f"max |sort(even+odd) - full| = {worst:.2e} (tol {SPECTRUM_TOL:g})"


def check_annulus_equivalence(rng, broken_seam=False) -> tuple:
    if broken_seam:
        band = _moebius(6, 5, broken_seam)
        ring = build_lattice(6, 2, ANNULUS)
        hop = HoppingParams()
        iso = sector_isometry(band, ODD)
        worst = 0.0
        for f in (0.0, 0.3, 0.5):
            e_odd = dense_eigh(restrict(assemble(band, uniform_flux_field(band, f), hop), iso)).values
            e_ring = dense_eigh(assemble(ring, uniform_flux_field(ring, f + 0.5), hop)).values
            worst = max(worst, float(np.max(np.abs(e_odd - e_ring))))
    else:
        worst = annulus_equivalence_check(6, 5, (0.0, 0.3, 0.5))
    return worst <= SPECTRUM_TOL, f"max odd-vs-annulus deviation = {worst:.2e} (tol {SPECTRUM_TOL:g})"


def check_ladder_periodicity(rng, broken_seam=False) -> tuple:
    if broken_seam:
        # reproduce the experiment on the hooked lattice
        lat = _moebius(12, 2, broken_seam)
        hop = HoppingParams(tx=1.0, ty=0.0)
        dev = 0.0
        for f in np.linspace(0.0, 1.0, 5):
            a = dense_eigh(assemble(lat, uniform_flux_field(lat, float(f)), hop)).values
            b = dense_eigh(assemble(lat, uniform_flux_field(lat, float(f) + 0.5), hop)).values
            dev = max(dev, float(np.max(np.abs(a - b))))
        ok_half = dev <= SPECTRUM_TOL
        return ok_half, f"decoupled-ladder half-period deviation = {dev:.2e}"
    decoupled = ladder_periodicity_test(12, np.linspace(0.0, 1.0, 5), ty=0.0)
    coupled = ladder_periodicity_test(12, (0.0,), ty=1.0)
    ok = decoupled.max_dev_half_period <= SPECTRUM_TOL and coupled.max_dev_half_period > 0.01
    return ok, (
        f"ty=0 half-period dev = {decoupled.max_dev_half_period:.2e}, "
        f"ty=1 half-period dev = {coupled.max_dev_half_period:.2e}"
    )


def check_stokes_defect(rng, broken_seam=False) -> tuple:
    lat = _moebius(6, 5, broken_seam)
    worst = 0.0
    for trial in range(10):
        flat = apply_gauge_transform(
            uniform_flux_field(lat, float(rng.uniform(-2, 2))),
            random_gauge_transform(lat, rng),
        )
        face = Site(int(rng.integers(0, lat.nx)), int(rng.integers(0, lat.ny - 1)))
        curved = add_face_flux(flat, face, 0.3)
        l1 = random_class2_loop(lat, rng)
        l2 = random_class2_loop(lat, rng)
        for field in (flat, curved):
            worst = max(worst, abs(stokes_defect(field, l1, l2)))
    return worst <= ANGLE_TOL, f"max |defect| = {worst:.2e} (tol {ANGLE_TOL:g})"


def check_solver_cross_validation(rng, broken_seam=False) -> tuple:
    lat = _moebius(12, 5, broken_seam)
    hop = HoppingParams()
    h = assemble(lat, uniform_flux_field(lat, 0.25), hop)
    reference = dense_eigh(h).values[:6]
    iterative = lanczos_lowest(h, SolverConfig(k=6, tol=1e-12, seed=7, method="lanczos")).values
    worst = float(np.max(np.abs(iterative - reference)))
    for nx in (3, 4, 8, 16):
        ring = build_lattice(nx, 1, ANNULUS)
        for f in (0.0, 0.25, 0.5):
            got = dense_eigh(assemble(ring, uniform_flux_field(ring, f), HoppingParams(ty=0.0))).values
            worst = max(worst, float(np.max(np.abs(got - ring_spectrum_oracle(nx, f)))))
    return worst <= CROSS_VALIDATION_TOL, (
        f"max solver/oracle deviation = {worst:.2e} (tol {CROSS_VALIDATION_TOL:g})"
    )


CHECKS = (
    ("flatness", check_flatness),
    ("gauge_invariance", check_gauge_invariance),
    ("homology_invariance", check_homology_invariance),
    ("loop_doubling", check_loop_doubling),
    ("flux_periodicity", check_flux_periodicity),
    ("reflection_symmetry", check_reflection_symmetry),
    ("sector_completeness", check_sector_completeness),
    ("annulus_equivalence", check_annulus_equivalence),
    ("ladder_periodicity", check_ladder_periodicity),
    ("stokes_defect", check_stokes_defect),
    ("solver_cross_validation", check_solver_cross_validation),
)


def run_verification(seed: int = 12345, broken_seam: bool = False) -> list:
    """Run every check; exceptions count as failures, never abort the suite."""
    results = []
    for name, func in CHECKS:
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            passed, detail = func(rng, broken_seam=broken_seam)
        except Exception as exc:  # a raising check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(
            CheckResult(name=name, passed=passed, detail=detail,
                        seconds=time.perf_counter() - start)
        )
    return results

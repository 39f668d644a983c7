"""Magnetic tight-binding Hamiltonian and reflection-parity sectors.

Units: hbar = 1, lattice spacing 1, and the hopping energy t = 1/(2 m a^2)
absorbs the particle mass, so energies are reported in units of the x
hopping.  The discrete kinetic term puts 2*tx + 2*ty on every diagonal
(also at Dirichlet walls, where the missing neighbor simply contributes
no hop) and -t * exp(i*theta) on every existing link, theta being the
gauge field's Peierls angle for the hop direction.

The reflection y -> -y commutes with any assembled operator whose angles
and potential share that symmetry; its even and odd eigenspaces are the
sectors.  Odd-sector states vanish identically on the center row, which
is what realizes nodal states on the middle circle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .gauge import GaugeField
from .lattice import (
    DIR_PX,
    DIR_PY,
    LatticeError,
    Site,
    StripLattice,
    neighbor,
)

EVEN = "even"
ODD = "odd"
PARITIES = (EVEN, ODD)

_HERM_BUILD_TOL = 1e-12
_CROSS_BLOCK_TOL = 1e-12


class SymmetryViolationError(ValueError):
    """Operator is not reflection symmetric; sector restriction refused."""


@dataclass(frozen=True)
class HoppingParams:
    """Hopping energies; ty = 0 is the decoupled-chain limit."""

    tx: float = 1.0
    ty: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.tx) and self.tx > 0):
            raise ValueError(f"tx must be finite and > 0, got {self.tx}")
        if not (np.isfinite(self.ty) and self.ty >= 0):
            raise ValueError(f"ty must be finite and >= 0, got {self.ty}")


class SparseHermitian:
    """Sparse complex matrix with exact Hermitian symmetry.

    Construction verifies max |H - H^dagger| <= 1e-12 and then stores the
    exactly symmetrized (H + H^dagger)/2, whose Hermiticity holds
    entrywise in floating point, with a real diagonal.
    """

    def __init__(self, matrix):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix is {m.shape}, not square")
        defect = m - m.conj().T
        if defect.nnz and np.max(np.abs(defect.data)) > _HERM_BUILD_TOL:
            raise ValueError(
                f"matrix is not Hermitian: max defect {np.max(np.abs(defect.data)):.3e}"
            )
        m = ((m + m.conj().T) * 0.5).tocsr()
        m.sum_duplicates()
        self._csr = m

    @property
    def n(self) -> int:
        return self._csr.shape[0]

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def csr(self):
        return self._csr

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self._csr @ v

    def hermiticity_defect(self) -> float:
        d = self._csr - self._csr.conj().T
        return 0.0 if d.nnz == 0 else float(np.max(np.abs(d.data)))


def assemble(lat: StripLattice, field: GaugeField, hop: HoppingParams,
             pot: Optional[np.ndarray] = None) -> SparseHermitian:
    """Assemble the lattice Schrodinger operator with Peierls link phases.

    ``pot`` is an optional on-site potential, shape (nx, ny) or flat
    (nx*ny,), in units of the hopping; omitted means zero.
    """
    if field.lattice != lat:
        raise LatticeError("gauge field lives on a different lattice")
    n = lat.n_sites
    v = np.zeros(n)
    if pot is not None:
        v = np.asarray(pot, dtype=float).reshape(-1)
        if v.shape != (n,):
            raise LatticeError(f"potential has {v.size} entries, lattice has {n} sites")
        if not np.all(np.isfinite(v)):
            raise LatticeError("potential must be finite")
    rows, cols, vals = [], [], []

    def put(r, c, z):
        rows.append(r)
        cols.append(c)
        vals.append(z)

    diag = 2.0 * hop.tx + 2.0 * hop.ty
    for site in lat.sites():
        sid = lat.site_id(site)
        put(sid, sid, diag + v[sid])
        tx_hop = -hop.tx * np.exp(1j * field.theta_x[site.i, site.j])
        nbx = neighbor(lat, site, DIR_PX)
        put(lat.site_id(nbx), sid, tx_hop)
        put(sid, lat.site_id(nbx), np.conj(tx_hop))
        if site.j < lat.ny - 1 and hop.ty != 0.0:
            ty_hop = -hop.ty * np.exp(1j * field.theta_y[site.i, site.j])
            nby = neighbor(lat, site, DIR_PY)
            put(lat.site_id(nby), sid, ty_hop)
            put(sid, lat.site_id(nby), np.conj(ty_hop))
    return SparseHermitian(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)))


def ring_spectrum_oracle(nx: int, f: float) -> np.ndarray:
    """Closed-form spectrum of the single-row ring at tx = 1.

    Plane waves diagonalize the ring exactly: the eigenvalues are
    2 - 2*cos(2*pi*(k + f)/nx) for k = 0..nx-1, sorted ascending.  Used
    as an independent check on assembly plus eigensolver.
    """
    k = np.arange(nx)
    return np.sort(2.0 - 2.0 * np.cos(2.0 * np.pi * (k + f) / nx))


def reflection_permutation(lat: StripLattice) -> np.ndarray:
    """Site-id permutation of the reflection (i, j) -> (i, ny-1-j)."""
    lat.center_row  # requires odd ny
    perm = np.empty(lat.n_sites, dtype=int)
    for site in lat.sites():
        perm[lat.site_id(site)] = lat.site_id(Site(site.i, lat.ny - 1 - site.j))
    return perm


@dataclass(frozen=True)
class SectorIsometry:
    """Orthonormal embedding of one reflection-parity subspace.

    Columns are (e(i,j) -/+ e(i,ny-1-j))/sqrt(2) over rows below center,
    plus, for the even sector, the bare center-row sites.  Each column
    touches at most two sites, so orthonormality is exact.
    """

    lattice: StripLattice
    parity: str
    matrix: sp.csc_matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def embed(self, vec: np.ndarray) -> np.ndarray:
        """Map a sector vector back to the full site basis."""
        return self.matrix @ vec


def sector_isometry(lat: StripLattice, parity: str) -> SectorIsometry:
    """Build the isometry onto the even or odd reflection sector."""
    if parity not in PARITIES:
        raise ValueError(f"parity must be one of {PARITIES}, got {parity!r}")
    c = lat.center_row
    sign = 1.0 if parity == EVEN else -1.0
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    rows, cols, vals = [], [], []
    col = 0
    for i in range(lat.nx):
        for j in range(c):
            rows.append(lat.site_id(Site(i, j)))
            cols.append(col)
            vals.append(inv_sqrt2)
            rows.append(lat.site_id(Site(i, lat.ny - 1 - j)))
            cols.append(col)
            vals.append(sign * inv_sqrt2)
            col += 1
    if parity == EVEN:
        for i in range(lat.nx):
            rows.append(lat.site_id(Site(i, c)))
            cols.append(col)
            vals.append(1.0)
            col += 1
    matrix = sp.csc_matrix((vals, (rows, cols)), shape=(lat.n_sites, col))
    return SectorIsometry(lattice=lat, parity=parity, matrix=matrix)


def restrict(h: SparseHermitian, iso: SectorIsometry) -> SparseHermitian:
    """Project the operator into one parity sector, B^dagger H B.

    Refuses operators that couple the sectors: the even-odd cross block
    must vanish to 1e-12 in max magnitude, which is the numerical form of
    requiring reflection-symmetric angles and potential.
    """
    if h.n != iso.lattice.n_sites:
        raise ValueError(f"operator dimension {h.n} != lattice size {iso.lattice.n_sites}")
    other = sector_isometry(iso.lattice, EVEN if iso.parity == ODD else ODD)
    cross = (other.matrix.T @ (h.csr @ iso.matrix)).tocoo()
    if cross.nnz:
        worst = float(np.max(np.abs(cross.data)))
        if worst > _CROSS_BLOCK_TOL:
            raise SymmetryViolationError(
                f"operator couples even and odd sectors (cross block {worst:.3e})"
            )
    return SparseHermitian(iso.matrix.T @ (h.csr @ iso.matrix))

"""Flux-form assembly of ``-div(a grad u) + V u`` on a structured grid."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .coefficients import CoefficientField, MollifiedPotential
from .grid import Grid


class AssemblyError(ValueError):
    pass


def _harmonic(a, b):
    return 2.0 * a * b / (a + b)


@dataclass(eq=False)
class DiscreteOperator:
    """Assembled operator with its symmetric, volume-weighted stiffness form.

    ``stiffness`` is ``W L`` before any boundary treatment, with ``W`` the
    diagonal of control volumes; it is symmetric whenever ``a_ij`` is.
    ``matrix`` is ``L`` itself with Dirichlet rows replaced by identity rows.

    Face data (``face_left``, ``face_right``, ``face_geom``, ``face_coef``)
    keep ``area / spacing`` and the harmonic-mean coefficient of every face
    touching an interior node, for energy quadratures.
    """

    grid: Grid
    stiffness: sp.csr_matrix
    potential: np.ndarray
    face_left: np.ndarray
    face_right: np.ndarray
    face_geom: np.ndarray
    face_coef: np.ndarray
    isotropic: bool
    cross: sp.csr_matrix | None = None

    @property
    def volumes(self) -> np.ndarray:
        return self.grid.volumes

    @property
    def dirichlet(self) -> np.ndarray:
        return self.grid.boundary

    @cached_property
    def interior_index(self) -> np.ndarray:
        return np.flatnonzero(~self.grid.boundary)

    @cached_property
    def boundary_index(self) -> np.ndarray:
        return np.flatnonzero(self.grid.boundary)

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """``L`` in compressed rows, identity on Dirichlet rows, no stored zeros."""
        inv_w = 1.0 / self.volumes
        inv_w[self.dirichlet] = 0.0
        m = sp.diags(inv_w) @ self.stiffness
        m = m + sp.diags(self.dirichlet.astype(float))
        m = sp.csr_matrix(m)
        m.eliminate_zeros()
        m.sort_indices()
        return m

    @cached_property
    def reduced(self) -> tuple[sp.csr_matrix, sp.csr_matrix]:
        """``(K_II, K_IB)``: interior block and interior-to-boundary coupling."""
        k = self.stiffness
        ii = self.interior_index
        bb = self.boundary_index
        kii = sp.csr_matrix(k[ii][:, ii])
        kib = sp.csr_matrix(k[ii][:, bb])
        kii.eliminate_zeros()
        return kii, kib

    def apply(self, u: np.ndarray) -> np.ndarray:
        """``L u`` at every node (Dirichlet rows give the raw value)."""
        return self.matrix @ u

    def gradient_energy(self, u: np.ndarray, weighted: bool = True) -> float:
        """``int a |grad u|^2`` (or ``int |grad u|^2`` if not ``weighted``)."""
        du = u[self.face_left] - u[self.face_right]
        g = self.face_geom * (self.face_coef if weighted else 1.0)
        e = float(np.sum(g * du * du))
        if weighted and self.cross is not None:
            e += float(u @ (self.cross @ u))
        return e

    def potential_energy(self, u: np.ndarray) -> float:
        """``int V u^2`` over interior nodes."""
        ii = self.interior_index
        return float(np.sum(self.volumes[ii] * self.potential[ii] * u[ii] ** 2))

    def bilinear(self, psi: np.ndarray, u: np.ndarray) -> float:
        """Discrete ``int a grad psi . grad u + int V psi u``."""
        dp = psi[self.face_left] - psi[self.face_right]
        du = u[self.face_left] - u[self.face_right]
        out = float(np.sum(self.face_geom * self.face_coef * dp * du))
        if self.cross is not None:
            out += float(psi @ (self.cross @ u))
        ii = self.interior_index
        out += float(np.sum(self.volumes[ii] * self.potential[ii] * psi[ii] * u[ii]))
        return out


def _centered_difference(grid: Grid, axis: int, active: np.ndarray) -> sp.csr_matrix:
    """``(u[i+1] - u[i-1]) / (x[i+1] - x[i-1])`` along ``axis`` at active nodes."""
    shape = grid.shape
    idx = np.arange(grid.size).reshape(shape)
    x = grid.axes[axis]
    rows, cols, vals = [], [], []
    sl_c = [slice(None)] * grid.dim
    sl_p = [slice(None)] * grid.dim
    sl_m = [slice(None)] * grid.dim
    sl_c[axis] = slice(1, -1)
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(0, -2)
    c = idx[tuple(sl_c)].ravel()
    pl = idx[tuple(sl_p)].ravel()
    mi = idx[tuple(sl_m)].ravel()
    span = (x[2:] - x[:-2]).reshape([-1 if m == axis else 1 for m in range(grid.dim)])
    span = np.broadcast_to(span, idx[tuple(sl_c)].shape).ravel()
    keep = active[c]
    c, pl, mi, span = c[keep], pl[keep], mi[keep], span[keep]
    rows = np.concatenate([c, c])
    cols = np.concatenate([pl, mi])
    vals = np.concatenate([1.0 / span, -1.0 / span])
    return sp.csr_matrix((vals, (rows, cols)), shape=(grid.size, grid.size))


def assemble_operator(grid: Grid, coeffs: CoefficientField, pot: MollifiedPotential | None,
                      t: float = 0.0) -> DiscreteOperator:
    """Assemble ``-div(a grad .) + V .`` in flux form.

    Face coefficients are harmonic means of the nodal ``a_kk``; off-diagonal
    tensor entries (cartesian grids only) enter through centered differences
    in the symmetric form ``sum_kl D_k^T diag(W a_kl) D_l``.  The potential
    is sampled at the nodes and only at non-Dirichlet ones.
    """
    n = grid.size
    interior = ~grid.boundary
    x = grid.coords
    if coeffs.isotropic:
        a_nodes = np.asarray(coeffs._call(coeffs.scalar, x, t), dtype=float)
        a_diag = np.repeat(a_nodes[:, None], grid.dim, axis=1)
    else:
        if grid.geometry != "cartesian":
            raise AssemblyError("anisotropic coefficients need a cartesian grid")
        a_diag = coeffs.diagonal(x, t)

    lefts, rights, geoms, coefs = [], [], [], []
    for k in range(grid.dim):
        left, right, spacing, area = grid.faces(k)
        touch = interior[left] | interior[right]
        left, right, spacing, area = left[touch], right[touch], spacing[touch], area[touch]
        lefts.append(left)
        rights.append(right)
        geoms.append(area / spacing)
        coefs.append(_harmonic(a_diag[left, k], a_diag[right, k]))
    fl = np.concatenate(lefts)
    fr = np.concatenate(rights)
    fg = np.concatenate(geoms)
    fc = np.concatenate(coefs)
    c = fg * fc

    if pot is None:
        vnode = np.zeros(n)
    else:
        vnode = np.zeros(n)
        vnode[interior] = pot.value(grid.radius[interior])
        if not np.all(np.isfinite(vnode)):
            raise AssemblyError("potential is not finite at an interior node")

    diag = np.bincount(fl, weights=c, minlength=n) + np.bincount(fr, weights=c, minlength=n)
    diag += grid.volumes * vnode
    rows = np.concatenate([fl, fr, np.arange(n)])
    cols = np.concatenate([fr, fl, np.arange(n)])
    vals = np.concatenate([-c, -c, diag])
    k_mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    cross = None
    if not coeffs.isotropic:
        full = coeffs.matrix(x, t)
        w = grid.volumes * interior
        dops = [_centered_difference(grid, k, interior) for k in range(grid.dim)]
        cross = sp.csr_matrix((n, n))
        for k in range(grid.dim):
            for l in range(grid.dim):
                if k == l:
                    continue
                akl = full[:, k, l]
                if not np.any(akl):
                    continue
                cross = cross + dops[k].T @ sp.diags(w * akl) @ dops[l]
        cross = sp.csr_matrix(cross)
        k_mat = sp.csr_matrix(k_mat + cross)
    k_mat.eliminate_zeros()
    k_mat.sort_indices()
    return DiscreteOperator(grid=grid, stiffness=k_mat, potential=vnode, face_left=fl,
                            face_right=fr, face_geom=fg, face_coef=fc,
                            isotropic=coeffs.isotropic, cross=cross)


def is_m_matrix_rows(mat: sp.csr_matrix, rows: np.ndarray | None = None, atol: float = 0.0):
    """Check nonpositive off-diagonals and weak diagonal dominance on ``rows``.

    Returns ``(ok, worst_offdiag, worst_dominance)``.
    """
    m = sp.csr_matrix(mat)
    if rows is None:
        rows = np.arange(m.shape[0])
    sub = m[rows]
    coo = sub.tocoo()
    is_diag = coo.col == rows[coo.row]
    off = coo.data[~is_diag]
    worst_off = float(off.max()) if off.size else -math.inf
    diag = np.zeros(len(rows))
    np.add.at(diag, coo.row[is_diag], coo.data[is_diag])
    offsum = np.zeros(len(rows))
    np.add.at(offsum, coo.row[~is_diag], np.abs(coo.data[~is_diag]))
    dominance = float(np.min(diag - offsum)) if len(rows) else math.inf
    scale = float(np.max(np.abs(diag))) if len(rows) else 1.0
    ok = worst_off <= atol * scale and dominance >= -atol * scale - 1e-12 * scale
    return ok, worst_off, dominance

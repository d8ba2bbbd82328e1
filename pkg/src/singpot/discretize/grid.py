"""Tensor-product grids, uniform or graded toward the origin."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

GEOMETRIES = ("cartesian", "axisymmetric", "radial")
DEFAULT_NODE_BUDGET = 4_000_000


def _half_integer_lattice(n: int) -> tuple[np.ndarray, float]:
    """``n`` points at half-integer multiples of ``h = 2/(n-1)``.

    Even ``n`` fills [-1, 1] symmetrically; odd ``n`` runs from ``-1 + h/2``
    to ``1 + h/2``.  Zero is never a lattice point.
    """
    h = 2.0 / (n - 1)
    m = n // 2
    j = np.arange(-m, n - m)
    return (j + 0.5) * h, h


def _grade(s: np.ndarray, p: float) -> np.ndarray:
    return np.sign(s) * np.abs(s) ** p


@dataclass(frozen=True, eq=False)
class Grid:
    """Structured grid over a box, with the unit ball carved out by a Dirichlet mask.

    ``geometry`` is one of

    * ``"cartesian"``: nodes are points of R^dim;
    * ``"axisymmetric"``: dim 2, axes (rho, z) of a 3-D body of revolution;
    * ``"radial"``: dim 1, the radius of a ``d``-dimensional radial problem.

    ``boundary`` flags every Dirichlet node: the outer layer of the box and,
    when ``ball_radius`` is set, all nodes with ``|x| >= ball_radius``.
    """

    axes: tuple
    geometry: str = "cartesian"
    grading: float = 0.0
    ball_radius: float | None = 1.0
    d: int = 3
    boundary: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry!r}")
        for ax in self.axes:
            if np.any(np.diff(ax) <= 0):
                raise ValueError("axis coordinates must be strictly increasing")
        if self.boundary is None:
            object.__setattr__(self, "boundary", self._default_boundary())
        if not np.any(~self.boundary):
            raise ValueError("grid has no interior nodes")

    # -- shape ------------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def coords(self) -> np.ndarray:
        """Node coordinates, shape ``(size, dim)``, C order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def radius(self) -> np.ndarray:
        """Distance of every node from the origin of the physical space."""
        return np.sqrt(np.sum(self.coords ** 2, axis=1))

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    def distance_to(self, y) -> np.ndarray:
        """Physical distance ``|x - y|``; ``y`` in grid coordinates."""
        y = np.asarray(y, dtype=float)
        if self.geometry == "axisymmetric" and y[0] != 0.0:
            raise ValueError("axisymmetric grids only support points on the axis")
        return np.sqrt(np.sum((self.coords - y[None, :]) ** 2, axis=1))

    # -- spacings and measures --------------------------------------------
    @cached_property
    def face_spacing(self) -> tuple[np.ndarray, ...]:
        return tuple(np.diff(a) for a in self.axes)

    @cached_property
    def dual_bounds(self) -> tuple[np.ndarray, ...]:
        """Per-axis control-volume edges (length ``n + 1``)."""
        out = []
        for k, a in enumerate(self.axes):
            mid = 0.5 * (a[1:] + a[:-1])
            # the first axisymmetric cell reaches down to the axis
            lo = 0.0 if (self.geometry == "axisymmetric" and k == 0) else a[0]
            out.append(np.concatenate([[lo], mid, [a[-1]]]))
        return tuple(out)

    @cached_property
    def dual_spacing(self) -> tuple[np.ndarray, ...]:
        return tuple(np.diff(b) for b in self.dual_bounds)

    @cached_property
    def local_spacing(self) -> np.ndarray:
        """Largest adjacent face spacing at each node, over all axes."""
        per_axis = []
        for k, h in enumerate(self.face_spacing):
            left = np.concatenate([[h[0]], h])
            right = np.concatenate([h, [h[-1]]])
            hk = np.maximum(left, right)
            shape = [1] * self.dim
            shape[k] = -1
            per_axis.append(np.broadcast_to(hk.reshape(shape), self.shape))
        return np.max(np.stack(per_axis), axis=0).ravel()

    @cached_property
    def volumes(self) -> np.ndarray:
        """Control-volume measure of each node in the physical ``d``-space."""
        if self.geometry == "cartesian":
            parts = self.dual_spacing
        elif self.geometry == "axisymmetric":
            b = self.dual_bounds[0]
            parts = (math.pi * (b[1:] ** 2 - b[:-1] ** 2), self.dual_spacing[1])
        else:
            b = self.dual_bounds[0]
            d = self.d
            omega = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)
            parts = (omega / d * (b[1:] ** d - b[:-1] ** d),)
        vol = parts[0]
        for p in parts[1:]:
            vol = np.multiply.outer(vol, p)
        return np.asarray(vol).ravel()

    def faces(self, axis: int):
        """Faces normal to ``axis``: ``(left, right, spacing, area)``.

        ``left``/``right`` are flat node indices, ``spacing`` the node
        distance across the face and ``area`` the face measure.
        """
        shape = self.shape
        idx = np.arange(self.size).reshape(shape)
        sl_l = [slice(None)] * self.dim
        sl_r = [slice(None)] * self.dim
        sl_l[axis] = slice(0, -1)
        sl_r[axis] = slice(1, None)
        left = idx[tuple(sl_l)].ravel()
        right = idx[tuple(sl_r)].ravel()

        h = self.face_spacing[axis]
        if self.geometry == "cartesian":
            area_parts = [self.dual_spacing[m] if m != axis else np.ones_like(h)
                          for m in range(self.dim)]
        elif self.geometry == "axisymmetric":
            b = self.dual_bounds[0]
            if axis == 0:
                rho_f = 0.5 * (self.axes[0][1:] + self.axes[0][:-1])
                area_parts = [2.0 * math.pi * rho_f, self.dual_spacing[1]]
            else:
                area_parts = [math.pi * (b[1:] ** 2 - b[:-1] ** 2), np.ones_like(h)]
        else:
            d = self.d
            omega = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)
            r_f = 0.5 * (self.axes[0][1:] + self.axes[0][:-1])
            area_parts = [omega * r_f ** (d - 1)]
        area = area_parts[0]
        for p in area_parts[1:]:
            area = np.multiply.outer(area, p)
        spacing = np.broadcast_to(
            h.reshape([-1 if m == axis else 1 for m in range(self.dim)]),
            tuple(len(h) if m == axis else shape[m] for m in range(self.dim)),
        )
        return left, right, np.ascontiguousarray(spacing).ravel(), np.asarray(area).ravel()

    def neighbors(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Axis-neighbor pairs ``(left, right)`` for every axis."""
        return [self.faces(k)[:2] for k in range(self.dim)]

    # -- masks ------------------------------------------------------------
    def _default_boundary(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for k in range(self.dim):
            if (self.geometry == "axisymmetric" and k == 0) or self.geometry == "radial":
                # the axis rho = 0 is a symmetry line, not a boundary
                sl = [slice(None)] * self.dim
                sl[k] = -1
                mask[tuple(sl)] = True
                if self.geometry == "radial":
                    mask[0] = True
                continue
            for end in (0, -1):
                sl = [slice(None)] * self.dim
                sl[k] = end
                mask[tuple(sl)] = True
        mask = mask.ravel()
        if self.ball_radius is not None and self.geometry != "radial" and self.dim > 1:
            mask |= self.radius >= self.ball_radius * (1.0 - 1e-12)
        return mask

    def ball(self, radius: float, center=None, *, include_boundary: bool = False) -> np.ndarray:
        """Mask of nodes with ``|x - center| < radius``."""
        if center is None:
            dist = self.radius
        else:
            dist = self.distance_to(center)
        m = dist < radius
        if not include_boundary:
            m &= ~self.boundary
        return m

    def outer_neighbors(self, mask: np.ndarray) -> np.ndarray:
        """Nodes outside ``mask`` sharing a face with a node inside it."""
        out = np.zeros(self.size, dtype=bool)
        for left, right in self.neighbors():
            a = mask[left] & ~mask[right]
            out[right[a]] = True
            b = mask[right] & ~mask[left]
            out[left[b]] = True
        return out


def build_grid(dim: int, counts, grading: float = 0.0, *, geometry: str | None = None,
               d: int | None = None, ball_radius: float | None = 1.0,
               node_budget: int = DEFAULT_NODE_BUDGET) -> Grid:
    """Build a tensor grid, optionally graded toward the origin.

    Parameters
    ----------
    dim : int
        Number of grid axes (1, 2 or 3).
    counts : sequence of int
        Nodes per axis, each at least 3.
    grading : float
        Strength ``gamma`` in [0, 1).  A uniform parameter lattice ``s`` is
        mapped by ``x = sign(s) |s|^p`` with ``p = 1/(1 - gamma)``, so local
        spacing grows like ``|x|^gamma`` and the smallest spacing shrinks by
        about ``(1/N)^(gamma/(1-gamma))`` against the uniform one.
    geometry : str, optional
        ``"cartesian"`` (default), ``"axisymmetric"`` (dim 2) or
        ``"radial"`` (dim 1).
    d : int, optional
        Physical dimension; defaults to ``dim`` for cartesian grids and 3
        otherwise.
    ball_radius : float or None
        Nodes at or beyond this radius become Dirichlet nodes.

    Notes
    -----
    One-dimensional grids live on [0, 1] with both end nodes Dirichlet, so
    the origin (the radial pole) is a boundary node and the potential is
    never evaluated there.  In two and three dimensions the lattice sits at
    half-integer offsets and no node coincides with the origin.
    """
    counts = [int(c) for c in np.atleast_1d(counts)]
    if len(counts) != dim or dim not in (1, 2, 3):
        raise ValueError("need one count per axis and dim in {1, 2, 3}")
    if any(c < 3 for c in counts):
        raise ValueError("every axis needs at least 3 nodes")
    if not 0.0 <= grading < 1.0:
        raise ValueError("grading strength must lie in [0, 1)")
    if int(np.prod(counts)) > node_budget:
        raise ValueError(f"{int(np.prod(counts))} nodes exceed the budget of {node_budget}")
    if geometry is None:
        geometry = "cartesian"
    if geometry == "axisymmetric" and dim != 2:
        raise ValueError("axisymmetric grids are two-dimensional")
    if geometry == "radial" and dim != 1:
        raise ValueError("radial grids are one-dimensional")
    if d is None:
        d = dim if geometry == "cartesian" else 3
    p = 1.0 / (1.0 - grading)

    axes = []
    for k, n in enumerate(counts):
        if dim == 1:
            s = np.linspace(0.0, 1.0, n)
        elif geometry == "axisymmetric" and k == 0:
            h = 1.0 / (n - 0.5)
            s = (np.arange(n) + 0.5) * h
        else:
            s, _ = _half_integer_lattice(n)
        axes.append(_grade(s, p) if grading > 0 else s)
    return Grid(axes=tuple(axes), geometry=geometry, grading=grading,
                ball_radius=ball_radius, d=int(d))

"""Matplotlib figures for CLI reports. Everything renders off-screen to files."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_polygon_measure", "plot_ma", "plot_boundary", "plot_spectrum", "save"]

_META = {"Software": None}


def save(fig, path):
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return str(path)


def _polygon(ax, p, **kw):
    pts = np.array([[float(c) for c in v] for v in p.vertices])
    if len(pts) > 2:
        d = pts - pts.mean(axis=0)
        pts = pts[np.argsort(np.arctan2(d[:, 1], d[:, 0]))]
        pts = np.vstack([pts, pts[:1]])
    ax.plot(pts[:, 0], pts[:, 1], **kw)


def plot_polygon_measure(p, measure, path):
    """Polygon with its surface-measure atoms drawn as normals scaled by mass."""
    fig, ax = plt.subplots(figsize=(4, 4))
    _polygon(ax, p, color="k", lw=1.2)
    for (a, b, _), w in zip(_edges_by_normal(p), measure.area_vectors):
        mid = (float(a[0] + b[0]) / 2, float(a[1] + b[1]) / 2)
        ax.arrow(mid[0], mid[1], float(w[0]) / 2, float(w[1]) / 2, head_width=0.05, color="C3")
    ax.set_aspect("equal")
    ax.set_title("surface area measure")
    return save(fig, path)


def _edges_by_normal(p):
    out = []
    for fc in p.facets:
        i, j = fc.vertices
        out.append((p.vertices[i], p.vertices[j], fc.normal))
    return out


def plot_ma(f, measure, path):
    """Atoms of MA(f) in x-space (left) and the slope hull cut into gradient images (right)."""
    from .monge_ampere import _dot
    from .bodies import Polytope

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 4))
    if measure.points:
        pts = np.array([[float(c) for c in p] for p in measure.points])
        mass = np.array([float(m) for m in measure.masses])
        ax1.scatter(pts[:, 0], pts[:, 1], s=40 * mass / mass.max() + 5, color="C0")
        for x, m in zip(measure.points, measure.masses):
            ax1.annotate(str(m), (float(x[0]), float(x[1])), fontsize=7, xytext=(3, 3), textcoords="offset points")
            value = f(x)
            cell = Polytope([a for a, b in f.pieces if _dot(a, x) + b == value], 2)
            _polygon(ax2, cell, color="C1", lw=0.8)
    hull = Polytope(f.slopes, 2)
    if hull.dim == 2:
        _polygon(ax2, hull, color="k", lw=1.2)
    ax1.set_title("MA atoms")
    ax2.set_title("gradient images")
    for ax in (ax1, ax2):
        ax.set_aspect("equal")
    return save(fig, path)


def plot_boundary(p, measure, path):
    fig, ax = plt.subplots(figsize=(4, 4))
    _polygon(ax, p, color="k", lw=1.0)
    if measure.points:
        pts = np.array([[float(c) for c in q] for q in measure.points])
        mass = np.abs(np.array([float(m) for m in measure.masses]))
        ax.scatter(pts[:, 0], pts[:, 1], s=60 * mass / max(mass.max(), 1e-300) + 5, color="C2")
    ax.set_aspect("equal")
    ax.set_title("boundary Monge-Ampere atoms")
    return save(fig, path)


def plot_spectrum(eigs_by_level, tols, path):
    """Sorted eigenvalues per level with the zero band shaded."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for k, (level, eigs) in enumerate(eigs_by_level):
        w = np.sort(np.asarray(eigs))[::-1]
        ax.plot(np.arange(len(w)), w, "o", ms=3, color=f"C{k}", label=f"level {level}")
        ax.axhspan(-tols[k], tols[k], color=f"C{k}", alpha=0.15)
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.legend(frameon=False)
    fig.tight_layout()
    return save(fig, path)

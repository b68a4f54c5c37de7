"""Deterministic SVG rendering of embedded point sets.

Points are placed by the stored plot coordinates when present, otherwise by
the first two non-constant basis rows (one row maps to a horizontal strip).
Boundary points render as filled dots, hull members get a highlight ring.
Output bytes are a pure function of the input: fixed precision, stable
ordering, no timestamps.
"""

import numpy as np

from .errors import ValidationError

_SIZE = 420.0
_PAD = 30.0


def projection(system, axes=None):
    """2-D coordinates for plotting; ``axes`` picks basis rows explicitly."""
    if axes is not None:
        axes = tuple(int(a) for a in axes)
        if len(axes) > 2:
            raise ValidationError("at most two projection axes")
        for a in axes:
            if not 0 <= a < system.d:
                raise ValidationError(f"projection axis {a} out of range [0, {system.d})")
        if len(axes) == 2:
            return np.column_stack([system.basis[axes[0]], system.basis[axes[1]]])
        return np.column_stack([system.basis[axes[0]], np.zeros(system.n)])
    if system.space.coords is not None:
        return np.asarray(system.space.coords, dtype=float)
    spread = system.basis.max(axis=1) - system.basis.min(axis=1)
    live = [i for i in range(system.d) if spread[i] > 1e-12]
    if not live:
        raise ValidationError("all basis rows are constant; nothing to plot")
    if len(live) == 1:
        return np.column_stack([system.basis[live[0]], np.zeros(system.n)])
    return np.column_stack([system.basis[live[0]], system.basis[live[1]]])


def render_svg(system, boundary=(), hull=(), axes=None):
    """Render the space as a standalone SVG document string."""
    xy = projection(system, axes=axes)
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    span = np.where(hi - lo > 1e-12, hi - lo, 1.0)

    def place(p):
        u = (p - lo) / span
        x = _PAD + u[0] * (_SIZE - 2 * _PAD)
        y = _SIZE - _PAD - u[1] * (_SIZE - 2 * _PAD)
        return x, y

    boundary = set(boundary)
    hull = set(hull)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE:.0f}" '
        f'height="{_SIZE:.0f}" viewBox="0 0 {_SIZE:.0f} {_SIZE:.0f}">',
        f'<rect width="{_SIZE:.0f}" height="{_SIZE:.0f}" fill="white"/>',
    ]
    for j in range(system.n):
        x, y = place(xy[j])
        if j in hull:
            parts.append(
                f'<circle cx="{x:.3f}" cy="{y:.3f}" r="7" fill="none" '
                'stroke="#e08020" stroke-width="2"/>'
            )
        fill = "#204080" if j in boundary else "#b0b8c8"
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3.5" fill="{fill}"/>')
        parts.append(
            f'<text x="{x + 5:.3f}" y="{y - 5:.3f}" font-size="9" '
            f'font-family="monospace">{_esc(system.space.labels[j])}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _esc(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")

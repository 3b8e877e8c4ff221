"""Independent reference computations built on sympy, used to pin frozen values."""

import sympy as sp

from dermod.scomplex import SemiSimplicialSet


def sympy_rank(rows, ncols=None):
    if not rows:
        return 0
    return sp.Matrix(rows).rank()


def betti_numbers(space: SemiSimplicialSet) -> list[int]:
    """Rational Betti numbers from sympy ranks of the boundary matrices."""
    ranks = []
    for p in range(space.dim + 1):
        rows = []
        for sigma in space.simplices_of(p + 1):
            row = [0] * space.count(p)
            idx = {s: k for k, s in enumerate(space.simplices_of(p))}
            for i, f in enumerate(space.faces[sigma]):
                row[idx[f]] += (-1) ** i
            rows.append(row)
        ranks.append(sp.Matrix(rows).rank() if rows else 0)
    return [space.count(p) - ranks[p] - (ranks[p - 1] if p else 0) for p in range(space.dim + 1)]


def _mat(prefix, r):
    return sp.Matrix(r, r, lambda a, b: sp.Symbol(f"{prefix}_{a}{b}"))


def twisted_dims(space: SemiSimplicialSet, edges: dict, r: int, restricted: bool = True):
    """Tangent dims (H^0, H^1) at a flat connection on a space of dimension <= 2.

    Linearizes the flatness map X(d0 s) X(d2 s) - X(d1 s) and the gauge action
    (1 + Y_t) X (1 - Y_s) by symbolic Jacobians at the given point.
    """
    assert space.dim <= 2
    xs = {e.id: _mat(f"x{e.id}", r) for e in space.simplices_of(1)}
    variables = [s for e in space.simplices_of(1) for s in xs[e.id]]
    subs = {}
    for e in space.simplices_of(1):
        m = sp.Matrix(edges[e.id])
        for a in range(r):
            for b in range(r):
                subs[xs[e.id][a, b]] = m[a, b]
    eqs = []
    for s in space.simplices_of(2):
        f0, f1, f2 = space.faces[s]
        eqs.extend(list(xs[f0.id] * xs[f2.id] - xs[f1.id]))
    rank1 = sp.Matrix(eqs).jacobian(variables).subs(subs).rank() if eqs else 0
    rank0 = 0
    if restricted:
        verts = [v for v in space.simplices_of(0) if v.id != space.basepoint]
        ys = {v.id: _mat(f"y{v.id}", r) for v in verts}
        yvars = [s for v in verts for s in ys[v.id]]
        if yvars:
            zero = {s: 0 for s in yvars}
            ident = sp.eye(r)
            gauge = []
            for e in space.simplices_of(1):
                src, tgt = space.faces[e][1].id, space.faces[e][0].id
                yt = ys.get(tgt, sp.zeros(r, r))
                ysrc = ys.get(src, sp.zeros(r, r))
                gauge.extend(list((ident + yt) * sp.Matrix(edges[e.id]) * (ident - ysrc)))
            rank0 = sp.Matrix(gauge).jacobian(yvars).subs(zero).rank()
    n_edges = r * r * space.count(1)
    n_tris = r * r * space.count(2) if space.dim >= 2 else 0
    h0 = n_edges - rank1 - rank0
    return (h0, n_tris - rank1) if space.dim == 2 else (h0,)

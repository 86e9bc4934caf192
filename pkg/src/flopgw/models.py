"""Local toy geometries around a (-1,-1) curve C in a 3-fold X.

H_2(X) has basis (C, h), where h is a second curve meeting C in ``k``
points. The blow-up along C has H_2 coordinates (b0, b1, l) in which

    gamma = (0,0,1)   fiber of E -> C, contracted by p1
    c     = (1,0,1)   the other ruling of E, contracted by p1'
    d     = (0,1,-k)  proper transform of h

and E pairs as (0,0,-1). K_X pairs as (0, kappa); K_X.C = 0 always.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import CurveClassLattice, LatticeMap
from .transform import FlopGeometry, TransitionGeometry


@dataclass(frozen=True)
class LocalModel:
    k: int
    kappa: int
    X: CurveClassLattice
    Xt: CurveClassLattice
    Xp: CurveClassLattice
    Xpp: CurveClassLattice
    Y: CurveClassLattice
    Q: CurveClassLattice
    p1: LatticeMap
    p1p: LatticeMap
    p2: LatticeMap
    phi: LatticeMap
    phi_inv: LatticeMap
    phi_e: LatticeMap
    contraction: LatticeMap
    q_to_xpp: LatticeMap


def local_model(k: int = 1, kappa: int = -1) -> LocalModel:
    if k < 0:
        raise ValueError("k must be non-negative")
    X = CurveClassLattice("X", ["C", "h"], [(1, 0), (0, 1)], canonical=(0, kappa))
    Xt = CurveClassLattice("Xt", ["b0", "b1", "l"], [(0, 0, 1), (1, 0, 1), (0, 1, -k)],
                           divisors={"E": (0, 0, -1)}, canonical=(0, kappa, -1))
    Xp = CurveClassLattice("Xp", ["Cp", "hp"], [(1, 0), (-k, 1)], canonical=(0, kappa))
    Xpp = CurveClassLattice("Xpp", ["h"], [(1,)], canonical=(kappa,))
    Y = CurveClassLattice("Y", ["Cbar", "f"], [(1, 0), (0, 1)],
                          divisors={"E": (0, 1)}, canonical=(0, -3))
    Q = CurveClassLattice("Q", ["line"], [(1,)], divisors={"E": (1,)}, canonical=(-3,))
    p1 = LatticeMap("p1", Xt, X, [[1, 0, 0], [0, 1, 0]])
    p1p = LatticeMap("p1p", Xt, Xp, [[-1, 0, 1], [0, 1, 0]])
    p2 = LatticeMap("p2", Y, X, [[1, 0], [0, 0]])
    phi = LatticeMap("phi", X, Xp, [[-1, 0], [0, 1]])
    phi_inv = LatticeMap("phi_inv", Xp, X, [[-1, 0], [0, 1]])
    phi_e = LatticeMap("phi_e", X, Xpp, [[0, 1]])
    contraction = phi_e.compose(p1, "contract")
    q_to_xpp = LatticeMap("q", Q, Xpp, [[0]])
    return LocalModel(k, kappa, X, Xt, Xp, Xpp, Y, Q, p1, p1p, p2, phi, phi_inv,
                      phi_e, contraction, q_to_xpp)


def flop_geometry(model: LocalModel) -> FlopGeometry:
    return FlopGeometry(model.X, model.Xp, model.phi, model.phi_inv, (1, 0), (1, 0))


def transition_geometry(model: LocalModel, insertion_map=None) -> TransitionGeometry:
    return TransitionGeometry(model.X, model.Xt, model.Xpp, model.p1, model.phi_e, (1, 0),
                              ((1, 0, 1), (0, 0, 1)), "E", insertion_map or {})


def flopped_transition_geometry(model: LocalModel, insertion_map=None) -> TransitionGeometry:
    """The same transition seen from X': p1' and the rulings swap roles."""
    phi_e_p = model.phi_e.compose(model.phi_inv, "phi_e_p")
    return TransitionGeometry(model.Xp, model.Xt, model.Xpp, model.p1p, phi_e_p, (1, 0),
                              ((0, 0, 1), (1, 0, 1)), "E", insertion_map or {})

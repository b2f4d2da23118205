"""Concrete proper metric spaces with isometric actions and horofunction charts."""

from .base import BoundaryPoint, ModelError, SpaceModel
from .cone import PosDefCone
from .disk import PoincareDisk
from .euclidean import Euclidean
from .gauged import GaugedLine
from .tree import FreeGroupCayley, TreeEnd, format_word, parse_word


def distance(model, x, y):
    return model.distance(model.point(x), model.point(y))


def act(model, g, x):
    return model.act(model.element(g), model.point(x))


def phi_eval(model, x, z):
    return model.phi_eval(x, z)


def horofunction_eval(model, xi, x):
    return model.horofunction(xi, x)


def geodesic_point(model, xi, t):
    return model.geodesic_point(xi, t)


__all__ = [
    "BoundaryPoint", "Euclidean", "FreeGroupCayley", "GaugedLine", "ModelError",
    "PoincareDisk", "PosDefCone", "SpaceModel", "TreeEnd", "act", "distance",
    "format_word", "geodesic_point", "horofunction_eval", "parse_word", "phi_eval",
]

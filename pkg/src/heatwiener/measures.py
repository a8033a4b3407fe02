"""Declarative probability measures on the torus, SU(2) and Heisenberg nilmanifolds.

A measure is described by a small JSON document::

    {"geometry": "torus-1", "type": "atomic",
     "atoms": [{"point": [0.0], "weight": 0.5}, {"point": [0.5], "weight": 0.5}]}

Supported ``type`` values are ``atomic``, ``uniform``, ``cantor`` (torus-1
only), ``density`` and ``mixture``; see README.md for the full schema.
Fundamental domains: ``[0,1)^d`` on the torus, unit quaternions ``(a,b,c,d)``
on SU(2), ``[0,1)^{2n+1}`` in coordinates ``(x_1..x_n, y_1..y_n, z)`` on the
Heisenberg nilmanifold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .config import DEFAULT, NumericConfig
from .errors import (
    MassNotOne,
    NegativeWeight,
    PointOutsideDomain,
    QuadratureBudgetExceeded,
    SpecParseError,
    UnsupportedVariant,
    UnsupportedVariantForGeometry,
)

FAMILIES = ("torus", "su2", "heisenberg")


@dataclass(frozen=True)
class Geometry:
    family: str
    n: int = 1  # torus dimension d, Heisenberg index n; unused for su2

    @classmethod
    def parse(cls, tag: str) -> "Geometry":
        if tag == "su2":
            return cls("su2", 1)
        family, _, num = tag.partition("-")
        if family not in ("torus", "heisenberg") or not num.isdigit() or int(num) < 1:
            raise SpecParseError(f"unknown geometry {tag!r}; expected torus-<d>, su2 or heisenberg-<n>")
        return cls(family, int(num))

    @property
    def tag(self) -> str:
        return "su2" if self.family == "su2" else f"{self.family}-{self.n}"

    @property
    def point_dim(self) -> int:
        return {"torus": self.n, "su2": 4, "heisenberg": 2 * self.n + 1}[self.family]

    @property
    def manifold_dim(self) -> int:
        return {"torus": self.n, "su2": 3, "heisenberg": 2 * self.n + 1}[self.family]


@dataclass(frozen=True)
class Atomic:
    points: tuple[tuple[float, ...], ...]
    weights: tuple[float, ...]


@dataclass(frozen=True)
class Uniform:
    pass


@dataclass(frozen=True)
class CantorMiddleThirds:
    pass


@dataclass(frozen=True)
class Density:
    """Entry of the trigonometric density catalog.

    ``cos2_bump`` (torus, Heisenberg base coordinates)::

        rho(x) = prod_i cos^{2p}(pi (x_i - c_i)) / (binom(2p, p) / 4^p)

    ``class_cos_power`` (SU(2) class density, Haar-normalized)::

        rho(theta) = cos^{2p}(pi theta / 2) / Z_p
    """

    name: str
    power: int = 1
    center: tuple[float, ...] = ()

    @property
    def degree(self) -> int:
        """Largest nonzero frequency per coordinate (torus/Heisenberg) or in cos(pi theta) (SU(2))."""
        return self.power


Leaf = Union[Atomic, Uniform, CantorMiddleThirds, Density]


@dataclass(frozen=True)
class Mixture:
    components: tuple[tuple[float, Leaf], ...]


Variant = Union[Leaf, Mixture]


@dataclass(frozen=True)
class MeasureSpec:
    geometry: Geometry
    variant: Variant

    def leaves(self) -> list[tuple[float, Leaf]]:
        if isinstance(self.variant, Mixture):
            return list(self.variant.components)
        return [(1.0, self.variant)]

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Merged atomic part as ``(points (m, point_dim), effective weights (m,))``."""
        merged: dict[tuple[float, ...], float] = {}
        for coef, leaf in self.leaves():
            if isinstance(leaf, Atomic):
                for p, w in zip(leaf.points, leaf.weights):
                    merged[p] = merged.get(p, 0.0) + coef * w
        pts = np.array(list(merged.keys()), dtype=float).reshape(len(merged), self.geometry.point_dim)
        return pts, np.array(list(merged.values()), dtype=float)

    def continuous(self) -> list[tuple[float, Leaf]]:
        return [(c, leaf) for c, leaf in self.leaves() if not isinstance(leaf, Atomic)]

    def to_dict(self) -> dict:
        out = {"geometry": self.geometry.tag}
        out.update(_variant_to_dict(self.variant))
        return out


@dataclass(frozen=True)
class AtomGroundTruth:
    value: float


def _variant_to_dict(v: Variant) -> dict:
    if isinstance(v, Atomic):
        return {"type": "atomic", "atoms": [{"point": list(p), "weight": w} for p, w in zip(v.points, v.weights)]}
    if isinstance(v, Uniform):
        return {"type": "uniform"}
    if isinstance(v, CantorMiddleThirds):
        return {"type": "cantor"}
    if isinstance(v, Density):
        d: dict[str, Any] = {"name": v.name, "power": v.power}
        if v.center:
            d["center"] = list(v.center)
        return {"type": "density", "density": d}
    return {
        "type": "mixture",
        "components": [{"coefficient": c, "measure": _variant_to_dict(leaf)} for c, leaf in v.components],
    }


# --------------------------------------------------------------------------- parsing


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise SpecParseError(f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise SpecParseError(f"{where}: unknown field(s) {sorted(extra)}")


def _real(x: Any, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise SpecParseError(f"{where}: expected a finite number, got {x!r}")
    return float(x)


def _check_mass(total: float, tol: float, where: str) -> None:
    if abs(total - 1.0) > tol:
        raise MassNotOne(1.0 - total, f"{where}: total mass {total!r} deviates from 1 by {1.0 - total:.6g}")


def _parse_point(raw: Any, geom: Geometry, cfg: NumericConfig, where: str) -> tuple[float, ...]:
    if not isinstance(raw, list):
        if geom.point_dim == 1:
            raw = [raw]
        else:
            raise SpecParseError(f"{where}: point must be a list of {geom.point_dim} numbers")
    if len(raw) != geom.point_dim:
        raise SpecParseError(f"{where}: point must have {geom.point_dim} coordinates, got {len(raw)}")
    p = tuple(_real(c, where) for c in raw)
    if geom.family == "su2":
        norm = math.sqrt(math.fsum(c * c for c in p))
        if abs(norm - 1.0) > cfg.quaternion_tol:
            raise PointOutsideDomain(f"{where}: quaternion {p} has norm {norm!r}, not 1")
    elif not all(0.0 <= c < 1.0 for c in p):
        raise PointOutsideDomain(f"{where}: point {p} is outside [0,1)^{geom.point_dim}")
    return p


def _parse_density(raw: Any, geom: Geometry, where: str) -> Density:
    _check_keys(raw, {"name", "power", "center"}, where)
    name = raw.get("name")
    power = raw.get("power", 1)
    if isinstance(power, bool) or not isinstance(power, int):
        raise SpecParseError(f"{where}: power must be an integer")
    if geom.family == "su2":
        if name != "class_cos_power":
            raise UnsupportedVariantForGeometry(f"{where}: su2 densities: only 'class_cos_power' (got {name!r})")
        if power < 0 or "center" in raw:
            raise SpecParseError(f"{where}: class_cos_power takes power >= 0 and no center")
        return Density(name, power, ())
    if name != "cos2_bump":
        raise UnsupportedVariantForGeometry(f"{where}: {geom.tag} densities: only 'cos2_bump' (got {name!r})")
    if geom.family == "heisenberg" and geom.n != 1:
        raise UnsupportedVariantForGeometry(f"{where}: densities on heisenberg-n need n = 1")
    if power < 1:
        raise SpecParseError(f"{where}: cos2_bump power must be >= 1")
    ncoord = geom.n if geom.family == "torus" else 2 * geom.n
    center = raw.get("center", [0.5] * ncoord)
    if not isinstance(center, list) or len(center) != ncoord:
        raise SpecParseError(f"{where}: center must list {ncoord} coordinates")
    c = tuple(_real(v, where) for v in center)
    if not all(0.0 <= v < 1.0 for v in c):
        raise PointOutsideDomain(f"{where}: center {c} outside [0,1)")
    return Density(name, power, c)


def _parse_leaf(raw: dict, geom: Geometry, cfg: NumericConfig, where: str, *, top: bool) -> Variant:
    base = {"geometry"}
    kind = raw.get("type") if isinstance(raw, dict) else None
    if "geometry" in raw and raw["geometry"] != geom.tag:
        raise SpecParseError(f"{where}: component geometry {raw['geometry']!r} differs from {geom.tag!r}")
    if kind == "atomic":
        _check_keys(raw, base | {"type", "atoms"}, where)
        atoms = raw.get("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise SpecParseError(f"{where}: 'atoms' must be a non-empty list")
        merged: dict[tuple[float, ...], float] = {}
        for i, a in enumerate(atoms):
            _check_keys(a, {"point", "weight"}, f"{where}.atoms[{i}]")
            if "point" not in a or "weight" not in a:
                raise SpecParseError(f"{where}.atoms[{i}]: needs 'point' and 'weight'")
            w = _real(a["weight"], f"{where}.atoms[{i}].weight")
            if w < 0:
                raise NegativeWeight(f"{where}.atoms[{i}]: weight {w} < 0")
            p = _parse_point(a["point"], geom, cfg, f"{where}.atoms[{i}].point")
            merged[p] = merged.get(p, 0.0) + w
        _check_mass(math.fsum(merged.values()), cfg.mass_tol, where)
        return Atomic(tuple(merged.keys()), tuple(merged.values()))
    if kind == "uniform":
        _check_keys(raw, base | {"type"}, where)
        return Uniform()
    if kind == "cantor":
        _check_keys(raw, base | {"type"}, where)
        if geom.tag != "torus-1":
            raise UnsupportedVariantForGeometry(f"{where}: the Cantor measure lives on torus-1 only")
        return CantorMiddleThirds()
    if kind == "density":
        _check_keys(raw, base | {"type", "density"}, where)
        return _parse_density(raw.get("density"), geom, f"{where}.density")
    if kind == "mixture":
        if not top:
            raise SpecParseError(f"{where}: mixtures may not be nested (depth <= 2)")
        _check_keys(raw, base | {"type", "components"}, where)
        comps = raw.get("components")
        if not isinstance(comps, list) or not comps:
            raise SpecParseError(f"{where}: 'components' must be a non-empty list")
        out = []
        for i, c in enumerate(comps):
            _check_keys(c, {"coefficient", "measure"}, f"{where}.components[{i}]")
            coef = _real(c.get("coefficient"), f"{where}.components[{i}].coefficient")
            if coef < 0:
                raise NegativeWeight(f"{where}.components[{i}]: coefficient {coef} < 0")
            leaf = _parse_leaf(c.get("measure"), geom, cfg, f"{where}.components[{i}].measure", top=False)
            out.append((coef, leaf))
        _check_mass(math.fsum(c for c, _ in out), cfg.mass_tol, where)
        return Mixture(tuple(out))
    raise SpecParseError(f"{where}: unknown measure type {kind!r}")


def validate(raw: Any, config: NumericConfig = DEFAULT) -> MeasureSpec:
    """Parse and normalize a measure spec (JSON text, dict or MeasureSpec).

    Duplicate atoms are merged; the mass is never renormalized.
    """
    if isinstance(raw, MeasureSpec):
        raw = raw.to_dict()
    elif isinstance(raw, (str, bytes)):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "geometry" not in raw:
        raise SpecParseError("spec must be an object with a 'geometry' field")
    geom = Geometry.parse(raw["geometry"])
    return MeasureSpec(geom, _parse_leaf(raw, geom, config, "spec", top=True))


def load(path, config: NumericConfig = DEFAULT) -> MeasureSpec:
    with open(path, encoding="utf-8") as fh:
        return validate(fh.read(), config)


def atom_power(spec: MeasureSpec) -> AtomGroundTruth:
    """Sum of squared atom masses; continuous parts contribute nothing."""
    _, w = spec.atoms()
    return AtomGroundTruth(math.fsum(x * x for x in w))


# --------------------------------------------------------------------------- densities


def _bump_norm(power: int) -> float:
    return math.comb(2 * power, power) / 4.0**power


def su2_quadrature_rule(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule on [0,1] for the Weyl weight 2 sin^2(pi theta).

    In u = cos(pi theta) this is Gauss-Chebyshev of the second kind, exact for
    polynomials in cos(pi theta) of degree <= 2*resolution - 1.
    """
    theta = np.arange(1, resolution + 1) / (resolution + 1.0)
    w = 2.0 * np.sin(np.pi * theta) ** 2 / (resolution + 1.0)
    return theta, w


def _class_cos_norm(power: int) -> float:
    theta, w = su2_quadrature_rule(power + 2)
    return math.fsum(w * np.cos(np.pi * theta / 2) ** (2 * power))


def density_value(geom: Geometry, dens: Density, points: np.ndarray) -> np.ndarray:
    """Evaluate a catalog density w.r.t. the normalized volume (Haar) measure.

    SU(2) class densities take class angles theta; others take points in the
    fundamental domain (Heisenberg: the z coordinate is ignored).
    """
    pts = np.asarray(points, dtype=float)
    if dens.name == "class_cos_power":
        return np.cos(np.pi * pts / 2) ** (2 * dens.power) / _class_cos_norm(dens.power)
    if pts.ndim == 1:
        pts = pts[:, None]
    ncoord = len(dens.center)
    vals = np.cos(np.pi * (pts[:, :ncoord] - np.asarray(dens.center))) ** (2 * dens.power)
    return np.prod(vals / _bump_norm(dens.power), axis=1)


def sample_quadrature(
    spec: MeasureSpec, resolution: int, config: NumericConfig = DEFAULT
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and nonnegative weights with sum 1 so that  int f dmu ~ sum w_i f(p_i).

    Torus / Heisenberg: equispaced tensor grid with ``resolution`` points per
    coordinate. SU(2): class-angle nodes for the Weyl weight (class functions only).
    """
    v = spec.variant
    if not isinstance(v, (Uniform, Density)):
        raise UnsupportedVariant(f"sample_quadrature needs a uniform or density measure, got {type(v).__name__}")
    if resolution < 4:
        raise UnsupportedVariant("quadrature resolution must be >= 4")
    geom = spec.geometry
    if geom.family == "su2":
        nodes, w = su2_quadrature_rule(resolution)
        if isinstance(v, Density):
            w = w * density_value(geom, v, nodes)
    else:
        dim = geom.point_dim
        if geom.family == "heisenberg" and geom.n != 1 and isinstance(v, Density):
            raise UnsupportedVariantForGeometry("quadrature on heisenberg-n needs n = 1")
        if resolution**dim > config.quadrature_node_cap:
            raise QuadratureBudgetExceeded(f"{resolution}^{dim} nodes exceed cap {config.quadrature_node_cap}")
        axis = np.arange(resolution) / resolution
        nodes = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        w = np.full(len(nodes), 1.0 / len(nodes))
        if isinstance(v, Density):
            w = w * density_value(geom, v, nodes)
    return nodes, w / math.fsum(w)

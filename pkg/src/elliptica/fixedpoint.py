"""Isolated-fixed-point models of spin circle-manifolds and their indices.

A manifold is given purely by its fixed-point data: at each of the
finitely many fixed points, n nonzero integer weights (dim M = 2n).  The
stored sign convention makes every point contribute with coefficient +1:

    untwisted        point term   prod_j 1/(s^{-a_j} - s^{a_j})
    bundle twist W   point term   (sum_w s^{2w}) * prod_j 1/(s^{-a_j}-s^{a_j})
    tangent Witten   point term   prod_j phi_1(a_j z, tau)

with s = u^{1/2} = e^{i pi z}; a local orientation mismatch is encoded by
flipping one weight's sign (the re-coding move), never by an external
sign.  The spin-parity condition (all points share the parity of the
weight sum) is validated and flagged, not enforced: non-spin data is
allowed through so the rigidity checker can demonstrate failure on it.

The equivariant index of a twisted Dirac operator is a virtual character,
hence a finite Laurent polynomial in u with integer coefficients;
``simplify_character`` reduces the rational-function sum to that form or
reports the residual denominator.  Witten rigidity is the statement that
every p-coefficient of the tangent-Witten series reduces to a degree-zero
rational function: that is exactly what ``rigidity_check`` tests.
"""

from __future__ import annotations

import cmath
import json
import os
import random
import warnings
from dataclasses import dataclass, field
from importlib import resources
from math import gcd

from .ring import RationalFunctionQi
from .qseries import PSeries, ps_compose_power
from .elliptic import phi_exact, phi_numeric
from .spinchar import RotationData
from .zem import LatticeElement, z_fun


class ManifoldValidationError(ValueError):
    """Schema violation in manifold data, carrying the field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class SpecialPointError(ValueError):
    """A computation was requested at a special point it cannot handle."""


@dataclass(frozen=True)
class FixedPointDatum:
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        for w in self.weights:
            if w == 0:
                raise ManifoldValidationError("weights", "zero weight")


@dataclass(frozen=True)
class TwistSpec:
    """kind 'none' | 'tangent_witten' | 'bundle'; bundle twists carry one
    integer weight list per fixed point."""

    kind: str = "none"
    bundle_weights: tuple = ()

    def __post_init__(self):
        if self.kind not in ("none", "tangent_witten", "bundle"):
            raise ValueError(f"unknown twist kind {self.kind!r}")
        object.__setattr__(
            self,
            "bundle_weights",
            tuple(tuple(int(w) for w in ws) for ws in self.bundle_weights),
        )


@dataclass
class SpinCircleManifold:
    name: str
    half_dim: int
    points: list
    twists: dict = field(default_factory=dict)
    spin_parity_ok: bool = True

    def __post_init__(self):
        if self.half_dim < 1:
            raise ManifoldValidationError("half_dim", "must be >= 1")
        if not self.points:
            raise ManifoldValidationError("points", "at least one fixed point")
        for i, pt in enumerate(self.points):
            if len(pt.weights) != self.half_dim:
                raise ManifoldValidationError(
                    f"points[{i}].weights",
                    f"expected {self.half_dim} weights, got {len(pt.weights)}",
                )
        parities = {sum(pt.weights) % 2 for pt in self.points}
        if len(parities) > 1:
            self.spin_parity_ok = False
            warnings.warn(
                f"manifold {self.name!r}: weight-sum parity differs between "
                "fixed points (data is not spin); rigidity may fail",
                stacklevel=2,
            )

    def bundle_twist(self, name):
        if name not in self.twists:
            raise KeyError(
                f"manifold {self.name!r} has no twist {name!r}; "
                f"available: {sorted(self.twists)}"
            )
        return TwistSpec(kind="bundle", bundle_weights=self.twists[name])


def manifold_from_dict(data):
    """Validate raw JSON data into a SpinCircleManifold, with precise
    error locations on failure."""
    if not isinstance(data, dict):
        raise ManifoldValidationError("$", "manifold must be a JSON object")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ManifoldValidationError("name", "nonempty string required")
    half_dim = data.get("half_dim")
    if not isinstance(half_dim, int) or half_dim < 1:
        raise ManifoldValidationError("half_dim", "positive integer required")
    raw_points = data.get("points")
    if not isinstance(raw_points, list) or not raw_points:
        raise ManifoldValidationError("points", "nonempty list required")
    points = []
    for i, raw in enumerate(raw_points):
        if not isinstance(raw, dict) or "weights" not in raw:
            raise ManifoldValidationError(
                f"points[{i}]", "object with a 'weights' list required"
            )
        ws = raw["weights"]
        if not isinstance(ws, list):
            raise ManifoldValidationError(f"points[{i}].weights", "list required")
        if len(ws) != half_dim:
            raise ManifoldValidationError(
                f"points[{i}].weights",
                f"expected {half_dim} weights, got {len(ws)}",
            )
        for j, w in enumerate(ws):
            if not isinstance(w, int):
                raise ManifoldValidationError(
                    f"points[{i}].weights[{j}]", "integer required"
                )
            if w == 0:
                raise ManifoldValidationError(
                    f"points[{i}].weights[{j}]", "zero weight"
                )
        points.append(FixedPointDatum(tuple(ws)))
    twists = {}
    raw_twists = data.get("twists", {})
    if not isinstance(raw_twists, dict):
        raise ManifoldValidationError("twists", "object required")
    for tname, lists in raw_twists.items():
        if not isinstance(lists, list) or len(lists) != len(points):
            raise ManifoldValidationError(
                f"twists.{tname}",
                f"one weight list per fixed point required ({len(points)})",
            )
        for i, ws in enumerate(lists):
            if not isinstance(ws, list) or not all(
                isinstance(w, int) for w in ws
            ):
                raise ManifoldValidationError(
                    f"twists.{tname}[{i}]", "list of integers required"
                )
        twists[tname] = tuple(tuple(ws) for ws in lists)
    return SpinCircleManifold(
        name=name, half_dim=half_dim, points=points, twists=twists
    )


def load_manifold(source):
    """Load a manifold from a file path or a bundled catalog name."""
    if isinstance(source, str) and os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            return manifold_from_dict(json.load(fh))
    name = str(source)
    if name.endswith(".json"):
        name = name[:-5]
    base = resources.files("elliptica").joinpath("catalog")
    candidate = base.joinpath(f"{name}.json")
    try:
        text = candidate.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(
            f"no such manifold file or catalog entry: {source!r} "
            f"(catalog: {', '.join(list_catalog())})"
        ) from None
    return manifold_from_dict(json.loads(text))


def list_catalog():
    base = resources.files("elliptica").joinpath("catalog")
    names = []
    for entry in base.iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[:-5])
    return sorted(names)


# ---------------------------------------------------------------------------
# derived twists


def tangent_complex_weights(weights):
    """Weights of the complexified tangent space at a point: a and -a."""
    return tuple(weights) + tuple(-w for w in weights)


def sym2_weights(weights):
    ws = list(weights)
    return tuple(
        ws[i] + ws[j] for i in range(len(ws)) for j in range(i, len(ws))
    )


def lambda3_weights(weights):
    ws = list(weights)
    n = len(ws)
    return tuple(
        ws[i] + ws[j] + ws[k]
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
    )


# ---------------------------------------------------------------------------
# special points


def special_orders(m):
    """O(M) (all |weight| values) and, per order k, the torsion points
    (alpha + beta tau)/k with 0 <= alpha, beta < k and exact order k."""
    orders = sorted({abs(w) for pt in m.points for w in pt.weights})
    reps = {}
    for k in orders:
        reps[k] = [
            LatticeElement.torsion(a, b, k)
            for a in range(k)
            for b in range(k)
            if gcd(gcd(a, b), k) == 1
        ]
    return orders, reps


# ---------------------------------------------------------------------------
# indices


def _chi_factor(a):
    return RationalFunctionQi.from_laurent({-a: 1, a: -1}).inverse()


def _bundle_character(ws):
    char = {}
    for w in ws:
        char[2 * w] = char.get(2 * w, 0) + 1
    return RationalFunctionQi.from_laurent(char)


def equivariant_index(m, twist, params=None, backend="exact", z=None):
    """Fixed-point sum for the twisted Dirac index.

    exact: a RationalFunctionQi in s (kinds 'none'/'bundle') or a PSeries
    over Q(i)(s) (kind 'tangent_witten', truncated at
    params.truncation_order).  numeric: a complex value at z.
    """
    kind = twist.kind
    if kind == "bundle" and len(twist.bundle_weights) != len(m.points):
        raise ManifoldValidationError(
            "twist.bundle_weights",
            f"expected {len(m.points)} weight lists, got "
            f"{len(twist.bundle_weights)}",
        )
    if backend == "exact":
        if kind == "tangent_witten":
            order = params.require_order()
            total = PSeries.zeros(RationalFunctionQi, order)
            base = phi_exact(1, order)
            for pt in m.points:
                term = PSeries.one(RationalFunctionQi, order)
                for a in pt.weights:
                    term = term * ps_compose_power(base, a)
                total = total + term
            return total
        total = RationalFunctionQi.zero()
        for i, pt in enumerate(m.points):
            term = RationalFunctionQi.one()
            for a in pt.weights:
                term = term * _chi_factor(a)
            if kind == "bundle":
                term = term * _bundle_character(twist.bundle_weights[i])
            total = total + term
        return total
    if backend != "numeric":
        raise ValueError(f"unknown backend {backend!r}")
    if z is None:
        raise ValueError("numeric backend needs the argument z")
    z = complex(z)
    total = 0j
    for i, pt in enumerate(m.points):
        if kind == "tangent_witten":
            term = 1.0 + 0j
            for a in pt.weights:
                term *= phi_numeric(1, params, a * z)
        else:
            term = 1.0 + 0j
            for a in pt.weights:
                e = cmath.exp(1j * cmath.pi * a * z)
                term *= 1.0 / (1.0 / e - e)
            if kind == "bundle":
                term *= sum(
                    cmath.exp(2j * cmath.pi * w * z)
                    for w in twist.bundle_weights[i]
                )
        total += term
    return total


@dataclass
class SimplifyResult:
    ok: bool
    laurent: dict | None = None
    integral: bool = False
    residual_denominator: str | None = None

    def to_json(self):
        out = {"ok": self.ok, "integral": self.integral}
        if self.laurent is not None:
            out["laurent"] = {str(e): str(c) for e, c in sorted(self.laurent.items())}
        if self.residual_denominator is not None:
            out["residual_denominator"] = self.residual_denominator
        return out


def simplify_character(theta):
    """Reduce an index to Laurent-polynomial form.

    A genuine equivariant index is a virtual character: after reduction the
    denominator must be a monomial and all coefficients integers.  A
    non-monomial denominator is reported as a failure with the residual.
    The Laurent form is keyed by the exponent of s = u^{1/2}: even keys are
    honest powers of u, odd keys the half-integer powers that odd-parity
    spin data produces (the action only lifts to the double cover).
    """
    lau = theta.as_laurent()
    if lau is None:
        from .ring import poly_str

        return SimplifyResult(
            ok=False, residual_denominator=poly_str(theta.den)
        )
    integral = all(c.is_integer() for c in lau.values())
    if integral:
        out = {e: int(c.re) for e, c in lau.items()}
    else:
        out = dict(lau)
    return SimplifyResult(ok=True, laurent=out, integral=integral)


# ---------------------------------------------------------------------------
# rigidity


@dataclass
class RigidityReport:
    manifold: str
    twist: str
    q_order: int
    rigid: bool
    constants: list
    nonconstant_orders: list
    spin_parity_ok: bool

    def to_json(self):
        return {
            "manifold": self.manifold,
            "twist": self.twist,
            "q_order": self.q_order,
            "rigid": self.rigid,
            "constants": self.constants,
            "nonconstant_orders": self.nonconstant_orders,
            "spin_parity_ok": self.spin_parity_ok,
        }


def rigidity_check(m, q_order, params=None):
    """Expand the tangent-Witten index and test, coefficient by
    coefficient, that the rational function in s is a constant."""
    from .elliptic import EllipticParams

    prm = EllipticParams(truncation_order=q_order)
    theta = equivariant_index(m, TwistSpec("tangent_witten"), prm)
    constants = []
    bad = []
    for k, c in enumerate(theta.coeffs):
        if c.is_constant():
            constants.append(str(c.constant_value()))
        else:
            constants.append(None)
            bad.append(k)
    return RigidityReport(
        manifold=m.name,
        twist="tangent_witten",
        q_order=q_order,
        rigid=not bad,
        constants=constants,
        nonconstant_orders=bad,
        spin_parity_ok=m.spin_parity_ok,
    )


# ---------------------------------------------------------------------------
# local-vs-direct consistency at non-special points


@dataclass
class ConsistencyReport:
    manifold: str
    gamma: str
    trials: int
    max_residual: float
    tol: float
    passed: bool

    def to_json(self):
        return {
            "manifold": self.manifold,
            "gamma": self.gamma,
            "trials": self.trials,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def consistency_check(m, gamma, params, trials=20, seed=0, tol=1e-9):
    """At a non-special torsion point, the tangent-Witten index evaluated
    through each point's local invariant (the character route of Z) must
    match the direct product evaluation at gamma + y + z."""
    if not (isinstance(gamma, LatticeElement) and gamma.is_torsion):
        raise SpecialPointError("consistency_check needs a torsion point")
    orders, _ = special_orders(m)
    if gamma.k in orders:
        raise SpecialPointError(
            f"gamma has order {gamma.k}, which is special for "
            f"{m.name!r} (O(M) = {orders}); the transfer identities at "
            "special points are covered by the zem identity suites"
        )
    rng = random.Random(seed)
    gv = gamma.value(params.tau)
    worst = 0.0
    done = 0
    attempts = 0
    while done < trials and attempts < 40 * trials:
        attempts += 1
        y = complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.05, 0.05))
        zz = complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.05, 0.05))
        try:
            direct = equivariant_index(
                m, TwistSpec("tangent_witten"), params, backend="numeric",
                z=gv + y + zz,
            )
            local = 0j
            scale = 1e-30
            for pt in m.points:
                jdata = RotationData(pt.weights, 1)
                offsets = RotationData(
                    tuple(a * (y + zz) for a in pt.weights), 1
                )
                term = z_fun(gamma, jdata, offsets, params, route="character")
                local += term
                scale = max(scale, abs(term))
        except (ValueError, ZeroDivisionError):
            continue
        # the fixed-point sum cancels (often to exactly 0), so residuals are
        # measured against the size of the individual contributions
        worst = max(worst, abs(direct - local) / scale)
        done += 1
    if done < trials:
        raise SpecialPointError("could not complete consistency trials")
    return ConsistencyReport(
        manifold=m.name,
        gamma=str(gamma),
        trials=trials,
        max_residual=worst,
        tol=tol,
        passed=worst < tol,
    )

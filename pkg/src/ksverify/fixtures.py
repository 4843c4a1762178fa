"""Quaternion-order fixtures: JSON loading and invariant validation.

Rationals are strings ``"p/q"``.  Field elements are coordinate lists in the
fixture's integral basis; quaternion elements are flat ``4g`` vectors in the
same layout as order basis rows.
"""

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import sympy

from .exactnum import FieldError, FractionalIdeal, TotallyRealField
from .quatalg import (
    QuaternionAlgebra,
    QuaternionError,
    QuatOrder,
    check_mu,
    rational_discriminant,
    reduced_discriminant,
)

BUILTIN = ("split_q", "division_q6", "split_qsqrt2")

_RAT = {"type": ["string", "integer"], "pattern": r"^-?\d+(/\d+)?$"}
_VEC = {"type": "array", "items": _RAT, "minItems": 1}

SCHEMA = {
    "type": "object",
    "required": ["name", "field", "algebra", "order_basis", "d_B", "mu", "a_pure"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "source": {"type": "string"},
        "field": {
            "type": "object",
            "required": ["min_poly"],
            "additionalProperties": False,
            "properties": {
                "min_poly": {"type": "array", "items": {"type": "integer"}, "minItems": 2},
                "integral_basis": {"type": "array", "items": _VEC},
            },
        },
        "algebra": {
            "type": "object",
            "required": ["a", "b"],
            "additionalProperties": False,
            "properties": {"a": _VEC, "b": _VEC},
        },
        "order_basis": {"type": "array", "items": _VEC, "minItems": 4},
        "d_B": _VEC,
        "mu": _VEC,
        "a_pure": _VEC,
        "lattice_multiplier": _VEC,
    },
}


class FixtureError(ValueError):
    """A fixture violates its schema or a declared invariant."""


@dataclass(frozen=True)
class QuaternionFixture:
    name: str
    source: str
    field: TotallyRealField
    algebra: QuaternionAlgebra
    order: QuatOrder
    d_B: object
    mu: object
    a_pure: object
    lattice_multiplier: object = None

    @property
    def g(self):
        return self.field.degree


def builtin_path(name):
    return resources.files("ksverify") / "fixtures" / f"{name}.json"


def _read(source):
    if isinstance(source, dict):
        return source
    text = None
    if isinstance(source, str) and source in BUILTIN:
        text = builtin_path(source).read_text()
    else:
        path = Path(source)
        if not path.exists():
            raise FixtureError(f"fixture not found: {source}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureError(f"fixture is not valid JSON: {exc}") from None


def _squarefree(n):
    return all(e == 1 for e in sympy.factorint(n).values())


def load_fixture(source, digits=40):
    """Parse, build and validate a fixture (path, builtin name or dict)."""
    data = _read(source)
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise FixtureError(f"schema violation at {where}: {exc.message}") from None
    try:
        fb = data["field"]
        field = TotallyRealField(fb["min_poly"], fb.get("integral_basis"), digits=digits, name=data["name"])
        g = field.degree
        for key in ("d_B",):
            if len(data[key]) != g:
                raise FixtureError(f"{key} must have {g} coordinates")
        for key in ("mu", "a_pure", "lattice_multiplier"):
            if key in data and len(data[key]) != 4 * g:
                raise FixtureError(f"{key} must have {4 * g} coordinates")
        alg = QuaternionAlgebra(field, field.element(data["algebra"]["a"]), field.element(data["algebra"]["b"]))
        if not alg.is_totally_indefinite():
            bad = sorted(set(range(1, g + 1)) - set(alg.split_places()))
            raise FixtureError(f"algebra is not totally indefinite: ramified at real place {bad[0]}")
        order = QuatOrder(alg, data["order_basis"], name=data["name"])
        d_b = field.element(data["d_B"])
        mu = alg.from_qvector(data["mu"])
        try:
            mu2 = check_mu(mu)
        except QuaternionError as exc:
            raise FixtureError(f"precondition on mu failed: {exc}") from None
        if FractionalIdeal.generated_by(field, [mu2]) != FractionalIdeal.generated_by(field, [d_b]):
            raise FixtureError("(mu^2) and (d_B) differ as ideals")
        nm = abs(d_b.norm())
        disc = reduced_discriminant(order)
        if disc != nm:
            raise FixtureError(f"reduced discriminant of the order is {disc}, declared |Nm(d_B)| is {nm}")
        if not _squarefree(int(nm)):
            raise FixtureError(f"|Nm(d_B)| = {nm} is not squarefree")
        if g == 1:
            a, b = alg.a.coords[0], alg.b.coords[0]
            oracle = rational_discriminant(a, b)
            if oracle != nm:
                raise FixtureError(f"Hilbert-symbol discriminant {oracle} differs from declared d_B = {nm}")
        a_pure = alg.from_qvector(data["a_pure"])
        if not a_pure.is_pure() or a_pure.is_scalar():
            raise FixtureError("a_pure is not a nonzero pure quaternion")
        mult = None
        if "lattice_multiplier" in data:
            mult = alg.from_qvector(data["lattice_multiplier"])
            if mult.nrd().is_zero():
                raise FixtureError("lattice_multiplier is not invertible")
    except (FieldError, QuaternionError) as exc:
        raise FixtureError(str(exc)) from None
    return QuaternionFixture(
        name=data["name"],
        source=data.get("source", ""),
        field=field,
        algebra=alg,
        order=order,
        d_B=d_b,
        mu=mu,
        a_pure=a_pure,
        lattice_multiplier=mult,
    )

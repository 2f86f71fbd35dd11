"""Ion species, rf drive parameters and declarative trap layouts.

Everything is SI (kg, m, s, V, rad/s).  Coordinate convention for planar
(surface) layouts: all electrodes lie in the z = 0 plane, ions are trapped
at z > 0, and the trap axis runs along y.  Two-layer (symmetric) layouts
put the electrode planes at z = +d/2 and z = -d/2 with the slot of width w
centred on x = 0; the trap axis again runs along y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE
from .errors import CatalogError, UnknownElectrodeError, ValidationError

HYPERBOLIC = "hyperbolic"
PLANAR = "planar"
TWO_LAYER = "two_layer"

ROLE_RF = "rf"
ROLE_DC = "dc"
ROLE_GROUND = "ground"
_ROLES = (ROLE_RF, ROLE_DC, ROLE_GROUND)

# Nominal mass numbers for the shipped species catalog; masses are
# mass_number * u, which is within 0.1% of the isotopic values.
ION_CATALOG = {
    "Yb171": 171,
    "Ca43": 43,
    "Ca40": 40,
    "Be9": 9,
    "Cd111": 111,
    "Mg25": 25,
    "Sr88": 88,
}


@dataclass(frozen=True)
class IonSpecies:
    """A trapped ion: label, mass in kg, charge in C."""

    name: str
    mass: float
    charge: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValidationError(f"ion mass must be positive, got {self.mass}")
        if self.charge == 0:
            raise ValidationError("ion charge must be non-zero")


def ion_from_catalog(name):
    """Look up an ion by catalog name, e.g. ``"Ca40"`` or ``"Yb171"``."""
    try:
        mass_number = ION_CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(ION_CATALOG))
        raise CatalogError(f"unknown ion species {name!r}; known species: {known}") from None
    return IonSpecies(name=name, mass=mass_number * ATOMIC_MASS_UNIT, charge=ELEMENTARY_CHARGE)


@dataclass(frozen=True)
class RfDrive:
    """Rf drive: amplitude v0 (V), angular frequency omega (rad/s),
    static offset u0 (V) applied to the rf electrodes, and rf phase (rad)."""

    v0: float
    omega: float
    u0: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError(f"drive frequency must be positive, got {self.omega}")
        if self.v0 < 0:
            raise ValidationError(f"rf amplitude must be >= 0, got {self.v0}")

    @property
    def period(self):
        return 2.0 * np.pi / self.omega


@dataclass(frozen=True)
class PlanarElectrode:
    """Axis-aligned rectangle [x1,x2] x [y1,y2] in the z = 0 plane."""

    id: str
    x1: float
    x2: float
    y1: float
    y2: float
    role: str = ROLE_DC

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValidationError(
                f"electrode {self.id!r}: need x1 < x2 and y1 < y2, "
                f"got [{self.x1}, {self.x2}] x [{self.y1}, {self.y2}]"
            )
        if self.role not in _ROLES:
            raise ValidationError(f"electrode {self.id!r}: unknown role {self.role!r}")

    @property
    def rect(self):
        return (self.x1, self.x2, self.y1, self.y2)

    @property
    def width(self):
        return self.x2 - self.x1

    @property
    def length(self):
        return self.y2 - self.y1

    def overlaps(self, other):
        # touching edges are allowed (gapless plane), so strict inequalities
        return (self.x1 < other.x2 and other.x1 < self.x2
                and self.y1 < other.y2 and other.y1 < self.y2)


@dataclass(frozen=True)
class Box:
    """Axis-aligned search box, lo/hi corners in metres."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != 3 or len(hi) != 3:
            raise ValidationError("box corners must have three components")
        if not all(l < h for l, h in zip(lo, hi)):
            raise ValidationError(f"box must have positive extent, got lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def center(self):
        return 0.5 * (np.asarray(self.lo) + np.asarray(self.hi))

    @property
    def size(self):
        return np.asarray(self.hi) - np.asarray(self.lo)

    def contains(self, p, margin=0.0):
        p = np.asarray(p)
        lo = np.asarray(self.lo) + margin
        hi = np.asarray(self.hi) - margin
        return bool(np.all(p >= lo) and np.all(p <= hi))


@dataclass(frozen=True)
class TrapLayout:
    """Declarative trap description.

    kind selects the geometry family:

    * ``hyperbolic``: ideal linear quadrupole with ion-electrode distance r0;
    * ``planar``: gapless surface layout made of PlanarElectrode rectangles;
    * ``two_layer``: symmetric two-layer linear trap with slot width w and
      layer separation d, rf plates on one diagonal.

    ``drive`` may be None for purely geometric work; all field/metric
    operations require it.  ``rf_symmetric`` is an optional constructor flag
    recording whether the rf rails mirror each other (None = not recorded).
    """

    kind: str
    drive: RfDrive | None = None
    electrodes: tuple = ()
    r0: float | None = None
    w: float | None = None
    d: float | None = None
    dc_voltages: dict = field(default_factory=dict)
    rf_symmetric: bool | None = None

    def __post_init__(self):
        if self.kind not in (HYPERBOLIC, PLANAR, TWO_LAYER):
            raise ValidationError(f"unknown layout kind {self.kind!r}")
        object.__setattr__(self, "electrodes", tuple(self.electrodes))
        object.__setattr__(self, "dc_voltages", dict(self.dc_voltages))

    # -- constructors ----------------------------------------------------

    @classmethod
    def hyperbolic(cls, r0, drive=None):
        if not r0 > 0:
            raise ValidationError(f"hyperbolic r0 must be positive, got {r0}")
        return cls(kind=HYPERBOLIC, r0=float(r0), drive=drive)

    @classmethod
    def planar(cls, electrodes, drive=None, dc_voltages=None, rf_symmetric=None):
        return cls(kind=PLANAR, electrodes=tuple(electrodes), drive=drive,
                   dc_voltages=dict(dc_voltages or {}), rf_symmetric=rf_symmetric)

    @classmethod
    def two_layer(cls, w, d, drive=None):
        if not (w > 0 and d > 0):
            raise ValidationError(f"two-layer w and d must be positive, got w={w}, d={d}")
        return cls(kind=TWO_LAYER, w=float(w), d=float(d), drive=drive)

    # -- convenience -----------------------------------------------------

    def with_drive(self, drive):
        return replace(self, drive=drive)

    def electrode(self, electrode_id):
        for e in self.electrodes:
            if e.id == electrode_id:
                return e
        raise UnknownElectrodeError(f"no electrode with id {electrode_id!r}")

    def electrodes_with_role(self, role):
        return tuple(e for e in self.electrodes if e.role == role)

    @property
    def rf_electrodes(self):
        return self.electrodes_with_role(ROLE_RF)

    def bounding_rect(self):
        if not self.electrodes:
            raise ValidationError("layout has no electrodes")
        return (min(e.x1 for e in self.electrodes), max(e.x2 for e in self.electrodes),
                min(e.y1 for e in self.electrodes), max(e.y2 for e in self.electrodes))

    def min_feature(self):
        """Smallest electrode width/length; sets finite-difference scales."""
        if self.kind == HYPERBOLIC:
            return self.r0
        if self.kind == TWO_LAYER:
            return min(self.w, self.d)
        return min(min(e.width, e.length) for e in self.electrodes)


def make_five_wire(center_width, rf_width_left, rf_width_right, outer_width,
                   length, drive=None, dc_voltages=None):
    """Build a gapless five-wire surface layout.

    Rails run along y, ordered along x: outer dc, rf, centre dc, rf,
    outer dc.  The centre electrode is centred on x = 0.  Unequal rf
    widths mark the layout asymmetric (rotated principal axes expected).
    """
    widths = {
        "center_width": center_width,
        "rf_width_left": rf_width_left,
        "rf_width_right": rf_width_right,
        "outer_width": outer_width,
        "length": length,
    }
    for name, value in widths.items():
        if not value > 0:
            raise ValidationError(f"five-wire {name} must be positive, got {value}")

    y1, y2 = -0.5 * length, 0.5 * length
    cl = -0.5 * center_width
    cr = +0.5 * center_width
    cuts = [cl - rf_width_left - outer_width, cl - rf_width_left, cl, cr,
            cr + rf_width_right, cr + rf_width_right + outer_width]
    ids_roles = [("dc_outer_left", ROLE_DC), ("rf_left", ROLE_RF),
                 ("dc_center", ROLE_DC), ("rf_right", ROLE_RF),
                 ("dc_outer_right", ROLE_DC)]
    electrodes = [
        PlanarElectrode(id=eid, x1=cuts[i], x2=cuts[i + 1], y1=y1, y2=y2, role=role)
        for i, (eid, role) in enumerate(ids_roles)
    ]
    return TrapLayout.planar(
        electrodes,
        drive=drive,
        dc_voltages=dc_voltages,
        rf_symmetric=(rf_width_left == rf_width_right),
    )


@dataclass(frozen=True)
class Violation:
    """One broken layout invariant, as data (not an exception)."""

    rule: str
    electrode_ids: tuple
    message: str


def validate_layout(layout):
    """Return a list of Violation records; empty iff the layout is sound."""
    problems = []
    if layout.kind == HYPERBOLIC:
        if layout.r0 is None or not layout.r0 > 0:
            problems.append(Violation("nonpositive-dimension", (),
                                      f"hyperbolic r0 must be positive, got {layout.r0}"))
        return problems
    if layout.kind == TWO_LAYER:
        if layout.w is None or not layout.w > 0:
            problems.append(Violation("nonpositive-dimension", (),
                                      f"two-layer w must be positive, got {layout.w}"))
        if layout.d is None or not layout.d > 0:
            problems.append(Violation("nonpositive-dimension", (),
                                      f"two-layer d must be positive, got {layout.d}"))
        return problems

    if not layout.electrodes:
        problems.append(Violation("empty-layout", (), "planar layout has no electrodes"))

    seen = {}
    for e in layout.electrodes:
        if e.id in seen:
            problems.append(Violation("duplicate-id", (e.id,),
                                      f"electrode id {e.id!r} appears more than once"))
        seen[e.id] = e

    electrodes = layout.electrodes
    for i in range(len(electrodes)):
        for j in range(i + 1, len(electrodes)):
            a, b = electrodes[i], electrodes[j]
            if a.overlaps(b):
                problems.append(Violation("overlap", (a.id, b.id),
                                          f"electrodes {a.id!r} and {b.id!r} overlap"))

    for eid in layout.dc_voltages:
        if eid not in seen:
            problems.append(Violation("dangling-dc-reference", (eid,),
                                      f"dc voltage set on unknown electrode id {eid!r}"))
    return problems


# -- serialization -------------------------------------------------------

def drive_to_dict(drive):
    return {"V0_volts": drive.v0, "omega_rad_s": drive.omega,
            "U0_volts": drive.u0, "phase_rad": drive.phase}


def drive_from_dict(data):
    try:
        return RfDrive(v0=float(data["V0_volts"]), omega=float(data["omega_rad_s"]),
                       u0=float(data.get("U0_volts", 0.0)),
                       phase=float(data.get("phase_rad", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad drive record: {exc}") from exc


def layout_to_dict(layout):
    data = {"kind": layout.kind}
    if layout.kind == HYPERBOLIC:
        data["r0_m"] = layout.r0
    elif layout.kind == TWO_LAYER:
        data["w_m"] = layout.w
        data["d_m"] = layout.d
    else:
        data["electrodes"] = [
            {"id": e.id, "role": e.role, "x1_m": e.x1, "x2_m": e.x2,
             "y1_m": e.y1, "y2_m": e.y2}
            for e in layout.electrodes
        ]
        if layout.rf_symmetric is not None:
            data["rf_symmetric"] = layout.rf_symmetric
    data["dc_voltages"] = dict(layout.dc_voltages)
    return data


def layout_from_dict(data, drive=None):
    try:
        kind = data["kind"]
    except (KeyError, TypeError) as exc:
        raise ValidationError("layout record is missing 'kind'") from exc
    dc = {str(k): float(v) for k, v in (data.get("dc_voltages") or {}).items()}
    if kind == HYPERBOLIC:
        return TrapLayout(kind=kind, r0=float(data["r0_m"]), drive=drive, dc_voltages=dc)
    if kind == TWO_LAYER:
        return TrapLayout(kind=kind, w=float(data["w_m"]), d=float(data["d_m"]),
                          drive=drive, dc_voltages=dc)
    if kind == PLANAR:
        try:
            electrodes = tuple(
                PlanarElectrode(id=str(e["id"]), role=str(e.get("role", ROLE_DC)),
                                x1=float(e["x1_m"]), x2=float(e["x2_m"]),
                                y1=float(e["y1_m"]), y2=float(e["y2_m"]))
                for e in data["electrodes"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad electrode record: {exc}") from exc
        return TrapLayout(kind=kind, electrodes=electrodes, drive=drive, dc_voltages=dc,
                          rf_symmetric=data.get("rf_symmetric"))
    raise ValidationError(f"unknown layout kind {kind!r}")


@dataclass(frozen=True)
class TrapConfig:
    """Parsed top-level configuration: ion plus layout (with drive)."""

    ion: IonSpecies
    layout: TrapLayout

    def to_dict(self):
        ion = self.ion
        if ion.name in ION_CATALOG and ion.mass == ION_CATALOG[ion.name] * ATOMIC_MASS_UNIT \
                and ion.charge == ELEMENTARY_CHARGE:
            ion_data = ion.name
        else:
            ion_data = {"name": ion.name, "mass_kg": ion.mass, "charge_C": ion.charge}
        if self.layout.drive is None:
            raise ValidationError("config layout has no drive")
        return {"ion": ion_data,
                "drive": drive_to_dict(self.layout.drive),
                "layout": layout_to_dict(self.layout)}


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ValidationError("config root must be a JSON object")
    for key in ("ion", "drive", "layout"):
        if key not in data:
            raise ValidationError(f"config is missing top-level key {key!r}")
    ion_data = data["ion"]
    if isinstance(ion_data, str):
        ion = ion_from_catalog(ion_data)
    else:
        try:
            ion = IonSpecies(name=str(ion_data["name"]), mass=float(ion_data["mass_kg"]),
                             charge=float(ion_data["charge_C"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad ion record: {exc}") from exc
    drive = drive_from_dict(data["drive"])
    layout = layout_from_dict(data["layout"], drive=drive)
    return TrapConfig(ion=ion, layout=layout)


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def save_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Label vocabularies shared across the package.

The coverage-class list, man-class subset, zone landmark geometry, and
scheme templates ship as package data so the generator, the models, and
the double-coverage detector all read one definition.  Class membership
used by analytics (which classes count as man coverage) is data, not
code, per the file's ``man_classes`` entry.
"""

from __future__ import annotations

import json
from importlib import resources

_spec = json.loads(resources.files("defcov.data").joinpath("coverage_classes.json").read_text())

COVERAGE_CLASSES: tuple[str, ...] = tuple(_spec["classes"])
COVERAGE_INDEX: dict[str, int] = {c: i for i, c in enumerate(COVERAGE_CLASSES)}
N_COVERAGE_CLASSES = len(COVERAGE_CLASSES)
MAN_CLASSES: frozenset[str] = frozenset(_spec["man_classes"])
NO_ASSIGNMENT = _spec["rush_class"]

SCHEMES: tuple[str, ...] = tuple(_spec["scheme_order"])
SCHEME_INDEX: dict[str, int] = {s: i for i, s in enumerate(SCHEMES)}

_LANDMARKS = {k: (v["depth"], v["y"]) for k, v in _spec["landmarks"].items()}
_ALIGNMENTS = {k: (v["depth"], v["y"]) for k, v in _spec["alignments"].items()}
_TEMPLATES = _spec["schemes"]

POSITIONS: tuple[str, ...] = ("QB", "WR", "TE", "RB", "CB", "S", "FS", "LB", "DL")
POSITION_INDEX: dict[str, int] = {p: i for i, p in enumerate(POSITIONS)}
OFFENSE_POSITIONS = frozenset({"QB", "WR", "TE", "RB"})
ELIGIBLE_POSITIONS = frozenset({"WR", "TE", "RB"})
TEAM_SIDES = ("offense", "defense")

# Matchup head column 0 is the explicit "covering nobody" class.
NO_MATCHUP_COL = 0

FIELD_LENGTH = 120.0
FIELD_WIDTH = 53.3
FPS = 10.0


def coverage_index(name):
    """Index of a coverage class; unknown names raise KeyError."""
    if name not in COVERAGE_INDEX:
        raise KeyError(f"unknown coverage class {name!r}")
    return COVERAGE_INDEX[name]


def scheme_index(name):
    if name not in SCHEME_INDEX:
        raise KeyError(f"unknown scheme {name!r}")
    return SCHEME_INDEX[name]


def is_man_class(name):
    return name in MAN_CLASSES


def landmark_xy(cls, x_los):
    """Post-snap zone landmark for a class, in field coordinates."""
    depth, y = _LANDMARKS[cls]
    return x_los + depth, y


def alignment_xy(cls, x_los):
    """Pre-snap alignment spot that a defender playing ``cls`` shows."""
    depth, y = _ALIGNMENTS[cls]
    return x_los + depth, y


def has_landmark(cls):
    return cls in _LANDMARKS


def scheme_template(scheme, n_slots):
    """Coverage classes for ``n_slots`` non-rushing defenders of a scheme.

    The shipped templates describe six coverage slots; smaller defenses
    truncate the list and larger ones cycle through the scheme's extras.
    """
    if scheme not in _TEMPLATES:
        raise KeyError(f"unknown scheme {scheme!r}")
    base = list(_TEMPLATES[scheme]["coverage"])
    extras = _TEMPLATES[scheme]["extras"]
    if n_slots <= len(base):
        return base[:n_slots]
    out = base
    i = 0
    while len(out) < n_slots:
        out.append(extras[i % len(extras)])
        i += 1
    return out

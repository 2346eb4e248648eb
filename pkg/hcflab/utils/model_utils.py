import json
from enum import Enum

import numpy as np


class Variant(Enum):
    HCF = 'hcf'
    CHERN_RICCI = 'chern_ricci'


class Backend(Enum):
    GRID = 0
    ANSATZ = 1


class GriffithsMethod(Enum):
    ALTERNATING = 'alternating'
    GRID = 'grid'
    HYBRID = 'hybrid'


ENUMS = {cls.__name__: cls for cls in (Variant, Backend, GriffithsMethod)}


def to_enum(enum_class, value):
    """Accept an enum member, its value or its lower-case name."""
    if isinstance(value, enum_class):
        return value
    for member in enum_class:
        if value == member.value or str(value).upper() == member.name:
            return member
    raise ValueError("Unknown {} {}; choose from {}".format(
        enum_class.__name__, value, ', '.join(m.name.lower() for m in enum_class)))


class ReportEncoder(json.JSONEncoder):
    """JSON encoder for reports holding enums and numpy values."""

    def default(self, obj):
        if isinstance(obj, Enum) and type(obj).__name__ in ENUMS:
            return {"__enum__": str(obj)}
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.ndarray):
            if np.iscomplexobj(obj):
                return {"real": obj.real.tolist(), "imag": obj.imag.tolist()}
            return obj.tolist()
        if isinstance(obj, complex):
            return {"real": obj.real, "imag": obj.imag}
        return json.JSONEncoder.default(self, obj)


def as_enum(d):
    if "__enum__" in d:
        name, member = d["__enum__"].split(".")
        return getattr(ENUMS[name], member)
    else:
        return d

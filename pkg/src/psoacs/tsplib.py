"""TSPLIB reader for symmetric EUC_2D instances.

Vertices are addressed 0-based throughout the Python API; the 1-based labels
of the file only reappear when tours are printed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

#: Instances up to this many vertices get a precomputed distance matrix.
PRECOMPUTE_LIMIT = 2000

BUNDLED = ("eil51", "eil76", "eil101", "kroA100", "kroB100", "rat99")


class TsplibError(ValueError):
    """Raised for files this reader cannot (or will not) interpret."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


def nint(x):
    """TSPLIB nearest-integer rounding (half up). Works on scalars and arrays."""
    return np.floor(np.asarray(x, dtype=float) + 0.5).astype(np.int64)


@dataclass(frozen=True, eq=False)
class TspInstance:
    """A symmetric Euclidean TSP instance with TSPLIB integer edge costs."""

    name: str
    coords: np.ndarray
    comment: str = ""
    _matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1, 2)
        if len(coords) < 3:
            raise TsplibError(f"instance needs at least 3 vertices, got {len(coords)}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if len(coords) <= PRECOMPUTE_LIMIT:
            matrix = _euc2d_matrix(coords)
            matrix.setflags(write=False)
            object.__setattr__(self, "_matrix", matrix)

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def distance(self, i: int, j: int) -> int:
        n = self.dimension
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"vertex index out of range for dimension {n}: ({i}, {j})")
        if self._matrix is not None:
            return int(self._matrix[i, j])
        (xi, yi), (xj, yj) = self.coords[i], self.coords[j]
        return int(math.floor(math.sqrt((xi - xj) ** 2 + (yi - yj) ** 2) + 0.5))

    def distance_matrix(self) -> np.ndarray:
        """Full int64 cost matrix (cached for small instances, built on demand otherwise)."""
        if self._matrix is not None:
            return self._matrix
        return _euc2d_matrix(self.coords)

    def tour_length(self, tour) -> int:
        """Length of the closed tour visiting ``tour`` in order."""
        t = np.asarray(tour, dtype=np.int64)
        d = self.distance_matrix()
        return int(d[t, np.roll(t, -1)].sum())


def _euc2d_matrix(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return nint(np.sqrt((diff**2).sum(axis=-1)))


def distance(inst: TspInstance, i: int, j: int) -> int:
    return inst.distance(i, j)


_SECTION_KEYS = {"NODE_COORD_SECTION", "EOF"}


def parse_instance(text: str) -> TspInstance:
    """Parse the contents of a TSPLIB ``.tsp`` file.

    Only ``EDGE_WEIGHT_TYPE: EUC_2D`` with a ``NODE_COORD_SECTION`` is
    accepted; any other edge-weight type is rejected rather than approximated.
    """
    header: dict[str, str] = {}
    lines = text.splitlines()
    coord_start = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip().upper()
        if key == "NODE_COORD_SECTION":
            coord_start = lineno
            break
        if key == "EOF":
            break
        if not sep:
            raise TsplibError(f"malformed header entry {line!r}", lineno)
        value = value.strip()
        if key == "DIMENSION":
            try:
                int(value)
            except ValueError:
                raise TsplibError(f"DIMENSION is not an integer: {value!r}", lineno) from None
        elif key == "EDGE_WEIGHT_TYPE" and value.upper() != "EUC_2D":
            raise TsplibError(f"unsupported EDGE_WEIGHT_TYPE {value!r} (only EUC_2D)", lineno)
        elif key == "TYPE" and value.upper() != "TSP":
            raise TsplibError(f"unsupported TYPE {value!r} (only symmetric TSP)", lineno)
        header[key] = (value, lineno)

    if "DIMENSION" not in header:
        raise TsplibError("missing DIMENSION")
    if "EDGE_WEIGHT_TYPE" not in header:
        raise TsplibError("missing EDGE_WEIGHT_TYPE")
    if coord_start is None:
        raise TsplibError("missing NODE_COORD_SECTION")
    dim_value, dim_line = header["DIMENSION"]
    dimension = int(dim_value)

    coords = []
    seen = set()
    last_line = coord_start
    for lineno in range(coord_start + 1, len(lines) + 1):
        line = lines[lineno - 1].strip()
        if not line:
            continue
        if line.upper() == "EOF":
            break
        parts = line.split()
        if len(parts) != 3:
            raise TsplibError(f"expected 'id x y', got {line!r}", lineno)
        try:
            node = int(parts[0])
            x, y = float(parts[1]), float(parts[2])
        except ValueError:
            raise TsplibError(f"unparseable coordinate line {line!r}", lineno) from None
        if node in seen:
            raise TsplibError(f"duplicate node id {node}", lineno)
        seen.add(node)
        coords.append((x, y))
        last_line = lineno
    if len(coords) != dimension:
        raise TsplibError(
            f"DIMENSION {dimension} (line {dim_line}) but {len(coords)} coordinates listed",
            last_line,
        )

    name = header.get("NAME", ("unnamed", 0))[0]
    comment = header.get("COMMENT", ("", 0))[0]
    return TspInstance(name=name, coords=np.array(coords), comment=comment)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_instance(inst: TspInstance) -> str:
    """Serialize back to TSPLIB text; ``parse_instance`` recovers every coordinate exactly."""
    out = [f"NAME : {inst.name}"]
    if inst.comment:
        out.append(f"COMMENT : {inst.comment}")
    out += ["TYPE : TSP", f"DIMENSION : {inst.dimension}", "EDGE_WEIGHT_TYPE : EUC_2D",
            "NODE_COORD_SECTION"]
    out += [f"{k} {_fmt(x)} {_fmt(y)}" for k, (x, y) in enumerate(inst.coords, start=1)]
    out.append("EOF")
    return "\n".join(out) + "\n"


def read_instance(path) -> TspInstance:
    return parse_instance(Path(path).read_text())


def load_bundled(name: str) -> TspInstance:
    """Load one of the six benchmark instances shipped with the package."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled instance {name!r}; available: {', '.join(BUNDLED)}")
    return parse_instance(resources.files("psoacs.data").joinpath(f"{name}.tsp").read_text())


def random_instance(n: int, rng: np.random.Generator, scale: float = 100.0) -> TspInstance:
    """Uniform random integer coordinates in [0, scale); handy for tests and demos."""
    coords = rng.integers(0, int(scale), size=(n, 2)).astype(float)
    return TspInstance(name=f"rand{n}", coords=coords)

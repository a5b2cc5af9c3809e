"""Core data model: the immutable dataset and the derived sculpting state.

Everything here is a value: datasets are never mutated after construction and
all sculpting state (substrates, sessions) is rebuilt copy-on-write by the
operations in :mod:`aggsculpt.ops`. numpy arrays stored on these objects are
treated as frozen by convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union

import numpy as np

from .errors import SculptError

NOMINAL = "nominal"
QUANTITATIVE = "quantitative"
KINDS = (NOMINAL, QUANTITATIVE)

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
AXES = (HORIZONTAL, VERTICAL)

#: Category under which missing cells (empty CSV fields, NaN) are grouped.
MISSING = "∅"

MAIN_NAME = "Main"

DEFAULT_BIN_COUNT = 5

SORT_ALPHABETICAL = "alphabetical"
SORT_NUMERICAL = "numerical"


def format_number(x: float) -> str:
    """Compact canonical rendering; integral floats drop the trailing ``.0``."""
    if math.isfinite(x) and x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


class Column:
    """One dataset column, stored as categorical codes with a lazy numeric view.

    ``codes`` is int32 with ``-1`` marking missing cells; ``categories`` holds
    the distinct raw strings. ``numbers`` is a float64 view (NaN for missing)
    and is ``None`` when any non-missing value fails to parse as a number.
    Either representation may be the one supplied at construction; the other
    is derived on demand and cached.
    """

    __slots__ = (
        "length", "_codes", "_categories", "_numbers", "_numbers_known",
        "_has_missing", "_coerced",
    )

    def __init__(self, length, codes=None, categories=None, numbers=None):
        self.length = length
        self._codes = codes
        self._categories = categories
        self._numbers = numbers
        self._numbers_known = numbers is not None
        self._has_missing = None
        self._coerced = None

    @classmethod
    def from_strings(cls, values: Iterable[str]) -> "Column":
        """Build from raw CSV strings; empty strings become missing cells."""
        arr = np.asarray(list(values), dtype=object)
        present = arr != ""
        codes = np.full(arr.shape[0], -1, dtype=np.int32)
        if present.any():
            cats, inverse = np.unique(arr[present].astype(str), return_inverse=True)
            codes[present] = inverse.astype(np.int32)
            categories = [str(c) for c in cats]
        else:
            categories = []
        return cls(arr.shape[0], codes=codes, categories=categories)

    @classmethod
    def from_numbers(cls, values) -> "Column":
        arr = np.asarray(values, dtype=np.float64)
        return cls(arr.shape[0], numbers=arr)

    @classmethod
    def from_codes(cls, codes, categories) -> "Column":
        codes = np.asarray(codes, dtype=np.int32)
        categories = [str(c) for c in categories]
        if codes.size and (codes.min() < -1 or codes.max() >= len(categories)):
            raise SculptError("invalid_codes", "category codes out of range")
        return cls(codes.shape[0], codes=codes, categories=categories)

    @classmethod
    def coerce(cls, values) -> "Column":
        if isinstance(values, Column):
            return values
        arr = np.asarray(values)
        if arr.dtype.kind in "ifu":
            return cls.from_numbers(arr)
        return cls.from_strings([("" if v is None else str(v)) for v in values])

    def _build_categorical(self):
        vals = self._numbers
        present = ~np.isnan(vals)
        uniq = np.unique(vals[present])
        codes = np.full(vals.shape[0], -1, dtype=np.int32)
        codes[present] = np.searchsorted(uniq, vals[present]).astype(np.int32)
        self._categories = [format_number(v) for v in uniq]
        self._codes = codes

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            self._build_categorical()
        return self._codes

    @property
    def categories(self) -> list:
        if self._categories is None:
            self._build_categorical()
        return self._categories

    @property
    def numbers(self) -> Optional[np.ndarray]:
        """float64 view with NaN for missing; None when the column is not numeric."""
        if not self._numbers_known:
            self._numbers_known = True
            try:
                lut = np.array([float(c) for c in self._categories], dtype=np.float64)
            except ValueError:
                self._numbers = None
            else:
                # codes of -1 index the appended NaN slot
                self._numbers = np.append(lut, np.nan)[self._codes]
        return self._numbers

    @property
    def numbers_coerced(self) -> np.ndarray:
        """float64 view where unparseable cells (not just empty ones) are NaN.

        Used when an attribute is treated as quantitative regardless of what
        inference said; such cells group under the missing category.
        """
        strict = self.numbers
        if strict is not None:
            return strict
        if self._coerced is None:
            lut = np.empty(len(self._categories) + 1, dtype=np.float64)
            for i, cat in enumerate(self._categories):
                try:
                    lut[i] = float(cat)
                except ValueError:
                    lut[i] = np.nan
            lut[-1] = np.nan
            self._coerced = lut[self._codes]
        return self._coerced

    @property
    def has_missing(self) -> bool:
        if self._has_missing is None:
            if self._codes is not None:
                self._has_missing = bool((self._codes == -1).any())
            else:
                self._has_missing = bool(np.isnan(self._numbers).any())
        return self._has_missing

    def raw_values(self, rows: Optional[np.ndarray] = None) -> np.ndarray:
        """Original cell strings (object array); missing cells are ``""``.

        ``rows`` restricts (and orders) the output to the given row indices.
        """
        if self._codes is None and self._numbers is not None:
            values = self._numbers if rows is None else self._numbers[rows]
            out = np.array([format_number(v) for v in values.tolist()], dtype=object)
            out[np.isnan(values)] = ""
            return out
        codes = self.codes if rows is None else self.codes[rows]
        lut = np.array(list(self.categories) + [""], dtype=object)
        return lut[codes]

    def raw_value(self, row: int) -> str:
        code = int(self.codes[row])
        return "" if code < 0 else self.categories[code]


@dataclass(frozen=True, eq=False)
class Edges:
    """Directed raw edges between dataset rows, weight defaulting to 1.0."""

    source: np.ndarray
    target: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "source", np.asarray(self.source, dtype=np.int64))
        object.__setattr__(self, "target", np.asarray(self.target, dtype=np.int64))
        object.__setattr__(self, "weight", np.asarray(self.weight, dtype=np.float64))
        if not (len(self.source) == len(self.target) == len(self.weight)):
            raise SculptError("invalid_edges", "edge arrays must have equal length")
        if len(self.weight) and self.weight.min() < 0:
            raise SculptError("invalid_edges", "edge weights must be non-negative")

    @property
    def count(self) -> int:
        return len(self.source)


class Dataset:
    """Immutable columnar table with an optional directed edge list."""

    def __init__(self, columns, edges: Optional[Edges] = None):
        if hasattr(columns, "items"):
            items = list(columns.items())
        else:
            items = list(columns)
        self.column_names = [name for name, _ in items]
        if len(set(self.column_names)) != len(self.column_names):
            raise SculptError("duplicate_column", "duplicate column names")
        self.columns = {name: Column.coerce(values) for name, values in items}
        lengths = {col.length for col in self.columns.values()}
        if len(lengths) > 1:
            raise SculptError("ragged_columns", "all columns must have the same row count")
        self.row_count = lengths.pop() if lengths else 0
        if edges is not None and edges.count:
            lo = min(edges.source.min(), edges.target.min())
            hi = max(edges.source.max(), edges.target.max())
            if lo < 0 or hi >= self.row_count:
                raise SculptError("invalid_edges", "edge endpoints must be valid row indices")
        self.edges = edges

    def column(self, name: str) -> Column:
        try:
            return self.columns[name]
        except KeyError:
            raise SculptError("unknown_attribute", f"unknown attribute {name!r}") from None

    @property
    def has_edges(self) -> bool:
        return self.edges is not None


@dataclass(frozen=True)
class Binning:
    """How a quantitative attribute is cut into categories.

    Explicit edges define one right-open bin per edge, the last extending to
    +∞; equal-width cuts the observed range into ``bin_count`` bins with the
    last likewise open-ended.
    """

    method: str
    bin_count: Optional[int] = None
    edges: Optional[tuple] = None

    def __post_init__(self):
        if self.method not in ("equal-width", "explicit-edges"):
            raise SculptError("invalid_bins", f"unknown binning method {self.method!r}")
        if self.method == "equal-width":
            if not self.bin_count or self.bin_count < 1:
                raise SculptError("invalid_bins", "equal-width binning needs bin_count >= 1")
        else:
            if not self.edges:
                raise SculptError("invalid_bins", "explicit binning needs at least one edge")
            edges = tuple(float(e) for e in self.edges)
            if any(b <= a for a, b in zip(edges, edges[1:])):
                raise SculptError("invalid_bins", "bin edges must be strictly increasing")
            object.__setattr__(self, "edges", edges)

    def to_dict(self) -> dict:
        out = {"method": self.method}
        if self.bin_count is not None:
            out["binCount"] = self.bin_count
        if self.edges is not None:
            out["edges"] = list(self.edges)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Binning":
        return cls(
            method=data["method"],
            bin_count=data.get("binCount"),
            edges=tuple(data["edges"]) if data.get("edges") else None,
        )


@dataclass(frozen=True)
class AttributeSpec:
    """Per-column configuration: kind, category ordering, and binning."""

    name: str
    kind: str
    sort_order: Union[str, tuple] = SORT_ALPHABETICAL
    binning: Optional[Binning] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SculptError("invalid_kind", f"unknown attribute kind {self.kind!r}")
        if isinstance(self.sort_order, str):
            if self.sort_order not in (SORT_ALPHABETICAL, SORT_NUMERICAL):
                raise SculptError("invalid_sort", f"unknown sort order {self.sort_order!r}")
        else:
            object.__setattr__(self, "sort_order", tuple(str(c) for c in self.sort_order))

    def to_dict(self) -> dict:
        sort = self.sort_order if isinstance(self.sort_order, str) else list(self.sort_order)
        out = {"name": self.name, "kind": self.kind, "sortOrder": sort}
        if self.binning is not None:
            out["binning"] = self.binning.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "AttributeSpec":
        sort = data.get("sortOrder", SORT_ALPHABETICAL)
        if isinstance(sort, list):
            sort = tuple(sort)
        binning = Binning.from_dict(data["binning"]) if data.get("binning") else None
        return cls(name=data["name"], kind=data["kind"], sort_order=sort, binning=binning)


def default_specs(dataset: Dataset, overrides: Optional[dict] = None) -> dict:
    """Infer a spec per column: quantitative iff every value parses as a number.

    ``overrides`` maps column name to a kind and wins over inference.
    """
    overrides = overrides or {}
    for name in overrides:
        dataset.column(name)
    specs = {}
    for name in dataset.column_names:
        kind = overrides.get(name)
        if kind is None:
            kind = QUANTITATIVE if dataset.columns[name].numbers is not None else NOMINAL
        elif kind not in KINDS:
            raise SculptError("invalid_kind", f"unknown attribute kind {kind!r}")
        sort = SORT_NUMERICAL if kind == QUANTITATIVE else SORT_ALPHABETICAL
        specs[name] = AttributeSpec(name=name, kind=kind, sort_order=sort)
    return specs


@dataclass(frozen=True)
class FacetKey:
    """Grid-cell identity: per-axis (attribute, category) pairs, outermost first."""

    h: tuple = ()
    v: tuple = ()

    def to_dict(self) -> dict:
        return {"h": [list(p) for p in self.h], "v": [list(p) for p in self.v]}

    @classmethod
    def from_dict(cls, data: dict) -> "FacetKey":
        return cls(
            h=tuple((str(a), str(c)) for a, c in data.get("h", ())),
            v=tuple((str(a), str(c)) for a, c in data.get("v", ())),
        )


@dataclass(frozen=True, eq=False)
class Supernode:
    key: FacetKey
    rows: np.ndarray
    count: int


@dataclass(frozen=True, eq=False)
class Superlink:
    source: FacetKey
    target: FacetKey
    weight: float
    edge_count: int


@dataclass(frozen=True)
class Pile:
    """Merged categories of one attribute, displayed under a single name."""

    attribute: str
    members: tuple
    name: str


@dataclass(frozen=True, eq=False)
class Substrate:
    """One sculpting surface: a disjoint slice of the data plus its view state."""

    id: int
    name: str
    live: np.ndarray
    pruned: np.ndarray
    h_axis: tuple = ()
    v_axis: tuple = ()
    piles: tuple = ()
    peek: Optional[str] = None
    show_links: bool = False
    show_arrows: bool = False

    def axis_stack(self, axis: str) -> tuple:
        if axis == HORIZONTAL:
            return self.h_axis
        if axis == VERTICAL:
            return self.v_axis
        raise SculptError("invalid_axis", f"unknown axis {axis!r}")

    def piles_for(self, attribute: str) -> tuple:
        return tuple(p for p in self.piles if p.attribute == attribute)

    @property
    def live_count(self) -> int:
        return len(self.live)

    @property
    def pruned_count(self) -> int:
        return len(self.pruned)


@dataclass(frozen=True)
class SculptOp:
    """One logged state transition; replaying the log reproduces the state."""

    kind: str
    params: dict
    timestamp: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params, "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, data: dict) -> "SculptOp":
        return cls(kind=data["kind"], params=data.get("params", {}), timestamp=data.get("timestamp", 0.0))


NODES = "nodes"
ROW_FACET = "row-facet"
COLUMN_FACET = "column-facet"
SELECTION_MODES = (NODES, ROW_FACET, COLUMN_FACET)


@dataclass(frozen=True)
class Selection:
    """What the user has picked: grid cells, or whole rows/columns by label."""

    substrate_id: int
    mode: str
    keys: tuple

    def __post_init__(self):
        if self.mode not in SELECTION_MODES:
            raise SculptError("invalid_selection", f"unknown selection mode {self.mode!r}")
        if self.mode == NODES:
            keys = tuple(k if isinstance(k, FacetKey) else FacetKey.from_dict(k) for k in self.keys)
        else:
            keys = tuple((str(a), str(c)) for a, c in self.keys)
        object.__setattr__(self, "keys", keys)

    def to_dict(self) -> dict:
        if self.mode == NODES:
            keys = [k.to_dict() for k in self.keys]
        else:
            keys = [list(k) for k in self.keys]
        return {"substrateId": self.substrate_id, "mode": self.mode, "keys": keys}

    @classmethod
    def from_dict(cls, data: dict) -> "Selection":
        mode = data.get("mode")
        if mode not in SELECTION_MODES:
            raise SculptError("invalid_selection", f"unknown selection mode {mode!r}")
        raw = data.get("keys", [])
        if mode == NODES:
            keys = tuple(FacetKey.from_dict(k) for k in raw)
        else:
            keys = tuple((str(a), str(c)) for a, c in raw)
        return cls(substrate_id=int(data["substrateId"]), mode=mode, keys=keys)


@dataclass(frozen=True, eq=False)
class SessionState:
    """The replayable part of a session: specs plus all substrates."""

    specs: dict
    substrates: tuple
    next_substrate_id: int

    def substrate(self, substrate_id: int) -> Substrate:
        for sub in self.substrates:
            if sub.id == substrate_id:
                return sub
        raise SculptError("unknown_substrate", f"no substrate with id {substrate_id}")

    def replace_substrate(self, new: Substrate) -> "SessionState":
        subs = tuple(new if s.id == new.id else s for s in self.substrates)
        return replace(self, substrates=subs)

    def spec(self, name: str) -> AttributeSpec:
        try:
            return self.specs[name]
        except KeyError:
            raise SculptError("unknown_attribute", f"unknown attribute {name!r}") from None


@dataclass(frozen=True, eq=False)
class LogEntry:
    op: SculptOp
    state_after: SessionState


@dataclass(frozen=True, eq=False)
class OperationLog:
    """Ordered op log with a cursor; entries past the cursor are redoable."""

    initial: SessionState
    entries: tuple = ()
    cursor: int = 0


@dataclass(frozen=True, eq=False)
class Session:
    dataset: Dataset
    state: SessionState
    log: OperationLog

    @property
    def specs(self) -> dict:
        return self.state.specs

    @property
    def substrates(self) -> tuple:
        return self.state.substrates

    def substrate(self, substrate_id: int) -> Substrate:
        return self.state.substrate(substrate_id)


def new_session(dataset: Dataset, specs: Optional[dict] = None, overrides: Optional[dict] = None) -> Session:
    """Fresh session: every row live in the single Main substrate."""
    if specs is None:
        specs = default_specs(dataset, overrides)
    main = Substrate(
        id=1,
        name=MAIN_NAME,
        live=np.arange(dataset.row_count, dtype=np.int64),
        pruned=np.empty(0, dtype=np.int64),
    )
    state = SessionState(specs=specs, substrates=(main,), next_substrate_id=2)
    return Session(dataset=dataset, state=state, log=OperationLog(initial=state))

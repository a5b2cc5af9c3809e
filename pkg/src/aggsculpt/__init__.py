"""aggsculpt: sculptable aggregate grids over columnar data.

A dataset starts as a single all-encompassing supernode and is iteratively
sculpted: partitioned into nested facet grids, peeked into, piled, projected
onto new substrates, and pruned — with a fully replayable interaction log.
"""

from .errors import IngestError, SculptError
from .model import (
    AXES,
    COLUMN_FACET,
    HORIZONTAL,
    MISSING,
    NODES,
    NOMINAL,
    QUANTITATIVE,
    ROW_FACET,
    VERTICAL,
    AttributeSpec,
    Binning,
    Column,
    Dataset,
    Edges,
    FacetKey,
    Pile,
    SculptOp,
    Selection,
    Session,
    Substrate,
    Supernode,
    Superlink,
    default_specs,
    new_session,
)
from .derive import category_counts, supernodes_of, superlinks_of
from .ops import (
    apply,
    clear_peek,
    configure_attribute,
    peek,
    pile,
    pivot_partition,
    project,
    prune,
    prune_by_frequency,
    resolve_selection,
    toggle_view,
    unpartition,
)
from .history import (
    export_csv,
    load_session_log,
    log_to_dict,
    redo,
    replay_log,
    save_session_log,
    session_from_log,
    state_digest,
    undo,
)
from .ingest import EdgeColumns, IngestConfig, ingest_csv, open_session
from .layout import GridLayout, axis_label_tree, compute_layout, hover_highlight_model

__version__ = "0.1.0"

"""Brute-force reference implementations used to cross-check the engine.

These operate on plain python values (lists of raw cell strings, tuples of
edges) and never touch the engine's derivation code, so they stay independent
of the path they verify.
"""

MISSING = "∅"


def display_category(value: str, attribute: str, piles=None) -> str:
    """Displayed category of one raw nominal cell, with piles applied."""
    category = MISSING if value == "" else value
    if piles:
        return piles.get((attribute, category), category)
    return category


def group_rows(table: dict, h_attrs, v_attrs, piles=None, rows=None) -> dict:
    """Nested group-by: (h categories, v categories) -> set of row indices.

    ``table`` maps attribute name to the per-row raw strings; ``piles`` maps
    (attribute, member category) to the pile's display name; ``rows`` limits
    the grouping to a subset (default: all rows).
    """
    n = len(next(iter(table.values()))) if table else 0
    if rows is None:
        rows = range(n)
    groups = {}
    for i in rows:
        hk = tuple(display_category(table[a][i], a, piles) for a in h_attrs)
        vk = tuple(display_category(table[a][i], a, piles) for a in v_attrs)
        groups.setdefault((hk, vk), set()).add(i)
    return groups


def link_sums(edges, group_of_row: dict) -> dict:
    """(source group, target group) -> (weight sum, edge count).

    ``edges`` is an iterable of (source row, target row, weight); edges with
    an endpoint missing from ``group_of_row`` are skipped.
    """
    sums = {}
    for s, t, w in edges:
        if s not in group_of_row or t not in group_of_row:
            continue
        key = (group_of_row[s], group_of_row[t])
        acc_w, acc_c = sums.get(key, (0.0, 0))
        sums[key] = (acc_w + w, acc_c + 1)
    return sums


def facet_rows(table: dict, attribute: str, category: str, piles=None, rows=None) -> set:
    """Rows whose displayed category of ``attribute`` equals ``category``."""
    n = len(next(iter(table.values()))) if table else 0
    if rows is None:
        rows = range(n)
    return {i for i in rows if display_category(table[attribute][i], attribute, piles) == category}


def distribution(table: dict, attribute: str, rows, piles=None) -> dict:
    """category -> fraction over the given rows (sums to 1 when rows non-empty)."""
    rows = list(rows)
    counts = {}
    for i in rows:
        cat = display_category(table[attribute][i], attribute, piles)
        counts[cat] = counts.get(cat, 0) + 1
    return {cat: c / len(rows) for cat, c in counts.items()}


def key_categories(facet_key) -> tuple:
    """Engine FacetKey -> comparable (h categories, v categories) tuples."""
    return (
        tuple(cat for _, cat in facet_key.h),
        tuple(cat for _, cat in facet_key.v),
    )


def engine_groups(nodes) -> dict:
    """Supernode list -> the same shape group_rows produces."""
    return {key_categories(node.key): set(node.rows.tolist()) for node in nodes}

"""Synthetic ontology generator for capacity and latency testing.

Produces an ICD-shaped forest: three-character root categories fanning out
into dotted subcategories down to billable leaves, plus one index lead term
per root, at any requested code count (the production target is the ~70,000
codes of a full diagnosis classification).
"""

from __future__ import annotations

import random


def generate_ontology_doc(n_codes: int = 70_000, seed: int = 7, index_every: int = 1) -> dict:
    """Canonical-schema document with ~``n_codes`` codes (never fewer)."""
    rng = random.Random(seed)
    codes: list[dict] = []
    leaves_by_root: dict[str, str] = {}

    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    roots = [f"{ch}{i:02d}" for ch in letters for i in range(100)]
    count = 0
    ri = 0
    while count < n_codes and ri < len(roots):
        root = roots[ri]
        ri += 1
        n_children = rng.randint(8, 10)
        codes.append(
            {"code": root, "title": f"Synthetic category {root}", "parent": None,
             "billable": False, "notes": [], "seventh_char": None}
        )
        count += 1
        first_leaf = None
        for c in range(n_children):
            child = f"{root}{c}"
            deepen = rng.random() < 0.75
            codes.append(
                {"code": child, "title": f"Synthetic subcategory {child}",
                 "parent": root, "billable": not deepen, "notes": [],
                 "seventh_char": None}
            )
            count += 1
            if deepen:
                for g in range(rng.randint(2, 5)):
                    leaf = f"{child}{g}"
                    codes.append(
                        {"code": leaf, "title": f"Synthetic code {leaf}",
                         "parent": child, "billable": True, "notes": [],
                         "seventh_char": None}
                    )
                    count += 1
                    if first_leaf is None:
                        first_leaf = leaf
            elif first_leaf is None:
                first_leaf = child
        leaves_by_root[root] = first_leaf

    index = [
        {
            "lead_term": f"synthterm {root.lower()}",
            "default_code": leaf,
            "see_also": None,
            "modifiers": [],
        }
        for i, (root, leaf) in enumerate(sorted(leaves_by_root.items()))
        if i % index_every == 0
    ]
    return {
        "system_id": "SYNTH",
        "version": f"synth-{n_codes}-{seed}",
        "codes": codes,
        "index": index,
    }

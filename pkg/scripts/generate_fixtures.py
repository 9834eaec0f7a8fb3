"""Regenerate src/langparams/fixtures/golden_counts.json from the plain-Python oracle.

The oracle multiplies (F0, Fr) and (sigma0, s) in an explicit semidirect
product one pair at a time; it shares no code with the vectorised enumerator
beyond listing the group.  Run once; the tests then require the enumerator to
reproduce every entry exactly.

    python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from langparams.fingrp import FqMatrix, GroupSpecFin, enumerate_group, jordan, make_field
from langparams.moduli import SemidirectData, TwistAut, h1_finite
from langparams.moduli.points import oracle_points

OUT = Path(__file__).resolve().parents[1] / "src" / "langparams" / "fixtures" / "golden_counts.json"

CONFIGS = [
    ("GL", 1, 5, 1, 3, "none"),
    ("GL", 1, 7, 1, 3, "none"),
    ("GL", 1, 2, 2, 3, "none"),
    ("SL", 1, 3, 1, 2, "none"),
    ("GL", 2, 3, 1, 2, "none"),
    ("GL", 2, 2, 1, 3, "none"),
    ("GL", 2, 5, 1, 3, "none"),
    ("GL", 2, 5, 1, 3, "s"),
    ("SL", 2, 5, 1, 3, "fr"),
    ("SL", 2, 3, 1, 2, "none"),
]


def semidirect(q: int, twist: str) -> SemidirectData:
    outer = TwistAut(None, True)
    fr = outer if twist in ("fr", "both") else TwistAut()
    s = outer if twist in ("s", "both") else TwistAut()
    return SemidirectData(fr, s, q)


def pair_digest(pairs) -> str:
    text = json.dumps([[list(F.entries), list(s.entries)] for F, s in pairs], separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def class_list(pairs, G) -> list[dict]:
    """Conjugacy classes of the semisimple part of sigma0 (untwisted GL only)."""
    rep_of = {}
    counts = {}
    for _, sigma in pairs:
        ss, _ = jordan(sigma)
        if ss.entries not in rep_of:
            orbit = {(g @ ss @ g.inverse()).entries for g in G}
            rep = min(orbit)
            for e in orbit:
                rep_of[e] = rep
        rep = rep_of[ss.entries]
        counts[rep] = counts.get(rep, 0) + 1
    return [{"representative": [str(x) for x in rep], "count": str(c)} for rep, c in sorted(counts.items())]


def main() -> None:
    golden = {"points": [], "h1_finite": []}
    for kind, n, ell, k, q, twist in CONFIGS:
        F = make_field(ell, k)
        spec = GroupSpecFin(kind, n, F)
        G = enumerate_group(spec)
        pairs = oracle_points(spec, semidirect(q, twist), G)
        ident = FqMatrix.identity(n, F)
        entry = {
            "kind": kind, "n": str(n), "ell": str(ell), "k": str(k), "q": str(q), "twist": twist,
            "count": str(len(pairs)),
            "fiber_identity": str(sum(1 for _, s in pairs if s == ident)),
            "digest": pair_digest(pairs),
        }
        if kind == "GL" and twist == "none":
            entry["classes"] = class_list(pairs, G)
        golden["points"].append(entry)
        print(kind, n, ell, k, q, twist, len(pairs))
    # nonabelian H^1 of Z/m acting trivially
    for kind, n, ell, m in [("GL", 2, 3, 2), ("GL", 1, 7, 3), ("GL", 2, 3, 3)]:
        spec = GroupSpecFin(kind, n, make_field(ell))
        G = enumerate_group(spec)
        classes = h1_finite(m, lambda h: h, G, mul=lambda a, b: a @ b)
        golden["h1_finite"].append({"kind": kind, "n": str(n), "ell": str(ell), "m": str(m),
                                    "classes": str(len(classes)),
                                    "sizes": [str(s) for s in sorted(s for _, s in classes)]})
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(golden, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Check every golden expectation in a corpus and print a per-file table."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from lwlite.golden import check_file, corpus_files

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class Config:
    corpus: Path = ROOT / "corpus"
    show_failures: bool = True


def main(cfg: Config) -> int:
    rows = []
    start = time.perf_counter()
    for path in corpus_files(cfg.corpus):
        t0 = time.perf_counter()
        rep = check_file(path)
        ms = (time.perf_counter() - t0) * 1000
        by_kind = {}
        for o in rep.outcomes:
            ok, n = by_kind.get(o.expectation.kind, (0, 0))
            by_kind[o.expectation.kind] = (ok + o.ok, n + 1)
        rows.append((path.name, by_kind, len(rep.errors), ms))
        if cfg.show_failures:
            for o in rep.outcomes:
                if not o.ok:
                    print(o.render(str(path)))
            for e in rep.errors:
                print(f"ERROR {e}")
    total = time.perf_counter() - start
    print(f"{'file':<28} {'types':>7} {'values':>7} {'errors':>7} {'ms':>7}")
    fails = 0
    for name, kinds, errs, ms in rows:
        cells = []
        for k in ("type", "value", "error"):
            ok, n = kinds.get(k, (0, 0))
            fails += n - ok
            cells.append(f"{ok}/{n}")
        fails += errs
        print(f"{name:<28} {cells[0]:>7} {cells[1]:>7} {cells[2]:>7} {ms:>7.1f}")
    print(f"total {total:.2f}s, {fails} failure(s)")
    return 0 if fails == 0 else 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("corpus", nargs="?", type=Path, default=Config.corpus)
    ap.add_argument("--quiet", action="store_true", help="only print the table")
    a = ap.parse_args()
    raise SystemExit(main(Config(a.corpus, not a.quiet)))

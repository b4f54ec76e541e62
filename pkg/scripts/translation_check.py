#!/usr/bin/env python3
"""Re-type the emitted core of every inject/eject node and of every
top-level binding in a corpus, and report the outcome per node."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from lwlite.golden import core_roundtrip, corpus_files, ject_translations

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class Config:
    corpus: Path = ROOT / "corpus"
    verbose: bool = False


def main(cfg: Config) -> int:
    bad = 0
    nodes = bindings = exact = 0
    for path in corpus_files(cfg.corpus):
        src = path.read_text(encoding="utf-8")
        if "//! error:" in src:
            continue
        for c in ject_translations(src):
            nodes += 1
            bad += not c.ok
            if cfg.verbose or not c.ok:
                mark = "ok " if c.ok else "BAD"
                print(f"{mark} {path.name}: {c.node}\n    node: {c.expected}\n    core: {c.actual}")
        checks, problems = core_roundtrip(src)
        for p in problems:
            print(f"BAD {path.name}: {p}")
        bad += len(problems)
        for c in checks:
            bindings += 1
            exact += c.exact
            bad += not c.ok
            if cfg.verbose or not c.ok:
                mark = "ok " if c.ok else "BAD"
                print(f"{mark} {path.name}: {c.name}\n    erased:    {c.original}\n"
                      f"    rechecked: {c.rechecked}")
    print(f"{nodes} inject/eject nodes, {bindings} bindings "
          f"({exact} re-check to the identical scheme), {bad} failure(s)")
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("corpus", nargs="?", type=Path, default=Config.corpus)
    ap.add_argument("-v", "--verbose", action="store_true")
    a = ap.parse_args()
    raise SystemExit(main(Config(a.corpus, a.verbose)))

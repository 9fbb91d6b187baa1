"""Rewrite the golden bundles from the current implementation.

Only run this after a deliberate, reviewed change of output format or
semantics; every file written here is cross-checked against the Betti oracle
by the test suite.
"""
from __future__ import annotations

import shutil
from pathlib import Path

from dzp.config import config_from_dict
from dzp.pipeline import run_pipeline

HERE = Path(__file__).parent
CASES = {
    "default": {},
    "expanding": {"window": "expanding"},
    "vr": {"backend": "vr", "window": 3},
}
KEEP = ("diagram.csv", "landmarks.csv", "complex_*.csv", "zpi_k*.csv", "delta_k*.csv")


def main() -> None:
    for name, raw in CASES.items():
        target = HERE / name
        shutil.rmtree(target, ignore_errors=True)
        tmp = HERE / f".tmp_{name}"
        shutil.rmtree(tmp, ignore_errors=True)
        run_pipeline(config_from_dict(raw), tmp)
        for pattern in KEEP:
            for f in tmp.glob(f"windows/*/{pattern}"):
                dest = target / f.relative_to(tmp)
                dest.parent.mkdir(parents=True, exist_ok=True)
                shutil.copyfile(f, dest)
        shutil.rmtree(tmp)
        print(f"{name}: {sum(1 for _ in target.rglob('*.csv'))} files")


if __name__ == "__main__":
    main()

"""Versioned on-disk caches for enumeration results.

Array caches (orbit balls) are npz files; record caches (geodesic keys,
pants sets) are sorted line-oriented text files with a leading
``format=<name>/<version>`` header.  Corrupt or version-mismatched files
are ignored and rebuilt, never partially read.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

ARRAY_VERSION = 1
TEXT_VERSION = 1


class CacheDir:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _array_path(self, kind: str, group_hash: str, tag: str) -> Path:
        return self.root / f"{kind}_{group_hash}_{tag}_v{ARRAY_VERSION}.npz"

    def _text_path(self, kind: str, group_hash: str, tag: str) -> Path:
        return self.root / f"{kind}_{group_hash}_{tag}_v{TEXT_VERSION}.txt"

    def load_arrays(self, kind: str, group_hash: str, tag: str):
        path = self._array_path(kind, group_hash, tag)
        if not path.exists():
            return None
        try:
            with np.load(path, allow_pickle=False) as z:
                if int(z["version"][0]) != ARRAY_VERSION:
                    return None
                return {k: z[k] for k in z.files if k != "version"}
        except Exception:
            return None

    def store_arrays(self, kind: str, group_hash: str, tag: str, **arrays):
        path = self._array_path(kind, group_hash, tag)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        os.close(fd)
        try:
            np.savez(tmp, version=np.array([ARRAY_VERSION]), **arrays)
            os.replace(tmp + ".npz" if os.path.exists(tmp + ".npz") else tmp, path)
        finally:
            for leftover in (tmp, tmp + ".npz"):
                if os.path.exists(leftover):
                    os.unlink(leftover)

    def load_text(self, kind: str, group_hash: str, tag: str) -> list[str] | None:
        path = self._text_path(kind, group_hash, tag)
        if not path.exists():
            return None
        try:
            lines = path.read_text().splitlines()
        except OSError:
            return None
        if not lines or lines[0] != f"format={kind}/{TEXT_VERSION}":
            return None
        if not lines[-1].startswith("count="):
            return None
        body = lines[1:-1]
        if int(lines[-1].split("=")[1]) != len(body):
            return None
        return body

    def store_text(self, kind: str, group_hash: str, tag: str, rows: list[str]):
        path = self._text_path(kind, group_hash, tag)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as f:
            f.write(f"format={kind}/{TEXT_VERSION}\n")
            for r in rows:
                f.write(r + "\n")
            f.write(f"count={len(rows)}\n")
        os.replace(tmp, path)

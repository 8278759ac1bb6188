"""File-backed factsheet store.

One canonical text file per sheet under a single directory, plus a
rebuildable in-memory index.  Writes go through a temp file and an
atomic rename, so the directory never holds a torn document.  Reads
never lock: they see an immutable index snapshot that writers swap
wholesale.  Revisions are optimistic-concurrency counters; they live in
the index, so a fresh scan of the same directory starts over at 1.
"""

from __future__ import annotations

import os
import re
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .catalog import CATALOG, KindMismatchError, answer_tokens
from .diagnostics import FactsheetParseError
from .model import Factsheet
from .textfmt import parse_canonical, serialize_canonical
from .validate import completeness
from .vocab import VOCABULARIES


class StoreError(Exception):
    pass


class InvalidIdError(StoreError):
    pass


class NotFoundError(StoreError):
    pass


class ConflictError(StoreError):
    pass


class StorageError(StoreError):
    pass


class UnknownTokenError(StoreError):
    pass


SLUG_RE = re.compile(r"[a-z0-9-]{1,64}")


@dataclass(frozen=True)
class StoreEntry:
    id: str
    factsheet: Factsheet
    revision: int
    updated_at: datetime


@dataclass(frozen=True)
class StoreListing:
    id: str
    title: str | None
    completeness: float


def _check_slug(sheet_id: str) -> None:
    if not isinstance(sheet_id, str) or not SLUG_RE.fullmatch(sheet_id):
        raise InvalidIdError(
            f"{sheet_id!r} is not a valid sheet id (want [a-z0-9-], 1-64 chars)")


class FactsheetStore:
    def __init__(self, root: str | Path):
        self._root = Path(root)
        if not self._root.is_dir():
            raise StorageError(f"store directory {self._root} does not exist")
        self._write_lock = threading.Lock()
        self._snapshot: dict[str, StoreEntry] = self._scan()

    @property
    def root(self) -> Path:
        return self._root

    def _scan(self) -> dict[str, StoreEntry]:
        index: dict[str, StoreEntry] = {}
        for path in sorted(self._root.glob("*.efs")):
            sheet_id = path.stem
            if not SLUG_RE.fullmatch(sheet_id):
                raise StorageError(f"{path.name}: file name is not a valid sheet id")
            try:
                fs = parse_canonical(path.read_text(encoding="utf-8"))
            except (OSError, FactsheetParseError) as exc:
                raise StorageError(f"{path.name}: {exc}") from exc
            stamp = datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc)
            index[sheet_id] = StoreEntry(sheet_id, fs, 1, stamp)
        return index

    def _path(self, sheet_id: str) -> Path:
        return self._root / f"{sheet_id}.efs"

    def get(self, sheet_id: str) -> StoreEntry:
        entry = self._snapshot.get(sheet_id)
        if entry is None:
            raise NotFoundError(f"no factsheet {sheet_id!r}")
        return entry

    def put(self, sheet_id: str, fs: Factsheet,
            expected_revision: int | None = None) -> StoreEntry:
        _check_slug(sheet_id)
        text = serialize_canonical(fs)
        with self._write_lock:
            current = self._snapshot.get(sheet_id)
            current_revision = 0 if current is None else current.revision
            if expected_revision is not None and expected_revision != current_revision:
                raise ConflictError(
                    f"{sheet_id!r} is at revision {current_revision}, "
                    f"not {expected_revision}")
            try:
                fd, tmp = tempfile.mkstemp(dir=self._root, suffix=".tmp")
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(text)
                os.replace(tmp, self._path(sheet_id))
            except OSError as exc:
                raise StorageError(f"cannot write {sheet_id!r}: {exc}") from exc
            entry = StoreEntry(sheet_id, fs, current_revision + 1,
                               datetime.now(timezone.utc))
            self._snapshot = {**self._snapshot, sheet_id: entry}
            return entry

    def delete(self, sheet_id: str) -> None:
        with self._write_lock:
            if sheet_id not in self._snapshot:
                raise NotFoundError(f"no factsheet {sheet_id!r}")
            try:
                os.remove(self._path(sheet_id))
            except OSError as exc:
                raise StorageError(f"cannot delete {sheet_id!r}: {exc}") from exc
            remaining = dict(self._snapshot)
            del remaining[sheet_id]
            self._snapshot = remaining

    def entries(self) -> list[StoreEntry]:
        return sorted(self._snapshot.values(), key=lambda e: e.id)

    def list(self, filter: tuple[str, str] | None = None) -> list[StoreListing]:
        entries = self.entries()
        if filter is not None:
            question_id, token = filter
            q = CATALOG[question_id]
            if q.vocabulary is None:
                raise KindMismatchError(
                    f"{question_id} does not take vocabulary answers")
            if token not in VOCABULARIES[q.vocabulary].all_tokens():
                raise UnknownTokenError(
                    f"{token!r} is not in the {q.vocabulary} vocabulary")
            entries = [e for e in entries
                       if token in answer_tokens(e.factsheet, question_id)]
        return [StoreListing(e.id, e.factsheet.context.title,
                             completeness(e.factsheet).overall)
                for e in entries]

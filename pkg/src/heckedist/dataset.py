"""JSON Lines eigenvalue datasets (schema version 1).

Line 1 is a header object; every later non-blank line is one record::

    {"schema": 1, "source": "synthetic", "complete": true, "branch": "exp(-i*pi*t)"}
    {"level": 11, "weight": 2, "p": 2, "lambda": -1.414213562373095, "form_id": "11.2.a.a"}
    {"level": 5, "weight": 3, "char": {"modulus": 5, "images": [[2, 1, 4]]}, "p": 2, "ap": [0.0, 2.0]}

``char`` is a serialized character, an opaque label string, or absent for
the trivial character. Records need ``lambda`` (normalized) or ``ap``
(raw ``[re, im]``); with both, ``lambda`` is used and ``ap`` cross-checked.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from .characters import DirichletCharacter
from .errors import DataIntegrityError, DomainError, HeckeDistError
from .spectra import EDGE_TOL, IM_TOL, EigenMultiset, EigenRecord, multisets_from_records

SCHEMA_VERSION = 1
BRANCH_TAG = "exp(-i*pi*t)"

_RECORD_KEYS = {"level", "weight", "char", "p", "lambda", "ap", "field_degree", "form_id"}


@dataclass(frozen=True)
class DatasetHeader:
    source: str = "unknown"
    complete: bool = False
    branch: str = BRANCH_TAG
    embedding: Optional[str] = None
    notes: tuple[str, ...] = ()
    schema: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "schema": self.schema,
            "source": self.source,
            "complete": self.complete,
            "branch": self.branch,
        }
        if self.embedding is not None:
            out["embedding"] = self.embedding
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True)
class DatasetFile:
    header: DatasetHeader
    records: tuple[EigenRecord, ...] = field(default_factory=tuple)

    def multisets(self, im_tol: float = IM_TOL, edge_tol: float = EDGE_TOL) -> list[EigenMultiset]:
        return multisets_from_records(self.records, self.header.complete, im_tol, edge_tol)


def record_to_json(rec: EigenRecord) -> dict:
    out: dict[str, Any] = {"level": rec.level, "weight": rec.weight}
    if isinstance(rec.character, DirichletCharacter):
        out["char"] = rec.character.to_json()
    elif rec.character is not None:
        out["char"] = rec.character
    out["p"] = rec.p
    if rec.lam is not None:
        out["lambda"] = rec.lam
    if rec.ap is not None:
        out["ap"] = [rec.ap.real, rec.ap.imag]
    if rec.field_degree is not None:
        out["field_degree"] = rec.field_degree
    if rec.form_id is not None:
        out["form_id"] = rec.form_id
    return out


def _int(obj: dict, key: str) -> int:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise DomainError(f"{key} must be an integer, got {v!r}")
    return v


def _real(v: Any, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DomainError(f"{what} must be a number, got {v!r}")
    return float(v)


def record_from_json(obj: Any, im_tol: float = IM_TOL, edge_tol: float = EDGE_TOL) -> EigenRecord:
    """Build and fully validate one record, normalization included."""
    if not isinstance(obj, dict):
        raise DomainError("record is not a JSON object")
    unknown = set(obj) - _RECORD_KEYS
    if unknown:
        raise DomainError(f"unknown fields {sorted(unknown)}")
    for key in ("level", "weight", "p"):
        if key not in obj:
            raise DomainError(f"missing field {key!r}")
    raw_char = obj.get("char")
    if isinstance(raw_char, dict):
        chi: Union[DirichletCharacter, str, None] = DirichletCharacter.from_json(raw_char)
    elif raw_char is None or isinstance(raw_char, str):
        chi = raw_char
    else:
        raise DomainError(f"char must be an object or a label string, got {raw_char!r}")
    ap = None
    if "ap" in obj:
        pair = obj["ap"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise DomainError(f"ap must be [re, im], got {pair!r}")
        ap = complex(_real(pair[0], "ap.re"), _real(pair[1], "ap.im"))
    lam = _real(obj["lambda"], "lambda") if "lambda" in obj else None
    degree = _int(obj, "field_degree") if "field_degree" in obj else None
    form_id = obj.get("form_id")
    if form_id is not None and not isinstance(form_id, str):
        raise DomainError(f"form_id must be a string, got {form_id!r}")
    rec = EigenRecord(_int(obj, "level"), _int(obj, "weight"), chi, _int(obj, "p"), ap, lam, degree, form_id)
    rec.value(im_tol, edge_tol)
    return rec


def _parse_header(line: str) -> DatasetHeader:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataIntegrityError(f"header is not valid JSON: {exc}", [(1, str(exc))]) from exc
    if not isinstance(obj, dict) or obj.get("schema") != SCHEMA_VERSION:
        got = obj.get("schema") if isinstance(obj, dict) else obj
        raise DataIntegrityError(f"unrecognized schema {got!r}; expected {SCHEMA_VERSION}", [(1, "schema mismatch")])
    branch = obj.get("branch", BRANCH_TAG)
    if branch != BRANCH_TAG:
        raise DataIntegrityError(
            f"dataset branch convention {branch!r} differs from {BRANCH_TAG!r}", [(1, "branch convention mismatch")]
        )
    notes = obj.get("notes", [])
    return DatasetHeader(
        source=str(obj.get("source", "unknown")),
        complete=bool(obj.get("complete", False)),
        branch=branch,
        embedding=obj.get("embedding"),
        notes=tuple(str(n) for n in notes),
    )


def parse_text(text: str, name: str = "<string>", im_tol: float = IM_TOL, edge_tol: float = EDGE_TOL) -> DatasetFile:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataIntegrityError(f"{name}: missing header line", [(1, "missing header")])
    header = _parse_header(lines[0])
    records: list[EigenRecord] = []
    problems: list[tuple[int, str]] = []
    seen: dict[tuple, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = record_from_json(json.loads(line), im_tol, edge_tol)
        except json.JSONDecodeError as exc:
            problems.append((lineno, f"malformed JSON: {exc}"))
            continue
        except HeckeDistError as exc:
            problems.append((lineno, str(exc)))
            continue
        if rec.form_id is not None:
            key = rec.space + (rec.form_id,)
            if key in seen:
                problems.append((lineno, f"duplicate record key {key} (first on line {seen[key]})"))
                continue
            seen[key] = lineno
        records.append(rec)
    if problems:
        detail = "; ".join(f"line {n}: {why}" for n, why in problems[:10])
        raise DataIntegrityError(f"{name}: {len(problems)} invalid record(s): {detail}", problems)
    return DatasetFile(header, tuple(records))


def parse_dataset(path, im_tol: float = IM_TOL, edge_tol: float = EDGE_TOL) -> DatasetFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read dataset {path}: {exc}") from exc
    return parse_text(text, str(path), im_tol, edge_tol)


def serialize_dataset(ds: DatasetFile) -> str:
    lines = [json.dumps(ds.header.to_json(), sort_keys=True)]
    lines.extend(json.dumps(record_to_json(r), sort_keys=True) for r in ds.records)
    return "\n".join(lines) + "\n"


def _read_umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


# read once: os.umask is process-global and racy under threads
_FILE_MODE = 0o666 & ~_read_umask()


def atomic_write(path, data: Union[str, bytes]) -> None:
    """Write to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.chmod(tmp, _FILE_MODE)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_dataset(ds: DatasetFile, path) -> None:
    atomic_write(path, serialize_dataset(ds))

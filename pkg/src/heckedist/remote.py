"""Best-effort client for a public modular-forms database, with a local cache.

Endpoint, query parameter names and payload field names all come from
configuration because public API schemas drift. The expected payload is a
JSON object holding a list of per-newform objects under ``data_key``.

Configuration is an INI file::

    [remote]
    endpoint = https://example.org/api/newforms
    data_key = data
    timeout = 20
    retries = 3
    max_in_flight = 4
    complete = false
    embedding = first complex embedding

    [params]            ; our query key = remote query parameter name
    level = level
    weight = weight
    p = p
    char = char

    [fields]            ; record field = payload field
    level = level
    weight = weight
    char = char
    ap = ap
    lambda = lambda
    field_degree = field_degree
    form_id = label

    [cache]
    path = ~/.cache/heckedist

    [tolerances]
    im_tol = 1e-8
    edge_tol = 1e-8

Environment overrides: ``HECKEDIST_CONFIG`` (config path),
``HECKEDIST_ENDPOINT``, ``HECKEDIST_CACHE_DIR``, ``HECKEDIST_OFFLINE``.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
import time
import urllib.error
import urllib.parse
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from .characters import DirichletCharacter, conductor
from .dataset import BRANCH_TAG, DatasetFile, DatasetHeader, atomic_write, record_from_json
from .errors import DataIntegrityError, DomainError, HeckeDistError, TransportError
from .numtheory import is_exceptional, is_prime
from .spectra import EDGE_TOL, IM_TOL, EigenRecord, char_label

log = logging.getLogger(__name__)

DEFAULT_FIELDS = {
    "level": "level",
    "weight": "weight",
    "char": "char",
    "ap": "ap",
    "lambda": "lambda",
    "field_degree": "field_degree",
    "form_id": "label",
}
DEFAULT_PARAMS = {"level": "level", "weight": "weight", "p": "p", "char": "char"}


@dataclass
class RemoteConfig:
    endpoint: str = "https://www.lmfdb.org/api/mf_newforms/"
    data_key: str = "data"
    timeout: float = 20.0
    retries: int = 3
    max_in_flight: int = 4
    complete: bool = False
    embedding: Optional[str] = None
    params: dict = field(default_factory=lambda: dict(DEFAULT_PARAMS))
    fields: dict = field(default_factory=lambda: dict(DEFAULT_FIELDS))
    cache_dir: Path = field(default_factory=lambda: Path("~/.cache/heckedist").expanduser())
    offline: bool = False
    im_tol: float = IM_TOL
    edge_tol: float = EDGE_TOL


def load_config(path=None, env=None) -> RemoteConfig:
    env = os.environ if env is None else env
    cfg = RemoteConfig()
    path = path or env.get("HECKEDIST_CONFIG")
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        if not parser.read(path):
            raise DomainError(f"config file {path} not found")
        if parser.has_section("remote"):
            r = parser["remote"]
            cfg.endpoint = r.get("endpoint", cfg.endpoint)
            cfg.data_key = r.get("data_key", cfg.data_key)
            cfg.timeout = r.getfloat("timeout", cfg.timeout)
            cfg.retries = r.getint("retries", cfg.retries)
            cfg.max_in_flight = r.getint("max_in_flight", cfg.max_in_flight)
            cfg.complete = r.getboolean("complete", cfg.complete)
            cfg.embedding = r.get("embedding", cfg.embedding)
            cfg.offline = r.getboolean("offline", cfg.offline)
        if parser.has_section("params"):
            cfg.params.update(parser["params"])
        if parser.has_section("fields"):
            cfg.fields.update(parser["fields"])
        if parser.has_section("cache"):
            cfg.cache_dir = Path(parser["cache"].get("path", str(cfg.cache_dir))).expanduser()
        if parser.has_section("tolerances"):
            t = parser["tolerances"]
            cfg.im_tol = t.getfloat("im_tol", cfg.im_tol)
            cfg.edge_tol = t.getfloat("edge_tol", cfg.edge_tol)
    if env.get("HECKEDIST_ENDPOINT"):
        cfg.endpoint = env["HECKEDIST_ENDPOINT"]
    if env.get("HECKEDIST_CACHE_DIR"):
        cfg.cache_dir = Path(env["HECKEDIST_CACHE_DIR"]).expanduser()
    if env.get("HECKEDIST_OFFLINE", "").lower() in ("1", "true", "yes"):
        cfg.offline = True
    return cfg


@dataclass(frozen=True)
class SpaceQuery:
    """Newspaces with N in ``levels`` and k in ``weights`` (inclusive ranges).

    ``conductor`` restricts to characters of that conductor; ``character``
    pins one character, whose modulus then fixes the level.
    """

    levels: tuple[int, int]
    weights: tuple[int, int]
    p: int
    conductor: Optional[int] = None
    character: Optional[DirichletCharacter] = None

    def __post_init__(self):
        lo, hi = self.levels
        if lo < 1 or hi < lo:
            raise DomainError(f"bad level range {self.levels}")
        klo, khi = self.weights
        if klo < 2 or khi < klo:
            raise DomainError(f"bad weight range {self.weights}")
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if self.character is not None:
            if self.levels != (self.character.modulus, self.character.modulus):
                raise DomainError("a pinned character fixes the level range to its modulus")
            if self.conductor is None:
                object.__setattr__(self, "conductor", conductor(self.character))


@dataclass(frozen=True)
class CacheEntry:
    key: str
    payload: Any
    fetched_at: float

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.key.encode("utf-8")).hexdigest()


def request_key(endpoint: str, params: dict) -> str:
    return endpoint + "?" + json.dumps(params, sort_keys=True, separators=(",", ":"))


class Cache:
    """One JSON file per request-key hash; entries are never rewritten."""

    def __init__(self, root):
        self.root = Path(root)

    def path_for(self, key: str) -> Path:
        return self.root / f"{hashlib.sha256(key.encode('utf-8')).hexdigest()}.json"

    def get(self, key: str) -> Optional[CacheEntry]:
        path = self.path_for(key)
        if not path.exists():
            return None
        obj = json.loads(path.read_text(encoding="utf-8"))
        if obj.get("key") != key:
            raise DataIntegrityError(f"cache entry {path} does not match its key")
        return CacheEntry(obj["key"], obj["payload"], obj["fetched_at"])

    def put(self, entry: CacheEntry) -> None:
        path = self.path_for(entry.key)
        if path.exists():
            return
        body = {"key": entry.key, "fetched_at": entry.fetched_at, "payload": entry.payload}
        atomic_write(path, json.dumps(body, sort_keys=True))


Transport = Callable[[str, dict, float], bytes]


def http_get(url: str, params: dict, timeout: float) -> bytes:
    full = url + ("&" if "?" in url else "?") + urllib.parse.urlencode(params)
    req = urllib.request.Request(full, headers={"Accept": "application/json"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        return resp.read()


def _fetch_payload(transport: Transport, cfg: RemoteConfig, params: dict) -> Any:
    last: Optional[Exception] = None
    for attempt in range(max(cfg.retries, 1)):
        try:
            raw = transport(cfg.endpoint, params, cfg.timeout)
            break
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            last = exc
            log.warning("fetch %s attempt %d failed: %s", params, attempt + 1, exc)
            time.sleep(min(0.1 * 2**attempt, 2.0))
    else:
        raise TransportError(f"request {params} failed after {cfg.retries} attempts: {last}")
    try:
        return json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DataIntegrityError(f"malformed remote payload for {params}: {exc}") from exc


def _records_from_payload(payload: Any, query: SpaceQuery, cfg: RemoteConfig) -> list[EigenRecord]:
    if not isinstance(payload, dict) or not isinstance(payload.get(cfg.data_key), list):
        raise DataIntegrityError(f"remote payload lacks a list under {cfg.data_key!r}")
    records = []
    problems = []
    for i, item in enumerate(payload[cfg.data_key]):
        if not isinstance(item, dict):
            problems.append((i, "item is not an object"))
            continue
        obj = {ours: item[theirs] for ours, theirs in cfg.fields.items() if theirs in item}
        obj.setdefault("p", query.p)
        if not isinstance(obj.get("char"), dict):
            if query.character is not None:
                obj["char"] = query.character.to_json()
            elif query.conductor == 1:
                obj.pop("char", None)
        try:
            records.append(record_from_json(obj, cfg.im_tol, cfg.edge_tol))
        except HeckeDistError as exc:
            problems.append((i, str(exc)))
    if problems:
        detail = "; ".join(f"item {i}: {why}" for i, why in problems[:10])
        raise DataIntegrityError(f"{len(problems)} un-normalizable remote record(s): {detail}", problems)
    return records


def plan_requests(query: SpaceQuery, cfg: RemoteConfig) -> tuple[list[dict], list[str]]:
    """Per-level request parameters plus advisories for skipped levels."""
    names = cfg.params
    requests = []
    notes = []
    f = query.conductor
    klo, khi = query.weights
    for N in range(query.levels[0], query.levels[1] + 1):
        if N % query.p == 0:
            notes.append(f"N={N} skipped: p={query.p} divides N")
            continue
        if f is not None:
            if N % f:
                continue
            if is_exceptional(N, f):
                notes.append(
                    f"N={N}, f={f}: 2 | f and 2 || N/f, so dim S_k^new(N, chi) = 0; no request made"
                )
                continue
        params = {names["level"]: N, names["weight"]: f"{klo}-{khi}", names["p"]: query.p}
        if query.character is not None:
            params[names["char"]] = char_label(query.character)
        elif f is not None:
            params[names["char"]] = f
        requests.append(params)
    return requests, notes


def fetch_remote(
    query: SpaceQuery,
    cfg: Optional[RemoteConfig] = None,
    transport: Optional[Transport] = None,
) -> DatasetFile:
    """Assemble a dataset for ``query``; offline mode serves only cached payloads.

    Payloads are validated before they are cached, so a bad response never
    poisons later runs.
    """
    cfg = cfg or load_config()
    transport = transport or http_get
    cache = Cache(cfg.cache_dir)
    plan, notes = plan_requests(query, cfg)

    def one(params: dict) -> list[EigenRecord]:
        key = request_key(cfg.endpoint, params)
        entry = cache.get(key)
        if entry is not None:
            return _records_from_payload(entry.payload, query, cfg)
        if cfg.offline:
            raise TransportError(f"offline and no cached response for {key}")
        payload = _fetch_payload(transport, cfg, params)
        records = _records_from_payload(payload, query, cfg)
        cache.put(CacheEntry(key, payload, time.time()))
        return records

    if cfg.max_in_flight > 1 and len(plan) > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_in_flight) as pool:
            batches = list(pool.map(one, plan))
    else:
        batches = [one(params) for params in plan]
    records = sorted(
        (r for batch in batches for r in batch),
        key=lambda r: (r.level, r.weight, char_label(r.character), r.p, r.form_id or ""),
    )
    for note in notes:
        log.info(note)
    header = DatasetHeader(
        source=cfg.endpoint,
        complete=cfg.complete,
        branch=BRANCH_TAG,
        embedding=cfg.embedding,
        notes=tuple(notes),
    )
    return DatasetFile(header, tuple(records))

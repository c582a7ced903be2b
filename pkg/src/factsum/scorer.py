"""Binary factual-consistency scoring.

Two interchangeable bindings: a local entity-containment heuristic and a
client for a remote scoring service. A verdict of 1 means the claim is
consistent with the context.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

import requests

from .corpus import normalize_surface


class ScorerError(Exception):
    """Base class for consistency-scorer failures."""


class ScorerTransportError(ScorerError):
    """The remote service could not be reached (timeout, connection refused)."""


class ScorerProtocolError(ScorerError):
    """The remote service answered outside the wire contract."""


@dataclass(frozen=True)
class ScorerInput:
    """A piece of text plus the entity surfaces found in it."""

    text: str
    entity_surfaces: tuple[str, ...] = ()


# Keys identify a sentence within a run: (doc_id, sentence_index).
ScoreKey = tuple[str, int]


class HeuristicEntityContainment:
    """Scores 1 iff every claim entity also appears among the context entities.

    Surfaces are compared case-folded with whitespace runs collapsed. A claim
    with no entities scores 1: there is nothing to contradict.
    """

    def score(self, claim: ScorerInput, context: ScorerInput, key: Optional[ScoreKey] = None) -> int:
        known = {normalize_surface(s) for s in context.entity_surfaces}
        for surface in claim.entity_surfaces:
            if normalize_surface(surface) not in known:
                return 0
        return 1


@dataclass(frozen=True)
class RemoteBinding:
    endpoint: str
    timeout: float = 10.0
    max_concurrent: int = 4

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_concurrent < 1:
            raise ValueError("max_concurrent must be at least 1")


class RemoteConsistencyScorer:
    """HTTP client for an external scorer: POST {claim, context} to /score.

    At most ``binding.max_concurrent`` requests are in flight at once; the
    instance may be shared across worker threads.
    """

    def __init__(self, binding: RemoteBinding, session: Optional[requests.Session] = None):
        self.binding = binding
        self._session = session or requests.Session()
        self._slots = threading.BoundedSemaphore(binding.max_concurrent)

    def score(self, claim: ScorerInput, context: ScorerInput, key: Optional[ScoreKey] = None) -> int:
        url = self.binding.endpoint.rstrip("/") + "/score"
        payload = {"claim": claim.text, "context": context.text}
        with self._slots:
            try:
                response = self._session.post(url, json=payload, timeout=self.binding.timeout)
            except requests.RequestException as exc:
                raise ScorerTransportError(f"scorer unreachable at {url}: {exc}") from exc
        if response.status_code != 200:
            raise ScorerProtocolError(f"scorer returned HTTP {response.status_code}")
        try:
            body = response.json()
        except ValueError as exc:
            raise ScorerProtocolError("scorer response is not JSON") from exc
        label = body.get("label") if isinstance(body, dict) else None
        if label not in (0, 1):
            raise ScorerProtocolError(f"scorer response missing binary label: {body!r}")
        return label


class VerdictCache:
    """Memoizes verdicts by (doc_id, sentence_index) for the span of one run."""

    def __init__(self, inner):
        self._inner = inner
        self._verdicts: dict[ScoreKey, int] = {}
        self._lock = threading.Lock()
        self.hits = 0

    def score(self, claim: ScorerInput, context: ScorerInput, key: Optional[ScoreKey] = None) -> int:
        if key is None:
            return self._inner.score(claim, context)
        with self._lock:
            if key in self._verdicts:
                self.hits += 1
                return self._verdicts[key]
        verdict = self._inner.score(claim, context, key)
        with self._lock:
            self._verdicts.setdefault(key, verdict)
        return verdict

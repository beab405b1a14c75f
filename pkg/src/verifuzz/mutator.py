"""Blind byte-level mutation and the coverage-gated corpus.

The baseline strategy: no grammar knowledge beyond a dictionary of keyword
spellings auto-extracted from the grammar file. Mutations are deterministic
in (input, seed) so campaigns replay exactly.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from .rng import Rng

_MAX_OPS = 4
_BOOTSTRAP_MAX_BYTES = 4


def _length_bound(n: int) -> int:
    return 2 * max(n, 64) + 64


def mutate_bytes(
    data: bytes,
    dictionary: list[bytes],
    seed: int,
    n_ops: int | None = None,
) -> bytes:
    """Apply 1..4 random byte-level operators to ``data``.

    ``n_ops`` forces an exact operator count (0 returns the input unchanged;
    used by tests). Output length stays within 2*max(len, 64) + 64.
    """
    rng = Rng(seed)
    if not data:
        # Degenerate input: bootstrap from the dictionary, or a few raw bytes.
        if dictionary and rng.chance(0.75):
            return bytes(rng.choice(dictionary))
        return bytes(rng.below(256) for _ in range(1 + rng.below(_BOOTSTRAP_MAX_BYTES)))
    if n_ops == 0:
        return data

    bound = _length_bound(len(data))
    out = bytearray(data)
    ops = n_ops if n_ops is not None else 1 + rng.below(_MAX_OPS)
    for _ in range(ops):
        if not out:
            out.extend(rng.choice(dictionary) if dictionary else b"\x00")
            continue
        op = rng.below(7)
        pos = rng.below(len(out))
        if op == 0:  # bit flip
            out[pos] ^= 1 << rng.below(8)
        elif op == 1:  # byte overwrite
            out[pos] = rng.below(256)
        elif op == 2:  # byte insert
            out.insert(pos, rng.below(256))
        elif op == 3:  # byte delete
            del out[pos]
        elif op == 4:  # block duplicate
            length = 1 + rng.below(min(len(out) - pos, 32))
            out[pos:pos] = out[pos : pos + length]
        elif op == 5:  # block delete
            length = 1 + rng.below(min(len(out) - pos, 32))
            del out[pos : pos + length]
        else:  # dictionary splice
            if dictionary:
                token = rng.choice(dictionary)
                if rng.chance(0.5):
                    out[pos : pos + len(token)] = token
                else:
                    out[pos:pos] = token
        if len(out) > bound:
            del out[bound:]
    return bytes(out)


@dataclass
class CorpusEntry:
    data: bytes
    discovered_at: float
    novel: bool  # accepted because it covered new counters


@dataclass
class Corpus:
    """Single-writer corpus; duplicates rejected by content hash."""

    entries: list[CorpusEntry] = field(default_factory=list)
    dictionary: list[bytes] = field(default_factory=list)
    _hashes: set[str] = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.entries)

    def content_hash(self, data: bytes) -> str:
        return hashlib.sha256(data).hexdigest()

    def seed(self, data: bytes) -> bool:
        """Add a seed input unconditionally (unless duplicate)."""
        h = self.content_hash(data)
        if h in self._hashes:
            return False
        self._hashes.add(h)
        self.entries.append(CorpusEntry(data, time.time(), novel=False))
        return True

    def add_if_novel(self, data: bytes, new_counters: int) -> bool:
        """Accept iff the input covered previously-uncovered counters."""
        if new_counters <= 0:
            return False
        h = self.content_hash(data)
        if h in self._hashes:
            return False
        self._hashes.add(h)
        self.entries.append(CorpusEntry(data, time.time(), novel=True))
        return True

    def pick(self, rng: Rng) -> bytes | None:
        if not self.entries:
            return None
        return self.entries[rng.below(len(self.entries))].data


def corpus_add_if_novel(corpus: Corpus, data: bytes, new_counters: int) -> bool:
    return corpus.add_if_novel(data, new_counters)


def dictionary_from_grammar(grammar) -> list[bytes]:
    """Keyword dictionary: the grammar's quoted literals."""
    return grammar.quoted_literals()

"""Scenario pinning: reproducible draws for every RandomSource output."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from .model_ir import Distribution, SystemModel

REAL_DENOMINATOR = 2 ** 32


@dataclass(frozen=True)
class ScenarioSeed:
    run: int
    stream_seed: int
    pins: dict = field(default_factory=dict, hash=False)


def _digest(*parts: int) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        h.update(int(p).to_bytes(16, "big", signed=True))
    return h.digest()


def stream_seed(seed: int, k: int) -> int:
    return int.from_bytes(_digest(seed, k)[:8], "big")


def _words(stream: int, block_id: int, step: int) -> tuple[int, int]:
    d = _digest(stream, block_id, step)
    return int.from_bytes(d[:8], "big"), int.from_bytes(d[8:12], "big")


def draw(dist: Distribution, u64: int, u32: int):
    """Map uniform words to a value of *dist* (counter-based, no generator state)."""
    unit = Fraction(u32, REAL_DENOMINATOR)
    if dist.kind == "UniformInt":
        lo, hi = dist.params
        return lo + ((u64 * (hi - lo + 1)) >> 64)
    if dist.kind == "UniformReal":
        lo, hi = dist.params
        return lo + (hi - lo) * unit
    if dist.kind == "Bernoulli":
        return unit < dist.params[0]
    values, weights = dist.params
    x = unit * sum(weights)
    acc = Fraction(0)
    for v, w in zip(values, weights):
        acc += w
        if x < acc:
            return v
    return values[-1]


def sample_scenario(model: SystemModel, N: int, seed: int, k: int) -> ScenarioSeed:
    s = stream_seed(seed, k)
    pins = {}
    for b in model.random_sources():
        dist = b.params["dist"]
        for i in range(N):
            pins[(b.id, i)] = draw(dist, *_words(s, b.id, i))
    return ScenarioSeed(k, s, pins)

"""Shared bookkeeping for sampler runs."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SamplerDiagnostics:
    """Counters accumulated over one sampling call, including restarts.

    `bits_consumed` counts uniform draws actually taken (forced decisions
    consume none).  `bit_levels`, when retained, holds the 0/1 digit planes
    of the returned table, least significant first.
    """

    bits_consumed: int = 0
    restarts: int = 0
    dead_states: int = 0
    levels: int = 0
    bit_levels: list | None = None
    failure_site: tuple | None = None

    def absorb(self, other: "SamplerDiagnostics") -> None:
        self.bits_consumed += other.bits_consumed
        self.restarts += other.restarts
        self.dead_states += other.dead_states

    def as_dict(self) -> dict:
        out = {
            "bits_consumed": self.bits_consumed,
            "restarts": self.restarts,
            "dead_states": self.dead_states,
        }
        if self.levels:
            out["levels"] = self.levels
        if self.bit_levels is not None:
            out["bit_levels"] = [lvl.tolist() for lvl in self.bit_levels]
        if self.failure_site is not None:
            out["failure_site"] = list(self.failure_site)
        return out

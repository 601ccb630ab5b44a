"""Resource caps; overridable through the DESTACKIFY_CAPS environment variable."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import InputError, ResourceError

ENV_VAR = "DESTACKIFY_CAPS"


@dataclass(frozen=True)
class Caps:
    max_dim: int = 16
    max_group_order: int = 10_000
    max_hilbert_dim: int = 4
    max_hilbert_box: int = 2_000_000
    max_table_dim: int = 6

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):
            if getattr(self, f.name) <= 0:
                raise InputError(f"cap {f.name} must be positive")

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> Caps:
        """Parse ``max_dim=8,max_group_order=500`` style overrides."""
        raw = (os.environ if environ is None else environ).get(ENV_VAR, "").strip()
        if not raw:
            return cls()
        names = {f.name for f in dataclasses.fields(cls)}
        values = {}
        for item in raw.split(","):
            key, sep, val = item.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise InputError(f"bad {ENV_VAR} entry {item!r}; known caps: {sorted(names)}")
            try:
                values[key] = int(val)
            except ValueError:
                raise InputError(f"bad {ENV_VAR} value {item!r}") from None
        return cls(**values)

    def check_chart(self, dim: int, group_order: int) -> None:
        if dim > self.max_dim:
            raise ResourceError(f"dimension {dim} exceeds cap max_dim={self.max_dim}")
        if group_order > self.max_group_order:
            raise ResourceError(f"group order {group_order} exceeds cap max_group_order={self.max_group_order}")


DEFAULT_CAPS = Caps()

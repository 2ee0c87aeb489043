import os

# Largest C(n, j) (or other per-instance table) admitted without an override.
DEFAULT_MEMCAP = 2**27
MEMCAP_ENV = "HYPERLAB_MEMCAP"


class ResourceLimitError(RuntimeError):
    """An instance would need a table larger than the configured cap."""


def memcap(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    raw = os.environ.get(MEMCAP_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{MEMCAP_ENV}={raw!r} is not an integer") from None
    return DEFAULT_MEMCAP


def check_table_size(entries: int, what: str, cap: int | None = None) -> None:
    limit = memcap(cap)
    if entries > limit:
        raise ResourceLimitError(
            f"{what} needs {entries} entries, above the cap of {limit}; "
            f"use a smaller n or raise the cap via {MEMCAP_ENV} / --memcap"
        )

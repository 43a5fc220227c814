# utils/provenance.py
from config import RunConfig

VERSION = "0.3.0"
TOOL = "csh-ddi"


def provenance(config: RunConfig | None = None, seed: int | None = None) -> dict:
    info = {"tool": TOOL, "version": VERSION}
    if config is not None:
        info["config_hash"] = config.config_hash()
        info["seed"] = config.train.seed if seed is None else seed
    elif seed is not None:
        info["seed"] = seed
    return info


def provenance_header(config: RunConfig | None = None, seed: int | None = None) -> str:
    """Comment line written at the top of every text output."""
    info = provenance(config, seed)
    extras = " ".join(f"{k}={v}" for k, v in info.items() if k not in ("tool", "version"))
    return f"# {TOOL} {VERSION} {extras}".rstrip()

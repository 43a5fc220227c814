# training/checkpoint.py
from pathlib import Path

import numpy as np
import pandas as pd
import torch

from model.params import DTYPE, ModelParams

MAGIC = "csh-checkpoint"
FORMAT_VERSION = 1
_HEADER_END = "end"
REQUIRED_FIELDS = ("version", "K", "N", "drugs", "side_effects", "feature_dim")


def _group_shapes(K: int, num_layers: int, feature_dim: int, num_side_effects: int) -> dict[str, tuple]:
    shapes = {
        "drug_w1": (feature_dim, K),
        "drug_b1": (K,),
        "drug_w2": (K, K),
        "drug_b2": (K,),
        "se_embedding": (num_side_effects, K),
        "weights": (K, num_side_effects),
    }
    for i in range(num_layers):
        shapes[f"theta_{i}"] = (K, K)
    return shapes


def save_checkpoint(path: str | Path, params: ModelParams, num_drugs: int, meta: dict | None = None) -> None:
    """
    Text header of ``key=value`` lines (version, K, N, drugs, side
    effects, then ``meta``), followed by each parameter group as a
    little-endian uint64 element count and its float64 values.
    """
    if num_drugs < 0:
        raise ValueError(f"num_drugs must be non-negative, got {num_drugs}")
    header = {
        "version": FORMAT_VERSION,
        "K": params.K,
        "N": params.num_layers,
        "drugs": int(num_drugs),
        "side_effects": params.num_side_effects,
        "feature_dim": params.feature_dim,
        **{k: v for k, v in (meta or {}).items() if k not in REQUIRED_FIELDS},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        lines = [MAGIC] + [f"{k}={v}" for k, v in header.items()] + [_HEADER_END]
        f.write(("\n".join(lines) + "\n").encode("utf-8"))
        for tensor in params.groups().values():
            values = np.ascontiguousarray(tensor.detach().numpy().ravel(), dtype="<f8")
            f.write(np.array([values.size], dtype="<u8").tobytes())
            f.write(values.tobytes())


def load_checkpoint(path: str | Path) -> tuple[ModelParams, dict]:
    """Inverse of save_checkpoint; returns the parameters and the header fields."""
    with open(path, "rb") as f:
        data = f.read()
    header: dict[str, str] = {}
    offset = 0
    first = True
    while True:
        end = data.find(b"\n", offset)
        if end < 0:
            raise ValueError(f"{path}: truncated checkpoint header")
        line = data[offset:end].decode("utf-8")
        offset = end + 1
        if first:
            if line != MAGIC:
                raise ValueError(f"{path}: not a checkpoint file")
            first = False
            continue
        if line == _HEADER_END:
            break
        key, _, value = line.partition("=")
        header[key] = value

    if int(header.get("version", -1)) != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {header.get('version')}")
    missing = [name for name in REQUIRED_FIELDS if name not in header]
    if missing:
        raise ValueError(f"{path}: checkpoint header lacks {', '.join(missing)}")
    if not header["drugs"].isdigit():
        raise ValueError(f"{path}: bad drug count {header['drugs']!r}")
    shapes = _group_shapes(
        int(header["K"]), int(header["N"]), int(header["feature_dim"]), int(header["side_effects"])
    )
    groups = {}
    for name, shape in shapes.items():
        if offset + 8 > len(data):
            raise ValueError(f"{path}: truncated at group {name}")
        count = int(np.frombuffer(data, dtype="<u8", count=1, offset=offset)[0])
        offset += 8
        expected = int(np.prod(shape))
        if count != expected:
            raise ValueError(f"dimension mismatch: group {name} stores {count} values, expected {expected}")
        if offset + 8 * count > len(data):
            raise ValueError(f"{path}: truncated at group {name}")
        values = np.frombuffer(data, dtype="<f8", count=count, offset=offset).astype(np.float64)
        offset += 8 * count
        groups[name] = torch.as_tensor(values.reshape(shape), dtype=DTYPE)
    if offset != len(data):
        raise ValueError(f"{path}: {len(data) - offset} trailing bytes")
    params = ModelParams.from_groups(groups)
    params.validate()
    return params, header


def save_loss_trace(path: str | Path, trace: list[float], header_line: str | None = None) -> None:
    """``epoch,loss`` CSV, optionally preceded by a provenance comment line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        if header_line:
            f.write(header_line + "\n")
        pd.DataFrame({"epoch": range(len(trace)), "loss": trace}).to_csv(f, index=False, float_format="%.10g")

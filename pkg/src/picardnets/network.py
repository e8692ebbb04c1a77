"""Feedforward network data model: layer lists, size operators, realization, JSON.

A network is an ordered list of affine layers (W_1, b_1), ..., (W_L, b_L) with
W_k of shape (l_k, l_{k-1}) and b_k of shape (l_k,). The realized function
applies the activation elementwise after every layer except the last; the last
layer stays purely affine. Weights are dense float64 and immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .activations import Activation, parse_activation

Layer = tuple[np.ndarray, np.ndarray]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable list of affine layers; build with `network(...)` or `Network(layers)`."""

    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        if len(self.layers) == 0:
            raise ValueError("a network needs at least one layer")
        frozen: list[Layer] = []
        prev_out: int | None = None
        for k, (w, b) in enumerate(self.layers):
            w = _freeze(w)
            b = _freeze(b)
            if w.ndim != 2:
                raise ValueError(f"layer {k}: weight matrix must be 2-D, got shape {w.shape}")
            if b.ndim != 1:
                raise ValueError(f"layer {k}: bias must be 1-D, got shape {b.shape}")
            if w.shape[0] != b.shape[0]:
                raise ValueError(
                    f"layer {k}: weight rows {w.shape[0]} != bias length {b.shape[0]}"
                )
            if w.shape[0] < 1 or w.shape[1] < 1:
                raise ValueError(f"layer {k}: layer widths must be >= 1, got {w.shape}")
            if prev_out is not None and w.shape[1] != prev_out:
                raise ValueError(
                    f"layer {k}: expects {w.shape[1]} inputs but previous layer outputs {prev_out}"
                )
            prev_out = w.shape[0]
            frozen.append((w, b))
        object.__setattr__(self, "layers", tuple(frozen))


def network(*layers: tuple[object, object]) -> Network:
    """Build a Network from (weights, bias) pairs, coercing to float64 arrays."""
    return Network(tuple((np.asarray(w, dtype=np.float64), np.asarray(b, dtype=np.float64)) for w, b in layers))


def dims(net: Network) -> tuple[int, ...]:
    """Layer width vector (l_0, l_1, ..., l_L)."""
    first_w = net.layers[0][0]
    return (first_w.shape[1],) + tuple(w.shape[0] for w, _ in net.layers)


def dim_at(net: Network, n: int) -> int:
    """Width of level n, or 0 when n exceeds the depth."""
    if n < 0:
        raise ValueError("level index must be >= 0")
    d = dims(net)
    return d[n] if n < len(d) else 0


def depth(net: Network) -> int:
    return len(net.layers)


def input_dim(net: Network) -> int:
    return net.layers[0][0].shape[1]


def output_dim(net: Network) -> int:
    return net.layers[-1][0].shape[0]


def hidden_count(net: Network) -> int:
    return len(net.layers) - 1


def max_width(net: Network) -> int:
    return max(dims(net))


def param_count(net: Network) -> int:
    """Total scalar parameter count, sum over layers of l_k * (l_{k-1} + 1)."""
    return sum(w.shape[0] * (w.shape[1] + 1) for w, _ in net.layers)


def realize(net: Network, act: Activation | Callable[[np.ndarray], np.ndarray], x: object) -> np.ndarray:
    """Forward pass.

    `x` may be a single input of shape (l_0,) or a batch of shape (N, l_0); the
    result has shape (l_L,) or (N, l_L) accordingly. The activation is applied
    after every layer except the last. Any callable mapping arrays elementwise
    is accepted in place of an Activation.
    """
    z = np.asarray(x, dtype=np.float64)
    squeeze = z.ndim == 1
    if z.ndim == 1:
        z = z[None, :]
    if z.ndim != 2 or z.shape[1] != input_dim(net):
        raise ValueError(f"input has shape {np.shape(x)}, expected last axis {input_dim(net)}")
    last = len(net.layers) - 1
    for k, (w, b) in enumerate(net.layers):
        z = z @ w.T + b
        if k != last:
            z = act(z)
    return z[0] if squeeze else z


# -- JSON serialization ------------------------------------------------------
#
# Schema: {"dims": [...], "layers": [{"w": [row-major flat], "b": [...]}, ...],
#          "activation": tag}. Floats are written as shortest round-trip
# decimal (Python repr), so load(save(net)) reproduces every bit.


def _float_list(a: np.ndarray) -> list[float]:
    flat = np.ravel(a, order="C")
    if not np.all(np.isfinite(flat)):
        raise ValueError("network contains non-finite values; refusing to serialize")
    return [float(v) for v in flat]


def to_json_obj(net: Network, act: Activation) -> dict:
    return {
        "dims": list(dims(net)),
        "layers": [{"w": _float_list(w), "b": _float_list(b)} for w, b in net.layers],
        "activation": act.tag(),
    }


def from_json_obj(obj: dict) -> tuple[Network, Activation]:
    shape = [int(v) for v in obj["dims"]]
    if len(shape) < 2:
        raise ValueError("dims must list at least input and output widths")
    layers = []
    raw = obj["layers"]
    if len(raw) != len(shape) - 1:
        raise ValueError(f"expected {len(shape) - 1} layers for dims {shape}, got {len(raw)}")
    for k, entry in enumerate(raw):
        rows, cols = shape[k + 1], shape[k]
        w = np.asarray(entry["w"], dtype=np.float64)
        b = np.asarray(entry["b"], dtype=np.float64)
        if w.size != rows * cols:
            raise ValueError(f"layer {k}: expected {rows * cols} weights, got {w.size}")
        if b.size != rows:
            raise ValueError(f"layer {k}: expected {rows} biases, got {b.size}")
        layers.append((w.reshape(rows, cols), b))
    return network(*layers), parse_activation(obj["activation"])


def dumps_network(net: Network, act: Activation) -> str:
    return json.dumps(to_json_obj(net, act), sort_keys=True, allow_nan=False)


def loads_network(text: str) -> tuple[Network, Activation]:
    return from_json_obj(json.loads(text))


def save_network(path: str | Path, net: Network, act: Activation) -> None:
    Path(path).write_text(dumps_network(net, act) + "\n")


def load_network(path: str | Path) -> tuple[Network, Activation]:
    return loads_network(Path(path).read_text())

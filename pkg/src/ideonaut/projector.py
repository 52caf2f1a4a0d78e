"""Cross-modal projection from encoder space into decoder token space.

A projector is a frozen affine/MLP map applied to an explored embedding
to obtain the single soft-token vector the decoder consumes. Weights
arrive as an XPRJ1 byte stream (see `load_weights`) produced by
external training; nothing here learns.

XPRJ1 layout, all integers little-endian:

    magic "XPRJ1" (5 bytes)
    format version  u16   (currently 1)
    layer count     u16
    per layer:
        m_in        u32
        m_out       u32
        activation  u8    (0=none, 1=relu, 2=gelu)
        W           m_out*m_in float32, row-major
        b           m_out float32
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import DimensionMismatch, WeightsFormatError
from .latent import Embedding

MAGIC = b"XPRJ1"
FORMAT_VERSION = 1

ACTIVATIONS = ("none", "relu", "gelu")
_ACT_CODE = {name: i for i, name in enumerate(ACTIVATIONS)}

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Layer:
    weight: np.ndarray  # (m_out, m_in) float32
    bias: np.ndarray    # (m_out,) float32
    activation: str

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise WeightsFormatError(f"unknown activation {self.activation!r}")
        w = np.asarray(self.weight, dtype="<f4")
        b = np.asarray(self.bias, dtype="<f4")
        if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
            raise WeightsFormatError(
                f"layer shapes inconsistent: W {w.shape}, b {b.shape}"
            )
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise WeightsFormatError("layer contains non-finite entries")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)


@dataclass(frozen=True)
class ProjectorWeights:
    """A validated stack of layers mapping R^input_dim -> R^output_dim."""

    layers: tuple[Layer, ...]
    input_dim: int
    output_dim: int

    def __post_init__(self):
        if not self.layers:
            raise WeightsFormatError("projector needs at least one layer")
        if self.layers[0].weight.shape[1] != self.input_dim:
            raise WeightsFormatError(
                "dimension chain broken: first layer expects "
                f"{self.layers[0].weight.shape[1]} inputs, declared input_dim {self.input_dim}"
            )
        if self.layers[-1].weight.shape[0] != self.output_dim:
            raise WeightsFormatError(
                "dimension chain broken: last layer emits "
                f"{self.layers[-1].weight.shape[0]}, declared output_dim {self.output_dim}"
            )
        for k in range(len(self.layers) - 1):
            out_k = self.layers[k].weight.shape[0]
            in_next = self.layers[k + 1].weight.shape[1]
            if out_k != in_next:
                raise WeightsFormatError(
                    f"dimension chain broken between layers {k} and {k + 1}: "
                    f"{out_k} -> {in_next}"
                )


@dataclass(frozen=True)
class ProjectedLatent:
    """The soft-token vector h in the decoder's embedding space."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"projected latent must be 1-D, got shape {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def to_float32_bytes(self) -> bytes:
        return self.values.astype("<f4").tobytes()


def identity_projector(dim: int) -> ProjectorWeights:
    """A built-in pass-through projector (requires encoder dim == decoder dim)."""
    layer = Layer(weight=np.eye(dim, dtype="<f4"),
                  bias=np.zeros(dim, dtype="<f4"),
                  activation="none")
    return ProjectorWeights(layers=(layer,), input_dim=dim, output_dim=dim)


def _apply_activation(v: np.ndarray, name: str) -> np.ndarray:
    if name == "none":
        return v
    if name == "relu":
        return np.maximum(v, 0.0)
    if name == "gelu":
        return 0.5 * v * (1.0 + erf(v / _SQRT2))
    raise WeightsFormatError(f"unknown activation {name!r}")


def project(e: Embedding, w: ProjectorWeights) -> ProjectedLatent:
    """Run e through each layer in order: v <- act(Wv + b). Math in float64."""
    if e.dim != w.input_dim:
        raise DimensionMismatch(
            f"projector expects input dim {w.input_dim}, got {e.dim}"
        )
    v = e.values  # already float64
    for layer in w.layers:
        v = layer.weight.astype(np.float64) @ v + layer.bias.astype(np.float64)
        v = _apply_activation(v, layer.activation)
    if not np.all(np.isfinite(v)):
        raise WeightsFormatError("projection produced non-finite values (corrupt weights?)")
    return ProjectedLatent(v)


def _read_exact(stream: io.BufferedIOBase, n: int, what: str) -> bytes:
    buf = stream.read(n)
    if buf is None or len(buf) != n:
        raise WeightsFormatError(f"truncated stream while reading {what}")
    return buf


def load_weights(source: io.BufferedIOBase | bytes) -> ProjectorWeights:
    """Parse and validate an XPRJ1 byte stream."""
    stream = io.BytesIO(source) if isinstance(source, (bytes, bytearray)) else source
    if _read_exact(stream, 5, "magic") != MAGIC:
        raise WeightsFormatError("bad magic bytes: not an XPRJ1 stream")
    (version,) = struct.unpack("<H", _read_exact(stream, 2, "version"))
    if version != FORMAT_VERSION:
        raise WeightsFormatError(f"unsupported XPRJ1 version {version}")
    (n_layers,) = struct.unpack("<H", _read_exact(stream, 2, "layer count"))
    if n_layers == 0:
        raise WeightsFormatError("projector needs at least one layer")
    layers = []
    for k in range(n_layers):
        m_in, m_out = struct.unpack("<II", _read_exact(stream, 8, f"layer {k} dims"))
        (act_code,) = struct.unpack("<B", _read_exact(stream, 1, f"layer {k} activation"))
        if act_code >= len(ACTIVATIONS):
            raise WeightsFormatError(f"layer {k}: unknown activation code {act_code}")
        if m_in == 0 or m_out == 0:
            raise WeightsFormatError(f"layer {k}: zero dimension")
        w_bytes = _read_exact(stream, 4 * m_out * m_in, f"layer {k} weight matrix")
        b_bytes = _read_exact(stream, 4 * m_out, f"layer {k} bias")
        w = np.frombuffer(w_bytes, dtype="<f4").reshape(m_out, m_in)
        b = np.frombuffer(b_bytes, dtype="<f4")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise WeightsFormatError(f"layer {k}: non-finite entries")
        layers.append(Layer(weight=w, bias=b, activation=ACTIVATIONS[act_code]))
    trailing = stream.read(1)
    if trailing:
        raise WeightsFormatError("trailing bytes after last layer")
    return ProjectorWeights(
        layers=tuple(layers),
        input_dim=layers[0].weight.shape[1],
        output_dim=layers[-1].weight.shape[0],
    )


def save_weights(w: ProjectorWeights) -> bytes:
    """Serialize weights back to XPRJ1 bytes (bit-exact round trip with load)."""
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<H", FORMAT_VERSION))
    out.write(struct.pack("<H", len(w.layers)))
    for layer in w.layers:
        m_out, m_in = layer.weight.shape
        out.write(struct.pack("<II", m_in, m_out))
        out.write(struct.pack("<B", _ACT_CODE[layer.activation]))
        out.write(layer.weight.astype("<f4").tobytes())
        out.write(layer.bias.astype("<f4").tobytes())
    return out.getvalue()

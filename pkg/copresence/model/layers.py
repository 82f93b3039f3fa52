"""Patch embedding and the token-augmented attention encoder."""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from copresence.errors import ShapeMismatchError
from copresence.tensor import DiffTensor
from copresence.tensor import functional as F


def patchify(images: np.ndarray, patch_size: int) -> np.ndarray:
    """(B, S, S, 3) images to (B, patches, 3*p*p) rows in raster order."""
    if images.ndim != 4 or images.shape[-1] != 3:
        raise ShapeMismatchError(f"expected (B, H, W, 3) images, got {images.shape}")
    batch, height, width, _ = images.shape
    if height % patch_size or width % patch_size:
        raise ShapeMismatchError(
            f"image {height}x{width} is not divisible into {patch_size}x{patch_size} patches"
        )
    rows, cols = height // patch_size, width // patch_size
    patches = images.reshape(batch, rows, patch_size, cols, patch_size, 3)
    patches = patches.transpose(0, 1, 3, 2, 4, 5)
    return patches.reshape(batch, rows * cols, patch_size * patch_size * 3)


def sinusoidal_positions(num_positions: int, channels: int) -> np.ndarray:
    positions = np.arange(num_positions)[:, None]
    pairs = np.arange(channels)[None, :] // 2
    angles = positions / np.power(10000.0, 2.0 * pairs / channels)
    return np.where(np.arange(channels)[None, :] % 2 == 0, np.sin(angles), np.cos(angles))


def embed_patches(
    images: np.ndarray,
    weight: DiffTensor,
    bias: DiffTensor,
    patch_size: int,
) -> DiffTensor:
    """Linear patch projection plus a fixed sinusoidal position signal.

    Accepts one (S, S, 3) image or a (B, S, S, 3) batch and returns
    (h*w, c) or (B, h*w, c) scene features.
    """
    single = images.ndim == 3
    batch = images[None] if single else images
    patches = patchify(batch, patch_size)
    if patches.shape[-1] != weight.shape[0]:
        raise ShapeMismatchError(
            f"patches of width {patches.shape[-1]} do not fit projection {weight.shape}"
        )
    positions = sinusoidal_positions(patches.shape[1], weight.shape[1])
    x = F.matmul(patches, weight) + bias + positions
    return x[0] if single else x


@dataclass
class TokenBlock:
    x: DiffTensor
    X: DiffTensor
    H: DiffTensor
    attention: List[np.ndarray]


def attention_weights(
    H: DiffTensor, w_q: DiffTensor, w_k: DiffTensor, num_heads: int = 1
) -> List[DiffTensor]:
    """Row-stochastic attention matrices, one per head."""
    queries = F.matmul(H, w_q)
    keys = F.matmul(H, w_k)
    channels = w_q.shape[-1]
    if channels % num_heads:
        raise ShapeMismatchError(f"{channels} channels do not split into {num_heads} heads")
    head_width = channels // num_heads

    weights = []
    for head in range(num_heads):
        cols = (Ellipsis, slice(head * head_width, (head + 1) * head_width))
        logits = F.matmul(queries[cols], F.transpose(keys[cols]))
        weights.append(F.softmax(logits / math.sqrt(head_width), axis=-1))
    return weights


def encoder_layer(
    H: DiffTensor,
    layer: Dict[str, DiffTensor],
    num_heads: int = 1,
    dropout: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    training: bool = False,
    attention_out: Optional[List[np.ndarray]] = None,
) -> DiffTensor:
    """Self-attention over the rows of H followed by a two-layer ReLU block."""
    if H.shape[-1] != layer["w_q"].shape[0]:
        raise ShapeMismatchError(
            f"rows of width {H.shape[-1]} do not fit w_q {layer['w_q'].shape}"
        )
    values = F.matmul(H, layer["w_v"])
    width = values.shape[-1]
    if width % num_heads:
        raise ShapeMismatchError(f"value width {width} does not split into {num_heads} heads")
    value_width = width // num_heads

    heads = []
    for head, weights in enumerate(attention_weights(H, layer["w_q"], layer["w_k"], num_heads)):
        if attention_out is not None:
            attention_out.append(weights.values)
        cols = (Ellipsis, slice(head * value_width, (head + 1) * value_width))
        heads.append(F.matmul(weights, values[cols]))
    attended = heads[0] if num_heads == 1 else F.concat(heads, axis=-1)

    hidden = F.relu(F.matmul(attended, layer["w1"]) + layer["b1"])
    hidden = F.dropout(hidden, dropout, rng, training)
    return F.matmul(hidden, layer["w2"]) + layer["b2"]


def encode_with_tokens(
    x: DiffTensor,
    tokens: Optional[DiffTensor],
    layers: List[Dict[str, DiffTensor]],
    num_heads: int = 1,
    dropout: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    training: bool = False,
) -> TokenBlock:
    """Stacks transposed scene features with the weather tokens and encodes them.

    x is (B, h*w, c); tokens is (n, h*w) or None. H has c + n rows of width
    h*w; X is its last n rows after encoding, or all c rows without tokens.
    """
    if x.ndim != 3:
        raise ShapeMismatchError(f"expected (B, h*w, c) scene features, got {x.shape}")
    batch, spatial, channels = x.shape
    scene_rows = F.transpose(x)

    if tokens is not None:
        if tokens.ndim != 2 or tokens.shape[1] != spatial:
            raise ShapeMismatchError(
                f"tokens {tokens.shape} do not match scene features {x.shape}"
            )
        token_rows = F.broadcast_to(tokens, (batch, *tokens.shape))
        H = F.concat([scene_rows, token_rows], axis=1)
    else:
        H = scene_rows

    attention: List[np.ndarray] = []
    for layer in layers:
        H = encoder_layer(H, layer, num_heads, dropout, rng, training, attention)

    X = H[:, channels:, :] if tokens is not None else H
    return TokenBlock(x=x, X=X, H=H, attention=attention)

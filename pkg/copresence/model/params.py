import zlib
from collections import OrderedDict
from typing import Dict, Iterator, List, Tuple

import numpy as np

from copresence.config import ModelConfig
from copresence.errors import NonFiniteError, ShapeMismatchError
from copresence.tensor import DiffTensor
from copresence.utils.random import derive_rng

LATENT_NETS = ("prior", "posterior")


def latent_net_widths(config: ModelConfig, posterior: bool = False) -> List[int]:
    """Layer widths of a latent net, input first, 2M output last."""
    input_width = config.feature_rows * config.spatial
    if posterior and not config.use_mfe:
        # without tokens the ground truth is appended instead of added per row
        input_width += config.num_categories
    return [input_width, *config.latent_hidden_sizes, 2 * config.latent_size]


def parameter_shapes(config: ModelConfig) -> "OrderedDict[str, Tuple[int, ...]]":
    """Every parameter the configuration uses, in canonical order."""
    c, hw, n = config.channels, config.spatial, config.num_categories
    shapes: "OrderedDict[str, Tuple[int, ...]]" = OrderedDict()

    shapes["patch_embed.weight"] = (config.patch_dim, c)
    shapes["patch_embed.bias"] = (c,)
    if config.use_mfe:
        shapes["weather_tokens"] = (n, hw)

    for layer in range(config.depth):
        prefix = f"encoder.{layer}"
        shapes[f"{prefix}.w_q"] = (hw, c)
        shapes[f"{prefix}.w_k"] = (hw, c)
        shapes[f"{prefix}.w_v"] = (hw, hw)
        shapes[f"{prefix}.w1"] = (hw, config.ffn_width)
        shapes[f"{prefix}.b1"] = (config.ffn_width,)
        shapes[f"{prefix}.w2"] = (config.ffn_width, hw)
        shapes[f"{prefix}.b2"] = (hw,)

    if config.use_pul:
        for net in LATENT_NETS:
            widths = latent_net_widths(config, posterior=net == "posterior")
            for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
                shapes[f"{net}.{i}.weight"] = (fan_in, fan_out)
                shapes[f"{net}.{i}.bias"] = (fan_out,)

    shapes["head.w3"] = (n, config.feature_rows)
    shapes["head.b3"] = (n, 1)
    if config.use_pul:
        shapes["head.w4"] = (config.latent_size, n)
        shapes["head.b4"] = (n,)
    return shapes


def _initial_values(
    name: str, shape: Tuple[int, ...], config: ModelConfig
) -> np.ndarray:
    # crc32 is stable across processes, unlike hash()
    rng = derive_rng(config.seed, zlib.crc32(name.encode("utf-8")))
    if name == "weather_tokens":
        return rng.normal(0.0, config.token_init_std, size=shape)
    if len(shape) == 1 or name in ("head.b3",):
        return np.zeros(shape)
    fan_in = shape[0] if name != "head.w3" else shape[1]
    return rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=shape)


class ModelParams:
    """Named parameter tensors of one MeFormer, in canonical order."""

    def __init__(self, tensors: "OrderedDict[str, DiffTensor]"):
        self._tensors = tensors

    @classmethod
    def initialize(cls, config: ModelConfig) -> "ModelParams":
        # each parameter draws from its own stream, so disabling a component
        # leaves the initialization of the others untouched
        tensors = OrderedDict(
            (name, DiffTensor(_initial_values(name, shape, config), requires_grad=True, name=name))
            for name, shape in parameter_shapes(config).items()
        )
        return cls(tensors)

    @classmethod
    def from_arrays(cls, config: ModelConfig, arrays: Dict[str, np.ndarray]) -> "ModelParams":
        expected = parameter_shapes(config)
        missing = [name for name in expected if name not in arrays]
        extra = [name for name in arrays if name not in expected]
        if missing or extra:
            raise ShapeMismatchError(
                f"parameter set does not match the config: missing {missing}, unexpected {extra}"
            )
        tensors = OrderedDict()
        for name, shape in expected.items():
            if tuple(arrays[name].shape) != shape:
                raise ShapeMismatchError(
                    f"{name} has shape {tuple(arrays[name].shape)}, expected {shape}"
                )
            tensors[name] = DiffTensor(arrays[name], requires_grad=True, name=name)
        return cls(tensors)

    def __getitem__(self, name: str) -> DiffTensor:
        return self._tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def names(self) -> List[str]:
        return list(self._tensors)

    def items(self):
        return self._tensors.items()

    def group(self, prefix: str) -> List[DiffTensor]:
        return [t for name, t in self._tensors.items() if name.startswith(prefix + ".")]

    def latent_layers(self, net: str) -> List[Tuple[DiffTensor, DiffTensor]]:
        layers = []
        i = 0
        while f"{net}.{i}.weight" in self._tensors:
            layers.append((self._tensors[f"{net}.{i}.weight"], self._tensors[f"{net}.{i}.bias"]))
            i += 1
        return layers

    def encoder_layer(self, layer: int) -> Dict[str, DiffTensor]:
        prefix = f"encoder.{layer}."
        return {
            name[len(prefix) :]: tensor
            for name, tensor in self._tensors.items()
            if name.startswith(prefix)
        }

    def zero_grad(self) -> None:
        for tensor in self._tensors.values():
            tensor.zero_grad()

    def to_arrays(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, t.values.copy()) for name, t in self._tensors.items())

    def num_parameters(self) -> int:
        return int(sum(t.size for t in self._tensors.values()))

    def check_finite(self) -> None:
        for name, tensor in self._tensors.items():
            if not np.isfinite(tensor.values).all():
                raise NonFiniteError(f"parameter {name} holds non-finite values")

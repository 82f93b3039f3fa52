import itertools
from typing import Optional, Sequence, Tuple, Union

import numpy as np

_node_ids = itertools.count()

ArrayLike = Union[np.ndarray, Sequence, float, int]


class DiffTensor:
    """Dense float64 array that records the operations applied to it.

    `grad` stays `None` until a tape replays backward through this tensor.
    """

    # numpy defers binary operators to us when a DiffTensor is on the right
    __array_priority__ = 100

    def __init__(
        self,
        values: ArrayLike,
        requires_grad: bool = False,
        name: str = "",
    ) -> None:
        self.values: np.ndarray = np.array(values, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self.node_id = next(_node_ids)
        self._tape = None

    @classmethod
    def _wrap(cls, values: np.ndarray, requires_grad: bool, name: str) -> "DiffTensor":
        # op outputs are fresh arrays and are stored without a copy
        tensor = cls.__new__(cls)
        tensor.values = np.asarray(values, dtype=np.float64)
        tensor.grad = None
        tensor.requires_grad = requires_grad
        tensor.name = name
        tensor.node_id = next(_node_ids)
        tensor._tape = None
        return tensor

    @classmethod
    def zeros(cls, *shape: int, requires_grad: bool = False, name: str = "") -> "DiffTensor":
        return cls(np.zeros(shape), requires_grad=requires_grad, name=name)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    def item(self) -> float:
        return float(self.values.reshape(-1)[0]) if self.values.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.values

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "DiffTensor":
        return DiffTensor._wrap(self.values, False, self.name)

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"DiffTensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    def __len__(self) -> int:
        return self.shape[0]

    # operators delegate to the functional module, imported lazily to avoid a cycle

    def __add__(self, other):
        from copresence.tensor import functional as F

        return F.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from copresence.tensor import functional as F

        return F.sub(self, other)

    def __rsub__(self, other):
        from copresence.tensor import functional as F

        return F.sub(other, self)

    def __mul__(self, other):
        from copresence.tensor import functional as F

        return F.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from copresence.tensor import functional as F

        return F.div(self, other)

    def __neg__(self):
        from copresence.tensor import functional as F

        return F.neg(self)

    def __matmul__(self, other):
        from copresence.tensor import functional as F

        return F.matmul(self, other)

    def __getitem__(self, index):
        from copresence.tensor import functional as F

        return F.index(self, index)

    def transpose(self) -> "DiffTensor":
        from copresence.tensor import functional as F

        return F.transpose(self)

    def reshape(self, *shape: int) -> "DiffTensor":
        from copresence.tensor import functional as F

        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return F.reshape(self, shape)

    def sum(self, axis=None, keepdims: bool = False) -> "DiffTensor":
        from copresence.tensor import functional as F

        return F.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "DiffTensor":
        from copresence.tensor import functional as F

        return F.mean(self, axis=axis, keepdims=keepdims)

    def backward(self) -> None:
        from copresence.tensor import functional as F

        F.backward(self)

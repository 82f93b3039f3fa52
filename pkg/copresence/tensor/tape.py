import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from copresence.errors import ShapeMismatchError, TapeError
from copresence.tensor.diff_tensor import DiffTensor

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

_local = threading.local()


def active_tape() -> Optional["Tape"]:
    stack = getattr(_local, "stack", None)
    return stack[-1] if stack else None


@dataclass(frozen=True)
class TapeEntry:
    output_id: int
    input_ids: Tuple[int, ...]
    backward_fn: BackwardFn
    op_name: str


class Tape:
    """Records operations in execution order while active.

    Tapes are thread-local: a tape entered on one thread never sees
    operations run on another.
    """

    def __init__(self) -> None:
        self._entries: List[TapeEntry] = []
        self._tensors: Dict[int, DiffTensor] = {}
        self._consumed = False

    def __enter__(self) -> "Tape":
        if not hasattr(_local, "stack"):
            _local.stack = []
        _local.stack.append(self)
        return self

    def __exit__(self, *args) -> None:
        _local.stack.pop()

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> List[TapeEntry]:
        return list(self._entries)

    @property
    def consumed(self) -> bool:
        return self._consumed

    def record(
        self,
        output: DiffTensor,
        inputs: Sequence[DiffTensor],
        backward_fn: BackwardFn,
        op_name: str,
    ) -> None:
        if self._consumed:
            raise TapeError("Tape already replayed backward; call reset() before recording")
        if output.node_id in self._tensors:
            raise TapeError(f"Node {output.node_id} recorded twice")

        for tensor in inputs:
            self._tensors.setdefault(tensor.node_id, tensor)
        self._tensors[output.node_id] = output
        self._entries.append(
            TapeEntry(
                output_id=output.node_id,
                input_ids=tuple(tensor.node_id for tensor in inputs),
                backward_fn=backward_fn,
                op_name=op_name,
            )
        )
        output._tape = self

    def backward(self, output: DiffTensor) -> None:
        if output.size != 1:
            raise ShapeMismatchError(
                f"backward needs a scalar output, got shape {output.shape}"
            )
        if self._consumed:
            raise TapeError("backward already ran on this tape; call reset() first")
        if output.node_id not in self._tensors:
            raise TapeError(f"Output node {output.node_id} is not on this tape")

        grads: Dict[int, np.ndarray] = {output.node_id: np.ones_like(output.values)}
        # recording order is a topological order, so one reverse pass suffices
        for entry in reversed(self._entries):
            out_grad = grads.get(entry.output_id)
            if out_grad is None:
                continue

            input_grads = entry.backward_fn(out_grad)
            for input_id, input_grad in zip(entry.input_ids, input_grads):
                if input_grad is None or not self._tensors[input_id].requires_grad:
                    continue
                if input_id in grads:
                    grads[input_id] = grads[input_id] + input_grad
                else:
                    grads[input_id] = input_grad

        for node_id, grad in grads.items():
            tensor = self._tensors[node_id]
            if not tensor.requires_grad:
                continue
            tensor.grad = grad if tensor.grad is None else tensor.grad + grad

        self._consumed = True

    def reset(self) -> None:
        for tensor in self._tensors.values():
            if tensor._tape is self:
                tensor._tape = None
        self._entries = []
        self._tensors = {}
        self._consumed = False

from copresence.tensor.diff_tensor import DiffTensor
from copresence.tensor.functional import backward
from copresence.tensor.grad_check import grad_check, grad_check_params
from copresence.tensor.tape import Tape, TapeEntry, active_tape

__all__ = [
    "DiffTensor",
    "Tape",
    "TapeEntry",
    "active_tape",
    "backward",
    "grad_check",
    "grad_check_params",
]

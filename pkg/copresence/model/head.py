from typing import Optional

from copresence.errors import ShapeMismatchError
from copresence.tensor import DiffTensor
from copresence.tensor import functional as F


def predict_head(
    X: DiffTensor,
    z: Optional[DiffTensor],
    w3: DiffTensor,
    b3: DiffTensor,
    w4: Optional[DiffTensor] = None,
    b4: Optional[DiffTensor] = None,
) -> DiffTensor:
    """sigmoid(gap(c + c_prior)) with c = W3 X + b3 and c_prior = W4 z + b4.

    X is (rows, h*w) or (B, rows, h*w); z is (M,) or (B, M). c_prior is one
    value per category, broadcast over all h*w positions. Without z the
    latent branch is skipped.
    """
    if X.shape[-2] != w3.shape[1]:
        raise ShapeMismatchError(f"head W3 {w3.shape} does not fit features {X.shape}")
    logits = F.matmul(w3, X) + b3

    if z is not None:
        if w4 is None or b4 is None:
            raise ShapeMismatchError("a latent sample needs W4 and b4")
        if z.shape[-1] != w4.shape[0]:
            raise ShapeMismatchError(f"latent {z.shape} does not fit W4 {w4.shape}")
        c_prior = F.matmul(F.reshape(z, (-1, z.shape[-1])), w4) + b4
        if z.ndim == 1:
            c_prior = F.reshape(c_prior, (w4.shape[1], 1))
        else:
            c_prior = F.reshape(c_prior, (z.shape[0], w4.shape[1], 1))
        logits = logits + c_prior

    return F.sigmoid(F.gap(logits))

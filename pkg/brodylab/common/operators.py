import math
from typing import Callable, Sequence

import numpy as np
import torch
from torch.autograd import grad


def gradient(y, x, grad_outputs=None):
    if not y.requires_grad:
        return torch.zeros_like(x)
    if grad_outputs is None:
        grad_outputs = torch.ones_like(y)
    g = grad(y, [x], grad_outputs=grad_outputs, create_graph=True, allow_unused=True)[0]
    if g is None:
        return torch.zeros_like(x)
    return g


def divergence(y, x):
    div = torch.zeros(y.shape[:-1], dtype=x.dtype, device=x.device)
    for i in range(y.shape[-1]):
        div = div + gradient(y[..., i], x)[..., i]
    return div


def laplacian(y, x):
    return divergence(gradient(y, x), x)


def log_norm_laplacian_autograd(components: Callable[[torch.Tensor], Sequence[torch.Tensor]],
                                z: np.ndarray) -> np.ndarray:
    """|df|^2 = (1/4pi) Laplacian of log sum |f_i|^2, differentiated by autograd.

    Args:
        components: maps a complex128 tensor of points to the homogeneous
            components of the curve (one tensor per coordinate, holomorphic in z).
        z: points at which to evaluate, any shape.

    Returns:
        np.ndarray: |df|^2 with the shape of ``z``.
    """
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    x = torch.tensor(np.stack([flat.real, flat.imag], axis=-1), dtype=torch.float64, requires_grad=True)
    zt = torch.complex(x[..., 0], x[..., 1])
    norm_sq = sum(torch.abs(c) ** 2 for c in components(zt))
    lap = laplacian(torch.log(norm_sq), x)
    return (lap / (4.0 * math.pi)).detach().numpy().reshape(z.shape)


def log_norm_laplacian_fd(log_norm: Callable[[np.ndarray], np.ndarray], z: np.ndarray,
                          h: float = 1e-4) -> np.ndarray:
    """Five-point stencil version of the same Laplacian, ``log_norm`` returning log sum |f_i|^2."""
    z = np.asarray(z, dtype=complex)
    lap = (log_norm(z + h) + log_norm(z - h) + log_norm(z + 1j * h) + log_norm(z - 1j * h)
           - 4.0 * log_norm(z)) / h ** 2
    return lap / (4.0 * math.pi)

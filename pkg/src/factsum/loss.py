"""Contrastive loss kernel: mean pooling, cosine similarity, NT-Xent.

The anchor is a document representation, the positive its summary
representation, and the negatives perturbed-summary representations. Analytic
gradients accompany the loss so correctness can be checked against finite
differences without a differentiation framework.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LossConfig:
    tau: float = 0.05
    lam: float = 5.0  # weight of the contrastive term in the combined loss

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")


def mean_pool(states: np.ndarray) -> np.ndarray:
    """Column-wise mean of an n-by-d matrix of hidden states."""
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[0] == 0:
        raise ValueError("mean_pool needs a non-empty 2-d matrix")
    return states.mean(axis=0)


def cosine_sim(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(a @ b / (na * nb))


def _logits(z_doc, z_pos, z_negs, tau):
    sims = np.array([cosine_sim(z_doc, z_pos)] + [cosine_sim(z_doc, z) for z in z_negs])
    return sims / tau


def nt_xent_loss(z_doc, z_pos, z_negs, tau: float = 0.05) -> float:
    """−log softmax weight of the positive among {positive} ∪ negatives.

    Stabilized by subtracting the max logit; when the positive is the max the
    log1p form keeps losses accurate down to the underflow floor.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    logits = _logits(z_doc, z_pos, z_negs, tau)
    m = logits.max()
    if m == logits[0]:
        return float(np.log1p(np.exp(logits[1:] - m).sum()))
    return float(np.log(np.exp(logits - m).sum()) + (m - logits[0]))


def nt_xent_loss_and_grads(z_doc, z_pos, z_negs, tau: float = 0.05):
    """Loss plus analytic gradients w.r.t. the anchor, positive, and negatives.

    Returns (loss, grad_doc, grad_pos, [grad_neg...]).
    """
    z_doc = np.asarray(z_doc, dtype=float)
    candidates = [np.asarray(z_pos, dtype=float)] + [np.asarray(z, dtype=float) for z in z_negs]
    loss = nt_xent_loss(z_doc, candidates[0], candidates[1:], tau)

    logits = _logits(z_doc, candidates[0], candidates[1:], tau)
    shifted = np.exp(logits - logits.max())
    p = shifted / shifted.sum()

    norm_doc = np.linalg.norm(z_doc)
    grad_doc = np.zeros_like(z_doc)
    grads_out = []
    for i, z in enumerate(candidates):
        # d loss / d logit_i, then chain through the cosine
        dl = (p[i] - (1.0 if i == 0 else 0.0)) / tau
        norm_z = np.linalg.norm(z)
        cos = float(z_doc @ z / (norm_doc * norm_z))
        d_cos_d_doc = z / (norm_doc * norm_z) - cos * z_doc / norm_doc**2
        d_cos_d_z = z_doc / (norm_doc * norm_z) - cos * z / norm_z**2
        grad_doc += dl * d_cos_d_doc
        grads_out.append(dl * d_cos_d_z)
    return loss, grad_doc, grads_out[0], grads_out[1:]


def combined_loss(ce: float, cl: float, lam: float) -> float:
    """Total training loss: cross-entropy plus weighted contrastive term."""
    return ce + lam * cl

"""Numpy implementation of the classifier kernels.

Fallback twin of the compiled module in ``_fastkern.pyx``; both expose the
same five functions over float64 C-contiguous arrays. Shapes: x (B, n),
w1 (n, H), b1 (H,), w2 (H, C), b2 (C,), labels (B,) int64.
"""

from __future__ import annotations

import numpy as np


def dense_forward(x, w1, b1, w2, b2):
    """Returns (hidden_pre, hidden, logits) for logits = relu(x@w1+b1)@w2+b2."""
    hidden_pre = x @ w1 + b1
    hidden = np.maximum(hidden_pre, 0.0)
    logits = hidden @ w2 + b2
    return hidden_pre, hidden, logits


def softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(logits, labels):
    """Mean cross-entropy over the batch and its gradient w.r.t. logits."""
    probs = softmax(logits)
    batch = logits.shape[0]
    picked = probs[np.arange(batch), labels]
    loss = float(-np.log(picked).mean())
    dlogits = probs.copy()
    dlogits[np.arange(batch), labels] -= 1.0
    dlogits /= batch
    return loss, dlogits


def dense_backward(x, hidden_pre, dlogits, w2):
    """Gradients of the two dense layers given dL/dlogits."""
    hidden = np.maximum(hidden_pre, 0.0)
    dw2 = hidden.T @ dlogits
    db2 = dlogits.sum(axis=0)
    dhidden = dlogits @ w2.T
    dhidden_pre = np.where(hidden_pre > 0.0, dhidden, 0.0)
    dw1 = x.T @ dhidden_pre
    db1 = dhidden_pre.sum(axis=0)
    return dw1, db1, dw2, db2


def adam_step(param, grad, m, v, t, lr, beta1, beta2, eps):
    """One in-place Adam update; t is the 1-based step count."""
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)

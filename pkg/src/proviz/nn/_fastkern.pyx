# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled classifier kernels; see _kernels_np.py for the reference twin.

The dense layers use an ikj loop order with zero-skipping on the input rows:
hashed bag-of-words embeddings are mostly zeros, so layer one touches only
the occupied columns. Skipped terms are exact zeros, so results equal the
dense computation bit-for-bit in each summation order.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, sqrt

cnp.import_array()


def dense_forward(double[:, ::1] x, double[:, ::1] w1, double[::1] b1,
                  double[:, ::1] w2, double[::1] b2):
    cdef Py_ssize_t batch = x.shape[0], n = x.shape[1]
    cdef Py_ssize_t hid = w1.shape[1], out = w2.shape[1]
    cdef cnp.ndarray[double, ndim=2] hidden_pre = np.empty((batch, hid))
    cdef cnp.ndarray[double, ndim=2] hidden = np.empty((batch, hid))
    cdef cnp.ndarray[double, ndim=2] logits = np.empty((batch, out))
    cdef double[:, ::1] hp = hidden_pre, h = hidden, lg = logits
    cdef Py_ssize_t i, j, k
    cdef double xv, hv, acc

    for i in range(batch):
        for j in range(hid):
            hp[i, j] = b1[j]
        for k in range(n):
            xv = x[i, k]
            if xv == 0.0:
                continue
            for j in range(hid):
                hp[i, j] += xv * w1[k, j]
        for j in range(out):
            lg[i, j] = b2[j]
        for k in range(hid):
            hv = hp[i, k]
            hv = hv if hv > 0.0 else 0.0
            h[i, k] = hv
            if hv == 0.0:
                continue
            for j in range(out):
                lg[i, j] += hv * w2[k, j]
    return hidden_pre, hidden, logits


def softmax(double[:, ::1] logits):
    cdef Py_ssize_t batch = logits.shape[0], out = logits.shape[1]
    cdef cnp.ndarray[double, ndim=2] probs = np.empty((batch, out))
    cdef double[:, ::1] p = probs
    cdef Py_ssize_t i, j
    cdef double mx, total

    for i in range(batch):
        mx = logits[i, 0]
        for j in range(1, out):
            if logits[i, j] > mx:
                mx = logits[i, j]
        total = 0.0
        for j in range(out):
            p[i, j] = exp(logits[i, j] - mx)
            total += p[i, j]
        for j in range(out):
            p[i, j] /= total
    return probs


def cross_entropy(double[:, ::1] logits, long[::1] labels):
    cdef Py_ssize_t batch = logits.shape[0], out = logits.shape[1]
    cdef cnp.ndarray[double, ndim=2] dlogits = softmax(logits)
    cdef double[:, ::1] d = dlogits
    cdef Py_ssize_t i, j
    cdef double loss = 0.0

    for i in range(batch):
        loss -= log(d[i, labels[i]])
        d[i, labels[i]] -= 1.0
    for i in range(batch):
        for j in range(out):
            d[i, j] /= batch
    return loss / batch, dlogits


def dense_backward(double[:, ::1] x, double[:, ::1] hidden_pre,
                   double[:, ::1] dlogits, double[:, ::1] w2):
    cdef Py_ssize_t batch = x.shape[0], n = x.shape[1]
    cdef Py_ssize_t hid = hidden_pre.shape[1], out = dlogits.shape[1]
    cdef cnp.ndarray[double, ndim=2] dw1 = np.zeros((n, hid))
    cdef cnp.ndarray[double, ndim=1] db1 = np.zeros(hid)
    cdef cnp.ndarray[double, ndim=2] dw2 = np.zeros((hid, out))
    cdef cnp.ndarray[double, ndim=1] db2 = np.zeros(out)
    cdef cnp.ndarray[double, ndim=1] dhp_row = np.empty(hid)
    cdef double[:, ::1] dw1v = dw1, dw2v = dw2
    cdef double[::1] db1v = db1, db2v = db2, dhp = dhp_row
    cdef Py_ssize_t i, j, k
    cdef double hv, dh, xv

    for i in range(batch):
        for k in range(out):
            db2v[k] += dlogits[i, k]
        for j in range(hid):
            hv = hidden_pre[i, j]
            if hv > 0.0:
                dh = 0.0
                for k in range(out):
                    dh += dlogits[i, k] * w2[j, k]
                    dw2v[j, k] += hv * dlogits[i, k]
                dhp[j] = dh
                db1v[j] += dh
            else:
                dhp[j] = 0.0
        for k in range(n):
            xv = x[i, k]
            if xv == 0.0:
                continue
            for j in range(hid):
                dw1v[k, j] += xv * dhp[j]
    return dw1, db1, dw2, db2


def adam_step(double[::1] param, double[::1] grad, double[::1] m, double[::1] v,
              long t, double lr, double beta1, double beta2, double eps):
    cdef Py_ssize_t size = param.shape[0]
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef Py_ssize_t i
    cdef double g

    for i in range(size):
        g = grad[i]
        m[i] = beta1 * m[i] + (1.0 - beta1) * g
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g
        param[i] -= lr * (m[i] / c1) / (sqrt(v[i] / c2) + eps)

"""Plain-text storage of sampled certificates.

Layout::

    # oscindex certificate v1
    # form: e4
    # l: 1
    # h: 1.0
    # provenance: ...
    # columns: u w11 w12 w21 w22 s11 s12 s21 s22 e0_1 e0_2 e1_1 e1_2
    <rows: u followed by (re, im) pairs, 27 numbers per row>

``u = tanh(pi t / 2)``; the first and last rows are ``u = -1`` and
``u = 1`` (the limits at ``-inf`` and ``+inf``).  Between rows the
certificate is interpolated by cubic splines in ``u``.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

from .factorization import Certificate
from .symbols import t_from_u, u_from_t

HEADER = "oscindex certificate v1"
COLUMNS = "u w11 w12 w21 w22 s11 s12 s21 s22 e0_1 e0_2 e1_1 e1_2"


def _pack(z):
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real, z.imag], axis=-1).reshape(z.shape[0], -1)


def save_certificate(cert: Certificate, path, n: int = 2001, t_max: float = 12.0):
    """Write ``cert`` sampled on ``n`` points uniform in ``u`` and ``n`` uniform in ``t``.

    The second set keeps the transition regions near ``t = +-h`` resolved.
    """
    u = np.unique(np.concatenate([np.linspace(-1.0, 1.0, n), u_from_t(np.linspace(-t_max, t_max, n))]))
    n = u.size
    t = t_from_u(u)
    w = cert.w1(t).reshape(n, 4)
    s = cert.s1(t).reshape(n, 4)
    e0, e1 = cert.e0(t), cert.e1(t)
    table = np.column_stack([u, _pack(w), _pack(s), _pack(e0), _pack(e1)])
    header = [
        HEADER,
        f"form: {cert.form}",
        f"l: {cert.l}",
        f"h: {'none' if cert.h is None else repr(float(cert.h))}",
        f"provenance: {cert.provenance.replace(chr(10), ' ')}",
        f"columns: {COLUMNS}",
    ]
    np.savetxt(path, table, fmt="%.17g", header="\n".join(header))
    return path


def read_header(path) -> dict:
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if ":" in body:
                key, value = body.split(":", 1)
                meta[key.strip()] = value.strip()
    return meta


def load_certificate(path) -> Certificate:
    """Read a table written by :func:`save_certificate`."""
    meta = read_header(path)
    for key in ("form", "l", "h"):
        if key not in meta:
            raise ValueError(f"{path}: missing header field {key!r}")
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 1 + 2 * 12:
        raise ValueError(f"{path}: expected 25 columns, found {data.shape[1]}")
    u = data[:, 0]
    if u[0] != -1.0 or u[-1] != 1.0 or np.any(np.diff(u) <= 0):
        raise ValueError(f"{path}: u column must increase from -1 to 1")
    vals = data[:, 1::2] + 1j * data[:, 2::2]

    def interp(cols, shape):
        spline = CubicSpline(u, vals[:, cols], axis=0)

        def f(t):
            uu = u_from_t(t)
            return spline(np.clip(np.ravel(uu), -1.0, 1.0)).reshape(np.shape(uu) + shape)

        return f

    h = None if meta["h"] == "none" else float(meta["h"])
    return Certificate(
        interp(slice(0, 4), (2, 2)),
        interp(slice(4, 8), (2, 2)),
        interp(slice(8, 10), (2,)),
        interp(slice(10, 12), (2,)),
        meta["form"],
        int(meta["l"]),
        h,
        meta.get("provenance", "") + f"; loaded from {path}",
        {"table_rows": int(u.size)},
    )

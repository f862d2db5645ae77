"""Pure-Python q-product kernels.

Fallback used when the compiled extension is unavailable.  Operation
order matches the compiled kernel exactly so both produce bit-identical
results at the same precision.
"""

import gmpy2
from gmpy2 import mpc


def backend_name():
    return "python"


def qprod(q, qz, nterms, prec):
    """prod_{n=1}^{nterms} (1 - q^n qz)(1 - q^n / qz) at ``prec`` bits."""
    if not isinstance(q, mpc) or not isinstance(qz, mpc):
        raise TypeError("qprod expects gmpy2.mpc arguments")
    if prec < 2:
        raise ValueError("precision must be >= 2")
    with gmpy2.context(precision=prec):
        acc = mpc(1)
        qn = mpc(1)
        qzi = mpc(1) / qz
        for _ in range(nterms):
            qn = qn * q
            acc = acc * (1 - qn * qz)
            acc = acc * (1 - qn * qzi)
        return acc


def one_minus_qn_prod(q, nterms, prec):
    """prod_{n=1}^{nterms} (1 - q^n) at ``prec`` bits."""
    if not isinstance(q, mpc):
        raise TypeError("one_minus_qn_prod expects a gmpy2.mpc argument")
    if prec < 2:
        raise ValueError("precision must be >= 2")
    with gmpy2.context(precision=prec):
        acc = mpc(1)
        qn = mpc(1)
        for _ in range(nterms):
            qn = qn * q
            acc = acc * (1 - qn)
        return acc

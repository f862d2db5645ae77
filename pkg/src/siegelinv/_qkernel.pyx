# cython: language_level=3
"""Compiled q-product kernels.

These loops dominate the runtime of every analytic computation in the
package.  They operate on gmpy2 mpc objects through the MPC C API, round
every operation to the explicitly supplied precision (round-to-nearest),
and release the GIL inside the loops so conjugate evaluations can overlap.
"""

cimport gmpy2
from gmpy2 cimport mpc, mpc_ptr, mpc_srcptr, mpc_rnd_t, MPC_RNDNN, GMPy_MPC_New

gmpy2.import_gmpy2()

cdef extern from "mpc.h":
    int mpc_mul(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_div(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_ui_sub(mpc_ptr, unsigned long, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_set_ui(mpc_ptr, unsigned long, mpc_rnd_t) nogil


def backend_name():
    return "compiled"


def qprod(q, qz, long nterms, long prec):
    """prod_{n=1}^{nterms} (1 - q^n qz)(1 - q^n / qz) at ``prec`` bits.

    Operation order matches the pure-Python fallback exactly, so both
    backends return bit-identical results.
    """
    if not isinstance(q, mpc) or not isinstance(qz, mpc):
        raise TypeError("qprod expects gmpy2.mpc arguments")
    if prec < 2:
        raise ValueError("precision must be >= 2")
    cdef mpc acc = GMPy_MPC_New(prec, prec, NULL)
    cdef mpc qn = GMPy_MPC_New(prec, prec, NULL)
    cdef mpc qzi = GMPy_MPC_New(prec, prec, NULL)
    cdef mpc t = GMPy_MPC_New(prec, prec, NULL)
    cdef mpc_ptr pacc = <mpc_ptr>acc.c
    cdef mpc_ptr pqn = <mpc_ptr>qn.c
    cdef mpc_ptr pqzi = <mpc_ptr>qzi.c
    cdef mpc_ptr pt = <mpc_ptr>t.c
    cdef mpc_srcptr pq = <mpc_srcptr>(<mpc>q).c
    cdef mpc_srcptr pqz = <mpc_srcptr>(<mpc>qz).c
    cdef long n
    with nogil:
        mpc_set_ui(pacc, 1u, MPC_RNDNN)
        mpc_set_ui(pqn, 1u, MPC_RNDNN)
        mpc_set_ui(pt, 1u, MPC_RNDNN)
        mpc_div(pqzi, pt, pqz, MPC_RNDNN)
        for n in range(nterms):
            mpc_mul(pqn, pqn, pq, MPC_RNDNN)
            mpc_mul(pt, pqn, pqz, MPC_RNDNN)
            mpc_ui_sub(pt, 1u, pt, MPC_RNDNN)
            mpc_mul(pacc, pacc, pt, MPC_RNDNN)
            mpc_mul(pt, pqn, pqzi, MPC_RNDNN)
            mpc_ui_sub(pt, 1u, pt, MPC_RNDNN)
            mpc_mul(pacc, pacc, pt, MPC_RNDNN)
    return acc


def one_minus_qn_prod(q, long nterms, long prec):
    """prod_{n=1}^{nterms} (1 - q^n) at ``prec`` bits."""
    if not isinstance(q, mpc):
        raise TypeError("one_minus_qn_prod expects a gmpy2.mpc argument")
    if prec < 2:
        raise ValueError("precision must be >= 2")
    cdef mpc acc = GMPy_MPC_New(prec, prec, NULL)
    cdef mpc qn = GMPy_MPC_New(prec, prec, NULL)
    cdef mpc t = GMPy_MPC_New(prec, prec, NULL)
    cdef mpc_ptr pacc = <mpc_ptr>acc.c
    cdef mpc_ptr pqn = <mpc_ptr>qn.c
    cdef mpc_ptr pt = <mpc_ptr>t.c
    cdef mpc_srcptr pq = <mpc_srcptr>(<mpc>q).c
    cdef long n
    with nogil:
        mpc_set_ui(pacc, 1u, MPC_RNDNN)
        mpc_set_ui(pqn, 1u, MPC_RNDNN)
        for n in range(nterms):
            mpc_mul(pqn, pqn, pq, MPC_RNDNN)
            mpc_ui_sub(pt, 1u, pqn, MPC_RNDNN)
            mpc_mul(pacc, pacc, pt, MPC_RNDNN)
    return acc

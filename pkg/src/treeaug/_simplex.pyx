# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled tableau pivot kernel.

Semantically identical to ``_simplex_py``; entries remain arbitrary-precision
Python ints, the speedup comes from removing interpreter loop and dispatch
overhead in the quadratic elimination step.
"""

from math import gcd


def pivot(list nums, list dens, Py_ssize_t pr, Py_ssize_t pc):
    """Perform an exact Gauss-Jordan pivot at (pr, pc), in place."""
    cdef list prow_n = <list> nums[pr]
    cdef list prow_d = <list> dens[pr]
    cdef Py_ssize_t ncols = len(prow_n)
    cdef Py_ssize_t nrows = len(nums)
    cdef Py_ssize_t j, r, k, nnz
    cdef list rn, rd, nz
    pn = prow_n[pc]
    pd = prow_d[pc]
    if pn == 0:
        raise ZeroDivisionError("pivot on a zero entry")
    for j in range(ncols):
        bn = prow_n[j]
        if bn == 0:
            continue
        bd = prow_d[j]
        num = bn * pd
        den = bd * pn
        g = gcd(num, den)
        num //= g
        den //= g
        if den < 0:
            num = -num
            den = -den
        prow_n[j] = num
        prow_d[j] = den
    nz = []
    for j in range(ncols):
        if prow_n[j] != 0:
            nz.append(j)
    nnz = len(nz)
    for r in range(nrows):
        if r == pr:
            continue
        rn = <list> nums[r]
        fn = rn[pc]
        if fn == 0:
            continue
        rd = <list> dens[r]
        fd = rd[pc]
        for k in range(nnz):
            j = <Py_ssize_t> nz[k]
            bn = prow_n[j]
            bd = prow_d[j]
            an = rn[j]
            ad = rd[j]
            num = an * fd * bd - fn * bn * ad
            if num == 0:
                rn[j] = 0
                rd[j] = 1
                continue
            den = ad * fd * bd
            g = gcd(num, den)
            num //= g
            den //= g
            if den < 0:
                num = -num
                den = -den
            rn[j] = num
            rd[j] = den

"""Pure-Python tableau pivot kernel.

Fallback used when the compiled extension is unavailable.  The tableau is a
pair of parallel row-major int matrices (numerators and denominators, with
denominators kept positive and entries reduced); a pivot is a full
Gauss-Jordan step on the pivot element.
"""

from math import gcd


def pivot(nums, dens, pr, pc):
    """Perform an exact Gauss-Jordan pivot at (pr, pc), in place."""
    prow_n = nums[pr]
    prow_d = dens[pr]
    pn = prow_n[pc]
    pd = prow_d[pc]
    if pn == 0:
        raise ZeroDivisionError("pivot on a zero entry")
    ncols = len(prow_n)
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
    nz = [j for j in range(ncols) if prow_n[j] != 0]
    nrows = len(nums)
    for r in range(nrows):
        if r == pr:
            continue
        rn = nums[r]
        fn = rn[pc]
        if fn == 0:
            continue
        rd = dens[r]
        fd = rd[pc]
        for j in nz:
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

# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of algen.kernels._pure; identical semantics."""


def mul_packed(list a_keys, list a_degs, list a_coefs,
               list b_keys, list b_degs, list b_coefs, long cap):
    cdef Py_ssize_t i, j, m, lo, hi, mid
    cdef Py_ssize_t na = len(a_keys)
    cdef Py_ssize_t nb = len(b_keys)
    cdef long da, lim
    cdef dict out = {}
    cdef object ka, ca, k, v
    for i in range(na):
        ka = a_keys[i]
        ca = a_coefs[i]
        da = a_degs[i]
        if cap >= 0:
            lim = cap - da
            lo = 0
            hi = nb
            while lo < hi:
                mid = (lo + hi) >> 1
                if <long>b_degs[mid] < lim:
                    lo = mid + 1
                else:
                    hi = mid
            m = lo
        else:
            m = nb
        for j in range(m):
            k = ka + b_keys[j]
            v = out.get(k)
            if v is None:
                out[k] = ca * b_coefs[j]
            else:
                out[k] = v + ca * b_coefs[j]
    return out


def echelon(list rows, Py_ssize_t ncols):
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t r = 0, c, i, j, best
    cdef long bits, best_bits
    cdef object prev = 1, p, f, v
    cdef list prow, row
    cdef list pivot_cols = []
    for c in range(ncols):
        if r == nrows:
            break
        best = -1
        best_bits = 0
        for i in range(r, nrows):
            v = (<list>rows[i])[c]
            if v:
                bits = abs(v).bit_length()
                if best < 0 or bits < best_bits:
                    best = i
                    best_bits = bits
        if best < 0:
            continue
        if best != r:
            rows[r], rows[best] = rows[best], rows[r]
        prow = rows[r]
        p = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            if f:
                for j in range(ncols):
                    row[j] = (p * row[j] - f * prow[j]) // prev
            elif p != prev:
                for j in range(ncols):
                    if row[j]:
                        row[j] = (p * row[j]) // prev
        prev = p
        pivot_cols.append(c)
        r += 1
    return pivot_cols, prev
